use thiserror::Error;

/// Errors raised by the free-fermion engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` is not a finite real number ({value})")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("number of dimers must be even and at least 2, got {0}")]
    OddDimerCount(usize),

    #[error("outer radicand {0:e} is negative beyond round-off")]
    NegativeRadicand(f64),

    #[error("gap search needs at least 64 samples, got {0}")]
    TooFewSamples(usize),

    #[error("interval [{lo}, {hi}] is empty or not finite")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("Hermitian eigensolver did not converge")]
    EigensolverFailure,

    #[error("decompositions belong to different momenta ({pre} vs {post})")]
    MomentumMismatch { pre: f64, post: f64 },

    #[error("ground state is degenerate: lowest quasiparticle energy {0:e} is zero")]
    GaplessAmbiguity(f64),

    #[error("an explicit scenario has no parameter line")]
    ExplicitScenario,

    #[error("{what} must be finite and strictly ascending")]
    InvalidGrid { what: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;
