use qbat_core::{sweep_scenario, Boundary, QuenchScenario, SweepResult};

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// `(E(b) - E(a)) / (b - a)` between the grid points nearest to `a` and `b`.
fn segment_slope(sweep: &SweepResult, a: f64, b: f64) -> f64 {
    let nearest = |x: f64| {
        sweep
            .nu_values
            .iter()
            .enumerate()
            .min_by(|(_, u), (_, v)| (*u - x).abs().total_cmp(&(*v - x).abs()))
            .unwrap()
            .0
    };
    let (i, j) = (nearest(a), nearest(b));
    (sweep.energies[j] - sweep.energies[i]) / (sweep.nu_values[j] - sweep.nu_values[i])
}

#[test]
fn anisotropy_sweep_three_segments() {
    let s = QuenchScenario::anisotropy(1.1, 0.5, 0.3);
    let sweep = sweep_scenario(&s, &grid(0.0, 1.0, 0.01), 512).unwrap();
    let m: Vec<f64> = sweep.critical_markers.iter().map(|c| c.nu).collect();
    assert_eq!(m.len(), 2);
    assert!(
        (m[0] - 0.487).abs() < 1e-3 && (m[1] - 0.680).abs() < 1e-3,
        "{m:?}"
    );
    let rising = segment_slope(&sweep, 0.0, 0.48);
    let gradual = segment_slope(&sweep, 0.49, 0.67);
    let falling = segment_slope(&sweep, 0.69, 1.0);
    assert!(
        rising > 0.0 && gradual > 0.0 && falling < 0.0,
        "{rising} {gradual} {falling}"
    );
    assert!(
        gradual < rising,
        "mean slope {gradual} after the first marker is not smaller than {rising}"
    );
}

#[test]
fn field_sweep_three_segments() {
    let s = QuenchScenario::field(0.5, 1.5, 0.41);
    let sweep = sweep_scenario(&s, &grid(0.0, 1.4, 0.01), 512).unwrap();
    let m: Vec<f64> = sweep.critical_markers.iter().map(|c| c.nu).collect();
    assert!(
        (m[0] - 0.2514).abs() < 1e-4 && (m[1] - 1.0042).abs() < 1e-4,
        "{m:?}"
    );
    assert!(segment_slope(&sweep, 0.0, 0.25) > 0.0);
    assert!(segment_slope(&sweep, 0.26, 1.0) > 0.0);
    assert!(segment_slope(&sweep, 1.01, 1.4) < 0.0);
}

#[test]
fn zero_field_markers() {
    // h = 0: post gamma on the surfaces is 1/1.1 and 1.1.
    let s = QuenchScenario::anisotropy(1.1, 0.0, 0.3);
    let sweep = sweep_scenario(&s, &grid(0.0, 1.0, 0.01), 64).unwrap();
    let m: Vec<(f64, Boundary)> = sweep
        .critical_markers
        .iter()
        .map(|c| (c.nu, c.boundary))
        .collect();
    assert_eq!(m.len(), 2);
    assert!(
        (m[0].0 - (1.0 / 1.1 - 0.3)).abs() < 1e-8 && m[0].1 == Boundary::Hyperbolic,
        "{m:?}"
    );
    assert!(
        (m[1].0 - 0.8).abs() < 1e-8 && m[1].1 == Boundary::Conic,
        "{m:?}"
    );
}

#[test]
fn zero_field_curve_lies_above() {
    let nu = grid(0.0, 1.0, 0.01);
    let zero = sweep_scenario(&QuenchScenario::anisotropy(1.1, 0.0, 0.3), &nu, 512).unwrap();
    let half = sweep_scenario(&QuenchScenario::anisotropy(1.1, 0.5, 0.3), &nu, 512).unwrap();
    let below: Vec<(f64, f64, f64)> = nu
        .iter()
        .zip(zero.energies.iter().zip(&half.energies))
        .filter(|(_, (a, b))| a <= b)
        .map(|(v, (a, b))| (*v, *a, *b))
        .collect();
    assert!(
        below.is_empty(),
        "h = 0 curve not above h = 0.5 at (nu, E0, E0.5): {below:?}"
    );
}
