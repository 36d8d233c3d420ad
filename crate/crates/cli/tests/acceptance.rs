//! Acceptance criteria A1-A10. Each test prints one `PASS`/`FAIL` line and
//! then asserts, so `cargo test --test acceptance -- --nocapture` gives a
//! readable summary.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use qbat::commands::parallel_sweep;
use qbat::verify::{draw_boundary_point, draw_generic_point, free_fermion_ground_energy};
use qbat_core::{
    bdg_block, boundary_residuals, dispersion, mode_decomposition, spectral_gap,
    stored_energy_asymptotic, stored_energy_curve, stored_energy_time_average,
    stored_energy_two_channel, sweep_point, Boundary, ModelParams, QuenchScenario, SweepResult,
};
use qbat_ed::{build_spin_hamiltonian, ground_state, Parity, ParitySector, QuenchDynamics};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAP_SAMPLES: usize = 1024;

fn report(id: &str, ok: bool, detail: String) {
    println!("{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw(rng: &mut ChaCha8Rng) -> ModelParams {
    let mut x = || rng.random_range(-2.0..2.0);
    ModelParams::new(x(), x(), x()).unwrap()
}

fn nu_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Mean of the grid finite differences whose both ends lie in `[a, b]`,
/// i.e. `(E(last) - E(first)) / (last - first)` over the enclosed points.
fn segment_slope(sweep: &SweepResult, a: f64, b: f64) -> f64 {
    let inside: Vec<usize> = (0..sweep.nu_values.len())
        .filter(|&i| sweep.nu_values[i] >= a - 1e-12 && sweep.nu_values[i] <= b + 1e-12)
        .collect();
    let (i, j) = (inside[0], *inside.last().unwrap());
    (sweep.energies[j] - sweep.energies[i]) / (sweep.nu_values[j] - sweep.nu_values[i])
}

/// Marker locations from the closed-form surfaces, for the three sweeps.
fn anisotropy_markers() -> [f64; 2] {
    // h = 0.5, delta = 1.1: gamma^2 = 0.75 / 1.21 and gamma^2 = 1.21 - 0.25.
    [(0.75f64 / 1.21).sqrt() - 0.3, 0.96f64.sqrt() - 0.3]
}

fn field_markers() -> [f64; 2] {
    // gamma = 0.5, delta = 1.5: h^2 = 1 - 0.5625 and h^2 = 2.25 - 0.25.
    [0.4375f64.sqrt() - 0.41, 2f64.sqrt() - 0.41]
}

fn diagonal_markers() -> [f64; 2] {
    // h = gamma + 0.5, delta = 1.5: 3.25 g^2 + g - 0.75 = 0 and 2 g^2 + g - 2 = 0.
    [
        (-1.0 + 10.75f64.sqrt()) / 6.5 - 0.28,
        (-1.0 + 17f64.sqrt()) / 4.0 - 0.28,
    ]
}

fn marker_values(sweep: &SweepResult) -> Vec<f64> {
    sweep.critical_markers.iter().map(|c| c.nu).collect()
}

fn a3_pairs() -> Vec<(ModelParams, ModelParams)> {
    let mut r = rng(3);
    (0..10).map(|_| (draw(&mut r), draw(&mut r))).collect()
}

fn a6_sweep() -> SweepResult {
    parallel_sweep(
        &QuenchScenario::anisotropy(1.1, 0.5, 0.3),
        &nu_grid(0.0, 1.0, 0.01),
        512,
    )
    .unwrap()
}

fn a7_sweeps() -> [SweepResult; 2] {
    [
        parallel_sweep(
            &QuenchScenario::field(0.5, 1.5, 0.41),
            &nu_grid(0.0, 1.4, 0.01),
            512,
        )
        .unwrap(),
        parallel_sweep(
            &QuenchScenario::diagonal(1.5, 0.28),
            &nu_grid(0.0, 1.0, 0.01),
            512,
        )
        .unwrap(),
    ]
}

#[test]
fn a1_spectral_identity() {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = draw(&mut r);
        let k = loop {
            let k = r.random_range(0.0..2.0 * PI);
            if k > 0.0 {
                break k;
            }
        };
        let modes = mode_decomposition(&bdg_block(&p, k)).unwrap();
        let (w1, w2) = dispersion(&p, k).unwrap();
        let mut got = modes.energies;
        got.sort_by(f64::total_cmp);
        let mut want = [w1, w2, -w1, -w2];
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(want) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && elapsed < Duration::from_secs(1);
    report(
        "A1",
        ok,
        format!(
            "spectral identity: max |eig - (+-w)| = {worst:.2e} (tol 1e-10), {elapsed:.2?} (< 1 s)"
        ),
    );
    assert!(ok);
}

#[test]
fn a2_ground_state_identity() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for n_sites in [4, 8] {
        let sector = ParitySector::new(n_sites, Parity::Even);
        for _ in 0..20 {
            let p = draw(&mut r);
            let ed = ground_state(&build_spin_hamiltonian(&p, n_sites).unwrap(), &sector)
                .unwrap()
                .energy;
            worst = worst.max((ed - free_fermion_ground_energy(&p, n_sites / 2).unwrap()).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-9 && elapsed < Duration::from_secs(10);
    report("A2", ok, format!("even-sector ED ground energy vs -1/2 sum(w1+w2): max err {worst:.2e} (tol 1e-9), {elapsed:.2?} (< 10 s)"));
    assert!(ok);
}

#[test]
fn a3_stored_energy_oracle() {
    let start = Instant::now();
    let (mut vs_ed, mut vs_avg, mut two_channel) = (0.0f64, 0.0f64, 0.0f64);
    for (pre, post) in a3_pairs() {
        let e = stored_energy_asymptotic(&pre, &post, 4).unwrap();
        let ed = QuenchDynamics::new(&pre, &post, 8)
            .unwrap()
            .dephased_energy()
            .unwrap();
        vs_ed = vs_ed.max((e - ed).abs());
        vs_avg = vs_avg.max((e - stored_energy_time_average(&pre, &post, 4).unwrap()).abs());
        two_channel =
            two_channel.max((stored_energy_two_channel(&pre, &post, 4).unwrap() - ed).abs());
    }
    let elapsed = start.elapsed();
    let ok = vs_ed <= 1e-8 && vs_avg <= 1e-10 && elapsed < Duration::from_secs(30);
    report(
        "A3",
        ok,
        format!(
            "stored energy vs ED dephased: {vs_ed:.2e} (tol 1e-8); vs covariance average: {vs_avg:.2e} (tol 1e-10); {elapsed:.2?} (< 30 s) \
             [diagnostic: two-channel form vs ED {two_channel:.2e}]"
        ),
    );
    assert!(ok);
}

#[test]
fn a4_finite_time_dynamics() {
    let taus = [0.0, 0.5, 1.0, 2.0, 5.0];
    let mut r = rng(4);
    let (mut worst, mut origin) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let (pre, post) = (draw(&mut r), draw(&mut r));
        let curve = stored_energy_curve(&pre, &post, &taus, 4).unwrap();
        let dynamics = QuenchDynamics::new(&pre, &post, 8).unwrap();
        origin = origin.max(curve.energies[0].abs());
        for (&tau, &e) in taus.iter().zip(&curve.energies).skip(1) {
            worst = worst.max((4.0 * e - dynamics.energy_at(tau).unwrap()).abs());
        }
    }
    let ok = worst <= 1e-8 && origin <= 1e-12;
    report("A4", ok, format!("E(tau) vs ED evolution: max err {worst:.2e} (tol 1e-8); |E(0)| = {origin:.2e} (tol 1e-12)"));
    assert!(ok);
}

#[test]
fn a5_gap_closure() {
    let start = Instant::now();
    let mut r = rng(5);
    let mut on_surface = 0.0f64;
    for conic in [false, true] {
        for _ in 0..200 {
            let p = draw_boundary_point(&mut r, conic);
            on_surface = on_surface.max(spectral_gap(&p, GAP_SAMPLES).unwrap());
        }
    }
    let mut off_surface = f64::INFINITY;
    let mut worst_point = None;
    for _ in 0..200 {
        let p = draw_generic_point(&mut r, 0.05);
        let gap = spectral_gap(&p, GAP_SAMPLES).unwrap();
        if gap < off_surface {
            off_surface = gap;
            worst_point = Some(p);
        }
    }
    let elapsed = start.elapsed();
    let ok = on_surface <= 1e-6 && off_surface >= 1e-3 && elapsed < Duration::from_secs(5);
    report(
        "A5",
        ok,
        format!(
            "gap on surfaces max {on_surface:.2e} (<= 1e-6); off surfaces min {off_surface:.2e} (>= 1e-3) at {worst_point:?}; {elapsed:.2?} (< 5 s)"
        ),
    );
    assert!(ok);
}

#[test]
fn a6_anisotropy_sweep_shape() {
    let start = Instant::now();
    let sweep = a6_sweep();
    let elapsed = start.elapsed();
    let slopes = [
        segment_slope(&sweep, 0.05, 0.45),
        segment_slope(&sweep, 0.52, 0.65),
        segment_slope(&sweep, 0.72, 0.95),
    ];
    let got = marker_values(&sweep);
    let want = anisotropy_markers();
    let markers_ok = got.len() == 2
        && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-6)
        && sweep.critical_markers[0].boundary == Boundary::Hyperbolic
        && sweep.critical_markers[1].boundary == Boundary::Conic
        && [0.4873, 0.6798]
            .iter()
            .zip(&got)
            .all(|(q, g)| (q - g).abs() < 5e-5);
    let shape_ok = slopes[0] > 0.0 && slopes[1] > 0.0 && slopes[2] < 0.0;
    let largest_ok = slopes[0] > slopes[1] && slopes[0] > slopes[2];
    let ok = markers_ok && shape_ok && largest_ok && elapsed < Duration::from_secs(5);
    report(
        "A6",
        ok,
        format!(
            "anisotropy sweep: slopes [0.05,0.45] {:.4} [0.52,0.65] {:.4} [0.72,0.95] {:.4} (need +largest, +smaller, -); \
             markers {got:?} vs {want:?} (1e-6); {elapsed:.2?} (< 5 s)",
            slopes[0], slopes[1], slopes[2]
        ),
    );
    assert!(markers_ok, "markers {got:?} vs {want:?}");
    assert!(shape_ok, "slope signs {slopes:?}");
    assert!(
        largest_ok,
        "first-segment mean slope is not the largest: {slopes:?}"
    );
    assert!(elapsed < Duration::from_secs(5));
}

#[test]
fn a7_field_and_diagonal_sweep_shape() {
    let sweeps = a7_sweeps();
    let expected = [
        (field_markers(), [0.2514, 1.0042]),
        (diagonal_markers(), [0.0706, 0.5008]),
    ];
    let margin = 0.02;
    let mut ok = true;
    let mut detail = Vec::new();
    for (sweep, (exact, quoted)) in sweeps.iter().zip(expected) {
        let got = marker_values(sweep);
        let markers_ok = got.len() == 2
            && got.iter().zip(exact).all(|(g, w)| (g - w).abs() <= 1e-6)
            && got.iter().zip(quoted).all(|(g, q)| (g - q).abs() < 5e-5);
        let (lo, hi) = (sweep.nu_values[0], *sweep.nu_values.last().unwrap());
        let slopes = [
            segment_slope(sweep, lo, got[0] - margin),
            segment_slope(sweep, got[0] + margin, got[1] - margin),
            segment_slope(sweep, got[1] + margin, hi),
        ];
        let shape_ok = slopes[0] > 0.0 && slopes[1] > 0.0 && slopes[2] < 0.0;
        ok &= markers_ok && shape_ok;
        detail.push(format!(
            "{}: markers {got:?} slopes [{:.4}, {:.4}, {:.4}]",
            sweep.scenario.kind.name(),
            slopes[0],
            slopes[1],
            slopes[2]
        ));
    }
    report(
        "A7",
        ok,
        format!(
            "{} (need markers within 1e-6 and slopes +, +, -)",
            detail.join("; ")
        ),
    );
    assert!(ok);
}

#[test]
fn a8_null_quench_and_non_negativity() {
    let mut r = rng(8);
    let mut null = 0.0f64;
    for _ in 0..20 {
        let p = draw(&mut r);
        null = null.max(stored_energy_asymptotic(&p, &p, 4).unwrap().abs());
        null = null.max(stored_energy_asymptotic(&p, &p, 512).unwrap().abs());
    }
    let mut lowest = f64::INFINITY;
    for (pre, post) in a3_pairs() {
        lowest = lowest.min(stored_energy_asymptotic(&pre, &post, 4).unwrap());
    }
    let mut sweeps = vec![a6_sweep()];
    sweeps.extend(a7_sweeps());
    for sweep in &sweeps {
        for &e in &sweep.energies {
            lowest = lowest.min(e * sweep.n_dimers as f64);
        }
    }
    let ok = null <= 1e-12 && lowest >= -1e-12;
    report("A8", ok, format!("null quench max |dE| {null:.2e} (tol 1e-12); min dE over A3/A6/A7 {lowest:.3e} (>= -1e-12)"));
    assert!(ok);
}

#[test]
fn a9_thermodynamic_convergence() {
    let mut r = rng(9);
    let scenarios = [
        (QuenchScenario::anisotropy(1.1, 0.5, 0.3), 1.0),
        (QuenchScenario::field(0.5, 1.5, 0.41), 1.4),
        (QuenchScenario::diagonal(1.5, 0.28), 1.0),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 20 {
        let (scenario, hi) = &scenarios[count % 3];
        let nu = r.random_range(0.0..*hi);
        let generic = [scenario.pre(nu).unwrap(), scenario.post(nu).unwrap()]
            .iter()
            .all(|p| {
                let res = boundary_residuals(p);
                res.r_hyperbolic.abs() >= 0.05 && res.r_conic.abs() >= 0.05
            });
        if !generic {
            continue;
        }
        let a = sweep_point(scenario, nu, 512).unwrap();
        let b = sweep_point(scenario, nu, 1024).unwrap();
        worst = worst.max((a - b).abs());
        count += 1;
    }
    let ok = worst <= 1e-4;
    report(
        "A9",
        ok,
        format!("|dE/N(512) - dE/N(1024)| max {worst:.2e} over 20 points (tol 1e-4)"),
    );
    assert!(ok);
}

#[test]
fn a10_determinism_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_qbat"))
            .args([
                "sweep",
                "--scenario",
                "anisotropy",
                "--h",
                "0.5",
                "--delta",
                "1.1",
                "--nu-f",
                "0.3",
                "--nu-min",
                "0",
                "--nu-max",
                "1",
                "--nu-step",
                "0.01",
                "--dimers",
                "512",
                "--threads",
                threads,
                "--out",
                name,
            ])
            .current_dir(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let files = [
        run("1", "t1a.csv"),
        run("8", "t8a.csv"),
        run("1", "t1b.csv"),
        run("8", "t8b.csv"),
    ];
    let ok = files.iter().all(|f| f == &files[0]) && !files[0].is_empty();
    report(
        "A10",
        ok,
        format!(
            "sweep output with --threads 1 and 8, two runs each: {} bytes, identical = {ok}",
            files[0].len()
        ),
    );
    assert!(ok);
}
