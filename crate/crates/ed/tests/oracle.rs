use qbat_core::{
    dispersion, momentum_grid, stored_energy_asymptotic, stored_energy_curve, ModelParams,
};
use qbat_ed::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(g: f64, d: f64, h: f64) -> ModelParams {
    ModelParams::new(g, d, h).unwrap()
}

fn free_fermion_ground_energy(params: &ModelParams, n_sites: usize) -> f64 {
    let grid = momentum_grid(n_sites / 2).unwrap();
    -0.5 * grid
        .k_values()
        .iter()
        .map(|&k| {
            let (w1, w2) = dispersion(params, k).unwrap();
            w1 + w2
        })
        .sum::<f64>()
}

fn even_ground(params: &ModelParams, n: usize) -> GroundState {
    let h = build_spin_hamiltonian(params, n).unwrap();
    ground_state(&h, &ParitySector::new(n, Parity::Even)).unwrap()
}

#[test]
fn xx_ring_of_four() {
    // Free fermions with e(p) = -2 cos p on antiperiodic momenta +-pi/4 and
    // +-3pi/4: both negative levels are filled, E0 = -4 cos(pi/4).
    let g = even_ground(&p(0.0, 0.0, 0.0), 4);
    let expected = -4.0 * (std::f64::consts::PI / 4.0).cos();
    assert!((g.energy - expected).abs() < 1e-12, "{}", g.energy);
    assert!((g.energy - free_fermion_ground_energy(&p(0.0, 0.0, 0.0), 4)).abs() < 1e-12);
}

#[test]
fn ising_spectrum_is_symmetric() {
    let h = build_spin_hamiltonian(&p(1.0, 0.0, 0.0), 4).unwrap();
    let mut all: Vec<f64> = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let m = h.sector_matrix(&ParitySector::new(4, parity));
        all.extend(m.symmetric_eigenvalues().iter());
    }
    all.sort_by(f64::total_cmp);
    for (a, b) in all.iter().zip(all.iter().rev()) {
        assert!((a + b).abs() < 1e-12);
    }
}

#[test]
fn ground_energy_matches_free_fermions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4, 8] {
        for _ in 0..10 {
            let params = p(
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..2.0),
            );
            let g = even_ground(&params, n);
            let ff = free_fermion_ground_energy(&params, n);
            assert!(
                (g.energy - ff).abs() < 1e-9,
                "{params:?}: {} vs {}",
                g.energy,
                ff
            );
        }
    }
    let xx = p(0.0, 0.0, 0.0);
    assert!((even_ground(&xx, 8).energy - free_fermion_ground_energy(&xx, 8)).abs() < 1e-9);
}

#[test]
fn lanczos_agrees_with_free_fermions() {
    for params in [p(0.4, 0.9, 0.6), p(1.3, 0.2, 0.1)] {
        let g = even_ground(&params, 12);
        let ff = free_fermion_ground_energy(&params, 12);
        assert!((g.energy - ff).abs() < 1e-9, "{} vs {}", g.energy, ff);
        let norm: f64 = g.psi.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn strong_field_polarizes_down() {
    let g = even_ground(&p(0.0, 0.0, 50.0), 8);
    assert!((g.energy + 8.0 * 50.0).abs() < 1.0);
    let sector = ParitySector::new(8, Parity::Even);
    let all_down = sector.index_of(0).unwrap();
    assert!(g.psi[all_down] > 0.999);
}

#[test]
fn dimerization_anchoring_is_a_gauge_choice() {
    let (pre, post) = (p(0.2, 1.1, 0.5), p(0.5, 1.1, 0.5));
    let (pre_m, post_m) = (p(0.2, -1.1, 0.5), p(0.5, -1.1, 0.5));
    let a = dephased_energy(&pre, &post, 8).unwrap();
    let b = dephased_energy(&pre_m, &post_m, 8).unwrap();
    assert!((a - b).abs() < 1e-10);
    let a = evolved_energy(&pre, &post, 1.5, 8).unwrap();
    let b = evolved_energy(&pre_m, &post_m, 1.5, 8).unwrap();
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn trivial_quenches() {
    let a = p(0.3, 0.8, 0.4);
    assert!(evolved_energy(&a, &p(0.9, 1.1, 0.2), 0.0, 8).unwrap().abs() < 1e-12);
    assert!(evolved_energy(&a, &a, 3.7, 8).unwrap().abs() < 1e-12);
    assert!(dephased_energy(&a, &a, 8).unwrap().abs() < 1e-12);
}

#[test]
fn unitary_evolution_invariants() {
    let q = QuenchDynamics::new(&p(0.2, 1.1, 0.5), &p(0.5, 0.7, 0.9), 8).unwrap();
    let e1 = q.charger_energy_at(0.0).unwrap();
    for tau in [0.3, 2.0, 17.0] {
        assert!((q.charger_energy_at(tau).unwrap() - e1).abs() < 1e-10);
        let norm: f64 = q.evolve(tau).unwrap().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn krylov_matches_dense_dynamics() {
    // At 12 sites the propagator is Krylov; compare with the free-fermion
    // curve, which is exact at matched size.
    let (pre, post) = (p(0.2, 1.1, 0.5), p(0.5, 1.1, 0.5));
    let times = [0.5, 2.0];
    let ff = stored_energy_curve(&pre, &post, &times, 6).unwrap();
    let q = QuenchDynamics::new(&pre, &post, 12).unwrap();
    for (tau, e) in times.iter().zip(&ff.energies) {
        let ed = q.energy_at(*tau).unwrap();
        assert!((ed - e * 6.0).abs() < 1e-8, "{ed} vs {}", e * 6.0);
    }
}

#[test]
fn dephased_energy_matches_long_time_average() {
    let (pre, post) = (p(0.3, 0.9, 0.7), p(0.8, 1.2, 0.4));
    let q = QuenchDynamics::new(&pre, &post, 8).unwrap();
    let samples = 10_000;
    let mean = (0..samples)
        .map(|i| {
            q.energy_at(200.0 + 200.0 * i as f64 / (samples - 1) as f64)
                .unwrap()
        })
        .sum::<f64>()
        / samples as f64;
    let dephased = q.dephased_energy().unwrap();
    assert!((mean - dephased).abs() < 1e-2, "{mean} vs {dephased}");
}

#[test]
fn dephased_energy_matches_overlap_formula() {
    // Anisotropy line at h = 0.5, delta = 1.1, nu_i = 0.2, nu_f = 0.3.
    let (pre, post) = (p(0.2, 1.1, 0.5), p(0.5, 1.1, 0.5));
    let ed = dephased_energy(&pre, &post, 8).unwrap();
    let ff = stored_energy_asymptotic(&pre, &post, 4).unwrap();
    assert!((ed - ff).abs() < 1e-8, "{ed} vs {ff}");
}

#[test]
fn dense_limit_is_enforced() {
    let a = p(0.1, 0.1, 0.1);
    assert!(matches!(
        dephased_energy(&a, &a, 12),
        Err(EdError::DenseLimit(12))
    ));
}

#[test]
fn sector_diagnostic_reports_both_sectors() {
    let d = sector_diagnostic(&p(0.5, 0.2, 0.3), 6).unwrap();
    assert!(d.even.is_finite() && d.odd.is_finite());
    assert_eq!(d.odd_is_lower(), d.odd < d.even - 1e-12);
}
