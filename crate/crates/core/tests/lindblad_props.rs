use cpbox_core::lindblad::{
    build_hamiltonian, evolve, excitation_number, liouvillian_apply, IntegratorConfig,
};
use cpbox_core::metrics::partial_trace_qubit;
use cpbox_core::model::{
    choose_truncation, coherent_amplitudes, FockTruncation, InitialState, ReducedParams,
};
use cpbox_core::{DensityMatrix, C64};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn initial(nbar: f64, theta: f64) -> (FockTruncation, DensityMatrix) {
    let trunc = choose_truncation(nbar.sqrt(), 1e-12);
    let field = coherent_amplitudes(nbar.sqrt(), 0.3, &trunc).unwrap();
    let init = InitialState::new(theta, field).unwrap();
    (trunc, init.density_matrix())
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let a = Array2::from_shape_fn((dim, dim), |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut rho = a.dot(&a.t().mapv(|z| z.conj()));
    let tr = rho.diag().sum();
    rho.mapv_inplace(|z| z / tr);
    DensityMatrix::from_matrix(rho).unwrap()
}

// −i[H, ρ] + γ(2NρN − N²ρ − ρN²) with dense products.
fn dense_rhs(h: &Array2<C64>, gamma: f64, rho: &Array2<C64>) -> Array2<C64> {
    let d = rho.nrows();
    let n = Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            C64::new((i / 2) as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let n2 = n.dot(&n);
    let comm = h.dot(rho) - rho.dot(h);
    let diss = n.dot(rho).dot(&n) * C64::new(2.0, 0.0) - n2.dot(rho) - rho.dot(&n2);
    comm * C64::new(0.0, -1.0) + diss * C64::new(gamma, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rhs_matches_dense_formula(
        seed in any::<u64>(),
        n_max in 1usize..12,
        g in 0.01f64..2.0,
        delta in -2.0f64..2.0,
        gamma in 0.0f64..1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trunc = FockTruncation::new(n_max, 0.5).unwrap();
        let p = ReducedParams::scaled(g, delta, gamma).unwrap();
        let h = build_hamiltonian(&p, &trunc);
        let rho = random_state(&mut rng, 2 * (n_max + 1));
        let fast = liouvillian_apply(&h, gamma, &rho).unwrap();
        let dense = dense_rhs(h.matrix(), gamma, rho.matrix());
        let scale = 1.0 + (n_max * n_max) as f64;
        for (a, b) in fast.iter().zip(dense.iter()) {
            prop_assert!((a - b).norm() < 1e-13 * scale, "{} vs {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trajectories_conserve_invariants(
        nbar in 0.5f64..5.0,
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        delta in -1.0f64..1.0,
        gamma in 0.0f64..0.3,
    ) {
        let (trunc, rho0) = initial(nbar, theta);
        let p = ReducedParams::scaled(0.5, delta, gamma).unwrap();
        let h = build_hamiltonian(&p, &trunc);
        let times: Vec<f64> = (0..=20).map(|k| k as f64).collect();
        let traj = evolve(&h, gamma, &rho0, 20.0, &IntegratorConfig::default(), &times).unwrap();
        let n0 = excitation_number(&rho0);
        let total = rho0.trace().re;
        for rho in &traj {
            prop_assert!((rho.trace().re - total).abs() < 1e-8);
            prop_assert!(rho.hermiticity_defect() < 1e-10);
            prop_assert!(rho.min_eigenvalue() > -1e-8);
            if gamma == 0.0 {
                prop_assert!((excitation_number(rho) - n0).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn excitation_number_is_conserved_without_damping() {
    let (trunc, rho0) = initial(4.0, 0.6);
    let p = ReducedParams::scaled(0.8, 0.4, 0.0).unwrap();
    let h = build_hamiltonian(&p, &trunc);
    let times: Vec<f64> = (0..=25).map(|k| k as f64).collect();
    let traj = evolve(&h, 0.0, &rho0, 25.0, &IntegratorConfig::default(), &times).unwrap();
    let n0 = excitation_number(&rho0);
    for rho in &traj {
        assert!((excitation_number(rho) - n0).abs() < 1e-8);
    }
}

#[test]
fn dephasing_leaves_photon_populations_unchanged() {
    let (trunc, rho0) = initial(6.0, 0.4);
    let p = ReducedParams::scaled(1e-300, 0.7, 0.2).unwrap();
    let h = build_hamiltonian(&p, &trunc);
    let times = [0.0, 1.0, 4.0, 10.0];
    let traj = evolve(&h, 0.2, &rho0, 10.0, &IntegratorConfig::default(), &times).unwrap();
    let f0 = partial_trace_qubit(&rho0).unwrap();
    for rho in &traj {
        let f = partial_trace_qubit(rho).unwrap();
        for n in 0..f.nrows() {
            assert!((f[[n, n]] - f0[[n, n]]).norm() < 1e-10);
        }
    }
}

#[test]
fn rk4_is_fourth_order() {
    let (trunc, rho0) = initial(3.0, 0.3);
    let p = ReducedParams::scaled(0.6, 0.2, 0.05).unwrap();
    let h = build_hamiltonian(&p, &trunc);
    let t_end = 2.0;
    let reference = evolve(&h, 0.05, &rho0, t_end, &IntegratorConfig::adaptive(1e-13), &[t_end])
        .unwrap()
        .pop()
        .unwrap();
    let err = |dt: f64| {
        let cfg = IntegratorConfig::rk4(dt);
        let rho = evolve(&h, 0.05, &rho0, t_end, &cfg, &[t_end]).unwrap().pop().unwrap();
        rho.max_abs_diff(&reference).unwrap()
    };
    let (e1, e2) = (err(0.1), err(0.05));
    let ratio = e1 / e2;
    assert!((8.0..=32.0).contains(&ratio), "errors {e1:e} {e2:e}, ratio {ratio}");
}
