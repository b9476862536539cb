mod common;

use common::*;
use cpbox_core::metrics::{
    concurrence_effective, concurrence_two_qubit, idempotency_defect, negativity,
    partial_trace_field, partial_trace_qubit,
};
use cpbox_core::{DensityMatrix, C64};
use ndarray::Array2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn werner_family() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = Array2::from_shape_fn((4, 4), |(i, j)| {
        let psi = [c(s), c(0.0), c(0.0), c(s)];
        psi[i] * psi[j].conj()
    });
    assert!((concurrence_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-12);
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho = werner(p);
        let got = concurrence_two_qubit(&rho).unwrap();
        let expected = werner_concurrence(p);
        assert!((got - expected).abs() < 1e-10, "p={p}: {got} vs {expected}");
        assert!((concurrence_sqrt_route(&rho) - expected).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_agrees_with_sqrt_route(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, 4);
        let a = concurrence_two_qubit(&rho).unwrap();
        let b = concurrence_sqrt_route(&rho);
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>(), pure in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = if pure {
            let psi = random_pure(&mut rng, 4);
            Array2::from_shape_fn((4, 4), |(i, j)| psi[i] * psi[j].conj())
        } else {
            random_mixed(&mut rng, 4)
        };
        let (u, v) = (random_unitary2(&mut rng), random_unitary2(&mut rng));
        let rotated = local_rotate(&rho, &u, &v);
        let before = concurrence_two_qubit(&rho).unwrap();
        let after = concurrence_two_qubit(&rotated).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{} vs {}", before, after);
    }

    #[test]
    fn product_states_have_zero_negativity(seed in any::<u64>(), nf in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_mixed(&mut rng, 2);
        let f = random_mixed(&mut rng, nf);
        let qubit = [[q[[0, 0]], q[[0, 1]]], [q[[1, 0]], q[[1, 1]]]];
        let rho = DensityMatrix::product(&qubit, &f).unwrap();
        prop_assert!(negativity(&rho) < 1e-9);
        // reductions of a product recover the factors
        let rq = partial_trace_field(&rho).unwrap();
        let rf = partial_trace_qubit(&rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((rq.0[i][j] - q[[i, j]]).norm() < 1e-12);
            }
        }
        for (a, b) in rf.iter().zip(f.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_state_negativity_matches_schmidt(seed in any::<u64>(), nf in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure(&mut rng, 2 * nf);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let n = negativity(&rho);
        let oracle = schmidt_negativity(&psi);
        prop_assert!((n - oracle).abs() < 1e-9, "{} vs {}", n, oracle);
        // for pure states the defect 2(1 − Tr ρ_J²) equals 4 c₁²c₂² = 4N²
        let defect = idempotency_defect(&partial_trace_field(&rho).unwrap());
        prop_assert!((defect - 4.0 * oracle * oracle).abs() < 1e-9);
    }

    #[test]
    fn field_unitaries_leave_qubit_reduction_unchanged(seed in any::<u64>(), nf in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, 2 * nf);
        // a random field unitary from the eigenvectors of a random Hermitian matrix
        let h = random_mixed(&mut rng, nf);
        let hn = nalgebra::DMatrix::from_fn(nf, nf, |i, j| h[[i, j]]);
        let w = hn.symmetric_eigen().eigenvectors;
        let k = Array2::from_shape_fn((2 * nf, 2 * nf), |(i, j)| {
            if i % 2 == j % 2 { w[(i / 2, j / 2)] } else { C64::new(0.0, 0.0) }
        });
        let rotated = k.dot(&rho).dot(&k.t().mapv(|z| z.conj()));
        let a = partial_trace_field(&DensityMatrix::from_matrix(rho).unwrap()).unwrap();
        let b = partial_trace_field(&DensityMatrix::from_matrix(rotated).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a.0[i][j] - b.0[i][j]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn effective_concurrence_of_two_mode_entangled_state() {
    // (|0,e⟩ + |3,g⟩)/√2: the field reduction has exactly two dominant modes
    let mut psi = vec![c(0.0); 2 * 6];
    psi[0] = c(std::f64::consts::FRAC_1_SQRT_2);
    psi[2 * 3 + 1] = c(std::f64::consts::FRAC_1_SQRT_2);
    let rho = DensityMatrix::pure(&psi).unwrap();
    let eff = concurrence_effective(&rho).unwrap();
    assert!((eff.value - 1.0).abs() < 1e-10);
    assert!((negativity(&rho) - 0.5).abs() < 1e-12);
}
