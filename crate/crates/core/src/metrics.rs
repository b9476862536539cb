//! Reduced states and scalar observables of the joint state.

use ndarray::Array2;

use crate::density::{hermitian_eigenvalues, hermitian_eigh_desc, hermiticity_defect, DensityMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Reduced qubit state over {|e⟩, |g⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState(pub [[C64; 2]; 2]);

impl QubitState {
    pub fn diag(pe: f64, pg: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self([[C64::new(pe, 0.0), z], [z, C64::new(pg, 0.0)]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[0][0] + m[0][1] * m[1][0] + m[1][0] * m[0][1] + m[1][1] * m[1][1]).re
    }
}

/// (ρ_J)_{qq'} = Σ_n ρ_{(n,q),(n,q')}.
pub fn partial_trace_field(rho: &DensityMatrix) -> Result<QubitState> {
    let m = rho.matrix();
    let d = rho.dim();
    if !d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: d,
        });
    }
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for n in 0..d / 2 {
        for (q, row) in out.iter_mut().enumerate() {
            for (p, v) in row.iter_mut().enumerate() {
                *v += m[[2 * n + q, 2 * n + p]];
            }
        }
    }
    Ok(QubitState(out))
}

/// (ρ_f)_{nm} = Σ_q ρ_{(n,q),(m,q)}.
pub fn partial_trace_qubit(rho: &DensityMatrix) -> Result<Array2<C64>> {
    let m = rho.matrix();
    let d = rho.dim();
    if !d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: d,
        });
    }
    let nf = d / 2;
    Ok(Array2::from_shape_fn((nf, nf), |(n, k)| {
        m[[2 * n, 2 * k]] + m[[2 * n + 1, 2 * k + 1]]
    }))
}

/// Tr[ρ(1 − ρ)] = 1 − Tr ρ², at most ½ for a qubit.
pub fn linear_entropy(rho_j: &QubitState) -> f64 {
    1.0 - rho_j.purity()
}

/// Linear entropy rescaled by 2 so that a pure state gives 0 and the
/// maximally mixed qubit gives 1.
pub fn idempotency_defect(rho_j: &QubitState) -> f64 {
    2.0 * linear_entropy(rho_j)
}

/// W = ρ_ee − ρ_gg.
pub fn atomic_inversion(rho_j: &QubitState) -> f64 {
    (rho_j.0[0][0] - rho_j.0[1][1]).re
}

const PAULI_Y_TENSOR_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y). σ_y⊗σ_y is the anti-diagonal matrix with
/// entries (−1, 1, 1, −1), so ρ̃_{ij} = s_i s_j ρ*_{3−i,3−j} with
/// s = (1, −1, −1, 1) up to an overall sign that cancels.
pub fn spin_flip(rho: &Array2<C64>) -> Array2<C64> {
    Array2::from_shape_fn((4, 4), |(i, j)| {
        rho[[3 - i, 3 - j]].conj() * (PAULI_Y_TENSOR_SIGNS[i] * PAULI_Y_TENSOR_SIGNS[j])
    })
}

fn check_two_qubit(rho: &Array2<C64>) -> Result<()> {
    if rho.dim() != (4, 4) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.nrows(),
        });
    }
    let herm = hermiticity_defect(rho);
    if herm > 1e-8 {
        return Err(Error::InvalidState(format!(
            "two-qubit state not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = rho.diag().sum();
    if (tr - 1.0).norm() > 1e-8 {
        return Err(Error::InvalidState(format!("two-qubit trace {tr} != 1")));
    }
    Ok(())
}

/// Wootters concurrence max{0, s₁ − s₂ − s₃ − s₄}. The sᵢ are the square
/// roots of the eigenvalues of ρρ̃, obtained here as the singular values of
/// τ = Wᵀ(σ_y⊗σ_y)W with ρ = WW†. Taking singular values directly keeps
/// rank-deficient states accurate; square roots of a noisy ρρ̃ spectrum
/// would turn 1e−17 round-off into 1e−8 errors.
pub fn concurrence_two_qubit(rho: &Array2<C64>) -> Result<f64> {
    check_two_qubit(rho)?;
    let (vals, vecs) = hermitian_eigh_desc(rho);
    let w = nalgebra::Matrix4::from_fn(|i, a| vecs[[i, a]] * vals[a].max(0.0).sqrt());
    let tau = nalgebra::Matrix4::from_fn(|a, b| {
        (0..4)
            .map(|i| w[(i, a)] * w[(3 - i, b)] * PAULI_Y_TENSOR_SIGNS[i])
            .sum::<C64>()
    });
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Concurrence of the qubit⊗field state after projecting the field onto the
/// two dominant eigenvectors of its reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveConcurrence {
    pub value: f64,
    /// False when the 2nd and 3rd field eigenvalues are degenerate
    /// (gap < 1e−12) so the projection is not unique.
    pub reliable: bool,
}

pub fn concurrence_effective(rho: &DensityMatrix) -> Result<EffectiveConcurrence> {
    let field = partial_trace_qubit(rho)?;
    let nf = field.nrows();
    if nf < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: nf,
        });
    }
    let (vals, vecs) = hermitian_eigh_desc(&field);
    let reliable = nf == 2 || (vals[1] - vals[2]).abs() >= 1e-12;

    // block_{(q,a),(p,b)} = ⟨q, v_a| ρ |p, v_b⟩
    let m = rho.matrix();
    let mut block = Array2::<C64>::zeros((4, 4));
    for q in 0..2 {
        for a in 0..2 {
            for p in 0..2 {
                for b in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for n in 0..nf {
                        let left = vecs[[n, a]].conj();
                        if left == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for k in 0..nf {
                            acc += left * m[[2 * n + q, 2 * k + p]] * vecs[[k, b]];
                        }
                    }
                    block[[2 * q + a, 2 * p + b]] = acc;
                }
            }
        }
    }
    let tr = block.diag().sum().re;
    if tr <= 0.0 {
        return Ok(EffectiveConcurrence {
            value: 0.0,
            reliable: false,
        });
    }
    block.mapv_inplace(|z| z / tr);
    // restore exact Hermiticity lost to round-off in the projection
    let sym = Array2::from_shape_fn((4, 4), |(i, j)| (block[[i, j]] + block[[j, i]].conj()) * 0.5);
    Ok(EffectiveConcurrence {
        value: concurrence_two_qubit(&sym)?,
        reliable,
    })
}

/// Partial transpose over the qubit: ρ^{T_q}_{(n,q),(m,p)} = ρ_{(n,p),(m,q)}.
pub fn partial_transpose_qubit(rho: &DensityMatrix) -> Array2<C64> {
    let m = rho.matrix();
    let d = rho.dim();
    Array2::from_shape_fn((d, d), |(i, j)| {
        let (n, q) = (i / 2, i % 2);
        let (k, p) = (j / 2, j % 2);
        m[[2 * n + p, 2 * k + q]]
    })
}

/// N = |Σ negative eigenvalues of ρ^{T_q}|.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(&partial_transpose_qubit(rho))
        .into_iter()
        .filter(|&v| v < 0.0)
        .map(f64::abs)
        .sum()
}

/// ⟨N⟩ = Σ_n n (ρ_f)_{nn}.
pub fn mean_photons(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (0..rho.dim()).map(|i| (i / 2) as f64 * m[[i, i]].re).sum()
}

/// Every observable of one joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub t: f64,
    pub inversion: f64,
    pub linear_entropy_raw: f64,
    pub idempotency_defect: f64,
    /// Two-dominant-mode concurrence; approximate.
    pub concurrence_2q: Option<f64>,
    pub negativity: f64,
    pub purity: f64,
    pub mean_photons: f64,
    pub trace_error: f64,
}

pub fn metric_row(rho: &DensityMatrix, t: f64) -> Result<MetricRow> {
    let qubit = partial_trace_field(rho)?;
    let raw = linear_entropy(&qubit);
    let concurrence_2q = if rho.n_max() >= 1 {
        Some(concurrence_effective(rho)?.value)
    } else {
        None
    };
    Ok(MetricRow {
        t,
        inversion: atomic_inversion(&qubit),
        linear_entropy_raw: raw,
        idempotency_defect: 2.0 * raw,
        concurrence_2q,
        negativity: negativity(rho),
        purity: qubit.purity(),
        mean_photons: mean_photons(rho),
        trace_error: (rho.trace() - 1.0).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Basis, Qubit};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell_like(n_max: usize) -> DensityMatrix {
        let b = Basis::new(n_max);
        let mut psi = vec![c(0.0); b.dim()];
        psi[b.index(0, Qubit::Excited)] = c(FRAC_1_SQRT_2);
        psi[b.index(1, Qubit::Ground)] = c(FRAC_1_SQRT_2);
        DensityMatrix::pure(&psi).unwrap()
    }

    fn product_excited(n_max: usize) -> DensityMatrix {
        let b = Basis::new(n_max);
        let mut psi = vec![c(0.0); b.dim()];
        psi[b.index(0, Qubit::Excited)] = c(0.6);
        psi[b.index(2, Qubit::Excited)] = C64::new(0.0, 0.8);
        DensityMatrix::pure(&psi).unwrap()
    }

    fn two_qubit_pure(psi: [C64; 4]) -> Array2<C64> {
        Array2::from_shape_fn((4, 4), |(i, j)| psi[i] * psi[j].conj())
    }

    #[test]
    fn partial_traces_of_bell_like_state() {
        let rho = bell_like(3);
        let q = partial_trace_field(&rho).unwrap();
        let expected = QubitState::diag(0.5, 0.5);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((q.0[i][j] - expected.0[i][j]).norm() < 1e-15);
        }
        let f = partial_trace_qubit(&rho).unwrap();
        assert!((f[[0, 0]] - c(0.5)).norm() < 1e-15);
        assert!((f[[1, 1]] - c(0.5)).norm() < 1e-15);
        assert_eq!(f[[0, 1]], c(0.0));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = product_excited(3);
        let q = partial_trace_field(&rho).unwrap();
        assert!((q.0[0][0] - 1.0).norm() < 1e-15);
        assert_eq!(q.0[1][1], c(0.0));
        let f = partial_trace_qubit(&rho).unwrap();
        assert!((f[[0, 2]] - C64::new(0.0, -0.48)).norm() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        assert_eq!(idempotency_defect(&QubitState::diag(1.0, 0.0)), 0.0);
        assert_eq!(idempotency_defect(&QubitState::diag(0.5, 0.5)), 1.0);
        assert!((idempotency_defect(&QubitState::diag(0.75, 0.25)) - 0.75).abs() < 1e-15);
        assert_eq!(linear_entropy(&QubitState::diag(0.5, 0.5)), 0.5);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(atomic_inversion(&QubitState::diag(1.0, 0.0)), 1.0);
        assert_eq!(atomic_inversion(&QubitState::diag(0.0, 1.0)), -1.0);
        assert_eq!(atomic_inversion(&QubitState::diag(0.5, 0.5)), 0.0);
    }

    #[test]
    fn concurrence_extremes() {
        let s = FRAC_1_SQRT_2;
        let bell = two_qubit_pure([c(s), c(0.0), c(0.0), c(s)]);
        assert!((concurrence_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-12);
        let prod = two_qubit_pure([c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(concurrence_two_qubit(&prod).unwrap().abs() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_invalid_input() {
        let bad = Array2::from_elem((4, 4), c(0.1));
        assert!(concurrence_two_qubit(&bad).is_err());
        let not_square = Array2::from_elem((3, 3), c(1.0 / 3.0));
        assert!(concurrence_two_qubit(&not_square).is_err());
    }

    #[test]
    fn negativity_examples() {
        assert!((negativity(&bell_like(3)) - 0.5).abs() < 1e-12);
        assert!(negativity(&product_excited(3)).abs() < 1e-12);
    }

    #[test]
    fn effective_concurrence_examples() {
        let c_bell = concurrence_effective(&bell_like(4)).unwrap();
        assert!((c_bell.value - 1.0).abs() < 1e-10);
        let c_prod = concurrence_effective(&product_excited(4)).unwrap();
        assert!(c_prod.value.abs() < 1e-10);
    }

    #[test]
    fn metric_rows() {
        let row = metric_row(&product_excited(3), 0.0).unwrap();
        assert!((row.inversion - 1.0).abs() < 1e-15);
        assert!(row.idempotency_defect.abs() < 1e-15);
        assert!(row.negativity.abs() < 1e-12);
        assert!((row.purity - 1.0).abs() < 1e-15);
        assert!((row.mean_photons - 2.0 * 0.64).abs() < 1e-15);
        let row = metric_row(&bell_like(3), 1.0).unwrap();
        assert!((row.idempotency_defect - 1.0).abs() < 1e-15);
        assert!((row.negativity - 0.5).abs() < 1e-12);
        assert!((row.concurrence_2q.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(row.linear_entropy_raw * 2.0, row.idempotency_defect);
    }
}
