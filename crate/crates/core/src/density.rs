//! Joint qubit⊗field density matrices over a truncated Fock space.
//!
//! Basis ordering: `index(n, q) = 2n + q` with `q = 0` for |e⟩ and `q = 1`
//! for |g⟩, so the matrix dimension is `2 (n_max + 1)`.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// Qubit basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Excited = 0,
    Ground = 1,
}

/// Index arithmetic for the ordered basis {|n,e⟩, |n,g⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub n_max: usize,
}

impl Basis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    #[inline]
    pub fn index(&self, n: usize, q: Qubit) -> usize {
        2 * n + q as usize
    }

    /// Photon number carried by basis index `i`.
    #[inline]
    pub fn photons(i: usize) -> usize {
        i / 2
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2 * (dim / 2).max(1),
                found: dim,
            });
        }
        Ok(Self::new(dim / 2 - 1))
    }
}

/// Dense joint density matrix.
///
/// Construction only checks shape; the physical invariants (Hermiticity,
/// unit trace, positivity) are measured by [`DensityMatrix::check`] so that
/// non-physical states such as the literal closed form can still be carried
/// around and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: Array2<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(data: Array2<C64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: c,
            });
        }
        Basis::from_dim(r)?;
        Ok(Self { data })
    }

    pub fn zeros(basis: Basis) -> Self {
        let d = basis.dim();
        Self {
            data: Array2::zeros((d, d)),
        }
    }

    /// |ψ⟩⟨ψ| for a state vector in the joint basis.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let d = psi.len();
        let data = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj());
        Self::from_matrix(data)
    }

    /// ρ_J ⊗ ρ_f with `qubit` a 2×2 matrix over {|e⟩, |g⟩}.
    pub fn product(qubit: &[[C64; 2]; 2], field: &Array2<C64>) -> Result<Self> {
        let (nf, nf2) = field.dim();
        if nf != nf2 {
            return Err(Error::DimensionMismatch {
                expected: nf,
                found: nf2,
            });
        }
        let d = 2 * nf;
        let data = Array2::from_shape_fn((d, d), |(i, j)| {
            qubit[i % 2][j % 2] * field[[i / 2, j / 2]]
        });
        Self::from_matrix(data)
    }

    pub fn basis(&self) -> Basis {
        Basis::new(self.dim() / 2 - 1)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.basis().n_max
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn matrix_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, n: usize, q: Qubit, m: usize, p: Qubit) -> C64 {
        let b = self.basis();
        self.data[[b.index(n, q), b.index(m, p)]]
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// max |ρ − ρ†| elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.data)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.data)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.mapv_inplace(|z| z * factor);
    }

    /// max |ρ_ij − σ_ij|.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Checks the density-matrix invariants at the given tolerances.
    pub fn check(&self, tolerances: &StateTolerances) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > tolerances.hermiticity {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {herm:.3e} exceeds {:.1e}",
                tolerances.hermiticity
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > tolerances.trace {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from 1 by more than {:.1e}",
                tolerances.trace
            )));
        }
        let min = self.min_eigenvalue();
        if min < -tolerances.positivity {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} below -{:.1e}",
                tolerances.positivity
            )));
        }
        Ok(())
    }
}

/// Tolerances for [`DensityMatrix::check`].
#[derive(Debug, Clone, Copy)]
pub struct StateTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-8,
            positivity: 1e-8,
        }
    }
}

pub(crate) fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

fn symmetrized(m: &Array2<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| (m[[i, j]] + m[[j, i]].conj()) * 0.5)
}

/// Eigenvalues of (M + M†)/2 in ascending order.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut vals: Vec<f64> = symmetrized(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigenpairs of (M + M†)/2, sorted by descending eigenvalue. Eigenvectors
/// are returned as columns of the matrix.
pub fn hermitian_eigh_desc(m: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let n = m.nrows();
    let eig = symmetrized(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = Array2::from_shape_fn((n, n), |(i, k)| eig.eigenvectors[(i, order[k])]);
    (vals, vecs)
}
