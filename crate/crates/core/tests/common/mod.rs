//! Reference implementations used as oracles. They share no code with the
//! library routines they check.
#![allow(dead_code)]

use cpbox_core::C64;
use nalgebra::{DMatrix, Matrix2, Matrix4};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn to_na4(m: &Array2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| m[[i, j]])
}

pub fn werner(p: f64) -> Array2<C64> {
    // p |Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [c(0.0), c(s), c(-s), c(0.0)];
    Array2::from_shape_fn((4, 4), |(i, j)| {
        let id = if i == j { 0.25 * (1.0 - p) } else { 0.0 };
        psi[i] * psi[j].conj() * p + id
    })
}

pub fn werner_concurrence(p: f64) -> f64 {
    ((3.0 * p - 1.0) / 2.0).max(0.0)
}

fn hermitian_sqrt(m: &Matrix4<C64>) -> Matrix4<C64> {
    let eig = m.symmetric_eigen();
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|v| c(v.max(0.0).sqrt())));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Wootters concurrence through R = sqrt(√ρ ρ̃ √ρ), with σ_y⊗σ_y built as
/// an explicit Kronecker product.
pub fn concurrence_sqrt_route(rho: &Array2<C64>) -> f64 {
    let i = C64::new(0.0, 1.0);
    let sy = Matrix2::new(c(0.0), -i, i, c(0.0));
    let yy = sy.kronecker(&sy);
    let r = to_na4(rho);
    let tilde = yy * r.conjugate() * yy;
    let s = hermitian_sqrt(&r);
    let inner = s * tilde * s;
    let inner = (inner + inner.adjoint()) * c(0.5);
    let mut vals: Vec<f64> = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    (vals[0] - vals[1] - vals[2] - vals[3]).max(0.0)
}

/// Negativity of a pure qubit⊗field state from its Schmidt coefficients,
/// Σ_{i<j} c_i c_j, via the singular values of the 2×D coefficient matrix.
pub fn schmidt_negativity(psi: &[C64]) -> f64 {
    let d = psi.len() / 2;
    let coeffs = DMatrix::from_fn(2, d, |q, n| psi[2 * n + q]);
    let s = coeffs.singular_values();
    let mut total = 0.0;
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            total += s[a] * s[b];
        }
    }
    total
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let mut psi: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    psi
}

pub fn random_mixed(rng: &mut ChaCha8Rng, dim: usize) -> Array2<C64> {
    let a = Array2::from_shape_fn((dim, dim), |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut rho = a.dot(&a.t().mapv(|z| z.conj()));
    let tr = rho.diag().sum();
    rho.mapv_inplace(|z| z / tr);
    rho
}

/// Random 2×2 unitary from Euler angles and a global phase.
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> [[C64; 2]; 2] {
    let (a, b, cc, ph): (f64, f64, f64, f64) = (
        rng.random_range(0.0..6.3),
        rng.random_range(0.0..6.3),
        rng.random_range(0.0..1.6),
        rng.random_range(0.0..6.3),
    );
    let g = C64::from_polar(1.0, ph);
    [
        [g * C64::from_polar(cc.cos(), a), g * C64::from_polar(cc.sin(), b)],
        [
            -g * C64::from_polar(cc.sin(), -b),
            g * C64::from_polar(cc.cos(), -a),
        ],
    ]
}

/// (U ⊗ V) ρ (U ⊗ V)† for a two-qubit state with index 2a + b.
pub fn local_rotate(rho: &Array2<C64>, u: &[[C64; 2]; 2], v: &[[C64; 2]; 2]) -> Array2<C64> {
    let k = Array2::from_shape_fn((4, 4), |(i, j)| u[i / 2][j / 2] * v[i % 2][j % 2]);
    k.dot(rho).dot(&k.t().mapv(|z| z.conj()))
}
