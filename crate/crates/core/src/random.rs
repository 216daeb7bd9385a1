//! Seeded random operators and states for randomized checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, CMatrix, CVector, DensityOperator, GeneralOperator, HermitianOperator};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// GUE-distributed Hermitian matrix `(M + M†)/2`.
pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(ginibre(n, n, rng))
}

pub fn general<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GeneralOperator {
    GeneralOperator::new(ginibre(n, n, rng)).expect("square by construction")
}

/// Haar-random unitary from the phase-corrected QR factorization of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GeneralOperator {
    let qr = ginibre(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_fn(n, n, |i, j| if i == j { r[(i, i)] / r[(i, i)].norm() } else { c(0.0) });
    GeneralOperator::new(q * phases).expect("square by construction")
}

/// Random element of SL(n, C): a Ginibre matrix rescaled to unit determinant.
pub fn special_linear<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GeneralOperator {
    let m = ginibre(n, n, rng);
    let det = m.clone().determinant();
    let scale = det.powf(-1.0 / n as f64);
    GeneralOperator::new(m * scale).expect("square by construction")
}

/// Density operator of the given rank, `G G† / Tr(G G†)` with `G` an `n×rank` Ginibre matrix.
pub fn density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityOperator {
    assert!(rank >= 1 && rank <= n, "rank {rank} outside 1..={n}");
    let g = ginibre(n, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_matrix_unchecked(m * c(1.0 / tr))
}

pub fn pure_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(n, rng);
    let norm = v.norm();
    v / c(norm)
}
