//! Reference implementations used only by tests. They share no code paths
//! with the library beyond the basic matrix types.
#![allow(dead_code)]

use geomq::{CMatrix, CVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_fn(n, |_, _| cz(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

pub fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| cz(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = gaussian_matrix(n, rng);
    (&g + g.adjoint()) * cz(0.5, 0.0)
}

pub fn random_density(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, rank, |_, _| cz(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn pauli(j: usize) -> CMatrix {
    let (o, z, i) = (cz(1.0, 0.0), cz(0.0, 0.0), cz(0.0, 1.0));
    match j {
        0 => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("pauli index"),
    }
}

pub fn bloch_state(x: [f64; 3]) -> CMatrix {
    (pauli(0) + pauli(1) * cz(x[0], 0.0) + pauli(2) * cz(x[1], 0.0) + pauli(3) * cz(x[2], 0.0)) * cz(0.5, 0.0)
}

pub fn bloch_of(rho: &CMatrix) -> [f64; 3] {
    [1, 2, 3].map(|j| (rho * pauli(j)).trace().re)
}

/// Column-stacking `vec`.
pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().cloned())
}

pub fn unvec(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_iterator(n, n, v.iter().cloned())
}

/// Matrix of the GKLS generator acting on column-stacked density matrices.
pub fn superoperator(h: &CMatrix, jumps: &[CMatrix]) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * cz(0.0, -1.0);
    for v in jumps {
        let vdv = v.adjoint() * v;
        l += v.conjugate().kronecker(v);
        l -= id.kronecker(&vdv) * cz(0.5, 0.0);
        l -= vdv.transpose().kronecker(&id) * cz(0.5, 0.0);
    }
    l
}

/// `exp(tL) vec(ρ₀)` by dense matrix exponential.
pub fn evolve_exact(h: &CMatrix, jumps: &[CMatrix], rho0: &CMatrix, t: f64) -> CMatrix {
    let l = superoperator(h, jumps) * cz(t, 0.0);
    unvec(&(l.exp() * vec_of(rho0)), h.nrows())
}

/// Gaussian curvature of the complex line `z ↦ [ψ + z v]` at `z = 0`,
/// computed from the induced conformal factor by a five-point Laplacian.
/// Projective lines are totally geodesic, so this is the holomorphic
/// sectional curvature of the plane spanned by `v` and `iv`.
pub fn holomorphic_curvature(psi: &CVector, v: &CVector, h: f64) -> f64 {
    let lambda = |s: f64, t: f64| -> f64 {
        let p = psi + v * cz(s, t);
        let nn = p.norm_squared();
        (v.norm_squared() / nn - v.dotc(&p).norm_sqr() / (nn * nn)).max(f64::MIN_POSITIVE)
    };
    let ln = |s: f64, t: f64| lambda(s, t).ln();
    let lap = (ln(h, 0.0) + ln(-h, 0.0) + ln(0.0, h) + ln(0.0, -h) - 4.0 * ln(0.0, 0.0)) / (h * h);
    -lap / (2.0 * lambda(0.0, 0.0))
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
