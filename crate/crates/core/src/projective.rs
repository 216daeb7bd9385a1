//! The carrier space `P = CP(H)`.
//!
//! A ray is stored through a unit, gauge-fixed representative (first
//! significant component real positive). Tangent vectors are horizontal lifts,
//! i.e. orthogonal to the representative, so the second term of the pullback
//! tensor `h̃(v, w) = ⟨v|w⟩ − ⟨v|ψ⟩⟨ψ|w⟩` vanishes for them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    c, gauge_fix, CMatrix, CVector, GeneralOperator, Operator, VectorLiteral, DEFAULT_TOL, GAUGE_TOL,
};
use crate::random::gaussian_vector;

/// A ray `[ψ]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "VectorLiteral", into = "VectorLiteral")]
pub struct ProjectivePoint {
    repr: CVector,
}

impl ProjectivePoint {
    pub fn dim(&self) -> usize {
        self.repr.len()
    }

    /// The unit, gauge-fixed representative.
    pub fn representative(&self) -> &CVector {
        &self.repr
    }

    /// `[|k⟩]` in `C^n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = c(1.0);
        Self { repr: v }
    }

    pub fn same_ray(&self, other: &ProjectivePoint) -> bool {
        self.dim() == other.dim() && (self.repr.dotc(&other.repr).norm() - 1.0).abs() <= DEFAULT_TOL
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_ray(other)
    }
}

impl TryFrom<VectorLiteral> for ProjectivePoint {
    type Error = Error;
    fn try_from(lit: VectorLiteral) -> Result<Self> {
        project_ray(&crate::operator::vector_from_literal(&lit))
    }
}

impl From<ProjectivePoint> for VectorLiteral {
    fn from(p: ProjectivePoint) -> Self {
        crate::operator::vector_to_literal(&p.repr)
    }
}

/// Canonical projection `ψ ↦ [ψ]`.
pub fn project_ray(psi: &CVector) -> Result<ProjectivePoint> {
    let norm = psi.norm();
    if psi.is_empty() || norm <= GAUGE_TOL {
        return Err(Error::ZeroVector);
    }
    let mut repr = psi / c(norm);
    gauge_fix(&mut repr);
    Ok(ProjectivePoint { repr })
}

/// A tangent vector at `base`, stored as its horizontal lift.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: ProjectivePoint,
    horizontal: CVector,
}

impl TangentVector {
    /// Accepts `v` only if it is already horizontal (`|⟨ψ|v⟩| ≤ 1e-10`).
    pub fn new(base: ProjectivePoint, v: CVector) -> Result<Self> {
        if v.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: v.len() });
        }
        let overlap = base.repr.dotc(&v).norm();
        if overlap > DEFAULT_TOL {
            return Err(Error::NotHorizontal { overlap });
        }
        Ok(Self { base, horizontal: v })
    }

    /// Horizontal projection `v − ψ⟨ψ|v⟩` of an arbitrary ambient vector.
    pub fn horizontal_part(base: ProjectivePoint, v: &CVector) -> Result<Self> {
        if v.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: v.len() });
        }
        let overlap = base.repr.dotc(v);
        let horizontal = v - &base.repr * overlap;
        Ok(Self { base, horizontal })
    }

    /// The tangent vector of the curve `s ↦ [psi + s·dpsi]` at `s = 0`, for
    /// any non-zero (not necessarily normalized) `psi`.
    pub fn lift(psi: &CVector, dpsi: &CVector) -> Result<Self> {
        let base = project_ray(psi)?;
        // base.repr = λ psi
        let lambda = psi.dotc(&base.repr) / c(psi.norm_squared());
        Self::horizontal_part(base, &(dpsi * lambda))
    }

    pub fn zero(base: ProjectivePoint) -> Self {
        let n = base.dim();
        Self { base, horizontal: CVector::zeros(n) }
    }

    pub fn base(&self) -> &ProjectivePoint {
        &self.base
    }

    pub fn horizontal(&self) -> &CVector {
        &self.horizontal
    }

    pub fn scale(&self, x: f64) -> Self {
        Self { base: self.base.clone(), horizontal: &self.horizontal * c(x) }
    }

    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        check_same_base(self, other)?;
        Ok(Self { base: self.base.clone(), horizontal: &self.horizontal + &other.horizontal })
    }

    /// Pushforward along the projective action `[ψ] ↦ [Gψ]`.
    pub fn pushforward(&self, g: &GeneralOperator) -> Result<Self> {
        if g.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch { expected: self.base.dim(), found: g.dim() });
        }
        let m = g.matrix();
        Self::lift(&(m * &self.base.repr), &(m * &self.horizontal))
    }
}

fn check_same_base(v: &TangentVector, w: &TangentVector) -> Result<()> {
    if v.base.dim() != w.base.dim() {
        return Err(Error::DimensionMismatch { expected: v.base.dim(), found: w.base.dim() });
    }
    if (&v.base.repr - &w.base.repr).norm() > DEFAULT_TOL {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// `⟨dψ₁|dψ₂⟩/⟨ψ|ψ⟩ − ⟨dψ₁|ψ⟩⟨ψ|dψ₂⟩/⟨ψ|ψ⟩²` for arbitrary ambient
/// representatives. Invariant under `ψ → λψ, dψ → λdψ` for complex `λ ≠ 0`.
pub fn hermitian_tensor_ambient(psi: &CVector, d1: &CVector, d2: &CVector) -> Complex64 {
    let nn = psi.norm_squared();
    d1.dotc(d2) / nn - d1.dotc(psi) * psi.dotc(d2) / (nn * nn)
}

/// `h̃(v, w)`; real part is the Fubini-Study metric `g`, imaginary part the
/// symplectic form `ω`.
pub fn pullback_tensor(v: &TangentVector, w: &TangentVector) -> Result<Complex64> {
    check_same_base(v, w)?;
    Ok(hermitian_tensor_ambient(&v.base.repr, &v.horizontal, &w.horizontal))
}

pub fn metric(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    pullback_tensor(v, w).map(|h| h.re)
}

pub fn symplectic_form(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    pullback_tensor(v, w).map(|h| h.im)
}

/// Complex structure on horizontal lifts: multiplication by `−i`.
///
/// This sign makes `g(v, Jw) = ω(v, w)` hold with `ω = Im h̃`.
pub fn apply_j(v: &TangentVector) -> TangentVector {
    TangentVector { base: v.base.clone(), horizontal: &v.horizontal * Complex64::new(0.0, -1.0) }
}

/// `|g(v, Jw) − ω(v, w)|`.
pub fn compatibility_residual(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    Ok((metric(v, &apply_j(w))? - symplectic_form(v, w)?).abs())
}

/// `|⟨ψ̃₁|ψ̃₂⟩|²`.
pub fn transition_probability(p1: &ProjectivePoint, p2: &ProjectivePoint) -> Result<f64> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch { expected: p1.dim(), found: p2.dim() });
    }
    Ok(p1.repr.dotc(&p2.repr).norm_sqr().clamp(0.0, 1.0))
}

/// Probability-amplitude coordinates `|ψ⟩ = Σ √p_j e^{iφ_j} |e_j⟩`.
#[derive(Clone, Debug)]
pub struct AmplitudeChart {
    /// Orthonormal frame as columns.
    pub basis: CMatrix,
    pub p: Vec<f64>,
    /// Phases in `[0, 2π)`.
    pub phi: Vec<f64>,
}

impl AmplitudeChart {
    /// Coordinates of `pt` in the given orthonormal frame.
    pub fn of_point(pt: &ProjectivePoint, basis: CMatrix) -> Result<Self> {
        if basis.nrows() != pt.dim() || basis.ncols() != pt.dim() {
            return Err(Error::DimensionMismatch { expected: pt.dim(), found: basis.nrows() });
        }
        let coeffs = basis.adjoint() * pt.representative();
        let p = coeffs.iter().map(|z| z.norm_sqr()).collect();
        let phi = coeffs.iter().map(|z| z.arg().rem_euclid(std::f64::consts::TAU)).collect();
        Ok(Self { basis, p, phi })
    }

    pub fn in_standard_basis(pt: &ProjectivePoint) -> Result<Self> {
        Self::of_point(pt, CMatrix::identity(pt.dim(), pt.dim()))
    }

    pub fn vector(&self) -> CVector {
        let coeffs = CVector::from_iterator(
            self.p.len(),
            self.p.iter().zip(&self.phi).map(|(&p, &phi)| Complex64::from_polar(p.sqrt(), phi)),
        );
        &self.basis * coeffs
    }

    /// Tangent vector induced by coordinate increments `(dp, dφ)`:
    /// `dψ = Σ (dp_j / (2√p_j) + i √p_j dφ_j) e^{iφ_j} |e_j⟩`.
    pub fn coordinate_tangent(&self, dp: &[f64], dphi: &[f64]) -> Result<TangentVector> {
        let n = self.p.len();
        if dp.len() != n || dphi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: dp.len().min(dphi.len()) });
        }
        if self.p.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidProbabilities("coordinate tangents need p_j > 0".into()));
        }
        let d = CVector::from_fn(n, |j, _| {
            let s = self.p[j].sqrt();
            Complex64::new(dp[j] / (2.0 * s), s * dphi[j]) * Complex64::from_polar(1.0, self.phi[j])
        });
        TangentVector::lift(&self.vector(), &(&self.basis * d))
    }
}

/// Blocks of `h̃` in amplitude coordinates, as bilinear forms on `(dp, dφ)`.
///
/// `g = dpᵀ F dp' + dφᵀ Φ dφ'` and `ω = dpᵀ C dφ' − dp'ᵀ C dφ`.
#[derive(Clone, Debug)]
pub struct ChartMetric {
    /// Fisher-Rao block `F = ¼(diag(1/p) − 1 1ᵀ)`.
    pub fisher: DMatrix<f64>,
    /// Phase covariance block `Φ = diag(p) − p pᵀ`.
    pub phase: DMatrix<f64>,
    /// Symplectic coupling `C = ½(I − 1 pᵀ)`.
    pub coupling: DMatrix<f64>,
}

impl ChartMetric {
    pub fn metric(&self, dp: &[f64], dphi: &[f64], dp2: &[f64], dphi2: &[f64]) -> f64 {
        bilinear(&self.fisher, dp, dp2) + bilinear(&self.phase, dphi, dphi2)
    }

    pub fn symplectic(&self, dp: &[f64], dphi: &[f64], dp2: &[f64], dphi2: &[f64]) -> f64 {
        bilinear(&self.coupling, dp, dphi2) - bilinear(&self.coupling, dp2, dphi)
    }
}

fn bilinear(m: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = m.nrows();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[i] * m[(i, j)] * y[j]).sum()
}

/// Fisher-Rao and phase blocks of the pullback tensor at an interior point of the simplex.
pub fn amplitude_chart_metric(p: &[f64]) -> Result<ChartMetric> {
    let n = p.len();
    if n == 0 {
        return Err(Error::InvalidProbabilities("empty probability vector".into()));
    }
    if let Some(j) = p.iter().position(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::InvalidProbabilities(format!("p[{j}] = {} is not in the open simplex", p[j])));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("sum is {total}, expected 1")));
    }
    let fisher = DMatrix::from_fn(n, n, |i, j| 0.25 * (if i == j { 1.0 / p[i] } else { 0.0 } - 1.0));
    let phase = DMatrix::from_fn(n, n, |i, j| if i == j { p[i] } else { 0.0 } - p[i] * p[j]);
    let coupling = DMatrix::from_fn(n, n, |i, j| 0.5 * (if i == j { 1.0 } else { 0.0 } - p[j]));
    Ok(ChartMetric { fisher, phase, coupling })
}

/// Sampler for the unitarily invariant probability measure on `CP^{n−1}`.
///
/// Not shareable between threads: use one sampler per thread.
#[derive(Clone, Debug)]
pub struct HaarSampler {
    dim: usize,
    rng: ChaCha8Rng,
}

impl HaarSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1, "Haar sampling needs dim >= 1");
        Self { dim, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample(&mut self) -> ProjectivePoint {
        loop {
            let v = gaussian_vector(self.dim, &mut self.rng);
            if let Ok(p) = project_ray(&v) {
                return p;
            }
        }
    }
}

impl Iterator for HaarSampler {
    type Item = ProjectivePoint;
    fn next(&mut self) -> Option<ProjectivePoint> {
        Some(self.sample())
    }
}

pub fn haar_sample(dim: usize, seed: u64) -> ProjectivePoint {
    HaarSampler::new(dim, seed).sample()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| Complex64::new(re, im)))
    }

    #[test]
    fn project_ray_examples() {
        let p = project_ray(&v(&[(2.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!((p.representative() - v(&[(1.0, 0.0), (0.0, 0.0)])).norm() < 1e-15);

        let p = project_ray(&v(&[(0.0, 0.0), (0.0, 1.0)])).unwrap();
        assert!((p.representative() - v(&[(0.0, 0.0), (1.0, 0.0)])).norm() < 1e-15);

        let r = 1.0 / 2f64.sqrt();
        let p = project_ray(&v(&[(3.0, 0.0), (0.0, 3.0)])).unwrap();
        assert!((p.representative() - v(&[(r, 0.0), (0.0, r)])).norm() < 1e-15);
    }

    #[test]
    fn project_ray_rejects_zero() {
        assert_eq!(project_ray(&CVector::zeros(3)).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn pullback_examples() {
        let base = ProjectivePoint::basis(2, 0);
        let one = TangentVector::new(base.clone(), v(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let i_one = TangentVector::new(base.clone(), v(&[(0.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(pullback_tensor(&one, &one).unwrap(), Complex64::new(1.0, 0.0));
        let h = pullback_tensor(&one, &i_one).unwrap();
        assert_eq!(h, Complex64::new(0.0, 1.0));
        assert_eq!(metric(&one, &i_one).unwrap(), 0.0);
        assert_eq!(symplectic_form(&one, &i_one).unwrap(), 1.0);
        let zero = TangentVector::zero(base);
        assert_eq!(pullback_tensor(&zero, &one).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn pullback_rejects_base_mismatch() {
        let a = TangentVector::new(ProjectivePoint::basis(2, 0), v(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let b = TangentVector::new(ProjectivePoint::basis(2, 1), v(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
        assert_eq!(pullback_tensor(&a, &b).unwrap_err(), Error::BaseMismatch);
    }

    #[test]
    fn tangent_rejects_vertical_component() {
        let err = TangentVector::new(ProjectivePoint::basis(2, 0), v(&[(0.5, 0.0), (1.0, 0.0)])).unwrap_err();
        assert!(matches!(err, Error::NotHorizontal { .. }));
    }

    #[test]
    fn complex_structure() {
        let base = ProjectivePoint::basis(2, 0);
        let one = TangentVector::new(base, v(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let j = apply_j(&one);
        assert_eq!(j.horizontal()[1], Complex64::new(0.0, -1.0));
        let jj = apply_j(&j);
        assert!((jj.horizontal() + one.horizontal()).norm() < 1e-15);
        // g(v, Jw) = ω(v, w) for v = |1⟩, w = i|1⟩: both equal 1
        let i_one = TangentVector::new(one.base().clone(), v(&[(0.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(metric(&one, &apply_j(&i_one)).unwrap(), 1.0);
        assert_eq!(compatibility_residual(&one, &i_one).unwrap(), 0.0);
    }

    #[test]
    fn chart_blocks_at_uniform_point() {
        let m = amplitude_chart_metric(&[0.5, 0.5]).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
        assert!((&m.phase - &expected).abs().max() < 1e-12);
        assert!((&m.fisher - &expected).abs().max() < 1e-12);
        // global phase shift is null for the phase block
        let q = m.metric(&[0.0, 0.0], &[0.7, 0.7], &[0.0, 0.0], &[0.7, 0.7]);
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn chart_rejects_boundary() {
        assert!(matches!(amplitude_chart_metric(&[1.0, 0.0]), Err(Error::InvalidProbabilities(_))));
        assert!(matches!(amplitude_chart_metric(&[0.3, 0.3]), Err(Error::InvalidProbabilities(_))));
    }

    #[test]
    fn transition_probability_examples() {
        let zero = ProjectivePoint::basis(2, 0);
        let one = ProjectivePoint::basis(2, 1);
        let plus = project_ray(&v(&[(1.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!((transition_probability(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(transition_probability(&zero, &one).unwrap(), 0.0);
        assert!((transition_probability(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(transition_probability(&zero, &ProjectivePoint::basis(3, 0)).is_err());
    }

    #[test]
    fn haar_sampler_is_seed_deterministic() {
        let a: Vec<_> = HaarSampler::new(3, 7).take(5).collect();
        let b: Vec<_> = HaarSampler::new(3, 7).take(5).collect();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.representative(), y.representative());
        }
        assert!((haar_sample(4, 1).representative().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ray_equality_ignores_phase() {
        let a = project_ray(&v(&[(0.3, 0.1), (-0.2, 0.9)])).unwrap();
        let phase = Complex64::from_polar(2.5, 1.1);
        let b = project_ray(&(a.representative() * phase)).unwrap();
        assert_eq!(a, b);
        assert!((a.representative() - b.representative()).norm() < 1e-12);
    }
}
