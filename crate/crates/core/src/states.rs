//! The convex body of density operators inside the trace-one affine space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    c, eig_hermitian, CMatrix, DensityOperator, GeneralOperator, HermitianOperator, Operator, DEFAULT_TOL,
};
use crate::projective::{project_ray, ProjectivePoint};

/// A quantum state is a density operator.
pub type QuantumState = DensityOperator;

/// Default eigenvalue cutoff for rank counting.
pub const RANK_TOL: f64 = 1e-8;
/// Tolerance on `|Tr ρ² − 1|` for extremality.
pub const EXTREMAL_TOL: f64 = 1e-8;
/// Determinant modulus below which `G` counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A Hermitian matrix of unit trace, not necessarily positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermitianOperator", into = "HermitianOperator")]
pub struct TraceOnePoint(HermitianOperator);

impl TraceOnePoint {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let trace = h.real_trace();
        if (trace - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        Ok(Self(h))
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.0
    }

    /// Succeeds iff the point lies in the state space.
    pub fn to_state(&self) -> Result<QuantumState> {
        DensityOperator::new(self.0.matrix().clone())
    }
}

impl TryFrom<HermitianOperator> for TraceOnePoint {
    type Error = Error;
    fn try_from(h: HermitianOperator) -> Result<Self> {
        Self::new(h)
    }
}

impl From<TraceOnePoint> for HermitianOperator {
    fn from(p: TraceOnePoint) -> Self {
        p.0
    }
}

impl From<QuantumState> for TraceOnePoint {
    fn from(s: QuantumState) -> Self {
        Self(s.into())
    }
}

impl Operator for TraceOnePoint {
    fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }
}

/// `|ψ⟩⟨ψ|` for the unit representative.
pub fn pure_projector(pt: &ProjectivePoint) -> QuantumState {
    DensityOperator::from_vector(pt.representative()).expect("representatives are unit vectors")
}

/// Rank with the eigenvalues on either side of the cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Smallest eigenvalue above the cutoff, if any.
    pub smallest_counted: Option<f64>,
    /// Largest eigenvalue at or below the cutoff, if any.
    pub largest_discarded: Option<f64>,
}

impl RankReport {
    /// Separation between the counted and discarded parts of the spectrum.
    pub fn gap(&self) -> Option<f64> {
        Some(self.smallest_counted? - self.largest_discarded?)
    }
}

pub fn rank_report(s: &QuantumState, tol: f64) -> Result<RankReport> {
    let spec = eig_hermitian(&s.as_hermitian())?;
    let rank = spec.values.iter().filter(|&&l| l > tol).count();
    Ok(RankReport {
        rank,
        smallest_counted: rank.checked_sub(1).map(|k| spec.values[k]),
        largest_discarded: spec.values.get(rank).copied(),
    })
}

/// Number of eigenvalues above `tol`.
pub fn state_rank(s: &QuantumState, tol: f64) -> Result<usize> {
    rank_report(s, tol).map(|r| r.rank)
}

/// `G·ρ = GρG† / Tr(GρG†)`.
pub fn sl_action(g: &GeneralOperator, s: &QuantumState) -> Result<QuantumState> {
    if g.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: g.dim() });
    }
    let determinant = g.determinant().norm();
    if determinant <= SINGULAR_TOL {
        return Err(Error::Singular { determinant });
    }
    let m = g.matrix() * s.matrix() * g.matrix().adjoint();
    let tr = m.trace().re;
    Ok(DensityOperator::from_matrix_unchecked(m * c(1.0 / tr)))
}

/// Extremal points of the state space are exactly the pure states.
pub fn is_extremal(s: &QuantumState) -> bool {
    (s.purity() - 1.0).abs() <= EXTREMAL_TOL
}

/// `Σ w_k ρ_k` for non-negative weights summing to 1.
pub fn convex_combine(states: &[QuantumState], weights: &[f64]) -> Result<QuantumState> {
    if states.is_empty() {
        return Err(Error::InvalidWeights("no states given".into()));
    }
    if states.len() != weights.len() {
        return Err(Error::InvalidWeights(format!("{} states but {} weights", states.len(), weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
    }
    let n = states[0].dim();
    let mut m = CMatrix::zeros(n, n);
    for (s, &w) in states.iter().zip(weights) {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s.dim() });
        }
        m += s.matrix() * c(w);
    }
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// Ray of an eigenvector for the largest eigenvalue.
pub fn top_eigenray(s: &QuantumState) -> Result<ProjectivePoint> {
    let spec = eig_hermitian(&s.as_hermitian())?;
    project_ray(&spec.vector(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli, CVector};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn plus() -> ProjectivePoint {
        project_ray(&CVector::from_vec(vec![c(1.0), c(1.0)])).unwrap()
    }

    #[test]
    fn pure_projector_examples() {
        let p0 = pure_projector(&ProjectivePoint::basis(2, 0));
        assert!(close(p0.matrix(), HermitianOperator::from_real_diagonal(&[1.0, 0.0]).matrix(), 1e-15));
        let pp = pure_projector(&plus());
        assert!(close(pp.matrix(), HermitianOperator::from_pauli(0.5, [0.5, 0.0, 0.0]).matrix(), 1e-15));
        assert!(close(&(pp.matrix() * pp.matrix()), pp.matrix(), 1e-15));
        assert_eq!(top_eigenray(&pp).unwrap(), plus());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(state_rank(&pure_projector(&plus()), RANK_TOL).unwrap(), 1);
        assert_eq!(state_rank(&DensityOperator::maximally_mixed(3), RANK_TOL).unwrap(), 3);
        let s =
            DensityOperator::new(HermitianOperator::from_real_diagonal(&[0.7, 0.3, 0.0, 0.0]).into_matrix()).unwrap();
        let r = rank_report(&s, RANK_TOL).unwrap();
        assert_eq!(r.rank, 2);
        assert!((r.smallest_counted.unwrap() - 0.3).abs() < 1e-14);
        assert!(r.gap().unwrap() > 0.29);
    }

    #[test]
    fn sl_action_examples() {
        let e = std::f64::consts::E;
        let g = GeneralOperator::new(DMatrix::from_diagonal(&CVector::from_vec(vec![c(e), c(1.0 / e)]))).unwrap();
        let out = sl_action(&g, &DensityOperator::maximally_mixed(2)).unwrap();
        assert!((out.expectation(&pauli(3)).unwrap() - 2f64.tanh()).abs() < 1e-12);

        let rho = DensityOperator::new(HermitianOperator::from_pauli(0.5, [0.1, 0.2, 0.3]).into_matrix()).unwrap();
        let same = sl_action(&GeneralOperator::identity(2), &rho).unwrap();
        assert!(close(same.matrix(), rho.matrix(), 1e-15));

        let u = pauli(3).exp_scaled(Complex64::new(0.0, -0.4)).unwrap();
        let rotated = sl_action(&u, &rho).unwrap();
        let direct = u.matrix() * rho.matrix() * u.matrix().adjoint();
        assert!(close(rotated.matrix(), &direct, 1e-14));

        assert!(matches!(sl_action(&GeneralOperator::zeros(2), &rho), Err(Error::Singular { .. })));
    }

    #[test]
    fn extremality() {
        assert!(is_extremal(&pure_projector(&plus())));
        assert!(!is_extremal(&DensityOperator::maximally_mixed(2)));
        let s = DensityOperator::new(HermitianOperator::from_real_diagonal(&[0.99, 0.01]).into_matrix()).unwrap();
        assert!((s.purity() - 0.9802).abs() < 1e-14);
        assert!(!is_extremal(&s));
    }

    #[test]
    fn convex_combination_examples() {
        let zero = pure_projector(&ProjectivePoint::basis(2, 0));
        let one = pure_projector(&ProjectivePoint::basis(2, 1));
        let mid = convex_combine(&[zero.clone(), one], &[0.5, 0.5]).unwrap();
        assert!(close(mid.matrix(), DensityOperator::maximally_mixed(2).matrix(), 1e-15));
        let mix = convex_combine(&[zero.clone(), pure_projector(&plus())], &[0.3, 0.7]).unwrap();
        assert!((mix.expectation(&pauli(1)).unwrap() - 0.7).abs() < 1e-14);
        assert!((mix.expectation(&pauli(3)).unwrap() - 0.3).abs() < 1e-14);
        assert!(matches!(convex_combine(std::slice::from_ref(&zero), &[0.5]), Err(Error::InvalidWeights(_))));
        assert!(matches!(convex_combine(&[zero.clone(), zero], &[1.5, -0.5]), Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn trace_one_point_admits_non_positive_matrices() {
        let h = HermitianOperator::from_real_diagonal(&[1.5, -0.5]);
        let p = TraceOnePoint::new(h).unwrap();
        assert!(matches!(p.to_state(), Err(Error::NotPositive { .. })));
        assert!(TraceOnePoint::new(HermitianOperator::identity(2)).is_err());
    }
}
