//! Outcome statistics: positive-operator-valued measures with finitely many
//! outcomes, spectral measures of observables and the state-observable
//! pairing over the carrier space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::ExpectationFunction;
use crate::operator::{c, eig_hermitian, CMatrix, HermitianOperator, Operator, DEFAULT_TOL};
use crate::projective::{HaarSampler, ProjectivePoint};
use crate::states::QuantumState;

/// Eigenvalues closer than this share one spectral projector.
pub const EIGENVALUE_MERGE_TOL: f64 = 1e-8;
/// Minimum sample count for [`pairing_integral`].
pub const MIN_PAIRING_SAMPLES: usize = 1000;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_sum_to_identity(ops: &[HermitianOperator]) -> Result<usize> {
    let n = ops.first().ok_or(Error::Empty)?.dim();
    let mut sum = CMatrix::zeros(n, n);
    for e in ops {
        if e.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: e.dim() });
        }
        sum += e.matrix();
    }
    let dev = max_abs(&(sum - CMatrix::identity(n, n)));
    if dev > DEFAULT_TOL {
        return Err(Error::InvalidConfig(format!("effects sum to identity only within {dev:e}")));
    }
    Ok(n)
}

/// Effects `E_k ≥ 0` with `Σ E_k = I`, labelled by real outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteGpovMeasure {
    outcomes: Vec<f64>,
    effects: Vec<HermitianOperator>,
}

impl FiniteGpovMeasure {
    pub fn new(outcomes: Vec<f64>, effects: Vec<HermitianOperator>) -> Result<Self> {
        if outcomes.len() != effects.len() {
            return Err(Error::DimensionMismatch { expected: outcomes.len(), found: effects.len() });
        }
        check_sum_to_identity(&effects)?;
        for e in &effects {
            let min_eigenvalue = eig_hermitian(e)?.values.last().copied().unwrap_or(0.0);
            if min_eigenvalue < -DEFAULT_TOL {
                return Err(Error::NotPositive { min_eigenvalue });
            }
        }
        Ok(Self { outcomes, effects })
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    fn indices(&self, delta: &[usize]) -> Result<Vec<usize>> {
        let mut idx = delta.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&index) = idx.iter().find(|&&k| k >= self.len()) {
            return Err(Error::IndexOutOfRange { index, bound: self.len() });
        }
        Ok(idx)
    }
}

/// Orthogonal projectors summing to the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionOfIdentity {
    projectors: Vec<HermitianOperator>,
}

impl ResolutionOfIdentity {
    pub fn new(projectors: Vec<HermitianOperator>) -> Result<Self> {
        check_sum_to_identity(&projectors)?;
        for (i, ei) in projectors.iter().enumerate() {
            for (j, ej) in projectors.iter().enumerate() {
                let prod = ei.matrix() * ej.matrix();
                let target = if i == j { ej.matrix().clone() } else { CMatrix::zeros(prod.nrows(), prod.ncols()) };
                let dev = max_abs(&(prod - target));
                if dev > DEFAULT_TOL {
                    return Err(Error::InvalidConfig(format!(
                        "E_{i} E_{j} deviates from orthogonal projection by {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { projectors })
    }

    /// `{|k⟩⟨k|}` in `C^n`.
    pub fn computational(n: usize) -> Self {
        let projectors = (0..n)
            .map(|k| {
                let mut d = vec![0.0; n];
                d[k] = 1.0;
                HermitianOperator::from_real_diagonal(&d)
            })
            .collect();
        Self { projectors }
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }
}

/// Spectral measure of `a`: distinct eigenvalues (descending) with their
/// eigenprojectors.
pub fn gpov_from_observable(a: &HermitianOperator) -> Result<FiniteGpovMeasure> {
    let spec = eig_hermitian(a)?;
    let mut outcomes: Vec<f64> = Vec::new();
    let mut effects: Vec<CMatrix> = Vec::new();
    for (k, &l) in spec.values.iter().enumerate() {
        let v = spec.vector(k);
        let proj = &v * v.adjoint();
        match outcomes.last() {
            Some(&prev) if (prev - l).abs() <= EIGENVALUE_MERGE_TOL => {
                *effects.last_mut().expect("paired with outcomes") += proj;
            }
            _ => {
                outcomes.push(l);
                effects.push(proj);
            }
        }
    }
    let effects = effects.into_iter().map(HermitianOperator::from_matrix_unchecked).collect();
    FiniteGpovMeasure::new(outcomes, effects)
}

/// `Σ_{k ∈ Δ} ⟨ψ|E_k|ψ⟩`; repeated indices count once.
pub fn probability(m: &FiniteGpovMeasure, delta: &[usize], pt: &ProjectivePoint) -> Result<f64> {
    if pt.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: pt.dim() });
    }
    let idx = m.indices(delta)?;
    Ok(idx.iter().map(|&k| m.effects[k].quadratic_form(pt.representative())).sum())
}

/// `Σ_{k ∈ Δ} Tr(ρ E_k)`.
pub fn probability_state(m: &FiniteGpovMeasure, delta: &[usize], s: &QuantumState) -> Result<f64> {
    let idx = m.indices(delta)?;
    idx.iter().map(|&k| s.expectation(&m.effects[k])).sum()
}

/// `p_j = Tr(ρ E_j)`.
pub fn probabilities_mixed(e: &ResolutionOfIdentity, s: &QuantumState) -> Result<Vec<f64>> {
    e.projectors.iter().map(|p| s.expectation(p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairingEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Monte-Carlo estimate of `∫ f e_ρ dν` over the unitarily invariant
/// probability measure, with its standard error.
pub fn pairing_integral(
    s: &QuantumState,
    f: &ExpectationFunction,
    n_samples: usize,
    seed: u64,
) -> Result<PairingEstimate> {
    if n_samples < MIN_PAIRING_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_PAIRING_SAMPLES, got: n_samples });
    }
    if f.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: f.dim() });
    }
    let rho = s.as_hermitian();
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, pt) in HaarSampler::new(s.dim(), seed).take(n_samples).enumerate() {
        let psi = pt.representative();
        let x = f.generator().quadratic_form(psi) * rho.quadratic_form(psi);
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = m2 / (n_samples - 1) as f64;
    Ok(PairingEstimate { estimate: mean, std_error: (var / n_samples as f64).sqrt(), n: n_samples })
}

/// `U E U†` for every effect; used for covariance checks.
pub fn conjugate_measure(m: &FiniteGpovMeasure, u: &CMatrix) -> Result<FiniteGpovMeasure> {
    let effects =
        m.effects.iter().map(|e| HermitianOperator::from_matrix_unchecked(u * e.matrix() * u.adjoint())).collect();
    FiniteGpovMeasure::new(m.outcomes.clone(), effects)
}

/// `Σ λ_k E_k`.
pub fn reconstruct_observable(m: &FiniteGpovMeasure) -> HermitianOperator {
    let n = m.dim();
    let sum = m.outcomes.iter().zip(&m.effects).fold(CMatrix::zeros(n, n), |acc, (&l, e)| acc + e.matrix() * c(l));
    HermitianOperator::from_matrix_unchecked(sum)
}
