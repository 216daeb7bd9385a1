//! Markovian evolution of density operators.
//!
//! `L(ρ) = −i[H, ρ] − ½ Σ {V_j†V_j, ρ} + Σ V_j ρ V_j†`, split into its
//! Hamiltonian, gradient and Kraus terms, plus the trace-normalized nonlinear
//! fields whose nonlinearities cancel in the sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    c, eig_hermitian, CMatrix, CVector, DensityOperator, GeneralOperator, HermitianOperator, Operator, I,
};
use crate::qubit::{bloch_map, BlochVector};

/// Tolerance for the trace of a state along a trajectory.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Lower bound for eigenvalues along a trajectory.
pub const MIN_EIGENVALUE_TOL: f64 = -1e-6;
/// Magnitude below which canonical-form traces count as zero.
const CANONICAL_TOL: f64 = 1e-10;

/// A GKLS generator `(H, {V_j})`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: HermitianOperator,
    jumps: Vec<GeneralOperator>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: HermitianOperator, jumps: Vec<GeneralOperator>) -> Result<Self> {
        let n = hamiltonian.dim();
        if let Some(v) = jumps.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
        }
        Ok(Self { hamiltonian, jumps })
    }

    /// Closed system: no jump operators.
    pub fn hamiltonian_only(hamiltonian: HermitianOperator) -> Self {
        Self { hamiltonian, jumps: Vec::new() }
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[GeneralOperator] {
        &self.jumps
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Departures from the canonical form `Tr V_j = 0`, `Tr V_j†V_k = 0` (j ≠ k).
    /// The generator is valid either way.
    pub fn canonical_form_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, v) in self.jumps.iter().enumerate() {
            let t = v.trace();
            if t.norm() > CANONICAL_TOL {
                out.push(format!("Tr V_{j} = {t} is not zero"));
            }
            for (k, w) in self.jumps.iter().enumerate().skip(j + 1) {
                let overlap = (v.matrix().adjoint() * w.matrix()).trace();
                if overlap.norm() > CANONICAL_TOL {
                    out.push(format!("Tr V_{j}^dag V_{k} = {overlap} is not zero"));
                }
            }
        }
        out
    }

    fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows() });
        }
        Ok(())
    }

    /// `Σ V_j†V_j`.
    pub fn dissipator_weight(&self) -> CMatrix {
        let n = self.dim();
        self.jumps.iter().fold(CMatrix::zeros(n, n), |acc, v| acc + v.matrix().adjoint() * v.matrix())
    }

    /// `L(m)` for any square matrix `m`; `L` is linear.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.matrix();
        let mut out = (h * m - m * h) * (-I);
        for v in &self.jumps {
            let v = v.matrix();
            let vdv = v.adjoint() * v;
            out += v * m * v.adjoint() - (&vdv * m + m * &vdv) * c(0.5);
        }
        out
    }
}

/// `L(ρ)`.
pub fn gkls_apply(gen: &LindbladGenerator, rho: &DensityOperator) -> Result<HermitianOperator> {
    gen.check_dim(rho.matrix())?;
    Ok(HermitianOperator::from_matrix_unchecked(gen.apply_matrix(rho.matrix())))
}

/// The three terms of `L(ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GklsSplit {
    /// `−i[H, ρ]`.
    pub hamiltonian: HermitianOperator,
    /// `−½ {Σ V†V, ρ}`.
    pub gradient: HermitianOperator,
    /// `Σ V ρ V†`.
    pub kraus: HermitianOperator,
}

impl GklsSplit {
    pub fn total(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(
            self.hamiltonian.matrix() + self.gradient.matrix() + self.kraus.matrix(),
        )
    }
}

pub fn gkls_split(gen: &LindbladGenerator, rho: &DensityOperator) -> Result<GklsSplit> {
    gen.check_dim(rho.matrix())?;
    let (h, r) = (gen.hamiltonian.matrix(), rho.matrix());
    let w = gen.dissipator_weight();
    Ok(GklsSplit {
        hamiltonian: HermitianOperator::from_matrix_unchecked((h * r - r * h) * (-I)),
        gradient: HermitianOperator::from_matrix_unchecked((&w * r + r * &w) * c(-0.5)),
        kraus: HermitianOperator::from_matrix_unchecked(kraus_sum(&gen.jumps, r)),
    })
}

fn kraus_sum(jumps: &[GeneralOperator], r: &CMatrix) -> CMatrix {
    let n = r.nrows();
    jumps.iter().fold(CMatrix::zeros(n, n), |acc, v| acc + v.matrix() * r * v.matrix().adjoint())
}

/// `½(bρ + ρb) − Tr(bρ) ρ`.
pub fn nonlinear_gradient_vf(b: &HermitianOperator, rho: &DensityOperator) -> Result<HermitianOperator> {
    if b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: b.dim() });
    }
    let (bm, r) = (b.matrix(), rho.matrix());
    let mean = (bm * r).trace();
    Ok(HermitianOperator::from_matrix_unchecked((bm * r + r * bm) * c(0.5) - r * mean))
}

/// `Σ VρV† − Tr(Σ VρV†) ρ`.
pub fn nonlinear_kraus_vf(jumps: &[GeneralOperator], rho: &DensityOperator) -> Result<HermitianOperator> {
    if let Some(v) = jumps.iter().find(|v| v.dim() != rho.dim()) {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: v.dim() });
    }
    let k = kraus_sum(jumps, rho.matrix());
    let t = k.trace();
    Ok(HermitianOperator::from_matrix_unchecked(&k - rho.matrix() * t))
}

/// Frobenius distance between `L(ρ)` and the sum of the Hamiltonian field and
/// the two nonlinear fields.
pub fn cancellation_check(gen: &LindbladGenerator, rho: &DensityOperator) -> Result<f64> {
    let split = gkls_split(gen, rho)?;
    let minus_w = HermitianOperator::from_matrix_unchecked(gen.dissipator_weight() * c(-1.0));
    let nonlinear = split.hamiltonian.matrix()
        + nonlinear_gradient_vf(&minus_w, rho)?.matrix()
        + nonlinear_kraus_vf(&gen.jumps, rho)?.matrix();
    Ok((nonlinear - gen.apply_matrix(rho.matrix())).norm())
}

/// `H = 0`, `V = {√γ σ3}`: `L(ρ) = −γ(ρ − σ3ρσ3)`.
pub fn phase_damping_generator(gamma: f64) -> Result<LindbladGenerator> {
    if !(gamma >= 0.0) {
        return Err(Error::NegativeRate(gamma));
    }
    let v = crate::operator::pauli(3).scale(gamma.sqrt());
    LindbladGenerator::new(HermitianOperator::zeros(2), vec![v.into()])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Classical fourth-order Runge-Kutta on `ρ̇ = L(ρ)`.
    #[default]
    Rk4,
    /// Conjugation by `e^{−iHt}`; closed systems only.
    ExactUnitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

fn default_record_every() -> usize {
    1
}

impl FlowConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, integrator: Integrator::Rk4, record_every: 1 }
    }

    pub fn with_integrator(self, integrator: Integrator) -> Self {
        Self { integrator, ..self }
    }

    pub fn with_record_every(self, record_every: usize) -> Self {
        Self { record_every, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.t_final > 0.0 && self.dt > self.t_final {
            return Err(Error::InvalidConfig(format!("dt = {} exceeds t_final = {}", self.dt, self.t_final)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps and the uniform step that lands exactly on `t_final`.
    pub fn grid(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, 0.0);
        }
        let n = ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }

    fn records(&self, k: usize, n: usize) -> bool {
        k.is_multiple_of(self.record_every) || k == n
    }
}

/// Recorded states at increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityOperator)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub fn purities(&self) -> Vec<f64> {
        self.states.iter().map(DensityOperator::purity).collect()
    }

    /// Bloch vectors, for qubit trajectories.
    pub fn bloch(&self) -> Result<Vec<BlochVector>> {
        self.states.iter().map(bloch_map).collect()
    }
}

/// Checks a state against the trajectory tolerances.
pub fn check_state(t: f64, m: &CMatrix) -> Result<DensityOperator> {
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_DRIFT_TOL || trace.im.abs() > TRACE_DRIFT_TOL {
        return Err(Error::InvariantViolation { time: t, detail: format!("trace drifted to {trace}") });
    }
    let rho = DensityOperator::from_matrix_unchecked(m.clone());
    let min = rho.min_eigenvalue()?;
    if min < MIN_EIGENVALUE_TOL {
        return Err(Error::InvariantViolation { time: t, detail: format!("eigenvalue {min:e} below tolerance") });
    }
    Ok(rho)
}

/// Flows any square matrix under the linear map `L` over `[0, t_final]`,
/// returning the recorded times and matrices without state checks.
///
/// This covers trace-one matrices outside the state space.
pub fn propagate(gen: &LindbladGenerator, m0: &CMatrix, cfg: &FlowConfig) -> Result<(Vec<f64>, Vec<CMatrix>)> {
    cfg.validate()?;
    gen.check_dim(m0)?;
    let (n, h) = cfg.grid();
    let time = |k: usize| if k == n { cfg.t_final } else { k as f64 * h };
    let mut times = vec![0.0];
    let mut out = vec![m0.clone()];
    match cfg.integrator {
        Integrator::Rk4 => {
            let mut m = m0.clone();
            for k in 1..=n {
                let k1 = gen.apply_matrix(&m);
                let k2 = gen.apply_matrix(&(&m + &k1 * c(h / 2.0)));
                let k3 = gen.apply_matrix(&(&m + &k2 * c(h / 2.0)));
                let k4 = gen.apply_matrix(&(&m + &k3 * c(h)));
                m += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
                if cfg.records(k, n) {
                    times.push(time(k));
                    out.push(m.clone());
                }
            }
        }
        Integrator::ExactUnitary => {
            if !gen.jumps.is_empty() {
                return Err(Error::InvalidConfig("exact-unitary integration needs an empty jump list".into()));
            }
            let spec = eig_hermitian(&gen.hamiltonian)?;
            let v = &spec.vectors;
            let r0 = v.adjoint() * m0 * v;
            for k in (1..=n).filter(|&k| cfg.records(k, n)) {
                let t = time(k);
                let phases =
                    CVector::from_iterator(spec.values.len(), spec.values.iter().map(|&l| (-I * (l * t)).exp()));
                let d = CMatrix::from_diagonal(&phases);
                times.push(t);
                out.push(v * (&d * &r0 * d.adjoint()) * v.adjoint());
            }
        }
    }
    Ok((times, out))
}

/// Integrates `ρ̇ = L(ρ)` from `rho0` over `[0, t_final]`, checking every
/// recorded state against [`TRACE_DRIFT_TOL`] and [`MIN_EIGENVALUE_TOL`].
pub fn integrate(gen: &LindbladGenerator, rho0: &DensityOperator, cfg: &FlowConfig) -> Result<Trajectory> {
    let (times, mats) = propagate(gen, rho0.matrix(), cfg)?;
    let states = times.iter().zip(&mats).map(|(&t, m)| check_state(t, m)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times, states })
}
