//! Composite systems `H_A ⊗ H_B` (A-major ordering: index `iA·dimB + iB`).

use serde::{Deserialize, Serialize};

use crate::dynamics::{check_state, FlowConfig, Trajectory};
use crate::error::{Error, Result};
use crate::operator::{
    eig_hermitian, partial_trace, tensor_product, CMatrix, CVector, DensityOperator, HermitianOperator, Operator,
    Subsystem, I,
};
use crate::states::QuantumState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteSystem {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteSystem {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        for d in [dim_a, dim_b] {
            if d == 0 {
                return Err(Error::InvalidDimension(d));
            }
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::BadFactorization { dim: n, dim_a: self.dim_a, dim_b: self.dim_b });
        }
        Ok(())
    }
}

/// Real dimensions of the composite projective space and of the product of
/// the factor projective spaces.
pub fn composite_dimension(dim_a: usize, dim_b: usize) -> Result<(usize, usize)> {
    let sys = BipartiteSystem::new(dim_a, dim_b)?;
    Ok((2 * (sys.dim() - 1), 2 * (dim_a - 1) + 2 * (dim_b - 1)))
}

/// Reduced state `ρ_A(a) = ρ(a ⊗ 1_B)` (or the B analogue).
pub fn project_subsystem(rho: &QuantumState, sys: &BipartiteSystem, which: Subsystem) -> Result<QuantumState> {
    sys.check(rho.dim())?;
    partial_trace(rho, sys.dims(), which)
}

/// `Tr((ρ_AB − ρ_A ⊗ ρ_B)^k)`.
pub fn entanglement_measure(rho: &QuantumState, sys: &BipartiteSystem, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidOrder(k));
    }
    let ra = project_subsystem(rho, sys, Subsystem::A)?;
    let rb = project_subsystem(rho, sys, Subsystem::B)?;
    let diff = rho.matrix() - tensor_product(&ra, &rb).into_matrix();
    Ok(diff.pow(k).trace().re)
}

/// Subsystem trajectory together with the purity of the global state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedEvolution {
    pub subsystem: Trajectory,
    pub global_purity: Vec<f64>,
}

/// Evolves `rho0` by exact conjugation with `e^{−iHt}` and records the reduced
/// state of `keep`. The integrator field of `cfg` is ignored.
pub fn projected_evolution_of(
    h: &HermitianOperator,
    rho0: &QuantumState,
    sys: &BipartiteSystem,
    keep: Subsystem,
    cfg: &FlowConfig,
) -> Result<ProjectedEvolution> {
    cfg.validate()?;
    sys.check(h.dim())?;
    sys.check(rho0.dim())?;
    let spec = eig_hermitian(h)?;
    let v = &spec.vectors;
    let r0 = v.adjoint() * rho0.matrix() * v;
    let (n, step) = cfg.grid();
    let mut out = ProjectedEvolution {
        subsystem: Trajectory { times: Vec::new(), states: Vec::new() },
        global_purity: Vec::new(),
    };
    for k in 0..=n {
        if !(k == 0 || k.is_multiple_of(cfg.record_every) || k == n) {
            continue;
        }
        let t = if k == n { cfg.t_final } else { k as f64 * step };
        let phases = CVector::from_iterator(spec.values.len(), spec.values.iter().map(|&l| (-I * (l * t)).exp()));
        let d = CMatrix::from_diagonal(&phases);
        let global = check_state(t, &(v * (&d * &r0 * d.adjoint()) * v.adjoint()))?;
        let reduced = project_subsystem(&global, sys, keep)?;
        out.subsystem.times.push(t);
        out.subsystem.states.push(check_state(t, reduced.matrix())?);
        out.global_purity.push(global.purity());
    }
    Ok(out)
}

/// [`projected_evolution_of`] keeping subsystem A.
pub fn projected_evolution(
    h: &HermitianOperator,
    rho0: &QuantumState,
    sys: &BipartiteSystem,
    cfg: &FlowConfig,
) -> Result<ProjectedEvolution> {
    projected_evolution_of(h, rho0, sys, Subsystem::A, cfg)
}

/// `ρ_A ⊗ ρ_B` as a state.
pub fn product_state(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    a.tensor(b)
}
