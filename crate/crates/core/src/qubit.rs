//! The qubit in Bloch-ball coordinates `ρ = (σ0 + x·σ)/2`.
//!
//! Affine functions `f_a = a0 + a·x` carry the Pauli coefficients of the
//! operator they represent, so at the function level `{x_j, x_k} = ε_jkl x_l`
//! and `x_j ∘ x_k = δ_jk`. The Bloch velocity of the operator field
//! `−i[a_op, ρ]` is `2 a_op × x`; [`AffineFunction::flow_generator`] is the one
//! place that factor is applied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{pauli, CMatrix, DensityOperator, HermitianOperator, Operator};

pub type Vec3 = [f64; 3];

/// Slack on the unit-ball constraint.
pub const BALL_TOL: f64 = 1e-10;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct BlochVector(Vec3);

impl BlochVector {
    pub fn new(x: Vec3) -> Result<Self> {
        let n = norm(&x);
        if !(n <= 1.0 + BALL_TOL) {
            return Err(Error::OutsideBlochBall { norm: n });
        }
        Ok(Self(x))
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn components(&self) -> Vec3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= BALL_TOL
    }
}

impl TryFrom<Vec3> for BlochVector {
    type Error = Error;
    fn try_from(x: Vec3) -> Result<Self> {
        Self::new(x)
    }
}

impl From<BlochVector> for Vec3 {
    fn from(b: BlochVector) -> Self {
        b.0
    }
}

/// Pauli components `Tr(m σ_j)`, j = 1..3, of any 2×2 matrix (real parts).
pub fn bloch_components(m: &CMatrix) -> Result<Vec3> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: m.nrows() });
    }
    Ok([1, 2, 3].map(|j| (m * pauli(j).matrix()).trace().re))
}

/// `x_j = Tr(ρ σ_j)`.
pub fn bloch_map(rho: &DensityOperator) -> Result<BlochVector> {
    BlochVector::new(bloch_components(rho.matrix())?)
}

/// `(σ0 + x·σ)/2`.
pub fn state_from_bloch(x: &BlochVector) -> DensityOperator {
    let h = HermitianOperator::from_pauli(0.5, x.0.map(|v| 0.5 * v));
    DensityOperator::from_matrix_unchecked(h.into_matrix())
}

/// `f(x) = a0 + a·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFunction {
    pub a0: f64,
    pub a: Vec3,
}

impl AffineFunction {
    pub fn new(a0: f64, a: Vec3) -> Self {
        Self { a0, a }
    }

    pub fn constant(a0: f64) -> Self {
        Self { a0, a: [0.0; 3] }
    }

    /// The coordinate function `x_j`, j ∈ {1, 2, 3}.
    pub fn coordinate(j: usize) -> Result<Self> {
        if !(1..=3).contains(&j) {
            return Err(Error::IndexOutOfRange { index: j, bound: 3 });
        }
        let mut a = [0.0; 3];
        a[j - 1] = 1.0;
        Ok(Self { a0: 0.0, a })
    }

    /// `e_h` restricted to the Bloch ball: the Pauli coefficients of `h`.
    pub fn from_operator(h: &HermitianOperator) -> Result<Self> {
        let (a0, a) = h.pauli_coefficients()?;
        Ok(Self { a0, a })
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::from_pauli(self.a0, self.a)
    }

    /// Affine coefficients whose Bloch fields reproduce the operator fields
    /// `−i[h, ρ]` and `hρ + ρh − 2Tr(hρ)ρ`: twice the Pauli coefficients.
    pub fn flow_generator(h: &HermitianOperator) -> Result<Self> {
        let f = Self::from_operator(h)?;
        Ok(Self { a0: 2.0 * f.a0, a: f.a.map(|v| 2.0 * v) })
    }

    pub fn evaluate(&self, x: &BlochVector) -> f64 {
        self.a0 + dot(&self.a, &x.0)
    }
}

/// `Λ(df, dg)(x) = x · (a × b)`.
pub fn lambda_eval(x: &BlochVector, f: &AffineFunction, g: &AffineFunction) -> f64 {
    dot(&x.0, &cross(&f.a, &g.a))
}

/// `R(df, dg)(x) = a·b − (a·x)(b·x)`.
pub fn r_eval(x: &BlochVector, f: &AffineFunction, g: &AffineFunction) -> f64 {
    dot(&f.a, &g.a) - dot(&f.a, &x.0) * dot(&g.a, &x.0)
}

/// Hamiltonian and gradient vector fields `(X, Y) = (a × x, a − (a·x) x)`.
pub fn bloch_vector_fields(f: &AffineFunction, x: &BlochVector) -> (Vec3, Vec3) {
    let xs = x.0;
    let ax = dot(&f.a, &xs);
    (cross(&f.a, &xs), [0, 1, 2].map(|i| f.a[i] - ax * xs[i]))
}

/// Nonzero components of `R` and `Λ` in spherical coordinates `(r, θ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalTensors {
    /// `(R^{rr}, R^{θθ}, R^{φφ})`; off-diagonal components vanish.
    pub r_diag: Vec3,
    /// `Λ^{θφ} = −Λ^{φθ}`; the other components vanish.
    pub lambda_theta_phi: f64,
}

pub fn spherical_tensors(r: f64, theta: f64, _phi: f64) -> Result<SphericalTensors> {
    let s = theta.sin();
    if !(r > 0.0) || !(theta > 0.0 && theta < std::f64::consts::PI) || s.abs() < 1e-300 {
        return Err(Error::CoordinateSingularity { r, theta });
    }
    Ok(SphericalTensors {
        r_diag: [1.0 - r * r, 1.0 / (r * r), 1.0 / (r * r * s * s)],
        lambda_theta_phi: 1.0 / (r * s),
    })
}

/// `(r, θ, φ)` with `φ ∈ (−π, π]`.
pub fn cartesian_to_spherical(x: &Vec3) -> Vec3 {
    let r = norm(x);
    let theta = if r == 0.0 { 0.0 } else { (x[2] / r).clamp(-1.0, 1.0).acos() };
    [r, theta, x[1].atan2(x[0])]
}

pub fn spherical_to_cartesian(r: f64, theta: f64, phi: f64) -> Vec3 {
    [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()]
}

/// Jordan and Poisson brackets of two coordinate functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateBrackets {
    /// `x_j ∘ x_k = δ_jk`, a constant.
    pub jordan: f64,
    /// `{x_j, x_k} = ε_jkl x_l`.
    pub poisson: AffineFunction,
}

pub fn coordinate_algebra(j: usize, k: usize) -> Result<CoordinateBrackets> {
    let (fj, fk) = (AffineFunction::coordinate(j)?, AffineFunction::coordinate(k)?);
    Ok(CoordinateBrackets {
        jordan: if j == k { 1.0 } else { 0.0 },
        poisson: AffineFunction::new(0.0, cross(&fj.a, &fk.a)),
    })
}

/// Bloch velocity of an operator-level tangent matrix, `Tr(T σ_j)`.
pub fn bloch_velocity(t: &HermitianOperator) -> Result<Vec3> {
    bloch_components(t.matrix())
}
