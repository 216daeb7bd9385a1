//! Observables as functions on the carrier space.
//!
//! An expectation function `e_a` is stored through its generator `a`; every
//! bracket of expectation functions is again an expectation function and is
//! computed at the generator level. Vector fields are represented by their
//! values in the ambient space of Hermitian matrices at a state `ρ`.
//!
//! Normalization: the Poisson bracket is generated by `[a, b]/(2i)` and the
//! Jordan bracket by `(ab + ba)/2`, so that `f_a ⋆ f_b = f_{a∘b} + i f_{a,b}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    c, commutator, eig_hermitian, jordan_product, CMatrix, CVector, DensityOperator, GeneralOperator,
    HermitianOperator, Operator, I,
};
use crate::projective::{metric, project_ray, ProjectivePoint, TangentVector};

/// Tolerance on `|Tr ρ² − 1|` for the pure-state vector fields.
pub const PURITY_TOL: f64 = 1e-8;
/// Smallest eigenvalue gap for which critical points count as isolated.
pub const SPECTRAL_GAP_TOL: f64 = 1e-8;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `e_a([ψ]) = ⟨ψ|a|ψ⟩ / ⟨ψ|ψ⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationFunction {
    generator: HermitianOperator,
}

impl ExpectationFunction {
    pub fn new(generator: HermitianOperator) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn evaluate(&self, pt: &ProjectivePoint) -> Result<f64> {
        check_dim(self.dim(), pt.dim())?;
        Ok(self.generator.quadratic_form(pt.representative()))
    }

    /// `Tr(ρ a)`, the affine extension to mixed states.
    pub fn evaluate_state(&self, rho: &DensityOperator) -> Result<f64> {
        rho.expectation(&self.generator)
    }
}

impl From<HermitianOperator> for ExpectationFunction {
    fn from(a: HermitianOperator) -> Self {
        Self::new(a)
    }
}

/// `F_A = f_{a1} + i f_{a2}` for `A = a1 + i a2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexObservableFunction {
    generator: GeneralOperator,
}

impl ComplexObservableFunction {
    pub fn new(generator: GeneralOperator) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> &GeneralOperator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Real and imaginary parts `(f_{a1}, f_{a2})`.
    pub fn parts(&self) -> (ExpectationFunction, ExpectationFunction) {
        let (a1, a2) = self.generator.hermitian_parts();
        (ExpectationFunction::new(a1), ExpectationFunction::new(a2))
    }

    pub fn evaluate(&self, pt: &ProjectivePoint) -> Result<Complex64> {
        check_dim(self.dim(), pt.dim())?;
        let psi = pt.representative();
        Ok(psi.dotc(&(self.generator.matrix() * psi)))
    }
}

impl From<ExpectationFunction> for ComplexObservableFunction {
    fn from(f: ExpectationFunction) -> Self {
        Self::new(f.generator.into())
    }
}

/// Normalization of the Poisson generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketConvention {
    /// `[a, b]/(2i)`, consistent with the star product.
    #[default]
    Internal,
    /// `i[a, b]`, i.e. `−2` times the internal generator. Spelled `paper`
    /// on the command line and in reports.
    #[serde(rename = "paper")]
    ICommutator,
}

impl BracketConvention {
    /// Factor multiplying `[a, b]` in the Poisson generator.
    pub fn commutator_factor(self) -> Complex64 {
        match self {
            BracketConvention::Internal => Complex64::new(0.0, -0.5),
            BracketConvention::ICommutator => I,
        }
    }
}

impl FromStr for BracketConvention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "internal" => Ok(Self::Internal),
            "paper" | "i-commutator" => Ok(Self::ICommutator),
            other => Err(format!("unknown bracket convention '{other}' (expected internal|paper)")),
        }
    }
}

impl fmt::Display for BracketConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Internal => "internal",
            Self::ICommutator => "paper",
        })
    }
}

pub fn poisson_bracket(f: &ExpectationFunction, g: &ExpectationFunction) -> Result<ExpectationFunction> {
    poisson_bracket_with(f, g, BracketConvention::Internal)
}

pub fn poisson_bracket_with(
    f: &ExpectationFunction,
    g: &ExpectationFunction,
    convention: BracketConvention,
) -> Result<ExpectationFunction> {
    let comm = commutator(&f.generator, &g.generator)?;
    let m = comm.into_matrix() * convention.commutator_factor();
    Ok(ExpectationFunction::new(HermitianOperator::from_matrix_unchecked(m)))
}

pub fn jordan_bracket(f: &ExpectationFunction, g: &ExpectationFunction) -> Result<ExpectationFunction> {
    Ok(ExpectationFunction::new(jordan_product(&f.generator, &g.generator)?))
}

/// `(f_a, f_b)([ψ]) = e_{a∘b} − e_a e_b`, the symmetrized covariance.
pub fn symmetric_bracket(f: &ExpectationFunction, g: &ExpectationFunction, pt: &ProjectivePoint) -> Result<f64> {
    let fg = jordan_bracket(f, g)?;
    Ok(fg.evaluate(pt)? - f.evaluate(pt)? * g.evaluate(pt)?)
}

/// `F_A ⋆ F_B = F_{AB}`.
pub fn star_product(f: &ComplexObservableFunction, g: &ComplexObservableFunction) -> Result<ComplexObservableFunction> {
    Ok(ComplexObservableFunction::new(f.generator.compose(&g.generator)?))
}

fn pure_check(rho: &DensityOperator) -> Result<()> {
    let purity = rho.purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(Error::NotPure { purity });
    }
    Ok(())
}

/// `−i[a, ρ]` for any square matrices of equal size.
pub fn hamiltonian_field(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    (a * rho - rho * a) * (-I)
}

/// `aρ + ρa − 2 Tr(aρ) ρ` for any square matrices of equal size.
pub fn gradient_field(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    let mean = (a * rho).trace();
    a * rho + rho * a - rho * (mean * 2.0)
}

/// Hamiltonian vector field of `e_a` at a pure state.
pub fn hamiltonian_vf(a: &HermitianOperator, rho: &DensityOperator) -> Result<HermitianOperator> {
    check_dim(a.dim(), rho.dim())?;
    pure_check(rho)?;
    Ok(HermitianOperator::from_matrix_unchecked(hamiltonian_field(a.matrix(), rho.matrix())))
}

/// Gradient vector field of `e_a` at a pure state.
pub fn gradient_vf(a: &HermitianOperator, rho: &DensityOperator) -> Result<HermitianOperator> {
    check_dim(a.dim(), rho.dim())?;
    pure_check(rho)?;
    Ok(HermitianOperator::from_matrix_unchecked(gradient_field(a.matrix(), rho.matrix())))
}

fn centered(a: &HermitianOperator, pt: &ProjectivePoint) -> Result<CVector> {
    check_dim(a.dim(), pt.dim())?;
    let psi = pt.representative();
    let mean = a.quadratic_form(psi);
    Ok(a.matrix() * psi - psi * c(mean))
}

/// Horizontal lift `−i(a − e_a)ψ` of the Hamiltonian field.
pub fn hamiltonian_tangent(a: &HermitianOperator, pt: &ProjectivePoint) -> Result<TangentVector> {
    let v = centered(a, pt)? * (-I);
    TangentVector::horizontal_part(pt.clone(), &v)
}

/// Horizontal lift `(a − e_a)ψ` of the gradient field.
pub fn gradient_tangent(a: &HermitianOperator, pt: &ProjectivePoint) -> Result<TangentVector> {
    let v = centered(a, pt)?;
    TangentVector::horizontal_part(pt.clone(), &v)
}

fn act(g: &GeneralOperator, pt: &ProjectivePoint) -> Result<ProjectivePoint> {
    check_dim(g.dim(), pt.dim())?;
    project_ray(&(g.matrix() * pt.representative()))
}

/// `[e^{−iat} ψ]`.
pub fn hamiltonian_flow_pure(a: &HermitianOperator, pt: &ProjectivePoint, t: f64) -> Result<ProjectivePoint> {
    act(&a.exp_scaled(Complex64::new(0.0, -t))?, pt)
}

/// `[e^{ta} ψ]`.
pub fn gradient_flow_pure(a: &HermitianOperator, pt: &ProjectivePoint, t: f64) -> Result<ProjectivePoint> {
    act(&a.exp_scaled(c(t))?, pt)
}

/// Isolated critical points of `e_a` with their critical values, ordered by
/// descending value.
pub fn critical_spectrum(a: &HermitianOperator) -> Result<Vec<(ProjectivePoint, f64)>> {
    let spec = eig_hermitian(a)?;
    let gap = spec.values.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if gap < SPECTRAL_GAP_TOL {
        return Err(Error::NonGenericSpectrum { gap });
    }
    spec.values.iter().enumerate().map(|(k, &l)| Ok((project_ray(&spec.vector(k))?, l))).collect()
}

/// Which one-parameter group transports points and vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    /// `e^{−ias}`, unitary.
    Hamiltonian,
    /// `e^{as}`, in SL(H) up to scale but not unitary.
    Gradient,
}

/// Centered difference estimate of `(L_{X_a} g)(v, w)` at the base of `v`.
pub fn killing_residual(a: &HermitianOperator, v: &TangentVector, w: &TangentVector, dt: f64) -> Result<f64> {
    killing_residual_along(Transport::Hamiltonian, a, v, w, dt)
}

/// As [`killing_residual`], with a choice of transporting flow.
pub fn killing_residual_along(
    transport: Transport,
    a: &HermitianOperator,
    v: &TangentVector,
    w: &TangentVector,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {dt}")));
    }
    let g_at = |s: f64| -> Result<f64> {
        let z = match transport {
            Transport::Hamiltonian => Complex64::new(0.0, -s),
            Transport::Gradient => c(s),
        };
        let flow = a.exp_scaled(z)?;
        metric(&v.pushforward(&flow)?, &w.pushforward(&flow)?)
    };
    Ok((g_at(dt)? - g_at(-dt)?) / (2.0 * dt))
}

/// Step used by [`lie_bracket`].
pub const LIE_BRACKET_STEP: f64 = 1e-5;

fn directional_derivative<F: Fn(&CMatrix) -> CMatrix>(field: &F, rho: &CMatrix, dir: &CMatrix, h: f64) -> CMatrix {
    let quotient = |h: f64| (field(&(rho + dir * c(h))) - field(&(rho - dir * c(h)))) * c(0.5 / h);
    let coarse = quotient(h);
    let fine = quotient(h / 2.0);
    (fine * c(4.0) - coarse) * c(1.0 / 3.0)
}

/// `[V1, V2](ρ) = DV2(ρ)[V1(ρ)] − DV1(ρ)[V2(ρ)]` by centered differences with
/// one Richardson refinement.
pub fn lie_bracket<F1, F2>(v1: F1, v2: F2, rho: &CMatrix) -> CMatrix
where
    F1: Fn(&CMatrix) -> CMatrix,
    F2: Fn(&CMatrix) -> CMatrix,
{
    let (a, b) = (v1(rho), v2(rho));
    directional_derivative(&v2, rho, &a, LIE_BRACKET_STEP) - directional_derivative(&v1, rho, &b, LIE_BRACKET_STEP)
}

/// Frobenius residuals of the three sl(H) relations at one state, with
/// `c = −i[a, b]` the Hermitian generator of `[A, B]`, `A = −ia`:
/// `[X_a, X_b] = −X_c`, `[X_a, Y_b] = −Y_c`, `[Y_a, Y_b] = X_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlResiduals {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SlResiduals {
    pub fn max(&self) -> f64 {
        self.xx.max(self.xy).max(self.yy)
    }
}

pub fn sl_relation_residuals(
    a: &HermitianOperator,
    b: &HermitianOperator,
    rho: &DensityOperator,
) -> Result<SlResiduals> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), rho.dim())?;
    pure_check(rho)?;
    let (am, bm, r) = (a.matrix(), b.matrix(), rho.matrix());
    let cm = commutator(a, b)?.into_matrix() * (-I);
    let xa = |x: &CMatrix| hamiltonian_field(am, x);
    let xb = |x: &CMatrix| hamiltonian_field(bm, x);
    let ya = |x: &CMatrix| gradient_field(am, x);
    let yb = |x: &CMatrix| gradient_field(bm, x);
    let xx = (lie_bracket(xa, xb, r) + hamiltonian_field(&cm, r)).norm();
    let xy = (lie_bracket(xa, yb, r) + gradient_field(&cm, r)).norm();
    let yy = (lie_bracket(ya, yb, r) - hamiltonian_field(&cm, r)).norm();
    Ok(SlResiduals { xx, xy, yy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;
    use crate::projective::symplectic_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(entries: &[f64]) -> ProjectivePoint {
        project_ray(&CVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x)))).unwrap()
    }

    fn plus() -> ProjectivePoint {
        ket(&[1.0, 1.0])
    }

    fn e(a: HermitianOperator) -> ExpectationFunction {
        ExpectationFunction::new(a)
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn evaluate_examples() {
        assert!((e(pauli(3)).evaluate(&ket(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        assert!((e(pauli(0)).evaluate(&crate::projective::haar_sample(2, 3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((e(pauli(1)).evaluate(&plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(e(pauli(1)).evaluate(&ProjectivePoint::basis(3, 0)).is_err());
    }

    #[test]
    fn poisson_examples() {
        let b = poisson_bracket(&e(pauli(1)), &e(pauli(2))).unwrap();
        assert!(close(b.generator().matrix(), pauli(3).matrix(), 1e-15));
        let z = poisson_bracket(&e(pauli(2)), &e(pauli(2))).unwrap();
        assert!(z.generator().matrix().norm() == 0.0);
        let z = poisson_bracket(&e(pauli(0)), &e(HermitianOperator::from_pauli(0.2, [1.0, 2.0, 3.0]))).unwrap();
        assert!(z.generator().matrix().norm() < 1e-15);
    }

    #[test]
    fn i_commutator_convention_is_minus_two_times_internal() {
        let p = poisson_bracket_with(&e(pauli(1)), &e(pauli(2)), BracketConvention::ICommutator).unwrap();
        assert!(close(p.generator().matrix(), &(pauli(3).into_matrix() * c(-2.0)), 1e-15));
        assert_eq!("paper".parse::<BracketConvention>().unwrap(), BracketConvention::ICommutator);
        assert_eq!("i-commutator".parse::<BracketConvention>().unwrap(), BracketConvention::ICommutator);
        assert!("other".parse::<BracketConvention>().is_err());
    }

    #[test]
    fn jordan_and_symmetric_examples() {
        let j = jordan_bracket(&e(pauli(1)), &e(pauli(1))).unwrap();
        assert!(close(j.generator().matrix(), pauli(0).matrix(), 1e-15));
        let j = jordan_bracket(&e(pauli(1)), &e(pauli(2))).unwrap();
        assert!(j.generator().matrix().norm() < 1e-15);
        assert!(symmetric_bracket(&e(pauli(3)), &e(pauli(3)), &ket(&[1.0, 0.0])).unwrap().abs() < 1e-15);
        assert!((symmetric_bracket(&e(pauli(3)), &e(pauli(3)), &plus()).unwrap() - 1.0).abs() < 1e-15);
        let b = HermitianOperator::from_pauli(0.1, [0.4, -0.3, 0.8]);
        assert!(symmetric_bracket(&e(pauli(0)), &e(b), &plus()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn star_product_examples() {
        let f1 = ComplexObservableFunction::from(e(pauli(1)));
        let f2 = ComplexObservableFunction::from(e(pauli(2)));
        let s = star_product(&f1, &f2).unwrap();
        assert!(close(s.generator().matrix(), &(pauli(3).into_matrix() * I), 1e-15));
        let (re, im) = s.parts();
        assert!(re.generator().matrix().norm() < 1e-15);
        assert!(close(im.generator().matrix(), pauli(3).matrix(), 1e-15));
    }

    #[test]
    fn star_product_splits_into_jordan_and_poisson() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5] {
            let a = crate::random::hermitian(n, &mut rng);
            let b = crate::random::hermitian(n, &mut rng);
            let pt = crate::projective::haar_sample(n, 5);
            let star = star_product(&e(a.clone()).into(), &e(b.clone()).into()).unwrap().evaluate(&pt).unwrap();
            let jor = jordan_bracket(&e(a.clone()), &e(b.clone())).unwrap().evaluate(&pt).unwrap();
            let poi = poisson_bracket(&e(a), &e(b)).unwrap().evaluate(&pt).unwrap();
            assert!((star - Complex64::new(jor, poi)).norm() < 1e-12);
        }
    }

    #[test]
    fn vector_field_examples() {
        let zero = DensityOperator::from_vector(&ProjectivePoint::basis(2, 0).representative().clone()).unwrap();
        let plus_rho = DensityOperator::from_vector(plus().representative()).unwrap();
        assert!(hamiltonian_vf(&pauli(3), &zero).unwrap().matrix().norm() < 1e-15);
        assert!(gradient_vf(&pauli(3), &zero).unwrap().matrix().norm() < 1e-15);
        let x = hamiltonian_vf(&pauli(3), &plus_rho).unwrap();
        let (_, xv) = x.pauli_coefficients().unwrap();
        assert!((xv[0]).abs() < 1e-15 && (xv[1] - 1.0).abs() < 1e-15 && xv[2].abs() < 1e-15);
        let y = gradient_vf(&pauli(3), &plus_rho).unwrap();
        let (_, yv) = y.pauli_coefficients().unwrap();
        assert!((yv[2] - 1.0).abs() < 1e-15 && yv[0].abs() < 1e-15);
        assert!(hamiltonian_vf(&pauli(0), &plus_rho).unwrap().matrix().norm() < 1e-15);
        assert!(gradient_vf(&pauli(0), &plus_rho).unwrap().matrix().norm() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(matches!(hamiltonian_vf(&pauli(3), &mixed), Err(Error::NotPure { .. })));
    }

    #[test]
    fn flows() {
        let r = hamiltonian_flow_pure(&pauli(3), &plus(), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((e(pauli(1)).evaluate(&r).unwrap() + 1.0).abs() < 1e-12);
        let g = gradient_flow_pure(&pauli(3), &plus(), 1.0).unwrap();
        assert!((e(pauli(3)).evaluate(&g).unwrap() - 2f64.tanh()).abs() < 1e-12);
        let one = ProjectivePoint::basis(2, 1);
        assert_eq!(gradient_flow_pure(&pauli(3), &one, 3.0).unwrap(), one);
        let p = crate::projective::haar_sample(3, 9);
        let a = crate::random::hermitian(3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(hamiltonian_flow_pure(&a, &p, 0.0).unwrap(), p);
    }

    #[test]
    fn brackets_match_pullback_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = crate::random::hermitian(4, &mut rng);
        let b = crate::random::hermitian(4, &mut rng);
        let pt = crate::projective::haar_sample(4, 8);
        let omega =
            symplectic_form(&hamiltonian_tangent(&a, &pt).unwrap(), &hamiltonian_tangent(&b, &pt).unwrap()).unwrap();
        let pb = poisson_bracket(&e(a.clone()), &e(b.clone())).unwrap().evaluate(&pt).unwrap();
        assert!((omega - pb).abs() < 1e-12);
        let g = metric(&gradient_tangent(&a, &pt).unwrap(), &gradient_tangent(&b, &pt).unwrap()).unwrap();
        assert!((g - symmetric_bracket(&e(a), &e(b), &pt).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn critical_spectrum_examples() {
        let s3 = critical_spectrum(&pauli(3)).unwrap();
        assert_eq!(s3[0].0, ProjectivePoint::basis(2, 0));
        assert_eq!(s3[1].0, ProjectivePoint::basis(2, 1));
        let s1 = critical_spectrum(&pauli(1)).unwrap();
        assert_eq!(s1[0].0, plus());
        assert_eq!(s1[1].0, ket(&[1.0, -1.0]));
        assert!(matches!(critical_spectrum(&pauli(0)), Err(Error::NonGenericSpectrum { .. })));
    }

    #[test]
    fn killing_condition_and_negative_control() {
        let pt = crate::projective::haar_sample(2, 21);
        let v = gradient_tangent(&pauli(1), &pt).unwrap();
        let w = hamiltonian_tangent(&pauli(2), &pt).unwrap();
        assert!(killing_residual(&pauli(3), &v, &w, 1e-4).unwrap().abs() < 1e-6);
        assert!(killing_residual(&pauli(0), &v, &w, 1e-4).unwrap().abs() < 1e-9);

        let base = ket(&[2.0, 1.0]);
        let v = TangentVector::horizontal_part(base.clone(), &CVector::from_vec(vec![c(0.0), c(1.0)])).unwrap();
        let r = killing_residual_along(Transport::Gradient, &pauli(3), &v, &v, 1e-4).unwrap();
        assert!(r.abs() > 0.1, "gradient transport residual {r}");
    }

    #[test]
    fn sl_relations_hold_at_random_pure_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=4 {
            let a = crate::random::hermitian(n, &mut rng);
            let b = crate::random::hermitian(n, &mut rng);
            let rho = DensityOperator::from_vector(&crate::random::pure_vector(n, &mut rng)).unwrap();
            let r = sl_relation_residuals(&a, &b, &rho).unwrap();
            assert!(r.max() < 1e-8, "{r:?}");
        }
    }
}
