//! Dense complex matrix algebra at small dimension.
//!
//! Observables, states and generic operators are newtypes over
//! `DMatrix<Complex64>` whose constructors enforce the matrix invariants.
//! Everything in the geometric modules is checked against the plain matrix
//! formulas collected here.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance for the Hermitian check on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default absolute tolerance for traces, eigenvalues and reconstructions.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Modulus below which a component does not count as the gauge component.
pub const GAUGE_TOL: f64 = 1e-12;

const EIG_MAX_ITER: usize = 10_000;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Common read access to the three operator kinds.
pub trait Operator {
    fn matrix(&self) -> &CMatrix;

    fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    fn trace(&self) -> Complex64 {
        self.matrix().trace()
    }
}

/// Nested `[re, im]` pairs, row-major. This is the matrix format used by
/// every JSON fixture and scenario file.
pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;
/// Complex vector as a list of `[re, im]` pairs.
pub type VectorLiteral = Vec<[f64; 2]>;

pub fn matrix_from_literal(lit: &MatrixLiteral) -> Result<CMatrix> {
    let n = lit.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    for row in lit {
        if row.len() != n {
            return Err(Error::NotSquare { rows: n, cols: row.len() });
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = lit[i][j];
        Complex64::new(re, im)
    }))
}

pub fn matrix_to_literal(m: &CMatrix) -> MatrixLiteral {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_from_literal(lit: &VectorLiteral) -> CVector {
    CVector::from_iterator(lit.len(), lit.iter().map(|[re, im]| Complex64::new(*re, *im)))
}

pub fn vector_to_literal(v: &CVector) -> VectorLiteral {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::Empty);
    }
    Ok(())
}

fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    Ok(())
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Make the first component with modulus above [`GAUGE_TOL`] real positive.
pub(crate) fn gauge_fix(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > GAUGE_TOL).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// An operator with no symmetry constraint (SL(H) elements, jump operators).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixLiteral", into = "MatrixLiteral")]
pub struct GeneralOperator(CMatrix);

impl GeneralOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self(&self.0 * z)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &impl Operator) -> Result<Self> {
        check_same_dim(&self.0, other.matrix())?;
        Ok(Self(&self.0 * other.matrix()))
    }

    /// Split `A = a1 + i a2` into Hermitian parts `(a1, a2)`.
    pub fn hermitian_parts(&self) -> (HermitianOperator, HermitianOperator) {
        let a1 = (&self.0 + self.0.adjoint()) * c(0.5);
        let a2 = (&self.0 - self.0.adjoint()) * Complex64::new(0.0, -0.5);
        (HermitianOperator::from_matrix_unchecked(a1), HermitianOperator::from_matrix_unchecked(a2))
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }
}

impl Operator for GeneralOperator {
    fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

impl TryFrom<MatrixLiteral> for GeneralOperator {
    type Error = Error;
    fn try_from(lit: MatrixLiteral) -> Result<Self> {
        Self::new(matrix_from_literal(&lit)?)
    }
}

impl From<GeneralOperator> for MatrixLiteral {
    fn from(op: GeneralOperator) -> Self {
        matrix_to_literal(&op.0)
    }
}

/// A Hermitian operator: an observable `a` in `e_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixLiteral", into = "MatrixLiteral")]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Validates hermiticity within [`HERMITIAN_TOL`] and stores the exactly
    /// symmetrized matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let deviation = hermitian_deviation(&m);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Symmetrizes without checking. For results that are Hermitian by
    /// construction up to rounding.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(symmetrize(&m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self(CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| c(x)))))
    }

    /// `a0·σ0 + a1·σ1 + a2·σ2 + a3·σ3`.
    pub fn from_pauli(a0: f64, a: [f64; 3]) -> Self {
        let mut m = pauli(0).0 * c(a0);
        for (j, aj) in a.iter().enumerate() {
            m += pauli(j + 1).0 * c(*aj);
        }
        Self(m)
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, x: f64) -> Self {
        Self(&self.0 * c(x))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        check_same_dim(&self.0, &other.0)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        check_same_dim(&self.0, &other.0)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn real_trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `⟨ψ|a|ψ⟩` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.0 * psi)).re
    }

    /// `V diag(exp(z λ_k)) V†`: covers both `e^{-iat}` and `e^{ta}`.
    pub fn exp_scaled(&self, z: Complex64) -> Result<GeneralOperator> {
        let spec = eig_hermitian(self)?;
        let d = CVector::from_iterator(spec.values.len(), spec.values.iter().map(|&l| (z * l).exp()));
        let v = &spec.vectors;
        Ok(GeneralOperator(v * CMatrix::from_diagonal(&d) * v.adjoint()))
    }

    /// Pauli coefficients `(a0, [a1, a2, a3])` of a 2×2 Hermitian operator.
    pub fn pauli_coefficients(&self) -> Result<(f64, [f64; 3])> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let coeff = |j: usize| (&self.0 * &pauli(j).0).trace().re / 2.0;
        Ok((coeff(0), [coeff(1), coeff(2), coeff(3)]))
    }
}

impl Operator for HermitianOperator {
    fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

impl TryFrom<MatrixLiteral> for HermitianOperator {
    type Error = Error;
    fn try_from(lit: MatrixLiteral) -> Result<Self> {
        Self::new(matrix_from_literal(&lit)?)
    }
}

impl From<HermitianOperator> for MatrixLiteral {
    fn from(op: HermitianOperator) -> Self {
        matrix_to_literal(&op.0)
    }
}

impl From<HermitianOperator> for GeneralOperator {
    fn from(op: HermitianOperator) -> Self {
        GeneralOperator(op.0)
    }
}

impl TryFrom<GeneralOperator> for HermitianOperator {
    type Error = Error;
    fn try_from(op: GeneralOperator) -> Result<Self> {
        Self::new(op.0)
    }
}

/// A density operator ρ: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixLiteral", into = "MatrixLiteral")]
pub struct DensityOperator(CMatrix);

impl DensityOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let trace = h.real_trace();
        if (trace - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let spec = eig_hermitian(&h)?;
        let min_eigenvalue = spec.values.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -DEFAULT_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(h.0))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(symmetrize(&m))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(CMatrix::identity(n, n) * c(1.0 / n as f64))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_vector(psi: &CVector) -> Result<Self> {
        let norm_sq = psi.norm_squared();
        if norm_sq.sqrt() <= GAUGE_TOL {
            return Err(Error::ZeroVector);
        }
        Ok(Self::from_matrix_unchecked(psi * psi.adjoint() * c(1.0 / norm_sq)))
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator(self.0.clone())
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `Tr(ρ a)`.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        check_same_dim(&self.0, &a.0)?;
        Ok((&self.0 * &a.0).trace().re)
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator(self.0.kronecker(&other.0))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian(&self.as_hermitian())?.values.last().copied().unwrap_or(0.0))
    }
}

impl Operator for DensityOperator {
    fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

impl TryFrom<MatrixLiteral> for DensityOperator {
    type Error = Error;
    fn try_from(lit: MatrixLiteral) -> Result<Self> {
        Self::new(matrix_from_literal(&lit)?)
    }
}

impl From<DensityOperator> for MatrixLiteral {
    fn from(op: DensityOperator) -> Self {
        matrix_to_literal(&op.0)
    }
}

impl From<DensityOperator> for HermitianOperator {
    fn from(op: DensityOperator) -> Self {
        HermitianOperator(op.0)
    }
}

impl From<DensityOperator> for GeneralOperator {
    fn from(op: DensityOperator) -> Self {
        GeneralOperator(op.0)
    }
}

impl HermitianOperator {
    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(self.0.kronecker(&other.0))
    }
}

/// Pauli matrix `σ_j`, with `σ_0 = I`.
///
/// # Panics
/// If `j > 3`.
pub fn pauli(j: usize) -> HermitianOperator {
    let (o, z, i) = (c(1.0), c(0.0), I);
    let m = match j {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -i, i, z],
        3 => [o, z, z, -o],
        _ => panic!("Pauli index {j} out of range 0..=3"),
    };
    HermitianOperator(CMatrix::from_row_slice(2, 2, &m))
}

/// `ab − ba`.
pub fn commutator(a: &impl Operator, b: &impl Operator) -> Result<GeneralOperator> {
    check_same_dim(a.matrix(), b.matrix())?;
    let (a, b) = (a.matrix(), b.matrix());
    Ok(GeneralOperator(a * b - b * a))
}

/// `(ab + ba)/2`.
pub fn jordan_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    check_same_dim(&a.0, &b.0)?;
    Ok(HermitianOperator::from_matrix_unchecked((&a.0 * &b.0 + &b.0 * &a.0) * c(0.5)))
}

/// Kronecker product, subsystem A major: index `iA·dimB + iB`.
pub fn tensor_product(a: &impl Operator, b: &impl Operator) -> GeneralOperator {
    GeneralOperator(a.matrix().kronecker(b.matrix()))
}

/// Which factor of a bipartite system to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of any square matrix on `C^{nA} ⊗ C^{nB}`.
pub fn partial_trace_matrix(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    let (na, nb) = dims;
    let n = m.nrows();
    if na == 0 || nb == 0 || na * nb != n || m.ncols() != n {
        return Err(Error::BadFactorization { dim: n, dim_a: na, dim_b: nb });
    }
    Ok(match keep {
        Subsystem::A => CMatrix::from_fn(na, na, |i, j| (0..nb).map(|k| m[(i * nb + k, j * nb + k)]).sum()),
        Subsystem::B => CMatrix::from_fn(nb, nb, |k, l| (0..na).map(|i| m[(i * nb + k, i * nb + l)]).sum()),
    })
}

/// Reduced state: `Tr(ρ_A a) = Tr(ρ (a ⊗ 1_B))`.
pub fn partial_trace(rho: &DensityOperator, dims: (usize, usize), keep: Subsystem) -> Result<DensityOperator> {
    partial_trace_matrix(&rho.0, dims, keep).map(DensityOperator::from_matrix_unchecked)
}

/// Eigen-decomposition of a Hermitian operator.
///
/// Eigenvalues are descending. Within a degenerate group (gap below
/// [`DEFAULT_TOL`]) eigenvectors are ordered by the lexicographic order of the
/// real parts of their entries. Every eigenvector is gauge-fixed (first
/// significant entry real positive).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CVector::from_iterator(self.values.len(), self.values.iter().map(|&l| c(l)));
        &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

fn lex_real(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.total_cmp(&y.re) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn eig_hermitian(a: &HermitianOperator) -> Result<Spectrum> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.0.clone(), f64::EPSILON, EIG_MAX_ITER).ok_or(Error::NoConvergence)?;
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            v /= c(v.norm());
            gauge_fix(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[start].0 - pairs[end].0).abs() <= DEFAULT_TOL {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lex_real(&x.1, &y.1));
        start = end;
    }

    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| pairs[k].1[i]);
    Ok(Spectrum { values, vectors })
}

/// Validating entry point for raw matrices.
pub fn eig_hermitian_matrix(m: &CMatrix) -> Result<Spectrum> {
    eig_hermitian(&HermitianOperator::new(m.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn commutator_examples() {
        let z = commutator(&pauli(1), &pauli(1)).unwrap();
        assert!(z.matrix().iter().all(|x| x.norm() == 0.0));

        let c12 = commutator(&pauli(1), &pauli(2)).unwrap();
        assert!(close(c12.matrix(), &(pauli(3).0 * Complex64::new(0.0, 2.0)), 1e-15));

        let b = HermitianOperator::from_pauli(0.3, [0.1, -2.0, 0.7]);
        let z = commutator(&HermitianOperator::identity(2), &b).unwrap();
        assert!(z.matrix().iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = commutator(&pauli(1), &HermitianOperator::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn jordan_examples() {
        let j11 = jordan_product(&pauli(1), &pauli(1)).unwrap();
        assert!(close(j11.matrix(), &CMatrix::identity(2, 2), 1e-15));
        let j12 = jordan_product(&pauli(1), &pauli(2)).unwrap();
        assert!(close(j12.matrix(), &CMatrix::zeros(2, 2), 1e-15));
        let b = HermitianOperator::from_pauli(0.3, [0.1, -2.0, 0.7]);
        let jb = jordan_product(&HermitianOperator::identity(2), &b).unwrap();
        assert!(close(jb.matrix(), b.matrix(), 1e-15));
    }

    #[test]
    fn tensor_examples() {
        let i4 = tensor_product(&HermitianOperator::identity(2), &HermitianOperator::identity(2));
        assert!(close(i4.matrix(), &CMatrix::identity(4, 4), 0.0));
        let z = tensor_product(&pauli(3), &HermitianOperator::identity(2));
        let expected = HermitianOperator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert!(close(z.matrix(), expected.matrix(), 0.0));
    }

    #[test]
    fn partial_trace_bell_state_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let phi = CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
        let bell = DensityOperator::from_vector(&phi).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&bell, (2, 2), keep).unwrap();
            assert!(close(r.matrix(), &(CMatrix::identity(2, 2) * c(0.5)), 1e-15));
        }
    }

    #[test]
    fn partial_trace_keep_b_of_classical_mixture() {
        // 0.7 |0><0| ⊗ rho1 + 0.3 |1><1| ⊗ rho2  ->  0.7 rho1 + 0.3 rho2
        let rho1 = DensityOperator::new(HermitianOperator::from_pauli(0.5, [0.2, 0.0, 0.3]).into_matrix()).unwrap();
        let rho2 = DensityOperator::new(HermitianOperator::from_pauli(0.5, [0.0, -0.4, 0.1]).into_matrix()).unwrap();
        let p0 = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let p1 = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let joint = p0.tensor(&rho1.as_hermitian()).into_matrix() * c(0.7)
            + p1.tensor(&rho2.as_hermitian()).into_matrix() * c(0.3);
        let joint = DensityOperator::new(joint).unwrap();
        let rb = partial_trace(&joint, (2, 2), Subsystem::B).unwrap();
        let expected = rho1.matrix() * c(0.7) + rho2.matrix() * c(0.3);
        assert!(close(rb.matrix(), &expected, 1e-15));
        let ra = partial_trace(&joint, (2, 2), Subsystem::A).unwrap();
        assert!(close(ra.matrix(), HermitianOperator::from_real_diagonal(&[0.7, 0.3]).matrix(), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let rho = DensityOperator::maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, (3, 2), Subsystem::A),
            Err(Error::BadFactorization { dim: 4, dim_a: 3, dim_b: 2 })
        ));
    }

    #[test]
    fn eig_pauli_z_and_x() {
        let s3 = eig_hermitian(&pauli(3)).unwrap();
        assert_eq!(s3.values.len(), 2);
        assert!((s3.values[0] - 1.0).abs() < 1e-14 && (s3.values[1] + 1.0).abs() < 1e-14);
        assert!((s3.vector(0) - CVector::from_vec(vec![c(1.0), c(0.0)])).norm() < 1e-14);
        assert!((s3.vector(1) - CVector::from_vec(vec![c(0.0), c(1.0)])).norm() < 1e-14);

        let s1 = eig_hermitian(&pauli(1)).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((s1.values[0] - 1.0).abs() < 1e-14);
        assert!((s1.vector(0) - CVector::from_vec(vec![c(r), c(r)])).norm() < 1e-12);
        assert!((s1.vector(1) - CVector::from_vec(vec![c(r), c(-r)])).norm() < 1e-12);
    }

    #[test]
    fn eig_identity_degenerate() {
        let s = eig_hermitian(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        let gram = s.vectors.adjoint() * &s.vectors;
        assert!(close(&gram, &CMatrix::identity(2, 2), 1e-12));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(eig_hermitian_matrix(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityOperator::new(bad_trace), Err(Error::InvalidTrace { .. })));
        let negative = HermitianOperator::from_real_diagonal(&[1.5, -0.5]).into_matrix();
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn literal_round_trip_through_serde() {
        let a = HermitianOperator::from_pauli(0.1, [0.2, 0.3, 0.4]);
        let json = serde_json::to_string(&a).unwrap();
        let back: HermitianOperator = serde_json::from_str(&json).unwrap();
        assert!(close(a.matrix(), back.matrix(), 0.0));
        let bad: std::result::Result<HermitianOperator, _> = serde_json::from_str("[[[0,0],[1,0]],[[0,0],[0,0]]]");
        assert!(bad.is_err());
    }

    #[test]
    fn exp_scaled_matches_closed_form() {
        // e^{-i σ3 t} = diag(e^{-it}, e^{it})
        let t = 0.37;
        let u = pauli(3).exp_scaled(Complex64::new(0.0, -t)).unwrap();
        assert!((u.matrix()[(0, 0)] - Complex64::new(0.0, -t).exp()).norm() < 1e-14);
        assert!((u.matrix()[(1, 1)] - Complex64::new(0.0, t).exp()).norm() < 1e-14);
    }
}
