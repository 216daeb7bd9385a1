//! C ABI over `geomq`.
//!
//! Matrices cross the boundary as row-major arrays of interleaved `(re, im)`
//! doubles, `2·n·n` values for an `n×n` matrix. Every fallible function
//! returns a [`GeomqStatus`]; on failure a message is available from
//! [`geomq_last_error_message`] until the next call on the same thread.
//! Handles returned through out-pointers are owned by the caller and must be
//! released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use geomq::composition::{entanglement_measure, BipartiteSystem};
use geomq::dynamics::{
    cancellation_check, gkls_apply, integrate, FlowConfig, Integrator, LindbladGenerator, Trajectory,
};
use geomq::measurement::pairing_integral;
use geomq::observables::{poisson_bracket_with, BracketConvention, ExpectationFunction};
use geomq::projective::{project_ray, transition_probability};
use geomq::qubit::{bloch_map, state_from_bloch, BlochVector};
use geomq::{
    commutator, eig_hermitian, jordan_product, partial_trace, pauli, tensor_product, CMatrix, CVector, DensityOperator,
    Error, GeneralOperator, HermitianOperator, Operator, Subsystem,
};
use num_complex::Complex64;

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomqStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NotHermitian = 3,
    NotAState = 4,
    InvalidArgument = 5,
    InvariantViolation = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque square complex matrix.
pub struct GeomqOperator {
    matrix: CMatrix,
}

/// Opaque recorded trajectory of density matrices.
pub struct GeomqTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GeomqStatus {
    match e {
        Error::DimensionMismatch { .. }
        | Error::NotSquare { .. }
        | Error::Empty
        | Error::BadFactorization { .. }
        | Error::InvalidDimension(_)
        | Error::IndexOutOfRange { .. } => GeomqStatus::DimensionMismatch,
        Error::NotHermitian { .. } => GeomqStatus::NotHermitian,
        Error::InvalidTrace { .. } | Error::NotPositive { .. } | Error::OutsideBlochBall { .. } => {
            GeomqStatus::NotAState
        }
        Error::InvariantViolation { .. } => GeomqStatus::InvariantViolation,
        Error::Singular { .. } | Error::NoConvergence => GeomqStatus::Numerical,
        _ => GeomqStatus::InvalidArgument,
    }
}

struct Failure(GeomqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GeomqStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error or panic, and converts to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GeomqStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GeomqStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GeomqStatus::Panic
        }
    }
}

unsafe fn op_ref<'a>(p: *const GeomqOperator, what: &str) -> Result<&'a CMatrix, Failure> {
    p.as_ref().map(|o| &o.matrix).ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_op(out: *mut *mut GeomqOperator, matrix: CMatrix) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(GeomqOperator { matrix })), "out")
}

fn hermitian(m: &CMatrix) -> Result<HermitianOperator, Failure> {
    Ok(HermitianOperator::new(m.clone())?)
}

fn state(m: &CMatrix) -> Result<DensityOperator, Failure> {
    Ok(DensityOperator::new(m.clone())?)
}

unsafe fn vector(data: *const f64, dim: usize, what: &str) -> Result<CVector, Failure> {
    let raw = slice(data, 2 * dim, what)?;
    Ok(CVector::from_iterator(dim, raw.chunks_exact(2).map(|z| Complex64::new(z[0], z[1]))))
}

unsafe fn generator(
    h: *const GeomqOperator,
    jumps: *const *const GeomqOperator,
    n_jumps: usize,
) -> Result<LindbladGenerator, Failure> {
    let h = hermitian(op_ref(h, "hamiltonian")?)?;
    let mut vs = Vec::with_capacity(n_jumps);
    for &j in slice(jumps, n_jumps, "jumps")? {
        vs.push(GeneralOperator::new(op_ref(j, "jump operator")?.clone())?);
    }
    Ok(LindbladGenerator::new(h, vs)?)
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn geomq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn geomq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an `n×n` operator from `2·n·n` interleaved row-major values.
///
/// # Safety
/// `data` must point to `2·dim·dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_operator_new(data: *const f64, dim: usize, out: *mut *mut GeomqOperator) -> GeomqStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure(GeomqStatus::DimensionMismatch, "dimension must be positive".into()));
        }
        let raw = slice(data, 2 * dim * dim, "data")?;
        let m = CMatrix::from_row_iterator(dim, dim, raw.chunks_exact(2).map(|z| Complex64::new(z[0], z[1])));
        put_op(out, m)
    })
}

/// Pauli matrix `j ∈ {0, 1, 2, 3}` (0 is the identity).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_operator_pauli(j: u32, out: *mut *mut GeomqOperator) -> GeomqStatus {
    guard(|| {
        if j > 3 {
            return Err(Error::IndexOutOfRange { index: j as usize, bound: 4 }.into());
        }
        put_op(out, pauli(j as usize).into_matrix())
    })
}

/// # Safety
/// `op` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geomq_operator_free(op: *mut GeomqOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn geomq_operator_dim(op: *const GeomqOperator) -> usize {
    op.as_ref().map_or(0, |o| o.matrix.nrows())
}

/// Copies the entries into `out` (interleaved, row-major); `len` counts doubles.
///
/// # Safety
/// `op` must be a valid handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn geomq_operator_entries(op: *const GeomqOperator, out: *mut f64, len: usize) -> GeomqStatus {
    guard(|| {
        let m = op_ref(op, "op")?;
        let need = 2 * m.len();
        if len < need {
            return Err(Failure(GeomqStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        for (k, z) in m.transpose().iter().enumerate() {
            buf[2 * k] = z.re;
            buf[2 * k + 1] = z.im;
        }
        Ok(())
    })
}

/// `[a, b] = ab − ba`.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_commutator(
    a: *const GeomqOperator,
    b: *const GeomqOperator,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let (a, b) = (GeneralOperator::new(op_ref(a, "a")?.clone())?, GeneralOperator::new(op_ref(b, "b")?.clone())?);
        put_op(out, commutator(&a, &b)?.into_matrix())
    })
}

/// Jordan product `(ab + ba)/2` of Hermitian operators.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_jordan_product(
    a: *const GeomqOperator,
    b: *const GeomqOperator,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let (a, b) = (hermitian(op_ref(a, "a")?)?, hermitian(op_ref(b, "b")?)?);
        put_op(out, jordan_product(&a, &b)?.into_matrix())
    })
}

/// Kronecker product `a ⊗ b`.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_tensor_product(
    a: *const GeomqOperator,
    b: *const GeomqOperator,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let (a, b) = (GeneralOperator::new(op_ref(a, "a")?.clone())?, GeneralOperator::new(op_ref(b, "b")?.clone())?);
        put_op(out, tensor_product(&a, &b).into_matrix())
    })
}

/// Reduced state on subsystem A (`keep = 0`) or B (`keep = 1`).
///
/// # Safety
/// `rho` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_partial_trace(
    rho: *const GeomqOperator,
    dim_a: usize,
    dim_b: usize,
    keep: u32,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let keep = match keep {
            0 => Subsystem::A,
            1 => Subsystem::B,
            k => return Err(Failure(GeomqStatus::InvalidArgument, format!("keep must be 0 or 1, got {k}"))),
        };
        let rho = state(op_ref(rho, "rho")?)?;
        put_op(out, partial_trace(&rho, (dim_a, dim_b), keep)?.into_matrix())
    })
}

/// Eigenvalues of a Hermitian operator in descending order; `len ≥ dim`.
///
/// # Safety
/// `a` must be valid and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn geomq_eigenvalues(a: *const GeomqOperator, out: *mut f64, len: usize) -> GeomqStatus {
    guard(|| {
        let spec = eig_hermitian(&hermitian(op_ref(a, "a")?)?)?;
        if len < spec.values.len() {
            return Err(Failure(GeomqStatus::BufferTooSmall, format!("need {} doubles, got {len}", spec.values.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, spec.values.len()).copy_from_slice(&spec.values);
        Ok(())
    })
}

/// `Tr(ρ a)`.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_expectation(
    rho: *const GeomqOperator,
    a: *const GeomqOperator,
    out: *mut f64,
) -> GeomqStatus {
    guard(|| {
        let (rho, a) = (state(op_ref(rho, "rho")?)?, hermitian(op_ref(a, "a")?)?);
        put(out, rho.expectation(&a)?, "out")
    })
}

/// Generator of the Poisson bracket of `e_a` and `e_b`: `[a, b]/(2i)` for
/// `convention = 0`, `i[a, b]` for `convention = 1`.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_poisson_bracket(
    a: *const GeomqOperator,
    b: *const GeomqOperator,
    convention: u32,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let convention = match convention {
            0 => BracketConvention::Internal,
            1 => BracketConvention::ICommutator,
            k => return Err(Failure(GeomqStatus::InvalidArgument, format!("unknown convention {k}"))),
        };
        let fa = ExpectationFunction::new(hermitian(op_ref(a, "a")?)?);
        let fb = ExpectationFunction::new(hermitian(op_ref(b, "b")?)?);
        let pb = poisson_bracket_with(&fa, &fb, convention)?;
        put_op(out, pb.generator().matrix().clone())
    })
}

/// `|⟨ψ|φ⟩|²` for the rays of two nonzero vectors of `dim` interleaved entries.
///
/// # Safety
/// `psi` and `phi` must each point to `2·dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_transition_probability(
    psi: *const f64,
    phi: *const f64,
    dim: usize,
    out: *mut f64,
) -> GeomqStatus {
    guard(|| {
        let p = project_ray(&vector(psi, dim, "psi")?)?;
        let q = project_ray(&vector(phi, dim, "phi")?)?;
        put(out, transition_probability(&p, &q)?, "out")
    })
}

/// `L(ρ)` for the GKLS generator with Hamiltonian `h` and `n_jumps` jump operators.
///
/// # Safety
/// All handles must be valid, `jumps` must hold `n_jumps` handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_gkls_apply(
    h: *const GeomqOperator,
    jumps: *const *const GeomqOperator,
    n_jumps: usize,
    rho: *const GeomqOperator,
    out: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let gen = generator(h, jumps, n_jumps)?;
        put_op(out, gkls_apply(&gen, &state(op_ref(rho, "rho")?)?)?.into_matrix())
    })
}

/// Frobenius residual of the nonlinear decomposition of `L(ρ)`.
///
/// # Safety
/// As for [`geomq_gkls_apply`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_cancellation_check(
    h: *const GeomqOperator,
    jumps: *const *const GeomqOperator,
    n_jumps: usize,
    rho: *const GeomqOperator,
    out: *mut f64,
) -> GeomqStatus {
    guard(|| {
        let gen = generator(h, jumps, n_jumps)?;
        put(out, cancellation_check(&gen, &state(op_ref(rho, "rho")?)?)?, "out")
    })
}

/// Integrates `ρ̇ = L(ρ)` from `rho0`. `integrator` is 0 for Runge-Kutta 4,
/// 1 for exact unitary conjugation (closed systems only).
///
/// # Safety
/// As for [`geomq_gkls_apply`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_integrate(
    h: *const GeomqOperator,
    jumps: *const *const GeomqOperator,
    n_jumps: usize,
    rho0: *const GeomqOperator,
    dt: f64,
    t_final: f64,
    record_every: usize,
    integrator: u32,
    out: *mut *mut GeomqTrajectory,
) -> GeomqStatus {
    guard(|| {
        let integrator = match integrator {
            0 => Integrator::Rk4,
            1 => Integrator::ExactUnitary,
            k => return Err(Failure(GeomqStatus::InvalidArgument, format!("unknown integrator {k}"))),
        };
        let gen = generator(h, jumps, n_jumps)?;
        let cfg = FlowConfig::new(dt, t_final).with_integrator(integrator).with_record_every(record_every);
        let inner = integrate(&gen, &state(op_ref(rho0, "rho0")?)?, &cfg)?;
        put(out, Box::into_raw(Box::new(GeomqTrajectory { inner })), "out")
    })
}

/// Number of recorded states, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn geomq_trajectory_len(traj: *const GeomqTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Time and state of record `k`. Either out-pointer may be null to skip it.
///
/// # Safety
/// `traj` must be valid; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_trajectory_get(
    traj: *const GeomqTrajectory,
    k: usize,
    time: *mut f64,
    rho: *mut *mut GeomqOperator,
) -> GeomqStatus {
    guard(|| {
        let t = &traj.as_ref().ok_or_else(|| null("traj"))?.inner;
        if k >= t.len() {
            return Err(Error::IndexOutOfRange { index: k, bound: t.len() }.into());
        }
        if !time.is_null() {
            time.write(t.times[k]);
        }
        if !rho.is_null() {
            put_op(rho, t.states[k].matrix().clone())?;
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn geomq_trajectory_free(traj: *mut GeomqTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// `Tr((ρ − ρ_A ⊗ ρ_B)^k)`, `k ≥ 2`.
///
/// # Safety
/// `rho` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_entanglement_measure(
    rho: *const GeomqOperator,
    dim_a: usize,
    dim_b: usize,
    k: u32,
    out: *mut f64,
) -> GeomqStatus {
    guard(|| {
        let sys = BipartiteSystem::new(dim_a, dim_b)?;
        put(out, entanglement_measure(&state(op_ref(rho, "rho")?)?, &sys, k)?, "out")
    })
}

/// Bloch vector of a qubit state into `out[0..3]`.
///
/// # Safety
/// `rho` must be valid and `out` must have room for 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn geomq_bloch_from_state(rho: *const GeomqOperator, out: *mut f64) -> GeomqStatus {
    guard(|| {
        let x = bloch_map(&state(op_ref(rho, "rho")?)?)?.components();
        put(out.cast::<[f64; 3]>(), x, "out")
    })
}

/// Qubit state `(1 + x·σ)/2` for `x` in the closed unit ball.
///
/// # Safety
/// `x` must point to 3 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_state_from_bloch(x: *const f64, out: *mut *mut GeomqOperator) -> GeomqStatus {
    guard(|| {
        let x = slice(x, 3, "x")?;
        let b = BlochVector::new([x[0], x[1], x[2]])?;
        put_op(out, state_from_bloch(&b).into_matrix())
    })
}

/// Monte-Carlo estimate of `∫ e_a e_ρ dν` over Haar-random pure states.
///
/// # Safety
/// Handles must be valid; `estimate` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn geomq_pairing_integral(
    rho: *const GeomqOperator,
    a: *const GeomqOperator,
    n_samples: usize,
    seed: u64,
    estimate: *mut f64,
    std_error: *mut f64,
) -> GeomqStatus {
    guard(|| {
        let f = ExpectationFunction::new(hermitian(op_ref(a, "a")?)?);
        let est = pairing_integral(&state(op_ref(rho, "rho")?)?, &f, n_samples, seed)?;
        put(estimate, est.estimate, "estimate")?;
        put(std_error, est.std_error, "std_error")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::NotHermitian { deviation: 1.0 }), GeomqStatus::NotHermitian);
        assert_eq!(status_of(&Error::InvalidTrace { trace: 2.0 }), GeomqStatus::NotAState);
        assert_eq!(status_of(&Error::BadFactorization { dim: 4, dim_a: 3, dim_b: 2 }), GeomqStatus::DimensionMismatch);
        assert_eq!(status_of(&Error::NoConvergence), GeomqStatus::Numerical);
        assert_eq!(status_of(&Error::NegativeRate(-1.0)), GeomqStatus::InvalidArgument);
    }

    #[test]
    fn panics_become_status_codes() {
        assert_eq!(guard(|| panic!("boom")), GeomqStatus::Panic);
        assert_eq!(unsafe { std::ffi::CStr::from_ptr(geomq_last_error_message()) }.to_str().unwrap(), "internal panic");
    }
}
