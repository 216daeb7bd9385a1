//! Geometric (Kähler) quantum mechanics in finite dimension.
//!
//! Pure states are points of the complex projective space `CP(H)`, observables
//! are expectation-value functions `e_a` carrying Poisson, Jordan and star
//! products, and dynamics are Hamiltonian, gradient and GKLS vector fields.
//! Every geometric quantity has a plain matrix-mechanics counterpart in
//! [`operator`] that the tests compare against.
//!
//! Conventions used throughout:
//! - `ħ = 1`.
//! - Jordan product `a ∘ b = (ab + ba)/2`; Poisson bracket generator `[a, b]/(2i)`,
//!   so that `e_a ⋆ e_b = e_{a∘b} + i e_{[a,b]/(2i)} = e_{ab}`.
//! - Pullback Hermitian tensor `h̃(v, w) = ⟨v|w⟩ − ⟨v|ψ⟩⟨ψ|w⟩` (antilinear in
//!   the first slot), `g = Re h̃`, `ω = Im h̃`, and the complex structure acts
//!   on horizontal lifts as multiplication by `−i`, so that `g(v, Jw) = ω(v, w)`.
//! - Bipartite index order is A-major: `iA·dimB + iB`.

// Negated comparisons are used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod composition;
pub mod dynamics;
pub mod error;
pub mod measurement;
pub mod observables;
pub mod operator;
pub mod projective;
pub mod qubit;
pub mod random;
pub mod states;

pub use error::{Error, Result};
pub use operator::{
    commutator, eig_hermitian, jordan_product, partial_trace, pauli, tensor_product, CMatrix, CVector, DensityOperator,
    GeneralOperator, HermitianOperator, Operator, Spectrum, Subsystem,
};
pub use projective::{ProjectivePoint, TangentVector};
pub use states::QuantumState;
