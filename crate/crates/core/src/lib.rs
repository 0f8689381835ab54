//! Explicit solutions of the σ-model, gravitational (Einstein) and Ernst-type
//! integrable equations via the GBDT version of the Bäcklund–Darboux
//! transformation, together with the residual oracles that verify them.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and
//! parallel grid evaluation live in the companion `darboux` crate.
//!
//! Layout:
//! - [`matcore`]: dense complex matrices, inverses, Sylvester solves, `exp`.
//! - [`branchsqrt`]: commuting square roots ℛ(μ) of shifted Jordan matrices.
//! - [`gbdt`]: triples, the spectral function λ, propagation of `A`, `Π`, `S`,
//!   the Darboux matrix and the transformed coefficients.
//! - [`sigma_grav`]: transformed σ-model and gravitational solutions.
//! - [`ernst`]: the Ernst-type system and its Darboux matrix.
//! - [`verify`]: finite-difference and algebraic residual checks.
#![cfg_attr(not(test), no_std)]
// `!(x > y)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod branchsqrt;
pub mod ernst;
pub mod field;
pub mod gbdt;
pub mod matcore;
pub mod ode;
pub mod sigma_grav;
pub mod verify;

mod error;

pub use error::GbdtError;
pub use field::{FieldGrid, Grid, MatrixField, PointStatus};
pub use matcore::{CMatrix, MatError, C64};

/// Library version, echoed into export provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
