//! Triples, the spectral function, propagation of `A`, `Π`, `S`, the Darboux
//! matrix and the transformed coefficients.

mod background;
mod darboux;
mod explicit;
mod fundamental;
mod propagate;
mod source;
mod spectral;
mod triple;

pub use background::{j_matrix, skew_defect, small_j, Background, Coefficients, JSelector, Profile, Seed, SeedField};
pub use darboux::{darboux_matrix, transformed_coefficients};
pub use explicit::{
    explicit_a, explicit_anchor, explicit_parts, explicit_pi, explicit_pi_jordan2, s_recursion_jordan2, ExplicitParts,
    RootBranches,
};
pub use fundamental::{fundamental_solution, lax_pair};
pub use propagate::{
    flows, propagate, propagate_from, propagate_pi, propagate_s, AField, Components, Flows, Propagated, RICHARDSON_TOL,
};
pub use source::{ClosedFormSource, PropagatedSource, StateSource};
pub use spectral::{lambda_flow, lambda_of, spectral_point, SignPair, SpectralPoint, PRINCIPAL};
pub use triple::{
    identity_defect, solve_s_identity, validate_j, GbdtState, GbdtTriple, StateDiagnostics, MAX_SHIFT_CONDITION,
    MAX_S_CONDITION, TRIPLE_IDENTITY_TOL,
};
