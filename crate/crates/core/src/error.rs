use alloc::boxed::Box;
use alloc::string::String;

use crate::matcore::MatError;

/// Errors raised by the GBDT constructions.
///
/// Point-local failures (a singular `S`, `α = 0`, a branch cut) carry the
/// coordinates so grid drivers can flag the point instead of aborting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GbdtError {
    #[error(transparent)]
    Mat(#[from] MatError),

    #[error("eigenvalue on shift locus: λ − μ = 0 for λ = {re}{im:+}i")]
    EigenvalueOnShift { re: f64, im: f64 },

    #[error("square root argument on the branch cut at (ξ, η) = ({xi}, {eta})")]
    BranchCut { xi: f64, eta: f64 },

    #[error("zero denominator in λ at (ξ, η) = ({xi}, {eta})")]
    ZeroDenominator { xi: f64, eta: f64 },

    #[error("ℛ(2h) + ℛ(−2f) is not invertible at (ξ, η) = ({xi}, {eta})")]
    RootSumSingular { xi: f64, eta: f64 },

    #[error("{which} is singular at (ξ, η) = ({xi}, {eta}) (condition {condition:e})")]
    SingularShift {
        which: &'static str,
        xi: f64,
        eta: f64,
        condition: f64,
    },

    #[error("alpha vanishes on path at (ξ, η) = ({xi}, {eta})")]
    AlphaVanishes { xi: f64, eta: f64 },

    #[error("outside points of invertibility of S at (ξ, η) = ({xi}, {eta}) (condition {condition:e})")]
    SingularS { xi: f64, eta: f64, condition: f64 },

    #[error("A is singular at (ξ, η) = ({xi}, {eta})")]
    SingularA { xi: f64, eta: f64 },

    #[error("λ = {re}{im:+}i is a pole: it lies in σ(A) at (ξ, η) = ({xi}, {eta})")]
    Pole { re: f64, im: f64, xi: f64, eta: f64 },

    #[error("λ hits ±1 at (ξ, η) = ({xi}, {eta})")]
    LambdaPole { xi: f64, eta: f64 },

    #[error("ξ + η = {s} collides with σ(𝒜)")]
    SpectralCollision { s: f64 },

    #[error("S is not uniquely determined by the identity (resonant Sylvester) at (ξ, η) = ({xi}, {eta})")]
    Resonant { xi: f64, eta: f64 },

    #[error("failure at arc length {arc_length} along the path: {cause}")]
    OnPath { arc_length: f64, cause: Box<GbdtError> },

    #[error("Richardson half-step disagreement {estimate:e} exceeds {tolerance:e}")]
    Richardson { estimate: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("d = {d} is not positive")]
    NonPositiveD { d: f64 },

    #[error("nonpositive determinant {det} at (ξ, η) = ({xi}, {eta})")]
    NonPositiveDet { det: f64, xi: f64, eta: f64 },

    #[error("Hamiltonian is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    IndefiniteHamiltonian { min_eigenvalue: f64 },

    #[error("Hamiltonian pair violates the Ernst-type system (residual {residual:e})")]
    ErnstResidual { residual: f64 },

    #[error("imaginary leakage {imag:e} in a real solution at (ξ, η) = ({xi}, {eta})")]
    ComplexLeakage { imag: f64, xi: f64, eta: f64 },

    #[error("grid too coarse for the finite-difference stencil: {0}")]
    GridTooCoarse(String),
}

impl GbdtError {
    /// Strips path wrappers down to the point-local cause.
    pub fn root_cause(&self) -> &GbdtError {
        match self {
            GbdtError::OnPath { cause, .. } => cause.root_cause(),
            other => other,
        }
    }
}
