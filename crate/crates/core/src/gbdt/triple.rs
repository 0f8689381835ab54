use alloc::format;

use crate::error::GbdtError;
use crate::matcore::{inverse, solve_sylvester, CMatrix, C64, I};

/// Tolerance on the triple identity at the anchor, relative to `max(1, ‖S₀‖_F)`.
pub const TRIPLE_IDENTITY_TOL: f64 = 1e-10;
/// Tolerance on `J² = I` and `J = J*`.
pub const J_TOL: f64 = 1e-12;
/// Largest admissible condition number of `S` before a point counts as outside
/// the invertibility set of `S`.
pub const MAX_S_CONDITION: f64 = 1e8;
/// Largest admissible condition number of `A ∓ I` along a path.
pub const MAX_SHIFT_CONDITION: f64 = 1e8;

/// `‖AS − SA* − iΠJΠ*‖_F`.
pub fn identity_defect(a: &CMatrix, s: &CMatrix, pi: &CMatrix, j: &CMatrix) -> f64 {
    let lhs = &(a * s) - &(s * &a.adjoint());
    let rhs = (&(pi * j) * &pi.adjoint()).scale(I);
    (&lhs - &rhs).frobenius_norm()
}

/// Checks `J = J* = J⁻¹`.
pub fn validate_j(j: &CMatrix) -> Result<(), GbdtError> {
    if !j.is_square() {
        return Err(GbdtError::Precondition("J must be square".into()));
    }
    let sq = (&(j * j) - &CMatrix::identity(j.rows())).frobenius_norm();
    let herm = j.hermitian_defect();
    if sq > J_TOL || herm > J_TOL {
        return Err(GbdtError::Precondition(format!(
            "J must satisfy J = J* = J⁻¹ (‖J²−I‖ = {sq:e}, ‖J−J*‖ = {herm:e})"
        )));
    }
    Ok(())
}

/// `{A(0,0), S(0,0), Π(0,0)}` with `J`, tied by the triple identity.
///
/// `a0` is the value of the `A`-field at the anchor. For explicit fields it is
/// what [`explicit_anchor`](crate::gbdt::explicit_anchor) reports, not the
/// generator under the square roots.
#[derive(Clone, Debug, PartialEq)]
pub struct GbdtTriple {
    a0: CMatrix,
    s0: CMatrix,
    pi0: CMatrix,
    j: CMatrix,
}

impl GbdtTriple {
    pub fn new(a0: CMatrix, s0: CMatrix, pi0: CMatrix, j: CMatrix) -> Result<Self, GbdtError> {
        let n = a0.rows();
        if !a0.is_square() || s0.shape() != (n, n) || pi0.rows() != n || j.shape() != (pi0.cols(), pi0.cols()) {
            return Err(GbdtError::Precondition(format!(
                "triple shapes disagree: A {:?}, S {:?}, Π {:?}, J {:?}",
                a0.shape(),
                s0.shape(),
                pi0.shape(),
                j.shape()
            )));
        }
        validate_j(&j)?;
        let scale = s0.frobenius_norm().max(1.0);
        if s0.hermitian_defect() > TRIPLE_IDENTITY_TOL * scale {
            return Err(GbdtError::Precondition("S(0,0) must be Hermitian".into()));
        }
        let defect = identity_defect(&a0, &s0, &pi0, &j);
        if defect > TRIPLE_IDENTITY_TOL * scale {
            return Err(GbdtError::Precondition(format!(
                "triple identity fails at the anchor (residual {:e})",
                defect / scale
            )));
        }
        Ok(Self { a0, s0, pi0, j })
    }

    /// Builds `S(0,0)` from the identity by a Sylvester solve.
    pub fn with_sylvester(a0: CMatrix, pi0: CMatrix, j: CMatrix) -> Result<Self, GbdtError> {
        let s0 = solve_s_identity(&a0, &pi0, &j)?;
        Self::new(a0, s0, pi0, j)
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }
    pub fn s0(&self) -> &CMatrix {
        &self.s0
    }
    pub fn pi0(&self) -> &CMatrix {
        &self.pi0
    }
    pub fn j(&self) -> &CMatrix {
        &self.j
    }
    pub fn n(&self) -> usize {
        self.a0.rows()
    }
    pub fn m(&self) -> usize {
        self.j.rows()
    }

    /// Relative identity residual at the anchor.
    pub fn identity_residual(&self) -> f64 {
        identity_defect(&self.a0, &self.s0, &self.pi0, &self.j) / self.s0.frobenius_norm().max(1.0)
    }
}

/// Solves `AS − SA* = iΠJΠ*` for `S`.
pub fn solve_s_identity(a: &CMatrix, pi: &CMatrix, j: &CMatrix) -> Result<CMatrix, GbdtError> {
    let k = (&(pi * j) * &pi.adjoint()).scale(I);
    Ok(solve_sylvester(a, &a.adjoint(), &k)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    /// `‖AS − SA* − iΠJΠ*‖_F / max(1, ‖S‖_F)`
    pub identity_residual: f64,
    pub hermitian_defect: f64,
    /// `∞` when singular.
    pub s_condition: f64,
    pub a_minus_condition: f64,
    pub a_plus_condition: f64,
}

/// `A`, `Π`, `S` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct GbdtState {
    pub xi: f64,
    pub eta: f64,
    pub a: CMatrix,
    pub pi: CMatrix,
    pub s: CMatrix,
    pub diagnostics: StateDiagnostics,
}

fn condition_or_inf(m: &CMatrix) -> f64 {
    inverse(m).map(|i| i.condition).unwrap_or(f64::INFINITY)
}

impl GbdtState {
    pub fn new(xi: f64, eta: f64, a: CMatrix, pi: CMatrix, s: CMatrix, j: &CMatrix) -> Self {
        let scale = s.frobenius_norm().max(1.0);
        let diagnostics = StateDiagnostics {
            identity_residual: identity_defect(&a, &s, &pi, j) / scale,
            hermitian_defect: s.hermitian_defect() / scale,
            s_condition: condition_or_inf(&s),
            a_minus_condition: condition_or_inf(&a.shift(C64::new(-1.0, 0.0))),
            a_plus_condition: condition_or_inf(&a.shift(C64::new(1.0, 0.0))),
        };
        Self {
            xi,
            eta,
            a,
            pi,
            s,
            diagnostics,
        }
    }

    pub fn anchor(triple: &GbdtTriple) -> Self {
        Self::new(
            0.0,
            0.0,
            triple.a0.clone(),
            triple.pi0.clone(),
            triple.s0.clone(),
            &triple.j,
        )
    }

    /// `S⁻¹`, refusing points where `S` is too ill-conditioned.
    pub fn s_inverse(&self) -> Result<CMatrix, GbdtError> {
        let singular = |condition| GbdtError::SingularS {
            xi: self.xi,
            eta: self.eta,
            condition,
        };
        let inv = inverse(&self.s).map_err(|_| singular(f64::INFINITY))?;
        if inv.condition > MAX_S_CONDITION {
            return Err(singular(inv.condition));
        }
        Ok(inv.matrix)
    }
}
