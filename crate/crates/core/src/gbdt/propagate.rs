//! Integration of the `A`, `Π`, `S` flows along paths.

use alloc::vec;
use alloc::vec::Vec;

use crate::branchsqrt::JordanSpec;
use crate::error::GbdtError;
use crate::gbdt::background::Coefficients;
use crate::gbdt::explicit::{explicit_a, RootBranches};
use crate::gbdt::triple::{GbdtState, GbdtTriple, MAX_SHIFT_CONDITION};
use crate::matcore::{inverse, CMatrix, C64, I};
use crate::ode::{rk4_path_checked, PathSpec};

/// Default Richardson tolerance for path integration.
pub const RICHARDSON_TOL: f64 = 1e-8;

/// Where `A(ξ, η)` comes from.
#[derive(Clone, Debug)]
pub enum AField {
    /// Integrate the `A` flow from the triple's anchor.
    Integrated,
    /// Evaluate the closed form generated by a Jordan matrix.
    Explicit {
        generator: JordanSpec,
        branches: RootBranches,
    },
}

/// Which unknowns to carry along the path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Components {
    /// `Π` only (and `A` when integrated); `S` stays at its start value.
    Pi,
    PiAndS,
}

/// The result of a propagation with its Richardson estimate.
#[derive(Clone, Debug)]
pub struct Propagated {
    pub state: GbdtState,
    pub richardson: f64,
}

fn shifted_inverse(a: &CMatrix, sign: f64, which: &'static str, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
    let shifted = a.shift(C64::new(sign, 0.0));
    let err = |condition| GbdtError::SingularShift {
        which,
        xi,
        eta,
        condition,
    };
    let inv = inverse(&shifted).map_err(|_| err(f64::INFINITY))?;
    if inv.condition > MAX_SHIFT_CONDITION {
        return Err(err(inv.condition));
    }
    Ok(inv.matrix)
}

/// `(αξ/α, αη/α)`, failing where `α` vanishes.
fn log_alpha_derivatives(bg: &dyn Coefficients, xi: f64, eta: f64) -> Result<(f64, f64), GbdtError> {
    let alpha = bg.alpha(xi, eta);
    if alpha.abs() <= 1e-12 {
        return Err(GbdtError::AlphaVanishes { xi, eta });
    }
    Ok((bg.alpha_xi(xi, eta) / alpha, bg.alpha_eta(xi, eta) / alpha))
}

/// Right-hand sides of all flows at one point.
pub struct Flows {
    pub a_xi: CMatrix,
    pub a_eta: CMatrix,
    pub pi_xi: CMatrix,
    pub pi_eta: CMatrix,
    pub s_xi: CMatrix,
    pub s_eta: CMatrix,
}

/// Evaluates every flow at `(ξ, η)` for given `A`, `Π`, `S`.
pub fn flows(
    xi: f64,
    eta: f64,
    a: &CMatrix,
    pi: &CMatrix,
    s: &CMatrix,
    j: &CMatrix,
    bg: &dyn Coefficients,
) -> Result<Flows, GbdtError> {
    let (lx, le) = log_alpha_derivatives(bg, xi, eta)?;
    let n = a.rows();
    let ami = shifted_inverse(a, -1.0, "A − I", xi, eta)?;
    let api = shifted_inverse(a, 1.0, "A + I", xi, eta)?;
    let ident = CMatrix::identity(n);
    let a_xi = (&(a + &ident.scale_real(2.0)) + &ami.scale_real(2.0)).scale_real(-lx);
    let a_eta = (&(a - &ident.scale_real(2.0)) + &api.scale_real(2.0)).scale_real(-le);
    let (q, bq) = (bg.q(xi, eta), bg.big_q(xi, eta));
    let pi_xi = &(&ami * pi) * &q;
    let pi_eta = &(&api * pi) * &bq;
    let s_flow = |inv: &CMatrix, coef: &CMatrix, l: f64| -> CMatrix {
        let inv_adj = inv.adjoint();
        let hom = (s - &(&(inv * s) * &inv_adj).scale_real(2.0)).scale_real(l);
        let src = (&(&(&(&(inv * pi) * coef) * j) * &pi.adjoint()) * &inv_adj).scale(I);
        &hom - &src
    };
    let s_xi = s_flow(&ami, &q, lx);
    let s_eta = s_flow(&api, &bq, le);
    Ok(Flows {
        a_xi,
        a_eta,
        pi_xi,
        pi_eta,
        s_xi,
        s_eta,
    })
}

/// `Π`-only right-hand side; needs no `α`.
fn pi_flow(
    xi: f64,
    eta: f64,
    a: &CMatrix,
    pi: &CMatrix,
    bg: &dyn Coefficients,
) -> Result<(CMatrix, CMatrix), GbdtError> {
    let ami = shifted_inverse(a, -1.0, "A − I", xi, eta)?;
    let api = shifted_inverse(a, 1.0, "A + I", xi, eta)?;
    Ok((&(&ami * pi) * &bg.q(xi, eta), &(&api * pi) * &bg.big_q(xi, eta)))
}

/// Propagates from `start` along `path`, which must begin at the start point.
pub fn propagate_from(
    start: &GbdtState,
    j: &CMatrix,
    bg: &dyn Coefficients,
    a_field: &AField,
    components: Components,
    path: &PathSpec,
    tolerance: f64,
) -> Result<Propagated, GbdtError> {
    if path.start() != (start.xi, start.eta) {
        return Err(GbdtError::Precondition("path must start at the state's point".into()));
    }
    let integrate_a = matches!(a_field, AField::Integrated);
    let with_s = components == Components::PiAndS;
    let mut init = vec![start.pi.clone()];
    if with_s {
        init.push(start.s.clone());
    }
    if integrate_a {
        init.push(start.a.clone());
    }
    let a_at = |x: f64, y: f64, state: &[CMatrix]| -> Result<CMatrix, GbdtError> {
        match a_field {
            AField::Integrated => Ok(state[state.len() - 1].clone()),
            AField::Explicit { generator, branches } => explicit_a(x, y, generator, bg, branches),
        }
    };
    let mut rhs = |x: f64, y: f64, dx: f64, dy: f64, state: &[CMatrix]| -> Result<Vec<CMatrix>, GbdtError> {
        let a = a_at(x, y, state)?;
        let mut out = Vec::with_capacity(state.len());
        if with_s || integrate_a {
            let fl = flows(x, y, &a, &state[0], if with_s { &state[1] } else { &start.s }, j, bg)?;
            out.push(&fl.pi_xi.scale_real(dx) + &fl.pi_eta.scale_real(dy));
            if with_s {
                out.push(&fl.s_xi.scale_real(dx) + &fl.s_eta.scale_real(dy));
            }
            if integrate_a {
                out.push(&fl.a_xi.scale_real(dx) + &fl.a_eta.scale_real(dy));
            }
        } else {
            let (px, py) = pi_flow(x, y, &a, &state[0], bg)?;
            out.push(&px.scale_real(dx) + &py.scale_real(dy));
        }
        Ok(out)
    };
    let checked = rk4_path_checked(path, init, tolerance, &mut rhs)?;
    let (xe, ye) = path.end();
    let mut it = checked.state.into_iter();
    let pi = it.next().expect("Π");
    let s = if with_s { it.next().expect("S") } else { start.s.clone() };
    let a = if integrate_a {
        it.next().expect("A")
    } else {
        a_at(xe, ye, &[])?
    };
    Ok(Propagated {
        state: GbdtState::new(xe, ye, a, pi, s, j),
        richardson: checked.richardson,
    })
}

fn check_anchor(
    triple: &GbdtTriple,
    bg: &dyn Coefficients,
    a_field: &AField,
    path: &PathSpec,
) -> Result<(), GbdtError> {
    if path.start() != (0.0, 0.0) {
        return Err(GbdtError::Precondition("paths from the triple start at (0, 0)".into()));
    }
    if bg.m() != triple.m() {
        return Err(GbdtError::Precondition("background and triple disagree on m".into()));
    }
    if let AField::Explicit { generator, branches } = a_field {
        let a0 = explicit_a(0.0, 0.0, generator, bg, branches)?;
        if a0.rel_diff(triple.a0()) > 1e-10 {
            return Err(GbdtError::Precondition(
                "the triple's A(0,0) differs from the explicit field at the origin".into(),
            ));
        }
    }
    Ok(())
}

/// Propagates `A`, `Π` and `S` from the triple's anchor.
pub fn propagate(
    triple: &GbdtTriple,
    bg: &dyn Coefficients,
    a_field: &AField,
    path: &PathSpec,
) -> Result<Propagated, GbdtError> {
    check_anchor(triple, bg, a_field, path)?;
    propagate_from(
        &GbdtState::anchor(triple),
        triple.j(),
        bg,
        a_field,
        Components::PiAndS,
        path,
        RICHARDSON_TOL,
    )
}

/// `Π` at the end of `path`.
pub fn propagate_pi(
    triple: &GbdtTriple,
    bg: &dyn Coefficients,
    a_field: &AField,
    path: &PathSpec,
) -> Result<CMatrix, GbdtError> {
    check_anchor(triple, bg, a_field, path)?;
    let out = propagate_from(
        &GbdtState::anchor(triple),
        triple.j(),
        bg,
        a_field,
        Components::Pi,
        path,
        RICHARDSON_TOL,
    )?;
    Ok(out.state.pi)
}

/// `S` at the end of `path`.
pub fn propagate_s(
    triple: &GbdtTriple,
    bg: &dyn Coefficients,
    a_field: &AField,
    path: &PathSpec,
) -> Result<CMatrix, GbdtError> {
    Ok(propagate(triple, bg, a_field, path)?.state.s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::background::{j_matrix, Background, JSelector, Profile};
    use crate::gbdt::explicit::{explicit_anchor, explicit_pi};
    use crate::gbdt::triple::solve_s_identity;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    struct Setup {
        bg: Background,
        triple: GbdtTriple,
        field: AField,
        spec: JordanSpec,
        br: RootBranches,
    }

    fn setup() -> Setup {
        let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let spec = JordanSpec::single_block(c(-2.0, 2.0), 2).unwrap();
        let br = RootBranches::principal(1);
        let a0 = explicit_anchor(&spec, &bg, &br).unwrap();
        let pi0 = CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.2, 0.0)], &[c(0.3, 0.0), c(1.0, 0.0)]]).unwrap();
        let triple = GbdtTriple::with_sylvester(a0, pi0, j_matrix(JSelector::OffDiag, 2).unwrap()).unwrap();
        let field = AField::Explicit {
            generator: spec.clone(),
            branches: br.clone(),
        };
        Setup {
            bg,
            triple,
            field,
            spec,
            br,
        }
    }

    #[test]
    fn integrated_a_matches_explicit() {
        let s = setup();
        let path = PathSpec::l_path((0.25, -0.2), 0.01).unwrap();
        let out = propagate(&s.triple, &s.bg, &AField::Integrated, &path).unwrap();
        let want = explicit_a(0.25, -0.2, &s.spec, &s.bg, &s.br).unwrap();
        assert!(out.state.a.rel_diff(&want) < 1e-7);
    }

    #[test]
    fn pi_and_s_match_closed_forms() {
        let s = setup();
        let target = (-0.22, 0.27);
        let path = PathSpec::l_path(target, 0.01).unwrap();
        let out = propagate(&s.triple, &s.bg, &s.field, &path).unwrap();
        let pi = explicit_pi(target.0, target.1, &s.spec, &s.bg, &s.br, s.triple.pi0()).unwrap();
        assert!(out.state.pi.rel_diff(&pi) < 1e-8);
        let sy = solve_s_identity(&out.state.a, &out.state.pi, s.triple.j()).unwrap();
        assert!(out.state.s.rel_diff(&sy) < 1e-7);
        assert!(out.state.diagnostics.identity_residual < 1e-8);
        assert!(out.state.diagnostics.hermitian_defect < 1e-9);
    }

    #[test]
    fn zero_coefficients_keep_pi() {
        let bg = Background::exp_diag(Profile::affine(1.0, 0.0), Profile::affine(0.5, 0.0), 1).unwrap();
        let a0 = CMatrix::from_diag(&[c(0.3, 0.5), c(-0.2, 0.1)]);
        let pi0 = CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.5, 0.0)], &[c(0.0, 1.0), c(1.0, 0.0)]]).unwrap();
        let triple = GbdtTriple::with_sylvester(a0, pi0.clone(), j_matrix(JSelector::OffDiag, 2).unwrap()).unwrap();
        let path = PathSpec::staircase((0.3, 0.2), 3, 0.05).unwrap();
        let pi = propagate_pi(&triple, &bg, &AField::Integrated, &path).unwrap();
        assert!(pi.rel_diff(&pi0) < 1e-15);
    }

    #[test]
    fn alpha_zero_is_reported_with_location() {
        let bg = Background::exp_diag(Profile::affine(0.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let a0 = CMatrix::from_diag(&[c(0.3, 0.5)]);
        let pi0 = CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.5, 0.0)]]).unwrap();
        let triple = GbdtTriple::with_sylvester(a0, pi0, j_matrix(JSelector::OffDiag, 2).unwrap()).unwrap();
        let path = PathSpec::l_path((0.1, 0.1), 0.01).unwrap();
        let err = propagate(&triple, &bg, &AField::Integrated, &path).unwrap_err();
        assert!(matches!(err.root_cause(), GbdtError::AlphaVanishes { .. }));
        assert!(alloc::format!("{err}").contains("alpha vanishes on path"));
    }

    #[test]
    fn mismatched_anchor_is_rejected() {
        let s = setup();
        let other = GbdtTriple::with_sylvester(
            CMatrix::from_diag(&[c(0.1, 0.4), c(0.2, 0.3)]),
            s.triple.pi0().clone(),
            s.triple.j().clone(),
        )
        .unwrap();
        let path = PathSpec::l_path((0.1, 0.1), 0.01).unwrap();
        assert!(propagate(&other, &s.bg, &s.field, &path).is_err());
    }
}
