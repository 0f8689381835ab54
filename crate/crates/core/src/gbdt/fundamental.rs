use alloc::vec;
use alloc::vec::Vec;

use crate::error::GbdtError;
use crate::gbdt::background::Coefficients;
use crate::gbdt::darboux::transformed_coefficients;
use crate::gbdt::propagate::RICHARDSON_TOL;
use crate::gbdt::source::StateSource;
use crate::gbdt::spectral::{lambda_of, SignPair};
use crate::matcore::{CMatrix, C64};
use crate::ode::{rk4_path_checked, Checked, PathSpec};

/// `G = −q/(λ − 1)` and `F = −Q/(λ + 1)`.
pub fn lax_pair(q: &CMatrix, big_q: &CMatrix, lambda: C64, xi: f64, eta: f64) -> Result<(CMatrix, CMatrix), GbdtError> {
    let one = C64::new(1.0, 0.0);
    if (lambda - one).norm() <= 1e-12 || (lambda + one).norm() <= 1e-12 {
        return Err(GbdtError::LambdaPole { xi, eta });
    }
    Ok((q.scale(-one / (lambda - one)), big_q.scale(-one / (lambda + one))))
}

/// Integrates `w_ξ = Gw`, `w_η = Fw` from `w(start) = I` with `λ` following
/// the point along the path. With `transformed` the coefficients are the
/// transformed `(q̂, Q̂)` built from that source's states.
pub fn fundamental_solution(
    bg: &dyn Coefficients,
    z: C64,
    branch: SignPair,
    path: &PathSpec,
    transformed: Option<&dyn StateSource>,
) -> Result<Checked, GbdtError> {
    let m = bg.m();
    let mut rhs = |x: f64, y: f64, dx: f64, dy: f64, st: &[CMatrix]| -> Result<Vec<CMatrix>, GbdtError> {
        let lambda = lambda_of(z, x, y, bg, branch)?;
        let (q, bq) = match transformed {
            Some(src) => transformed_coefficients(&src.state(x, y)?, src.j(), bg)?,
            None => (bg.q(x, y), bg.big_q(x, y)),
        };
        let (g, f) = lax_pair(&q, &bq, lambda, x, y)?;
        let gen = &g.scale_real(dx) + &f.scale_real(dy);
        Ok(vec![&gen * &st[0]])
    };
    rk4_path_checked(path, vec![CMatrix::identity(m)], RICHARDSON_TOL, &mut rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::background::{Background, Profile};
    use crate::gbdt::spectral::PRINCIPAL;

    #[test]
    fn constant_background_gives_identity() {
        let bg = Background::exp_diag(Profile::affine(2.0, 0.0), Profile::affine(1.0, 0.0), 1).unwrap();
        let path = PathSpec::l_path((0.2, 0.3), 0.05).unwrap();
        let w = fundamental_solution(&bg, C64::new(4.0, 1.0), PRINCIPAL, &path, None).unwrap();
        assert!(w.state[0].rel_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_seed_has_closed_form_determinant() {
        // tr G = tr F = 0 for the exp-diag seed, so det w stays 1.
        let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let path = PathSpec::staircase((0.25, -0.2), 3, 0.01).unwrap();
        let w = fundamental_solution(&bg, C64::new(4.0, 3.0), PRINCIPAL, &path, None).unwrap();
        let det = w.state[0].determinant().unwrap();
        assert!((det - C64::new(1.0, 0.0)).norm() < 1e-10);
    }
}
