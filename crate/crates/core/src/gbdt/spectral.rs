use crate::error::GbdtError;
use crate::gbdt::background::Coefficients;
use crate::matcore::{signed_sqrt, C64};

/// Sign choices for `(√(z − 2h), √(z + 2f))` relative to the principal root.
pub type SignPair = (i8, i8);

pub const PRINCIPAL: SignPair = (1, 1);

/// A hidden spectral parameter together with the `λ` it produces at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub z: C64,
    pub lambda: C64,
}

fn near_cut(w: C64) -> bool {
    w.re <= 0.0 && w.im.abs() <= 1e-12 * w.norm().max(1.0)
}

/// `λ = (√(z−2h) − √(z+2f)) / (√(z−2h) + √(z+2f))`.
///
/// Fails when either radicand sits on the principal cut (the closed negative
/// real axis, which includes the branch point) or the denominator vanishes.
pub fn lambda_of(z: C64, xi: f64, eta: f64, bg: &dyn Coefficients, branch: SignPair) -> Result<C64, GbdtError> {
    let wh = z - 2.0 * bg.h(eta);
    let wf = z + 2.0 * bg.f(xi);
    if near_cut(wh) || near_cut(wf) {
        return Err(GbdtError::BranchCut { xi, eta });
    }
    let rh = signed_sqrt(wh, branch.0);
    let rf = signed_sqrt(wf, branch.1);
    let den = rh + rf;
    if den.norm() <= 1e-14 * (rh.norm() + rf.norm()).max(1.0) {
        return Err(GbdtError::ZeroDenominator { xi, eta });
    }
    Ok((rh - rf) / den)
}

pub fn spectral_point(
    z: C64,
    xi: f64,
    eta: f64,
    bg: &dyn Coefficients,
    branch: SignPair,
) -> Result<SpectralPoint, GbdtError> {
    Ok(SpectralPoint {
        z,
        lambda: lambda_of(z, xi, eta, bg, branch)?,
    })
}

/// Right-hand sides `(λ_ξ, λ_η)` of the non-isospectral flow of `λ`.
pub fn lambda_flow(lambda: C64, xi: f64, eta: f64, bg: &dyn Coefficients) -> (C64, C64) {
    let a = bg.alpha(xi, eta);
    let one = C64::new(1.0, 0.0);
    let lx = -lambda * (lambda + one) / (lambda - one) * (bg.alpha_xi(xi, eta) / a);
    let le = -lambda * (lambda - one) / (lambda + one) * (bg.alpha_eta(xi, eta) / a);
    (lx, le)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::background::{Background, Profile};

    fn example() -> Background {
        Background::exp_diag(Profile::affine(0.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap()
    }

    #[test]
    fn vanishes_on_the_diagonal() {
        let l = lambda_of(C64::new(3.0, 1.0), 0.2, 0.2, &example(), PRINCIPAL).unwrap();
        assert!(l.norm() < 1e-16);
    }

    #[test]
    fn decays_at_large_z() {
        let l = lambda_of(C64::new(1e8, 0.0), 0.25, -0.1, &example(), PRINCIPAL).unwrap();
        assert!(l.norm() <= 1e-7);
    }

    #[test]
    fn matches_scalar_a_at_z_equal_c() {
        let (c, xi, eta) = (2.0f64, 0.1, 0.2);
        let l = lambda_of(C64::new(c, 0.0), xi, eta, &example(), PRINCIPAL).unwrap();
        let (omega, nu) = ((c - 2.0 * eta).sqrt(), (c - 2.0 * xi).sqrt());
        assert!((l - C64::new((omega - nu) / (omega + nu), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn satisfies_its_flow() {
        let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let z = C64::new(0.7, 2.1);
        let (x, y, d) = (0.13, -0.21, 1e-5);
        let l = |x, y| lambda_of(z, x, y, &bg, PRINCIPAL).unwrap();
        let (fx, fe) = lambda_flow(l(x, y), x, y, &bg);
        let dx = (l(x + d, y) - l(x - d, y)) / (2.0 * d);
        let de = (l(x, y + d) - l(x, y - d)) / (2.0 * d);
        assert!((dx - fx).norm() < 1e-8);
        assert!((de - fe).norm() < 1e-8);
    }

    #[test]
    fn flags_cut_and_zero_denominator() {
        let bg = example();
        // z − 2h = −1 lies on the cut.
        assert!(matches!(
            lambda_of(C64::new(0.0, 0.0), 0.0, 0.5, &bg, PRINCIPAL),
            Err(GbdtError::BranchCut { .. })
        ));
        // Opposite signs with equal radicands cancel in the denominator.
        assert!(matches!(
            lambda_of(C64::new(1.0, 1.0), 0.0, 0.0, &bg, (1, -1)),
            Err(GbdtError::ZeroDenominator { .. })
        ));
    }
}
