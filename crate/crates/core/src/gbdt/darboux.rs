use crate::error::GbdtError;
use crate::gbdt::background::Coefficients;
use crate::gbdt::triple::GbdtState;
use crate::matcore::{inverse, CMatrix, C64, I};

/// Condition number beyond which `A − λI` counts as singular.
const MAX_RESOLVENT_CONDITION: f64 = 1e12;

fn resolvent(state: &GbdtState, lambda: C64) -> Result<CMatrix, GbdtError> {
    let pole = || GbdtError::Pole {
        re: lambda.re,
        im: lambda.im,
        xi: state.xi,
        eta: state.eta,
    };
    let inv = inverse(&state.a.shift(-lambda)).map_err(|_| pole())?;
    if inv.condition > MAX_RESOLVENT_CONDITION {
        return Err(pole());
    }
    Ok(inv.matrix)
}

/// `w_A(λ) = I − iJΠ*S⁻¹(A − λI)⁻¹Π`.
pub fn darboux_matrix(state: &GbdtState, j: &CMatrix, lambda: C64) -> Result<CMatrix, GbdtError> {
    let s_inv = state.s_inverse()?;
    let res = resolvent(state, lambda)?;
    let m = j.rows();
    let corr = &(&(&(j * &state.pi.adjoint()) * &s_inv) * &res) * &state.pi;
    Ok(&CMatrix::identity(m) - &corr.scale(I))
}

/// `(q̂, Q̂)` of the transformed system.
pub fn transformed_coefficients(
    state: &GbdtState,
    j: &CMatrix,
    bg: &dyn Coefficients,
) -> Result<(CMatrix, CMatrix), GbdtError> {
    let (xi, eta) = (state.xi, state.eta);
    let alpha = bg.alpha(xi, eta);
    if alpha.abs() <= 1e-12 {
        return Err(GbdtError::AlphaVanishes { xi, eta });
    }
    let s_inv = state.s_inverse()?;
    let m = j.rows();
    let ident = CMatrix::identity(m);
    let jps = &(j * &state.pi.adjoint()) * &s_inv;
    let one = |sign: f64, coef: CMatrix, log_deriv: f64| -> Result<CMatrix, GbdtError> {
        let inv = resolvent(state, C64::new(-sign, 0.0))?;
        let inv_adj = inv.adjoint();
        let left = &ident - &(&(&jps * &inv) * &state.pi).scale(I);
        let right = &ident + &(&(&(&(j * &state.pi.adjoint()) * &inv_adj) * &s_inv) * &state.pi).scale(I);
        let tail = &(&(&(&(&jps * &inv) * &state.s) * &inv_adj) * &s_inv) * &state.pi;
        Ok(&(&(&left * &coef) * &right) - &tail.scale(I * (2.0 * log_deriv)))
    };
    let q_hat = one(-1.0, bg.q(xi, eta), bg.alpha_xi(xi, eta) / alpha)?;
    let big_q_hat = one(1.0, bg.big_q(xi, eta), bg.alpha_eta(xi, eta) / alpha)?;
    Ok((q_hat, big_q_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::background::{j_matrix, skew_defect, Background, JSelector, Profile};
    use crate::gbdt::triple::GbdtTriple;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn state() -> (GbdtState, CMatrix) {
        let a = CMatrix::from_rows(&[&[c(0.3, 0.6), c(-0.2, 0.1)], &[c(0.0, 0.0), c(0.3, 0.6)]]).unwrap();
        let pi = CMatrix::from_rows(&[&[c(1.0, 0.2), c(0.2, 0.0)], &[c(0.3, 0.0), c(1.0, -0.4)]]).unwrap();
        let j = j_matrix(JSelector::OffDiag, 2).unwrap();
        let t = GbdtTriple::with_sylvester(a, pi, j.clone()).unwrap();
        (
            GbdtState::new(0.1, -0.2, t.a0().clone(), t.pi0().clone(), t.s0().clone(), &j),
            j,
        )
    }

    #[test]
    fn j_relation_on_the_real_line() {
        let (st, j) = state();
        for l in [-3.0, -0.5, 0.0, 0.8, 2.5] {
            let w = darboux_matrix(&st, &j, c(l, 0.0)).unwrap();
            assert!((&(&w.adjoint() * &j) * &w).rel_diff(&j) < 1e-9);
        }
        let l = c(0.4, 1.3);
        let w = darboux_matrix(&st, &j, l).unwrap();
        let wb = darboux_matrix(&st, &j, l.conj()).unwrap();
        assert!((&(&wb.adjoint() * &j) * &w).rel_diff(&j) < 1e-9);
    }

    #[test]
    fn large_lambda_tends_to_identity() {
        let (st, j) = state();
        let w = darboux_matrix(&st, &j, c(1e8, 0.0)).unwrap();
        assert!((&w - &CMatrix::identity(2)).frobenius_norm() <= 1e-6);
    }

    #[test]
    fn zero_pi_is_identity_and_leaves_coefficients() {
        let j = j_matrix(JSelector::OffDiag, 2).unwrap();
        let st = GbdtState::new(
            0.0,
            0.0,
            CMatrix::from_diag(&[c(0.2, 0.4)]),
            CMatrix::zeros(1, 2),
            CMatrix::scalar(c(1.0, 0.0)),
            &j,
        );
        assert_eq!(darboux_matrix(&st, &j, c(0.3, 0.0)).unwrap(), CMatrix::identity(2));
        let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let (qh, bqh) = transformed_coefficients(&st, &j, &bg).unwrap();
        assert!(qh.rel_diff(&bg.q(0.0, 0.0)) < 1e-15);
        assert!(bqh.rel_diff(&bg.big_q(0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn transformed_coefficients_are_skew() {
        let (st, j) = state();
        let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
        let (qh, bqh) = transformed_coefficients(&st, &j, &bg).unwrap();
        assert!(skew_defect(&qh, &j) <= 1e-9 * qh.frobenius_norm().max(1.0));
        assert!(skew_defect(&bqh, &j) <= 1e-9 * bqh.frobenius_norm().max(1.0));
    }

    #[test]
    fn pole_and_singular_s_are_flagged() {
        let (st, j) = state();
        assert!(matches!(
            darboux_matrix(&st, &j, st.a[(0, 0)]),
            Err(GbdtError::Pole { .. })
        ));
        let mut bad = st.clone();
        bad.s = CMatrix::zeros(2, 2);
        let err = darboux_matrix(&bad, &j, c(0.0, 0.0)).unwrap_err();
        assert!(alloc::format!("{err}").contains("outside points of invertibility of S"));
    }
}
