//! Closed-form `A`, `Π` and `S` for the exp-diag seed.

use num_traits::Zero;

use crate::branchsqrt::{shifted_sqrt, BranchChoice, JordanSpec};
use crate::error::GbdtError;
use crate::gbdt::background::Coefficients;
use crate::matcore::{inverse, matrix_exp, signed_sqrt, CMatrix, C64, I};

/// Branches for the two roots `ℛ(2h)` and `ℛ(−2f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBranches {
    pub h_root: BranchChoice,
    pub f_root: BranchChoice,
}

impl RootBranches {
    pub fn principal(blocks: usize) -> Self {
        Self {
            h_root: BranchChoice::principal(blocks),
            f_root: BranchChoice::principal(blocks),
        }
    }
}

/// `ℛ(2h(η))`, `ℛ(−2f(ξ))` and `A = (ℛ_h − ℛ_f)(ℛ_h + ℛ_f)⁻¹`.
#[derive(Clone, Debug)]
pub struct ExplicitParts {
    pub r_h: CMatrix,
    pub r_f: CMatrix,
    pub a: CMatrix,
}

pub fn explicit_parts(
    xi: f64,
    eta: f64,
    spec: &JordanSpec,
    bg: &dyn Coefficients,
    branches: &RootBranches,
) -> Result<ExplicitParts, GbdtError> {
    let r_h = shifted_sqrt(spec, C64::new(2.0 * bg.h(eta), 0.0), &branches.h_root)?;
    let r_f = shifted_sqrt(spec, C64::new(-2.0 * bg.f(xi), 0.0), &branches.f_root)?;
    let sum = &r_h + &r_f;
    let inv = inverse(&sum).map_err(|_| GbdtError::RootSumSingular { xi, eta })?;
    if inv.condition > 1e12 {
        return Err(GbdtError::RootSumSingular { xi, eta });
    }
    let a = &(&r_h - &r_f) * &inv.matrix;
    Ok(ExplicitParts { r_h, r_f, a })
}

/// The explicit `A(ξ, η)` generated by `spec`.
pub fn explicit_a(
    xi: f64,
    eta: f64,
    spec: &JordanSpec,
    bg: &dyn Coefficients,
    branches: &RootBranches,
) -> Result<CMatrix, GbdtError> {
    Ok(explicit_parts(xi, eta, spec, bg, branches)?.a)
}

/// `A(0,0)` of the explicit field. The triple identity has to be built
/// against this matrix, which in general differs from the generator.
pub fn explicit_anchor(
    spec: &JordanSpec,
    bg: &dyn Coefficients,
    branches: &RootBranches,
) -> Result<CMatrix, GbdtError> {
    explicit_a(0.0, 0.0, spec, bg, branches)
}

/// `Φ = (ℛ(2h) + ℛ(−2f))² / 4`; it satisfies `Φ_ξ = −f′(A − I)⁻¹` and
/// `Φ_η = −h′(A + I)⁻¹`.
fn phi(parts: &ExplicitParts) -> CMatrix {
    let sum = &parts.r_h + &parts.r_f;
    (&sum * &sum).scale_real(0.25)
}

/// Closed-form `Π` for the exp-diag seed: with `Π = [Λ₁ Λ₂]` split into `p`
/// columns each, `Λ₁ = exp(Φ₀ − Φ)Λ₁(0,0)` and `Λ₂ = exp(Φ − Φ₀)Λ₂(0,0)`.
pub fn explicit_pi(
    xi: f64,
    eta: f64,
    spec: &JordanSpec,
    bg: &dyn Coefficients,
    branches: &RootBranches,
    pi0: &CMatrix,
) -> Result<CMatrix, GbdtError> {
    let m = bg.m();
    if pi0.shape() != (spec.size(), m) || !m.is_multiple_of(2) {
        return Err(GbdtError::Precondition("Π(0,0) must be n × 2p".into()));
    }
    let p = m / 2;
    let here = phi(&explicit_parts(xi, eta, spec, bg, branches)?);
    let anchor = phi(&explicit_parts(0.0, 0.0, spec, bg, branches)?);
    let delta = &here - &anchor;
    let n = spec.size();
    let l1 = &matrix_exp(&-&delta)? * &pi0.block(0, 0, n, p);
    let l2 = &matrix_exp(&delta)? * &pi0.block(0, p, n, p);
    Ok(CMatrix::hstack(&l1, &l2)?)
}

/// The 2 × 2 Jordan example with `f = −ξ`, `h = η`, written as in the
/// literature:
///
/// `Λ₁ = e^{−(ν+ω)²/4}(I − ¼(ν/ω + ω/ν)𝒮₁)C₁`,
/// `Λ₂ = e^{(ν+ω)²/4}(I + ¼(ν/ω + ω/ν)𝒮₁)C₂`,
///
/// with `ν = √(c − 2ξ)`, `ω = √(c − 2η)` and `[C₁ C₂] = factor`. The constant
/// right factor is not `Π(0,0)`; at the origin the formula gives
/// `e^{−c}(I − ½𝒮₁)C₁` in the first block.
pub fn explicit_pi_jordan2(xi: f64, eta: f64, c: C64, factor: &CMatrix, p: usize) -> Result<CMatrix, GbdtError> {
    if factor.shape() != (2, 2 * p) {
        return Err(GbdtError::Precondition("the constant factor must be 2 × 2p".into()));
    }
    let root = |w: C64| -> Result<C64, GbdtError> {
        if w.re <= 0.0 && w.im.abs() <= 1e-12 * w.norm().max(1.0) {
            Err(GbdtError::BranchCut { xi, eta })
        } else {
            Ok(signed_sqrt(w, 1))
        }
    };
    let nu = root(c - 2.0 * xi)?;
    let omega = root(c - 2.0 * eta)?;
    let s = (nu + omega) * (nu + omega) * 0.25;
    let t = (nu / omega + omega / nu) * 0.25;
    let tri = |e: C64, off: C64| CMatrix::from_rows(&[&[e, e * off], &[C64::zero(), e]]).expect("2x2");
    let l1 = &tri((-s).exp(), -t) * &factor.block(0, 0, 2, p);
    let l2 = &tri(s.exp(), t) * &factor.block(0, p, 2, p);
    Ok(CMatrix::hstack(&l1, &l2)?)
}

/// Successive recovery of `S` from the identity for `A = [[a, b], [0, a]]`:
/// `S₂₂`, then `S₂₁`, `S₁₂` and finally `S₁₁`, each divided by `a − ā`.
pub fn s_recursion_jordan2(point: (f64, f64), a: &CMatrix, pi: &CMatrix, j: &CMatrix) -> Result<CMatrix, GbdtError> {
    if a.shape() != (2, 2) || a[(1, 0)].norm() > 1e-14 * a.max_abs().max(1.0) {
        return Err(GbdtError::Precondition("A must be 2 × 2 upper triangular".into()));
    }
    let (av, b) = (a[(0, 0)], a[(0, 1)]);
    let d = av - av.conj();
    if d.norm() <= 1e-14 * av.norm().max(1.0) {
        return Err(GbdtError::Resonant {
            xi: point.0,
            eta: point.1,
        });
    }
    let k = (&(pi * j) * &pi.adjoint()).scale(I);
    let s22 = k[(1, 1)] / d;
    let s21 = (k[(1, 0)] + b.conj() * s22) / d;
    let s12 = (k[(0, 1)] - b * s22) / d;
    let s11 = (k[(0, 0)] + b.conj() * s12 - b * s21) / d;
    Ok(CMatrix::from_rows(&[&[s11, s12], &[s21, s22]])?)
}
