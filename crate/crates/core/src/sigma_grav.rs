//! Transformed σ-model solutions `û = 𝒰u` and their real, det-normalised
//! gravitational counterparts `ũ = α d^{−1/2} 𝒰u`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::GbdtError;
use crate::field::{FieldGrid, Grid, MatrixField};
use crate::gbdt::{darboux_matrix, Background, Coefficients, GbdtState, GbdtTriple, StateSource};
use crate::matcore::{inverse, CMatrix, C64, I};

/// Largest imaginary part tolerated in a real solution.
pub const REAL_LEAKAGE_TOL: f64 = 1e-9;

/// `(u, q, Q)` of the seed at a point.
pub fn seed_solution(bg: &Background, xi: f64, eta: f64) -> Result<(CMatrix, CMatrix, CMatrix), GbdtError> {
    Ok((bg.u(xi, eta)?, bg.q(xi, eta), bg.big_q(xi, eta)))
}

/// `𝒰 = I − iJΠ*S⁻¹A⁻¹Π`.
pub fn cal_u(state: &GbdtState, j: &CMatrix) -> Result<CMatrix, GbdtError> {
    let singular = || GbdtError::SingularA {
        xi: state.xi,
        eta: state.eta,
    };
    match inverse(&state.a) {
        Ok(inv) if inv.condition <= 1e12 => {}
        _ => return Err(singular()),
    }
    darboux_matrix(state, j, C64::new(0.0, 0.0)).map_err(|e| match e {
        GbdtError::Pole { .. } => singular(),
        other => other,
    })
}

/// `û(ξ, η) = 𝒰(ξ, η)u(ξ, η)` over a state source.
pub struct SigmaField<'a> {
    pub source: &'a dyn StateSource,
}

impl MatrixField for SigmaField<'_> {
    fn eval(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        let st = self.source.state(xi, eta)?;
        let cu = cal_u(&st, self.source.j())?;
        Ok(&cu * &self.source.background().u(xi, eta)?)
    }
}

/// Transformed σ-model field on a grid.
#[derive(Clone, Debug)]
pub struct SigmaSolution {
    pub field: FieldGrid,
    pub alpha: Vec<f64>,
}

impl SigmaSolution {
    pub fn from_field(field: FieldGrid, bg: &dyn Coefficients) -> Self {
        let alpha = field.grid.points().map(|(x, y)| bg.alpha(x, y)).collect();
        Self { field, alpha }
    }
}

fn sample_points(grid: &Grid) -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for &x in [grid.xs.first(), grid.xs.last()].iter().flatten() {
        for &y in [grid.ys.first(), grid.ys.last()].iter().flatten() {
            v.push((*x, *y));
        }
    }
    v.push((0.0, 0.0));
    v
}

/// Evaluates `û` on every grid point; failing points are flagged.
pub fn transform_sigma(source: &dyn StateSource, grid: &Grid) -> Result<SigmaSolution, GbdtError> {
    let bg = source.background();
    bg.validate_against(source.j(), &sample_points(grid))?;
    let m = bg.m();
    let field = FieldGrid::tabulate(&SigmaField { source }, grid, m, m);
    Ok(SigmaSolution::from_field(field, bg))
}

/// Checks the realness conditions of the gravitational case and returns
/// `d = det((I − iJΠ₀*S₀⁻¹𝒜⁻¹Π₀)u(0,0))`, which must be positive.
pub fn grav_d(triple: &GbdtTriple, bg: &Background) -> Result<f64, GbdtError> {
    if triple.m() != 2 {
        return Err(GbdtError::Precondition(format!(
            "the gravitational case needs m = 2, got {}",
            triple.m()
        )));
    }
    let real = |name: &str, m: &CMatrix| -> Result<(), GbdtError> {
        if m.max_imag() > 1e-12 {
            Err(GbdtError::Precondition(format!("{name} must be real")))
        } else {
            Ok(())
        }
    };
    real("A(0,0)", triple.a0())?;
    real("S(0,0)", triple.s0())?;
    real("Π(0,0)", triple.pi0())?;
    real("iJ", &triple.j().scale(I))?;
    real("q", &bg.q(0.0, 0.0))?;
    real("Q", &bg.big_q(0.0, 0.0))?;
    let st = GbdtState::anchor(triple);
    let cu = cal_u(&st, triple.j())?;
    let det = (&cu * &bg.u(0.0, 0.0)?).determinant()?;
    if det.im.abs() > 1e-12 * det.norm().max(1.0) {
        return Err(GbdtError::Precondition(format!("d = {det} is not real")));
    }
    if !(det.re > 0.0) {
        return Err(GbdtError::NonPositiveD { d: det.re });
    }
    Ok(det.re)
}

/// `ũ = α d^{−1/2} 𝒰u` over a state source.
pub struct GravField<'a> {
    pub source: &'a dyn StateSource,
    pub d: f64,
}

impl GravField<'_> {
    /// `(û, ũ)` at a point.
    pub fn eval_pair(&self, xi: f64, eta: f64) -> Result<(CMatrix, CMatrix), GbdtError> {
        let hat = SigmaField { source: self.source }.eval(xi, eta)?;
        let alpha = self.source.background().alpha(xi, eta);
        let tilde = hat.scale_real(alpha / self.d.sqrt());
        let imag = tilde.max_imag();
        if imag > REAL_LEAKAGE_TOL {
            return Err(GbdtError::ComplexLeakage { imag, xi, eta });
        }
        Ok((hat, tilde))
    }
}

impl MatrixField for GravField<'_> {
    fn eval(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        Ok(self.eval_pair(xi, eta)?.1)
    }
}

/// Gravitational field `ũ` with `û` and `d`.
#[derive(Clone, Debug)]
pub struct GravSolution {
    pub field: FieldGrid,
    pub hat: FieldGrid,
    pub d: f64,
    pub alpha: Vec<f64>,
}

impl GravSolution {
    /// Assembles from per-point `(û, ũ)` results in grid order.
    pub fn from_results(
        grid: &Grid,
        d: f64,
        bg: &dyn Coefficients,
        results: Vec<Result<(CMatrix, CMatrix), GbdtError>>,
    ) -> Self {
        let (mut hats, mut tildes) = (Vec::with_capacity(results.len()), Vec::with_capacity(results.len()));
        for r in results {
            match r {
                Ok((h, t)) => {
                    hats.push(Ok(h));
                    tildes.push(Ok(t));
                }
                Err(e) => {
                    hats.push(Err(e.clone()));
                    tildes.push(Err(e));
                }
            }
        }
        let alpha = grid.points().map(|(x, y)| bg.alpha(x, y)).collect();
        Self {
            field: FieldGrid::from_results(grid.clone(), 2, 2, tildes),
            hat: FieldGrid::from_results(grid.clone(), 2, 2, hats),
            d,
            alpha,
        }
    }
}

/// Builds `ũ` on the grid after checking the real-case preconditions.
pub fn transform_grav(source: &dyn StateSource, grid: &Grid) -> Result<GravSolution, GbdtError> {
    let bg = source.background();
    bg.validate_against(source.j(), &sample_points(grid))?;
    let d = grav_d(source.triple(), bg)?;
    let gf = GravField { source, d };
    let results = grid.points().map(|(x, y)| gf.eval_pair(x, y)).collect();
    Ok(GravSolution::from_results(grid, d, bg, results))
}

/// `u = α (det ǔ)^{−1/2} ǔ` for a real 2 × 2 `ǔ` with positive determinant.
pub fn normalize_det(alpha: f64, ucheck: &CMatrix, point: (f64, f64)) -> Result<CMatrix, GbdtError> {
    if ucheck.shape() != (2, 2) {
        return Err(GbdtError::Precondition("det normalisation needs a 2 × 2 matrix".into()));
    }
    let det = ucheck.determinant()?;
    if !(det.re > 0.0) || det.im.abs() > 1e-12 * det.norm().max(1.0) {
        return Err(GbdtError::NonPositiveDet {
            det: det.re,
            xi: point.0,
            eta: point.1,
        });
    }
    Ok(ucheck.scale_real(alpha / det.re.sqrt()))
}
