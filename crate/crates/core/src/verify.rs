//! Residual oracles. Each check restates a property of the transformed
//! solutions as a finite-difference or algebraic test over sample points and
//! summarises it as a [`CheckResult`].

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ernst::{
    algebraic_defect, ernst_a, ernst_darboux, ernst_flows, ernst_g0, ernst_w0, transformed_hamiltonians, ErnstSource,
    HamiltonianField,
};
use crate::error::GbdtError;
use crate::field::{FieldGrid, MatrixField};
use crate::gbdt::{
    darboux_matrix, fundamental_solution, lambda_flow, lambda_of, lax_pair, propagate, skew_defect,
    transformed_coefficients, AField, Coefficients, GbdtState, GbdtTriple, SignPair, StateSource, RICHARDSON_TOL,
};
use crate::matcore::{commutator, eigenvalues, hermitian_eigenvalues, inv, CMatrix, C64, I};
use crate::ode::{rk4_path_checked, PathSpec};
use crate::sigma_grav::SigmaSolution;

/// Fraction of points that must survive for a check to pass.
pub const DEFAULT_COVERAGE_FLOOR: f64 = 0.9;
/// Finite-difference probe used when a field can be re-evaluated.
pub const DEFAULT_PROBE: f64 = 1e-3;

/// Summary of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub coverage: f64,
    pub floor: f64,
    pub pass: bool,
}

impl CheckResult {
    /// `residuals` holds the evaluated points, `total` the attempted ones.
    pub fn from_residuals(name: &str, residuals: &[f64], total: usize, tolerance: f64, floor: f64) -> Self {
        let max = residuals
            .iter()
            .copied()
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        let coverage = if total == 0 {
            0.0
        } else {
            residuals.len() as f64 / total as f64
        };
        Self {
            name: name.to_string(),
            max,
            mean,
            tolerance,
            coverage,
            floor,
            pass: max <= tolerance && coverage >= floor,
        }
    }
}

/// A list of checks; passes when every check does.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub checks: Vec<CheckResult>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = CheckResult>) {
        self.checks.extend(cs);
    }

    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// Largest residual over all checks (NaN propagates).
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max).fold(
            0.0,
            |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) },
        )
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    values: Vec<f64>,
    total: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            values: Vec::new(),
            total: 0,
        }
    }

    fn record(&mut self, r: Result<f64, GbdtError>) {
        self.total += 1;
        if let Ok(v) = r {
            self.values.push(v);
        }
    }

    fn finish(&self, name: &str, tol: f64, floor: f64) -> CheckResult {
        CheckResult::from_residuals(name, &self.values, self.total, tol, floor)
    }
}

fn rel(num: f64, scale: f64) -> f64 {
    num / scale.max(1.0)
}

fn central(plus: &CMatrix, minus: &CMatrix, d: f64) -> CMatrix {
    (plus - minus).scale_real(0.5 / d)
}

// u on the 3×3 stencil: index [a][b] is the offset ((a−1)d, (b−1)d).
type Stencil = [[CMatrix; 3]; 3];

fn probe_stencil(field: &dyn MatrixField, xi: f64, eta: f64, d: f64) -> Result<Stencil, GbdtError> {
    let at = |a: usize, b: usize| field.eval(xi + (a as f64 - 1.0) * d, eta + (b as f64 - 1.0) * d);
    Ok([
        [at(0, 0)?, at(0, 1)?, at(0, 2)?],
        [at(1, 0)?, at(1, 1)?, at(1, 2)?],
        [at(2, 0)?, at(2, 1)?, at(2, 2)?],
    ])
}

fn sigma_residual(u: &Stencil, alpha: &[[f64; 3]; 3], d: f64) -> Result<f64, GbdtError> {
    // N = αu_ξu⁻¹ at (0, ±1), K = αu_ηu⁻¹ at (±1, 0).
    let n_at = |b: usize| -> Result<CMatrix, GbdtError> {
        Ok(&central(&u[2][b], &u[0][b], d).scale_real(alpha[1][b]) * &inv(&u[1][b])?)
    };
    let k_at = |a: usize| -> Result<CMatrix, GbdtError> {
        Ok(&central(&u[a][2], &u[a][0], d).scale_real(alpha[a][1]) * &inv(&u[a][1])?)
    };
    let n_eta = central(&n_at(2)?, &n_at(0)?, d);
    let k_xi = central(&k_at(2)?, &k_at(0)?, d);
    Ok(rel(
        (&n_eta + &k_xi).frobenius_norm(),
        n_eta.frobenius_norm() + k_xi.frobenius_norm(),
    ))
}

/// Residual of `(αu_ξu⁻¹)_η + (αu_ηu⁻¹)_ξ` at a point, relative to the size
/// of the two terms, by nested central differences with step `d`.
pub fn sigma_residual_at(
    field: &dyn MatrixField,
    bg: &dyn Coefficients,
    xi: f64,
    eta: f64,
    d: f64,
) -> Result<f64, GbdtError> {
    let u = probe_stencil(field, xi, eta, d)?;
    let mut alpha = [[0.0; 3]; 3];
    for (a, row) in alpha.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = bg.alpha(xi + (a as f64 - 1.0) * d, eta + (b as f64 - 1.0) * d);
        }
    }
    sigma_residual(&u, &alpha, d)
}

/// σ-model residual by re-evaluating `field` around each point.
pub fn check_pde_probe(
    field: &dyn MatrixField,
    bg: &dyn Coefficients,
    points: &[(f64, f64)],
    probe: f64,
    tol: f64,
    floor: f64,
) -> CheckResult {
    let mut t = Tally::new();
    for &(x, y) in points {
        t.record(sigma_residual_at(field, bg, x, y, probe));
    }
    t.finish("pde_sigma", tol, floor)
}

fn uniform_step(v: &[f64], axis: &str) -> Result<f64, GbdtError> {
    if v.len() < 3 {
        return Err(GbdtError::GridTooCoarse(alloc::format!(
            "{axis} axis needs at least 3 points, got {}",
            v.len()
        )));
    }
    let d = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    if !(d > 0.0) || v.windows(2).any(|w| ((w[1] - w[0]) - d).abs() > 1e-9 * d.max(1.0)) {
        return Err(GbdtError::GridTooCoarse(alloc::format!(
            "{axis} axis is not uniformly increasing"
        )));
    }
    Ok(d)
}

/// σ-model residual on the tabulated values, using grid neighbours as the
/// stencil. Only interior points are counted.
pub fn check_pde_sigma(sol: &SigmaSolution, tol: f64, floor: f64) -> Result<CheckResult, GbdtError> {
    let grid = &sol.field.grid;
    let dx = uniform_step(&grid.xs, "ξ")?;
    let dy = uniform_step(&grid.ys, "η")?;
    if (dx - dy).abs() > 1e-9 * dx.max(1.0) {
        return Err(GbdtError::GridTooCoarse(
            "tabulated check needs equal ξ and η spacing".into(),
        ));
    }
    let mut t = Tally::new();
    for i in 1..grid.xs.len() - 1 {
        for j in 1..grid.ys.len() - 1 {
            let r = (|| {
                let at = |a: usize, b: usize| -> Result<CMatrix, GbdtError> {
                    sol.field
                        .get(i + a - 1, j + b - 1)
                        .cloned()
                        .ok_or(GbdtError::SingularS {
                            xi: grid.xs[i],
                            eta: grid.ys[j],
                            condition: f64::INFINITY,
                        })
                };
                let u = [
                    [at(0, 0)?, at(0, 1)?, at(0, 2)?],
                    [at(1, 0)?, at(1, 1)?, at(1, 2)?],
                    [at(2, 0)?, at(2, 1)?, at(2, 2)?],
                ];
                let mut alpha = [[0.0; 3]; 3];
                for (a, row) in alpha.iter_mut().enumerate() {
                    for (b, v) in row.iter_mut().enumerate() {
                        *v = sol.alpha[grid.index(i + a - 1, j + b - 1)];
                    }
                }
                sigma_residual(&u, &alpha, dx)
            })();
            t.record(r);
        }
    }
    Ok(t.finish("pde_sigma_tabulated", tol, floor))
}

/// `‖u*Ju − J‖_F / ‖J‖_F` over a tabulated field; flagged points lower coverage.
pub fn check_j_unitarity(field: &FieldGrid, j: &CMatrix, tol: f64, floor: f64) -> CheckResult {
    let jn = j.frobenius_norm();
    let mut t = Tally::new();
    for v in &field.values {
        t.record(match v {
            Some(u) => Ok((&(&(&u.adjoint() * j) * u) - j).frobenius_norm() / jn),
            None => Err(GbdtError::Precondition(String::new())),
        });
    }
    t.finish("j_unitarity", tol, floor)
}

/// Triple identity and Hermiticity of `S` over propagated states.
pub fn check_identity(states: &[Result<GbdtState, GbdtError>], tol: f64, floor: f64) -> [CheckResult; 2] {
    let mut id = Tally::new();
    let mut herm = Tally::new();
    for s in states {
        match s {
            Ok(st) => {
                id.record(Ok(st.diagnostics.identity_residual));
                herm.record(Ok(st.diagnostics.hermitian_defect));
            }
            Err(_) => {
                id.record(Err(GbdtError::Precondition(String::new())));
                herm.record(Err(GbdtError::Precondition(String::new())));
            }
        }
    }
    [
        id.finish("identity", tol, floor),
        herm.finish("s_hermitian", tol, floor),
    ]
}

/// Endpoint agreement of `Π` and `S` between the ξ-first and η-first L-paths.
pub fn check_compatibility(
    triple: &GbdtTriple,
    bg: &dyn Coefficients,
    a_field: &AField,
    targets: &[(f64, f64)],
    max_step: f64,
    tol: f64,
    floor: f64,
) -> CheckResult {
    let mut t = Tally::new();
    for &target in targets {
        t.record((|| {
            let p1 = propagate(triple, bg, a_field, &PathSpec::l_path(target, max_step)?)?.state;
            let p2 = propagate(triple, bg, a_field, &PathSpec::l_path_eta_first(target, max_step)?)?.state;
            Ok(p1.pi.rel_diff(&p2.pi).max(p1.s.rel_diff(&p2.s)))
        })());
    }
    t.finish("path_independence", tol, floor)
}

/// Coefficient pair `(q, Q)` as a function of the point.
pub type CoefficientFn<'a> = &'a dyn Fn(f64, f64) -> Result<(CMatrix, CMatrix), GbdtError>;

/// `q_η + Q_ξ − [q, Q]` and `(αq)_η − (αQ)_ξ` by central differences.
pub fn check_zero_curvature(
    coeffs: CoefficientFn<'_>,
    alpha: &dyn Fn(f64, f64) -> f64,
    points: &[(f64, f64)],
    d: f64,
    tol: f64,
    floor: f64,
) -> [CheckResult; 2] {
    let mut zc = Tally::new();
    let mut ac = Tally::new();
    for &(x, y) in points {
        let r = (|| {
            let (q, bq) = coeffs(x, y)?;
            let (qn, _) = coeffs(x, y + d)?;
            let (qs, _) = coeffs(x, y - d)?;
            let (_, be) = coeffs(x + d, y)?;
            let (_, bw) = coeffs(x - d, y)?;
            let q_eta = central(&qn, &qs, d);
            let bq_xi = central(&be, &bw, d);
            let comm = commutator(&q, &bq);
            let lhs = &q_eta + &bq_xi;
            let r1 = rel(
                (&lhs - &comm).frobenius_norm(),
                lhs.frobenius_norm() + comm.frobenius_norm(),
            );
            let aq_eta = central(&qn.scale_real(alpha(x, y + d)), &qs.scale_real(alpha(x, y - d)), d);
            let abq_xi = central(&be.scale_real(alpha(x + d, y)), &bw.scale_real(alpha(x - d, y)), d);
            let r2 = rel(
                (&aq_eta - &abq_xi).frobenius_norm(),
                aq_eta.frobenius_norm() + abq_xi.frobenius_norm(),
            );
            Ok((r1, r2))
        })();
        zc.record(r.as_ref().map(|p| p.0).map_err(Clone::clone));
        ac.record(r.map(|p| p.1));
    }
    [
        zc.finish("zero_curvature", tol, floor),
        ac.finish("alpha_compatibility", tol, floor),
    ]
}

/// `λ(z, ξ, η)` against its ODEs in ξ and η, by central differences.
pub fn check_lambda_odes(
    bg: &dyn Coefficients,
    samples: &[(C64, f64, f64)],
    branch: SignPair,
    d: f64,
    tol: f64,
    floor: f64,
) -> CheckResult {
    let mut t = Tally::new();
    for &(z, x, y) in samples {
        t.record((|| {
            let l = lambda_of(z, x, y, bg, branch)?;
            let lx = (lambda_of(z, x + d, y, bg, branch)? - lambda_of(z, x - d, y, bg, branch)?) / (2.0 * d);
            let ly = (lambda_of(z, x, y + d, bg, branch)? - lambda_of(z, x, y - d, bg, branch)?) / (2.0 * d);
            let (ax, ay) = lambda_flow(l, x, y, bg);
            Ok(rel((lx - ax).norm(), ax.norm()).max(rel((ly - ay).norm(), ay.norm())))
        })());
    }
    t.finish("lambda_odes", tol, floor)
}

/// `ŵ = w_A(λ)w` against `ŵ_ξ = Ĝŵ`, `ŵ_η = F̂ŵ`; `w` is integrated from the
/// origin along ξ-first L-paths with `fixed_steps` per leg so that it is
/// smooth in the endpoint.
#[allow(clippy::too_many_arguments)]
pub fn check_transformed_system(
    source: &dyn StateSource,
    points: &[(f64, f64)],
    zs: &[C64],
    branch: SignPair,
    fixed_steps: usize,
    d: f64,
    tol: f64,
    floor: f64,
) -> CheckResult {
    let bg = source.background();
    let j = source.j();
    let w_hat = |z: C64, x: f64, y: f64| -> Result<CMatrix, GbdtError> {
        let w = if x == 0.0 && y == 0.0 {
            CMatrix::identity(j.rows())
        } else {
            let path = PathSpec::l_path((x, y), 1.0)?.with_fixed_steps(fixed_steps);
            fundamental_solution(bg, z, branch, &path, None)?.state.remove(0)
        };
        let l = lambda_of(z, x, y, bg, branch)?;
        Ok(&darboux_matrix(&source.state(x, y)?, j, l)? * &w)
    };
    let mut t = Tally::new();
    for &(x, y) in points {
        for &z in zs {
            t.record((|| {
                let w = w_hat(z, x, y)?;
                let wx = central(&w_hat(z, x + d, y)?, &w_hat(z, x - d, y)?, d);
                let wy = central(&w_hat(z, x, y + d)?, &w_hat(z, x, y - d)?, d);
                let (qh, bqh) = transformed_coefficients(&source.state(x, y)?, j, bg)?;
                let (g, f) = lax_pair(&qh, &bqh, lambda_of(z, x, y, bg, branch)?, x, y)?;
                let rx = rel((&wx - &(&g * &w)).frobenius_norm(), wx.frobenius_norm());
                let ry = rel((&wy - &(&f * &w)).frobenius_norm(), wy.frobenius_norm());
                Ok(rx.max(ry))
            })());
        }
    }
    t.finish("transformed_system", tol, floor)
}

/// `q̂` and `Q̂` keep the skew structure `q̂*J + Jq̂ = 0`.
pub fn check_transformed_skew(source: &dyn StateSource, points: &[(f64, f64)], tol: f64, floor: f64) -> CheckResult {
    let j = source.j();
    let mut t = Tally::new();
    for &(x, y) in points {
        t.record((|| {
            let (qh, bqh) = transformed_coefficients(&source.state(x, y)?, j, source.background())?;
            Ok(rel(skew_defect(&qh, j), qh.frobenius_norm()).max(rel(skew_defect(&bqh, j), bqh.frobenius_norm())))
        })());
    }
    t.finish("transformed_skew", tol, floor)
}

/// Algebraic and derivative lines of the Ernst-type system for any pair.
#[allow(clippy::too_many_arguments)]
pub fn check_ernst(
    pair: &dyn HamiltonianField,
    j: &CMatrix,
    points: &[(f64, f64)],
    d: f64,
    alg_tol: f64,
    der_tol: f64,
    floor: f64,
) -> [CheckResult; 2] {
    let mut alg = Tally::new();
    let mut der = Tally::new();
    for &(x, y) in points {
        alg.record((|| {
            let (h, bh) = (pair.h(x, y)?, pair.big_h(x, y)?);
            Ok(rel(
                algebraic_defect(&h, &bh, j).frobenius_norm(),
                h.frobenius_norm() * bh.frobenius_norm(),
            ))
        })());
        der.record((|| {
            let h_eta = central(&pair.h(x, y + d)?, &pair.h(x, y - d)?, d);
            let bh_xi = central(&pair.big_h(x + d, y)?, &pair.big_h(x - d, y)?, d);
            Ok(rel(
                (&h_eta - &bh_xi).frobenius_norm(),
                h_eta.frobenius_norm() + bh_xi.frobenius_norm(),
            ))
        })());
    }
    [
        alg.finish("ernst_algebraic", alg_tol, floor),
        der.finish("ernst_derivative", der_tol, floor),
    ]
}

/// `A_ξ = A_η = A²` for the resolvent field.
pub fn check_resolvent(curly_a: &CMatrix, points: &[(f64, f64)], d: f64, tol: f64, floor: f64) -> CheckResult {
    let mut t = Tally::new();
    for &(x, y) in points {
        t.record((|| {
            let a2 = {
                let a = ernst_a(curly_a, x, y)?;
                &a * &a
            };
            let ax = central(&ernst_a(curly_a, x + d, y)?, &ernst_a(curly_a, x - d, y)?, d);
            let ay = central(&ernst_a(curly_a, x, y + d)?, &ernst_a(curly_a, x, y - d)?, d);
            Ok(rel(
                (&ax - &a2).frobenius_norm().max((&ay - &a2).frobenius_norm()),
                a2.frobenius_norm(),
            ))
        })());
    }
    t.finish("resolvent", tol, floor)
}

/// `w₀*Jw₀ = J` and the FD residual of `w₀_ξ = G̃₀w₀`, `w₀_η = F̃₀w₀`.
pub fn check_w0(
    source: &ErnstSource,
    points: &[(f64, f64)],
    d: f64,
    j_tol: f64,
    fd_tol: f64,
    floor: f64,
) -> [CheckResult; 2] {
    let j = source.j();
    let mut ju = Tally::new();
    let mut fd = Tally::new();
    for &(x, y) in points {
        let st = source.state(x, y);
        ju.record(st.clone().and_then(|st| {
            let w = ernst_w0(&st, j)?;
            Ok((&(&(&w.adjoint() * j) * &w) - j).frobenius_norm() / j.frobenius_norm())
        }));
        fd.record(st.and_then(|st| {
            let w = ernst_w0(&st, j)?;
            let wx = central(&source.w0(x + d, y)?, &source.w0(x - d, y)?, d);
            let wy = central(&source.w0(x, y + d)?, &source.w0(x, y - d)?, d);
            let g = ernst_g0(&st, j, &source.pair.h(x, y)?)?;
            let f = ernst_g0(&st, j, &source.pair.big_h(x, y)?)?;
            let rx = rel((&wx - &(&g * &w)).frobenius_norm(), wx.frobenius_norm());
            let ry = rel((&wy - &(&f * &w)).frobenius_norm(), wy.frobenius_norm());
            Ok(rx.max(ry))
        }));
    }
    [
        ju.finish("w0_j_unitary", j_tol, floor),
        fd.finish("w0_equation", fd_tol, floor),
    ]
}

/// `w₀` obtained by integrating its own system jointly with `Π` and `S`
/// from `w₀(0,0)` along a ξ-first L-path.
pub fn integrate_w0(source: &ErnstSource, target: (f64, f64)) -> Result<CMatrix, GbdtError> {
    let triple = &source.triple;
    let j = source.j();
    let anchor = GbdtState::anchor(triple.triple());
    let w_start = ernst_w0(&anchor, j)?;
    if target == (0.0, 0.0) {
        return Ok(w_start);
    }
    let mut path = PathSpec::l_path(target, source.max_step)?;
    if let Some(k) = source.fixed_steps {
        path = path.with_fixed_steps(k);
    }
    let pair = &source.pair;
    let mut rhs = |x: f64, y: f64, dx: f64, dy: f64, st: &[CMatrix]| -> Result<Vec<CMatrix>, GbdtError> {
        let a = ernst_a(triple.curly_a(), x, y)?;
        let (h, bh) = (pair.h(x, y)?, pair.big_h(x, y)?);
        let (px, py, sx, sy) = ernst_flows(&a, &st[0], &st[1], j, &h, &bh);
        let here = GbdtState::new(x, y, a, st[0].clone(), st[1].clone(), j);
        let g = ernst_g0(&here, j, &h)?;
        let f = ernst_g0(&here, j, &bh)?;
        Ok(vec![
            &px.scale_real(dx) + &py.scale_real(dy),
            &sx.scale_real(dx) + &sy.scale_real(dy),
            &(&g * &st[2]).scale_real(dx) + &(&f * &st[2]).scale_real(dy),
        ])
    };
    let out = rk4_path_checked(&path, vec![anchor.pi, anchor.s, w_start], RICHARDSON_TOL, &mut rhs)?;
    Ok(out.state[2].clone())
}

/// Closed-form `w₀` against the integrated one.
pub fn check_w0_integrated(source: &ErnstSource, points: &[(f64, f64)], tol: f64, floor: f64) -> CheckResult {
    let mut t = Tally::new();
    for &p in points {
        t.record((|| Ok(source.w0(p.0, p.1)?.rel_diff(&integrate_w0(source, p)?)))());
    }
    t.finish("w0_integrated", tol, floor)
}

/// FD residuals of `v_ξ = i(z−ξ−η)⁻¹(JH̃v − vJH)` and its η analogue.
pub fn check_ernst_darboux(
    source: &ErnstSource,
    points: &[(f64, f64)],
    zs: &[C64],
    d: f64,
    tol: f64,
    floor: f64,
) -> CheckResult {
    let j = source.j();
    let pair = &source.pair;
    let mut t = Tally::new();
    for &(x, y) in points {
        let st = source.state(x, y);
        for &z in zs {
            t.record(st.clone().and_then(|st| {
                let v = ernst_darboux(&st, j, z)?;
                let vx = central(&source.darboux(x + d, y, z)?, &source.darboux(x - d, y, z)?, d);
                let vy = central(&source.darboux(x, y + d, z)?, &source.darboux(x, y - d, z)?, d);
                let (ht, bht) = transformed_hamiltonians(&st, pair, j)?;
                let k = I / (z - (x + y));
                let side = |gt: &CMatrix, g: &CMatrix| (&(&(j * gt) * &v) - &(&(&v * j) * g)).scale(k);
                let rx = rel((&vx - &side(&ht, &pair.h(x, y)?)).frobenius_norm(), vx.frobenius_norm());
                let ry = rel(
                    (&vy - &side(&bht, &pair.big_h(x, y)?)).frobenius_norm(),
                    vy.frobenius_norm(),
                );
                Ok(rx.max(ry))
            }));
        }
    }
    t.finish("ernst_darboux", tol, floor)
}

/// `max(0, −λ_min)` over both Hamiltonians of a pair.
pub fn check_positivity(pair: &dyn HamiltonianField, points: &[(f64, f64)], tol: f64, floor: f64) -> CheckResult {
    let mut t = Tally::new();
    for &(x, y) in points {
        t.record((|| {
            let mut worst = 0.0f64;
            for h in [pair.h(x, y)?, pair.big_h(x, y)?] {
                let min = hermitian_eigenvalues(&h)?.into_iter().fold(f64::INFINITY, f64::min);
                worst = worst.max(-min).max(rel(h.hermitian_defect(), h.frobenius_norm()));
            }
            Ok(worst)
        })());
    }
    t.finish("eigenvalue_floor", tol, floor)
}

/// Sorted spectra of `JH̃` and `JH` (and of `Jℋ̃`, `Jℋ`).
pub fn check_spectral_similarity(source: &ErnstSource, points: &[(f64, f64)], tol: f64, floor: f64) -> CheckResult {
    let j = source.j();
    let mut t = Tally::new();
    for &(x, y) in points {
        t.record((|| {
            let (ht, bht) = transformed_hamiltonians(&source.state(x, y)?, &source.pair, j)?;
            let mut worst = 0.0f64;
            for (a, b) in [(ht, source.pair.h(x, y)?), (bht, source.pair.big_h(x, y)?)] {
                let ea = eigenvalues(&(j * &a))?;
                let eb = eigenvalues(&(j * &b))?;
                let scale = eb.iter().map(|l| l.norm()).fold(0.0, f64::max);
                for (p, q) in ea.iter().zip(&eb) {
                    worst = worst.max(rel((p - q).norm(), scale));
                }
            }
            Ok(worst)
        })());
    }
    t.finish("spectral_similarity", tol, floor)
}

/// `count` points on the circle `|z − center| = radius`, starting at angle
/// `phase`.
pub fn z_ring(count: usize, center: C64, radius: f64, phase: f64) -> Vec<C64> {
    (0..count)
        .map(|k| {
            let t = phase + 2.0 * core::f64::consts::PI * k as f64 / count as f64;
            center + C64::from_polar(radius, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branchsqrt::JordanSpec;
    use crate::ernst::{seed_hamiltonians, ErnstTriple, HamiltonianFamily};
    use crate::field::Grid;
    use crate::gbdt::{j_matrix, Background, ClosedFormSource, JSelector, Profile, RootBranches, PRINCIPAL};
    use crate::sigma_grav::{transform_sigma, SigmaField};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bg() -> Background {
        Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap()
    }

    fn closed_source() -> ClosedFormSource {
        let j = j_matrix(JSelector::OffDiag, 2).unwrap();
        let pi0 = CMatrix::from_real_rows(&[&[1.0, 0.2], &[0.3, 1.0]]).unwrap();
        ClosedFormSource::new(
            JordanSpec::single_block(c(-2.0, 2.0), 2).unwrap(),
            RootBranches::principal(1),
            bg(),
            pi0,
            j,
        )
        .unwrap()
    }

    fn interior() -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        for x in [-0.2, 0.0, 0.15] {
            for y in [-0.1, 0.05, 0.2] {
                v.push((x, y));
            }
        }
        v
    }

    #[test]
    fn report_logic() {
        let c1 = CheckResult::from_residuals("a", &[1e-9, 2e-9], 2, 1e-8, 0.9);
        assert!(c1.pass);
        assert!((c1.mean - 1.5e-9).abs() < 1e-20);
        let c2 = CheckResult::from_residuals("b", &[1e-9], 2, 1e-8, 0.9);
        assert!(!c2.pass);
        assert_eq!(c2.coverage, 0.5);
        let c3 = CheckResult::from_residuals("c", &[f64::NAN], 1, 1.0, 0.0);
        assert!(!c3.pass);
        let mut r = ResidualReport::new();
        assert!(!r.pass());
        r.push(c1);
        assert!(r.pass());
        r.push(c2);
        assert!(!r.pass());
        assert_eq!(r.max_residual(), 2e-9);
    }

    #[test]
    fn seed_alone_solves_the_pde() {
        let b = bg();
        let f = |x: f64, y: f64| b.u(x, y);
        let r = check_pde_probe(&f, &b, &interior(), DEFAULT_PROBE, 1e-6, 0.9);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn transformed_field_solves_the_pde_and_corruption_is_caught() {
        let src = closed_source();
        let field = SigmaField { source: &src };
        let r = check_pde_probe(&field, src.background(), &interior(), DEFAULT_PROBE, 1e-5, 0.9);
        assert!(r.pass, "{r:?}");
        let corrupt = |x: f64, y: f64| -> Result<CMatrix, GbdtError> {
            let mut u = field.eval(x, y)?;
            u[(0, 1)] += c(0.1 * (1.0 + x * x + 3.0 * y), 0.0);
            Ok(u)
        };
        let bad = check_pde_probe(&corrupt, src.background(), &interior(), DEFAULT_PROBE, 1e-5, 0.9);
        assert!(!bad.pass && bad.max > 1e-2, "{bad:?}");
    }

    #[test]
    fn tabulated_check_needs_a_fine_grid() {
        let src = closed_source();
        let grid = Grid::uniform(-0.1, 0.1, 21, -0.1, 0.1, 21);
        let sol = transform_sigma(&src, &grid).unwrap();
        let r = check_pde_sigma(&sol, 1e-3, 0.9).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(check_j_unitarity(&sol.field, src.j(), 1e-9, 0.9).pass);
        let coarse = transform_sigma(&src, &Grid::uniform(-0.1, 0.1, 2, -0.1, 0.1, 5)).unwrap();
        assert!(matches!(
            check_pde_sigma(&coarse, 1e-3, 0.9),
            Err(GbdtError::GridTooCoarse(_))
        ));
    }

    #[test]
    fn identity_check_catches_non_hermitian_s() {
        let src = closed_source();
        let mut states: Vec<_> = interior().iter().map(|&(x, y)| src.state(x, y)).collect();
        let [id, herm] = check_identity(&states, 1e-8, 0.9);
        assert!(id.pass && herm.pass);
        let j = src.j().clone();
        states = states
            .into_iter()
            .map(|s| s.map(|st| GbdtState::new(st.xi, st.eta, st.a.clone(), st.pi.clone(), st.s.shift(I), &j)))
            .collect();
        let [_, herm] = check_identity(&states, 1e-8, 0.9);
        assert!(!herm.pass);
    }

    #[test]
    fn zero_curvature_of_seed_and_random_pair() {
        let b = bg();
        let coeffs = |x: f64, y: f64| Ok((b.q(x, y), b.big_q(x, y)));
        let alpha = |x: f64, y: f64| b.alpha(x, y);
        let [zc, ac] = check_zero_curvature(&coeffs, &alpha, &interior(), 1e-4, 1e-6, 0.9);
        assert!(zc.pass && ac.pass, "{zc:?} {ac:?}");
        let q0 = CMatrix::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]).unwrap();
        let bq0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let random = |x: f64, y: f64| Ok((q0.scale_real(1.0 + y), bq0.scale_real(x * x)));
        let [zc, _] = check_zero_curvature(&random, &alpha, &interior(), 1e-4, 1e-5, 0.9);
        assert!(!zc.pass);
    }

    #[test]
    fn transformed_coefficients_pass_zero_curvature() {
        let src = closed_source();
        let b = src.background();
        let coeffs = |x: f64, y: f64| transformed_coefficients(&src.state(x, y)?, src.j(), b);
        let alpha = |x: f64, y: f64| b.alpha(x, y);
        let [zc, ac] = check_zero_curvature(&coeffs, &alpha, &interior(), 1e-4, 1e-5, 0.9);
        assert!(zc.pass && ac.pass, "{zc:?} {ac:?}");
        assert!(check_transformed_skew(&src, &interior(), 1e-9, 0.9).pass);
    }

    #[test]
    fn lambda_odes_hold_off_the_cuts() {
        let b = bg();
        let samples = [
            (c(3.0, 1.0), 0.1, 0.2),
            (c(-4.0, 0.5), -0.2, 0.1),
            (c(0.3, 2.0), 0.0, -0.25),
        ];
        let r = check_lambda_odes(&b, &samples, PRINCIPAL, 1e-5, 1e-6, 1.0);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn transformed_fundamental_solution_is_coherent() {
        let src = closed_source();
        let zs = z_ring(2, c(0.0, 0.0), 3.0, 0.4);
        let r = check_transformed_system(&src, &[(0.1, 0.05), (-0.1, 0.15)], &zs, PRINCIPAL, 40, 1e-4, 1e-5, 0.9);
        assert!(r.pass, "{r:?}");
    }

    fn ernst_source(coeffs: Vec<f64>) -> ErnstSource {
        let j = j_matrix(JSelector::OffDiag, 2).unwrap();
        let curly = CMatrix::from_rows(&[&[c(1.5, 1.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(1.5, 1.0)]]).unwrap();
        let pi0 = CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.2, 0.0)], &[c(0.0, 0.3), c(1.0, 0.0)]]).unwrap();
        let p = CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 0.25]])
            .unwrap()
            .scale_real(1.0 / 1.25);
        let triple = ErnstTriple::with_sylvester(curly, pi0, j.clone()).unwrap();
        let pair = seed_hamiltonians(HamiltonianFamily::ShiftProfile { coeffs, base: p }, &j).unwrap();
        ErnstSource::new(triple, pair, 0.01).unwrap().with_fixed_steps(40)
    }

    #[test]
    fn ernst_checks_pass_on_transformed_pair() {
        let src = ernst_source(vec![1.0, 0.0, 1.0]);
        let pts = [(0.05, 0.1), (-0.1, 0.15), (0.2, -0.05)];
        let j = src.j();
        let [alg, der] = check_ernst(&src.pair, j, &pts, 1e-4, 1e-10, 1e-6, 1.0);
        assert!(alg.pass && der.pass);
        let tp = crate::ernst::TransformedPair { source: &src };
        let [alg, der] = check_ernst(&tp, j, &pts, 1e-4, 1e-10, 1e-6, 1.0);
        assert!(alg.pass && der.pass, "{alg:?} {der:?}");
        assert!(check_resolvent(src.triple.curly_a(), &pts, 1e-4, 1e-6, 1.0).pass);
        let [ju, fd] = check_w0(&src, &pts, 1e-4, 1e-9, 1e-5, 1.0);
        assert!(ju.pass && fd.pass, "{ju:?} {fd:?}");
        let r = check_w0_integrated(&src, &pts, 1e-7, 1.0);
        assert!(r.pass, "{r:?}");
        let zs = z_ring(3, c(0.0, 0.0), 4.0, 0.3);
        let r = check_ernst_darboux(&src, &pts, &zs, 1e-4, 1e-5, 1.0);
        assert!(r.pass, "{r:?}");
        assert!(check_positivity(&tp, &pts, 1e-10, 1.0).pass);
        let r = check_spectral_similarity(&src, &pts, 1e-8, 1.0);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn ernst_derivative_line_catches_a_bad_pair() {
        struct Skewed;
        impl HamiltonianField for Skewed {
            fn h(&self, x: f64, _y: f64) -> Result<CMatrix, GbdtError> {
                Ok(CMatrix::identity(2).scale_real(1.0 + x))
            }
            fn big_h(&self, x: f64, _y: f64) -> Result<CMatrix, GbdtError> {
                Ok(CMatrix::identity(2).scale_real(1.0 + x))
            }
        }
        let j = j_matrix(JSelector::OffDiag, 2).unwrap();
        let [alg, der] = check_ernst(&Skewed, &j, &[(0.1, 0.1)], 1e-4, 1e-10, 1e-6, 1.0);
        assert!(alg.pass);
        assert!(!der.pass);
    }

    #[test]
    fn ring_samples() {
        let zs = z_ring(4, c(1.0, 0.0), 2.0, 0.0);
        assert!((zs[0] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((zs[1] - c(1.0, 2.0)).norm() < 1e-15);
    }
}
