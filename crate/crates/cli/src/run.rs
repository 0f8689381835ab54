//! Mode drivers: build the sources, evaluate the grid in parallel, run the
//! checks and write the field and report files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use darboux_core::branchsqrt::shifted_sqrt;
use darboux_core::ernst::{ernst_w0, transformed_hamiltonians, ErnstSource, ErnstTriple, TransformedPair};
use darboux_core::gbdt::{
    explicit_anchor, AField, Background, ClosedFormSource, Coefficients, GbdtState, GbdtTriple, PropagatedSource,
    StateSource,
};
use darboux_core::matcore::{commutator, hermitian_eigenvalues, CMatrix};
use darboux_core::sigma_grav::{grav_d, GravField, GravSolution, SigmaField, SigmaSolution};
use darboux_core::verify::{self, CheckResult, ResidualReport};
use darboux_core::{FieldGrid, GbdtError, Grid, MatrixField, C64};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{AFieldKind, Mode, RunConfig, SourceKind, Validated, ValidationErrors};
use crate::export::{field_csv, read_field_csv, sidecar_json, write_atomic, ReportJson, Sidecar};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Validation(#[from] ValidationErrors),
    #[error("setup rejected: {0}")]
    Setup(#[from] GbdtError),
    #[error("{0:#}")]
    Io(#[from] anyhow::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed_check_only: bool,
}

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: ResidualReport,
    pub field_coverage: f64,
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    /// Extra lines for standard output, printed before the result line.
    pub stdout: Vec<String>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.exit_code == 0
    }

    pub fn result_line(&self) -> String {
        format!(
            "RESULT {} {:e}",
            if self.pass() { "pass" } else { "fail" },
            self.report.max_residual()
        )
    }
}

fn finish(
    report: ResidualReport,
    field_coverage: f64,
    floor: f64,
    files: Vec<PathBuf>,
    stdout: Vec<String>,
) -> Outcome {
    let ok = report.checks.iter().all(|c| c.pass);
    let exit_code = if field_coverage < floor {
        2
    } else if ok {
        0
    } else {
        3
    };
    Outcome {
        report,
        field_coverage,
        exit_code,
        files,
        stdout,
    }
}

fn par_map<T: Send>(points: &[(f64, f64)], f: impl Fn(f64, f64) -> T + Sync + Send) -> Vec<T> {
    points.par_iter().map(|&(x, y)| f(x, y)).collect()
}

fn strided(grid: &Grid, stride: usize) -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for i in (0..grid.xs.len()).step_by(stride) {
        for j in (0..grid.ys.len()).step_by(stride) {
            v.push((grid.xs[i], grid.ys[j]));
        }
    }
    v
}

/// About `n` grid points spread evenly over the grid.
fn sampled(grid: &Grid, n: usize) -> Vec<(f64, f64)> {
    let side = (n as f64).sqrt().ceil().max(1.0) as usize;
    let pick = |len: usize| -> Vec<usize> {
        if len <= side {
            return (0..len).collect();
        }
        let mut idx: Vec<usize> = (0..side).map(|k| k * (len - 1) / (side - 1).max(1)).collect();
        idx.dedup();
        idx
    };
    let mut v = Vec::new();
    for &i in &pick(grid.xs.len()) {
        for &j in &pick(grid.ys.len()) {
            v.push((grid.xs[i], grid.ys[j]));
        }
    }
    v.truncate(n.max(1));
    v
}

fn targets(grid: &Grid, n: usize) -> Vec<(f64, f64)> {
    sampled(grid, n + 1)
        .into_iter()
        .filter(|&(x, y)| x != 0.0 && y != 0.0)
        .take(n)
        .collect()
}

fn corners(grid: &Grid) -> Vec<(f64, f64)> {
    let (x0, x1) = (grid.xs[0], *grid.xs.last().expect("grid"));
    let (y0, y1) = (grid.ys[0], *grid.ys.last().expect("grid"));
    vec![(x0, y0), (x0, y1), (x1, y0), (x1, y1), (0.0, 0.0)]
}

/// Base steps per path leg. A count shared by every target keeps propagated
/// fields smooth in the endpoint, which the finite-difference checks need.
fn fixed_steps(cfg: &RunConfig) -> usize {
    cfg.source.fixed_steps.unwrap_or_else(|| {
        let d = &cfg.domain;
        let reach = [d.xi[0], d.xi[1], d.eta[0], d.eta[1]]
            .iter()
            .fold(0.0f64, |a, b| a.max(b.abs()));
        ((reach / cfg.source.max_step).ceil() as usize).max(1)
    })
}

fn build_source(cfg: &RunConfig, v: &Validated) -> Result<(Box<dyn StateSource>, AField), GbdtError> {
    let gen = v.generator.clone().expect("validated");
    let bg = v.background.clone().expect("validated");
    let j = v.j.clone().expect("validated");
    let pi0 = v.pi0.clone().expect("validated");
    match cfg.source.kind {
        SourceKind::ClosedForm => {
            if cfg.source.a_field == AFieldKind::Integrated {
                return Err(GbdtError::Precondition(
                    "closed-form sources use the explicit A field".into(),
                ));
            }
            let src = ClosedFormSource::new(gen, v.branches.clone(), bg, pi0, j)?;
            let a = src.a_field();
            Ok((Box::new(src), a))
        }
        SourceKind::Propagated => {
            let (a0, a_field) = match cfg.source.a_field {
                AFieldKind::Explicit => (
                    explicit_anchor(&gen, &bg, &v.branches)?,
                    AField::Explicit {
                        generator: gen.clone(),
                        branches: v.branches.clone(),
                    },
                ),
                AFieldKind::Integrated => (gen.reconstruct().clone(), AField::Integrated),
            };
            let triple = match &v.s0 {
                Some(s0) => GbdtTriple::new(a0, s0.clone(), pi0, j)?,
                None => GbdtTriple::with_sylvester(a0, pi0, j)?,
            };
            let src = PropagatedSource::new(triple, bg, a_field.clone(), cfg.source.max_step)
                .with_fixed_steps(fixed_steps(cfg));
            Ok((Box::new(src), a_field))
        }
    }
}

fn missing() -> GbdtError {
    GbdtError::Precondition(String::new())
}

/// Residuals at `points`, evaluated in parallel; failures lower coverage.
fn par_check(
    name: &str,
    points: &[(f64, f64)],
    tol: f64,
    floor: f64,
    f: impl Fn(f64, f64) -> Result<f64, GbdtError> + Sync + Send,
) -> CheckResult {
    let results = par_map(points, f);
    let ok: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    CheckResult::from_residuals(name, &ok, results.len(), tol, floor)
}

/// Checks shared by the σ-model and gravitational modes.
fn state_checks(
    cfg: &RunConfig,
    v: &Validated,
    source: &dyn StateSource,
    a_field: &AField,
    report: &mut ResidualReport,
) {
    let t = &cfg.tolerances;
    let floor = t.coverage_floor;
    let samples = sampled(&v.grid, cfg.checks.sample_points);
    let states = par_map(&samples, |x, y| source.state(x, y));
    report.extend(verify::check_identity(&states, t.identity, floor));
    report.push(verify::check_transformed_skew(source, &samples, t.skew, floor));
    let tg = targets(&v.grid, cfg.checks.path_targets);
    report.push(verify::check_compatibility(
        source.triple(),
        source.background(),
        a_field,
        &tg,
        cfg.source.max_step,
        t.compatibility,
        floor,
    ));
}

fn pde_check(
    cfg: &RunConfig,
    field: &FieldGrid,
    eval: &(dyn MatrixField + Sync),
    bg: &dyn Coefficients,
) -> CheckResult {
    let pts = strided(&field.grid, cfg.checks.stride);
    let probe = cfg.checks.probe;
    par_check(
        "pde_sigma",
        &pts,
        cfg.tolerances.pde,
        cfg.tolerances.coverage_floor,
        |x, y| {
            let i = field.grid.xs.iter().position(|&a| a == x).expect("grid point");
            let j = field.grid.ys.iter().position(|&b| b == y).expect("grid point");
            if field.get(i, j).is_none() {
                return Err(missing());
            }
            verify::sigma_residual_at(eval, bg, x, y, probe)
        },
    )
}

fn seed_report(cfg: &RunConfig, v: &Validated, source: &dyn StateSource) -> ResidualReport {
    let t = &cfg.tolerances;
    let floor = t.coverage_floor;
    let bg = source.background();
    let mut report = ResidualReport::new();
    let seed = |x: f64, y: f64| bg.u(x, y);
    let pts = strided(&v.grid, cfg.checks.stride);
    report.push(par_check("seed_pde_sigma", &pts, t.pde, floor, |x, y| {
        verify::sigma_residual_at(&seed, bg, x, y, cfg.checks.probe)
    }));
    let coeffs = |x: f64, y: f64| Ok((bg.q(x, y), bg.big_q(x, y)));
    let alpha = |x: f64, y: f64| bg.alpha(x, y);
    let samples = sampled(&v.grid, cfg.checks.sample_points);
    report.extend(verify::check_zero_curvature(
        &coeffs,
        &alpha,
        &samples,
        cfg.checks.probe,
        t.pde,
        floor,
    ));
    report.extend(verify::check_identity(
        &[Ok(GbdtState::anchor(source.triple()))],
        t.identity,
        floor,
    ));
    report
}

struct Written {
    files: Vec<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
fn write_outputs(
    cfg: &RunConfig,
    mode: Mode,
    opts: &RunOptions,
    field: Option<&FieldGrid>,
    layout: &str,
    report: &ResidualReport,
    coverage: f64,
    stats: BTreeMap<String, f64>,
) -> Result<Written, RunError> {
    let stem = if opts.seed_check_only {
        format!("{}-seed", mode.as_str())
    } else {
        mode.as_str().to_string()
    };
    let mut files = Vec::new();
    if let Some(f) = field {
        let p = opts.out_dir.join(format!("{stem}.csv"));
        write_atomic(&p, &field_csv(f)?)?;
        files.push(p);
    }
    let side = Sidecar {
        version: darboux_core::VERSION,
        mode: mode.as_str(),
        layout,
        config: cfg,
        report: ReportJson::new(report, coverage),
        stats,
    };
    let p = opts.out_dir.join(format!("{stem}.json"));
    write_atomic(&p, &sidecar_json(&side)?)?;
    files.push(p);
    Ok(Written { files })
}

fn run_sigma(cfg: &RunConfig, v: &Validated, opts: &RunOptions) -> Result<Outcome, RunError> {
    let (source, a_field) = build_source(cfg, v)?;
    let source: &dyn StateSource = source.as_ref();
    let j = source.j().clone();
    source.background().validate_against(&j, &corners(&v.grid))?;
    let floor = cfg.tolerances.coverage_floor;
    if opts.seed_check_only {
        let report = seed_report(cfg, v, source);
        let w = write_outputs(cfg, v.mode, opts, None, "none", &report, 1.0, BTreeMap::new())?;
        return Ok(finish(report, 1.0, floor, w.files, Vec::new()));
    }
    let m = j.rows();
    let field_fn = SigmaField { source };
    let points: Vec<(f64, f64)> = v.grid.points().collect();
    let results = par_map(&points, |x, y| field_fn.eval(x, y));
    let field = FieldGrid::from_results(v.grid.clone(), m, m, results);
    let sol = SigmaSolution::from_field(field, source.background());
    let mut report = ResidualReport::new();
    report.push(verify::check_j_unitarity(
        &sol.field,
        &j,
        cfg.tolerances.j_unitary,
        floor,
    ));
    report.push(pde_check(cfg, &sol.field, &field_fn, source.background()));
    state_checks(cfg, v, source, &a_field, &mut report);
    let coverage = sol.field.coverage();
    let w = write_outputs(
        cfg,
        v.mode,
        opts,
        Some(&sol.field),
        "u_hat (m x m)",
        &report,
        coverage,
        BTreeMap::new(),
    )?;
    Ok(finish(report, coverage, floor, w.files, Vec::new()))
}

fn run_grav(cfg: &RunConfig, v: &Validated, opts: &RunOptions) -> Result<Outcome, RunError> {
    let (source, a_field) = build_source(cfg, v)?;
    let source: &dyn StateSource = source.as_ref();
    let bg = source.background();
    let j = source.j().clone();
    bg.validate_against(&j, &corners(&v.grid))?;
    let d = grav_d(source.triple(), bg)?;
    let t = &cfg.tolerances;
    let floor = t.coverage_floor;
    if opts.seed_check_only {
        let report = seed_report(cfg, v, source);
        let stats = BTreeMap::from([("d".to_string(), d)]);
        let w = write_outputs(cfg, v.mode, opts, None, "none", &report, 1.0, stats)?;
        return Ok(finish(report, 1.0, floor, w.files, Vec::new()));
    }
    let gf = GravField { source, d };
    let points: Vec<(f64, f64)> = v.grid.points().collect();
    let results = par_map(&points, |x, y| gf.eval_pair(x, y));
    let sol = GravSolution::from_results(&v.grid, d, bg, results);
    let n = sol.field.values.len();
    let mut imag = Vec::new();
    let mut det_hat = Vec::new();
    let mut det_tilde = Vec::new();
    let (mut ratio_min, mut ratio_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..n {
        if let (Some(h), Some(u)) = (&sol.hat.values[k], &sol.field.values[k]) {
            imag.push(u.max_imag());
            let a2 = sol.alpha[k] * sol.alpha[k];
            let (dh, dt) = match (h.determinant(), u.determinant()) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            det_hat.push((dh - C64::new(d, 0.0)).norm());
            det_tilde.push((dt - C64::new(a2, 0.0)).norm() / a2);
            ratio_min = ratio_min.min(dt.re / a2);
            ratio_max = ratio_max.max(dt.re / a2);
        }
    }
    let mut report = ResidualReport::new();
    report.push(CheckResult::from_residuals("imag_leakage", &imag, n, t.imag, floor));
    report.push(CheckResult::from_residuals(
        "det_hat_minus_d",
        &det_hat,
        n,
        t.det,
        floor,
    ));
    report.push(CheckResult::from_residuals(
        "det_tilde_over_alpha2",
        &det_tilde,
        n,
        t.det,
        floor,
    ));
    report.push(verify::check_j_unitarity(&sol.hat, &j, t.j_unitary, floor));
    report.push(pde_check(cfg, &sol.field, &gf, bg));
    state_checks(cfg, v, source, &a_field, &mut report);
    let coverage = sol.field.coverage();
    let stats = BTreeMap::from([
        ("d".to_string(), d),
        ("det_tilde_over_alpha2_min".to_string(), ratio_min),
        ("det_tilde_over_alpha2_max".to_string(), ratio_max),
    ]);
    let w = write_outputs(
        cfg,
        v.mode,
        opts,
        Some(&sol.field),
        "u_tilde (2 x 2)",
        &report,
        coverage,
        stats,
    )?;
    Ok(finish(report, coverage, floor, w.files, Vec::new()))
}

fn run_ernst(cfg: &RunConfig, v: &Validated, opts: &RunOptions) -> Result<Outcome, RunError> {
    let gen = v.generator.as_ref().expect("validated");
    let j = v.j.clone().expect("validated");
    let pi0 = v.pi0.clone().expect("validated");
    let pair = v.pair.clone().expect("validated");
    let curly = gen.reconstruct().clone();
    let triple = match &v.s0 {
        Some(s0) => ErnstTriple::new(curly, s0.clone(), pi0, j.clone())?,
        None => ErnstTriple::with_sylvester(curly, pi0, j.clone())?,
    };
    let src = ErnstSource::new(triple, pair, cfg.source.max_step)?.with_fixed_steps(fixed_steps(cfg));
    let t = &cfg.tolerances;
    let floor = t.coverage_floor;
    let m = j.rows();
    let all: Vec<(f64, f64)> = v.grid.points().collect();
    let samples = sampled(&v.grid, cfg.checks.sample_points);
    let probe = cfg.checks.probe;
    let mut report = ResidualReport::new();

    if opts.seed_check_only {
        let [alg, der] = verify::check_ernst(
            &src.pair,
            &j,
            &samples,
            probe,
            t.ernst_algebraic,
            t.ernst_derivative,
            floor,
        );
        report.push(alg);
        report.push(der);
        report.push(verify::check_positivity(&src.pair, &samples, t.eigen_floor, floor));
        report.extend(verify::check_identity(
            &[Ok(GbdtState::anchor(src.triple.triple()))],
            t.identity,
            floor,
        ));
        let w = write_outputs(cfg, v.mode, opts, None, "none", &report, 1.0, BTreeMap::new())?;
        return Ok(finish(report, 1.0, floor, w.files, Vec::new()));
    }

    let results = par_map(&all, |x, y| -> Result<(CMatrix, CMatrix, f64), GbdtError> {
        let st = src.state(x, y)?;
        let (ht, bht) = transformed_hamiltonians(&st, &src.pair, &j)?;
        let w0 = ernst_w0(&st, &j)?;
        let ju = (&(&(&w0.adjoint() * &j) * &w0) - &j).frobenius_norm() / j.frobenius_norm();
        Ok((ht, bht, ju))
    });
    let mut ju = Vec::new();
    let mut alg = Vec::new();
    let mut eig = Vec::new();
    let mut min_eig = f64::INFINITY;
    let mut stacked = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok((ht, bht, defect)) => {
                ju.push(defect);
                let scale = (ht.frobenius_norm() * bht.frobenius_norm()).max(1.0);
                alg.push(darboux_core::ernst::algebraic_defect(&ht, &bht, &j).frobenius_norm() / scale);
                let mut worst = 0.0f64;
                for h in [&ht, &bht] {
                    if let Ok(ev) = hermitian_eigenvalues(h) {
                        let lo = ev.into_iter().fold(f64::INFINITY, f64::min);
                        min_eig = min_eig.min(lo);
                        worst = worst.max(-lo);
                    }
                }
                eig.push(worst);
                stacked.push(CMatrix::hstack(&ht, &bht).map_err(GbdtError::from));
            }
            Err(e) => stacked.push(Err(e)),
        }
    }
    let n = all.len();
    let field = FieldGrid::from_results(v.grid.clone(), m, 2 * m, stacked);
    report.push(CheckResult::from_residuals("w0_j_unitary", &ju, n, t.j_unitary, floor));
    report.push(CheckResult::from_residuals(
        "ernst_algebraic",
        &alg,
        n,
        t.ernst_algebraic,
        floor,
    ));
    report.push(CheckResult::from_residuals(
        "eigenvalue_floor",
        &eig,
        n,
        t.eigen_floor,
        floor,
    ));
    let tp = TransformedPair { source: &src };
    let [_, der] = verify::check_ernst(&tp, &j, &samples, probe, t.ernst_algebraic, t.ernst_derivative, floor);
    report.push(der);
    report.push(verify::check_resolvent(
        src.triple.curly_a(),
        &samples,
        probe,
        t.ernst_derivative,
        floor,
    ));
    let [_, w0_eq] = verify::check_w0(&src, &samples, probe, t.j_unitary, t.w0_equation, floor);
    report.push(w0_eq);
    report.push(verify::check_w0_integrated(&src, &samples, t.compatibility, floor));
    let zs = verify::z_ring(
        cfg.checks.z_samples,
        cfg.checks.z_center.to_c64(),
        cfg.checks.z_radius,
        0.3,
    );
    report.push(verify::check_ernst_darboux(
        &src, &samples, &zs, probe, t.darboux, floor,
    ));
    report.push(verify::check_spectral_similarity(&src, &samples, t.spectral, floor));
    let coverage = field.coverage();
    let stats = BTreeMap::from([("min_eigenvalue".to_string(), min_eig)]);
    let w = write_outputs(
        cfg,
        v.mode,
        opts,
        Some(&field),
        "[H_tilde | calH_tilde] (m x 2m)",
        &report,
        coverage,
        stats,
    )?;
    Ok(finish(report, coverage, floor, w.files, Vec::new()))
}

fn fmt_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols())
                .map(|j| format!("{:e}{:+e}i", m[(i, j)].re, m[(i, j)].im))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn run_sqrt_demo(cfg: &RunConfig, v: &Validated, opts: &RunOptions) -> Result<Outcome, RunError> {
    let gen = v.generator.as_ref().expect("validated");
    let bg: &Background = v.background.as_ref().expect("validated");
    let t = &cfg.tolerances;
    let floor = t.coverage_floor;
    let a = gen.reconstruct();
    let n = gen.size();
    let scale = a.frobenius_norm().max(1.0);
    let roots = |x: f64, y: f64| -> Result<(CMatrix, CMatrix), GbdtError> {
        let mu_h = C64::new(2.0 * bg.h(y), 0.0);
        let mu_f = C64::new(-2.0 * bg.f(x), 0.0);
        Ok((
            shifted_sqrt(gen, mu_h, &v.branches.h_root)?,
            shifted_sqrt(gen, mu_f, &v.branches.f_root)?,
        ))
    };
    if opts.seed_check_only {
        let report = ResidualReport::new();
        let w = write_outputs(cfg, v.mode, opts, None, "none", &report, 1.0, BTreeMap::new())?;
        return Ok(finish(report, 1.0, floor, w.files, Vec::new()));
    }
    let all: Vec<(f64, f64)> = v.grid.points().collect();
    let results = par_map(&all, roots);
    let mut square = Vec::new();
    let mut comm = Vec::new();
    let mut stacked = Vec::with_capacity(all.len());
    for (r, &(x, y)) in results.into_iter().zip(&all) {
        match r {
            Ok((rh, rf)) => {
                let dh = (&(&rh * &rh) - &a.shift(C64::new(-2.0 * bg.h(y), 0.0))).frobenius_norm();
                let df = (&(&rf * &rf) - &a.shift(C64::new(2.0 * bg.f(x), 0.0))).frobenius_norm();
                square.push(dh.max(df) / scale);
                comm.push(commutator(&rh, &rf).frobenius_norm() / scale);
                stacked.push(CMatrix::hstack(&rh, &rf).map_err(GbdtError::from));
            }
            Err(e) => stacked.push(Err(e)),
        }
    }
    let field = FieldGrid::from_results(v.grid.clone(), n, 2 * n, stacked);
    let mut report = ResidualReport::new();
    report.push(CheckResult::from_residuals(
        "sqrt_square",
        &square,
        all.len(),
        t.sqrt,
        floor,
    ));
    report.push(CheckResult::from_residuals(
        "sqrt_commute",
        &comm,
        all.len(),
        t.sqrt,
        floor,
    ));
    let mut stdout = Vec::new();
    let mut shown = corners(&v.grid);
    shown.dedup();
    for (x, y) in shown {
        if let Ok((rh, rf)) = roots(x, y) {
            stdout.push(format!("R(2h) at xi={x:e} eta={y:e}: {}", fmt_matrix(&rh)));
            stdout.push(format!("R(-2f) at xi={x:e} eta={y:e}: {}", fmt_matrix(&rf)));
        }
    }
    let coverage = field.coverage();
    let w = write_outputs(
        cfg,
        v.mode,
        opts,
        Some(&field),
        "[R(2h(eta)) | R(-2f(xi))] (n x 2n)",
        &report,
        coverage,
        BTreeMap::new(),
    )?;
    Ok(finish(report, coverage, floor, w.files, stdout))
}

/// Re-ingests a σ-model field file and checks it from the tabulated values.
pub fn verify_field(
    path: &Path,
    bg: &Background,
    j: Option<&CMatrix>,
    cfg: &RunConfig,
) -> Result<(ResidualReport, f64), RunError> {
    let field = read_field_csv(path)?;
    let t = &cfg.tolerances;
    let coverage = field.coverage();
    let sol = SigmaSolution::from_field(field, bg);
    let mut report = ResidualReport::new();
    report.push(verify::check_pde_sigma(&sol, t.pde_tabulated, t.coverage_floor)?);
    if let Some(j) = j {
        if j.rows() != sol.field.rows {
            return Err(GbdtError::Precondition(format!(
                "field is {}x{}, J is {}x{}",
                sol.field.rows,
                sol.field.cols,
                j.rows(),
                j.rows()
            ))
            .into());
        }
        report.push(verify::check_j_unitarity(&sol.field, j, t.j_unitary, t.coverage_floor));
    }
    Ok((report, coverage))
}

fn run_verify(cfg: &RunConfig, v: &Validated, opts: &RunOptions) -> Result<Outcome, RunError> {
    let floor = cfg.tolerances.coverage_floor;
    let path = v.field_path.as_ref().expect("validated");
    let bg = v.background.as_ref().expect("validated");
    if opts.seed_check_only {
        read_field_csv(path)?;
        let report = ResidualReport::new();
        return Ok(finish(report, 1.0, floor, Vec::new(), Vec::new()));
    }
    let (report, coverage) = verify_field(path, bg, v.j.as_ref(), cfg)?;
    let w = write_outputs(cfg, v.mode, opts, None, "none", &report, coverage, BTreeMap::new())?;
    Ok(finish(report, coverage, floor, w.files, Vec::new()))
}

/// Validates `cfg` for `mode` and runs it.
pub fn run(mode: Mode, cfg: &RunConfig, opts: &RunOptions) -> Result<Outcome, RunError> {
    let v = cfg.validate(mode)?;
    match mode {
        Mode::Sigma => run_sigma(cfg, &v, opts),
        Mode::Grav => run_grav(cfg, &v, opts),
        Mode::Ernst => run_ernst(cfg, &v, opts),
        Mode::SqrtDemo => run_sqrt_demo(cfg, &v, opts),
        Mode::Verify => run_verify(cfg, &v, opts),
    }
}
