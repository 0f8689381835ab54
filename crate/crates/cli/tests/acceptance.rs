//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::time::Instant;

use darboux::config::{Mode, RunConfig, VerifyConfig};
use darboux::run::{run, RunOptions};
use darboux_core::branchsqrt::{shifted_sqrt, BranchChoice, JordanBlock, JordanSpec};
use darboux_core::ernst::{
    ernst_propagate, seed_hamiltonians, transformed_hamiltonians, ErnstSource, ErnstTriple, HamiltonianFamily,
    HamiltonianField, TransformedPair,
};
use darboux_core::gbdt::{
    explicit_a, explicit_anchor, explicit_pi_jordan2, j_matrix, propagate, s_recursion_jordan2, AField, Background,
    ClosedFormSource, Coefficients, GbdtState, GbdtTriple, JSelector, Profile, PropagatedSource, RootBranches,
    StateSource, PRINCIPAL,
};
use darboux_core::matcore::inv;
use darboux_core::ode::{rk4_path, PathSpec};
use darboux_core::sigma_grav::{grav_d, transform_sigma, SigmaField};
use darboux_core::verify::{self, CheckResult};
use darboux_core::{CMatrix, GbdtError, Grid, MatrixField, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

type Outcome = Result<Verdict, GbdtError>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn grid_points(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    Grid::uniform(lo, hi, n, lo, hi, n).points().collect()
}

fn summary(checks: &[&CheckResult]) -> String {
    checks
        .iter()
        .map(|r| {
            format!(
                "{} {:.2e}/{:.0e}{}",
                r.name,
                r.max,
                r.tolerance,
                if r.pass { "" } else { " (fail)" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn all_pass(checks: &[&CheckResult]) -> bool {
    checks.iter().all(|r| r.pass)
}

// The σ-model example: f = 1 − ξ, h = η, one 2 × 2 Jordan block at −2 + 2i.
fn sigma_background() -> Background {
    Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap()
}

fn sigma_generator() -> JordanSpec {
    JordanSpec::single_block(c(-2.0, 2.0), 2).unwrap()
}

fn sigma_pi0() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.2], &[0.3, 1.0]]).unwrap()
}

fn offdiag() -> CMatrix {
    j_matrix(JSelector::OffDiag, 2).unwrap()
}

fn sigma_source() -> ClosedFormSource {
    ClosedFormSource::new(
        sigma_generator(),
        RootBranches::principal(1),
        sigma_background(),
        sigma_pi0(),
        offdiag(),
    )
    .unwrap()
}

fn explicit_field(gen: &JordanSpec) -> AField {
    AField::Explicit {
        generator: gen.clone(),
        branches: RootBranches::principal(gen.blocks().len()),
    }
}

// The gravitational example: real scalar generator 3, σ₂ signature.
fn grav_source() -> PropagatedSource {
    let gen = JordanSpec::single_block(c(3.0, 0.0), 1).unwrap();
    let bg = sigma_background();
    let a0 = explicit_anchor(&gen, &bg, &RootBranches::principal(1)).unwrap();
    let triple = GbdtTriple::new(
        a0,
        CMatrix::from_real_rows(&[&[0.7]]).unwrap(),
        CMatrix::from_real_rows(&[&[0.8, -0.5]]).unwrap(),
        j_matrix(JSelector::Pauli2, 2).unwrap(),
    )
    .unwrap();
    PropagatedSource::new(triple, bg, explicit_field(&gen), 0.01)
}

fn ernst_source() -> ErnstSource {
    let j = offdiag();
    let curly = CMatrix::from_rows(&[&[c(1.5, 1.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(1.5, 1.0)]]).unwrap();
    let pi0 = CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.2, 0.0)], &[c(0.0, 0.3), c(1.0, 0.0)]]).unwrap();
    let base = CMatrix::from_real_rows(&[&[0.8, 0.4], &[0.4, 0.2]]).unwrap();
    let triple = ErnstTriple::with_sylvester(curly, pi0, j.clone()).unwrap();
    let pair = seed_hamiltonians(
        HamiltonianFamily::ShiftProfile {
            coeffs: vec![1.0, 0.0, 1.0],
            base,
        },
        &j,
    )
    .unwrap();
    ErnstSource::new(triple, pair, 0.01).unwrap().with_fixed_steps(20)
}

/// Square roots of shifted Jordan matrices.
fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1_0001);
    let (mut worst_sq, mut worst_comm) = (0.0f64, 0.0f64);
    let mut specs = 0;
    while specs < 200 {
        let n = rng.gen_range(1..=6);
        let mut blocks = Vec::new();
        let mut left = n;
        while left > 0 {
            let size = rng.gen_range(1..=left.min(4));
            blocks.push(JordanBlock {
                eigenvalue: c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                size,
            });
            left -= size;
        }
        let e = CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            c(d + 0.4 * rng.gen_range(-1.0..1.0), 0.4 * rng.gen_range(-1.0..1.0))
        });
        let Ok(spec) = JordanSpec::new(blocks, e) else { continue };
        let mut shifts = Vec::new();
        while shifts.len() < 5 {
            let mu = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            if spec.eigenvalues().all(|l| (l - mu).norm() >= 0.5) {
                shifts.push(mu);
            }
        }
        let signs: Vec<i8> = (0..spec.blocks().len())
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        let branch = BranchChoice::from_signs(signs)?;
        let a = na(spec.reconstruct());
        let scale = a.norm().max(1.0);
        let mut roots = Vec::new();
        for &mu in &shifts {
            let r = na(&shifted_sqrt(&spec, mu, &branch)?);
            let target = &a - DMatrix::<C64>::identity(n, n) * mu;
            worst_sq = worst_sq.max((&r * &r - target).norm() / scale);
            roots.push(r);
        }
        for i in 0..roots.len() {
            for k in i + 1..roots.len() {
                worst_comm = worst_comm.max((&roots[i] * &roots[k] - &roots[k] * &roots[i]).norm());
            }
        }
        specs += 1;
    }
    Ok(Verdict {
        pass: worst_sq <= 1e-10 && worst_comm <= 1e-10,
        detail: format!("200 specs x 5 shifts: square {worst_sq:.2e}/1e-10, commutator {worst_comm:.2e}/1e-10"),
    })
}

/// Closed-form concordance for f = −ξ, h = η and the 2 × 2 Jordan block at 2.
fn criterion_2() -> Outcome {
    let cc = c(2.0, 0.0);
    let bg = Background::exp_diag(Profile::affine(0.0, -1.0), Profile::affine(0.0, 1.0), 1)?;
    let spec = JordanSpec::single_block(cc, 2)?;
    let br = RootBranches::principal(1);
    let j = offdiag();
    let pts = grid_points(-0.3, 0.3, 13);
    let mat = |rows: [[f64; 2]; 2]| CMatrix::from_real_rows(&[&rows[0], &rows[1]]).unwrap();

    let mut worst_a = 0.0f64;
    for &(x, y) in &pts {
        let (nu, om) = ((2.0 - 2.0 * x).sqrt(), (2.0 - 2.0 * y).sqrt());
        let a = (om - nu) / (om + nu);
        let b = -a / (nu * om);
        let got = explicit_a(x, y, &spec, &bg, &br)?;
        let want_minus = mat([[1.0, (nu - om) / (2.0 * om * nu * nu)], [0.0, 1.0]]).scale_real(-(om + nu) / (2.0 * nu));
        let want_plus = mat([[1.0, (om - nu) / (2.0 * nu * om * om)], [0.0, 1.0]]).scale_real((om + nu) / (2.0 * om));
        worst_a = worst_a
            .max(got.rel_diff(&mat([[a, b], [0.0, a]])))
            .max(inv(&got.shift(c(-1.0, 0.0)))?.rel_diff(&want_minus))
            .max(inv(&got.shift(c(1.0, 0.0)))?.rel_diff(&want_plus));
    }
    let ok_a = worst_a <= 1e-12;

    let factor = sigma_pi0();
    let start = explicit_pi_jordan2(0.0, 0.0, cc, &factor, 1)?;
    let mut worst_b = 0.0f64;
    for &(x, y) in pts.iter().filter(|p| **p != (0.0, 0.0)) {
        let mut rhs = |px: f64, py: f64, dx: f64, dy: f64, st: &[CMatrix]| -> Result<Vec<CMatrix>, GbdtError> {
            let a = explicit_a(px, py, &spec, &bg, &br)?;
            let ami = inv(&a.shift(c(-1.0, 0.0)))?;
            let api = inv(&a.shift(c(1.0, 0.0)))?;
            let d = &(&(&ami * &st[0]) * &bg.q(px, py)).scale_real(dx)
                + &(&(&api * &st[0]) * &bg.big_q(px, py)).scale_real(dy);
            Ok(vec![d])
        };
        let path = PathSpec::l_path((x, y), 0.005)?;
        let pi = rk4_path(&path, 1, vec![start.clone()], &mut rhs)?.remove(0);
        worst_b = worst_b.max(pi.rel_diff(&explicit_pi_jordan2(x, y, cc, &factor, 1)?));
    }
    let ok_b = worst_b <= 1e-8;

    // S from the successive recursion against S propagated from the
    // recursion's own anchor value.
    let mut worst_c = 0.0f64;
    let mut first_err: Option<String> = None;
    let mut evaluated = 0;
    let a_field = explicit_field(&spec);
    let anchor = (|| -> Result<GbdtTriple, GbdtError> {
        let a0 = explicit_a(0.0, 0.0, &spec, &bg, &br)?;
        let pi0 = explicit_pi_jordan2(0.0, 0.0, cc, &factor, 1)?;
        let s0 = s_recursion_jordan2((0.0, 0.0), &a0, &pi0, &j)?;
        GbdtTriple::new(a0, s0, pi0, j.clone())
    })();
    for &(x, y) in pts.iter().filter(|p| **p != (0.0, 0.0)) {
        let r = (|| -> Result<f64, GbdtError> {
            let triple = anchor.clone()?;
            let a = explicit_a(x, y, &spec, &bg, &br)?;
            let pi = explicit_pi_jordan2(x, y, cc, &factor, 1)?;
            let s_rec = s_recursion_jordan2((x, y), &a, &pi, &j)?;
            let s_prop = propagate(&triple, &bg, &a_field, &PathSpec::l_path((x, y), 0.01)?)?
                .state
                .s;
            Ok(s_prop.rel_diff(&s_rec))
        })();
        match r {
            Ok(v) => {
                evaluated += 1;
                worst_c = worst_c.max(v);
            }
            Err(e) => {
                first_err.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let ok_c = first_err.is_none() && worst_c <= 1e-7;
    let c_detail = match &first_err {
        None => format!("{worst_c:.2e}/1e-7"),
        Some(e) => format!("{evaluated}/{} points evaluated, first error: {e}", pts.len() - 1),
    };
    Ok(Verdict {
        pass: ok_a && ok_b && ok_c,
        detail: format!(
            "(a) {worst_a:.2e}/1e-12 {}; (b) {worst_b:.2e}/1e-8 {}; (c) {c_detail} {}",
            if ok_a { "ok" } else { "FAIL" },
            if ok_b { "ok" } else { "FAIL" },
            if ok_c { "ok" } else { "FAIL" }
        ),
    })
}

/// Triple identity at the anchor and along every test path.
fn criterion_3() -> Outcome {
    let sigma = sigma_source();
    let grav = grav_source();
    let ernst = ernst_source();
    let anchors = [
        sigma.triple().identity_residual(),
        grav.triple.identity_residual(),
        ernst.triple.triple().identity_residual(),
    ];
    let worst_anchor = anchors.iter().cloned().fold(0.0, f64::max);

    let gen = sigma_generator();
    let integrated = GbdtTriple::with_sylvester(gen.reconstruct().clone(), sigma_pi0(), offdiag())?;
    let targets = [
        (0.3, 0.3),
        (-0.3, 0.2),
        (0.25, -0.3),
        (-0.2, -0.25),
        (0.1, 0.05),
        (-0.05, 0.3),
    ];
    let mut paths = Vec::new();
    for &t in &targets {
        paths.push(PathSpec::l_path(t, 0.01)?);
        paths.push(PathSpec::l_path_eta_first(t, 0.01)?);
        paths.push(PathSpec::staircase(t, 4, 0.01)?);
    }
    let mut states: Vec<Result<GbdtState, GbdtError>> = Vec::new();
    for path in &paths {
        states.push(propagate(sigma.triple(), sigma.background(), &sigma.a_field(), path).map(|p| p.state));
        states.push(propagate(&integrated, sigma.background(), &AField::Integrated, path).map(|p| p.state));
        states.push(propagate(&grav.triple, &grav.bg, &grav.a_field, path).map(|p| p.state));
        let (ex, ey) = path.end();
        if ex.abs() <= 0.2 && ey.abs() <= 0.2 {
            states.push(ernst_propagate(&ernst.triple, &ernst.pair, path).map(|p| p.state));
        }
    }
    let [id, herm] = verify::check_identity(&states, 1e-8, 1.0);
    Ok(Verdict {
        pass: worst_anchor <= 1e-10 && id.pass,
        detail: format!(
            "anchors {worst_anchor:.2e}/1e-10; {} path states: {} (s_hermitian {:.2e})",
            states.len(),
            summary(&[&id]),
            herm.max
        ),
    })
}

fn off_cut(w: C64) -> bool {
    w.norm() > 0.1 && !(w.re < 0.0 && w.im.abs() < 0.1)
}

/// λ against its ODEs at random points.
fn criterion_4() -> Outcome {
    let bg = sigma_background();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1_0004);
    let mut samples = Vec::new();
    while samples.len() < 100 {
        let (x, y) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if !off_cut(z - 2.0 * bg.h(y)) || !off_cut(z + 2.0 * bg.f(x)) {
            continue;
        }
        let l = darboux_core::gbdt::lambda_of(z, x, y, &bg, PRINCIPAL)?;
        if (l - 1.0).norm() < 0.05 || (l + 1.0).norm() < 0.05 {
            continue;
        }
        samples.push((z, x, y));
    }
    let r = verify::check_lambda_odes(&bg, &samples, PRINCIPAL, 1e-5, 1e-6, 1.0);
    Ok(Verdict {
        pass: r.pass,
        detail: format!("100 samples: {}", summary(&[&r])),
    })
}

/// The transformed σ-model field on a 61 × 61 grid.
fn criterion_5() -> Outcome {
    let src = sigma_source();
    let grid = Grid::uniform(-0.3, 0.3, 61, -0.3, 0.3, 61);
    let sol = transform_sigma(&src, &grid)?;
    let field = SigmaField { source: &src };
    let pts: Vec<(f64, f64)> = grid.points().collect();
    let pde = verify::check_pde_probe(&field, src.background(), &pts, 1e-3, 1e-5, 0.9);
    let ju = verify::check_j_unitarity(&sol.field, src.j(), 1e-9, 0.9);
    let corrupt = |x: f64, y: f64| -> Result<CMatrix, GbdtError> {
        let mut u = field.eval(x, y)?;
        u[(0, 1)] += c(0.1 * (1.0 + x * x + 3.0 * y), 0.0);
        Ok(u)
    };
    let sparse: Vec<(f64, f64)> = pts.iter().step_by(37).cloned().collect();
    let control = verify::check_pde_probe(&corrupt, src.background(), &sparse, 1e-3, 1e-5, 0.9);
    Ok(Verdict {
        pass: pde.pass && ju.pass && !control.pass,
        detail: format!(
            "{} (coverage {:.3}); perturbed field {:.2e} {}",
            summary(&[&pde, &ju]),
            pde.coverage,
            control.max,
            if control.pass { "NOT caught" } else { "caught" }
        ),
    })
}

/// The gravitational reduction with a real triple.
fn criterion_6() -> Outcome {
    let src = grav_source();
    let d = grav_d(&src.triple, &src.bg)?;
    let field = SigmaField { source: &src };
    let pts = grid_points(-0.3, 0.3, 31);
    let (mut imag, mut det_hat, mut det_tilde) = (Vec::new(), Vec::new(), Vec::new());
    for &(x, y) in &pts {
        let Ok(hat) = field.eval(x, y) else { continue };
        let alpha = src.bg.alpha(x, y);
        let tilde = hat.scale_real(alpha / d.sqrt());
        imag.push(tilde.max_imag());
        det_hat.push((hat.determinant()? - c(d, 0.0)).norm());
        det_tilde.push((tilde.determinant()? - c(alpha * alpha, 0.0)).norm() / (alpha * alpha));
    }
    let n = pts.len();
    let r_imag = CheckResult::from_residuals("imag", &imag, n, 1e-9, 1.0);
    let r_hat = CheckResult::from_residuals("det_hat_minus_d", &det_hat, n, 1e-8, 1.0);
    let r_tilde = CheckResult::from_residuals("det_tilde_vs_alpha2", &det_tilde, n, 1e-8, 1.0);
    let checks = [&r_imag, &r_hat, &r_tilde];
    Ok(Verdict {
        pass: all_pass(&checks),
        detail: format!("31x31, d = {d:.6}: {}", summary(&checks)),
    })
}

/// Π and S agree at the end of the ξ-first and η-first paths.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1_0007);
    let targets: Vec<(f64, f64)> = (0..20)
        .map(|_| {
            let mut v = || {
                let t: f64 = rng.gen_range(0.02..0.3);
                if rng.gen_bool(0.5) {
                    t
                } else {
                    -t
                }
            };
            (v(), v())
        })
        .collect();
    let sigma = sigma_source();
    let grav = grav_source();
    let gen = sigma_generator();
    let integrated = GbdtTriple::with_sylvester(gen.reconstruct().clone(), sigma_pi0(), offdiag())?;
    let mut a = verify::check_compatibility(
        sigma.triple(),
        sigma.background(),
        &sigma.a_field(),
        &targets,
        0.01,
        1e-7,
        1.0,
    );
    a.name = "sigma_explicit".into();
    let mut b = verify::check_compatibility(
        &integrated,
        sigma.background(),
        &AField::Integrated,
        &targets,
        0.01,
        1e-7,
        1.0,
    );
    b.name = "sigma_integrated".into();
    let mut g = verify::check_compatibility(&grav.triple, &grav.bg, &grav.a_field, &targets, 0.01, 1e-7, 1.0);
    g.name = "grav".into();
    let checks = [&a, &b, &g];
    Ok(Verdict {
        pass: all_pass(&checks),
        detail: format!("20 targets: {}", summary(&checks)),
    })
}

fn sorted_spectrum(m: &CMatrix) -> Vec<C64> {
    let (_, t) = na(m).schur().unpack();
    let mut ev: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// The Ernst-type reduction.
fn criterion_8() -> Outcome {
    let src = ernst_source();
    let j = src.j().clone();
    let pts = grid_points(-0.2, 0.2, 5);
    let [ju, w0_eq] = verify::check_w0(&src, &pts, 1e-4, 1e-9, 1e-5, 1.0);
    let zs = verify::z_ring(8, c(0.0, 0.0), 4.0, 0.3);
    let dar = verify::check_ernst_darboux(&src, &pts, &zs, 1e-4, 1e-5, 1.0);
    let tp = TransformedPair { source: &src };
    let [alg, der] = verify::check_ernst(&tp, &j, &pts, 1e-4, 1e-10, 1e-6, 1.0);
    let floor = verify::check_positivity(&tp, &pts, 1e-10, 1.0);

    let mut spectra = Vec::new();
    for &(x, y) in &pts {
        let st = src.state(x, y)?;
        let (ht, bht) = transformed_hamiltonians(&st, &src.pair, &j)?;
        let mut worst = 0.0f64;
        for (a, b) in [(ht, src.pair.h(x, y)?), (bht, src.pair.big_h(x, y)?)] {
            let ea = sorted_spectrum(&(&j * &a));
            let eb = sorted_spectrum(&(&j * &b));
            let scale = eb.iter().map(|l| l.norm()).fold(1.0, f64::max);
            for (p, q) in ea.iter().zip(&eb) {
                worst = worst.max((p - q).norm() / scale);
            }
        }
        spectra.push(worst);
    }
    let spec = CheckResult::from_residuals("spectra_schur", &spectra, pts.len(), 1e-8, 1.0);
    let checks = [&ju, &w0_eq, &dar, &alg, &der, &floor, &spec];
    Ok(Verdict {
        pass: all_pass(&checks),
        detail: format!("25 points, 8 z: {}", summary(&checks)),
    })
}

/// ŵ = w_A w solves the transformed linear system.
fn criterion_9() -> Outcome {
    let src = sigma_source();
    let zs = verify::z_ring(10, c(0.0, 0.0), 3.0, 0.4);
    let pts = [(0.1, 0.05), (-0.1, 0.15), (0.2, -0.2)];
    let r = verify::check_transformed_system(&src, &pts, &zs, PRINCIPAL, 40, 1e-4, 1e-5, 1.0);
    Ok(Verdict {
        pass: r.pass,
        detail: format!("10 z x 3 points: {}", summary(&[&r])),
    })
}

fn config(name: &str, grid: Option<usize>) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    if let Some(n) = grid {
        v["domain"]["nx"] = n.into();
        v["domain"]["ny"] = n.into();
    }
    RunConfig::from_json(&v.to_string()).unwrap()
}

// `verify_input` is shared so that both verify configurations are identical.
fn run_suite(dir: &Path, threads: usize, verify_input: &Path) -> BTreeMap<String, Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let opts = RunOptions {
        out_dir: dir.to_path_buf(),
        seed_check_only: false,
    };
    let jobs = [
        (Mode::Sigma, config("sigma.json", Some(31))),
        (Mode::Grav, config("grav.json", Some(9))),
        (Mode::Ernst, config("ernst.json", Some(11))),
        (Mode::SqrtDemo, config("sqrt-demo.json", None)),
    ];
    pool.install(|| {
        for (mode, cfg) in &jobs {
            run(*mode, cfg, &opts).unwrap();
        }
        let mut vcfg = config("sigma.json", Some(31));
        vcfg.mode = Some(Mode::Verify);
        vcfg.verify = Some(VerifyConfig {
            field: verify_input.to_path_buf(),
        });
        run(Mode::Verify, &vcfg, &opts).unwrap();
    });
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let p: PathBuf = e.unwrap().path();
        files.insert(
            p.file_name().unwrap().to_string_lossy().into_owned(),
            fs::read(&p).unwrap(),
        );
    }
    files
}

/// Two runs of every mode produce identical bytes.
fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("a").join("sigma.csv");
    let a = run_suite(&tmp.path().join("a"), 1, &input);
    let b = run_suite(&tmp.path().join("b"), 2, &input);
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let same_names = a.keys().eq(b.keys());
    Ok(Verdict {
        pass: a.len() >= 9 && same_names && differing.is_empty(),
        detail: format!("{} files compared (1 vs 2 threads), differing: {differing:?}", a.len()),
    })
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let v = match panic::catch_unwind(f) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict {
                pass: false,
                detail: format!("error: {e}"),
            },
            Err(_) => Verdict {
                pass: false,
                detail: "panicked".into(),
            },
        };
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} [{:.1}s] {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
