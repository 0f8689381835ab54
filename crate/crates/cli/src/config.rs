//! JSON run configuration and its validation into core objects.

use std::fmt;
use std::path::PathBuf;

use darboux_core::branchsqrt::{BranchChoice, JordanBlock, JordanSpec};
use darboux_core::ernst::{seed_hamiltonians, HamiltonianFamily, HamiltonianPair};
use darboux_core::gbdt::{j_matrix, Background, JSelector, Profile, RootBranches, SignPair};
use darboux_core::{CMatrix, Grid, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sigma,
    Grav,
    Ernst,
    Verify,
    SqrtDemo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sigma => "sigma",
            Mode::Grav => "grav",
            Mode::Ernst => "ernst",
            Mode::Verify => "verify",
            Mode::SqrtDemo => "sqrt-demo",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A number that is either real or written as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    pub fn to_c64(self) -> C64 {
        match self {
            Num::Real(x) => C64::new(x, 0.0),
            Num::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// Matrix written as a list of rows.
pub type MatrixSpec = Vec<Vec<Num>>;

fn to_matrix(name: &str, rows: &MatrixSpec, errors: &mut Vec<String>) -> Option<CMatrix> {
    let data: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|n| n.to_c64()).collect()).collect();
    let refs: Vec<&[C64]> = data.iter().map(|r| r.as_slice()).collect();
    match CMatrix::from_rows(&refs) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    /// Jordan blocks of the generator as `[re, im, size]`.
    pub blocks: Vec<(f64, f64, usize)>,
    /// Similarity `E` with generator `E·J·E⁻¹`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<MatrixSpec>,
    /// `S(0,0)`; solved from the identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<MatrixSpec>,
    pub pi0: MatrixSpec,
    pub j: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundConfig {
    /// Ascending polynomial coefficients of `f(ξ)`.
    pub f: Vec<f64>,
    /// Ascending polynomial coefficients of `h(η)`.
    pub h: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: String,
    #[serde(default = "default_p")]
    pub p: usize,
}

fn default_seed() -> String {
    "exp-diag".into()
}
fn default_p() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    ClosedForm,
    Propagated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AFieldKind {
    Explicit,
    Integrated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default = "default_kind")]
    pub kind: SourceKind,
    #[serde(default = "default_a_field")]
    pub a_field: AFieldKind,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_steps: Option<usize>,
}

fn default_kind() -> SourceKind {
    SourceKind::ClosedForm
}
fn default_a_field() -> AFieldKind {
    AFieldKind::Explicit
}
fn default_max_step() -> f64 {
    0.01
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            a_field: default_a_field(),
            max_step: default_max_step(),
            fixed_steps: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_root: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_root: Option<Vec<i8>>,
    #[serde(default = "default_lambda")]
    pub lambda: [i8; 2],
}

fn default_lambda() -> [i8; 2] {
    [1, 1]
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            h_root: None,
            f_root: None,
            lambda: default_lambda(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub pde: f64,
    pub pde_tabulated: f64,
    pub j_unitary: f64,
    pub identity: f64,
    pub compatibility: f64,
    pub skew: f64,
    pub imag: f64,
    pub det: f64,
    pub sqrt: f64,
    pub ernst_algebraic: f64,
    pub ernst_derivative: f64,
    pub w0_equation: f64,
    pub darboux: f64,
    pub eigen_floor: f64,
    pub spectral: f64,
    pub coverage_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pde: 1e-5,
            pde_tabulated: 1e-3,
            j_unitary: 1e-9,
            identity: 1e-8,
            compatibility: 1e-7,
            skew: 1e-9,
            imag: 1e-9,
            det: 1e-8,
            sqrt: 1e-10,
            ernst_algebraic: 1e-10,
            ernst_derivative: 1e-6,
            w0_equation: 1e-5,
            darboux: 1e-5,
            eigen_floor: 1e-10,
            spectral: 1e-8,
            coverage_floor: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    /// Finite-difference probe for re-evaluated fields.
    pub probe: f64,
    /// Every `stride`-th grid point (in both directions) is probed.
    pub stride: usize,
    /// Grid points used by the more expensive checks.
    pub sample_points: usize,
    /// Targets for the dual-path check.
    pub path_targets: usize,
    /// Hidden spectral parameters per verification point.
    pub z_samples: usize,
    pub z_center: Num,
    pub z_radius: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            probe: 1e-3,
            stride: 1,
            sample_points: 25,
            path_targets: 4,
            z_samples: 8,
            z_center: Num::Real(0.0),
            z_radius: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Constant { g: MatrixSpec },
    ShiftProfile { coeffs: Vec<f64>, base: MatrixSpec },
    ConstantPair { h: MatrixSpec, big_h: MatrixSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErnstConfig {
    pub family: FamilyConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// A field CSV written by the `sigma` mode.
    pub field: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<BackgroundConfig>,
    #[serde(default)]
    pub source: SourceConfig,
    pub domain: DomainConfig,
    #[serde(default)]
    pub branches: BranchConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ernst: Option<ErnstConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

/// Everything a run needs, built and checked against the core preconditions.
#[derive(Clone, Debug)]
pub struct Validated {
    pub mode: Mode,
    pub grid: Grid,
    pub generator: Option<JordanSpec>,
    pub j: Option<CMatrix>,
    pub pi0: Option<CMatrix>,
    pub s0: Option<CMatrix>,
    pub background: Option<Background>,
    pub branches: RootBranches,
    pub lambda_branch: SignPair,
    pub pair: Option<HamiltonianPair>,
    pub field_path: Option<PathBuf>,
}

/// All problems found in a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationErrors(pub Vec<String>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration problem(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

fn check_positive(name: &str, v: f64, errors: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        errors.push(format!("{name} must be positive and finite, got {v}"));
    }
}

fn branch_choice(name: &str, signs: &Option<Vec<i8>>, blocks: usize, errors: &mut Vec<String>) -> BranchChoice {
    match signs {
        None => BranchChoice::principal(blocks),
        Some(s) if s.len() != blocks => {
            errors.push(format!(
                "branches.{name} needs one sign per Jordan block ({blocks}), got {}",
                s.len()
            ));
            BranchChoice::principal(blocks)
        }
        Some(s) => BranchChoice::from_signs(s.clone()).unwrap_or_else(|e| {
            errors.push(format!("branches.{name}: {e}"));
            BranchChoice::principal(blocks)
        }),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ValidationErrors> {
        serde_json::from_str(text).map_err(|e| ValidationErrors(vec![format!("config does not parse: {e}")]))
    }

    /// Checks the whole configuration for `mode`, reporting every violation.
    pub fn validate(&self, mode: Mode) -> Result<Validated, ValidationErrors> {
        let mut errors = Vec::new();
        if let Some(m) = self.mode {
            if m != mode {
                errors.push(format!("config is for mode {m}, but {mode} was requested"));
            }
        }

        let d = &self.domain;
        if d.nx == 0 || d.ny == 0 {
            errors.push("domain.nx and domain.ny must be at least 1".into());
        }
        for (name, [a, b]) in [("xi", d.xi), ("eta", d.eta)] {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                errors.push(format!(
                    "domain.{name} must be a finite interval [lo, hi], got [{a}, {b}]"
                ));
            }
        }
        let grid = Grid::uniform(d.xi[0], d.xi[1], d.nx.max(1), d.eta[0], d.eta[1], d.ny.max(1));

        let t = &self.tolerances;
        for (name, v) in [
            ("pde", t.pde),
            ("pde_tabulated", t.pde_tabulated),
            ("j_unitary", t.j_unitary),
            ("identity", t.identity),
            ("compatibility", t.compatibility),
            ("skew", t.skew),
            ("imag", t.imag),
            ("det", t.det),
            ("sqrt", t.sqrt),
            ("ernst_algebraic", t.ernst_algebraic),
            ("ernst_derivative", t.ernst_derivative),
            ("w0_equation", t.w0_equation),
            ("darboux", t.darboux),
            ("eigen_floor", t.eigen_floor),
            ("spectral", t.spectral),
        ] {
            check_positive(&format!("tolerances.{name}"), v, &mut errors);
        }
        if !(0.0..=1.0).contains(&t.coverage_floor) {
            errors.push(format!(
                "tolerances.coverage_floor must lie in [0, 1], got {}",
                t.coverage_floor
            ));
        }
        check_positive("checks.probe", self.checks.probe, &mut errors);
        check_positive("checks.z_radius", self.checks.z_radius, &mut errors);
        check_positive("source.max_step", self.source.max_step, &mut errors);
        if self.checks.stride == 0 {
            errors.push("checks.stride must be at least 1".into());
        }
        if self.source.fixed_steps == Some(0) {
            errors.push("source.fixed_steps must be at least 1".into());
        }

        let needs_triple = matches!(mode, Mode::Sigma | Mode::Grav | Mode::Ernst | Mode::SqrtDemo);
        let needs_background = matches!(mode, Mode::Sigma | Mode::Grav | Mode::Verify | Mode::SqrtDemo);

        let mut generator = None;
        let mut j = None;
        let mut pi0 = None;
        let mut s0 = None;
        let mut branches = RootBranches::principal(1);
        match &self.triple {
            None if needs_triple => errors.push(format!("mode {mode} needs a triple")),
            None => {}
            Some(tc) => {
                let blocks: Vec<JordanBlock> = tc
                    .blocks
                    .iter()
                    .map(|&(re, im, size)| JordanBlock {
                        eigenvalue: C64::new(re, im),
                        size,
                    })
                    .collect();
                let nblocks = blocks.len();
                let spec = match &tc.similarity {
                    None => JordanSpec::jordan(blocks),
                    Some(e) => match to_matrix("triple.similarity", e, &mut errors) {
                        Some(e) => JordanSpec::new(blocks, e),
                        None => JordanSpec::jordan(blocks),
                    },
                };
                match spec {
                    Ok(s) => generator = Some(s),
                    Err(e) => errors.push(format!("triple.blocks: {e}")),
                }
                branches = RootBranches {
                    h_root: branch_choice("h_root", &self.branches.h_root, nblocks, &mut errors),
                    f_root: branch_choice("f_root", &self.branches.f_root, nblocks, &mut errors),
                };
                pi0 = to_matrix("triple.pi0", &tc.pi0, &mut errors);
                s0 = tc.s0.as_ref().and_then(|s| to_matrix("triple.s0", s, &mut errors));
                match JSelector::parse(&tc.j) {
                    None => errors.push(format!("triple.j must be offdiag, i-offdiag or pauli2, got {:?}", tc.j)),
                    Some(sel) => match pi0.as_ref().map(|p| j_matrix(sel, p.cols())) {
                        Some(Ok(m)) => j = Some(m),
                        Some(Err(e)) => errors.push(format!("triple.j: {e}")),
                        None => {}
                    },
                }
                if let (Some(g), Some(p)) = (&generator, &pi0) {
                    if p.rows() != g.size() {
                        errors.push(format!("triple.pi0 must have n = {} rows, got {}", g.size(), p.rows()));
                    }
                }
                if let (Some(g), Some(s)) = (&generator, &s0) {
                    if s.shape() != (g.size(), g.size()) {
                        errors.push(format!("triple.s0 must be {n}x{n}", n = g.size()));
                    }
                }
                if tc.s0.is_some() && self.source.kind == SourceKind::ClosedForm && mode != Mode::Ernst {
                    errors.push("triple.s0 cannot be given with source.kind = closed-form (it is derived)".into());
                }
            }
        }

        let mut background = None;
        match &self.background {
            None if needs_background => errors.push(format!("mode {mode} needs a background")),
            None => {}
            Some(bc) => {
                if bc.seed != "exp-diag" {
                    errors.push(format!("background.seed must be exp-diag, got {:?}", bc.seed));
                } else if bc.f.is_empty() || bc.h.is_empty() {
                    errors.push("background.f and background.h need at least one coefficient".into());
                } else {
                    match Background::exp_diag(
                        Profile::polynomial(bc.f.clone()),
                        Profile::polynomial(bc.h.clone()),
                        bc.p,
                    ) {
                        Ok(bg) => {
                            if let Some(jm) = &j {
                                if jm.rows() != 2 * bc.p {
                                    errors.push(format!(
                                        "background.p = {} needs m = {}, but J is {}x{}",
                                        bc.p,
                                        2 * bc.p,
                                        jm.rows(),
                                        jm.rows()
                                    ));
                                }
                            }
                            background = Some(bg);
                        }
                        Err(e) => errors.push(format!("background: {e}")),
                    }
                }
            }
        }

        let mut pair = None;
        if mode == Mode::Ernst {
            match (&self.ernst, &j) {
                (None, _) => errors.push("mode ernst needs an ernst section".into()),
                (Some(ec), Some(jm)) => {
                    let family = match &ec.family {
                        FamilyConfig::Constant { g } => {
                            to_matrix("ernst.family.g", g, &mut errors).map(HamiltonianFamily::Constant)
                        }
                        FamilyConfig::ShiftProfile { coeffs, base } => {
                            to_matrix("ernst.family.base", base, &mut errors).map(|base| {
                                HamiltonianFamily::ShiftProfile {
                                    coeffs: coeffs.clone(),
                                    base,
                                }
                            })
                        }
                        FamilyConfig::ConstantPair { h, big_h } => {
                            match (
                                to_matrix("ernst.family.h", h, &mut errors),
                                to_matrix("ernst.family.big_h", big_h, &mut errors),
                            ) {
                                (Some(h), Some(big_h)) => Some(HamiltonianFamily::ConstantPair { h, big_h }),
                                _ => None,
                            }
                        }
                    };
                    if let Some(f) = family {
                        match seed_hamiltonians(f, jm) {
                            Ok(p) => pair = Some(p),
                            Err(e) => errors.push(format!("ernst.family: {e}")),
                        }
                    }
                }
                (Some(_), None) => {}
            }
        }

        let field_path = match (&self.verify, mode) {
            (Some(v), _) => Some(v.field.clone()),
            (None, Mode::Verify) => {
                errors.push("mode verify needs verify.field".into());
                None
            }
            (None, _) => None,
        };

        for (name, s) in [
            ("lambda[0]", self.branches.lambda[0]),
            ("lambda[1]", self.branches.lambda[1]),
        ] {
            if s != 1 && s != -1 {
                errors.push(format!("branches.{name} must be 1 or -1, got {s}"));
            }
        }

        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        Ok(Validated {
            mode,
            grid,
            generator,
            j,
            pi0,
            s0,
            background,
            branches,
            lambda_branch: (self.branches.lambda[0], self.branches.lambda[1]),
            pair,
            field_path,
        })
    }
}
