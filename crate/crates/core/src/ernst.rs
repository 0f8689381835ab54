//! The Ernst-type system `JH − Jℋ + i[JH, Jℋ] = 0`, `H_η = ℋ_ξ` and its
//! Darboux matrix built from the resolvent field `A = (𝒜 − (ξ+η)I)⁻¹`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::GbdtError;
use crate::gbdt::{darboux_matrix, validate_j, GbdtState, GbdtTriple, RICHARDSON_TOL};
use crate::matcore::{commutator, hermitian_eigenvalues, inv, inverse, CMatrix, C64, I};
use crate::ode::{rk4_path_checked, PathSpec};

/// Lowest admissible eigenvalue of a positive semidefinite Hamiltonian.
pub const PSD_FLOOR: f64 = -1e-10;
/// Tolerance on the algebraic line of the system for seed pairs.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// The closed-form seed families.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianFamily {
    /// `H = ℋ = G` constant.
    Constant(CMatrix),
    /// `H = ℋ = p(ξ + η)·B` for a real polynomial `p` (ascending coefficients).
    ShiftProfile { coeffs: Vec<f64>, base: CMatrix },
    /// Constant `H ≠ ℋ`; only accepted when the algebraic line holds.
    ConstantPair { h: CMatrix, big_h: CMatrix },
}

/// A pair of Hamiltonian fields `(H, ℋ)`.
pub trait HamiltonianField: Send + Sync {
    fn h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError>;
    fn big_h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError>;
}

/// `JH − Jℋ + i[JH, Jℋ]`.
pub fn algebraic_defect(h: &CMatrix, big_h: &CMatrix, j: &CMatrix) -> CMatrix {
    let (jh, jbh) = (j * h, j * big_h);
    &(&jh - &jbh) + &commutator(&jh, &jbh).scale(I)
}

fn poly(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

fn min_eigenvalue(m: &CMatrix) -> Result<f64, GbdtError> {
    Ok(hermitian_eigenvalues(m)?.into_iter().fold(f64::INFINITY, f64::min))
}

fn check_psd(m: &CMatrix) -> Result<(), GbdtError> {
    if m.hermitian_defect() > 1e-12 * m.frobenius_norm().max(1.0) {
        return Err(GbdtError::Precondition("Hamiltonian must be Hermitian".into()));
    }
    let min = min_eigenvalue(m)?;
    if min < PSD_FLOOR {
        return Err(GbdtError::IndefiniteHamiltonian { min_eigenvalue: min });
    }
    Ok(())
}

/// A validated seed pair.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianPair {
    family: HamiltonianFamily,
    m: usize,
}

impl HamiltonianPair {
    pub fn family(&self) -> &HamiltonianFamily {
        &self.family
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

impl HamiltonianField for HamiltonianPair {
    fn h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        match &self.family {
            HamiltonianFamily::Constant(g) => Ok(g.clone()),
            HamiltonianFamily::ShiftProfile { coeffs, base } => {
                let v = poly(coeffs, xi + eta);
                if v < 0.0 {
                    return Err(GbdtError::IndefiniteHamiltonian { min_eigenvalue: v });
                }
                Ok(base.scale_real(v))
            }
            HamiltonianFamily::ConstantPair { h, .. } => Ok(h.clone()),
        }
    }

    fn big_h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        match &self.family {
            HamiltonianFamily::ConstantPair { big_h, .. } => Ok(big_h.clone()),
            _ => self.h(xi, eta),
        }
    }
}

/// Validates a seed family against `J`.
pub fn seed_hamiltonians(family: HamiltonianFamily, j: &CMatrix) -> Result<HamiltonianPair, GbdtError> {
    validate_j(j)?;
    let m = j.rows();
    let shape_ok = |h: &CMatrix| h.shape() == (m, m);
    match &family {
        HamiltonianFamily::Constant(g) => {
            if !shape_ok(g) {
                return Err(GbdtError::Precondition(format!("H must be {m}x{m}")));
            }
            check_psd(g)?;
        }
        HamiltonianFamily::ShiftProfile { coeffs, base } => {
            if !shape_ok(base) || coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(GbdtError::Precondition(
                    "shift profile needs an m × m base and finite coefficients".into(),
                ));
            }
            check_psd(base)?;
            // The profile is also checked pointwise on evaluation.
            let floor = (-1000..=1000)
                .map(|k| poly(coeffs, k as f64 / 100.0))
                .fold(f64::INFINITY, f64::min);
            if floor < 0.0 {
                return Err(GbdtError::IndefiniteHamiltonian { min_eigenvalue: floor });
            }
        }
        HamiltonianFamily::ConstantPair { h, big_h } => {
            if !shape_ok(h) || !shape_ok(big_h) {
                return Err(GbdtError::Precondition(format!("H and ℋ must be {m}x{m}")));
            }
            check_psd(h)?;
            check_psd(big_h)?;
            let residual = algebraic_defect(h, big_h, j).frobenius_norm();
            if residual > ALGEBRAIC_TOL {
                return Err(GbdtError::ErnstResidual { residual });
            }
        }
    }
    Ok(HamiltonianPair { family, m })
}

/// `A(ξ, η) = (𝒜 − (ξ+η)I)⁻¹`.
pub fn ernst_a(curly_a: &CMatrix, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
    let s = xi + eta;
    match inverse(&curly_a.shift(C64::new(-s, 0.0))) {
        Ok(r) if r.condition <= 1e12 => Ok(r.matrix),
        _ => Err(GbdtError::SpectralCollision { s }),
    }
}

/// `𝒜` together with the triple anchored at `A(0,0) = 𝒜⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErnstTriple {
    curly_a: CMatrix,
    inner: GbdtTriple,
}

impl ErnstTriple {
    pub fn new(curly_a: CMatrix, s0: CMatrix, pi0: CMatrix, j: CMatrix) -> Result<Self, GbdtError> {
        let a0 = ernst_a(&curly_a, 0.0, 0.0)?;
        Ok(Self {
            curly_a,
            inner: GbdtTriple::new(a0, s0, pi0, j)?,
        })
    }

    pub fn with_sylvester(curly_a: CMatrix, pi0: CMatrix, j: CMatrix) -> Result<Self, GbdtError> {
        let a0 = ernst_a(&curly_a, 0.0, 0.0)?;
        Ok(Self {
            curly_a,
            inner: GbdtTriple::with_sylvester(a0, pi0, j)?,
        })
    }

    pub fn curly_a(&self) -> &CMatrix {
        &self.curly_a
    }

    pub fn triple(&self) -> &GbdtTriple {
        &self.inner
    }

    pub fn j(&self) -> &CMatrix {
        self.inner.j()
    }
}

/// States of the Ernst construction share the layout of [`GbdtState`].
pub type ErnstState = GbdtState;

/// `(Π_ξ, Π_η, S_ξ, S_η)`.
pub fn ernst_flows(
    a: &CMatrix,
    pi: &CMatrix,
    s: &CMatrix,
    j: &CMatrix,
    h: &CMatrix,
    big_h: &CMatrix,
) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let hom = &(a * s) + &(s * &a.adjoint());
    let pi_flow = |g: &CMatrix| (&(&(a * pi) * j) * g).scale(-I);
    let s_flow = |g: &CMatrix| &(&(&(&(pi * j) * g) * &j.adjoint()) * &pi.adjoint()) - &hom;
    (pi_flow(h), pi_flow(big_h), s_flow(h), s_flow(big_h))
}

/// Propagated state with its Richardson estimate.
#[derive(Clone, Debug)]
pub struct ErnstPropagated {
    pub state: ErnstState,
    pub richardson: f64,
}

/// Integrates `Π` and `S` from the anchor along `path`.
pub fn ernst_propagate(
    triple: &ErnstTriple,
    pair: &dyn HamiltonianField,
    path: &PathSpec,
) -> Result<ErnstPropagated, GbdtError> {
    if path.start() != (0.0, 0.0) {
        return Err(GbdtError::Precondition("paths from the triple start at (0, 0)".into()));
    }
    let j = triple.j();
    let mut rhs = |x: f64, y: f64, dx: f64, dy: f64, st: &[CMatrix]| -> Result<Vec<CMatrix>, GbdtError> {
        let a = ernst_a(&triple.curly_a, x, y)?;
        let (px, py, sx, sy) = ernst_flows(&a, &st[0], &st[1], j, &pair.h(x, y)?, &pair.big_h(x, y)?);
        Ok(vec![
            &px.scale_real(dx) + &py.scale_real(dy),
            &sx.scale_real(dx) + &sy.scale_real(dy),
        ])
    };
    let t = &triple.inner;
    let out = rk4_path_checked(path, vec![t.pi0().clone(), t.s0().clone()], RICHARDSON_TOL, &mut rhs)?;
    let (xe, ye) = path.end();
    let mut it = out.state.into_iter();
    let pi = it.next().expect("Π");
    let s = it.next().expect("S");
    let a = ernst_a(&triple.curly_a, xe, ye)?;
    Ok(ErnstPropagated {
        state: GbdtState::new(xe, ye, a, pi, s, j),
        richardson: out.richardson,
    })
}

/// `w₀ = w_A(ξ, η, 0) = I − iJΠ*S⁻¹A⁻¹Π`.
pub fn ernst_w0(state: &ErnstState, j: &CMatrix) -> Result<CMatrix, GbdtError> {
    darboux_matrix(state, j, C64::new(0.0, 0.0))
}

/// `G̃₀ = −iX − [X, JH]` with `X = JΠ*S⁻¹Π`; pass `ℋ` for `F̃₀`.
pub fn ernst_g0(state: &ErnstState, j: &CMatrix, h: &CMatrix) -> Result<CMatrix, GbdtError> {
    let x = &(&(j * &state.pi.adjoint()) * &state.s_inverse()?) * &state.pi;
    Ok(&x.scale(-I) - &commutator(&x, &(j * h)))
}

/// `v = w₀⁻¹ w_A(ξ, η, (z − ξ − η)⁻¹)`.
pub fn ernst_darboux(state: &ErnstState, j: &CMatrix, z: C64) -> Result<CMatrix, GbdtError> {
    let gap = z - (state.xi + state.eta);
    if gap.norm() <= 1e-12 {
        return Err(GbdtError::Pole {
            re: f64::INFINITY,
            im: 0.0,
            xi: state.xi,
            eta: state.eta,
        });
    }
    let w0 = ernst_w0(state, j)?;
    let wa = darboux_matrix(state, j, C64::new(1.0, 0.0) / gap)?;
    Ok(&inv(&w0)? * &wa)
}

/// `(H̃, ℋ̃) = (w₀*Hw₀, w₀*ℋw₀)`.
pub fn transformed_hamiltonians(
    state: &ErnstState,
    pair: &dyn HamiltonianField,
    j: &CMatrix,
) -> Result<(CMatrix, CMatrix), GbdtError> {
    let w0 = ernst_w0(state, j)?;
    let w0a = w0.adjoint();
    let (x, y) = (state.xi, state.eta);
    Ok((&(&w0a * &pair.h(x, y)?) * &w0, &(&w0a * &pair.big_h(x, y)?) * &w0))
}

/// States obtained by integrating from the origin along L-paths.
#[derive(Clone, Debug)]
pub struct ErnstSource {
    pub triple: ErnstTriple,
    pub pair: HamiltonianPair,
    pub max_step: f64,
    pub fixed_steps: Option<usize>,
}

impl ErnstSource {
    pub fn new(triple: ErnstTriple, pair: HamiltonianPair, max_step: f64) -> Result<Self, GbdtError> {
        if pair.m() != triple.j().rows() {
            return Err(GbdtError::Precondition("Hamiltonians and J disagree on m".into()));
        }
        Ok(Self {
            triple,
            pair,
            max_step,
            fixed_steps: None,
        })
    }

    pub fn with_fixed_steps(mut self, steps: usize) -> Self {
        self.fixed_steps = Some(steps);
        self
    }

    pub fn j(&self) -> &CMatrix {
        self.triple.j()
    }

    pub fn state(&self, xi: f64, eta: f64) -> Result<ErnstState, GbdtError> {
        if xi == 0.0 && eta == 0.0 {
            return Ok(GbdtState::anchor(self.triple.triple()));
        }
        let mut path = PathSpec::l_path((xi, eta), self.max_step)?;
        if let Some(k) = self.fixed_steps {
            path = path.with_fixed_steps(k);
        }
        Ok(ernst_propagate(&self.triple, &self.pair, &path)?.state)
    }

    pub fn w0(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        ernst_w0(&self.state(xi, eta)?, self.j())
    }

    pub fn darboux(&self, xi: f64, eta: f64, z: C64) -> Result<CMatrix, GbdtError> {
        ernst_darboux(&self.state(xi, eta)?, self.j(), z)
    }
}

/// The transformed pair `(H̃, ℋ̃)` as a field.
pub struct TransformedPair<'a> {
    pub source: &'a ErnstSource,
}

impl HamiltonianField for TransformedPair<'_> {
    fn h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        let st = self.source.state(xi, eta)?;
        Ok(transformed_hamiltonians(&st, &self.source.pair, self.source.j())?.0)
    }
    fn big_h(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        let st = self.source.state(xi, eta)?;
        Ok(transformed_hamiltonians(&st, &self.source.pair, self.source.j())?.1)
    }
}
