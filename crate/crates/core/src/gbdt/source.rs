use crate::branchsqrt::JordanSpec;
use crate::error::GbdtError;
use crate::gbdt::background::{Background, Coefficients};
use crate::gbdt::explicit::{explicit_a, explicit_anchor, explicit_pi, RootBranches};
use crate::gbdt::propagate::{propagate, AField};
use crate::gbdt::triple::{solve_s_identity, GbdtState, GbdtTriple};
use crate::matcore::CMatrix;
use crate::ode::PathSpec;

/// Anything that yields `A`, `Π`, `S` at a point.
pub trait StateSource: Send + Sync {
    fn state(&self, xi: f64, eta: f64) -> Result<GbdtState, GbdtError>;
    fn triple(&self) -> &GbdtTriple;
    fn background(&self) -> &Background;
    fn j(&self) -> &CMatrix {
        self.triple().j()
    }
}

/// Fully explicit states: closed-form `A` and `Π` with `S` from the identity.
/// Only usable off the resonant set, where the identity pins `S` down.
#[derive(Clone, Debug)]
pub struct ClosedFormSource {
    generator: JordanSpec,
    branches: RootBranches,
    bg: Background,
    triple: GbdtTriple,
}

impl ClosedFormSource {
    /// `pi0` is `Π(0,0)`; `A(0,0)` and `S(0,0)` are derived.
    pub fn new(
        generator: JordanSpec,
        branches: RootBranches,
        bg: Background,
        pi0: CMatrix,
        j: CMatrix,
    ) -> Result<Self, GbdtError> {
        if bg.p().is_none() {
            return Err(GbdtError::Precondition("closed-form Π needs the exp-diag seed".into()));
        }
        let a0 = explicit_anchor(&generator, &bg, &branches)?;
        let triple = GbdtTriple::with_sylvester(a0, pi0, j)?;
        Ok(Self {
            generator,
            branches,
            bg,
            triple,
        })
    }

    pub fn generator(&self) -> &JordanSpec {
        &self.generator
    }

    pub fn branches(&self) -> &RootBranches {
        &self.branches
    }

    pub fn a_field(&self) -> AField {
        AField::Explicit {
            generator: self.generator.clone(),
            branches: self.branches.clone(),
        }
    }
}

impl StateSource for ClosedFormSource {
    fn state(&self, xi: f64, eta: f64) -> Result<GbdtState, GbdtError> {
        let a = explicit_a(xi, eta, &self.generator, &self.bg, &self.branches)?;
        let pi = explicit_pi(xi, eta, &self.generator, &self.bg, &self.branches, self.triple.pi0())?;
        let s = solve_s_identity(&a, &pi, self.triple.j())?;
        Ok(GbdtState::new(xi, eta, a, pi, s, self.triple.j()))
    }
    fn triple(&self) -> &GbdtTriple {
        &self.triple
    }
    fn background(&self) -> &Background {
        &self.bg
    }
}

/// States obtained by integrating along the L-path from the origin.
#[derive(Clone, Debug)]
pub struct PropagatedSource {
    pub triple: GbdtTriple,
    pub bg: Background,
    pub a_field: AField,
    pub max_step: f64,
    /// Fixed base step count per segment; see [`PathSpec::fixed_steps`].
    pub fixed_steps: Option<usize>,
}

impl PropagatedSource {
    pub fn new(triple: GbdtTriple, bg: Background, a_field: AField, max_step: f64) -> Self {
        Self {
            triple,
            bg,
            a_field,
            max_step,
            fixed_steps: None,
        }
    }

    pub fn with_fixed_steps(mut self, steps: usize) -> Self {
        self.fixed_steps = Some(steps);
        self
    }

    pub fn path_to(&self, xi: f64, eta: f64) -> Result<PathSpec, GbdtError> {
        let p = PathSpec::l_path((xi, eta), self.max_step)?;
        Ok(match self.fixed_steps {
            Some(k) => p.with_fixed_steps(k),
            None => p,
        })
    }
}

impl StateSource for PropagatedSource {
    fn state(&self, xi: f64, eta: f64) -> Result<GbdtState, GbdtError> {
        if xi == 0.0 && eta == 0.0 {
            return Ok(GbdtState::anchor(&self.triple));
        }
        Ok(propagate(
            &self.triple,
            &self.bg as &dyn Coefficients,
            &self.a_field,
            &self.path_to(xi, eta)?,
        )?
        .state)
    }
    fn triple(&self) -> &GbdtTriple {
        &self.triple
    }
    fn background(&self) -> &Background {
        &self.bg
    }
}
