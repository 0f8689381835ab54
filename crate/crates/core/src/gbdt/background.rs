use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::GbdtError;
use crate::matcore::{CMatrix, C64, I};

/// A real scalar profile of one variable: `f(ξ)` or `h(η)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `a + b·x`
    Affine { a: f64, b: f64 },
    /// `Σ c_k x^k`, coefficients in ascending order.
    Polynomial(Vec<f64>),
}

impl Profile {
    pub fn affine(a: f64, b: f64) -> Self {
        Profile::Affine { a, b }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Profile::Polynomial(coeffs)
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Profile::Affine { a, b } => a.is_finite() && b.is_finite(),
            Profile::Polynomial(c) => c.iter().all(|x| x.is_finite()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Affine { a, b } => a + b * x,
            Profile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Profile::Affine { b, .. } => *b,
            Profile::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck),
        }
    }
}

/// The `J` choices offered for `m = 2p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JSelector {
    /// `[[0, I_p], [I_p, 0]]`
    OffDiag,
    /// `[[0, −iI_p], [iI_p, 0]]`
    IOffDiag,
    /// Pauli `σ₂`, the `p = 1` case of `IOffDiag`.
    Pauli2,
}

impl JSelector {
    pub fn as_str(self) -> &'static str {
        match self {
            JSelector::OffDiag => "offdiag",
            JSelector::IOffDiag => "i-offdiag",
            JSelector::Pauli2 => "pauli2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "offdiag" => Some(JSelector::OffDiag),
            "i-offdiag" => Some(JSelector::IOffDiag),
            "pauli2" => Some(JSelector::Pauli2),
            _ => None,
        }
    }
}

pub fn j_matrix(sel: JSelector, m: usize) -> Result<CMatrix, GbdtError> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(GbdtError::Precondition(format!("J needs an even size, got m = {m}")));
    }
    if sel == JSelector::Pauli2 && m != 2 {
        return Err(GbdtError::Precondition(format!("pauli2 needs m = 2, got m = {m}")));
    }
    let p = m / 2;
    let (upper, lower) = match sel {
        JSelector::OffDiag => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        JSelector::IOffDiag | JSelector::Pauli2 => (-I, I),
    };
    Ok(CMatrix::from_fn(m, m, |r, c| {
        if c == r + p {
            upper
        } else if r == c + p {
            lower
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `j = diag(I_p, −I_p)`.
pub fn small_j(p: usize) -> CMatrix {
    CMatrix::from_fn(2 * p, 2 * p, |r, c| match (r == c, r < p) {
        (true, true) => C64::new(1.0, 0.0),
        (true, false) => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    })
}

/// `‖qJ + Jq*‖_F`, the defect of the skew-self-adjointness condition.
pub fn skew_defect(q: &CMatrix, j: &CMatrix) -> f64 {
    (&(q * j) + &(j * &q.adjoint())).frobenius_norm()
}

/// A seed solution supplied in closed form by the caller.
pub trait SeedField: Send + Sync {
    fn m(&self) -> usize;
    fn u(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError>;
    /// `u_ξ u⁻¹`
    fn q(&self, xi: f64, eta: f64) -> CMatrix;
    /// `−u_η u⁻¹`
    fn big_q(&self, xi: f64, eta: f64) -> CMatrix;
}

#[derive(Clone)]
pub enum Seed {
    /// `u = exp((f(ξ) − h(η))j)` with `j = diag(I_p, −I_p)`, right-normalised
    /// by the constant `exp((h(0) − f(0))j)` so that `u(0,0) = I`.
    ExpDiag {
        p: usize,
    },
    Custom(Arc<dyn SeedField>),
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seed::ExpDiag { p } => write!(f, "ExpDiag {{ p: {p} }}"),
            Seed::Custom(s) => write!(f, "Custom {{ m: {} }}", s.m()),
        }
    }
}

/// What the propagation equations need from the initial system.
pub trait Coefficients: Send + Sync {
    fn f(&self, xi: f64) -> f64;
    fn h(&self, eta: f64) -> f64;
    fn f_prime(&self, xi: f64) -> f64;
    fn h_prime(&self, eta: f64) -> f64;
    fn m(&self) -> usize;
    fn q(&self, xi: f64, eta: f64) -> CMatrix;
    fn big_q(&self, xi: f64, eta: f64) -> CMatrix;

    fn alpha(&self, xi: f64, eta: f64) -> f64 {
        self.f(xi) + self.h(eta)
    }
    fn alpha_xi(&self, xi: f64, _eta: f64) -> f64 {
        self.f_prime(xi)
    }
    fn alpha_eta(&self, _xi: f64, eta: f64) -> f64 {
        self.h_prime(eta)
    }
}

/// `α = f(ξ) + h(η)` together with a seed solution `u`.
#[derive(Clone, Debug)]
pub struct Background {
    pub f: Profile,
    pub h: Profile,
    pub seed: Seed,
}

impl Background {
    pub fn new(f: Profile, h: Profile, seed: Seed) -> Result<Self, GbdtError> {
        if !f.is_finite() || !h.is_finite() {
            return Err(GbdtError::Precondition("non-finite profile coefficient".into()));
        }
        if let Seed::ExpDiag { p } = seed {
            if p == 0 {
                return Err(GbdtError::Precondition("seed block size p must be positive".into()));
            }
        }
        Ok(Self { f, h, seed })
    }

    /// The exp-diag seed over `f`, `h`.
    pub fn exp_diag(f: Profile, h: Profile, p: usize) -> Result<Self, GbdtError> {
        Self::new(f, h, Seed::ExpDiag { p })
    }

    /// Block size `p` of the exp-diag seed, if that is the seed.
    pub fn p(&self) -> Option<usize> {
        match self.seed {
            Seed::ExpDiag { p } => Some(p),
            Seed::Custom(_) => None,
        }
    }

    pub fn u(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        match &self.seed {
            Seed::ExpDiag { p } => {
                let e = self.f.value(xi) - self.h.value(eta) - self.f.value(0.0) + self.h.value(0.0);
                let (up, down) = (e.exp(), (-e).exp());
                Ok(CMatrix::from_fn(2 * p, 2 * p, |r, c| {
                    if r != c {
                        C64::new(0.0, 0.0)
                    } else if r < *p {
                        C64::new(up, 0.0)
                    } else {
                        C64::new(down, 0.0)
                    }
                }))
            }
            Seed::Custom(s) => s.u(xi, eta),
        }
    }

    /// Checks `u(0,0) = I` and `qJ = −Jq*`, `QJ = −JQ*` at the given sample points.
    pub fn validate_against(&self, j: &CMatrix, samples: &[(f64, f64)]) -> Result<(), GbdtError> {
        let m = self.m();
        if j.shape() != (m, m) {
            return Err(GbdtError::Precondition(format!(
                "J is {}x{} but the seed has m = {m}",
                j.rows(),
                j.cols()
            )));
        }
        let u0 = self.u(0.0, 0.0)?;
        if u0.rel_diff(&CMatrix::identity(m)) > 1e-12 {
            return Err(GbdtError::Precondition("seed must satisfy u(0,0) = I".into()));
        }
        for &(x, y) in samples {
            let dq = skew_defect(&self.q(x, y), j);
            let dbq = skew_defect(&self.big_q(x, y), j);
            if dq.max(dbq) > 1e-12 {
                return Err(GbdtError::Precondition(format!(
                    "qJ = −Jq* fails at ({x}, {y}) (defect {:e})",
                    dq.max(dbq)
                )));
            }
        }
        Ok(())
    }
}

impl Coefficients for Background {
    fn f(&self, xi: f64) -> f64 {
        self.f.value(xi)
    }
    fn h(&self, eta: f64) -> f64 {
        self.h.value(eta)
    }
    fn f_prime(&self, xi: f64) -> f64 {
        self.f.derivative(xi)
    }
    fn h_prime(&self, eta: f64) -> f64 {
        self.h.derivative(eta)
    }
    fn m(&self) -> usize {
        match &self.seed {
            Seed::ExpDiag { p } => 2 * p,
            Seed::Custom(s) => s.m(),
        }
    }
    fn q(&self, xi: f64, eta: f64) -> CMatrix {
        match &self.seed {
            Seed::ExpDiag { p } => small_j(*p).scale_real(self.f.derivative(xi)),
            Seed::Custom(s) => s.q(xi, eta),
        }
    }
    fn big_q(&self, xi: f64, eta: f64) -> CMatrix {
        match &self.seed {
            Seed::ExpDiag { p } => small_j(*p).scale_real(self.h.derivative(eta)),
            Seed::Custom(s) => s.big_q(xi, eta),
        }
    }
}
