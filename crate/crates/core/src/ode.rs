//! Fixed-step classical RK4 along polylines in the (ξ, η) plane, with a
//! half-step Richardson comparison.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::GbdtError;
use crate::matcore::CMatrix;

/// Polyline integration route.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub waypoints: Vec<(f64, f64)>,
    pub max_step: f64,
    /// When set, every segment takes exactly this many base steps instead of
    /// `ceil(len / max_step)`. The discrete solution is then a smooth function
    /// of the endpoint, which finite-difference probes rely on.
    pub fixed_steps: Option<usize>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<(f64, f64)>, max_step: f64) -> Result<Self, GbdtError> {
        if waypoints.is_empty() {
            return Err(GbdtError::Precondition("path needs at least one waypoint".into()));
        }
        if !(max_step > 0.0 && max_step.is_finite()) {
            return Err(GbdtError::Precondition("path step must be positive".into()));
        }
        if waypoints.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(GbdtError::Precondition("non-finite waypoint".into()));
        }
        Ok(Self {
            waypoints,
            max_step,
            fixed_steps: None,
        })
    }

    pub fn with_fixed_steps(mut self, steps: usize) -> Self {
        self.fixed_steps = Some(steps.max(1));
        self
    }

    /// Axis-aligned L-path `start → (ξ, start.η) → (ξ, η)`.
    pub fn l_path_from(start: (f64, f64), target: (f64, f64), max_step: f64) -> Result<Self, GbdtError> {
        Self::new(dedup(vec![start, (target.0, start.1), target]), max_step)
    }

    /// The default route `(0,0) → (ξ,0) → (ξ,η)`.
    pub fn l_path(target: (f64, f64), max_step: f64) -> Result<Self, GbdtError> {
        Self::l_path_from((0.0, 0.0), target, max_step)
    }

    /// η-first L-path `(0,0) → (0,η) → (ξ,η)`.
    pub fn l_path_eta_first(target: (f64, f64), max_step: f64) -> Result<Self, GbdtError> {
        Self::new(dedup(vec![(0.0, 0.0), (0.0, target.1), target]), max_step)
    }

    /// Diagonal staircase with `stairs` alternating ξ and η legs, used as the
    /// second route in path-independence checks.
    pub fn staircase(target: (f64, f64), stairs: usize, max_step: f64) -> Result<Self, GbdtError> {
        let k = stairs.max(1);
        let mut pts = vec![(0.0, 0.0)];
        for s in 1..=k {
            let fx = target.0 * s as f64 / k as f64;
            let fy_prev = target.1 * (s - 1) as f64 / k as f64;
            let fy = target.1 * s as f64 / k as f64;
            pts.push((fx, fy_prev));
            pts.push((fx, fy));
        }
        Self::new(dedup(pts), max_step)
    }

    pub fn start(&self) -> (f64, f64) {
        self.waypoints[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.waypoints.last().expect("nonempty")
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .sum()
    }
}

fn dedup(pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

/// Right-hand side of a path ODE: given a point, the segment displacement
/// `(Δξ, Δη)` and the state, return `Δξ·F_ξ + Δη·F_η`.
pub trait PathRhs {
    fn eval(&mut self, xi: f64, eta: f64, dxi: f64, deta: f64, state: &[CMatrix]) -> Result<Vec<CMatrix>, GbdtError>;
}

impl<F> PathRhs for F
where
    F: FnMut(f64, f64, f64, f64, &[CMatrix]) -> Result<Vec<CMatrix>, GbdtError>,
{
    fn eval(&mut self, xi: f64, eta: f64, dxi: f64, deta: f64, state: &[CMatrix]) -> Result<Vec<CMatrix>, GbdtError> {
        self(xi, eta, dxi, deta, state)
    }
}

fn axpy(state: &[CMatrix], h: f64, k: &[CMatrix]) -> Vec<CMatrix> {
    state.iter().zip(k).map(|(s, d)| s + &d.scale_real(h)).collect()
}

/// Integrates along every segment of `path` with `refine` times the base
/// number of steps `ceil(len / max_step)`.
pub fn rk4_path(
    path: &PathSpec,
    refine: usize,
    init: Vec<CMatrix>,
    rhs: &mut dyn PathRhs,
) -> Result<Vec<CMatrix>, GbdtError> {
    let mut state = init;
    let mut arc = 0.0;
    for w in path.waypoints.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let base = path
            .fixed_steps
            .unwrap_or_else(|| (len / path.max_step).ceil() as usize);
        let steps = base.max(1) * refine.max(1);
        let h = 1.0 / steps as f64;
        let at = |t: f64| (p.0 + t * dx, p.1 + t * dy);
        let mut call = |t: f64, s: &[CMatrix]| {
            let (x, y) = at(t);
            rhs.eval(x, y, dx, dy, s).map_err(|e| GbdtError::OnPath {
                arc_length: arc + t * len,
                cause: Box::new(e),
            })
        };
        for k in 0..steps {
            let t = k as f64 * h;
            let k1 = call(t, &state)?;
            let k2 = call(t + 0.5 * h, &axpy(&state, 0.5 * h, &k1))?;
            let k3 = call(t + 0.5 * h, &axpy(&state, 0.5 * h, &k2))?;
            let k4 = call(t + h, &axpy(&state, h, &k3))?;
            state = state
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let incr = &(&(&k1[i] + &k2[i].scale_real(2.0)) + &k3[i].scale_real(2.0)) + &k4[i];
                    s + &incr.scale_real(h / 6.0)
                })
                .collect();
        }
        arc += len;
    }
    Ok(state)
}

/// Result of a Richardson-verified integration.
#[derive(Clone, Debug)]
pub struct Checked {
    pub state: Vec<CMatrix>,
    /// `max_i ‖X_h − X_{h/2}‖_F / max(1, ‖X_{h/2}‖_F)`.
    pub richardson: f64,
}

/// Runs [`rk4_path`] at the base step and at half of it, returning the finer
/// solution; fails when the two disagree by more than `tolerance`.
pub fn rk4_path_checked(
    path: &PathSpec,
    init: Vec<CMatrix>,
    tolerance: f64,
    rhs: &mut dyn PathRhs,
) -> Result<Checked, GbdtError> {
    let coarse = rk4_path(path, 1, init.clone(), rhs)?;
    let fine = rk4_path(path, 2, init, rhs)?;
    let estimate = coarse.iter().zip(&fine).map(|(c, f)| c.rel_diff(f)).fold(0.0, f64::max);
    if !(estimate <= tolerance) {
        return Err(GbdtError::Richardson { estimate, tolerance });
    }
    Ok(Checked {
        state: fine,
        richardson: estimate,
    })
}
