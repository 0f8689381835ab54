//! Rectangular (ξ, η) lattices of matrix values with per-point status flags.

use alloc::vec::Vec;

use crate::error::GbdtError;
use crate::matcore::CMatrix;

/// A tensor-product lattice. Points are ordered with ξ outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self { xs, ys }
    }

    /// `nx × ny` points spanning `[x0, x1] × [y0, y1]` inclusive.
    pub fn uniform(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Self {
        let axis = |a: f64, b: f64, n: usize| -> Vec<f64> {
            match n {
                0 => Vec::new(),
                1 => alloc::vec![a],
                _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            }
        };
        Self::new(axis(x0, x1, nx), axis(y0, y1, ny))
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ys.len() + j
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let ny = self.ys.len();
        (self.xs[k / ny], self.ys[k % ny])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().flat_map(move |&x| self.ys.iter().map(move |&y| (x, y)))
    }
}

/// Why a grid point carries no value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointStatus {
    Ok,
    AlphaZero,
    SingularS,
    SingularA,
    Resonant,
    BranchCut,
    Pole,
    NonPositive,
    Failed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::AlphaZero => "alpha_zero",
            PointStatus::SingularS => "singular_s",
            PointStatus::SingularA => "singular_a",
            PointStatus::Resonant => "resonant",
            PointStatus::BranchCut => "branch_cut",
            PointStatus::Pole => "pole",
            PointStatus::NonPositive => "nonpositive",
            PointStatus::Failed => "failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ok" => PointStatus::Ok,
            "alpha_zero" => PointStatus::AlphaZero,
            "singular_s" => PointStatus::SingularS,
            "singular_a" => PointStatus::SingularA,
            "resonant" => PointStatus::Resonant,
            "branch_cut" => PointStatus::BranchCut,
            "pole" => PointStatus::Pole,
            "nonpositive" => PointStatus::NonPositive,
            "failed" => PointStatus::Failed,
            _ => return None,
        })
    }

    pub fn from_error(e: &GbdtError) -> Self {
        use crate::matcore::MatError;
        match e.root_cause() {
            GbdtError::AlphaVanishes { .. } => PointStatus::AlphaZero,
            GbdtError::SingularS { .. } => PointStatus::SingularS,
            GbdtError::SingularA { .. } | GbdtError::SingularShift { .. } | GbdtError::RootSumSingular { .. } => {
                PointStatus::SingularA
            }
            GbdtError::Resonant { .. } | GbdtError::Mat(MatError::ResonantSylvester { .. }) => PointStatus::Resonant,
            GbdtError::BranchCut { .. } | GbdtError::ZeroDenominator { .. } => PointStatus::BranchCut,
            GbdtError::Pole { .. }
            | GbdtError::LambdaPole { .. }
            | GbdtError::SpectralCollision { .. }
            | GbdtError::EigenvalueOnShift { .. } => PointStatus::Pole,
            GbdtError::NonPositiveD { .. } | GbdtError::NonPositiveDet { .. } => PointStatus::NonPositive,
            _ => PointStatus::Failed,
        }
    }
}

/// A matrix-valued function of (ξ, η) that may fail pointwise.
pub trait MatrixField {
    fn eval(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError>;
}

impl<F> MatrixField for F
where
    F: Fn(f64, f64) -> Result<CMatrix, GbdtError>,
{
    fn eval(&self, xi: f64, eta: f64) -> Result<CMatrix, GbdtError> {
        self(xi, eta)
    }
}

/// Tabulated matrix values on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub grid: Grid,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<Option<CMatrix>>,
    pub status: Vec<PointStatus>,
}

impl FieldGrid {
    /// Evaluates `field` at every grid point, flagging failures.
    pub fn tabulate(field: &dyn MatrixField, grid: &Grid, rows: usize, cols: usize) -> Self {
        let results: Vec<Result<CMatrix, GbdtError>> = grid.points().map(|(x, y)| field.eval(x, y)).collect();
        Self::from_results(grid.clone(), rows, cols, results)
    }

    /// Assembles a field from per-point results in grid order.
    pub fn from_results(grid: Grid, rows: usize, cols: usize, results: Vec<Result<CMatrix, GbdtError>>) -> Self {
        debug_assert_eq!(results.len(), grid.len());
        let mut values = Vec::with_capacity(results.len());
        let mut status = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(m) => {
                    debug_assert_eq!(m.shape(), (rows, cols));
                    values.push(Some(m));
                    status.push(PointStatus::Ok);
                }
                Err(e) => {
                    values.push(None);
                    status.push(PointStatus::from_error(&e));
                }
            }
        }
        Self {
            grid,
            rows,
            cols,
            values,
            status,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&CMatrix> {
        self.values[self.grid.index(i, j)].as_ref()
    }

    /// Fraction of points carrying a value.
    pub fn coverage(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|v| v.is_some()).count() as f64 / self.values.len() as f64
    }

    pub fn iter_ok(&self) -> impl Iterator<Item = ((f64, f64), &CMatrix)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.as_ref().map(|m| (self.grid.point(k), m)))
    }
}
