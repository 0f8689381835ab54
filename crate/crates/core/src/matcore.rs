//! Dense complex matrix arithmetic and the small linear-algebra kernels the
//! rest of the crate is built on.
//!
//! Everything is sized for the regime of the constructions here (n ≤ 32, in
//! practice 1..6), so storage is a flat row-major `Vec` and the algorithms are
//! the textbook ones: LU with partial pivoting, a Kronecker-system Sylvester
//! solve, and scaling-and-squaring Taylor for the exponential.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

pub type C64 = Complex64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Condition estimate above which [`inverse`] refuses to return a result.
pub const MAX_INVERSE_CONDITION: f64 = 1e14;

/// Condition estimate of the Kronecker system above which a Sylvester
/// equation is declared resonant.
pub const MAX_SYLVESTER_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatError {
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular to working tolerance (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("resonant Sylvester equation (condition estimate {condition:e}, residual {residual:e})")]
    ResonantSylvester { condition: f64, residual: f64 },
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(MatError::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![C64::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(rows, cols, data)
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::zero() })
    }

    /// Convenience constructor from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, MatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatError::LengthMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::new(r, c, data)
    }

    /// Convenience constructor from complex row slices.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self, MatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatError::LengthMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_vec_unchecked(1, 1, vec![z])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|&z| f(z)).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖M − M*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn determinant(&self) -> Result<C64, MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare {
                op: "determinant",
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Ok(C64::new(1.0, 0.0));
        }
        Ok(Lu::factor(self).map_or(C64::zero(), |lu| lu.determinant()))
    }

    /// Sub-block copy.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            row0 + rows <= self.rows && col0 + cols <= self.cols,
            "block out of range"
        );
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, b: &CMatrix) {
        assert!(
            row0 + b.rows <= self.rows && col0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(row0 + i, col0 + j)] = b[(i, j)];
            }
        }
    }

    /// `[a b]`.
    pub fn hstack(a: &CMatrix, b: &CMatrix) -> Result<Self, MatError> {
        if a.rows != b.rows {
            return Err(MatError::DimensionMismatch {
                op: "hstack",
                left_rows: a.rows,
                left_cols: a.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let mut m = Self::zeros(a.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        Ok(m)
    }

    /// Block diagonal assembly.
    pub fn block_diag(blocks: &[CMatrix]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut i0, mut j0) = (0, 0);
        for b in blocks {
            m.set_block(i0, j0, b);
            i0 += b.rows;
            j0 += b.cols;
        }
        m
    }

    /// `self + s·I`.
    pub fn shift(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }

    /// Relative distance `‖self − other‖_F / max(1, ‖other‖_F)`.
    pub fn rel_diff(&self, other: &CMatrix) -> f64 {
        (self - other).frobenius_norm() / other.frobenius_norm().max(1.0)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Standard matrix product, with a shape check.
pub fn multiply(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatError> {
    if a.cols != b.rows {
        return Err(MatError::DimensionMismatch {
            op: "multiply",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let mut out = vec![C64::zero(); a.rows * b.cols];
    for i in 0..a.rows {
        let row = &mut out[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik.is_zero() {
                continue;
            }
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in row.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(CMatrix::from_vec_unchecked(a.rows, b.cols, out))
}

fn elementwise(op: &'static str, a: &CMatrix, b: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Result<CMatrix, MatError> {
    if a.shape() != b.shape() {
        return Err(MatError::DimensionMismatch {
            op,
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    Ok(CMatrix::from_vec_unchecked(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    ))
}

// Operator impls panic on shape mismatch; use `multiply` for a checked product.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        multiply(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        elementwise("add", self, rhs, |x, y| x + y).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        elementwise("sub", self, rhs, |x, y| x - y).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CMatrix {
            type Output = CMatrix;
            fn $m(self, rhs: CMatrix) -> CMatrix {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $m(self, rhs: &CMatrix) -> CMatrix {
                (&self).$m(rhs)
            }
        }
        impl $tr<CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $m(self, rhs: CMatrix) -> CMatrix {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Mul, mul);
forward_owned!(Add, add);
forward_owned!(Sub, sub);

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        -&self
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) - &(b * a)
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        debug_assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                if l.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Some(Self { n, lu, perm, sign })
    }

    pub fn determinant(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `A* x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        // A* = U* L* P, so solve U* y = b, L* w = y, x = Pᵀ w.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[k * n + i].conj() * y[k];
            }
            y[i] = s / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[k * n + i].conj() * y[k];
            }
            y[i] = s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = y[i];
        }
    }

    /// Hager's 1-norm estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve_in_place(&mut y);
            let norm_y: f64 = y.iter().map(|z| z.norm()).sum();
            if !norm_y.is_finite() {
                return f64::INFINITY;
            }
            if norm_y <= est {
                break;
            }
            est = norm_y;
            let mut zeta: Vec<C64> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        z / r
                    }
                })
                .collect();
            self.solve_adjoint_in_place(&mut zeta);
            let (jmax, zmax) = zeta
                .iter()
                .enumerate()
                .map(|(j, z)| (j, z.re))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            let ztx: f64 = zeta.iter().zip(&x).map(|(z, xi)| (z.conj() * xi).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![C64::zero(); n];
            x[jmax] = C64::new(1.0, 0.0);
        }
        est
    }
}

/// Inverse together with its 1-norm condition number.
#[derive(Clone, Debug)]
pub struct Inverse {
    pub matrix: CMatrix,
    pub condition: f64,
}

/// Inverse via partial-pivot LU. Fails when a pivot vanishes or the
/// condition number exceeds [`MAX_INVERSE_CONDITION`].
pub fn inverse(a: &CMatrix) -> Result<Inverse, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            op: "inverse",
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let lu = Lu::factor(a).ok_or(MatError::Singular {
        condition: f64::INFINITY,
    })?;
    let mut inv = CMatrix::zeros(n, n);
    let mut col = vec![C64::zero(); n];
    for j in 0..n {
        col.iter_mut().for_each(|z| *z = C64::zero());
        col[j] = C64::new(1.0, 0.0);
        lu.solve_in_place(&mut col);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    let condition = a.norm_one() * inv.norm_one();
    if !condition.is_finite() || condition > MAX_INVERSE_CONDITION || !inv.is_finite() {
        return Err(MatError::Singular { condition });
    }
    Ok(Inverse { matrix: inv, condition })
}

/// Shorthand for `inverse(a)?.matrix`.
pub fn inv(a: &CMatrix) -> Result<CMatrix, MatError> {
    inverse(a).map(|i| i.matrix)
}

/// Solves `A X − X B = C` through the `nm × nm` Kronecker system
/// `(I ⊗ A − Bᵀ ⊗ I) vec(X) = vec(C)`.
///
/// The system is singular exactly when `σ(A) ∩ σ(B) ≠ ∅`; a condition
/// estimate above [`MAX_SYLVESTER_CONDITION`], or a back-substituted
/// residual above `1e-9·max(1, ‖C‖_F)`, is reported as resonance.
pub fn solve_sylvester(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            op: "solve_sylvester",
            rows: a.rows,
            cols: a.cols,
        });
    }
    if !b.is_square() {
        return Err(MatError::NotSquare {
            op: "solve_sylvester",
            rows: b.rows,
            cols: b.cols,
        });
    }
    let (n, m) = (a.rows, b.rows);
    if c.shape() != (n, m) {
        return Err(MatError::DimensionMismatch {
            op: "solve_sylvester",
            left_rows: n,
            left_cols: m,
            right_rows: c.rows,
            right_cols: c.cols,
        });
    }
    let dim = n * m;
    // Column-major vec: index (i, j) -> j*n + i.
    let mut k = CMatrix::zeros(dim, dim);
    for j in 0..m {
        for i in 0..n {
            let row = j * n + i;
            for l in 0..n {
                k[(row, j * n + l)] += a[(i, l)];
            }
            for l in 0..m {
                k[(row, l * n + i)] -= b[(l, j)];
            }
        }
    }
    let resonant = |condition: f64, residual: f64| MatError::ResonantSylvester { condition, residual };
    let lu = Lu::factor(&k).ok_or(resonant(f64::INFINITY, f64::NAN))?;
    let condition = k.norm_one() * lu.inverse_norm_one_estimate();
    if !condition.is_finite() || condition > MAX_SYLVESTER_CONDITION {
        return Err(resonant(condition, f64::NAN));
    }
    let mut rhs: Vec<C64> = (0..dim).map(|idx| c[(idx % n, idx / n)]).collect();
    lu.solve_in_place(&mut rhs);
    let x = CMatrix::from_fn(n, m, |i, j| rhs[j * n + i]);
    let residual = (&(&(a * &x) - &(&x * b)) - c).frobenius_norm();
    if !x.is_finite() || residual > 1e-9 * c.frobenius_norm().max(1.0) {
        return Err(resonant(condition, residual));
    }
    Ok(x)
}

/// Matrix exponential by scaling and squaring with a degree-18 Taylor
/// polynomial on `A / 2^s`, `‖A/2^s‖₁ ≤ 1/2`.
pub fn matrix_exp(a: &CMatrix) -> Result<CMatrix, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            op: "matrix_exp",
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let norm = a.norm_one();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    const DEGREE: u32 = 18;
    // Horner: I + B(I + B/2(I + B/3(...)))
    let id = CMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=DEGREE).rev() {
        acc = &id + &(&scaled * &acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

/// Hermiticity test `‖M − M*‖_F ≤ tolerance · max(1, ‖M‖_F)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianFlag {
    pub tolerance: f64,
}

impl HermitianFlag {
    pub fn new(tolerance: f64) -> Self {
        assert!(tolerance >= 0.0, "tolerance must be nonnegative");
        Self { tolerance }
    }

    /// Relative defect `‖M − M*‖_F / max(1, ‖M‖_F)`.
    pub fn defect(m: &CMatrix) -> f64 {
        m.hermitian_defect() / m.frobenius_norm().max(1.0)
    }

    pub fn passes(&self, m: &CMatrix) -> bool {
        Self::defect(m) <= self.tolerance
    }
}

/// Eigenvalues (ascending) of a Hermitian matrix.
///
/// Works on the real symmetric embedding `[[Re, −Im], [Im, Re]]` with cyclic
/// Jacobi rotations; each eigenvalue of `M` appears twice there.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>, MatError> {
    if !m.is_square() {
        return Err(MatError::NotSquare {
            op: "hermitian_eigenvalues",
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let dim = 2 * n;
    let mut a = vec![0.0f64; dim * dim];
    for i in 0..n {
        for j in 0..n {
            // Symmetrised so that tiny Hermitian defects do not break Jacobi.
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[i * dim + j] = z.re;
            a[(i + n) * dim + (j + n)] = z.re;
            a[i * dim + (j + n)] = -z.im;
            a[(i + n) * dim + j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
            .sum();
        let total: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    diag.sort_by(|x, y| x.total_cmp(y));
    Ok(diag.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Coefficients `c₀..c_n` of `det(tI − M) = Σ c_k t^k` (Faddeev–LeVerrier),
/// `c_n = 1`. Two matrices are similar only if these agree.
pub fn characteristic_polynomial(m: &CMatrix) -> Result<Vec<C64>, MatError> {
    if !m.is_square() {
        return Err(MatError::NotSquare {
            op: "characteristic_polynomial",
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut coeffs = vec![C64::zero(); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        mk = (m * &mk).shift(coeffs[n - k + 1]);
        coeffs[n - k] = -(m * &mk).trace() / k as f64;
    }
    Ok(coeffs)
}

/// Eigenvalues of a general square matrix, sorted by real then imaginary
/// part. Roots of the characteristic polynomial by Weierstrass iteration,
/// so only meant for small, reasonably conditioned spectra.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>, MatError> {
    let coeffs = characteristic_polynomial(m)?;
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let eval = |t: C64| coeffs.iter().rev().fold(C64::zero(), |acc, &c| acc * t + c);
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| seed.powu(k as u32).scale(radius.min(1e6) / 2.0))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = C64::new(1e-300, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm() / roots[i].norm().max(1.0));
        }
        if moved <= 1e-15 {
            break;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Principal square root with a branch sign (`±1`).
pub fn signed_sqrt(z: C64, sign: i8) -> C64 {
    let r = z.sqrt();
    if sign < 0 {
        -r
    } else {
        r
    }
}
