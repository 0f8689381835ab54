//! Commuting square roots `ℛ(μ)` of `𝒜 − μI` for a matrix given in Jordan
//! form `𝒜 = E 𝒥 E⁻¹`.
//!
//! Each Jordan block `λI + 𝒮₁` gets the upper-triangular Toeplitz root
//! `c₀I + c₁𝒮₁ + … + c_{k−1}𝒮_{k−1}` with `c₀ = ±√(λ − μ)`, `c₁ = 1/(2c₀)`
//! and every later coefficient fixed by cancelling the `𝒮_i` term of the
//! square. Roots for different shifts are polynomials in the same Jordan
//! blocks, so they commute.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::GbdtError;
use crate::matcore::{inverse, signed_sqrt, CMatrix, C64};

/// Largest admissible condition number of the similarity `E`.
pub const MAX_SIMILARITY_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub size: usize,
}

/// A matrix supplied through its Jordan data.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanSpec {
    blocks: Vec<JordanBlock>,
    similarity: CMatrix,
    similarity_inv: CMatrix,
    matrix: CMatrix,
}

impl JordanSpec {
    pub fn new(blocks: Vec<JordanBlock>, similarity: CMatrix) -> Result<Self, GbdtError> {
        if blocks.is_empty() || blocks.iter().any(|b| b.size == 0) {
            return Err(GbdtError::Precondition(
                "Jordan blocks must be nonempty with positive sizes".into(),
            ));
        }
        if blocks
            .iter()
            .any(|b| !(b.eigenvalue.re.is_finite() && b.eigenvalue.im.is_finite()))
        {
            return Err(GbdtError::Precondition("non-finite Jordan eigenvalue".into()));
        }
        let n: usize = blocks.iter().map(|b| b.size).sum();
        if similarity.shape() != (n, n) {
            return Err(GbdtError::Precondition(alloc::format!(
                "similarity must be {n}x{n}, got {}x{}",
                similarity.rows(),
                similarity.cols()
            )));
        }
        let inv = inverse(&similarity)?;
        if inv.condition > MAX_SIMILARITY_CONDITION {
            return Err(GbdtError::Precondition(alloc::format!(
                "similarity condition {:e} exceeds {:e}",
                inv.condition,
                MAX_SIMILARITY_CONDITION
            )));
        }
        let jordan = jordan_matrix(&blocks);
        let matrix = &(&similarity * &jordan) * &inv.matrix;
        Ok(Self {
            blocks,
            similarity,
            similarity_inv: inv.matrix,
            matrix,
        })
    }

    /// Jordan blocks with `E = I`.
    pub fn jordan(blocks: Vec<JordanBlock>) -> Result<Self, GbdtError> {
        let n = blocks.iter().map(|b| b.size).sum();
        Self::new(blocks, CMatrix::identity(n))
    }

    /// A single Jordan block `λI + 𝒮₁` of order `size`.
    pub fn single_block(eigenvalue: C64, size: usize) -> Result<Self, GbdtError> {
        Self::jordan(vec![JordanBlock { eigenvalue, size }])
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn similarity(&self) -> &CMatrix {
        &self.similarity
    }

    pub fn similarity_inv(&self) -> &CMatrix {
        &self.similarity_inv
    }

    /// `𝒜 = E 𝒥 E⁻¹`.
    pub fn reconstruct(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn jordan_form(&self) -> CMatrix {
        jordan_matrix(&self.blocks)
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = C64> + '_ {
        self.blocks.iter().map(|b| b.eigenvalue)
    }

    /// Conjugates a matrix from the Jordan basis: `E M E⁻¹`.
    pub fn from_jordan_basis(&self, m: &CMatrix) -> CMatrix {
        &(&self.similarity * m) * &self.similarity_inv
    }
}

fn jordan_matrix(blocks: &[JordanBlock]) -> CMatrix {
    let parts: Vec<CMatrix> = blocks
        .iter()
        .map(|b| {
            CMatrix::from_fn(b.size, b.size, |i, j| {
                if i == j {
                    b.eigenvalue
                } else if j == i + 1 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::zero()
                }
            })
        })
        .collect();
    CMatrix::block_diag(&parts)
}

/// Per-block sign applied to the principal square root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchChoice {
    signs: Vec<i8>,
}

impl BranchChoice {
    /// Principal root on every block.
    pub fn principal(blocks: usize) -> Self {
        Self { signs: vec![1; blocks] }
    }

    pub fn from_signs(signs: Vec<i8>) -> Result<Self, GbdtError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(GbdtError::Precondition("branch signs must be ±1".into()));
        }
        Ok(Self { signs })
    }

    pub fn with_sign(mut self, block: usize, sign: i8) -> Self {
        self.signs[block] = if sign < 0 { -1 } else { 1 };
        self
    }

    pub fn sign(&self, block: usize) -> i8 {
        self.signs.get(block).copied().unwrap_or(1)
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

fn on_shift(lambda: C64, mu: C64) -> bool {
    (lambda - mu).norm() <= 1e-12 * lambda.norm().max(1.0)
}

/// Toeplitz coefficients `c₀..c_{n−1}` of the square root of `(λ−μ)I + 𝒮₁`.
pub fn toeplitz_block_sqrt(lambda: C64, mu: C64, n: usize, sign: i8) -> Result<Vec<C64>, GbdtError> {
    if on_shift(lambda, mu) {
        return Err(GbdtError::EigenvalueOnShift {
            re: lambda.re,
            im: lambda.im,
        });
    }
    let mut c = Vec::with_capacity(n);
    if n == 0 {
        return Ok(c);
    }
    let c0 = signed_sqrt(lambda - mu, sign);
    c.push(c0);
    if n > 1 {
        c.push(C64::new(0.5, 0.0) / c0);
    }
    for i in 2..n {
        // Coefficient of 𝒮_i in the square: 2c₀c_i + Σ_{k=1}^{i−1} c_k c_{i−k} = 0.
        let conv: C64 = (1..i).map(|k| c[k] * c[i - k]).sum();
        c.push(-conv / (c0 * 2.0));
    }
    Ok(c)
}

/// Upper-triangular Toeplitz matrix with the given diagonals.
pub fn toeplitz_upper(coeffs: &[C64]) -> CMatrix {
    let n = coeffs.len();
    CMatrix::from_fn(n, n, |i, j| if j >= i { coeffs[j - i] } else { C64::zero() })
}

/// Block-diagonal `𝒟(μ)` in the Jordan basis.
pub fn shifted_sqrt_jordan(spec: &JordanSpec, mu: C64, branch: &BranchChoice) -> Result<CMatrix, GbdtError> {
    let blocks: Result<Vec<CMatrix>, GbdtError> = spec
        .blocks
        .iter()
        .enumerate()
        .map(|(k, b)| toeplitz_block_sqrt(b.eigenvalue, mu, b.size, branch.sign(k)).map(|c| toeplitz_upper(&c)))
        .collect();
    Ok(CMatrix::block_diag(&blocks?))
}

/// `ℛ(μ) = E 𝒟(μ) E⁻¹` with `ℛ(μ)² = 𝒜 − μI`.
pub fn shifted_sqrt(spec: &JordanSpec, mu: C64, branch: &BranchChoice) -> Result<CMatrix, GbdtError> {
    Ok(spec.from_jordan_basis(&shifted_sqrt_jordan(spec, mu, branch)?))
}
