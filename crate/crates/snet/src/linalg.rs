//! Exact rational matrices and the nonnegative-matrix toolkit.
//!
//! Everything structural (products, powers, determinants, inverses) happens
//! in exact arithmetic over arbitrary-precision rationals, because the
//! expectation identities this crate verifies are exact and matrix powers at
//! useful depths overflow any fixed-width integer. Floating point appears in
//! two places only: the power iteration for the spectral radius, which is
//! irrational in general, and the Collatz–Wielandt ratio bounds that sandwich
//! it.
//!
//! Vector conventions: `spectral_radius` returns a LEFT eigenvector row `v`
//! with `v X = ρ v`, normalized to sum 1; `collatz_bounds` takes a positive
//! COLUMN vector `w` and forms the ratios `[Xw]_i / w_i`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Default convergence tolerance for the power iteration.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap for the power iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Errors from matrix operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// Operand dimensions do not agree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// The matrix is not primitive, so Perron–Frobenius iteration does not apply.
    #[error("matrix is not primitive")]
    NotPrimitive,
    /// Power iteration hit the iteration cap before the estimates settled.
    #[error("power iteration did not converge within {max_iter} iterations (last delta {last_delta:e})")]
    NoConvergence { max_iter: usize, last_delta: f64 },
    /// A vector that must be entrywise positive is not.
    #[error("vector must be entrywise positive")]
    NonpositiveVector,
}

/// Outcome of a converged power iteration.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Spectral radius estimate.
    pub rho: f64,
    /// Left Perron vector, entrywise positive, normalized to sum 1.
    pub left_vector: Vec<f64>,
    /// Iterations consumed.
    pub iterations: usize,
    /// Final `‖vX − ρv‖₁ / ‖v‖₁`.
    pub residual: f64,
}

/// Dense square matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    /// Builds a matrix from rows.
    ///
    /// # Panics
    ///
    /// Panics if the rows do not form a nonempty square matrix.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        assert!(n > 0, "matrix must be nonempty");
        for row in &rows {
            assert_eq!(row.len(), n, "matrix must be square");
        }
        RationalMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix from integer rows; handy for fixtures and tests.
    pub fn from_integer_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    /// The `n×n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// The `n×n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix must be nonempty");
        RationalMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    /// Side length.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.n + col]
    }

    /// Overwrites the entry at `(row, col)`.
    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.n + col] = value;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// True when every entry is ≥ 0.
    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// All entries converted to doubles, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rational_to_f64).collect()
    }

    /// Exact product `self · other`.
    pub fn mat_mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    /// Exact power `self^t` by repeated squaring; `t = 0` gives the identity.
    pub fn pow(&self, t: u64) -> RationalMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mat_mul(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.mat_mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Primitivity test: nonnegative and some power entrywise positive.
    ///
    /// By Wielandt's bound a primitive `n×n` matrix has `X^m > 0` for
    /// `m = (n−1)² + 1`, so that single power decides the question. The
    /// power is evaluated over the boolean semiring (only the zero pattern
    /// matters), which keeps the cost at `O(n³ log n)` bit operations.
    pub fn is_primitive(&self) -> bool {
        if !self.is_nonnegative() {
            return false;
        }
        let n = self.n;
        let base: Vec<bool> = self.entries.iter().map(|e| !e.is_zero()).collect();
        let wielandt = ((n - 1) * (n - 1) + 1) as u64;
        let mut result: Vec<bool> = (0..n * n).map(|i| i % (n + 1) == 0).collect();
        let mut b = base;
        let mut e = wielandt;
        while e > 0 {
            if e & 1 == 1 {
                result = bool_mat_mul(&result, &b, n);
            }
            e >>= 1;
            if e > 0 {
                b = bool_mat_mul(&b, &b, n);
            }
        }
        result.iter().all(|&x| x)
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    ///
    /// Rows are first scaled to integers by their denominator lcm; the
    /// Bareiss recurrence then divides exactly at every step, so intermediate
    /// entries stay polynomial in size instead of exploding the way naive
    /// rational elimination does.
    pub fn determinant(&self) -> Rational {
        let n = self.n;
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut l = BigInt::one();
            for j in 0..n {
                l = l.lcm(self.get(i, j).denom());
            }
            let row = (0..n)
                .map(|j| (self.get(i, j) * Rational::from_integer(l.clone())).to_integer())
                .collect();
            scale *= &l;
            m.push(row);
        }

        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Rational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev; // exact by the Bareiss identity
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det_int = m[n - 1][n - 1].clone() * BigInt::from(sign);
        Rational::new(det_int, scale)
    }

    /// True when the exact determinant is nonzero.
    pub fn is_invertible(&self) -> bool {
        !self.determinant().is_zero()
    }

    /// Exact inverse by Gauss–Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(col, j).clone();
                    a.set(col, j, a.get(pivot_row, j).clone());
                    a.set(pivot_row, j, tmp);
                    let tmp = inv.get(col, j).clone();
                    inv.set(col, j, inv.get(pivot_row, j).clone());
                    inv.set(pivot_row, j, tmp);
                }
            }
            let pivot = a.get(col, col).clone();
            for j in 0..n {
                a.set(col, j, a.get(col, j) / &pivot);
                inv.set(col, j, inv.get(col, j) / &pivot);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let new_a = a.get(r, j) - &factor * a.get(col, j);
                    a.set(r, j, new_a);
                    let new_inv = inv.get(r, j) - &factor * inv.get(col, j);
                    inv.set(r, j, new_inv);
                }
            }
        }
        Some(inv)
    }

    /// Spectral radius and left Perron vector by power iteration.
    ///
    /// Iterates `v ← vX / ‖vX‖₁` from the uniform start and stops once
    /// successive radius estimates differ by less than `tol` AND the
    /// eigen-residual of the returned pair drops below `tol`. Primitivity is
    /// required up front: it is what guarantees a unique dominant eigenvalue
    /// and therefore convergence.
    pub fn spectral_radius(
        &self,
        tol: f64,
        max_iter: usize,
    ) -> Result<SpectralResult, LinalgError> {
        if !self.is_primitive() {
            return Err(LinalgError::NotPrimitive);
        }
        let n = self.n;
        let a = self.to_f64();
        let mut v = vec![1.0 / n as f64; n];
        let mut rho_prev = f64::NAN;
        let mut last_delta = f64::INFINITY;
        for it in 1..=max_iter {
            let w = left_mul_f64(&v, &a, n);
            let rho: f64 = w.iter().sum();
            for (vj, wj) in v.iter_mut().zip(&w) {
                *vj = wj / rho;
            }
            last_delta = (rho - rho_prev).abs();
            rho_prev = rho;
            if last_delta < tol {
                let w2 = left_mul_f64(&v, &a, n);
                let residual: f64 = w2
                    .iter()
                    .zip(&v)
                    .map(|(wj, vj)| (wj - rho * vj).abs())
                    .sum();
                if residual <= tol {
                    return Ok(SpectralResult {
                        rho,
                        left_vector: v,
                        iterations: it,
                        residual,
                    });
                }
            }
        }
        Err(LinalgError::NoConvergence {
            max_iter,
            last_delta,
        })
    }

    /// Collatz–Wielandt ratios `[Xw]_i / w_i` for a positive vector `w`.
    ///
    /// Returns `(min, max)`. For nonnegative `X` these sandwich the spectral
    /// radius for every positive `w`, with equality exactly at a Perron
    /// vector.
    pub fn collatz_bounds(&self, w: &[f64]) -> Result<(f64, f64), LinalgError> {
        if w.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                left: self.n,
                right: w.len(),
            });
        }
        if w.iter().any(|&x| !(x > 0.0)) {
            return Err(LinalgError::NonpositiveVector);
        }
        let a = self.to_f64();
        let mut min_ratio = f64::INFINITY;
        let mut max_ratio = f64::NEG_INFINITY;
        for i in 0..self.n {
            let xi: f64 = (0..self.n).map(|j| a[i * self.n + j] * w[j]).sum();
            let r = xi / w[i];
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
        }
        Ok((min_ratio, max_ratio))
    }
}

/// Exact row-vector × matrix product.
pub fn row_times_matrix(
    v: &[Rational],
    m: &RationalMatrix,
) -> Result<Vec<Rational>, LinalgError> {
    if v.len() != m.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: v.len(),
            right: m.dim(),
        });
    }
    let n = m.dim();
    let mut out = vec![Rational::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..n {
            let e = m.get(i, j);
            if !e.is_zero() {
                out[j] += vi * e;
            }
        }
    }
    Ok(out)
}

/// `ℓ₁` norm of a rational vector.
pub fn rational_l1(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).sum()
}

/// Converts an exact rational to the nearest double, safely.
///
/// Numerator and denominator can individually dwarf the double range even
/// when their ratio does not (matrix powers at depth 200 are routine here),
/// so both are reduced to ≤ 900-bit mantissas with their discarded binary
/// exponents recombined at the end. Out-of-range ratios saturate to ±∞ or 0.
pub fn rational_to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let (nf, ne) = big_to_f64_exp(x.numer());
    let (df, de) = big_to_f64_exp(x.denom());
    (nf / df) * ((ne - de) as f64).exp2()
}

/// Splits a big integer into `(mantissa as f64, dropped binary exponent)`.
fn big_to_f64_exp(x: &BigInt) -> (f64, i64) {
    let bits = x.bits();
    if bits <= 900 {
        (x.to_f64().expect("fits in f64 range"), 0)
    } else {
        let shift = (bits - 900) as i64;
        let reduced = x >> (shift as usize);
        (reduced.to_f64().expect("fits in f64 range"), shift)
    }
}

/// Boolean matrix product (the semiring where + is OR and × is AND).
fn bool_mat_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    if b[k * n + j] {
                        out[i * n + j] = true;
                    }
                }
            }
        }
    }
    out
}

/// Left-multiplies row vector `v` by the row-major `n×n` matrix `a`.
fn left_mul_f64(v: &[f64], a: &[f64], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj += vi * a[i * n + j];
            }
        }
    }
    w
}
