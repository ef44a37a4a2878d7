//! Regression of each regressor on the remaining ones, read off the
//! Cholesky factor of the covariance after moving that regressor last.
//!
//! With `A_(i)` the factor of `P_(i) S P_(i)` and `b_(i)` the last column of
//! `B_(i) = (A_(i)⁻¹)ᵀ`:
//!
//! * coefficients: `-b_(i)[k] / b_(i)pp` for the predictors,
//! * residual of row r: `b_(i)ᵀ P_(i) (x_r - x̄) / b_(i)pp`,
//! * `SSE = n / b_(i)pp²`,
//! * `r_i² = a₁ᵀa₁ / (a₁ᵀa₁ + a_pp²)`, and `1 - r_i² = 1 / (s_i² b_(i)pp²)`.
//!
//! [`standardized_aux_residual`] returns `b_(i)ᵀ P_(i) (x_r - x̄)` itself,
//! without any further studentization. It is the residual scaled by
//! `b_(i)pp`, and exactly the factor that enters Decomposition I.

use crate::error::{check_index, DiagError, Result};
use crate::linalg::{cholesky, covariance, CenteredData, CholeskyPair, TranspositionPerm};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct AuxRegression<T> {
    pub target: usize,
    /// Original indices of the predictors, ascending.
    pub predictors: Vec<usize>,
    /// One coefficient per entry of `predictors`.
    pub coefficients: Vec<T>,
    pub residuals: Vec<T>,
    pub sse: T,
    pub r_sq: T,
    pub inflation: T,
}

/// Factors `P_(i) S P_(i)`. A pivot failure is reported against the
/// original column index.
pub fn permuted_factor<T: Scalar>(s: &Matrix<T>, i: usize) -> Result<CholeskyPair<T>> {
    let perm = TranspositionPerm::new(i, s.nrows())?;
    cholesky(&perm.conjugate(s)).map_err(|e| match e {
        DiagError::NotPositiveDefinite { pivot } => DiagError::NotPositiveDefinite {
            pivot: perm.map(pivot),
        },
        other => other,
    })
}

/// `(r², 1 - r²)` with `r² = a₁ᵀa₁ / (a₁ᵀa₁ + a_pp²)`. The complement is
/// formed as `a_pp² / (a₁ᵀa₁ + a_pp²)`, not by subtraction, so it keeps its
/// digits when `r²` is close to 1. `(0, 1)` for a 1x1 factor.
pub(crate) fn r_sq_from_factor<T: Scalar>(f: &CholeskyPair<T>) -> (T, T) {
    let a1: T = f.a1().iter().map(|&v| v * v).sum();
    let app2 = f.a_pp() * f.a_pp();
    let total = a1 + app2;
    (a1 / total, app2 / total)
}

pub(crate) fn inflation_from_complement<T: Scalar>(one_minus_r_sq: T) -> T {
    one_minus_r_sq.sqrt().recip()
}

/// `b_(i)ᵀ P_(i) d` for a deviation vector `d` in original order.
pub(crate) fn permuted_residual<T: Scalar>(f: &CholeskyPair<T>, perm: TranspositionPerm, d: &[T]) -> T {
    let p = perm.dim();
    let b = f.b();
    (0..p)
        .map(|k| b[(k, p - 1)] * d[perm.map(k)])
        .sum()
}

/// The `p` permuted factorizations of one dataset, computed once and shared
/// by every per-row query.
#[derive(Debug, Clone)]
pub struct PermutedFactors<T> {
    factors: Vec<CholeskyPair<T>>,
    r_sq: Vec<T>,
    one_minus_r_sq: Vec<T>,
    inflation: Vec<T>,
}

impl<T: Scalar> PermutedFactors<T> {
    pub fn new(c: &CenteredData<T>) -> Result<Self> {
        Self::from_covariance(&covariance(c))
    }

    pub fn from_covariance(s: &Matrix<T>) -> Result<Self> {
        let p = s.nrows();
        // the identity permutation first, so a singular input reports the
        // same pivot as a plain factorization would
        let base = cholesky(s)?;
        let mut factors = Vec::with_capacity(p);
        for i in 0..p - 1 {
            factors.push(permuted_factor(s, i)?);
        }
        factors.push(base);
        let (r_sq, one_minus_r_sq): (Vec<T>, Vec<T>) = factors.iter().map(r_sq_from_factor).unzip();
        let inflation = one_minus_r_sq.iter().map(|&c| inflation_from_complement(c)).collect();
        Ok(Self {
            factors,
            r_sq,
            one_minus_r_sq,
            inflation,
        })
    }

    pub fn p(&self) -> usize {
        self.factors.len()
    }

    /// Factor of `P_(i) S P_(i)`.
    pub fn factor(&self, i: usize) -> Result<&CholeskyPair<T>> {
        check_index(i, self.p())?;
        Ok(&self.factors[i])
    }

    /// Unpermuted factor of `S`.
    pub fn base(&self) -> &CholeskyPair<T> {
        &self.factors[self.p() - 1]
    }

    pub fn perm(&self, i: usize) -> Result<TranspositionPerm> {
        TranspositionPerm::new(i, self.p())
    }

    pub fn r_sq(&self) -> &[T] {
        &self.r_sq
    }

    /// `1 - r_i²`, computed without cancellation.
    pub fn one_minus_r_sq(&self) -> &[T] {
        &self.one_minus_r_sq
    }

    pub fn inflation(&self) -> &[T] {
        &self.inflation
    }

    /// `b_(i)pp`.
    pub fn b_pp(&self, i: usize) -> Result<T> {
        Ok(self.factor(i)?.b_pp())
    }

    /// `b_(i)ᵀ P_(i) (x_r - x̄)`.
    pub fn aux_residual(&self, c: &CenteredData<T>, i: usize, r: usize) -> Result<T> {
        let f = self.factor(i)?;
        Ok(permuted_residual(f, self.perm(i)?, c.deviation(r)?))
    }

    pub fn aux_regression(&self, c: &CenteredData<T>, i: usize) -> Result<AuxRegression<T>> {
        if self.p() == 1 {
            return Err(DiagError::SingleRegressor);
        }
        let f = self.factor(i)?;
        let perm = self.perm(i)?;
        Ok(build_aux(c, f, perm, self.r_sq[i], self.inflation[i]))
    }
}

fn build_aux<T: Scalar>(
    c: &CenteredData<T>,
    f: &CholeskyPair<T>,
    perm: TranspositionPerm,
    r_sq: T,
    inflation: T,
) -> AuxRegression<T> {
    let i = perm.target();
    let p = perm.dim();
    let b = f.b_last();
    let b_pp = f.b_pp();
    let predictors: Vec<usize> = (0..p).filter(|&j| j != i).collect();
    let coefficients = predictors
        .iter()
        .map(|&j| -b[perm.map(j)] / b_pp)
        .collect();
    let residuals = (0..c.n())
        .map(|r| permuted_residual(f, perm, c.tilde_x().row(r)) / b_pp)
        .collect();
    AuxRegression {
        target: i,
        predictors,
        coefficients,
        residuals,
        sse: T::of_usize(c.n()) / (b_pp * b_pp),
        r_sq,
        inflation,
    }
}

/// Regression of regressor `i` on the others.
pub fn aux_regression<T: Scalar>(c: &CenteredData<T>, i: usize) -> Result<AuxRegression<T>> {
    check_index(i, c.p())?;
    if c.p() == 1 {
        return Err(DiagError::SingleRegressor);
    }
    let f = permuted_factor(&covariance(c), i)?;
    let (r_sq, complement) = r_sq_from_factor(&f);
    let perm = TranspositionPerm::new(i, c.p())?;
    Ok(build_aux(c, &f, perm, r_sq, inflation_from_complement(complement)))
}

/// `r_i²`. With a single regressor there is nothing to correlate with, and
/// the result is 0.
pub fn multiple_correlation<T: Scalar>(c: &CenteredData<T>, i: usize) -> Result<T> {
    check_index(i, c.p())?;
    if c.p() == 1 {
        return Ok(T::zero());
    }
    Ok(r_sq_from_factor(&permuted_factor(&covariance(c), i)?).0)
}

/// `b_(i)ᵀ P_(i) (x_r - x̄)`; for a single regressor this is `(x_r - x̄)/s`.
pub fn standardized_aux_residual<T: Scalar>(c: &CenteredData<T>, i: usize, r: usize) -> Result<T> {
    check_index(i, c.p())?;
    let d = c.deviation(r)?;
    let f = permuted_factor(&covariance(c), i)?;
    Ok(permuted_residual(&f, TranspositionPerm::new(i, c.p())?, d))
}
