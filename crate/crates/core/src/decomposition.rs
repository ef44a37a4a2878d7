//! Exact attributions of `D_r²` to individual regressors.
//!
//! Decomposition I writes
//!
//! ```text
//! D_r² = Σ_i (1 - r_i²)^(-1/2) · [b_(i)ᵀ P_(i) (x_r - x̄)] · (x_ri - x̄_i) / s_i
//! ```
//!
//! a sum of inflation × auxiliary residual × marginal z over the regressors.
//! It rests on assembling `S⁻¹` column by column as `b_(i)pp P_(i) b_(i)`.
//! Individual terms are signed and may cancel; only their sum is fixed.
//!
//! Decomposition II splits `D_r² = D²_{r(-j)} + [b_(j)ᵀ P_(j) (x_r - x̄)]²`,
//! where the first part is the distance on the other `p - 1` regressors. The
//! second part divided by `n` is the exact drop in `h_rr` when regressor `j`
//! is removed.

use crate::aux::PermutedFactors;
use crate::error::{DiagError, Result};
use crate::leverage::{record_from_distance, LeverageRecord};
use crate::linalg::{lower_triangular_inverse, CenteredData};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionITerm<T> {
    pub regressor: usize,
    /// `(1 - r_i²)^(-1/2)`
    pub inflation: T,
    /// `b_(i)ᵀ P_(i) (x_r - x̄)`
    pub aux_residual: T,
    /// `(x_ri - x̄_i) / s_i`
    pub marginal_z: T,
    pub term: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionIIResult<T> {
    pub removed: usize,
    /// `D²_{r(-j)}`; zero when no regressor remains.
    pub subset_dist_sq: T,
    /// `[b_(j)ᵀ P_(j) (x_r - x̄)]²`
    pub residual_sq: T,
    pub total: T,
}

/// Per-dataset cache of the permuted factorizations with the per-row
/// queries built on top of it. Read-only once constructed.
#[derive(Debug, Clone)]
pub struct Decomposer<'a, T> {
    data: &'a CenteredData<T>,
    factors: PermutedFactors<T>,
}

impl<'a, T: Scalar> Decomposer<'a, T> {
    pub fn new(data: &'a CenteredData<T>) -> Result<Self> {
        Ok(Self {
            data,
            factors: PermutedFactors::new(data)?,
        })
    }

    pub fn data(&self) -> &CenteredData<T> {
        self.data
    }

    pub fn factors(&self) -> &PermutedFactors<T> {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> usize {
        self.data.p()
    }

    pub fn mahalanobis_sq(&self, r: usize) -> Result<T> {
        Ok(self.factors.base().quadratic_form_inv(self.data.deviation(r)?))
    }

    pub fn leverage(&self, r: usize, threshold: T) -> Result<LeverageRecord<T>> {
        Ok(record_from_distance(r, self.n(), self.mahalanobis_sq(r)?, threshold))
    }

    /// `S⁻¹` assembled as `[b_(1)pp P_(1) b_(1), ..., b_(p)pp P_(p) b_(p)]`.
    pub fn inverse_cov_via_permutations(&self) -> Matrix<T> {
        let p = self.p();
        let mut inv = Matrix::zeros(p, p);
        for i in 0..p {
            let f = &self.factors.factor(i).expect("i < p");
            let perm = self.factors.perm(i).expect("i < p");
            let b_pp = f.b_pp();
            let b = f.b_last();
            for (k, &bk) in b.iter().enumerate() {
                inv[(perm.map(k), i)] = b_pp * bk;
            }
        }
        inv
    }

    /// `S⁻¹` from the partition of `A` into `A₁`, `a₁`, `a_pp`:
    ///
    /// ```text
    /// [ (A₁A₁ᵀ)⁻¹ + b₁b₁ᵀ   b_pp b₁ ]
    /// [ b_pp b₁ᵀ            b_pp²   ]
    /// ```
    pub fn partitioned_inverse(&self) -> Result<Matrix<T>> {
        let p = self.p();
        if p == 1 {
            return Err(DiagError::SingleRegressor);
        }
        let f = self.factors.base();
        let a1_inv = lower_triangular_inverse(&f.a_leading());
        let lead_inv = a1_inv.transpose().matmul(&a1_inv);
        let b1 = f.b1();
        let b_pp = f.b_pp();
        let mut inv = Matrix::zeros(p, p);
        for i in 0..p - 1 {
            for j in 0..p - 1 {
                inv[(i, j)] = lead_inv[(i, j)] + b1[i] * b1[j];
            }
            inv[(i, p - 1)] = b_pp * b1[i];
            inv[(p - 1, i)] = b_pp * b1[i];
        }
        inv[(p - 1, p - 1)] = b_pp * b_pp;
        Ok(inv)
    }

    /// One term per regressor, in original column order.
    pub fn decomposition_one(&self, r: usize) -> Result<Vec<DecompositionITerm<T>>> {
        let d = self.data.deviation(r)?;
        let std = self.data.std();
        let inflation = self.factors.inflation();
        (0..self.p())
            .map(|i| {
                let aux_residual = self.factors.aux_residual(self.data, i, r)?;
                let marginal_z = d[i] / std[i];
                Ok(DecompositionITerm {
                    regressor: i,
                    inflation: inflation[i],
                    aux_residual,
                    marginal_z,
                    term: inflation[i] * aux_residual * marginal_z,
                })
            })
            .collect()
    }

    /// Split of `D_r²` for removing regressor `j`.
    pub fn decomposition_two(&self, j: usize, r: usize) -> Result<DecompositionIIResult<T>> {
        let f = self.factors.factor(j)?;
        let perm = self.factors.perm(j)?;
        let d = self.data.deviation(r)?;
        let p = self.p();
        let y: Vec<T> = (0..p).map(|k| d[perm.map(k)]).collect();
        let subset_dist_sq = f.leading_quadratic_form_inv(&y, p - 1);
        let res = f
            .b_last()
            .iter()
            .zip(&y)
            .map(|(&b, &v)| b * v)
            .sum::<T>();
        let residual_sq = res * res;
        Ok(DecompositionIIResult {
            removed: j,
            subset_dist_sq,
            residual_sq,
            total: subset_dist_sq + residual_sq,
        })
    }

    /// Decrease in `h_rr` when regressor `j` is dropped and the others kept.
    pub fn leverage_drop(&self, j: usize, r: usize) -> Result<T> {
        Ok(self.decomposition_two(j, r)?.residual_sq / T::of_usize(self.n()))
    }
}

pub fn inverse_cov_via_permutations<T: Scalar>(c: &CenteredData<T>) -> Result<Matrix<T>> {
    Ok(Decomposer::new(c)?.inverse_cov_via_permutations())
}

pub fn partitioned_inverse<T: Scalar>(c: &CenteredData<T>) -> Result<Matrix<T>> {
    if c.p() == 1 {
        return Err(DiagError::SingleRegressor);
    }
    Decomposer::new(c)?.partitioned_inverse()
}

pub fn decomposition_one<T: Scalar>(c: &CenteredData<T>, r: usize) -> Result<Vec<DecompositionITerm<T>>> {
    c.deviation(r)?;
    Decomposer::new(c)?.decomposition_one(r)
}

pub fn decomposition_two<T: Scalar>(
    c: &CenteredData<T>,
    j: usize,
    r: usize,
) -> Result<DecompositionIIResult<T>> {
    c.deviation(r)?;
    Decomposer::new(c)?.decomposition_two(j, r)
}

pub fn leverage_drop<T: Scalar>(c: &CenteredData<T>, j: usize, r: usize) -> Result<T> {
    c.deviation(r)?;
    Decomposer::new(c)?.leverage_drop(j, r)
}
