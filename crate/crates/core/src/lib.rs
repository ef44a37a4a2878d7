//! Leverage diagnostics for linear regression with an intercept.
//!
//! For a design `X` (n rows, p regressors) the leverage of row r is
//! `h_rr = (1 + D_r²) / n`, where `D_r²` is the squared Mahalanobis
//! distance of `x_r` from the column means under the divisor-n covariance.
//! This crate computes both and attributes `D_r²` to the regressors in two
//! exact ways:
//!
//! * [`decomposition::Decomposer::decomposition_one`]: one signed term per
//!   regressor, each the product of a collinearity inflation factor, the
//!   standardized residual of that regressor regressed on the others, and
//!   its marginal z-score.
//! * [`decomposition::Decomposer::decomposition_two`]: the distance without
//!   one regressor plus the squared auxiliary residual, i.e. how much
//!   leverage that regressor alone contributes.
//!
//! Everything is generic over [`Scalar`] (`f64`, `f32`); the `*64` aliases
//! below fix the precision the tolerances in [`verify`] are stated for.

pub mod aux;
pub mod decomposition;
pub mod error;
pub mod leverage;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod synthetic;
pub mod verify;

pub use aux::{aux_regression, multiple_correlation, standardized_aux_residual, AuxRegression, PermutedFactors};
pub use decomposition::{
    decomposition_one, decomposition_two, inverse_cov_via_permutations, leverage_drop, partitioned_inverse,
    DecompositionIIResult, DecompositionITerm, Decomposer,
};
pub use error::{DiagError, Result};
pub use leverage::{default_threshold, hat_diagonal_oracle, leverage, leverages, mahalanobis_sq, LeverageRecord};
pub use linalg::{
    apply_transposition, center, cholesky, correlation_condition, covariance, dependence_partners, direct_inverse,
    CenteredData, CholeskyPair, DataMatrix, TranspositionPerm,
};
pub use matrix::Matrix;
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type DataMatrix64 = DataMatrix<f64>;
pub type CenteredData64 = CenteredData<f64>;
pub type CholeskyPair64 = CholeskyPair<f64>;
pub type LeverageRecord64 = LeverageRecord<f64>;
pub type AuxRegression64 = AuxRegression<f64>;
pub type DecompositionITerm64 = DecompositionITerm<f64>;
pub type DecompositionIIResult64 = DecompositionIIResult<f64>;

pub type Matrix32 = Matrix<f32>;
pub type DataMatrix32 = DataMatrix<f32>;
pub type CenteredData32 = CenteredData<f32>;
