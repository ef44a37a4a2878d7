//! Leverage `h_rr = (1 + D_r²) / n` of the intercept-augmented hat matrix,
//! with `D_r²` the squared Mahalanobis distance from the data mean.

use crate::error::Result;
use crate::linalg::{center, covariance, direct_inverse, CenteredData, CholeskyPair, DataMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeverageRecord<T> {
    /// 0-based.
    pub row_index: usize,
    pub leverage: T,
    pub mahalanobis_sq: T,
    pub flagged: bool,
}

/// Twice the mean leverage, `2(p + 1)/n`.
pub fn default_threshold<T: Scalar>(n: usize, p: usize) -> T {
    T::of_usize(2 * (p + 1)) / T::of_usize(n)
}

/// `D_r² = (x_r - x̄)ᵀ S⁻¹ (x_r - x̄)` through a forward solve with the
/// Cholesky factor of `S`; `S⁻¹` is never formed.
pub fn mahalanobis_sq<T: Scalar>(c: &CenteredData<T>, chol: &CholeskyPair<T>, r: usize) -> Result<T> {
    Ok(chol.quadratic_form_inv(c.deviation(r)?))
}

pub fn leverage<T: Scalar>(
    c: &CenteredData<T>,
    chol: &CholeskyPair<T>,
    r: usize,
    threshold: T,
) -> Result<LeverageRecord<T>> {
    let d2 = mahalanobis_sq(c, chol, r)?;
    Ok(record_from_distance(r, c.n(), d2, threshold))
}

pub(crate) fn record_from_distance<T: Scalar>(
    r: usize,
    n: usize,
    mahalanobis_sq: T,
    threshold: T,
) -> LeverageRecord<T> {
    let leverage = (T::one() + mahalanobis_sq) / T::of_usize(n);
    LeverageRecord {
        row_index: r,
        leverage,
        mahalanobis_sq,
        flagged: leverage > threshold,
    }
}

/// Leverages of every row.
pub fn leverages<T: Scalar>(
    c: &CenteredData<T>,
    chol: &CholeskyPair<T>,
    threshold: T,
) -> Vec<LeverageRecord<T>> {
    (0..c.n())
        .map(|r| {
            let d2 = chol.quadratic_form_inv(c.tilde_x().row(r));
            record_from_distance(r, c.n(), d2, threshold)
        })
        .collect()
}

/// Hat-matrix diagonal from `H = (1/n)11ᵀ + X̃(X̃ᵀX̃)⁻¹X̃ᵀ`, with the
/// explicit inverse. Oracle for [`leverage`].
pub fn hat_diagonal_oracle<T: Scalar>(data: &DataMatrix<T>) -> Result<Vec<T>> {
    let c = center(data)?;
    let n = T::of_usize(c.n());
    // X̃ᵀX̃ without the 1/n
    let mut gram = covariance(&c);
    for i in 0..c.p() {
        for j in 0..c.p() {
            gram[(i, j)] *= n;
        }
    }
    let g = direct_inverse(&gram)?;
    Ok((0..c.n())
        .map(|r| {
            let x = c.tilde_x().row(r);
            let gx = g.matvec(x);
            T::one() / n + x.iter().zip(&gx).map(|(&a, &b)| a * b).sum::<T>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DiagError;
    use crate::linalg::cholesky;
    use approx::assert_abs_diff_eq;

    fn setup(rows: &[&[f64]]) -> (CenteredData<f64>, CholeskyPair<f64>) {
        let d = DataMatrix::from_rows(rows).unwrap();
        let c = center(&d).unwrap();
        let ch = cholesky(&covariance(&c)).unwrap();
        (c, ch)
    }

    #[test]
    fn five_point_line() {
        let (c, ch) = setup(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0]]);
        let d2: Vec<f64> = (0..5).map(|r| mahalanobis_sq(&c, &ch, r).unwrap()).collect();
        for (got, want) in d2.iter().zip([2.0, 0.5, 0.0, 0.5, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let recs = leverages(&c, &ch, 0.55);
        let h: Vec<f64> = recs.iter().map(|r| r.leverage).collect();
        for (got, want) in h.iter().zip([0.6, 0.3, 0.2, 0.3, 0.6]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let flagged: Vec<usize> = recs.iter().filter(|r| r.flagged).map(|r| r.row_index).collect();
        assert_eq!(flagged, vec![0, 4]);
    }

    #[test]
    fn two_points_have_unit_leverage() {
        let (c, ch) = setup(&[&[0.0], &[1.0]]);
        for r in 0..2 {
            let rec = leverage(&c, &ch, r, 0.5).unwrap();
            assert_abs_diff_eq!(rec.mahalanobis_sq, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rec.leverage, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn unit_square() {
        let (c, ch) = setup(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        for r in 0..4 {
            let rec = leverage(&c, &ch, r, 1.0).unwrap();
            assert_abs_diff_eq!(rec.mahalanobis_sq, 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rec.leverage, 0.75, epsilon = 1e-12);
            assert!(!rec.flagged);
        }
    }

    #[test]
    fn row_at_mean_has_zero_distance() {
        let (c, ch) = setup(&[&[0.0, 1.0], &[1.0, 0.0], &[2.0, 2.0], &[1.0, 1.0]]);
        // row 3 is the mean
        assert_eq!(mahalanobis_sq(&c, &ch, 3).unwrap(), 0.0);
        assert_eq!(
            mahalanobis_sq(&c, &ch, 4),
            Err(DiagError::IndexOutOfRange { index: 4, len: 4 })
        );
    }

    #[test]
    fn oracle_on_line() {
        let d = DataMatrix::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0]]).unwrap();
        let h = hat_diagonal_oracle(&d).unwrap();
        for (got, want) in h.iter().zip([0.6, 0.3, 0.2, 0.3, 0.6]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn default_threshold_is_twice_mean_leverage() {
        assert_eq!(default_threshold::<f64>(10, 4), 1.0);
    }
}
