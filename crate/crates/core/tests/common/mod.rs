#![allow(dead_code)]

use leverage_core::{DataMatrix64, Matrix64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Correlated, shifted and rescaled Gaussian design: `Z M` with random
/// mixing `M`, per-column scales in `[1e-2, 1e2]` and offsets in `[-50, 50]`.
/// Off-diagonal mixing shrinks with `p` so designs stay well conditioned;
/// ill-conditioned cases are built explicitly where a test needs them.
pub fn random_data(seed: u64, n: usize, p: usize) -> DataMatrix64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Matrix64::from_fn(n, p, |_, _| rng.sample(StandardNormal));
    let mix = Matrix64::from_fn(p, p, |i, j| {
        let g: f64 = rng.sample(StandardNormal);
        if i == j {
            1.0 + g.abs()
        } else {
            0.5 * g / (p as f64).sqrt()
        }
    });
    let scale: Vec<f64> = (0..p).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
    let shift: Vec<f64> = (0..p).map(|_| rng.random_range(-50.0..50.0)).collect();
    let x = z.matmul(&mix);
    let x = Matrix64::from_fn(n, p, |r, c| x[(r, c)] * scale[c] + shift[c]);
    DataMatrix64::with_default_names(x).unwrap()
}

/// Gauss-Jordan inverse with partial pivoting; shares no code with the
/// Cholesky paths it checks.
pub fn gauss_jordan_inverse(m: &Matrix64) -> Matrix64 {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Matrix64::from_fn(n, n, |i, j| inv[i][j])
}

/// Column means and divisor-n covariance computed directly from the raw
/// data, without the crate's centering.
pub fn naive_moments(d: &DataMatrix64) -> (Vec<f64>, Matrix64) {
    let (n, p) = (d.n(), d.p());
    let mean: Vec<f64> = (0..p)
        .map(|c| (0..n).map(|r| d.row(r)[c]).sum::<f64>() / n as f64)
        .collect();
    let cov = Matrix64::from_fn(p, p, |i, j| {
        (0..n)
            .map(|r| (d.row(r)[i] - mean[i]) * (d.row(r)[j] - mean[j]))
            .sum::<f64>()
            / n as f64
    });
    (mean, cov)
}

/// `D²` of every row via an explicit Gauss-Jordan inverse of the
/// correlation matrix (`D²` does not depend on column scales).
pub fn naive_distances(d: &DataMatrix64) -> Vec<f64> {
    let x = standardized(d);
    let n = d.n() as f64;
    let corr = x.transpose().matmul(&x);
    let corr = Matrix64::from_fn(d.p(), d.p(), |i, j| corr[(i, j)] / n);
    let inv = gauss_jordan_inverse(&corr);
    (0..d.n())
        .map(|r| {
            let dev = x.row(r);
            let w = inv.matvec(dev);
            dev.iter().zip(&w).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Columns standardized with [`naive_moments`]. The hat matrix with an
/// intercept is unchanged by per-column affine maps, and this keeps `ZᵀZ`
/// well conditioned for the Gauss-Jordan oracle.
pub fn standardized(d: &DataMatrix64) -> Matrix64 {
    let (mean, cov) = naive_moments(d);
    Matrix64::from_fn(d.n(), d.p(), |r, c| (d.row(r)[c] - mean[c]) / cov[(c, c)].sqrt())
}

/// Hat diagonal of `Z (ZᵀZ)⁻¹ Zᵀ` with `Z = [1 X]`, straight from the
/// definition (on standardized columns).
pub fn hat_from_definition(d: &DataMatrix64) -> Vec<f64> {
    let (n, p) = (d.n(), d.p());
    let x = standardized(d);
    let z = Matrix64::from_fn(n, p + 1, |r, c| if c == 0 { 1.0 } else { x[(r, c - 1)] });
    let inv = gauss_jordan_inverse(&z.transpose().matmul(&z));
    (0..n)
        .map(|r| {
            let zr = z.row(r);
            let w = inv.matvec(zr);
            zr.iter().zip(&w).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Least squares of column `i` on the other columns (with intercept) by
/// Gauss-Jordan normal equations on standardized predictors, mapped back to
/// raw units. Coefficients for the other columns in ascending order, and
/// residuals.
pub fn ols_on_others(d: &DataMatrix64, i: usize) -> (Vec<f64>, Vec<f64>) {
    let (n, p) = (d.n(), d.p());
    let (mean, cov) = naive_moments(d);
    let x = standardized(d);
    let others: Vec<usize> = (0..p).filter(|&k| k != i).collect();
    let z = Matrix64::from_fn(n, others.len() + 1, |r, c| if c == 0 { 1.0 } else { x[(r, others[c - 1])] });
    let y: Vec<f64> = (0..n).map(|r| d.row(r)[i] - mean[i]).collect();
    let zt = z.transpose();
    let beta = gauss_jordan_inverse(&zt.matmul(&z)).matvec(&zt.matvec(&y));
    let fitted = z.matvec(&beta);
    let res = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let coef = others
        .iter()
        .enumerate()
        .map(|(k, &c)| beta[k + 1] / cov[(c, c)].sqrt())
        .collect();
    (coef, res)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}
