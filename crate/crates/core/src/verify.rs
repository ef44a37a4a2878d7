//! Oracle re-runs of every identity on a concrete dataset. Each check pairs
//! the production path with an independent computation and reports the
//! largest deviation seen against a fixed tolerance.

use crate::aux::PermutedFactors;
use crate::decomposition::Decomposer;
use crate::error::Result;
use crate::leverage::hat_diagonal_oracle;
use crate::linalg::{center, cholesky, covariance, direct_inverse, DataMatrix};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `D²` of every row recomputed from scratch on `data`; all zeros when the
/// dataset has no columns left.
fn fresh_distances(data: &DataMatrix<f64>, skip: Option<usize>) -> Result<Vec<f64>> {
    let sub = match skip {
        Some(_) if data.p() == 1 => return Ok(vec![0.0; data.n()]),
        Some(j) => data.without_column(j)?,
        None => data.clone(),
    };
    let c = center(&sub)?;
    let chol = cholesky(&covariance(&c))?;
    Ok((0..c.n())
        .map(|r| chol.quadratic_form_inv(c.tilde_x().row(r)))
        .collect())
}

fn max_rel_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

/// Runs every oracle against `data`.
pub fn verify(data: &DataMatrix<f64>) -> Result<VerificationReport> {
    let c = center(data)?;
    let (n, p) = (c.n(), c.p());
    let nf = n as f64;
    let s = covariance(&c);
    let dec = Decomposer::new(&c)?;
    let factors: &PermutedFactors<f64> = dec.factors();
    let mut checks = Vec::new();

    let d2: Vec<f64> = (0..n).map(|r| dec.mahalanobis_sq(r)).collect::<Result<_>>()?;
    let h: Vec<f64> = d2.iter().map(|d| (1.0 + d) / nf).collect();
    let d2_max = d2.iter().cloned().fold(0.0, f64::max);

    let oracle = hat_diagonal_oracle(data)?;
    let dev = h.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::new("hat_diagonal", dev, 1e-10));
    checks.push(Check::new("trace", (h.iter().sum::<f64>() - (p + 1) as f64).abs(), 1e-9));

    let (mut one, mut two, mut cross) = (0.0f64, 0.0f64, 0.0f64);
    for r in 0..n {
        let terms = dec.decomposition_one(r)?;
        one = one.max((terms.iter().map(|t| t.term).sum::<f64>() - d2[r]).abs());
        for j in 0..p {
            let split = dec.decomposition_two(j, r)?;
            two = two.max((split.total - d2[r]).abs());
            cross = cross.max((split.residual_sq - terms[j].aux_residual.powi(2)).abs());
        }
    }
    let sum_tol = 1e-9 * d2_max;
    checks.push(Check::new("decomposition_one_sum", one, sum_tol));
    checks.push(Check::new("decomposition_two_sum", two, sum_tol));
    checks.push(Check::new("decomposition_cross", cross, sum_tol));

    let direct = direct_inverse(&s)?;
    checks.push(Check::new(
        "inverse_permuted",
        max_rel_diff(&dec.inverse_cov_via_permutations(), &direct),
        1e-8,
    ));

    // leverage drop and subset distance against full recomputation
    let (mut drop, mut subset) = (0.0f64, 0.0f64);
    for j in 0..p {
        let rest = fresh_distances(data, Some(j))?;
        for r in 0..n {
            let split = dec.decomposition_two(j, r)?;
            subset = subset.max((split.subset_dist_sq - rest[r]).abs());
            let h_rest = (1.0 + rest[r]) / nf;
            drop = drop.max((dec.leverage_drop(j, r)? - (h[r] - h_rest)).abs());
        }
    }
    checks.push(Check::new("leverage_drop", drop, 1e-10));
    checks.push(Check::new("subset_distance", subset, 1e-8 * d2_max.max(1.0)));

    if p >= 2 {
        checks.push(Check::new(
            "inverse_partitioned",
            max_rel_diff(&dec.partitioned_inverse()?, &direct),
            1e-8,
        ));

        let (mut ident, mut coef, mut resid, mut sse) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..p {
            let one_minus = factors.one_minus_r_sq()[i];
            let b_pp = factors.b_pp(i)?;
            let si = c.std()[i];
            ident = ident.max((one_minus - 1.0 / (si * si * b_pp * b_pp)).abs() / one_minus);

            let aux = factors.aux_regression(&c, i)?;
            let (beta, fitted_res) = normal_equations(&c, i)?;
            let scale = beta.iter().fold(1.0f64, |m, b| m.max(b.abs()));
            for (a, b) in aux.coefficients.iter().zip(&beta) {
                coef = coef.max((a - b).abs() / scale);
            }
            for (a, b) in aux.residuals.iter().zip(&fitted_res) {
                resid = resid.max((a - b).abs() / si.max(1.0));
            }
            let ss: f64 = aux.residuals.iter().map(|e| e * e).sum();
            sse = sse.max((ss - aux.sse).abs() / aux.sse);
        }
        checks.push(Check::new("multiple_correlation_identity", ident, 1e-10));
        checks.push(Check::new("aux_coefficients", coef, 1e-8));
        checks.push(Check::new("aux_residuals", resid, 1e-8));
        checks.push(Check::new("aux_sse", sse, 1e-9));
    }

    Ok(VerificationReport { checks })
}

/// `(X̃₁ᵀX̃₁)⁻¹X̃₁ᵀx̃_i` and its residuals, predictors in ascending order.
fn normal_equations(c: &crate::linalg::CenteredData<f64>, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = c.tilde_x();
    let others: Vec<usize> = (0..c.p()).filter(|&k| k != i).collect();
    let x1 = x.select_columns(&others);
    let y = x.column(i);
    let gram = x1.transpose().matmul(&x1);
    let rhs = x1.transpose().matvec(&y);
    let beta = direct_inverse(&gram)?.matvec(&rhs);
    let fitted = x1.matvec(&beta);
    let res = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    Ok((beta, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate, Plant, ScenarioSpec};

    #[test]
    fn random_data_passes() {
        let d = generate(&ScenarioSpec::new(11, 60, 5)).unwrap();
        let rep = verify(&d).unwrap();
        assert_eq!(rep.checks.len(), 13);
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn single_column_skips_aux_checks() {
        let d = DataMatrix::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0]]).unwrap();
        let rep = verify(&d).unwrap();
        assert!(rep.all_passed());
        assert!(rep.checks.iter().all(|c| c.name != "aux_sse"));
    }

    #[test]
    fn collinear_data_still_consistent() {
        let spec = ScenarioSpec::new(2, 80, 4).with_plant(Plant::CollinearPair {
            col_a: 0,
            col_b: 3,
            noise_sd: 1e-2,
        });
        let rep = verify(&generate(&spec).unwrap()).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
    }
}
