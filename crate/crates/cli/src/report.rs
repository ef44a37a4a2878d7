//! The diagnostics pipeline and the report it produces.

use leverage_core::verify::{verify, Check};
use leverage_core::{
    center, correlation_condition, covariance, default_threshold, dependence_partners, Decomposer, DiagError,
    Matrix64, TranspositionPerm,
};
use serde::{Deserialize, Serialize};

use crate::config::{Decompositions, RunConfig};
use crate::error::CliError;
use crate::ingest::{ingest_csv, Ingested};

/// Correlation-matrix condition number above which the report carries a
/// near-singularity warning.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub meta: Meta,
    pub regressors: Vec<RegressorSummary>,
    pub rows: Vec<RowReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub n: usize,
    pub p: usize,
    pub columns: Vec<String>,
    pub response: Option<String>,
    pub threshold: f64,
    /// `"default"` for `2(p + 1)/n`, `"user"` otherwise.
    pub threshold_source: String,
    pub row_numbering: String,
    pub decompositions: Vec<String>,
    pub condition_number: f64,
    pub condition_warning: bool,
    pub flagged_count: usize,
    pub verification: Option<Vec<CheckReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl From<&Check> for CheckReport {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.to_owned(),
            max_deviation: c.max_deviation,
            tolerance: c.tolerance,
            passed: c.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub r_sq: f64,
    pub inflation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    /// 1-based data row, i.e. line number minus one.
    pub row: usize,
    pub response: Option<f64>,
    pub leverage: f64,
    pub mahalanobis_sq: f64,
    pub flagged: bool,
    pub decomposition_one: Option<Vec<TermReport>>,
    pub decomposition_two: Option<Vec<SplitReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub regressor: String,
    pub inflation: f64,
    pub aux_residual: f64,
    pub marginal_z: f64,
    pub term: f64,
    /// `term / D²`; the shares of a row sum to one. Zero when `D² = 0`.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub removed: String,
    pub subset_dist_sq: f64,
    pub residual_sq: f64,
    pub leverage_drop: f64,
}

impl DiagnosticsReport {
    /// 2 when any row is flagged, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.meta.flagged_count > 0 {
            2
        } else {
            0
        }
    }

    pub fn verification_failed(&self) -> bool {
        self.meta
            .verification
            .as_ref()
            .is_some_and(|checks| checks.iter().any(|c| !c.passed))
    }

    /// Rows ordered by descending leverage, ties by ascending row.
    pub fn ranked_rows(&self) -> Vec<&RowReport> {
        let mut rows: Vec<&RowReport> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.leverage.total_cmp(&a.leverage).then(a.row.cmp(&b.row)));
        rows
    }
}

pub fn run_diagnostics(config: &RunConfig) -> Result<DiagnosticsReport, CliError> {
    config.validate()?;
    let input = ingest_csv(&config.input_path, config.response_column.as_deref())?;
    analyze(&input, config)
}

/// Pipeline over already-ingested data; `config.input_path` is ignored.
pub fn analyze(input: &Ingested, config: &RunConfig) -> Result<DiagnosticsReport, CliError> {
    config.validate()?;
    let data = &input.data;
    let names = data.column_names();
    let (n, p) = (data.n(), data.p());

    let c = center(data).map_err(|e| name_columns(e, names, None))?;
    let s = covariance(&c);
    let dec = Decomposer::new(&c).map_err(|e| name_columns(e, names, Some(&s)))?;
    let condition_number = correlation_condition(&s);

    let threshold = config.threshold.unwrap_or_else(|| default_threshold(n, p));
    let Decompositions { one, two } = config.decompositions;
    let factors = dec.factors();

    let regressors = (0..p)
        .map(|i| RegressorSummary {
            name: names[i].clone(),
            mean: c.mean()[i],
            std: c.std()[i],
            r_sq: factors.r_sq()[i],
            inflation: factors.inflation()[i],
        })
        .collect();

    let rows = (0..n)
        .map(|r| {
            let rec = dec.leverage(r, threshold)?;
            let d2 = rec.mahalanobis_sq;
            let decomposition_one = if one {
                let terms = dec.decomposition_one(r)?;
                Some(
                    terms
                        .iter()
                        .map(|t| TermReport {
                            regressor: names[t.regressor].clone(),
                            inflation: t.inflation,
                            aux_residual: t.aux_residual,
                            marginal_z: t.marginal_z,
                            term: t.term,
                            share: if d2 > 0.0 { t.term / d2 } else { 0.0 },
                        })
                        .collect(),
                )
            } else {
                None
            };
            let decomposition_two = if two {
                Some(
                    (0..p)
                        .map(|j| {
                            let split = dec.decomposition_two(j, r)?;
                            Ok(SplitReport {
                                removed: names[j].clone(),
                                subset_dist_sq: split.subset_dist_sq,
                                residual_sq: split.residual_sq,
                                leverage_drop: split.residual_sq / n as f64,
                            })
                        })
                        .collect::<Result<Vec<_>, DiagError>>()?,
                )
            } else {
                None
            };
            Ok(RowReport {
                row: r + 1,
                response: input.response.as_ref().map(|resp| resp.values[r]),
                leverage: rec.leverage,
                mahalanobis_sq: d2,
                flagged: rec.flagged,
                decomposition_one,
                decomposition_two,
            })
        })
        .collect::<Result<Vec<_>, DiagError>>()?;

    let verification = if config.verify {
        let report = verify(data).map_err(|e| name_columns(e, names, Some(&s)))?;
        Some(report.checks.iter().map(CheckReport::from).collect())
    } else {
        None
    };

    let flagged_count = rows.iter().filter(|r| r.flagged).count();
    Ok(DiagnosticsReport {
        meta: Meta {
            n,
            p,
            columns: names.to_vec(),
            response: input.response.as_ref().map(|r| r.name.clone()),
            threshold,
            threshold_source: if config.threshold.is_some() { "user" } else { "default" }.to_owned(),
            row_numbering: "1-based".to_owned(),
            decompositions: config.decompositions.labels(),
            condition_number,
            condition_warning: !(condition_number <= CONDITION_WARNING),
            flagged_count,
            verification,
        },
        regressors,
        rows,
    })
}

/// Replaces column indices in kernel errors by the column names. For a
/// collapsed pivot the culprit is regressed on all other columns to find
/// the ones it depends on.
fn name_columns(err: DiagError, names: &[String], s: Option<&Matrix64>) -> CliError {
    match (err, s) {
        (DiagError::ConstantColumn(k), _) => CliError::ConstantColumn(names[k].clone()),
        (DiagError::NotPositiveDefinite { pivot: k }, Some(s)) => {
            let p = s.nrows();
            let perm = TranspositionPerm::new(k, p).expect("pivot within dimension");
            let mut partners: Vec<usize> = dependence_partners(&perm.conjugate(s), p - 1)
                .into_iter()
                .map(|j| perm.map(j))
                .collect();
            if partners.is_empty() {
                partners = dependence_partners(s, k);
            }
            partners.push(k);
            partners.sort_unstable();
            CliError::Collinear(partners.into_iter().map(|j| names[j].clone()).collect())
        }
        (e, _) => CliError::Diag(e),
    }
}
