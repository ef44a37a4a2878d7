//! Seeded datasets with planted structure.
//!
//! Base data are i.i.d. standard normal, drawn row-major from ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`) on stream 0. Plant `k`
//! (0-based, in list order) draws any noise it needs from the same seed on
//! stream `k + 1`, so adding a plant never perturbs the base matrix or the
//! plants before it. Plants are applied in order. What they guarantee is
//! checked after the fact on the generated matrix, since moving one value
//! also moves the column mean and spread.
//!
//! Config format, one `key = value` per line, `#` starts a comment:
//!
//! ```text
//! seed = 42
//! n = 100
//! p = 4
//! plant = collinear_pair 0 1 0.001
//! plant = leverage_sweep 7 0.7071,-0.7071,0,0 0.005,0.01,0.02
//! ```
//!
//! Plant forms (indices 0-based):
//! `none`, `marginal_outlier ROW COL Z`, `aux_outlier ROW COL OFFSET`,
//! `collinear_pair COL_A COL_B NOISE_SD`,
//! `leverage_sweep ROW D1,..,Dp T1,..,Tk`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::decomposition::{DecompositionITerm, Decomposer};
use crate::error::{DiagError, Result};
use crate::leverage::{default_threshold, LeverageRecord};
use crate::linalg::{center, DataMatrix};
use crate::matrix::Matrix;

/// Human-readable description of the generator, for reports.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha) seed_from_u64; stream 0 base, stream k+1 plant k";

#[derive(Debug, Clone, PartialEq)]
pub enum Plant {
    None,
    /// Sets `x[row][col]` to `mean + z_target * sd` of the other rows in `col`.
    MarginalOutlier { row: usize, col: usize, z_target: f64 },
    /// Places `x[row][col]` `offset` residual standard deviations off the
    /// regression hyperplane of `col` on the other columns, fitted on the
    /// other rows. With one column it falls back to the marginal rule.
    AuxOutlier { row: usize, col: usize, offset: f64 },
    /// `x[·][col_b] = x[·][col_a] + noise_sd * N(0, 1)`.
    CollinearPair { col_a: usize, col_b: usize, noise_sd: f64 },
    /// Moves `row` to `m + t * direction`, `m` the mean of the other rows.
    /// [`generate`] uses the last `t`; [`sweep_leverage`] walks them all.
    LeverageSweep {
        row: usize,
        direction: Vec<f64>,
        t_values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub plants: Vec<Plant>,
}

impl ScenarioSpec {
    pub fn new(seed: u64, n: usize, p: usize) -> Self {
        Self {
            seed,
            n,
            p,
            plants: Vec::new(),
        }
    }

    pub fn with_plant(mut self, plant: Plant) -> Self {
        self.plants.push(plant);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DiagError::BadSpec(m));
        if self.n < 2 || self.p < 1 {
            return bad(format!("need n >= 2 and p >= 1, got n={} p={}", self.n, self.p));
        }
        let row_ok = |r: usize| r < self.n;
        let col_ok = |c: usize| c < self.p;
        let mut sweeps = 0;
        for plant in &self.plants {
            match plant {
                Plant::None => {}
                Plant::MarginalOutlier { row, col, z_target } => {
                    if !row_ok(*row) || !col_ok(*col) || !z_target.is_finite() || self.n < 3 {
                        return bad(format!("marginal_outlier({row}, {col}, {z_target}) invalid"));
                    }
                }
                Plant::AuxOutlier { row, col, offset } => {
                    if !row_ok(*row) || !col_ok(*col) || !offset.is_finite() || self.n < self.p + 3 {
                        return bad(format!("aux_outlier({row}, {col}, {offset}) invalid"));
                    }
                }
                Plant::CollinearPair {
                    col_a,
                    col_b,
                    noise_sd,
                } => {
                    if !col_ok(*col_a) || !col_ok(*col_b) || col_a == col_b || !(*noise_sd >= 0.0) {
                        return bad(format!("collinear_pair({col_a}, {col_b}, {noise_sd}) invalid"));
                    }
                }
                Plant::LeverageSweep {
                    row,
                    direction,
                    t_values,
                } => {
                    sweeps += 1;
                    if !row_ok(*row) {
                        return bad(format!("leverage_sweep row {row} out of range"));
                    }
                    if direction.len() != self.p
                        || direction.iter().any(|d| !d.is_finite())
                        || direction.iter().all(|&d| d == 0.0)
                    {
                        return bad("leverage_sweep direction must be a nonzero finite p-vector".into());
                    }
                    if t_values.is_empty() || t_values.iter().any(|t| !t.is_finite()) {
                        return bad("leverage_sweep needs finite t values".into());
                    }
                }
            }
        }
        if sweeps > 1 {
            return bad("at most one leverage_sweep plant".into());
        }
        Ok(())
    }

    fn sweep(&self) -> Option<(usize, &[f64], &[f64])> {
        self.plants.iter().find_map(|p| match p {
            Plant::LeverageSweep {
                row,
                direction,
                t_values,
            } => Some((*row, direction.as_slice(), t_values.as_slice())),
            _ => None,
        })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean_sd_excluding(x: &Matrix<f64>, col: usize, skip: usize) -> (f64, f64) {
    let vals: Vec<f64> = (0..x.nrows()).filter(|&r| r != skip).map(|r| x[(r, col)]).collect();
    let m = vals.iter().sum::<f64>() / vals.len() as f64;
    let v = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
    (m, v.sqrt())
}

fn means_excluding(x: &Matrix<f64>, skip: usize) -> Vec<f64> {
    let k = (x.nrows() - 1) as f64;
    (0..x.ncols())
        .map(|c| (0..x.nrows()).filter(|&r| r != skip).map(|r| x[(r, c)]).sum::<f64>() / k)
        .collect()
}

fn without_row(x: &Matrix<f64>, skip: usize) -> Matrix<f64> {
    let rows: Vec<&[f64]> = (0..x.nrows()).filter(|&r| r != skip).map(|r| x.row(r)).collect();
    Matrix::from_rows(&rows).expect("rectangular")
}

fn set_sweep_row(x: &mut Matrix<f64>, row: usize, base: &[f64], direction: &[f64], t: f64) {
    for (c, v) in x.row_mut(row).iter_mut().enumerate() {
        *v = base[c] + t * direction[c];
    }
}

fn apply_plant(x: &mut Matrix<f64>, plant: &Plant, rng: &mut ChaCha8Rng) -> Result<()> {
    match plant {
        Plant::None => {}
        Plant::MarginalOutlier { row, col, z_target } => {
            let (m, sd) = mean_sd_excluding(x, *col, *row);
            x[(*row, *col)] = m + z_target * sd;
        }
        Plant::AuxOutlier { row, col, offset } => {
            if x.ncols() == 1 {
                let (m, sd) = mean_sd_excluding(x, *col, *row);
                x[(*row, *col)] = m + offset * sd;
            } else {
                let rest = DataMatrix::with_default_names(without_row(x, *row))?;
                let c = center(&rest)?;
                let aux = crate::aux::aux_regression(&c, *col)?;
                let mean = c.mean();
                let fitted = mean[*col]
                    + aux
                        .predictors
                        .iter()
                        .zip(&aux.coefficients)
                        .map(|(&k, &b)| b * (x[(*row, k)] - mean[k]))
                        .sum::<f64>();
                let res_sd = (aux.sse / rest.n() as f64).sqrt();
                x[(*row, *col)] = fitted + offset * res_sd;
            }
        }
        Plant::CollinearPair {
            col_a,
            col_b,
            noise_sd,
        } => {
            for r in 0..x.nrows() {
                let e: f64 = rng.sample(StandardNormal);
                x[(r, *col_b)] = x[(r, *col_a)] + noise_sd * e;
            }
        }
        Plant::LeverageSweep {
            row,
            direction,
            t_values,
        } => {
            let base = means_excluding(x, *row);
            let t = *t_values.last().expect("validated");
            set_sweep_row(x, *row, &base, direction, t);
        }
    }
    Ok(())
}

fn generate_with(spec: &ScenarioSpec, skip_sweep: bool) -> Result<DataMatrix<f64>> {
    spec.validate()?;
    let mut base = rng_for(spec.seed, 0);
    let mut x = Matrix::from_fn(spec.n, spec.p, |_, _| base.sample(StandardNormal));
    for (k, plant) in spec.plants.iter().enumerate() {
        if skip_sweep && matches!(plant, Plant::LeverageSweep { .. }) {
            continue;
        }
        let mut rng = rng_for(spec.seed, k as u64 + 1);
        apply_plant(&mut x, plant, &mut rng)?;
    }
    DataMatrix::with_default_names(x)
}

/// Deterministic dataset for `spec`.
pub fn generate(spec: &ScenarioSpec) -> Result<DataMatrix<f64>> {
    generate_with(spec, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t: f64,
    pub record: LeverageRecord<f64>,
    /// `(1 - r_i²)^(-1/2)` for every regressor at this `t`.
    pub inflation: Vec<f64>,
    pub terms: Vec<DecompositionITerm<f64>>,
}

/// Diagnostics of the swept row along its trajectory. The row sits at the
/// mean of the other rows for `t = 0`; each `t` works on a fresh copy.
pub fn sweep_leverage(spec: &ScenarioSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let (row, direction, t_values) = spec
        .sweep()
        .ok_or_else(|| DiagError::BadSpec("no leverage_sweep plant".into()))?;
    let data = generate_with(spec, true)?;
    let (x, names) = data.into_parts();
    let base = means_excluding(&x, row);
    let threshold = default_threshold(spec.n, spec.p);
    t_values
        .iter()
        .map(|&t| {
            let mut xt = x.clone();
            set_sweep_row(&mut xt, row, &base, direction, t);
            let d = DataMatrix::new(xt, names.clone())?;
            let c = center(&d)?;
            let dec = Decomposer::new(&c)?;
            Ok(SweepPoint {
                t,
                record: dec.leverage(row, threshold)?,
                inflation: dec.factors().inflation().to_vec(),
                terms: dec.decomposition_one(row)?,
            })
        })
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Plant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plant::None => write!(f, "none"),
            Plant::MarginalOutlier { row, col, z_target } => {
                write!(f, "marginal_outlier {row} {col} {z_target:?}")
            }
            Plant::AuxOutlier { row, col, offset } => write!(f, "aux_outlier {row} {col} {offset:?}"),
            Plant::CollinearPair {
                col_a,
                col_b,
                noise_sd,
            } => write!(f, "collinear_pair {col_a} {col_b} {noise_sd:?}"),
            Plant::LeverageSweep {
                row,
                direction,
                t_values,
            } => write!(f, "leverage_sweep {row} {} {}", join(direction), join(t_values)),
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "p = {}", self.p)?;
        for plant in &self.plants {
            writeln!(f, "plant = {plant}")?;
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| DiagError::BadSpec(format!("cannot parse {what} from {s:?}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| parse_num(x.trim(), what)).collect()
}

impl FromStr for Plant {
    type Err = DiagError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let arity = |k: usize| {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(DiagError::BadSpec(format!(
                    "{} takes {k} arguments, got {}",
                    parts[0],
                    parts.len() - 1
                )))
            }
        };
        match parts.first().copied() {
            Some("none") => {
                arity(0)?;
                Ok(Plant::None)
            }
            Some("marginal_outlier") => {
                arity(3)?;
                Ok(Plant::MarginalOutlier {
                    row: parse_num(parts[1], "row")?,
                    col: parse_num(parts[2], "col")?,
                    z_target: parse_num(parts[3], "z_target")?,
                })
            }
            Some("aux_outlier") => {
                arity(3)?;
                Ok(Plant::AuxOutlier {
                    row: parse_num(parts[1], "row")?,
                    col: parse_num(parts[2], "col")?,
                    offset: parse_num(parts[3], "offset")?,
                })
            }
            Some("collinear_pair") => {
                arity(3)?;
                Ok(Plant::CollinearPair {
                    col_a: parse_num(parts[1], "col_a")?,
                    col_b: parse_num(parts[2], "col_b")?,
                    noise_sd: parse_num(parts[3], "noise_sd")?,
                })
            }
            Some("leverage_sweep") => {
                arity(3)?;
                Ok(Plant::LeverageSweep {
                    row: parse_num(parts[1], "row")?,
                    direction: parse_list(parts[2], "direction")?,
                    t_values: parse_list(parts[3], "t_values")?,
                })
            }
            Some(other) => Err(DiagError::BadSpec(format!("unknown plant {other:?}"))),
            None => Err(DiagError::BadSpec("empty plant".into())),
        }
    }
}

impl FromStr for ScenarioSpec {
    type Err = DiagError;

    fn from_str(s: &str) -> Result<Self> {
        let (mut seed, mut n, mut p) = (None, None, None);
        let mut plants = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: DiagError| match e {
                DiagError::BadSpec(m) => DiagError::BadSpec(format!("line {}: {m}", lineno + 1)),
                other => other,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(DiagError::BadSpec(format!("expected key = value, got {line:?}"))))?;
            let value = value.trim();
            match key.trim() {
                "seed" => seed = Some(parse_num(value, "seed").map_err(at)?),
                "n" => n = Some(parse_num(value, "n").map_err(at)?),
                "p" => p = Some(parse_num(value, "p").map_err(at)?),
                "plant" => plants.push(value.parse().map_err(at)?),
                other => return Err(at(DiagError::BadSpec(format!("unknown key {other:?}")))),
            }
        }
        let missing = |k: &str| DiagError::BadSpec(format!("missing key {k:?}"));
        let spec = ScenarioSpec {
            seed: seed.ok_or_else(|| missing("seed"))?,
            n: n.ok_or_else(|| missing("n"))?,
            p: p.ok_or_else(|| missing("p"))?,
            plants,
        };
        spec.validate()?;
        Ok(spec)
    }
}
