//! Seeded samplers and exact population descriptions for the four built-in
//! data-generating processes.
//!
//! Each sampler draws every feature column (and each noise term) from its own
//! derived random stream, so datasets are bit-reproducible for a given seed.
//! Where the process has a tractable closed form, a [`PopulationModel`]
//! carries the exact covariance or joint probability table alongside the
//! finite samples.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Which process generated a dataset, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DgpVariant {
    /// `Y = X1+X2+X3+ε`, `Z = X1+X2+X3+γ`; the proxy `Z` is redundant given
    /// the three direct parents.
    GaussMarkov,
    /// Discrete chain `X1 → (X2, X3) → Y` with link strength `ell`.
    DiscreteMarkov { ell: f64 },
    /// `Y = t1(X2+X3) + t2(X1X2 + X1X3) + ε`; `X1` only acts through
    /// interactions.
    SecretInteraction { t1: f64, t2: f64 },
    /// `Y = max_i X_i + ε` with `X_i ~ N(a_i, 1)` for strictly increasing
    /// location shifts.
    TaxicabMax { a: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgpSpec {
    pub variant: DgpVariant,
    pub n: usize,
    pub seed: u64,
}

/// A sampled feature matrix with response, stored column-major.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub spec: DgpSpec,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// CSV export: header = feature names + "y", floats at 17 significant
    /// digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},y", self.names.join(","))?;
        for row in 0..self.n() {
            for col in &self.columns {
                write!(w, "{},", crate::fmt_f64(col[row]))?;
            }
            writeln!(w, "{}", crate::fmt_f64(self.y[row]))?;
        }
        Ok(())
    }
}

/// Exact description of a process: either a Gaussian covariance over
/// (features, Y) with zero means, or a full joint probability table over
/// discrete (features, Y).
#[derive(Debug, Clone)]
pub enum PopulationModel {
    Covariance {
        /// Feature names; the response is the final row/column of `cov`.
        names: Vec<String>,
        /// `(d+1) × (d+1)` covariance, row-major, response last.
        cov: Vec<Vec<f64>>,
    },
    JointTable(JointTable),
}

/// Dense joint probability table over discrete features and a binary
/// response. Cell order: row-major over feature level indices, response
/// fastest.
#[derive(Debug, Clone)]
pub struct JointTable {
    pub names: Vec<String>,
    /// Numeric value of each level, per feature.
    pub levels: Vec<Vec<f64>>,
    /// `probs[cell * 2 + y]` with `cell` the mixed-radix feature index.
    pub probs: Vec<f64>,
}

impl JointTable {
    pub fn feature_cells(&self) -> usize {
        self.levels.iter().map(|l| l.len()).product()
    }

    /// Decode a flat cell index into per-feature level indices.
    pub fn decode(&self, mut cell: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.levels.len()];
        for (i, l) in self.levels.iter().enumerate().rev() {
            idx[i] = cell % l.len();
            cell /= l.len();
        }
        idx
    }

    pub fn encode(&self, idx: &[usize]) -> usize {
        let mut cell = 0usize;
        for (i, l) in self.levels.iter().enumerate() {
            cell = cell * l.len() + idx[i];
        }
        cell
    }

    /// P(feature cell, Y = y).
    pub fn prob(&self, cell: usize, y: usize) -> f64 {
        self.probs[cell * 2 + y]
    }
}

fn normal_column(n: usize, seed: u64, stream: u64, mean: f64, sd: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, &[stream]);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            mean + sd * z
        })
        .collect()
}

/// Sample the Gaussian proxy process: three direct parents plus a noisy copy
/// `Z` of their sum. Columns are `X1, X2, X3, Z`.
pub fn sample_gauss_markov(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let x1 = normal_column(n, seed, 0, 0.0, 2.0);
    let x2 = normal_column(n, seed, 1, 0.0, 2.0);
    let x3 = normal_column(n, seed, 2, 0.0, 2.0);
    let eps = normal_column(n, seed, 3, 0.0, 2.0);
    let gamma = normal_column(n, seed, 4, 0.0, 2.0);
    let mut z = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let s = x1[i] + x2[i] + x3[i];
        y.push(s + eps[i]);
        z.push(s + gamma[i]);
    }
    Ok(Dataset {
        names: vec!["X1".into(), "X2".into(), "X3".into(), "Z".into()],
        columns: vec![x1, x2, x3, z],
        y,
        spec: DgpSpec {
            variant: DgpVariant::GaussMarkov,
            n,
            seed,
        },
    })
}

/// Exact covariance of the Gaussian proxy process over `(X1, X2, X3, Z, Y)`.
pub fn population_gauss_markov() -> PopulationModel {
    // Var Xi = 4; Y and Z share X1+X2+X3 (variance 12) plus independent
    // noise of variance 4.
    let cov = vec![
        vec![4.0, 0.0, 0.0, 4.0, 4.0],
        vec![0.0, 4.0, 0.0, 4.0, 4.0],
        vec![0.0, 0.0, 4.0, 4.0, 4.0],
        vec![4.0, 4.0, 4.0, 16.0, 12.0],
        vec![4.0, 4.0, 4.0, 12.0, 16.0],
    ];
    PopulationModel::Covariance {
        names: vec!["X1".into(), "X2".into(), "X3".into(), "Z".into()],
        cov,
    }
}

fn check_ell(ell: f64) -> Result<()> {
    if !(ell > 0.0 && ell < 1.0) {
        return Err(Error::invalid(format!(
            "link strength must lie strictly inside (0, 1), got {ell}"
        )));
    }
    Ok(())
}

/// P(X2 = 1 | X1 = x1) for the discrete chain; `X3` uses the mirrored table.
fn p_x2_given_x1(ell: f64, x1: usize) -> f64 {
    // x1 indexed 0..4 for values 1..4.
    match x1 {
        0 | 1 => ell,
        _ => 1.0 - ell,
    }
}

fn p_x3_given_x1(ell: f64, x1: usize) -> f64 {
    match x1 {
        0 | 2 => ell,
        _ => 1.0 - ell,
    }
}

/// P(Y = 1 | X2, X3).
fn p_y_given_x23(x2: usize, x3: usize) -> f64 {
    match (x2, x3) {
        (0, 0) => 0.9,
        (0, 1) => 0.05,
        (1, 0) => 0.15,
        (1, 1) => 0.9,
        _ => unreachable!(),
    }
}

/// Exact 32-entry joint table of the discrete chain: X1 uniform on {1..4},
/// X2 ⊥ X3 given X1, response depending on (X2, X3) only.
pub fn joint_discrete_markov(ell: f64) -> Result<JointTable> {
    check_ell(ell)?;
    let levels = vec![vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 1.0], vec![0.0, 1.0]];
    let mut probs = Vec::with_capacity(32);
    for x1 in 0..4 {
        for x2 in 0..2 {
            for x3 in 0..2 {
                let p2 = if x2 == 1 {
                    p_x2_given_x1(ell, x1)
                } else {
                    1.0 - p_x2_given_x1(ell, x1)
                };
                let p3 = if x3 == 1 {
                    p_x3_given_x1(ell, x1)
                } else {
                    1.0 - p_x3_given_x1(ell, x1)
                };
                let p_cell = 0.25 * p2 * p3;
                let py1 = p_y_given_x23(x2, x3);
                probs.push(p_cell * (1.0 - py1));
                probs.push(p_cell * py1);
            }
        }
    }
    Ok(JointTable {
        names: vec!["X1".into(), "X2".into(), "X3".into()],
        levels,
        probs,
    })
}

/// I.i.d. draws from the exact joint table, one uniform per row.
pub fn sample_discrete_markov(ell: f64, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let table = joint_discrete_markov(ell)?;
    let mut cumulative = Vec::with_capacity(table.probs.len());
    let mut acc = 0.0;
    for &p in &table.probs {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = stream_rng(seed, &[0]);
    let d = table.names.len();
    let mut columns = vec![Vec::with_capacity(n); d];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let flat = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(cumulative.len() - 1);
        let (cell, yv) = (flat / 2, flat % 2);
        let idx = table.decode(cell);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(table.levels[j][idx[j]]);
        }
        y.push(yv as f64);
    }
    Ok(Dataset {
        names: table.names.clone(),
        columns,
        y,
        spec: DgpSpec {
            variant: DgpVariant::DiscreteMarkov { ell },
            n,
            seed,
        },
    })
}

/// Sample the interaction process: `Y = t1(X2+X3) + t2(X1X2 + X1X3) + ε`
/// with independent standard normal features and unit noise.
pub fn sample_secret(t1: f64, t2: f64, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if !(t1.is_finite() && t2.is_finite()) {
        return Err(Error::invalid("parameters must be finite"));
    }
    let x1 = normal_column(n, seed, 0, 0.0, 1.0);
    let x2 = normal_column(n, seed, 1, 0.0, 1.0);
    let x3 = normal_column(n, seed, 2, 0.0, 1.0);
    let eps = normal_column(n, seed, 3, 0.0, 1.0);
    let y = (0..n)
        .map(|i| t1 * (x2[i] + x3[i]) + t2 * (x1[i] * x2[i] + x1[i] * x3[i]) + eps[i])
        .collect();
    Ok(Dataset {
        names: vec!["X1".into(), "X2".into(), "X3".into()],
        columns: vec![x1, x2, x3],
        y,
        spec: DgpSpec {
            variant: DgpVariant::SecretInteraction { t1, t2 },
            n,
            seed,
        },
    })
}

/// Sample the shifted-max process: `X_i ~ N(a_i, 1)` with strictly
/// increasing `a`, `Y = max_i X_i + ε`.
pub fn sample_taxicab_max(a: &[f64], n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let d = a.len();
    if d == 0 || d > crate::MAX_PLAYERS {
        return Err(Error::invalid(format!(
            "location vector must have 1..={} entries, got {d}",
            crate::MAX_PLAYERS
        )));
    }
    if a.iter().any(|v| !v.is_finite()) || a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "location shifts must be finite and strictly increasing",
        ));
    }
    let columns: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(j, &aj)| normal_column(n, seed, j as u64, aj, 1.0))
        .collect();
    let eps = normal_column(n, seed, d as u64, 0.0, 1.0);
    let y = (0..n)
        .map(|i| {
            let row_max = columns
                .iter()
                .map(|c| c[i])
                .fold(f64::NEG_INFINITY, f64::max);
            row_max + eps[i]
        })
        .collect();
    Ok(Dataset {
        names: (1..=d).map(|j| format!("X{j}")).collect(),
        columns,
        y,
        spec: DgpSpec {
            variant: DgpVariant::TaxicabMax { a: a.to_vec() },
            n,
            seed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn var(v: &[f64]) -> f64 {
        let m = mean(v);
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
    }

    fn cov(a: &[f64], b: &[f64]) -> f64 {
        let (ma, mb) = (mean(a), mean(b));
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / a.len() as f64
    }

    #[test]
    fn gauss_markov_moments() {
        let data = sample_gauss_markov(1_000_000, 42).unwrap();
        assert_abs_diff_eq!(var(&data.y), 16.0, epsilon = 0.2);
        let z = data.column("Z").unwrap();
        let corr = cov(&data.y, z) / (var(&data.y) * var(z)).sqrt();
        assert_abs_diff_eq!(corr, 0.75, epsilon = 0.01);
    }

    #[test]
    fn gauss_markov_matches_population_moments() {
        // Every first and second moment within 5 standard errors at n = 10^6.
        let n = 1_000_000;
        let data = sample_gauss_markov(n, 42).unwrap();
        let PopulationModel::Covariance { cov: pop, .. } = population_gauss_markov() else {
            panic!("expected covariance population");
        };
        let cols: Vec<&[f64]> = data
            .columns
            .iter()
            .map(|c| c.as_slice())
            .chain(std::iter::once(data.y.as_slice()))
            .collect();
        let se = |v: f64| 5.0 * v / (n as f64).sqrt();
        for (i, a) in cols.iter().enumerate() {
            let sd_i = pop[i][i].sqrt();
            assert!(mean(a).abs() <= se(sd_i), "mean of column {i}");
            for (j, b) in cols.iter().enumerate().skip(i) {
                // Var of a sample covariance of joint Gaussians:
                // (σ_ii σ_jj + σ_ij²) / n.
                let sd_cov = (pop[i][i] * pop[j][j] + pop[i][j] * pop[i][j]).sqrt();
                assert!(
                    (cov(a, b) - pop[i][j]).abs() <= se(sd_cov),
                    "cov({i},{j}): {} vs {}",
                    cov(a, b),
                    pop[i][j]
                );
            }
        }
    }

    #[test]
    fn gauss_markov_is_deterministic() {
        let a = sample_gauss_markov(1000, 7).unwrap();
        let b = sample_gauss_markov(1000, 7).unwrap();
        assert_eq!(a.columns, b.columns);
        assert_eq!(a.y, b.y);
        let c = sample_gauss_markov(1000, 8).unwrap();
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn gauss_markov_population_entries() {
        let PopulationModel::Covariance { cov, .. } = population_gauss_markov() else {
            panic!("expected covariance population");
        };
        assert_eq!(cov[4][3], 12.0); // Cov(Y, Z)
        assert_eq!(cov[0][1], 0.0); // Cov(X1, X2)
        assert_eq!(cov[4][4], 16.0); // Var Y
                                     // Symmetry.
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(cov[i][j], cov[j][i]);
            }
        }
    }

    #[test]
    fn joint_table_is_a_distribution() {
        for ell in [0.05, 0.3, 0.5, 0.77, 0.95] {
            let t = joint_discrete_markov(ell).unwrap();
            let total: f64 = t.probs.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(t.probs.iter().all(|&p| p >= 0.0));

            // P(X2=1, X3=1) = 1/4 and P(Y=1) = 1/2 for every link strength.
            let mut p23 = 0.0;
            let mut py1 = 0.0;
            let mut p2 = 0.0;
            for cell in 0..t.feature_cells() {
                let idx = t.decode(cell);
                let p_cell = t.prob(cell, 0) + t.prob(cell, 1);
                if idx[1] == 1 && idx[2] == 1 {
                    p23 += p_cell;
                }
                if idx[1] == 1 {
                    p2 += p_cell;
                }
                py1 += t.prob(cell, 1);
            }
            assert_abs_diff_eq!(p23, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(py1, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(p2, 0.5, epsilon = 1e-12);
        }
        assert!(joint_discrete_markov(0.0).is_err());
        assert!(joint_discrete_markov(1.0).is_err());
    }

    #[test]
    fn discrete_sampler_matches_conditionals() {
        let data = sample_discrete_markov(0.05, 1_000_000, 42).unwrap();
        let x1 = data.column("X1").unwrap();
        let x2 = data.column("X2").unwrap();
        // P(X2=1 | X1=3) = 1 - ell = 0.95.
        let (mut hits, mut total) = (0u64, 0u64);
        for i in 0..data.n() {
            if x1[i] == 3.0 {
                total += 1;
                if x2[i] == 1.0 {
                    hits += 1;
                }
            }
        }
        assert_abs_diff_eq!(hits as f64 / total as f64, 0.95, epsilon = 0.002);
        assert_abs_diff_eq!(mean(&data.y), 0.5, epsilon = 0.002);

        let again = sample_discrete_markov(0.05, 1000, 9).unwrap();
        let again2 = sample_discrete_markov(0.05, 1000, 9).unwrap();
        assert_eq!(again.columns, again2.columns);
    }

    #[test]
    fn secret_variance_scales_with_parameters() {
        let noise_only = sample_secret(0.0, 0.0, 100_000, 42).unwrap();
        assert_abs_diff_eq!(var(&noise_only.y), 1.0, epsilon = 0.03);

        let data = sample_secret(2.0, 2.2, 1_000_000, 42).unwrap();
        // 2 t1² + 2 t2² + 1
        assert_abs_diff_eq!(var(&data.y), 18.68, epsilon = 0.2);
        // X1 alone carries no signal.
        let x1 = data.column("X1").unwrap();
        let m = x1.iter().zip(&data.y).map(|(a, b)| a * b).sum::<f64>() / data.n() as f64;
        let sigma = var(&data.y).sqrt();
        assert!(m.abs() <= 3.0 * sigma / (data.n() as f64).sqrt() * 3.0);
    }

    #[test]
    fn taxicab_max_is_dominated_by_last_feature() {
        let data = sample_taxicab_max(&[5.0, 10.0, 20.0], 100_000, 42).unwrap();
        let x3 = data.column("X3").unwrap();
        let dominated = (0..data.n())
            .filter(|&i| data.columns[0][i] < x3[i] && data.columns[1][i] < x3[i])
            .count();
        assert!(dominated as f64 / data.n() as f64 >= 1.0 - 1e-6);
        assert_abs_diff_eq!(mean(&data.y), 20.0, epsilon = 0.02);

        assert!(sample_taxicab_max(&[5.0, 5.0], 10, 0).is_err());
        assert!(sample_taxicab_max(&[10.0, 5.0], 10, 0).is_err());
        assert!(sample_taxicab_max(&[], 10, 0).is_err());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let data = sample_secret(1.0, 0.5, 3, 1).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "X1,X2,X3,y");
        assert_eq!(lines.count(), 3);
        // Round-trip at 17 significant digits.
        let first_value: f64 = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(first_value.to_bits(), data.columns[0][0].to_bits());
    }
}
