//! Characteristic functions over the feature lattice.
//!
//! Each builder turns a population description or a sampled dataset into a
//! [`Game`]: population and empirical R², exact Bayes accuracy, Gaussian
//! log-likelihood gain of the closest submodel, MSE skill of a max predictor,
//! interventional model-loss decomposition, and closed-form linear SHAP
//! magnitudes.

use crate::dgp::{Dataset, DgpVariant, JointTable, PopulationModel};
use crate::error::{Error, Result};
use crate::exec;
use crate::game::Game;
use crate::ols::Moments;

/// A model fitted on all features, used by the interventional loss game.
#[derive(Debug, Clone)]
pub enum FittedModel {
    Linear {
        theta: Vec<f64>,
        intercept: f64,
        feature_means: Vec<f64>,
    },
    ProbTable(ProbTableModel),
}

/// Cellwise empirical probability model for discrete features and a binary
/// response.
#[derive(Debug, Clone)]
pub struct ProbTableModel {
    /// Sorted distinct values per feature.
    pub levels: Vec<Vec<f64>>,
    /// P(Y = 1 | cell); empty cells are smoothed to 1/2 (add-one on zero
    /// counts).
    pub prob_y1: Vec<f64>,
    /// Observation count per cell; zero marks a smoothed cell.
    pub counts: Vec<u64>,
}

impl ProbTableModel {
    pub fn cells(&self) -> usize {
        self.levels.iter().map(|l| l.len()).product()
    }

    fn level_index(&self, feature: usize, value: f64) -> Option<usize> {
        self.levels[feature]
            .binary_search_by(|l| l.total_cmp(&value))
            .ok()
    }

    /// Flat cell index of a data row, if every value is a known level.
    pub fn cell_of_row(&self, row: &[f64]) -> Option<usize> {
        let mut cell = 0usize;
        for (j, lv) in self.levels.iter().enumerate() {
            cell = cell * lv.len() + self.level_index(j, row[j])?;
        }
        Some(cell)
    }
}

/// Loss used when scoring model predictions against a response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSpec {
    SquaredError,
    /// Negative log-likelihood with predictions clipped to `[clip, 1-clip]`.
    CrossEntropy {
        clip: f64,
    },
    ZeroOne,
}

impl LossSpec {
    pub fn cross_entropy_default() -> LossSpec {
        LossSpec::CrossEntropy { clip: 1e-6 }
    }

    fn validate(&self) -> Result<()> {
        if let LossSpec::CrossEntropy { clip } = self {
            if !(*clip > 0.0 && *clip < 0.5) {
                return Err(Error::invalid(format!(
                    "cross-entropy clip must lie in (0, 0.5), got {clip}"
                )));
            }
        }
        Ok(())
    }

    /// Loss of probability prediction `p` against binary outcome `y`.
    fn prob_loss(&self, p: f64, y: f64) -> f64 {
        match self {
            LossSpec::SquaredError => (y - p) * (y - p),
            LossSpec::CrossEntropy { clip } => {
                let p = p.clamp(*clip, 1.0 - *clip);
                if y > 0.5 {
                    -p.ln()
                } else {
                    -(1.0 - p).ln()
                }
            }
            LossSpec::ZeroOne => {
                let label = if p > 0.5 { 1.0 } else { 0.0 };
                if label == y {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Build a game by evaluating a fallible worth function on every coalition
/// mask (in parallel when enabled).
fn build_game<F>(labels: Vec<String>, tag: &str, f: F) -> Result<Game>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    let d = labels.len();
    if d == 0 || d > crate::MAX_PLAYERS {
        return Err(Error::invalid(format!(
            "player count must be in 1..={}, got {d}",
            crate::MAX_PLAYERS
        )));
    }
    let raw: Result<Vec<f64>> = exec::map_indexed(1usize << d, |mask| f(mask as u64))
        .into_iter()
        .collect();
    Game::new(labels, raw?, tag)
}

fn members_of(mask: u64, d: usize) -> Vec<usize> {
    (0..d).filter(|i| (mask >> i) & 1 == 1).collect()
}

/// Population R² game: the fraction of response variance explained by the
/// best linear predictor on each coalition, from an exact covariance.
pub fn r2_game_population(pop: &PopulationModel) -> Result<Game> {
    let PopulationModel::Covariance { names, cov } = pop else {
        return Err(Error::invalid(
            "population R² game needs a covariance population",
        ));
    };
    let moments = Moments::from_covariance(cov)?;
    let d = names.len();
    build_game(names.clone(), "r2_population", |mask| {
        moments.r_squared(&members_of(mask, d))
    })
}

/// Empirical R² game: in-sample R² of ordinary least squares (with
/// intercept) of the response on each coalition's columns.
pub fn r2_game_empirical(data: &Dataset) -> Result<Game> {
    let d = data.d();
    if data.n() <= d + 1 {
        return Err(Error::invalid(format!(
            "need more than d+1 = {} rows, got {}",
            d + 1,
            data.n()
        )));
    }
    let cols: Vec<&[f64]> = data.columns.iter().map(|c| c.as_slice()).collect();
    let moments = Moments::from_columns(&cols, &data.y)?;
    build_game(data.names.clone(), "r2_empirical", |mask| {
        moments.r_squared(&members_of(mask, d))
    })
}

/// Exact Bayes-accuracy game over a discrete joint table: for each
/// coalition, the expected maximum of the two class posteriors given the
/// coalition's features. The empty-coalition accuracy (majority class)
/// becomes the normalization offset.
pub fn bayes_accuracy_game(table: &JointTable) -> Result<Game> {
    let d = table.names.len();
    if d == 0 || d > crate::MAX_PLAYERS {
        return Err(Error::invalid("joint table has no features"));
    }
    let radix: Vec<usize> = table.levels.iter().map(|l| l.len()).collect();
    let cells = table.feature_cells();
    build_game(table.names.clone(), "bayes_accuracy", |mask| {
        // Project every full cell onto the coalition's features and
        // accumulate class mass per projected cell.
        let proj_size: usize = (0..d)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| radix[i])
            .product();
        let mut acc = vec![[0.0f64; 2]; proj_size.max(1)];
        for cell in 0..cells {
            let idx = table.decode(cell);
            let mut key = 0usize;
            for i in 0..d {
                if (mask >> i) & 1 == 1 {
                    key = key * radix[i] + idx[i];
                }
            }
            acc[key][0] += table.prob(cell, 0);
            acc[key][1] += table.prob(cell, 1);
        }
        Ok(acc.iter().map(|[p0, p1]| p0.max(*p1)).sum())
    })
}

/// Terms of the interaction response, as (column products, variable masks).
fn secret_terms(data: &Dataset) -> Result<(Vec<Vec<f64>>, Vec<u64>)> {
    if data.d() != 3 {
        return Err(Error::invalid(format!(
            "interaction log-likelihood game expects 3 features, got {}",
            data.d()
        )));
    }
    let n = data.n();
    let x1 = &data.columns[0];
    let x2 = &data.columns[1];
    let x3 = &data.columns[2];
    let x1x2: Vec<f64> = (0..n).map(|i| x1[i] * x2[i]).collect();
    let x1x3: Vec<f64> = (0..n).map(|i| x1[i] * x3[i]).collect();
    // Variable masks: X2, X3, X1·X2, X1·X3 (players are bits 0..2).
    let masks = vec![0b010, 0b100, 0b011, 0b101];
    Ok((vec![x2.clone(), x3.clone(), x1x2, x1x3], masks))
}

/// Log-likelihood gain game for the interaction process: each coalition is
/// scored by the closest submodel of the true response surface — the terms
/// whose variables all lie in the coalition — fitted by least squares.
/// Worth is the gain in maximized per-sample Gaussian log-likelihood over
/// the intercept-only fit, `½·ln(RSS_∅ / RSS_S)`.
pub fn loglik_game(data: &Dataset, truth: &DgpVariant) -> Result<Game> {
    if !matches!(truth, DgpVariant::SecretInteraction { .. }) {
        return Err(Error::invalid(
            "log-likelihood game is defined for the interaction process",
        ));
    }
    let (terms, term_masks) = secret_terms(data)?;
    let term_refs: Vec<&[f64]> = terms.iter().map(|t| t.as_slice()).collect();
    let moments = Moments::from_columns(&term_refs, &data.y)?;
    if moments.var_y <= 0.0 {
        return Err(Error::numeric("response variance is zero"));
    }
    build_game(data.names.clone(), "loglik", |mask| {
        let active: Vec<usize> = term_masks
            .iter()
            .enumerate()
            .filter(|(_, &tm)| tm & mask == tm)
            .map(|(t, _)| t)
            .collect();
        let explained = moments.explained_variance(&active)?;
        let rss = moments.var_y - explained;
        if rss <= 0.0 {
            return Err(Error::numeric(format!(
                "non-positive residual variance for coalition mask {mask:#b}"
            )));
        }
        Ok(0.5 * (moments.var_y / rss).ln())
    })
}

/// MSE-skill game for the shifted-max process: each non-empty coalition is
/// scored by `MSE(y, 0) − MSE(y, max over its columns)`; the empty coalition
/// keeps the zero predictor.
pub fn mse_skill_game(data: &Dataset) -> Result<Game> {
    let d = data.d();
    let n = data.n();
    if n == 0 {
        return Err(Error::invalid("empty dataset"));
    }
    let mse_zero = data.y.iter().map(|v| v * v).sum::<f64>() / n as f64;
    build_game(data.names.clone(), "mse_skill", |mask| {
        if mask == 0 {
            return Ok(0.0);
        }
        let cols: Vec<&[f64]> = (0..d)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| data.columns[i].as_slice())
            .collect();
        let mut mse = 0.0;
        for r in 0..n {
            let pred = cols.iter().map(|c| c[r]).fold(f64::NEG_INFINITY, f64::max);
            let e = data.y[r] - pred;
            mse += e * e;
        }
        Ok(mse_zero - mse / n as f64)
    })
}

/// Ordinary least squares of the response on all features, with intercept.
pub fn fit_linear(data: &Dataset) -> Result<FittedModel> {
    let d = data.d();
    if data.n() <= d + 1 {
        return Err(Error::invalid(format!(
            "need more than d+1 = {} rows, got {}",
            d + 1,
            data.n()
        )));
    }
    let cols: Vec<&[f64]> = data.columns.iter().map(|c| c.as_slice()).collect();
    let moments = Moments::from_columns(&cols, &data.y)?;
    if crate::ols::spd_rank(&moments.cov, 1e-10) < d {
        return Err(Error::numeric(
            "design is rank deficient; drop redundant columns",
        ));
    }
    let beta = moments.solve_subset(&(0..d).collect::<Vec<_>>())?;
    let theta: Vec<f64> = beta.iter().copied().collect();
    let intercept = moments.y_mean
        - theta
            .iter()
            .zip(&moments.means)
            .map(|(t, m)| t * m)
            .sum::<f64>();
    Ok(FittedModel::Linear {
        theta,
        intercept,
        feature_means: moments.means.clone(),
    })
}

const MAX_LEVELS: usize = 32;

/// Cellwise empirical `P(Y=1 | x)` over all feature-value combinations.
pub fn fit_prob_table(data: &Dataset) -> Result<FittedModel> {
    let d = data.d();
    if d == 0 {
        return Err(Error::invalid("dataset has no features"));
    }
    if data.y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::invalid("response must be binary 0/1"));
    }
    let mut levels = Vec::with_capacity(d);
    for (j, col) in data.columns.iter().enumerate() {
        let mut vals: Vec<f64> = col.clone();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals.dedup();
        if vals.len() > MAX_LEVELS {
            return Err(Error::invalid(format!(
                "feature {} has {} distinct values; not discrete",
                data.names[j],
                vals.len()
            )));
        }
        levels.push(vals);
    }
    let mut model = ProbTableModel {
        levels,
        prob_y1: Vec::new(),
        counts: Vec::new(),
    };
    let cells = model.cells();
    let mut counts = vec![0u64; cells];
    let mut ones = vec![0u64; cells];
    let mut row = vec![0.0f64; d];
    for r in 0..data.n() {
        for (j, col) in data.columns.iter().enumerate() {
            row[j] = col[r];
        }
        let cell = model.cell_of_row(&row).expect("levels built from data");
        counts[cell] += 1;
        if data.y[r] == 1.0 {
            ones[cell] += 1;
        }
    }
    model.prob_y1 = counts
        .iter()
        .zip(&ones)
        .map(|(&c, &o)| if c == 0 { 0.5 } else { o as f64 / c as f64 })
        .collect();
    model.counts = counts;
    Ok(FittedModel::ProbTable(model))
}

/// Interventional model-loss game: the worth of a coalition is the drop in
/// mean loss when the model sees the coalition's features, with all other
/// features removed by marginal imputation. Linear models impute by setting
/// out-of-coalition features to their means (closed form); probability
/// tables average predictions over the empirical joint marginal of the
/// removed features.
pub fn interventional_loss_game(
    model: &FittedModel,
    data: &Dataset,
    loss: LossSpec,
) -> Result<Game> {
    loss.validate()?;
    match model {
        FittedModel::Linear {
            theta,
            intercept,
            feature_means,
        } => {
            if !matches!(loss, LossSpec::SquaredError) {
                return Err(Error::invalid(
                    "linear interventional game supports squared error only",
                ));
            }
            if theta.len() != data.d() {
                return Err(Error::invalid("model/data dimension mismatch"));
            }
            linear_interventional(theta, *intercept, feature_means, data)
        }
        FittedModel::ProbTable(table) => {
            if table.levels.len() != data.d() {
                return Err(Error::invalid("model/data dimension mismatch"));
            }
            table_interventional(table, data, loss)
        }
    }
}

fn linear_interventional(
    theta: &[f64],
    intercept: f64,
    feature_means: &[f64],
    data: &Dataset,
) -> Result<Game> {
    let d = data.d();
    let n = data.n();
    let mean_loss = |mask: u64| {
        let base = intercept
            + (0..d)
                .filter(|i| (mask >> i) & 1 == 0)
                .map(|i| theta[i] * feature_means[i])
                .sum::<f64>();
        let active: Vec<usize> = members_of(mask, d);
        let mut acc = 0.0;
        for r in 0..n {
            let mut pred = base;
            for &i in &active {
                pred += theta[i] * data.columns[i][r];
            }
            let e = data.y[r] - pred;
            acc += e * e;
        }
        acc / n as f64
    };
    let loss_empty = mean_loss(0);
    build_game(data.names.clone(), "interventional_linear", move |mask| {
        Ok(loss_empty - mean_loss(mask))
    })
}

fn table_interventional(model: &ProbTableModel, data: &Dataset, loss: LossSpec) -> Result<Game> {
    let d = data.d();
    let n = data.n();
    let radix: Vec<usize> = model.levels.iter().map(|l| l.len()).collect();
    let cells = model.cells();

    // Contingency of the evaluation data over the model's cells.
    let mut cell_count = vec![0u64; cells];
    let mut cell_ones = vec![0u64; cells];
    let mut row = vec![0.0f64; d];
    for r in 0..n {
        for (j, col) in data.columns.iter().enumerate() {
            row[j] = col[r];
        }
        let Some(cell) = model.cell_of_row(&row) else {
            return Err(Error::invalid(format!(
                "row {r} has a feature value outside the model's levels"
            )));
        };
        cell_count[cell] += 1;
        if data.y[r] == 1.0 {
            cell_ones[cell] += 1;
        }
    }

    let project = |cell: usize, mask: u64| {
        // Split a flat cell index into (coalition part, removed part).
        let mut digits = vec![0usize; d];
        let mut c = cell;
        for j in (0..d).rev() {
            digits[j] = c % radix[j];
            c /= radix[j];
        }
        let mut key_in = 0usize;
        let mut key_out = 0usize;
        for j in 0..d {
            if (mask >> j) & 1 == 1 {
                key_in = key_in * radix[j] + digits[j];
            } else {
                key_out = key_out * radix[j] + digits[j];
            }
        }
        (key_in, key_out)
    };

    let mean_loss = |mask: u64| {
        let in_size: usize = (0..d)
            .filter(|j| (mask >> j) & 1 == 1)
            .map(|j| radix[j])
            .product();
        let out_size: usize = (0..d)
            .filter(|j| (mask >> j) & 1 == 0)
            .map(|j| radix[j])
            .product();
        // Empirical marginal of the removed features.
        let mut out_weight = vec![0.0f64; out_size.max(1)];
        for cell in 0..cells {
            let (_, key_out) = project(cell, mask);
            out_weight[key_out] += cell_count[cell] as f64 / n as f64;
        }
        // Imputed prediction per coalition cell: average the model over the
        // removed features' marginal.
        let mut pred = vec![0.0f64; in_size.max(1)];
        for cell in 0..cells {
            let (key_in, key_out) = project(cell, mask);
            pred[key_in] += out_weight[key_out] * model.prob_y1[cell];
        }
        // Mean loss over the evaluation rows, aggregated by cell.
        let mut acc = 0.0;
        for cell in 0..cells {
            if cell_count[cell] == 0 {
                continue;
            }
            let (key_in, _) = project(cell, mask);
            let p = pred[key_in];
            let ones = cell_ones[cell] as f64;
            let zeros = (cell_count[cell] - cell_ones[cell]) as f64;
            acc += ones * loss.prob_loss(p, 1.0) + zeros * loss.prob_loss(p, 0.0);
        }
        acc / n as f64
    };

    let loss_empty = mean_loss(0);
    build_game(data.names.clone(), "interventional_table", move |mask| {
        Ok(loss_empty - mean_loss(mask))
    })
}

/// Mean absolute linear SHAP magnitude per feature: for a linear model the
/// local attribution of feature `i` on a row is exactly
/// `θ_i (x_i − mean_i)`, so the global score is the mean absolute deviation
/// scaled by the coefficient.
pub fn mean_abs_linear_shap(model: &FittedModel, data: &Dataset) -> Result<Vec<f64>> {
    let FittedModel::Linear {
        theta,
        feature_means,
        ..
    } = model
    else {
        return Err(Error::invalid(
            "mean absolute SHAP magnitudes need a linear model",
        ));
    };
    if theta.len() != data.d() {
        return Err(Error::invalid("model/data dimension mismatch"));
    }
    let n = data.n() as f64;
    Ok((0..data.d())
        .map(|i| {
            data.columns[i]
                .iter()
                .map(|x| (theta[i] * (x - feature_means[i])).abs())
                .sum::<f64>()
                / n
        })
        .collect())
}
