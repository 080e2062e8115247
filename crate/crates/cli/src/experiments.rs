//! The four built-in simulation experiments and their sweeps.
//!
//! Each driver samples (or closes in exact form) a known process, builds one
//! or more characteristic functions over its features, computes exact Shapley
//! values and evaluates the selection detectors. Sweep cells derive their
//! seeds from the base seed and the cell's grid indices, so results do not
//! depend on worker count or completion order.

use shapaudit_core::dgp::{self, DgpVariant};
use shapaudit_core::exec;
use shapaudit_core::game::Game;
use shapaudit_core::pathology::{
    detect_taxicab, markov_rank_violation, selection_regret, undervalued_keystone,
};
use shapaudit_core::rng::mix_seed;
use shapaudit_core::shapley::{exact_shapley, rank_descending};
use shapaudit_core::value_fn::{
    bayes_accuracy_game, fit_linear, fit_prob_table, interventional_loss_game, loglik_game,
    mean_abs_linear_shap, mse_skill_game, r2_game_empirical, r2_game_population, LossSpec,
};
use shapaudit_core::{Error, Result};

use crate::grid::SweepConfig;
use crate::report::{Cell, Table};

/// Default per-cell sample counts.
pub const DEFAULT_N_MARKOV: usize = 1_000_000;
pub const DEFAULT_N_SECRET: usize = 1000;
pub const DEFAULT_N_TAXICAB: usize = 100_000;

fn phi3(phi: &[f64]) -> [f64; 3] {
    [phi[0], phi[1], phi[2]]
}

fn values8(game: &Game) -> [f64; 8] {
    let mut v = [0.0; 8];
    v.copy_from_slice(game.values());
    v
}

// ---------------------------------------------------------------------------
// Gaussian proxy experiment
// ---------------------------------------------------------------------------

/// One formulation's result on the Gaussian proxy process. Feature order is
/// `X1, X2, X3, Z`; the Markov boundary is `{X1, X2, X3}`.
#[derive(Debug, Clone)]
pub struct Markov1Row {
    pub formulation: String,
    /// Samples consumed; 0 for the closed-form population game.
    pub n: usize,
    pub seed: u64,
    pub phi: [f64; 4],
    /// Labels of the top-3 selection, best first.
    pub top3: Vec<String>,
    pub rank_violation: bool,
}

const MARKOV1_NAMES: [&str; 4] = ["X1", "X2", "X3", "Z"];
const MARKOV1_BOUNDARY: [usize; 3] = [0, 1, 2];

fn markov1_row(formulation: &str, n: usize, seed: u64, phi: [f64; 4]) -> Result<Markov1Row> {
    let ranked = rank_descending(&phi);
    let top3 = ranked[..3]
        .iter()
        .map(|&i| MARKOV1_NAMES[i].to_string())
        .collect();
    Ok(Markov1Row {
        formulation: formulation.to_string(),
        n,
        seed,
        phi,
        top3,
        rank_violation: markov_rank_violation(&phi, &MARKOV1_BOUNDARY)?,
    })
}

/// Run the Gaussian proxy experiment: population R², empirical R²,
/// interventional linear loss, and mean absolute linear SHAP.
pub fn run_markov1(n: usize, seed: u64) -> Result<Vec<Markov1Row>> {
    if n < 10_000 {
        return Err(Error::invalid(format!(
            "need at least 10000 samples for stable estimates, got {n}"
        )));
    }
    let mut rows = Vec::with_capacity(4);

    let pop_game = r2_game_population(&dgp::population_gauss_markov())?;
    let phi = exact_shapley(&pop_game)?.phi;
    rows.push(markov1_row(
        "r2_population",
        0,
        seed,
        [phi[0], phi[1], phi[2], phi[3]],
    )?);

    let data = dgp::sample_gauss_markov(n, seed)?;
    let emp_game = r2_game_empirical(&data)?;
    let phi = exact_shapley(&emp_game)?.phi;
    rows.push(markov1_row(
        "r2_empirical",
        n,
        seed,
        [phi[0], phi[1], phi[2], phi[3]],
    )?);

    let model = fit_linear(&data)?;
    let int_game = interventional_loss_game(&model, &data, LossSpec::SquaredError)?;
    let phi = exact_shapley(&int_game)?.phi;
    rows.push(markov1_row(
        "interventional_linear",
        n,
        seed,
        [phi[0], phi[1], phi[2], phi[3]],
    )?);

    let shap = mean_abs_linear_shap(&model, &data)?;
    rows.push(markov1_row(
        "mean_abs_linear_shap",
        n,
        seed,
        [shap[0], shap[1], shap[2], shap[3]],
    )?);

    Ok(rows)
}

pub fn markov1_table(rows: &[Markov1Row]) -> Table {
    let mut t = Table::new(vec![
        "experiment",
        "formulation",
        "n",
        "seed",
        "phi_X1",
        "phi_X2",
        "phi_X3",
        "phi_Z",
        "top3",
        "rank_violation",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Text("markov1".into()),
            Cell::Text(r.formulation.clone()),
            Cell::UInt(r.n as u64),
            Cell::UInt(r.seed),
            Cell::Float(r.phi[0]),
            Cell::Float(r.phi[1]),
            Cell::Float(r.phi[2]),
            Cell::Float(r.phi[3]),
            Cell::Text(r.top3.join("|")),
            Cell::Flag(r.rank_violation),
        ]);
    }
    t
}

// ---------------------------------------------------------------------------
// Discrete chain experiment
// ---------------------------------------------------------------------------

/// One formulation's result on the discrete chain. Feature order `X1, X2,
/// X3`; the Markov boundary is `{X2, X3}`.
#[derive(Debug, Clone)]
pub struct Markov2Row {
    pub formulation: String,
    pub ell: f64,
    pub n: usize,
    pub seed: u64,
    pub phi: [f64; 3],
    /// Normalized worths, indexed by coalition bitmask.
    pub values: [f64; 8],
    pub phi1_minus_phi2: f64,
    pub phi1_minus_phi3: f64,
    /// The off-boundary feature outranks a boundary member.
    pub pathology: bool,
    pub rank_violation: bool,
}

const MARKOV2_BOUNDARY: [usize; 2] = [1, 2];

fn markov2_row(
    formulation: &str,
    ell: f64,
    n: usize,
    seed: u64,
    game: &Game,
) -> Result<Markov2Row> {
    let phi = exact_shapley(game)?.phi;
    Ok(Markov2Row {
        formulation: formulation.to_string(),
        ell,
        n,
        seed,
        phi: phi3(&phi),
        values: values8(game),
        phi1_minus_phi2: phi[0] - phi[1],
        phi1_minus_phi3: phi[0] - phi[2],
        pathology: phi[0] > phi[1] || phi[0] > phi[2],
        rank_violation: markov_rank_violation(&phi, &MARKOV2_BOUNDARY)?,
    })
}

/// Run the discrete chain experiment at one link strength: the exact
/// Bayes-accuracy game (no samples) and the interventional cross-entropy
/// game on a fitted probability table.
pub fn run_markov2(ell: f64, n: usize, seed: u64) -> Result<Vec<Markov2Row>> {
    let table = dgp::joint_discrete_markov(ell)?;
    let bayes = bayes_accuracy_game(&table)?;
    let mut rows = Vec::with_capacity(2);
    rows.push(markov2_row("bayes_accuracy_exact", ell, 0, seed, &bayes)?);

    let data = dgp::sample_discrete_markov(ell, n, seed)?;
    let model = fit_prob_table(&data)?;
    let game = interventional_loss_game(&model, &data, LossSpec::cross_entropy_default())?;
    rows.push(markov2_row(
        "interventional_table_crossentropy",
        ell,
        n,
        seed,
        &game,
    )?);
    Ok(rows)
}

/// Sweep the link strength; one derived seed per grid cell, cells evaluated
/// independently (in parallel when enabled) and emitted in grid order.
pub fn sweep_markov2(cfg: &SweepConfig) -> Result<Vec<Markov2Row>> {
    let [axis] = cfg.axes.as_slice() else {
        return Err(Error::invalid(
            "link-strength sweep takes exactly one axis (ell=start:stop:count)",
        ));
    };
    if axis.name != "ell" {
        return Err(Error::invalid(format!(
            "link-strength sweep axis must be named ell, got {:?}",
            axis.name
        )));
    }
    let cells = exec::map_indexed(axis.count, |i| {
        let ell = axis.value(i);
        let seed = mix_seed(cfg.base_seed, &[i as u64]);
        run_markov2(ell, cfg.n, seed)
    });
    let mut rows = Vec::with_capacity(axis.count * 2);
    for cell in cells {
        rows.extend(cell?);
    }
    Ok(rows)
}

pub fn markov2_table(rows: &[Markov2Row]) -> Table {
    let mut t = Table::new(vec![
        "experiment",
        "formulation",
        "ell",
        "n",
        "seed",
        "phi_X1",
        "phi_X2",
        "phi_X3",
        "v_1",
        "v_2",
        "v_3",
        "v_12",
        "v_13",
        "v_23",
        "v_123",
        "phi1_minus_phi2",
        "phi1_minus_phi3",
        "pathology",
        "rank_violation",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Text("markov2".into()),
            Cell::Text(r.formulation.clone()),
            Cell::Float(r.ell),
            Cell::UInt(r.n as u64),
            Cell::UInt(r.seed),
            Cell::Float(r.phi[0]),
            Cell::Float(r.phi[1]),
            Cell::Float(r.phi[2]),
            Cell::Float(r.values[0b001]),
            Cell::Float(r.values[0b010]),
            Cell::Float(r.values[0b100]),
            Cell::Float(r.values[0b011]),
            Cell::Float(r.values[0b101]),
            Cell::Float(r.values[0b110]),
            Cell::Float(r.values[0b111]),
            Cell::Float(r.phi1_minus_phi2),
            Cell::Float(r.phi1_minus_phi3),
            Cell::Flag(r.pathology),
            Cell::Flag(r.rank_violation),
        ]);
    }
    t
}

// ---------------------------------------------------------------------------
// Interaction (keystone) experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SecretRow {
    pub t1: f64,
    pub t2: f64,
    pub n: usize,
    pub seed: u64,
    pub values: [f64; 8],
    pub phi: [f64; 3],
    pub phi1_minus_phi2: f64,
    pub phi1_minus_phi3: f64,
    /// Undervalued-keystone flag: both mixed pairs beat `{2,3}` yet the
    /// first player ranks last.
    pub pathology: bool,
}

/// Run the interaction experiment at one parameter point: sample, fit the
/// per-coalition closest submodels, score by log-likelihood gain.
pub fn run_secret(t1: f64, t2: f64, n: usize, seed: u64) -> Result<Vec<SecretRow>> {
    if n < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 samples, got {n}"
        )));
    }
    let data = dgp::sample_secret(t1, t2, n, seed)?;
    let game = loglik_game(&data, &DgpVariant::SecretInteraction { t1, t2 })?;
    let attribution = exact_shapley(&game)?;
    let phi = &attribution.phi;
    Ok(vec![SecretRow {
        t1,
        t2,
        n,
        seed,
        values: values8(&game),
        phi: phi3(phi),
        phi1_minus_phi2: phi[0] - phi[1],
        phi1_minus_phi3: phi[0] - phi[2],
        pathology: undervalued_keystone(&game, &attribution)?,
    }])
}

/// Sweep the `(t1, t2)` parameter grid, one dataset per cell with a derived
/// seed, cells in row-major grid order.
pub fn sweep_secret(cfg: &SweepConfig) -> Result<Vec<SecretRow>> {
    let [axis1, axis2] = cfg.axes.as_slice() else {
        return Err(Error::invalid(
            "interaction sweep takes exactly two axes (t1=..,t2=..)",
        ));
    };
    if axis1.name != "t1" || axis2.name != "t2" {
        return Err(Error::invalid(format!(
            "interaction sweep axes must be t1,t2 in order, got {:?},{:?}",
            axis1.name, axis2.name
        )));
    }
    let total = axis1.count * axis2.count;
    let cells = exec::map_indexed(total, |flat| {
        let (i, j) = (flat / axis2.count, flat % axis2.count);
        let seed = mix_seed(cfg.base_seed, &[i as u64, j as u64]);
        run_secret(axis1.value(i), axis2.value(j), cfg.n, seed)
    });
    let mut rows = Vec::with_capacity(total);
    for cell in cells {
        rows.extend(cell?);
    }
    Ok(rows)
}

pub fn secret_table(rows: &[SecretRow]) -> Table {
    let mut t = Table::new(vec![
        "experiment",
        "t1",
        "t2",
        "n",
        "seed",
        "v_1",
        "v_2",
        "v_3",
        "v_12",
        "v_13",
        "v_23",
        "v_123",
        "phi_X1",
        "phi_X2",
        "phi_X3",
        "phi1_minus_phi2",
        "phi1_minus_phi3",
        "pathology",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Text("secret".into()),
            Cell::Float(r.t1),
            Cell::Float(r.t2),
            Cell::UInt(r.n as u64),
            Cell::UInt(r.seed),
            Cell::Float(r.values[0b001]),
            Cell::Float(r.values[0b010]),
            Cell::Float(r.values[0b100]),
            Cell::Float(r.values[0b011]),
            Cell::Float(r.values[0b101]),
            Cell::Float(r.values[0b110]),
            Cell::Float(r.values[0b111]),
            Cell::Float(r.phi[0]),
            Cell::Float(r.phi[1]),
            Cell::Float(r.phi[2]),
            Cell::Float(r.phi1_minus_phi2),
            Cell::Float(r.phi1_minus_phi3),
            Cell::Flag(r.pathology),
        ]);
    }
    t
}

// ---------------------------------------------------------------------------
// Shifted-max experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TaxicabRow {
    pub a: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub names: Vec<String>,
    /// Full table when d = 3 (the standard configuration).
    pub values: Option<[f64; 8]>,
    pub phi: Vec<f64>,
    /// Dominated-hanger-on flag per feature.
    pub flags: Vec<bool>,
    /// Value gap of the Shapley top-1 pick to the best singleton.
    pub regret_k1: f64,
}

/// Run the shifted-max experiment: score coalitions by MSE skill of the max
/// predictor and flag features that earn credit without helping the optimum.
pub fn run_taxicab(a: &[f64], n: usize, seed: u64, tol: f64) -> Result<Vec<TaxicabRow>> {
    let data = dgp::sample_taxicab_max(a, n, seed)?;
    let game = mse_skill_game(&data)?;
    let attribution = exact_shapley(&game)?;
    let flagged = detect_taxicab(&game, &attribution, tol)?;
    let d = game.player_count();
    Ok(vec![TaxicabRow {
        a: a.to_vec(),
        n,
        seed,
        names: data.names.clone(),
        values: (d == 3).then(|| values8(&game)),
        phi: attribution.phi.clone(),
        flags: (0..d).map(|i| flagged.contains(&i)).collect(),
        regret_k1: selection_regret(&game, 1)?,
    }])
}

pub fn taxicab_table(rows: &[TaxicabRow]) -> Table {
    let d = rows.first().map_or(0, |r| r.names.len());
    let mut header: Vec<String> = vec!["experiment".into(), "a".into(), "n".into(), "seed".into()];
    if d == 3 {
        for v in ["v_1", "v_2", "v_3", "v_12", "v_13", "v_23", "v_123"] {
            header.push(v.into());
        }
    }
    for r in rows.first().iter() {
        for name in &r.names {
            header.push(format!("phi_{name}"));
        }
        for name in &r.names {
            header.push(format!("flag_{name}"));
        }
    }
    header.push("regret_k1".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for r in rows {
        let mut row = vec![
            Cell::Text("taxicab".into()),
            Cell::Text(
                r.a.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("|"),
            ),
            Cell::UInt(r.n as u64),
            Cell::UInt(r.seed),
        ];
        if let Some(values) = &r.values {
            for mask in [0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111] {
                row.push(Cell::Float(values[mask]));
            }
        }
        row.extend(r.phi.iter().map(|&p| Cell::Float(p)));
        row.extend(r.flags.iter().map(|&f| Cell::Flag(f)));
        row.push(Cell::Float(r.regret_k1));
        t.push(row);
    }
    t
}
