//! The classical Shapley axioms as falsifiable numeric checks.
//!
//! Each check returns a residual or a witness set instead of a yes/no, so a
//! failing computation can be diagnosed. For exact Shapley values the
//! efficiency, additivity and balanced-contribution residuals are zero up to
//! floating-point accumulation; the checks double as correctness tests of the
//! lattice scan itself.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::shapley::{exact_shapley, Attribution};

/// Evidence attached to a residual that exceeded the audit tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub axiom: String,
    pub players: Vec<usize>,
    pub residual: f64,
}

/// Outcome of a full axiom audit.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub efficiency_residual: f64,
    pub null_players: Vec<usize>,
    pub symmetric_pairs: Vec<(usize, usize)>,
    pub additivity_residual: Option<f64>,
    pub balanced_residual: f64,
    pub witnesses: Vec<Witness>,
}

/// `|Σ φ_i − C(F)|` — absolute distance from distributing the grand worth.
pub fn check_efficiency(game: &Game, attribution: &Attribution) -> Result<f64> {
    if attribution.phi.len() != game.player_count() {
        return Err(Error::invalid(format!(
            "attribution has {} entries for a {}-player game",
            attribution.phi.len(),
            game.player_count()
        )));
    }
    let sum: f64 = attribution.phi.iter().sum();
    Ok((sum - game.grand_value()).abs())
}

/// Players whose marginal contribution stays within `tol` of zero for every
/// coalition they can join: `|C(S ∪ {i}) − C(S)| ≤ tol` for all `S ⊆ F\{i}`.
pub fn find_null_players(game: &Game, tol: f64) -> Vec<usize> {
    let d = game.player_count();
    let values = game.values();
    (0..d)
        .filter(|&i| {
            let bit = 1usize << i;
            (0..values.len())
                .filter(|mask| mask & bit == 0)
                .all(|mask| (values[mask | bit] - values[mask]).abs() <= tol)
        })
        .collect()
}

/// Pairs `(i, j)` that play interchangeable roles:
/// `|C(S ∪ {i}) − C(S ∪ {j})| ≤ tol` for every `S ⊆ F\{i,j}`.
pub fn find_symmetric_pairs(game: &Game, tol: f64) -> Vec<(usize, usize)> {
    let d = game.player_count();
    let values = game.values();
    let mut pairs = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let (bi, bj) = (1usize << i, 1usize << j);
            let symmetric = (0..values.len())
                .filter(|mask| mask & bi == 0 && mask & bj == 0)
                .all(|mask| (values[mask | bi] - values[mask | bj]).abs() <= tol);
            if symmetric {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// `max_i |φ_i(g+h) − φ_i(g) − φ_i(h)|` over a compatible pair of games.
pub fn check_additivity(g: &Game, h: &Game) -> Result<f64> {
    let sum = g.add(h)?;
    let phi_sum = exact_shapley(&sum)?.phi;
    let phi_g = exact_shapley(g)?.phi;
    let phi_h = exact_shapley(h)?.phi;
    Ok(phi_sum
        .iter()
        .zip(phi_g.iter().zip(&phi_h))
        .map(|(s, (a, b))| (s - a - b).abs())
        .fold(0.0, f64::max))
}

/// Max over pairs `(i, j)` of the balanced-contributions defect
/// `|(φ_i(C) − φ_i(C_j)) − (φ_j(C) − φ_j(C_i))|`, where `C_k` is the game
/// restricted to `F\{k}`.
pub fn check_balanced_contributions(game: &Game) -> Result<f64> {
    let d = game.player_count();
    if d < 2 {
        return Err(Error::invalid(
            "balanced contributions needs at least 2 players".to_string(),
        ));
    }
    let phi = exact_shapley(game)?.phi;
    // phi_without[k] = Shapley vector of the game with player k removed,
    // indexed by the original player indices (entry k unused).
    let mut phi_without = Vec::with_capacity(d);
    for k in 0..d {
        let sub = exact_shapley(&game.restrict(k)?)?.phi;
        let mut expanded = vec![0.0; d];
        let mut t = 0;
        for (orig, slot) in expanded.iter_mut().enumerate() {
            if orig != k {
                *slot = sub[t];
                t += 1;
            }
        }
        phi_without.push(expanded);
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i + 1..d {
            let lhs = phi[i] - phi_without[j][i];
            let rhs = phi[j] - phi_without[i][j];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Run every axiom check on `game` (additivity only when `other` is given),
/// collecting witnesses for residuals above `tol`.
pub fn audit_all(game: &Game, other: Option<&Game>, tol: f64) -> Result<AxiomReport> {
    let attribution = exact_shapley(game)?;
    let efficiency_residual = check_efficiency(game, &attribution)?;
    let null_players = find_null_players(game, tol);
    let symmetric_pairs = find_symmetric_pairs(game, tol);
    let additivity_residual = match other {
        Some(h) => Some(check_additivity(game, h)?),
        None => None,
    };
    let balanced_residual = if game.player_count() >= 2 {
        check_balanced_contributions(game)?
    } else {
        0.0
    };

    let mut witnesses = Vec::new();
    let scale = game.grand_value().abs().max(1.0);
    if efficiency_residual > tol * scale {
        witnesses.push(Witness {
            axiom: "efficiency".to_string(),
            players: (0..game.player_count()).collect(),
            residual: efficiency_residual,
        });
    }
    if let Some(r) = additivity_residual {
        if r > tol {
            witnesses.push(Witness {
                axiom: "additivity".to_string(),
                players: (0..game.player_count()).collect(),
                residual: r,
            });
        }
    }
    if balanced_residual > tol {
        witnesses.push(Witness {
            axiom: "balanced_contributions".to_string(),
            players: (0..game.player_count()).collect(),
            residual: balanced_residual,
        });
    }
    Ok(AxiomReport {
        efficiency_residual,
        null_players,
        symmetric_pairs,
        additivity_residual,
        balanced_residual,
        witnesses,
    })
}
