//! Exact Shapley values over the complete coalition lattice.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::game::Game;
use crate::MAX_PLAYERS;

/// How an attribution vector was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Weighted sum over all subsets (the production path).
    ExactSubset,
    /// Average over all `d!` player orderings (independent test oracle).
    PermutationOracle,
}

/// Per-player Shapley values with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct Attribution {
    pub phi: Vec<f64>,
    pub game_tag: String,
    pub method: Method,
}

impl Attribution {
    /// Player indices sorted by descending value, ties broken by lower index.
    pub fn ranking(&self) -> Vec<usize> {
        rank_descending(&self.phi)
    }
}

/// Indices of `values` sorted by descending value; ties go to the lower index.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// Factorials 0! ..= 25! (25! < 2^128).
fn factorial(n: usize) -> u128 {
    (2..=n as u128).product()
}

/// The ordering weight `|S|! (d − |S| − 1)! / d!` for a coalition of size `s`
/// in a `d`-player game, computed with exact integer factorials.
pub fn shapley_weight(s: usize, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("player count must be at least 1"));
    }
    if s >= d {
        return Err(Error::invalid(format!(
            "coalition size {s} must be below player count {d}"
        )));
    }
    Ok((factorial(s) * factorial(d - 1 - s)) as f64 / factorial(d) as f64)
}

fn weight_table(d: usize) -> Vec<f64> {
    (0..d)
        .map(|s| shapley_weight(s, d).expect("s < d"))
        .collect()
}

fn accumulate(d: usize, values: &[f64], weights: &[f64], sequential: bool) -> Vec<f64> {
    let fold = |range: std::ops::Range<usize>| {
        let mut phi = vec![0.0f64; d];
        for mask in range {
            let s = mask.count_ones() as usize;
            if s == d {
                continue; // the grand coalition has no outgoing edges
            }
            let v = values[mask];
            let w = weights[s];
            for (i, p) in phi.iter_mut().enumerate() {
                if (mask >> i) & 1 == 0 {
                    *p += w * (values[mask | (1 << i)] - v);
                }
            }
        }
        phi
    };
    let merge = |mut a: Vec<f64>, b: Vec<f64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    let n = values.len();
    if sequential {
        exec::fold_chunked_seq(n, fold, merge).expect("non-empty lattice")
    } else {
        exec::fold_chunked(n, fold, merge).expect("non-empty lattice")
    }
}

/// Exact Shapley values: for every player, the `shapley_weight`-weighted sum
/// of marginal contributions over all coalitions excluding that player.
pub fn exact_shapley(game: &Game) -> Result<Attribution> {
    exact_shapley_impl(game, false)
}

/// Sequential twin of [`exact_shapley`], kept for benchmarking the rayon path
/// against. Produces bit-identical results.
pub fn exact_shapley_seq(game: &Game) -> Result<Attribution> {
    exact_shapley_impl(game, true)
}

fn exact_shapley_impl(game: &Game, sequential: bool) -> Result<Attribution> {
    let d = game.player_count();
    if d > MAX_PLAYERS {
        return Err(Error::capacity(format!(
            "exact lattice limited to {MAX_PLAYERS} players, got {d}"
        )));
    }
    let weights = weight_table(d);
    let phi = accumulate(d, game.values(), &weights, sequential);
    let attribution = Attribution {
        phi,
        game_tag: game.tag().to_string(),
        method: Method::ExactSubset,
    };
    debug_assert!({
        let sum: f64 = attribution.phi.iter().sum();
        let target = game.grand_value();
        (sum - target).abs() <= 1e-9 * target.abs().max(1.0)
    });
    Ok(attribution)
}

/// Independent oracle: average the marginal contribution of each player over
/// all `d!` orderings. Limited to 8 players by the factorial enumeration.
pub fn permutation_shapley(game: &Game) -> Result<Attribution> {
    use itertools::Itertools;

    let d = game.player_count();
    if d > 8 {
        return Err(Error::capacity(format!(
            "permutation oracle enumerates d! orderings; limited to 8 players, got {d}"
        )));
    }
    let values = game.values();
    let mut phi = vec![0.0f64; d];
    let mut count = 0u64;
    for perm in (0..d).permutations(d) {
        let mut mask = 0usize;
        for p in perm {
            let next = mask | (1 << p);
            phi[p] += values[next] - values[mask];
            mask = next;
        }
        count += 1;
    }
    for p in &mut phi {
        *p /= count as f64;
    }
    Ok(Attribution {
        phi,
        game_tag: game.tag().to_string(),
        method: Method::PermutationOracle,
    })
}
