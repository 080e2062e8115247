//! Selection rules and detectors for Shapley-ranked feature selection going
//! wrong.
//!
//! The detectors make three failure modes executable: a dominant player whose
//! hangers-on still collect positive value (`detect_taxicab`), a keystone
//! player that every better fixed-size coalition needs but Shapley ranks last
//! (`detect_secret_holder`, `undervalued_keystone`), and rankings that
//! promote a feature outside the Markov boundary (`markov_rank_violation`).
//! Efficiency waste quantifies how much worth a non-monotone game leaves on
//! the table when payoffs are tied to the grand coalition.

use serde::Serialize;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::shapley::{exact_shapley, rank_descending, Attribution};

/// How a coalition was selected from an attribution vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    TopK { k: usize },
    Threshold { tau: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub selected: Coalition,
    pub rule: SelectionRule,
    pub attribution_tag: String,
    /// Value gap to the best coalition of the same size, when computed.
    pub regret: Option<f64>,
}

/// Select the `k` highest-valued players; ties break toward the lower index.
pub fn top_k(attribution: &Attribution, k: usize) -> Result<SelectionResult> {
    let d = attribution.phi.len();
    if k == 0 || k > d {
        return Err(Error::invalid(format!("k must lie in 1..={d}, got {k}")));
    }
    let ranked = rank_descending(&attribution.phi);
    let selected = Coalition::from_members(&ranked[..k], d)?;
    Ok(SelectionResult {
        selected,
        rule: SelectionRule::TopK { k },
        attribution_tag: attribution.game_tag.clone(),
        regret: None,
    })
}

/// Select every player whose value strictly exceeds `tau`.
pub fn threshold(attribution: &Attribution, tau: f64) -> Result<SelectionResult> {
    let d = attribution.phi.len();
    let members: Vec<usize> = (0..d).filter(|&i| attribution.phi[i] > tau).collect();
    let selected = Coalition::from_members(&members, d)?;
    Ok(SelectionResult {
        selected,
        rule: SelectionRule::Threshold { tau },
        attribution_tag: attribution.game_tag.clone(),
        regret: None,
    })
}

/// Which coalition sizes an argmax scan ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeRule {
    Exactly(usize),
    Any,
}

/// Argmax coalitions of a game, with the minimal-cardinality subset of the
/// argmax set singled out.
#[derive(Debug, Clone, Serialize)]
pub struct OptimalCoalitions {
    pub max_value: f64,
    /// All maximizers, ascending by bitmask.
    pub argmax: Vec<Coalition>,
    /// Maximizers of minimum cardinality; the first entry (lowest bitmask)
    /// is the canonical witness.
    pub minimal: Vec<Coalition>,
}

fn argmax_with_tol(game: &Game, size: SizeRule, tol: f64) -> OptimalCoalitions {
    let d = game.player_count();
    let values = game.values();
    let keep = |mask: usize| match size {
        SizeRule::Exactly(k) => mask.count_ones() as usize == k,
        SizeRule::Any => true,
    };
    let mut max_value = f64::NEG_INFINITY;
    for (mask, &v) in values.iter().enumerate() {
        if keep(mask) && v > max_value {
            max_value = v;
        }
    }
    let argmax: Vec<Coalition> = values
        .iter()
        .enumerate()
        .filter(|(mask, &v)| keep(*mask) && v >= max_value - tol)
        .map(|(mask, _)| Coalition::from_bits(mask as u64, d).expect("mask in range"))
        .collect();
    let min_size = argmax.iter().map(|c| c.size()).min().unwrap_or(0);
    let minimal = argmax
        .iter()
        .copied()
        .filter(|c| c.size() == min_size)
        .collect();
    OptimalCoalitions {
        max_value,
        argmax,
        minimal,
    }
}

/// Exact argmax of the value table over coalitions of the given size (or all
/// sizes).
pub fn optimal_coalitions(game: &Game, size: SizeRule) -> OptimalCoalitions {
    argmax_with_tol(game, size, 0.0)
}

/// Worth left on the table by ranking: best achievable value at size `k`
/// minus the value of the Shapley top-`k` coalition.
pub fn selection_regret(game: &Game, k: usize) -> Result<f64> {
    let attribution = exact_shapley(game)?;
    let picked = top_k(&attribution, k)?;
    let best = optimal_coalitions(game, SizeRule::Exactly(k)).max_value;
    Ok((best - game.value(picked.selected)).max(0.0))
}

/// Players with positive attributed value that contribute nothing to some
/// minimal optimal coalition excluding them: credit earned only in
/// coalitions the optimum does not need.
pub fn detect_taxicab(game: &Game, attribution: &Attribution, tol: f64) -> Result<Vec<usize>> {
    let d = game.player_count();
    if attribution.phi.len() != d {
        return Err(Error::invalid("attribution/game dimension mismatch"));
    }
    let optima = argmax_with_tol(game, SizeRule::Any, tol);
    let mut flagged = Vec::new();
    for i in 0..d {
        if attribution.phi[i] <= tol {
            continue;
        }
        let useless = optima.minimal.iter().any(|o| {
            !o.contains(i)
                && game
                    .marginal_contribution(i, *o)
                    .map(|m| m.abs() <= tol)
                    .unwrap_or(false)
        });
        if useless {
            flagged.push(i);
        }
    }
    Ok(flagged)
}

/// Pairs `(i, j)` where the ranking inverts the structure of the size-`k`
/// optima. Two tiers:
/// * `strict`: `i` is in every size-`k` optimum, `j` in none, yet
///   `φ_i < φ_j`;
/// * `relaxed`: `j` merely misses at least one size-`k` optimum.
#[derive(Debug, Clone, Serialize)]
pub struct SecretHolderFlags {
    pub strict: Vec<(usize, usize)>,
    pub relaxed: Vec<(usize, usize)>,
}

pub fn detect_secret_holder(
    game: &Game,
    attribution: &Attribution,
    k: usize,
) -> Result<SecretHolderFlags> {
    let d = game.player_count();
    if attribution.phi.len() != d {
        return Err(Error::invalid("attribution/game dimension mismatch"));
    }
    if k == 0 || k > d {
        return Err(Error::invalid(format!("k must lie in 1..={d}, got {k}")));
    }
    // Tie tolerance for grouping optima; toy tables tie exactly, empirical
    // tables effectively never do.
    let optima = argmax_with_tol(game, SizeRule::Exactly(k), 1e-9).argmax;
    let in_every = |i: usize| optima.iter().all(|o| o.contains(i));
    let in_none = |i: usize| optima.iter().all(|o| !o.contains(i));
    let misses_one = |i: usize| optima.iter().any(|o| !o.contains(i));
    let mut flags = SecretHolderFlags {
        strict: Vec::new(),
        relaxed: Vec::new(),
    };
    for i in 0..d {
        if !in_every(i) {
            continue;
        }
        for j in 0..d {
            if j == i || attribution.phi[i] >= attribution.phi[j] {
                continue;
            }
            if in_none(j) {
                flags.strict.push((i, j));
            }
            if misses_one(j) {
                flags.relaxed.push((i, j));
            }
        }
    }
    Ok(flags)
}

/// For a 3-player game: true when the first player ranks strictly below both
/// others even though each mixed pair `{1, i}` strictly beats the pair
/// `{2, 3}` — the ranking points away from the player every better pair
/// needs. Strict inequalities, no tolerance.
pub fn undervalued_keystone(game: &Game, attribution: &Attribution) -> Result<bool> {
    if game.player_count() != 3 || attribution.phi.len() != 3 {
        return Err(Error::invalid(
            "keystone predicate is defined for 3-player games",
        ));
    }
    let phi = &attribution.phi;
    let v = game.values();
    Ok(phi[1] > phi[0] && phi[2] > phi[0] && v[0b011] > v[0b110] && v[0b101] > v[0b110])
}

/// True when the top-`|boundary|` selection differs from the boundary set.
pub fn markov_rank_violation(phi: &[f64], boundary: &[usize]) -> Result<bool> {
    if boundary.is_empty() {
        return Err(Error::invalid("boundary must be non-empty"));
    }
    let d = phi.len();
    let mut seen = vec![false; d];
    for &b in boundary {
        if b >= d {
            return Err(Error::invalid(format!(
                "boundary member {b} out of range for {d} players"
            )));
        }
        if seen[b] {
            return Err(Error::invalid(format!("boundary member {b} repeated")));
        }
        seen[b] = true;
    }
    let ranked = rank_descending(phi);
    let mut picked = vec![false; d];
    for &i in &ranked[..boundary.len()] {
        picked[i] = true;
    }
    Ok(picked != seen)
}

/// `max(0, max_S C(S) − C(F))`: worth that efficient payoffs cannot reach.
/// Zero for every monotone game.
pub fn efficiency_waste(game: &Game) -> f64 {
    let best = optimal_coalitions(game, SizeRule::Any).max_value;
    (best - game.grand_value()).max(0.0)
}

/// Charge a per-player cost: `C'(S) = C(S) − λ·|S|`.
pub fn penalize(game: &Game, lambda: f64) -> Result<Game> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::invalid(format!(
            "penalty rate must be non-negative, got {lambda}"
        )));
    }
    let raw: Vec<f64> = game
        .values()
        .iter()
        .enumerate()
        .map(|(mask, &v)| v - lambda * mask.count_ones() as f64)
        .collect();
    Game::new(
        game.labels().to_vec(),
        raw,
        format!("{}-penalized-{}", game.tag(), lambda),
    )
}

/// Aggregated detector pass over one game.
#[derive(Debug, Clone, Serialize)]
pub struct PathologyReport {
    pub taxicab_flags: Vec<usize>,
    pub secret_flags: SecretHolderFlags,
    /// Present only when a boundary was supplied.
    pub markov_violation: Option<bool>,
    pub efficiency_waste: f64,
    pub details: PathologyDetails,
}

/// Witness coalitions backing the flags.
#[derive(Debug, Clone, Serialize)]
pub struct PathologyDetails {
    pub minimal_optima: Vec<Coalition>,
    pub size_k_optima: Vec<Coalition>,
    pub waste_witness: Coalition,
    pub k: usize,
}

pub fn pathology_report(
    game: &Game,
    attribution: &Attribution,
    k: usize,
    tol: f64,
    boundary: Option<&[usize]>,
) -> Result<PathologyReport> {
    let taxicab_flags = detect_taxicab(game, attribution, tol)?;
    let secret_flags = detect_secret_holder(game, attribution, k)?;
    let markov_violation = boundary
        .map(|b| markov_rank_violation(&attribution.phi, b))
        .transpose()?;
    let any = optimal_coalitions(game, SizeRule::Any);
    let size_k = optimal_coalitions(game, SizeRule::Exactly(k));
    Ok(PathologyReport {
        taxicab_flags,
        secret_flags,
        markov_violation,
        efficiency_waste: efficiency_waste(game),
        details: PathologyDetails {
            minimal_optima: any.minimal,
            size_k_optima: size_k.argmax,
            waste_witness: any.argmax[0],
            k,
        },
    })
}
