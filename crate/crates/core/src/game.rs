//! Transferable-utility games on a complete coalition lattice.
//!
//! A [`Game`] stores one worth per coalition in a dense table of `2^d`
//! entries indexed by coalition bitmask. Construction normalizes the table so
//! the empty coalition is worth exactly zero; the subtracted constant is kept
//! as `offset` so the raw table can be recovered.

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exec;
use crate::MAX_PLAYERS;

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    d: usize,
    labels: Vec<String>,
    values: Vec<f64>,
    offset: f64,
    tag: String,
}

impl Game {
    /// Build a game from a raw value table indexed by coalition bitmask.
    ///
    /// `raw_values[0]` (the empty coalition) becomes the normalization
    /// offset; every entry is shifted so `values[0] == 0.0` exactly.
    pub fn new(labels: Vec<String>, raw_values: Vec<f64>, tag: impl Into<String>) -> Result<Game> {
        let d = labels.len();
        if d == 0 || d > MAX_PLAYERS {
            return Err(Error::invalid(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {d}"
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::validation(format!("label {i} is empty")));
            }
            if labels[..i].contains(l) {
                return Err(Error::validation(format!("duplicate label {l:?}")));
            }
        }
        if raw_values.len() != 1 << d {
            return Err(Error::validation(format!(
                "value table has {} entries, expected 2^{d} = {}",
                raw_values.len(),
                1usize << d
            )));
        }
        let offset = raw_values[0];
        if !offset.is_finite() {
            return Err(Error::validation(
                "empty-coalition value is non-finite".to_string(),
            ));
        }
        let mut values = raw_values;
        for (mask, v) in values.iter_mut().enumerate() {
            *v -= offset;
            if !v.is_finite() {
                let c = Coalition::from_bits(mask as u64, d).expect("mask in range");
                return Err(Error::validation(format!(
                    "coalition {c} has non-finite value"
                )));
            }
        }
        values[0] = 0.0;
        Ok(Game {
            d,
            labels,
            values,
            offset,
            tag: tag.into(),
        })
    }

    /// Evaluate `f` on every coalition mask (in parallel when enabled) and
    /// build the normalized game from the resulting raw table.
    pub fn from_fn<F>(labels: Vec<String>, tag: impl Into<String>, f: F) -> Result<Game>
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        let d = labels.len();
        if d == 0 || d > MAX_PLAYERS {
            return Err(Error::invalid(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {d}"
            )));
        }
        let raw = exec::map_indexed(1 << d, |mask| f(mask as u64));
        Game::new(labels, raw, tag)
    }

    /// Sequential twin of [`Game::from_fn`], kept for benchmarking the rayon
    /// path against.
    pub fn from_fn_seq<F>(labels: Vec<String>, tag: impl Into<String>, f: F) -> Result<Game>
    where
        F: Fn(u64) -> f64,
    {
        let d = labels.len();
        if d == 0 || d > MAX_PLAYERS {
            return Err(Error::invalid(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {d}"
            )));
        }
        let raw = exec::map_indexed_seq(1 << d, |mask| f(mask as u64));
        Game::new(labels, raw, tag)
    }

    pub fn player_count(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, player: usize) -> &str {
        &self.labels[player]
    }

    /// Index of the player with the given label.
    pub fn player(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Normalized value table, indexed by coalition bitmask.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Worth of a coalition given as a bitmask.
    pub fn value_of_mask(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    pub fn value(&self, coalition: Coalition) -> f64 {
        self.values[coalition.bits() as usize]
    }

    /// Worth of the grand coalition.
    pub fn grand_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Constant subtracted from the raw table at construction.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn full_mask(&self) -> u64 {
        Coalition::full_mask(self.d)
    }

    /// Worth a coalition had before normalization.
    pub fn raw_value_of_mask(&self, mask: u64) -> f64 {
        self.values[mask as usize] + self.offset
    }

    /// `C(S ∪ {i}) − C(S)` for a player `i ∉ S`.
    pub fn marginal_contribution(&self, player: usize, coalition: Coalition) -> Result<f64> {
        if player >= self.d {
            return Err(Error::invalid(format!(
                "player index {player} out of range for {}-player game",
                self.d
            )));
        }
        if coalition.contains(player) {
            return Err(Error::invalid(format!(
                "player {player} is already in coalition {coalition}"
            )));
        }
        let s = coalition.bits() as usize;
        Ok(self.values[s | (1 << player)] - self.values[s])
    }

    /// Pointwise sum of two games over the same players.
    pub fn add(&self, other: &Game) -> Result<Game> {
        if self.d != other.d || self.labels != other.labels {
            return Err(Error::invalid(
                "games have different players; cannot add".to_string(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Game {
            d: self.d,
            labels: self.labels.clone(),
            values,
            offset: self.offset + other.offset,
            tag: format!("{}+{}", self.tag, other.tag),
        })
    }

    /// Pointwise scaling of the value table.
    pub fn scale(&self, alpha: f64) -> Game {
        Game {
            d: self.d,
            labels: self.labels.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
            offset: alpha * self.offset,
            tag: format!("{}*{}", alpha, self.tag),
        }
    }

    /// Remove `player`, keeping the worths of all coalitions that never
    /// contained it. Labels are reindexed.
    pub fn restrict(&self, player: usize) -> Result<Game> {
        if self.d < 2 {
            return Err(Error::invalid(
                "cannot restrict a 1-player game".to_string(),
            ));
        }
        if player >= self.d {
            return Err(Error::invalid(format!(
                "player index {player} out of range for {}-player game",
                self.d
            )));
        }
        let low = (1u64 << player) - 1;
        let values = (0..1usize << (self.d - 1))
            .map(|t| {
                let t = t as u64;
                let orig = (t & low) | ((t & !low) << 1);
                self.values[orig as usize]
            })
            .collect();
        let mut labels = self.labels.clone();
        let removed = labels.remove(player);
        Ok(Game {
            d: self.d - 1,
            labels,
            values,
            offset: self.offset,
            tag: format!("{}-without-{}", self.tag, removed),
        })
    }

    /// Reorder players by `perm`, where `perm[new_index] = old_index`.
    pub fn permute(&self, perm: &[usize]) -> Result<Game> {
        if perm.len() != self.d {
            return Err(Error::invalid("permutation length mismatch".to_string()));
        }
        let mut seen = vec![false; self.d];
        for &p in perm {
            if p >= self.d || seen[p] {
                return Err(Error::invalid("not a permutation".to_string()));
            }
            seen[p] = true;
        }
        let values = (0..self.values.len())
            .map(|new_mask| {
                let mut old_mask = 0u64;
                for (new_i, &old_i) in perm.iter().enumerate() {
                    if (new_mask >> new_i) & 1 == 1 {
                        old_mask |= 1 << old_i;
                    }
                }
                self.values[old_mask as usize]
            })
            .collect();
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        Ok(Game {
            d: self.d,
            labels,
            values,
            offset: self.offset,
            tag: self.tag.clone(),
        })
    }

    /// First lattice edge `(S, i)` with `C(S) > C(S ∪ {i}) + slack`, in
    /// (mask, player) scan order; `None` if the game is monotone.
    pub fn monotonicity_violation(&self, slack: f64) -> Option<(Coalition, usize)> {
        let d = self.d;
        let values = &self.values;
        exec::find_first_chunked(values.len(), |range| {
            for mask in range {
                let v = values[mask];
                for i in 0..d {
                    if (mask >> i) & 1 == 0 && v > values[mask | (1 << i)] + slack {
                        let c = Coalition::from_bits(mask as u64, d).expect("mask in range");
                        return Some((c, i));
                    }
                }
            }
            None
        })
    }

    /// Whether worth never decreases along any lattice edge (within the
    /// default slack).
    pub fn is_monotonic(&self) -> bool {
        self.monotonicity_violation(crate::MONOTONICITY_SLACK)
            .is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;

    #[test]
    fn normalizes_empty_coalition() {
        let g = Game::new(
            vec!["a".into(), "b".into()],
            vec![0.5, 1.5, 2.5, 3.5],
            "shifted",
        )
        .unwrap();
        assert_eq!(g.offset(), 0.5);
        assert_eq!(g.values(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(g.raw_value_of_mask(3), 3.5);
    }

    #[test]
    fn rejects_bad_tables() {
        let labels = || vec!["a".to_string(), "b".to_string()];
        assert!(Game::new(labels(), vec![0.0; 3], "short").is_err());
        assert!(Game::new(labels(), vec![0.0, 1.0, f64::NAN, 2.0], "nan").is_err());
        assert!(Game::new(vec!["a".into(), "a".into()], vec![0.0; 4], "dup").is_err());
        assert!(Game::new(vec!["a".into(), "".into()], vec![0.0; 4], "empty").is_err());
        assert!(Game::new(vec![], vec![], "none").is_err());
    }

    #[test]
    fn marginal_contributions_on_taxicab() {
        let g = toy::taxicab_game();
        // i=3 joining {1,2}: 10 - 7
        let s = Coalition::from_members(&[0, 1], 3).unwrap();
        assert_eq!(g.marginal_contribution(2, s).unwrap(), 3.0);
        // i=1 joining {3}: both coalitions worth 10
        let s = Coalition::from_members(&[2], 3).unwrap();
        assert_eq!(g.marginal_contribution(0, s).unwrap(), 0.0);
        // member already present
        let s = Coalition::from_members(&[0], 3).unwrap();
        assert!(g.marginal_contribution(0, s).is_err());
    }

    #[test]
    fn add_and_scale() {
        let g = toy::taxicab_game();
        let doubled = g.add(&g).unwrap();
        assert_eq!(doubled.value_of_mask(0b111), 20.0);
        let zero = g.scale(0.0);
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let h = toy::secret_holder_game();
        let sum = g.add(&h).unwrap();
        assert_eq!(sum.value_of_mask(0b001), 3.0);
        assert_eq!(sum.value_of_mask(0b111), 20.0);
    }

    #[test]
    fn add_requires_same_players() {
        let g = toy::taxicab_game();
        let other = Game::new(vec!["x".into(), "y".into()], vec![0.0; 4], "small").unwrap();
        assert!(g.add(&other).is_err());
        let relabeled = Game::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.0; 8],
            "relabel",
        )
        .unwrap();
        assert!(g.add(&relabeled).is_err());
    }

    #[test]
    fn restrict_taxicab_drops_player() {
        // Removing player 3 leaves C({1})=3, C({2})=7, C({1,2})=7.
        let g = toy::taxicab_game().restrict(2).unwrap();
        assert_eq!(g.player_count(), 2);
        assert_eq!(g.labels(), &["1".to_string(), "2".to_string()]);
        assert_eq!(g.values(), &[0.0, 3.0, 7.0, 7.0]);
    }

    #[test]
    fn restrict_commutes() {
        let g = toy::secret_holder_game();
        let a = g.restrict(0).unwrap().restrict(1).unwrap();
        let b = g.restrict(2).unwrap().restrict(0).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(g.restrict(5).is_err());
        let one = Game::new(vec!["p".into()], vec![0.0, 1.0], "single").unwrap();
        assert!(one.restrict(0).is_err());
    }

    #[test]
    fn monotonicity_witness() {
        assert!(toy::taxicab_game().is_monotonic());
        assert!(toy::secret_holder_game().is_monotonic());
        // C({1})=3 but C({1,2})=2.
        let g = Game::new(
            vec!["1".into(), "2".into()],
            vec![0.0, 3.0, 0.0, 2.0],
            "drop",
        )
        .unwrap();
        let (s, i) = g.monotonicity_violation(1e-12).unwrap();
        assert_eq!(s.bits(), 0b01);
        assert_eq!(i, 1);
        assert!(!g.is_monotonic());
    }

    #[test]
    fn permute_moves_labels_and_values() {
        let g = toy::taxicab_game();
        let p = g.permute(&[2, 0, 1]).unwrap();
        assert_eq!(
            p.labels(),
            &["3".to_string(), "1".to_string(), "2".to_string()]
        );
        // New player 0 is old player 2 (the dominant one): C({new 0}) = 10.
        assert_eq!(p.value_of_mask(0b001), 10.0);
        assert!(g.permute(&[0, 0, 1]).is_err());
    }
}
