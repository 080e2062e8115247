//! Coalitions as bitmasks over player indices.

use serde::{Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::MAX_PLAYERS;

/// A subset of the player set `{0, .., d-1}`, stored as a bitmask.
///
/// Bit `i` set means player `i` is in the coalition. `d` is carried along so
/// the full set and complements are well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    bits: u64,
    d: usize,
}

impl Coalition {
    /// The empty coalition in a `d`-player game.
    pub fn empty(d: usize) -> Self {
        Coalition { bits: 0, d }
    }

    /// The grand coalition `{0, .., d-1}`.
    pub fn full(d: usize) -> Self {
        Coalition {
            bits: Self::full_mask(d),
            d,
        }
    }

    pub fn full_mask(d: usize) -> u64 {
        (1u64 << d) - 1
    }

    /// Build from a raw bitmask; rejects bits at or above `d`.
    pub fn from_bits(bits: u64, d: usize) -> Result<Self> {
        if d == 0 || d > MAX_PLAYERS {
            return Err(Error::invalid(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {d}"
            )));
        }
        if bits >= (1u64 << d) {
            return Err(Error::invalid(format!(
                "coalition mask {bits:#b} has members outside 0..{d}"
            )));
        }
        Ok(Coalition { bits, d })
    }

    /// Build from explicit member indices.
    pub fn from_members(members: &[usize], d: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &i in members {
            if i >= d {
                return Err(Error::invalid(format!(
                    "player index {i} out of range for {d}-player game"
                )));
            }
            bits |= 1 << i;
        }
        Coalition::from_bits(bits, d)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn player_count(&self) -> usize {
        self.d
    }

    pub fn size(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.d && (self.bits >> player) & 1 == 1
    }

    pub fn with(&self, player: usize) -> Self {
        Coalition {
            bits: self.bits | (1 << player),
            d: self.d,
        }
    }

    pub fn without(&self, player: usize) -> Self {
        Coalition {
            bits: self.bits & !(1 << player),
            d: self.d,
        }
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> Vec<usize> {
        (0..self.d).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(serializer)
    }
}
