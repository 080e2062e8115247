//! JSON game files: a complete coalition-value table keyed by player names.
//!
//! Coalition members are serialized by name rather than index, so files are
//! order-insensitive and self-describing. Loading validates completeness
//! (all `2^d` coalitions exactly once) and normalizes the empty coalition to
//! zero, recording the subtracted offset; saving re-adds the offset.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::game::Game;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: Vec<String>,
    pub coalitions: Vec<CoalitionEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionEntry {
    pub members: Vec<String>,
    pub value: f64,
}

fn members_label(members: &[String]) -> String {
    format!("{{{}}}", members.join(","))
}

impl GameFile {
    pub fn from_game(game: &Game) -> GameFile {
        let d = game.player_count();
        let coalitions = (0..1u64 << d)
            .map(|mask| CoalitionEntry {
                members: (0..d)
                    .filter(|i| (mask >> i) & 1 == 1)
                    .map(|i| game.label(i).to_string())
                    .collect(),
                value: game.raw_value_of_mask(mask),
            })
            .collect();
        GameFile {
            players: game.labels().to_vec(),
            coalitions,
        }
    }

    pub fn into_game(self, tag: impl Into<String>) -> Result<Game> {
        let d = self.players.len();
        if d == 0 || d > crate::MAX_PLAYERS {
            return Err(Error::validation(format!(
                "player list must have 1..={} names, got {d}",
                crate::MAX_PLAYERS
            )));
        }
        let index_of = |name: &str| self.players.iter().position(|p| p == name);
        let mut raw = vec![0.0f64; 1 << d];
        let mut seen = vec![false; 1 << d];
        for entry in &self.coalitions {
            let mut mask = 0u64;
            for name in &entry.members {
                let Some(i) = index_of(name) else {
                    return Err(Error::validation(format!(
                        "coalition {}: unknown player name {name:?}",
                        members_label(&entry.members)
                    )));
                };
                mask |= 1 << i;
            }
            if mask.count_ones() as usize != entry.members.len() {
                return Err(Error::validation(format!(
                    "coalition {}: repeated member",
                    members_label(&entry.members)
                )));
            }
            if seen[mask as usize] {
                return Err(Error::validation(format!(
                    "duplicate coalition {}",
                    members_label(&entry.members)
                )));
            }
            if !entry.value.is_finite() {
                return Err(Error::validation(format!(
                    "coalition {}: non-finite value",
                    members_label(&entry.members)
                )));
            }
            seen[mask as usize] = true;
            raw[mask as usize] = entry.value;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            let members: Vec<String> = (0..d)
                .filter(|i| (missing >> i) & 1 == 1)
                .map(|i| self.players[i].clone())
                .collect();
            return Err(Error::validation(format!(
                "missing coalition {}",
                members_label(&members)
            )));
        }
        Game::new(self.players, raw, tag)
    }
}

pub fn save_game<W: Write>(game: &Game, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &GameFile::from_game(game))?;
    Ok(())
}

pub fn load_game<R: Read>(reader: R, tag: impl Into<String>) -> Result<Game> {
    let file: GameFile = serde_json::from_reader(reader)
        .map_err(|e| Error::validation(format!("malformed game file: {e}")))?;
    file.into_game(tag)
}

pub fn save_game_to_path(game: &Game, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    save_game(game, std::io::BufWriter::new(f))
}

pub fn load_game_from_path(path: impl AsRef<Path>) -> Result<Game> {
    let path = path.as_ref();
    let tag = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "game".to_string());
    let f = std::fs::File::open(path)?;
    load_game(std::io::BufReader::new(f), tag)
}
