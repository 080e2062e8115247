//! Closed-form 3-player games with known Shapley values.

use crate::error::{Error, Result};
use crate::game::Game;
use crate::MAX_PLAYERS;

/// Taxicab-style payoff: one dominant player sets the worth of any coalition
/// it joins. `C(S) = 10` if player 3 is in `S`, else `7` if player 2 is, else
/// `3` if player 1 is, else `0`.
pub fn taxicab_game() -> Game {
    let labels = vec!["1".to_string(), "2".to_string(), "3".to_string()];
    let raw = (0u64..8)
        .map(|mask| {
            if mask & 0b100 != 0 {
                10.0
            } else if mask & 0b010 != 0 {
                7.0
            } else if mask & 0b001 != 0 {
                3.0
            } else {
                0.0
            }
        })
        .collect();
    Game::new(labels, raw, "taxicab").expect("static table is valid")
}

/// Secret-holder payoff: player 1 is worthless alone but lifts any team it
/// joins to the maximum payoff.
pub fn secret_holder_game() -> Game {
    let labels = vec!["1".to_string(), "2".to_string(), "3".to_string()];
    // mask order: {}, {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, {1,2,3}
    let raw = vec![0.0, 0.0, 7.0, 10.0, 7.0, 10.0, 7.0, 10.0];
    Game::new(labels, raw, "secret-holder").expect("static table is valid")
}

/// Extend a game with one certified null player that adds zero worth to
/// every coalition.
pub fn with_dummy(game: &Game, label: impl Into<String>) -> Result<Game> {
    let d = game.player_count();
    if d + 1 > MAX_PLAYERS {
        return Err(Error::capacity(format!(
            "cannot extend beyond {MAX_PLAYERS} players"
        )));
    }
    let label = label.into();
    let mut labels = game.labels().to_vec();
    labels.push(label);
    let low = (1u64 << d) - 1;
    let raw = (0..1u64 << (d + 1))
        .map(|mask| game.raw_value_of_mask(mask & low))
        .collect();
    Game::new(labels, raw, format!("{}+dummy", game.tag()))
}
