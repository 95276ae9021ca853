//! The prediction game: an evader emits bits, a predictor tries to match
//! them, each seeing only the other's past outputs.
//!
//! Round `n` (1-based) is played as `x_n = e(y_1..y_{n-1})` and
//! `y_n = p(x_1..x_{n-1})`; the predictor wins it iff `x_n = y_n`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::BudgetExceeded;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum PlayerError {
    #[error("step limit of {limit} exhausted")]
    StepLimit { limit: u64 },
    #[error("growth function exceeded its budget at n={n}: {source}")]
    Growth { n: u64, source: BudgetExceeded },
    #[error("growth function value at n={n} exceeds the step bound cap {cap}")]
    GrowthTooLarge { n: u64, cap: u64 },
}

impl PlayerError {
    /// True for failures of the evaluation budget rather than of a machine.
    pub fn is_budget(&self) -> bool {
        !matches!(self, PlayerError::StepLimit { .. })
    }
}

/// One side of the game. `next` receives the opponent's complete history so
/// far and returns this player's next bit. Implementations may cache work
/// between calls but must answer as a pure function of `opponent`.
pub trait Player {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError>;
}

impl<P: Player + ?Sized> Player for Box<P> {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError> {
        (**self).next(opponent)
    }
}

/// Adapter for stateless players.
pub struct FnPlayer<F>(pub F);

impl<F: FnMut(&[bool]) -> bool> Player for FnPlayer<F> {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError> {
        Ok((self.0)(opponent))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("evader failed in round {round}: {source}")]
    EvaderTimeout { round: u64, source: PlayerError },
    #[error("predictor failed in round {round}: {source}")]
    PredictorTimeout { round: u64, source: PlayerError },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("window {window} not in 1..={horizon}")]
    WindowTooLarge { window: u64, horizon: u64 },
    #[error("round {round} not in 1..={horizon}")]
    RoundOutOfRange { round: u64, horizon: u64 },
}

impl ArenaError {
    pub fn player_error(&self) -> Option<&PlayerError> {
        match self {
            ArenaError::EvaderTimeout { source, .. }
            | ArenaError::PredictorTimeout { source, .. } => Some(source),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    Predictor,
    Evader,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Predictor => "predictor",
            Winner::Evader => "evader",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript {
    /// Evader outputs.
    pub x: Vec<bool>,
    /// Predictor outputs.
    pub y: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnVerdict {
    pub learned: bool,
    pub last_loss_round: Option<u64>,
    pub horizon: u64,
    pub window: u64,
}

pub fn play(
    p: &mut dyn Player,
    e: &mut dyn Player,
    horizon: u64,
) -> Result<Transcript, ArenaError> {
    if horizon == 0 {
        return Err(ArenaError::ZeroHorizon);
    }
    let mut t = Transcript {
        x: Vec::with_capacity(horizon as usize),
        y: Vec::with_capacity(horizon as usize),
    };
    for round in 1..=horizon {
        let x = e
            .next(&t.y)
            .map_err(|source| ArenaError::EvaderTimeout { round, source })?;
        let y = p
            .next(&t.x)
            .map_err(|source| ArenaError::PredictorTimeout { round, source })?;
        t.x.push(x);
        t.y.push(y);
    }
    Ok(t)
}

impl Transcript {
    pub fn horizon(&self) -> u64 {
        self.x.len() as u64
    }

    pub fn round_winner(&self, round: u64) -> Result<Winner, ArenaError> {
        let horizon = self.horizon();
        if round == 0 || round > horizon {
            return Err(ArenaError::RoundOutOfRange { round, horizon });
        }
        let k = (round - 1) as usize;
        Ok(if self.x[k] == self.y[k] {
            Winner::Predictor
        } else {
            Winner::Evader
        })
    }

    pub fn mispredictions(&self) -> u64 {
        self.x.iter().zip(&self.y).filter(|(a, b)| a != b).count() as u64
    }

    pub fn last_loss_round(&self) -> Option<u64> {
        self.x
            .iter()
            .zip(&self.y)
            .rposition(|(a, b)| a != b)
            .map(|k| k as u64 + 1)
    }

    /// The predictor learned iff it won every round in `(H − W, H]`.
    pub fn learned(&self, window: u64) -> Result<LearnVerdict, ArenaError> {
        let horizon = self.horizon();
        if window == 0 || window > horizon {
            return Err(ArenaError::WindowTooLarge { window, horizon });
        }
        let last_loss_round = self.last_loss_round();
        Ok(LearnVerdict {
            learned: last_loss_round.is_none_or(|r| r <= horizon - window),
            last_loss_round,
            horizon,
            window,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,x,y,winner\n");
        for (k, (x, y)) in self.x.iter().zip(&self.y).enumerate() {
            let winner = if x == y {
                Winner::Predictor
            } else {
                Winner::Evader
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                k + 1,
                u8::from(*x),
                u8::from(*y),
                winner
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(b: bool) -> FnPlayer<impl FnMut(&[bool]) -> bool> {
        FnPlayer(move |_: &[bool]| b)
    }

    #[test]
    fn constant_games() {
        let t = play(&mut constant(true), &mut constant(false), 10).unwrap();
        assert_eq!(t.mispredictions(), 10);
        let t = play(&mut constant(false), &mut constant(false), 10).unwrap();
        assert_eq!(t.mispredictions(), 0);
        assert!(t.learned(10).unwrap().learned);
        assert_eq!(
            play(&mut constant(false), &mut constant(false), 0),
            Err(ArenaError::ZeroHorizon)
        );
    }

    #[test]
    fn interleaving_follows_histories() {
        // evader echoes the predictor's previous bit, predictor copies the evader's last bit
        let mut e = FnPlayer(|y: &[bool]| y.last().copied().unwrap_or(true));
        let mut p = FnPlayer(|x: &[bool]| x.last().copied().unwrap_or(false));
        let t = play(&mut p, &mut e, 4).unwrap();
        assert_eq!(t.x, vec![true, false, true, false]);
        assert_eq!(t.y, vec![false, true, false, true]);
    }

    fn with_losses(h: usize, losses: &[usize]) -> Transcript {
        let x = vec![false; h];
        let mut y = vec![false; h];
        for &r in losses {
            y[r - 1] = true;
        }
        Transcript { x, y }
    }

    #[test]
    fn learned_window_boundaries() {
        // the final W rounds are (H−W, H]
        let t = with_losses(100, &[3, 40]);
        let v = t.learned(61).unwrap();
        assert!(!v.learned);
        assert_eq!(v.last_loss_round, Some(40));
        assert!(t.learned(60).unwrap().learned);
        let t = with_losses(100, &[41]);
        assert!(!t.learned(60).unwrap().learned);
        assert!(t.learned(59).unwrap().learned);
        for w in 1..=100 {
            let scan = (100 - w + 1..=100).all(|r| t.round_winner(r).unwrap() == Winner::Predictor);
            assert_eq!(t.learned(w).unwrap().learned, scan);
        }
        let t = with_losses(10, &[10]);
        assert!(!t.learned(1).unwrap().learned);
        assert!(with_losses(10, &[]).learned(7).unwrap().learned);
        assert!(t.learned(11).is_err());
        assert!(t.learned(0).is_err());
    }

    #[test]
    fn winners_partition_rounds() {
        let t = with_losses(12, &[1, 5, 6]);
        let mut counts = [0u64; 2];
        for r in 1..=12 {
            match t.round_winner(r).unwrap() {
                Winner::Predictor => counts[0] += 1,
                Winner::Evader => counts[1] += 1,
            }
        }
        assert_eq!(counts, [9, 3]);
        assert!(t.round_winner(0).is_err());
        assert!(t.round_winner(13).is_err());
    }

    #[test]
    fn csv_export() {
        let t = with_losses(2, &[2]);
        assert_eq!(
            t.to_csv(),
            "round,x,y,winner\n1,0,0,predictor\n2,0,1,evader\n"
        );
    }
}
