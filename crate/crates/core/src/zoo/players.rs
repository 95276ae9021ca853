use crate::arena::{Player, PlayerError};
use crate::machine::{run, Program};

pub struct ConstantPlayer(pub bool);

impl Player for ConstantPlayer {
    fn next(&mut self, _: &[bool]) -> Result<bool, PlayerError> {
        Ok(self.0)
    }
}

/// Predicts the evader's most recent bit, 0 on an empty history.
pub struct CopyLastPlayer;

impl Player for CopyLastPlayer {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError> {
        Ok(opponent.last().copied().unwrap_or(false))
    }
}

/// Runs a machine on the opponent's history; exceeding the step limit is an
/// error, never a guess.
pub struct VmPlayer {
    program: Program,
    limit: u64,
}

impl VmPlayer {
    pub fn new(program: Program, limit: u64) -> Self {
        Self { program, limit }
    }
}

impl Player for VmPlayer {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError> {
        let out = run(&self.program, opponent, self.limit);
        if out.halted {
            Ok(out.output)
        } else {
            Err(PlayerError::StepLimit { limit: self.limit })
        }
    }
}

/// An evader that plays `1 − p(x_1..x_n)` against a target predictor `p`,
/// where `x_1..x_n` are its own earlier outputs. Its own history does not
/// depend on the opponent, so it is rebuilt from a private instance of the
/// target and cached.
pub struct AntiPlayer {
    target: Box<dyn Player>,
    own: Vec<bool>,
}

impl AntiPlayer {
    pub fn new(target: Box<dyn Player>) -> Self {
        Self {
            target,
            own: Vec::new(),
        }
    }
}

impl Player for AntiPlayer {
    fn next(&mut self, opponent: &[bool]) -> Result<bool, PlayerError> {
        let n = opponent.len();
        while self.own.len() <= n {
            let guess = self.target.next(&self.own)?;
            self.own.push(!guess);
        }
        Ok(self.own[n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;

    #[test]
    fn anti_constant_plays_the_other_bit() {
        let mut e = AntiPlayer::new(Box::new(ConstantPlayer(true)));
        let t = play(&mut ConstantPlayer(true), &mut e, 20).unwrap();
        assert!(t.x.iter().all(|&x| !x));
        assert_eq!(t.mispredictions(), 20);
    }

    #[test]
    fn anti_copylast_alternates() {
        let mut e = AntiPlayer::new(Box::new(CopyLastPlayer));
        let t = play(&mut CopyLastPlayer, &mut e, 50).unwrap();
        // x_1 = 1 − 0, then always the complement of its own last bit
        let mut expected = vec![true];
        for k in 1..50 {
            expected.push(!expected[k - 1]);
        }
        assert_eq!(t.x, expected);
        assert_eq!(t.mispredictions(), 50);
    }

    #[test]
    fn vm_player_reports_timeouts() {
        let looping = crate::machine::assemble(&[
            crate::machine::Instr::ToggleW,
            crate::machine::Instr::BranchW(1),
        ])
        .unwrap();
        let mut p = VmPlayer::new(looping, 10);
        assert_eq!(p.next(&[]), Err(PlayerError::StepLimit { limit: 10 }));
    }
}
