use num_traits::ToPrimitive;

use serde::{Deserialize, Serialize};

use crate::arena::{play, ArenaError, Player, PlayerError};
use crate::budget::{BudgetExceeded, EvalBudget};
use crate::machine::{exact_te, nth_machine, run, Program, RunOutcome, TeLimits};

use super::growth::GrowthFn;
use super::players::VmPlayer;

#[derive(Debug, Clone)]
struct Candidate {
    program: Program,
    /// Consistency has been confirmed for every `j < checked`.
    checked: usize,
    disqualified: bool,
    /// Last run, on `(y_1..y_j)` with limit `f(j)`.
    last: Option<(usize, RunOutcome)>,
}

/// The lookalike predictor `p_f`.
///
/// Given evasions `x_1..x_n` it first rebuilds its own predictions
/// `y_1..y_n` (by answering every shorter prefix), then scans machines
/// `T_1..T_min(n, pool_cap)`. `T_i` qualifies when, for every `j < n` on
/// which it halts within `f(j)` steps on `(y_1..y_j)`, its output was
/// `x_{j+1}`, and it halts within `f(n)` steps on `(y_1..y_n)`. The output is
/// that last run's result for the least qualifying `i`, or 0 if none.
///
/// A machine that fails a consistency check can never qualify again, so it
/// is dropped for good. Each `(i, j)` run happens at most once per play.
pub struct LookalikePlayer {
    growth: GrowthFn,
    pool_cap: u64,
    step_cap: u64,
    budget: EvalBudget,
    bounds: Vec<u64>,
    xs: Vec<bool>,
    ys: Vec<bool>,
    pool: Vec<Candidate>,
    /// Index of the machine whose output decided each prediction, if any.
    decided_by: Vec<Option<u64>>,
}

impl LookalikePlayer {
    pub fn new(growth: GrowthFn, pool_cap: u64, step_cap: u64, budget: EvalBudget) -> Self {
        Self {
            growth,
            pool_cap,
            step_cap,
            budget,
            bounds: Vec::new(),
            xs: Vec::new(),
            ys: Vec::new(),
            pool: Vec::new(),
            decided_by: Vec::new(),
        }
    }

    /// Predictions made so far, `y_1, y_2, …`.
    pub fn predictions(&self) -> &[bool] {
        &self.ys
    }

    /// For each prediction, the machine index whose run supplied it.
    pub fn decided_by(&self) -> &[Option<u64>] {
        &self.decided_by
    }

    fn bound(&mut self, j: usize) -> Result<u64, PlayerError> {
        while self.bounds.len() <= j {
            let n = self.bounds.len() as u64;
            let v = self
                .growth
                .eval(n, &self.budget)
                .map_err(|source| PlayerError::Growth { n, source })?;
            let v =
                v.to_u64()
                    .filter(|v| *v <= self.step_cap)
                    .ok_or(PlayerError::GrowthTooLarge {
                        n,
                        cap: self.step_cap,
                    })?;
            self.bounds.push(v);
        }
        Ok(self.bounds[j])
    }

    fn outcome(&mut self, i: usize, j: usize) -> Result<RunOutcome, PlayerError> {
        if let Some((lj, out)) = self.pool[i].last {
            if lj == j {
                return Ok(out);
            }
        }
        let limit = self.bound(j)?;
        let out = run(&self.pool[i].program, &self.ys[..j], limit);
        self.pool[i].last = Some((j, out));
        Ok(out)
    }

    /// Computes `y_{n+1}` from `x_1..x_n` and `y_1..y_n`.
    fn decide(&mut self, n: usize) -> Result<(bool, Option<u64>), PlayerError> {
        let scan = (n as u64).min(self.pool_cap) as usize;
        while self.pool.len() < scan {
            let i = self.pool.len() as u64 + 1;
            self.pool.push(Candidate {
                program: nth_machine(i),
                checked: 0,
                disqualified: false,
                last: None,
            });
        }
        for i in 0..scan {
            if self.pool[i].disqualified {
                continue;
            }
            while self.pool[i].checked < n {
                let j = self.pool[i].checked;
                let out = self.outcome(i, j)?;
                if out.halted && out.output != self.xs[j] {
                    self.pool[i].disqualified = true;
                    break;
                }
                self.pool[i].checked += 1;
            }
            if self.pool[i].disqualified {
                continue;
            }
            let out = self.outcome(i, n)?;
            if out.halted {
                return Ok((out.output, Some(i as u64 + 1)));
            }
        }
        Ok((false, None))
    }
}

impl Player for LookalikePlayer {
    fn next(&mut self, evasions: &[bool]) -> Result<bool, PlayerError> {
        let n = evasions.len();
        let known = self.xs.len().min(n);
        if self.xs[..known] != evasions[..known] {
            // a different history: start over
            *self = Self::new(
                self.growth.clone(),
                self.pool_cap,
                self.step_cap,
                self.budget,
            );
        }
        if self.xs.len() < n {
            let have = self.xs.len();
            self.xs.extend_from_slice(&evasions[have..]);
        }
        while self.ys.len() <= n {
            let m = self.ys.len();
            let (y, by) = self.decide(m)?;
            self.ys.push(y);
            self.decided_by.push(by);
        }
        Ok(self.ys[n])
    }
}

/// `t_e(n) ≤ f(n)` for every `n` in `0..=end`.
pub fn te_dominated(
    p: &Program,
    f: &GrowthFn,
    end: u64,
    budget: &EvalBudget,
) -> Result<bool, BudgetExceeded> {
    for n in 0..=end {
        let bound = f.eval(n, budget)?.to_u64().unwrap_or(u64::MAX);
        let limits = TeLimits {
            max_n: n as u32,
            per_run_limit: bound,
        };
        if exact_te(p, n, &limits).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How `p_f` fared against `T_k` as the evader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub k: u64,
    pub mispredictions: u64,
    /// Mispredictions supplied by some machine's run, each of which rules
    /// that machine out for good.
    pub tricks: u64,
}

impl BoundCheck {
    pub fn within_k_minus_1(&self) -> bool {
        self.mispredictions < self.k
    }

    pub fn tricks_within_k_minus_1(&self) -> bool {
        self.tricks < self.k
    }
}

/// Plays `p_f` against `T_k` for `horizon` rounds and counts its errors.
pub fn misprediction_count(
    k: u64,
    f: &GrowthFn,
    horizon: u64,
    pool_cap: u64,
    budget: &EvalBudget,
) -> Result<BoundCheck, ArenaError> {
    let mut p = LookalikePlayer::new(f.clone(), pool_cap, u64::MAX, *budget);
    let mut e = VmPlayer::new(nth_machine(k), super::DEFAULT_VM_LIMIT);
    let t = play(&mut p, &mut e, horizon)?;
    let tricks = (0..t.x.len())
        .filter(|&r| t.x[r] != t.y[r] && p.decided_by()[r].is_some())
        .count() as u64;
    Ok(BoundCheck {
        k,
        mispredictions: t.mispredictions(),
        tricks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lookalike(f: &str) -> LookalikePlayer {
        LookalikePlayer::new(f.parse().unwrap(), 512, 1_000_000, EvalBudget::default())
    }

    #[test]
    fn empty_history_predicts_zero() {
        let mut p = lookalike("4*n+16");
        assert_eq!(p.next(&[]), Ok(false));
        assert_eq!(p.decided_by(), &[None]);
    }

    #[test]
    fn zero_bound_never_finds_a_lookalike() {
        let mut p = lookalike("0");
        let mut e = VmPlayer::new(Program::halt(true), 1000);
        let t = play(&mut p, &mut e, 60).unwrap();
        assert!(t.y.iter().all(|&y| !y));
    }

    #[test]
    fn learns_a_constant_one_machine() {
        let mut p = lookalike("n+2");
        let mut e = VmPlayer::new(Program::halt(true), 1000);
        let t = play(&mut p, &mut e, 80).unwrap();
        // T_31 is the first machine that halts with 1; it enters the pool at n = 31
        assert_eq!(t.last_loss_round(), Some(31));
        assert_eq!(p.decided_by()[31], Some(31));
    }

    #[test]
    fn reconstruction_matches_the_arena() {
        let mut p = lookalike("n+2");
        let mut e = VmPlayer::new(nth_machine(143), 1000);
        let t = play(&mut p, &mut e, 40).unwrap();
        assert_eq!(p.predictions(), t.y.as_slice());
        // answering a prefix again is consistent with the play
        let mut fresh = lookalike("n+2");
        assert_eq!(fresh.next(&t.x[..20]), Ok(t.y[20]));
    }

    #[test]
    fn halt_one_exceeds_its_index_bound() {
        let f: GrowthFn = "4*n+16".parse().unwrap();
        let b = EvalBudget::default();
        assert!(te_dominated(&Program::halt(true), &f, 16, &b).unwrap());
        let c = misprediction_count(31, &f, 200, 512, &b).unwrap();
        // every halting T_i with i < 31 outputs 0 and is ruled out by the
        // evasions before it can predict, so all 31 misses are the default 0
        assert_eq!((c.mispredictions, c.tricks), (31, 0));
        assert!(!c.within_k_minus_1() && c.tricks_within_k_minus_1());
    }

    #[test]
    fn slow_machines_are_not_dominated() {
        let f: GrowthFn = "n".parse().unwrap();
        // HALT 1 takes one step on the empty input
        assert!(!te_dominated(&Program::halt(true), &f, 4, &EvalBudget::default()).unwrap());
    }
}
