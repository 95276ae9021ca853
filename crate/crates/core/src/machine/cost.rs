use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::run::run_traced;
use super::{run, Program};

/// Caps for worst-case cost measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TeLimits {
    /// Largest input length measured; `2^max_n` inputs in the worst case.
    pub max_n: u32,
    pub per_run_limit: u64,
}

impl Default for TeLimits {
    fn default() -> Self {
        Self {
            max_n: 16,
            per_run_limit: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum TeError {
    #[error("run on input {} did not halt within {limit} steps", render(input))]
    LimitExceeded { input: Vec<bool>, limit: u64 },
    #[error("input length {n} exceeds the configured maximum {max}")]
    InputTooLong { n: u64, max: u32 },
}

fn render(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "⟨⟩".into();
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Worst-case step count of `p` over every input of length `n`.
///
/// Inputs are visited in lexicographic order. After each run, all inputs that
/// share the prefix the run actually inspected are skipped, since they
/// produce the same run. The first failure reported is therefore the
/// lexicographically first non-halting input.
pub fn exact_te(p: &Program, n: u64, limits: &TeLimits) -> Result<u64, TeError> {
    if n > u64::from(limits.max_n) {
        return Err(TeError::InputTooLong {
            n,
            max: limits.max_n,
        });
    }
    let n = n as usize;
    let mut input = vec![false; n];
    let mut worst = 0;
    loop {
        let (out, inspected) = run_traced(p, &input, limits.per_run_limit);
        if !out.halted {
            return Err(TeError::LimitExceeded {
                input,
                limit: limits.per_run_limit,
            });
        }
        worst = worst.max(out.steps);
        // advance the inspected prefix as a binary counter, zero the rest
        for bit in &mut input[inspected..] {
            *bit = false;
        }
        let mut k = inspected;
        loop {
            if k == 0 {
                return Ok(worst);
            }
            k -= 1;
            input[k] = !input[k];
            if input[k] {
                break;
            }
        }
    }
}

/// Reference implementation: one run per input, no skipping.
pub fn exact_te_brute_force(p: &Program, n: u64, limits: &TeLimits) -> Result<u64, TeError> {
    if n > u64::from(limits.max_n) {
        return Err(TeError::InputTooLong {
            n,
            max: limits.max_n,
        });
    }
    let mut worst = 0;
    for v in 0u64..(1 << n) {
        let input: Vec<bool> = (0..n).rev().map(|k| (v >> k) & 1 == 1).collect();
        let out = run(p, &input, limits.per_run_limit);
        if !out.halted {
            return Err(TeError::LimitExceeded {
                input,
                limit: limits.per_run_limit,
            });
        }
        worst = worst.max(out.steps);
    }
    Ok(worst)
}

/// Exact worst-case costs over a contiguous window of input lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostProfile {
    pub start: u64,
    pub values: Vec<u64>,
    /// Whether a single run per length was used because the program was
    /// confirmed not to read input values.
    pub hint_accepted: bool,
}

impl CostProfile {
    pub fn get(&self, n: u64) -> Option<u64> {
        let k = n.checked_sub(self.start)?;
        self.values.get(usize::try_from(k).ok()?).copied()
    }

    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64 - 1
    }

    pub fn window(&self) -> RangeInclusive<u64> {
        self.start..=self.end()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,te\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.start + k as u64, v));
        }
        out
    }
}

/// `exact_te` at every length in `window`. An oblivious hint is checked
/// against the instruction list and ignored when the program reads input.
pub fn te_profile(
    p: &Program,
    window: RangeInclusive<u64>,
    limits: &TeLimits,
    oblivious_hint: bool,
) -> Result<CostProfile, TeError> {
    let hint_accepted = oblivious_hint && p.is_value_oblivious();
    let start = *window.start();
    let mut values = Vec::new();
    for n in window {
        let v = if hint_accepted {
            if n > u64::from(limits.max_n) {
                return Err(TeError::InputTooLong {
                    n,
                    max: limits.max_n,
                });
            }
            let input = vec![false; n as usize];
            let out = run(p, &input, limits.per_run_limit);
            if !out.halted {
                return Err(TeError::LimitExceeded {
                    input,
                    limit: limits.per_run_limit,
                });
            }
            out.steps
        } else {
            exact_te(p, n, limits)?
        };
        values.push(v);
    }
    Ok(CostProfile {
        start,
        values,
        hint_accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{assemble, nth_machine, Instr::*};

    fn limits(per_run_limit: u64) -> TeLimits {
        TeLimits {
            max_n: 16,
            per_run_limit,
        }
    }

    #[test]
    fn halt_costs_one() {
        let p = Program::halt(false);
        for n in 0..=8 {
            assert_eq!(exact_te(&p, n, &TeLimits::default()), Ok(1));
        }
        let prof = te_profile(&p, 0..=8, &TeLimits::default(), true).unwrap();
        assert_eq!(prof.values, vec![1; 9]);
        assert!(prof.hint_accepted);
    }

    #[test]
    fn false_hint_is_rejected() {
        let p = assemble(&[BranchIn(2), Halt(false), MoveIn, Halt(true)]).unwrap();
        let prof = te_profile(&p, 0..=3, &TeLimits::default(), true).unwrap();
        assert!(!prof.hint_accepted);
        assert_eq!(prof.values, vec![2, 3, 3, 3]);
    }

    #[test]
    fn two_bit_maximum_over_four_inputs() {
        // reads both bits, taking a longer path on 1s
        let p = assemble(&[
            BranchIn(3),
            MoveIn,
            BranchEof(6),
            MoveIn,
            BranchIn(1),
            MoveWR,
            Halt(false),
        ])
        .unwrap();
        let inputs = [[false, false], [false, true], [true, false], [true, true]];
        let max = inputs.iter().map(|i| run(&p, i, 1000).steps).max().unwrap();
        assert_eq!(exact_te(&p, 2, &limits(1000)), Ok(max));
    }

    #[test]
    fn scan_all_input_cost_formula() {
        // the toggled cell turns BRANCH_W into an unconditional jump
        let p = assemble(&[ToggleW, BranchEof(4), MoveIn, BranchW(1), Halt(false)]).unwrap();
        // 1 + n·3 + 1 (eof branch) + 1 (halt)
        for n in 0..=8u64 {
            assert_eq!(exact_te(&p, n, &limits(1000)), Ok(3 * n + 3));
            assert_eq!(exact_te_brute_force(&p, n, &limits(1000)), Ok(3 * n + 3));
        }
    }

    #[test]
    fn reports_first_non_halting_input() {
        // loops forever when the second bit is 1
        let p = assemble(&[MoveIn, BranchIn(3), Halt(false), ToggleW, BranchW(4)]).unwrap();
        match exact_te(&p, 3, &limits(100)) {
            Err(TeError::LimitExceeded { input, .. }) => {
                assert_eq!(input, vec![false, true, false])
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            exact_te(&p, 17, &limits(100)),
            Err(TeError::InputTooLong { n: 17, max: 16 })
        );
    }

    #[test]
    fn skipping_matches_brute_force_on_enumerated_machines() {
        for i in (1..20_000u64).step_by(97) {
            let p = nth_machine(i);
            for n in 0..=5 {
                assert_eq!(
                    exact_te(&p, n, &limits(300)),
                    exact_te_brute_force(&p, n, &limits(300)),
                    "machine {i}, n {n}"
                );
            }
        }
    }
}
