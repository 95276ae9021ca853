//! Evaders with a prescribed output pattern and a prescribed cost.
//!
//! The program ignores input values and only measures the input length.
//! Lengths are bucketed by a stride `s`; bucket `j` holds the lengths
//! `n` with `⌈n/s⌉ = j`. The layout is
//!
//! ```text
//! block j (0 ≤ j ≤ J):  BRANCH_EOF e_j ; MOVE_IN × s
//! catch-all:            lengths past the last block
//! chain b:              MOVE_WL × L_b ; HALT b      (one chain per output bit)
//! ```
//!
//! `e_j` points `D_j` instructions before the halt of chain `b_j`, and
//! `MOVE_WL` on cell 0 does nothing, so a length in bucket `j` costs exactly
//! `j(1+s) + 2 + D_j` steps. `D_j` is chosen as large as the target allows.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, BudgetLimit, EvalBudget};
use crate::machine::{
    assemble, te_profile, AssembleError, CostProfile, Instr, Program, TeError, TeLimits,
};

use super::growth::GrowthFn;

/// An eventually periodic bit sequence indexed from 0: `prefix` then
/// `cycle` repeated forever. Text form `prefix|cycle` or just `cycle`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    prefix: Vec<bool>,
    cycle: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad pattern {0:?}: expected bits, optionally `prefix|cycle`, with a nonempty cycle")]
pub struct PatternParseError(pub String);

impl Pattern {
    pub fn new(prefix: Vec<bool>, cycle: Vec<bool>) -> Option<Self> {
        (!cycle.is_empty()).then_some(Self { prefix, cycle })
    }

    pub fn constant(b: bool) -> Self {
        Self {
            prefix: Vec::new(),
            cycle: vec![b],
        }
    }

    pub fn bit(&self, n: u64) -> bool {
        let a = self.prefix.len() as u64;
        if n < a {
            self.prefix[n as usize]
        } else {
            self.cycle[((n - a) % self.cycle.len() as u64) as usize]
        }
    }

    pub fn constant_bit(&self) -> Option<bool> {
        let b = self.cycle[0];
        self.prefix
            .iter()
            .chain(&self.cycle)
            .all(|&x| x == b)
            .then_some(b)
    }
}

fn bits_text(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            write!(f, "{}", bits_text(&self.cycle))
        } else {
            write!(f, "{}|{}", bits_text(&self.prefix), bits_text(&self.cycle))
        }
    }
}

impl FromStr for Pattern {
    type Err = PatternParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PatternParseError(s.to_string());
        let parse = |t: &str| -> Result<Vec<bool>, PatternParseError> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(err()),
                })
                .collect()
        };
        let (prefix, cycle) = match s.split_once('|') {
            Some((p, c)) => (parse(p)?, parse(c)?),
            None => (Vec::new(), parse(s)?),
        };
        Pattern::new(prefix, cycle).ok_or_else(err)
    }
}

serde_via_text!(Pattern);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddingLimits {
    /// Upper bound on `D_j`; larger targets are under-shot.
    pub max_padding: u64,
    /// Largest stride tried for constant patterns.
    pub max_stride: u64,
}

impl Default for PaddingLimits {
    fn default() -> Self {
        Self {
            max_padding: 1 << 16,
            max_stride: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaddedError {
    #[error("target {target} at n={n} is below the construction floor {floor}")]
    UnreachableTarget { n: u64, floor: u64, target: u64 },
    #[error("target function failed at n={n}: {source}")]
    Target { n: u64, source: BudgetExceeded },
    #[error("cost verification failed: {0}")]
    Verification(#[from] TeError),
    #[error("declared cost {declared} differs from measured {measured} at n={n}")]
    Mismatch {
        n: u64,
        declared: u64,
        measured: u64,
    },
    #[error(transparent)]
    Assemble(#[from] AssembleError),
}

/// A padded evader with its machine-verified cost profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaddedEvader {
    pub program: Program,
    pub pattern: String,
    pub target: GrowthFn,
    /// `None` when the bare `HALT b` program was used.
    pub stride: Option<u64>,
    pub cost: CostProfile,
    /// `c_low · target(n) ≤ t_e(n) ≤ target(n)` on the window.
    pub c_low: f64,
}

struct Plan {
    stride: u64,
    last_block: u64,
    padding: Vec<u64>,
}

fn bucket(n: u64, s: u64) -> u64 {
    n.div_ceil(s)
}

fn plan(
    pattern: &Pattern,
    targets: &[(u64, u64)],
    s: u64,
    limits: &PaddingLimits,
) -> Result<Plan, PaddedError> {
    let end = targets.last().map_or(0, |t| t.0);
    let prefix = if pattern.constant_bit().is_some() {
        0
    } else {
        pattern.prefix.len() as u64
    };
    let last_block = bucket(end, s).max(prefix);
    let mut padding = vec![0u64; last_block as usize + 1];
    let mut lowest = vec![u64::MAX; last_block as usize + 1];
    for &(n, t) in targets {
        let j = bucket(n, s) as usize;
        lowest[j] = lowest[j].min(t);
    }
    for (j, pad) in padding.iter_mut().enumerate() {
        if lowest[j] == u64::MAX {
            continue;
        }
        let floor = j as u64 * (1 + s) + 2;
        if lowest[j] < floor {
            let n = targets
                .iter()
                .find(|&&(n, t)| bucket(n, s) as usize == j && t == lowest[j])
                .map_or(0, |t| t.0);
            return Err(PaddedError::UnreachableTarget {
                n,
                floor,
                target: lowest[j],
            });
        }
        *pad = (lowest[j] - floor).min(limits.max_padding);
    }
    Ok(Plan {
        stride: s,
        last_block,
        padding,
    })
}

fn build(pattern: &Pattern, plan: &Plan) -> Result<Program, AssembleError> {
    let s = plan.stride as usize;
    let blocks = plan.last_block as usize + 1;
    let out_bit = |j: usize| pattern.bit(j as u64 * plan.stride);
    let constant = pattern.constant_bit();
    let cycle_len = pattern.cycle.len();

    let catch_all_len = match constant {
        Some(_) => 1,
        None => 1 + 2 * cycle_len + 1,
    };
    let mut chain_len = [0usize; 2];
    for (j, &pad) in plan.padding.iter().enumerate() {
        let b = usize::from(out_bit(j));
        chain_len[b] = chain_len[b].max(pad as usize);
    }
    let catch_all = blocks * (1 + s);
    let chain0 = catch_all + catch_all_len;
    let halt0 = chain0 + chain_len[0];
    let chain1 = halt0 + 1;
    let halt1 = chain1 + chain_len[1];
    let halt_of = |b: bool| if b { halt1 } else { halt0 };

    let mut code = Vec::with_capacity(halt1 + 1);
    for j in 0..blocks {
        code.push(Instr::BranchEof(
            halt_of(out_bit(j)) - plan.padding[j] as usize,
        ));
        code.extend(std::iter::repeat_n(Instr::MoveIn, s));
    }
    match constant {
        Some(b) => code.push(Instr::Halt(b)),
        None => {
            // cell 0 := 1 makes BRANCH_W an unconditional jump
            code.push(Instr::ToggleW);
            let loop_start = code.len();
            let head = blocks as u64;
            let a = pattern.prefix.len() as u64;
            let r0 = ((head - a) % cycle_len as u64) as usize;
            for t in 0..cycle_len {
                let r = (r0 + t) % cycle_len;
                code.push(Instr::BranchEof(halt_of(pattern.cycle[r])));
                code.push(Instr::MoveIn);
            }
            code.push(Instr::BranchW(loop_start));
        }
    }
    code.extend(std::iter::repeat_n(Instr::MoveWL, chain_len[0]));
    code.push(Instr::Halt(false));
    code.extend(std::iter::repeat_n(Instr::MoveWL, chain_len[1]));
    code.push(Instr::Halt(true));
    debug_assert_eq!(code.len(), halt1 + 1);
    assemble(&code)
}

/// Builds an evader whose `n`-th output is `pattern.bit(n)` for every `n`,
/// and whose worst-case cost satisfies `c_low · target(n) ≤ t_e(n) ≤
/// target(n)` on `window`. The cost is declared from the layout and then
/// checked against a full measurement.
pub fn make_padded_evader(
    pattern: &Pattern,
    target: &GrowthFn,
    window: RangeInclusive<u64>,
    te: &TeLimits,
    limits: &PaddingLimits,
    budget: &EvalBudget,
) -> Result<PaddedEvader, PaddedError> {
    let mut targets = Vec::new();
    for n in window.clone() {
        let t = match target.eval(n, budget) {
            Ok(v) => v.to_u64().unwrap_or(u64::MAX),
            // values only grow, so a bit overflow certifies a huge target
            Err(e) if e.limit == BudgetLimit::Bits => u64::MAX,
            Err(source) => return Err(PaddedError::Target { n, source }),
        };
        targets.push((n, t));
    }

    let strides: Vec<u64> = match pattern.constant_bit() {
        Some(_) => (1..=limits.max_stride.max(1)).collect(),
        None => vec![1],
    };
    let mut first_err = None;
    let mut chosen = None;
    for s in strides {
        match plan(pattern, &targets, s, limits) {
            Ok(p) => {
                chosen = Some(p);
                break;
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }

    let (program, stride, declared) = match (chosen, pattern.constant_bit()) {
        (Some(plan), _) => {
            let program = build(pattern, &plan)?;
            let declared: Vec<u64> = window
                .clone()
                .map(|n| {
                    let j = bucket(n, plan.stride);
                    j * (1 + plan.stride) + 2 + plan.padding[j as usize]
                })
                .collect();
            (program, Some(plan.stride), declared)
        }
        (None, Some(b)) if targets.iter().all(|&(_, t)| t >= 1) => {
            (Program::halt(b), None, vec![1; targets.len()])
        }
        (None, _) => return Err(first_err.expect("at least one stride was tried")),
    };

    let measured = te_profile(&program, window.clone(), te, true)?;
    for (k, n) in window.enumerate() {
        if measured.values[k] != declared[k] {
            return Err(PaddedError::Mismatch {
                n,
                declared: declared[k],
                measured: measured.values[k],
            });
        }
    }
    let c_low = targets
        .iter()
        .zip(&declared)
        .map(|(&(_, t), &c)| c as f64 / t as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(PaddedEvader {
        program,
        pattern: pattern.to_string(),
        target: target.clone(),
        stride,
        cost: measured,
        c_low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::zoo::players::{ConstantPlayer, VmPlayer};

    fn make(pattern: &str, target: &str, end: u64) -> Result<PaddedEvader, PaddedError> {
        make_padded_evader(
            &pattern.parse().unwrap(),
            &target.parse().unwrap(),
            0..=end,
            &TeLimits::default(),
            &PaddingLimits::default(),
            &EvalBudget::default(),
        )
    }

    fn targets(f: &str, end: u64) -> Vec<u64> {
        let f: GrowthFn = f.parse().unwrap();
        (0..=end)
            .map(|n| f.eval(n, &EvalBudget::default()).unwrap().to_u64().unwrap())
            .collect()
    }

    #[test]
    fn pattern_text() {
        let p: Pattern = "1|01".parse().unwrap();
        assert_eq!(
            (0..5).map(|n| p.bit(n)).collect::<Vec<_>>(),
            vec![true, false, true, false, true]
        );
        assert_eq!(p.to_string(), "1|01");
        assert_eq!("0".parse::<Pattern>().unwrap().constant_bit(), Some(false));
        assert!("1|".parse::<Pattern>().is_err());
        assert!("2".parse::<Pattern>().is_err());
    }

    #[test]
    fn linear_constant_zero() {
        let e = make("0", "n+10", 10).unwrap();
        let t = targets("n+10", 10);
        for (k, &c) in e.cost.values.iter().enumerate() {
            assert!(c <= t[k] && c as f64 >= e.c_low * t[k] as f64);
        }
        assert!(e.c_low > 0.5);
        assert!(e.cost.hint_accepted);
    }

    #[test]
    fn quadratic_period_two_is_exact() {
        // n^2 + 6 from n = 2 on, 6 before
        let e = make("01", "diag(5;0;poly2)", 10).unwrap();
        assert_eq!(e.stride, Some(1));
        assert_eq!(e.cost.values, targets("diag(5;0;poly2)", 10));
        assert_eq!(e.c_low, 1.0);
        assert!(matches!(
            make("01", "scaled(n)", 10),
            Err(PaddedError::UnreachableTarget { n: 0, .. })
        ));
    }

    #[test]
    fn unreachable_and_trivial_targets() {
        assert!(matches!(
            make("01", "1", 5),
            Err(PaddedError::UnreachableTarget { .. })
        ));
        let e = make("0", "1", 5).unwrap();
        assert_eq!(e.cost.values, vec![1; 6]);
        assert!(matches!(
            make("0", "0", 5),
            Err(PaddedError::UnreachableTarget { .. })
        ));
    }

    #[test]
    fn output_follows_pattern_beyond_the_window() {
        for pat in ["0", "1", "01", "1|0", "110|10"] {
            let e = make(pat, "4*n+20", 8).unwrap();
            let pattern: Pattern = pat.parse().unwrap();
            let mut ev = VmPlayer::new(e.program.clone(), 10_000);
            let t = play(&mut ConstantPlayer(false), &mut ev, 120).unwrap();
            for (n, &x) in t.x.iter().enumerate() {
                assert_eq!(x, pattern.bit(n as u64), "{pat} at {n}");
            }
        }
    }
}
