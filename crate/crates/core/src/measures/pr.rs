//! Primitive-recursive terms, a canonical enumeration of them, and the
//! functions `f_m(k) = max_{0<i≤m} max_{j≤k} g_i(j)` built on it.
//!
//! Terms are enumerated by size, then by constructor in the order `Succ`,
//! `Zero`, `Proj`, `Comp`, `PrimRec`, then by subterms in the same order.
//! Sizes: `Succ` and `Zero` are 1, `Proj(i, k)` is `k`, and `Comp`/`PrimRec`
//! are one more than the sum of their parts. Every size class is finite.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, EvalBudget, Meter};

/// Name of the enumeration scheme, recorded in reports.
pub const ENUMERATION_SCHEME: &str = "pr-size-lex-v1(succ<zero<proj<comp<primrec)";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrTerm {
    /// Unary successor.
    Succ,
    /// Unary constant zero.
    Zero,
    /// `Proj { i, k }` returns the `i`-th of `k` arguments, `1 ≤ i ≤ k`.
    Proj { i: usize, k: usize },
    /// `h(g_1(x⃗), …, g_m(x⃗))`.
    Comp(Box<PrTerm>, Vec<PrTerm>),
    /// `R(0, x⃗) = f(x⃗)`, `R(y+1, x⃗) = g(y, R(y, x⃗), x⃗)`.
    PrimRec(Box<PrTerm>, Box<PrTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrError {
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("ill-formed term: {0}")]
    IllFormed(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

impl PrTerm {
    pub fn arity(&self) -> usize {
        match self {
            PrTerm::Succ | PrTerm::Zero => 1,
            PrTerm::Proj { k, .. } => *k,
            PrTerm::Comp(_, gs) => gs.first().map_or(0, PrTerm::arity),
            PrTerm::PrimRec(f, _) => f.arity() + 1,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PrTerm::Succ | PrTerm::Zero => 1,
            PrTerm::Proj { k, .. } => *k,
            PrTerm::Comp(h, gs) => 1 + h.size() + gs.iter().map(PrTerm::size).sum::<usize>(),
            PrTerm::PrimRec(f, g) => 1 + f.size() + g.size(),
        }
    }

    /// Checks arity consistency throughout the term.
    pub fn check(&self) -> Result<(), PrError> {
        match self {
            PrTerm::Succ | PrTerm::Zero => Ok(()),
            PrTerm::Proj { i, k } => {
                if *i >= 1 && i <= k {
                    Ok(())
                } else {
                    Err(PrError::IllFormed(format!("projection {i} of {k}")))
                }
            }
            PrTerm::Comp(h, gs) => {
                h.check()?;
                if gs.is_empty() || gs.len() != h.arity() {
                    return Err(PrError::IllFormed(format!(
                        "composition of arity-{} outer with {} inners",
                        h.arity(),
                        gs.len()
                    )));
                }
                let k = gs[0].arity();
                for g in gs {
                    g.check()?;
                    if g.arity() != k {
                        return Err(PrError::IllFormed("inner arities differ".into()));
                    }
                }
                Ok(())
            }
            PrTerm::PrimRec(f, g) => {
                f.check()?;
                g.check()?;
                if g.arity() != f.arity() + 2 {
                    return Err(PrError::IllFormed(format!(
                        "recursion with base arity {} and step arity {}",
                        f.arity(),
                        g.arity()
                    )));
                }
                Ok(())
            }
        }
    }

    /// The term's index in the canonical enumeration.
    pub fn index(&self) -> Option<u64> {
        pr_index(self)
    }
}

impl fmt::Display for PrTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrTerm::Succ => write!(f, "S"),
            PrTerm::Zero => write!(f, "Z"),
            PrTerm::Proj { i, k } => write!(f, "P{i}_{k}"),
            PrTerm::Comp(h, gs) => {
                write!(f, "C({h}")?;
                for g in gs {
                    write!(f, ",{g}")?;
                }
                write!(f, ")")
            }
            PrTerm::PrimRec(base, step) => write!(f, "R({base},{step})"),
        }
    }
}

/// Standard semantics over big naturals. Each node visited costs one
/// expansion; every intermediate value is checked against `max_bits`.
pub fn pr_eval(t: &PrTerm, args: &[BigUint], budget: &EvalBudget) -> Result<BigUint, PrError> {
    t.check()?;
    if args.len() != t.arity() {
        return Err(PrError::Arity {
            expected: t.arity(),
            got: args.len(),
        });
    }
    let mut meter = Meter::new(*budget);
    for a in args {
        meter.observe_bits(a.bits())?;
    }
    Ok(eval_in(t, args, &mut meter)?)
}

fn eval_in(t: &PrTerm, args: &[BigUint], meter: &mut Meter) -> Result<BigUint, BudgetExceeded> {
    meter.tick()?;
    match t {
        PrTerm::Succ => meter.check(&args[0] + 1u32),
        PrTerm::Zero => Ok(BigUint::zero()),
        PrTerm::Proj { i, .. } => Ok(args[i - 1].clone()),
        PrTerm::Comp(h, gs) => {
            let inner = gs
                .iter()
                .map(|g| eval_in(g, args, meter))
                .collect::<Result<Vec<_>, _>>()?;
            eval_in(h, &inner, meter)
        }
        PrTerm::PrimRec(f, g) => {
            let (y, rest) = args.split_first().expect("recursion has arity ≥ 2");
            let mut acc = eval_in(f, rest, meter)?;
            // each round costs at least one expansion, so an oversized y trips the budget
            let rounds = y.to_u64().unwrap_or(u64::MAX);
            let mut step_args = Vec::with_capacity(rest.len() + 2);
            for t in 0..rounds {
                step_args.clear();
                step_args.push(BigUint::from(t));
                step_args.push(acc);
                step_args.extend_from_slice(rest);
                acc = eval_in(g, &step_args, meter)?;
            }
            Ok(acc)
        }
    }
}

/// Evaluates `t` at the constant tuple `(j, …, j)` of its arity.
pub fn pr_eval_unary(t: &PrTerm, j: &BigUint, budget: &EvalBudget) -> Result<BigUint, PrError> {
    let args = vec![j.clone(); t.arity()];
    pr_eval(t, &args, budget)
}

struct Enumerator {
    /// `by_size[s]` holds every well-formed term of size `s`, in order.
    by_size: Vec<Vec<PrTerm>>,
    flat: Vec<PrTerm>,
    index: HashMap<PrTerm, u64>,
}

impl Enumerator {
    fn new() -> Self {
        Self {
            by_size: vec![Vec::new()],
            flat: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn of_arity(&self, size: usize, arity: usize) -> impl Iterator<Item = &PrTerm> {
        self.by_size[size]
            .iter()
            .filter(move |t| t.arity() == arity)
    }

    fn grow(&mut self) {
        let s = self.by_size.len();
        let mut out = Vec::new();
        if s == 1 {
            out.push(PrTerm::Succ);
            out.push(PrTerm::Zero);
        }
        out.extend((1..=s).map(|i| PrTerm::Proj { i, k: s }));
        for sh in 1..s.saturating_sub(1) {
            let rest = s - 1 - sh;
            for h in &self.by_size[sh] {
                let m = h.arity();
                for k in 1..=rest {
                    for sizes in compositions(rest, m) {
                        let pools: Vec<Vec<&PrTerm>> = sizes
                            .iter()
                            .map(|&z| self.of_arity(z, k).collect())
                            .collect();
                        for_each_tuple(&pools, &mut |gs| {
                            out.push(PrTerm::Comp(
                                Box::new(h.clone()),
                                gs.iter().map(|g| (*g).clone()).collect(),
                            ));
                        });
                    }
                }
            }
        }
        for sf in 1..s.saturating_sub(1) {
            let sg = s - 1 - sf;
            for f in &self.by_size[sf] {
                for g in self.of_arity(sg, f.arity() + 2) {
                    out.push(PrTerm::PrimRec(Box::new(f.clone()), Box::new(g.clone())));
                }
            }
        }
        for t in &out {
            self.index.insert(t.clone(), self.flat.len() as u64 + 1);
            self.flat.push(t.clone());
        }
        self.by_size.push(out);
    }

    fn nth(&mut self, i: u64) -> PrTerm {
        while (self.flat.len() as u64) < i {
            self.grow();
        }
        self.flat[(i - 1) as usize].clone()
    }

    fn position(&mut self, t: &PrTerm) -> Option<u64> {
        t.check().ok()?;
        while self.by_size.len() <= t.size() {
            self.grow();
        }
        self.index.get(t).copied()
    }
}

/// Ordered ways to write `total` as `parts` positive summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut tail in compositions(total - first, parts - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn for_each_tuple<'a>(pools: &[Vec<&'a PrTerm>], emit: &mut dyn FnMut(&[&'a PrTerm])) {
    fn go<'a>(
        pools: &[Vec<&'a PrTerm>],
        acc: &mut Vec<&'a PrTerm>,
        emit: &mut dyn FnMut(&[&'a PrTerm]),
    ) {
        match pools.split_first() {
            None => emit(acc),
            Some((first, rest)) => {
                for &t in first {
                    acc.push(t);
                    go(rest, acc, emit);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::new(), emit)
}

fn enumerator() -> &'static Mutex<Enumerator> {
    static ENUM: OnceLock<Mutex<Enumerator>> = OnceLock::new();
    ENUM.get_or_init(|| Mutex::new(Enumerator::new()))
}

/// The `i`-th term, `i ≥ 1`.
///
/// # Panics
/// If `i == 0`.
pub fn pr_enumerate(i: u64) -> PrTerm {
    assert!(i >= 1, "enumeration starts at 1");
    enumerator().lock().expect("enumerator lock").nth(i)
}

/// Inverse of [`pr_enumerate`]; `None` for ill-formed terms.
pub fn pr_index(t: &PrTerm) -> Option<u64> {
    enumerator().lock().expect("enumerator lock").position(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("g_{i}({j}) exceeded the budget: {source}")]
pub struct HibbardError {
    pub i: u64,
    pub j: u64,
    pub source: BudgetExceeded,
}

/// `f_m(k) = max_{0<i≤m} max_{j≤k} g_i(j)`, each `g_i(j)` evaluated under
/// its own copy of `budget`.
pub fn hibbard_f(m: u64, k: u64, budget: &EvalBudget) -> Result<BigUint, HibbardError> {
    assert!(m >= 1, "f_m is defined for m ≥ 1");
    let mut best = BigUint::zero();
    for i in 1..=m {
        let t = pr_enumerate(i);
        for j in 0..=k {
            let v = pr_eval_unary(&t, &BigUint::from(j), budget).map_err(|e| match e {
                PrError::Budget(source) => HibbardError { i, j, source },
                other => unreachable!("enumerated terms are well-formed: {other}"),
            })?;
            best = best.max(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn budget() -> EvalBudget {
        EvalBudget::new(1_000_000, 4096).unwrap()
    }

    /// add(y, x) = y + x
    fn addition() -> PrTerm {
        PrTerm::PrimRec(
            Box::new(PrTerm::Proj { i: 1, k: 1 }),
            Box::new(PrTerm::Comp(
                Box::new(PrTerm::Succ),
                vec![PrTerm::Proj { i: 2, k: 3 }],
            )),
        )
    }

    #[test]
    fn evaluates_basic_terms() {
        assert_eq!(pr_eval(&PrTerm::Succ, &[b(4)], &budget()).unwrap(), b(5));
        assert_eq!(
            pr_eval(&addition(), &[b(3), b(4)], &budget()).unwrap(),
            b(7)
        );
        assert_eq!(pr_eval_unary(&addition(), &b(6), &budget()).unwrap(), b(12));
        assert!(matches!(
            pr_eval(&addition(), &[b(3)], &budget()),
            Err(PrError::Arity {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn recursion_trips_the_budget() {
        let small = EvalBudget::new(50, 4096).unwrap();
        assert!(matches!(
            pr_eval(&addition(), &[b(1000), b(1)], &small),
            Err(PrError::Budget(_))
        ));
    }

    #[test]
    fn enumeration_begins_with_atoms() {
        assert_eq!(pr_enumerate(1), PrTerm::Succ);
        assert_eq!(pr_enumerate(2), PrTerm::Zero);
        assert_eq!(pr_enumerate(3), PrTerm::Proj { i: 1, k: 1 });
        assert_eq!(pr_enumerate(4), PrTerm::Proj { i: 1, k: 2 });
        assert!(addition().index().is_some());
    }

    #[test]
    fn enumeration_round_trips() {
        for i in 1..=2000 {
            let t = pr_enumerate(i);
            t.check().unwrap();
            assert_eq!(pr_index(&t), Some(i), "{t}");
        }
    }

    #[test]
    fn enumeration_is_ordered_by_size() {
        let sizes: Vec<usize> = (1..=500).map(|i| pr_enumerate(i).size()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn compositions_are_complete() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert!(compositions(1, 2).is_empty());
    }

    #[test]
    fn hibbard_f_examples() {
        // g_1 is the successor, so f_1(k) = k + 1
        assert_eq!(hibbard_f(1, 0, &budget()).unwrap(), b(1));
        assert_eq!(hibbard_f(1, 9, &budget()).unwrap(), b(10));
        for m in 1..6 {
            for k in 0..6 {
                let v = hibbard_f(m, k, &budget()).unwrap();
                assert!(v <= hibbard_f(m + 1, k, &budget()).unwrap());
                assert!(v <= hibbard_f(m, k + 1, &budget()).unwrap());
            }
        }
    }
}
