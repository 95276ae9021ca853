//! Slow-growing, fast-growing (Wainer) and Hardy hierarchies up to ε₀.
//!
//! Defining rules, with `λ[n]` the standard fundamental sequence:
//!
//! | kind | zero | successor | limit |
//! |------|------|-----------|-------|
//! | slow | `g_0(n) = 0` | `g_{α+1}(n) = g_α(n) + 1` | `g_λ(n) = g_{λ[n]}(n)` |
//! | fast | `h_0(n) = n + 1` | `h_{α+1}(n) = h_αⁿ(n)` | `h_λ(n) = h_{λ[n]}(n)` |
//! | Hardy | `H_0(n) = n` | `H_{α+1}(n) = H_α(n + 1)` | `H_λ(n) = H_{λ[n]}(n)` |
//!
//! The slow-growing evaluator does not step through these rules one at a
//! time. It relies on two identities that follow from them by transfinite
//! induction: `g_{α+β}(n) = g_α(n) + g_β(n)` whenever `α + β` is already in
//! Cantor normal form, and `g_{ω^β}(n) = n^{g_β(n)}` (with `0^0 = 1`). The
//! fast-growing evaluator runs an explicit frame stack and short-cuts the
//! iterates of `h_0` and `h_1` (`h_0^k(x) = x + k`, `h_1^k(x) = x·2^k`).
//! Every shortcut counts as one expansion.
//!
//! All values only grow along an evaluation, so a [`BudgetLimit::Bits`]
//! failure certifies that the true value has more than `max_bits` bits.

use std::fmt;
use std::num::NonZeroUsize;
use std::ops::RangeInclusive;
use std::str::FromStr;

use lru::LruCache;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, BudgetLimit, EvalBudget, Meter};
use crate::ordinal::{Ordinal, OrdinalKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyKind {
    #[serde(rename = "slow")]
    SlowGrowing,
    #[serde(rename = "fast")]
    FastGrowing,
    Hardy,
}

impl fmt::Display for HierarchyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HierarchyKind::SlowGrowing => "slow",
            HierarchyKind::FastGrowing => "fast",
            HierarchyKind::Hardy => "hardy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown hierarchy {0:?} (expected slow, fast or hardy)")]
pub struct UnknownHierarchy(pub String);

impl FromStr for HierarchyKind {
    type Err = UnknownHierarchy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "slow" | "slow-growing" => Ok(HierarchyKind::SlowGrowing),
            "fast" | "fast-growing" | "wainer" => Ok(HierarchyKind::FastGrowing),
            "hardy" => Ok(HierarchyKind::Hardy),
            other => Err(UnknownHierarchy(other.to_string())),
        }
    }
}

type Key = (HierarchyKind, Ordinal, BigUint);

#[derive(Debug, Clone)]
struct Entry {
    value: BigUint,
    expansions: u64,
    peak_bits: u64,
}

enum Frame {
    Iterate {
        level: Ordinal,
        remaining: BigUint,
    },
    Store {
        level: Ordinal,
        arg: BigUint,
        start: u64,
        saved_peak: u64,
    },
}

/// Evaluates hierarchy levels, optionally memoizing `(kind, α, n)` results in
/// a bounded LRU cache.
///
/// A cache hit charges the meter exactly what the original computation cost,
/// so a memoized evaluator returns the same outcome as an unmemoized one
/// under every budget.
pub struct HierarchyEvaluator {
    cache: Option<LruCache<Key, Entry>>,
}

impl Default for HierarchyEvaluator {
    fn default() -> Self {
        Self::new(4096)
    }
}

impl HierarchyEvaluator {
    pub fn new(capacity: usize) -> Self {
        Self {
            cache: NonZeroUsize::new(capacity).map(LruCache::new),
        }
    }

    pub fn unmemoized() -> Self {
        Self { cache: None }
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.len())
    }

    pub fn eval(
        &mut self,
        kind: HierarchyKind,
        alpha: &Ordinal,
        n: &BigUint,
        budget: &EvalBudget,
    ) -> Result<BigUint, BudgetExceeded> {
        let mut meter = Meter::new(*budget);
        meter.observe_bits(n.bits())?;
        match kind {
            HierarchyKind::SlowGrowing => self.slow(alpha, n, &mut meter),
            HierarchyKind::FastGrowing => self.fast(alpha, n, &mut meter),
            HierarchyKind::Hardy => self.hardy(alpha, n, &mut meter),
        }
    }

    fn lookup(&mut self, key: &Key, meter: &mut Meter) -> Option<Result<BigUint, BudgetExceeded>> {
        let hit = self.cache.as_mut()?.get(key)?.clone();
        Some(
            meter
                .tick_n(hit.expansions)
                .and_then(|_| meter.observe_bits(hit.peak_bits))
                .map(|_| hit.value),
        )
    }

    fn memo(
        &mut self,
        key: Key,
        meter: &mut Meter,
        compute: impl FnOnce(&mut Self, &mut Meter) -> Result<BigUint, BudgetExceeded>,
    ) -> Result<BigUint, BudgetExceeded> {
        if self.cache.is_none() {
            return compute(self, meter);
        }
        if let Some(hit) = self.lookup(&key, meter) {
            return hit;
        }
        let start = meter.expansions();
        let saved = meter.peak_bits();
        meter.set_peak_bits(0);
        let result = compute(self, meter);
        let sub_peak = meter.peak_bits();
        meter.set_peak_bits(saved.max(sub_peak));
        let value = result?;
        if let Some(cache) = self.cache.as_mut() {
            cache.put(
                key,
                Entry {
                    value: value.clone(),
                    expansions: meter.expansions() - start,
                    peak_bits: sub_peak,
                },
            );
        }
        Ok(value)
    }

    fn slow(
        &mut self,
        alpha: &Ordinal,
        n: &BigUint,
        meter: &mut Meter,
    ) -> Result<BigUint, BudgetExceeded> {
        let key = (HierarchyKind::SlowGrowing, alpha.clone(), n.clone());
        self.memo(key, meter, |this, meter| {
            meter.tick()?;
            let terms = match alpha {
                Ordinal::Epsilon0 => {
                    let next = fundamental_charged(alpha, n, meter)?;
                    return this.slow(&next, n, meter);
                }
                Ordinal::Cnf(terms) => terms,
            };
            let mut acc = BigUint::zero();
            for term in terms {
                let power = if term.exponent().is_zero() {
                    BigUint::one()
                } else {
                    let e = this.slow(term.exponent(), n, meter)?;
                    meter.pow(n, &e)?
                };
                let scaled = meter.mul(&power, term.coefficient())?;
                acc = meter.check(acc + scaled)?;
            }
            Ok(acc)
        })
    }

    fn hardy(
        &mut self,
        alpha: &Ordinal,
        n: &BigUint,
        meter: &mut Meter,
    ) -> Result<BigUint, BudgetExceeded> {
        let key = (HierarchyKind::Hardy, alpha.clone(), n.clone());
        self.memo(key, meter, |_, meter| {
            let mut x = n.clone();
            let mut cur = alpha.clone();
            loop {
                let (limit, k) = cur.split_finite_tail();
                if !k.is_zero() {
                    meter.tick()?;
                    x = meter.check(x + k)?;
                    cur = limit;
                }
                if cur.is_zero() {
                    return Ok(x);
                }
                meter.tick()?;
                cur = fundamental_charged(&cur, &x, meter)?;
            }
        })
    }

    fn fast(
        &mut self,
        alpha: &Ordinal,
        n: &BigUint,
        meter: &mut Meter,
    ) -> Result<BigUint, BudgetExceeded> {
        let mut value = n.clone();
        let mut stack = vec![Frame::Iterate {
            level: alpha.clone(),
            remaining: BigUint::one(),
        }];
        while let Some(frame) = stack.pop() {
            let (level, remaining) = match frame {
                Frame::Store {
                    level,
                    arg,
                    start,
                    saved_peak,
                } => {
                    let sub_peak = meter.peak_bits();
                    meter.set_peak_bits(saved_peak.max(sub_peak));
                    if let Some(cache) = self.cache.as_mut() {
                        cache.put(
                            (HierarchyKind::FastGrowing, level, arg),
                            Entry {
                                value: value.clone(),
                                expansions: meter.expansions() - start,
                                peak_bits: sub_peak,
                            },
                        );
                    }
                    continue;
                }
                Frame::Iterate { level, remaining } => (level, remaining),
            };
            if remaining.is_zero() {
                continue;
            }
            match level.as_finite().and_then(|k| k.to_u8()) {
                Some(0) => {
                    meter.tick()?;
                    value = meter.check(value + remaining)?;
                    continue;
                }
                Some(1) => {
                    meter.tick()?;
                    value = meter.shl(&value, &remaining)?;
                    continue;
                }
                _ => {}
            }
            stack.push(Frame::Iterate {
                level: level.clone(),
                remaining: remaining - 1u32,
            });
            let key = (HierarchyKind::FastGrowing, level, value);
            if let Some(hit) = self.lookup(&key, meter) {
                value = hit?;
                continue;
            }
            let (level, arg) = (key.1, key.2);
            value = arg.clone();
            if self.cache.is_some() {
                stack.push(Frame::Store {
                    level: level.clone(),
                    arg,
                    start: meter.expansions(),
                    saved_peak: meter.peak_bits(),
                });
                meter.set_peak_bits(value.bits());
            }
            let mut lvl = level;
            while lvl.classify() == OrdinalKind::Limit {
                meter.tick()?;
                lvl = fundamental_charged(&lvl, &value, meter)?;
            }
            meter.tick()?;
            match lvl.classify() {
                OrdinalKind::Zero => value = meter.check(value + 1u32)?,
                _ => {
                    let pred = lvl.predecessor().expect("successor level");
                    stack.push(Frame::Iterate {
                        level: pred,
                        remaining: value.clone(),
                    });
                }
            }
        }
        Ok(value)
    }
}

/// `λ[i]`, charging one expansion per ω in the tower when `λ = ε₀`.
fn fundamental_charged(
    lambda: &Ordinal,
    i: &BigUint,
    meter: &mut Meter,
) -> Result<Ordinal, BudgetExceeded> {
    if lambda.is_epsilon0() {
        let height = i.to_u64().unwrap_or(u64::MAX);
        meter.tick_n(height)?;
    }
    lambda.fundamental_sequence(i).map_err(|_| BudgetExceeded {
        limit: BudgetLimit::Expansions,
        expansions: meter.expansions(),
    })
}

/// One-shot, unmemoized evaluation of a hierarchy level.
pub fn eval_hierarchy(
    kind: HierarchyKind,
    alpha: &Ordinal,
    n: &BigUint,
    budget: &EvalBudget,
) -> Result<BigUint, BudgetExceeded> {
    HierarchyEvaluator::unmemoized().eval(kind, alpha, n, budget)
}

/// Convenience for small arguments.
pub fn eval_at(
    kind: HierarchyKind,
    alpha: &Ordinal,
    n: u64,
    budget: &EvalBudget,
) -> Result<BigUint, BudgetExceeded> {
    eval_hierarchy(kind, alpha, &BigUint::from(n), budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no tabulated closed form for g_{0}")]
pub struct UnknownClosedForm(pub String);

/// Closed forms tabulated for the slow-growing hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClosedForm {
    Constant(u64),
    Shift(u64),
    Double,
    Power(u32),
    SelfPower,
    Mixed,
    DoubleSelfPower,
    Tower,
}

impl ClosedForm {
    fn lookup(alpha: &Ordinal) -> Option<Self> {
        if let Some(m) = alpha.as_finite() {
            return m.to_u64().map(ClosedForm::Constant);
        }
        let text = alpha.to_string();
        if let Some(rest) = text.strip_prefix("w+") {
            if let Ok(m) = rest.parse() {
                return Some(ClosedForm::Shift(m));
            }
        }
        Some(match text.as_str() {
            "w" => ClosedForm::Shift(0),
            "w*2" => ClosedForm::Double,
            "w^2" => ClosedForm::Power(2),
            "w^3" => ClosedForm::Power(3),
            "w^w" => ClosedForm::SelfPower,
            "w^(w*3+1)+w+5" => ClosedForm::Mixed,
            "w^(w^w)" => ClosedForm::DoubleSelfPower,
            "e0" => ClosedForm::Tower,
            _ => return None,
        })
    }

    /// The tabulated value, or `None` when it is wider than `max_bits`.
    fn value(self, n: u64, max_bits: u64) -> Option<BigUint> {
        let big = BigUint::from(n);
        let fits = |v: BigUint| (v.bits() <= max_bits).then_some(v);
        match self {
            ClosedForm::Constant(m) => fits(m.into()),
            ClosedForm::Shift(m) => fits(big + m),
            ClosedForm::Double => fits(big * 2u32),
            ClosedForm::Power(k) => fits(big.pow(k)),
            ClosedForm::SelfPower => capped_pow(n, &BigUint::from(n), max_bits),
            ClosedForm::Mixed => {
                let p = capped_pow(n, &BigUint::from(3 * n + 1), max_bits)?;
                fits(p + n + 5u32)
            }
            ClosedForm::DoubleSelfPower => {
                let inner = capped_pow(n, &BigUint::from(n), 64)?;
                capped_pow(n, &inner, max_bits)
            }
            ClosedForm::Tower => {
                // n+1 copies of n, right-associated
                let mut acc = BigUint::from(n);
                for _ in 0..n {
                    acc = capped_pow(n, &acc, max_bits)?;
                }
                fits(acc)
            }
        }
    }
}

fn capped_pow(base: u64, exp: &BigUint, max_bits: u64) -> Option<BigUint> {
    if base <= 1 || exp.is_zero() {
        return Some(if exp.is_zero() {
            BigUint::one()
        } else {
            BigUint::from(base)
        });
    }
    let approx = exp.to_f64()? * (base as f64).log2();
    if approx > max_bits as f64 + 1.0 {
        return None;
    }
    let v = BigUint::from(base).pow(exp.to_u32()?);
    (v.bits() <= max_bits).then_some(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormPoint {
    pub n: u64,
    /// `None` when the tabulated value is wider than the bit budget.
    pub expected: Option<BigUint>,
    pub actual: Result<BigUint, BudgetExceeded>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub ordinal: String,
    pub points: Vec<ClosedFormPoint>,
}

impl ClosedFormReport {
    pub fn all_match(&self) -> bool {
        self.points.iter().all(|p| p.matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ClosedFormPoint> {
        self.points.iter().filter(|p| !p.matches)
    }
}

/// Compares slow-growing evaluation against the tabulated closed form over a
/// window. Values wider than `budget.max_bits` must come back as a bit-budget
/// failure to count as a match.
pub fn closed_form_check(
    alpha: &Ordinal,
    window: RangeInclusive<u64>,
    budget: &EvalBudget,
) -> Result<ClosedFormReport, UnknownClosedForm> {
    let form = ClosedForm::lookup(alpha).ok_or_else(|| UnknownClosedForm(alpha.to_string()))?;
    let mut evaluator = HierarchyEvaluator::default();
    let points = window
        .map(|n| {
            let expected = form.value(n, budget.max_bits);
            let actual =
                evaluator.eval(HierarchyKind::SlowGrowing, alpha, &BigUint::from(n), budget);
            let matches = match (&expected, &actual) {
                (Some(e), Ok(a)) => e == a,
                (None, Err(err)) => err.limit == BudgetLimit::Bits,
                _ => false,
            };
            ClosedFormPoint {
                n,
                expected,
                actual,
                matches,
            }
        })
        .collect();
    Ok(ClosedFormReport {
        ordinal: alpha.to_string(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn big() -> EvalBudget {
        EvalBudget::new(10_000_000, 1 << 20).unwrap()
    }

    fn ev(kind: HierarchyKind, a: &str, n: u64) -> u64 {
        eval_at(kind, &o(a), n, &big()).unwrap().to_u64().unwrap()
    }

    use HierarchyKind::*;

    #[test]
    fn slow_growing_examples() {
        assert_eq!(ev(SlowGrowing, "w", 7), 7);
        assert_eq!(ev(SlowGrowing, "w*2", 5), 10);
        assert_eq!(ev(SlowGrowing, "w^w", 3), 27);
        assert_eq!(ev(SlowGrowing, "w^(w*3+1)+w+5", 2), 135);
        assert_eq!(ev(SlowGrowing, "e0", 2), 16);
        assert_eq!(ev(SlowGrowing, "e0", 1), 1);
        assert_eq!(ev(SlowGrowing, "e0", 0), 0);
        assert_eq!(ev(SlowGrowing, "w", 0), 0);
    }

    #[test]
    fn fast_and_hardy_examples() {
        assert_eq!(ev(FastGrowing, "0", 5), 6);
        assert_eq!(ev(FastGrowing, "1", 3), 6);
        assert_eq!(ev(FastGrowing, "2", 3), 24);
        assert_eq!(ev(Hardy, "w", 4), 8);
        assert_eq!(ev(Hardy, "0", 4), 4);
        assert_eq!(ev(FastGrowing, "w", 2), 8);
    }

    #[test]
    fn slow_epsilon0_at_three_exceeds_small_budget() {
        let err = eval_at(
            SlowGrowing,
            &o("e0"),
            3,
            &EvalBudget::new(1000, 4096).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err.limit, BudgetLimit::Bits);
    }

    #[test]
    fn expansions_budget_trips() {
        let err = eval_at(
            FastGrowing,
            &o("w^w"),
            4,
            &EvalBudget::new(50, 1 << 20).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err.limit, BudgetLimit::Expansions);
        assert_eq!(err.expansions, 50);
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form_check(&o("w^2"), 0..=8, &big()).unwrap();
        assert!(r.all_match());
        assert_eq!(r.points[8].expected, Some(BigUint::from(64u32)));
        let r = closed_form_check(&o("w^(w^w)"), 0..=3, &big()).unwrap();
        assert!(r.all_match(), "{r:?}");
        let r = closed_form_check(&o("w^3"), 0..=0, &big()).unwrap();
        assert_eq!(r.points[0].actual, Ok(BigUint::zero()));
        assert!(closed_form_check(&o("w^4+w"), 0..=3, &big()).is_err());
    }

    #[test]
    fn memoized_evaluator_reuses_entries() {
        let mut e = HierarchyEvaluator::new(128);
        let a = e
            .eval(FastGrowing, &o("3"), &BigUint::from(2u32), &big())
            .unwrap();
        assert!(e.cached_entries() > 0);
        let b = e
            .eval(FastGrowing, &o("3"), &BigUint::from(2u32), &big())
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, BigUint::from(2048u32));
    }

    #[test]
    fn parses_kind_names() {
        assert_eq!("slow".parse::<HierarchyKind>().unwrap(), SlowGrowing);
        assert_eq!("hardy".parse::<HierarchyKind>().unwrap(), Hardy);
        assert!("medium".parse::<HierarchyKind>().is_err());
    }
}
