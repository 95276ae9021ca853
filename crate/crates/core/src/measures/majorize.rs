//! Windowed majorization: `f ≻ g` iff `f(n) > g(n)` for all large `n`,
//! checked on `0..=end`.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::budget::{BudgetLimit, EvalBudget};
use crate::machine::CostProfile;
use crate::zoo::GrowthFn;

use super::MeasureError;

/// A sequence value, exact or certified from below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqValue {
    Exact(BigUint),
    AtLeast(BigUint),
}

/// Anything that can be compared pointwise: growth functions and measured
/// cost profiles.
pub trait NatSeq {
    fn value(&self, n: u64, budget: &EvalBudget) -> Result<SeqValue, MeasureError>;
}

impl NatSeq for GrowthFn {
    fn value(&self, n: u64, budget: &EvalBudget) -> Result<SeqValue, MeasureError> {
        match self.eval(n, budget) {
            Ok(v) => Ok(SeqValue::Exact(v)),
            Err(e) if e.limit == BudgetLimit::Bits => match self.overflow_floor_bits(budget) {
                Some(bits) => Ok(SeqValue::AtLeast(BigUint::one() << bits)),
                None => Err(e.into()),
            },
            Err(e) => Err(e.into()),
        }
    }
}

impl NatSeq for CostProfile {
    fn value(&self, n: u64, _: &EvalBudget) -> Result<SeqValue, MeasureError> {
        self.get(n)
            .map(|v| SeqValue::Exact(v.into()))
            .ok_or(MeasureError::OutsideProfile {
                n,
                start: self.start,
                end: self.end(),
            })
    }
}

impl<T: NatSeq + ?Sized> NatSeq for &T {
    fn value(&self, n: u64, budget: &EvalBudget) -> Result<SeqValue, MeasureError> {
        (**self).value(n, budget)
    }
}

/// `Some(a > b)` when decidable from the (possibly partial) values.
pub(crate) fn greater(a: &SeqValue, b: &SeqValue) -> Option<bool> {
    use SeqValue::*;
    match (a, b) {
        (Exact(x), Exact(y)) => Some(x > y),
        (AtLeast(x), Exact(y)) => (x > y).then_some(true),
        (Exact(x), AtLeast(y)) => (x <= y).then_some(false),
        (AtLeast(_), AtLeast(_)) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MajorizationVerdict {
    /// `f(n) > g(n)` for every `n₀ < n ≤ end`, and that suffix is long
    /// enough to be believed.
    MajorizesOnWindow(u64),
    /// `f(n) ≤ g(n)` at the window end; carries the latest such `n`.
    FailsOnWindow(u64),
    /// Dominance holds only on a short final stretch; carries the window end.
    Inconclusive(u64),
}

impl MajorizationVerdict {
    pub fn is_majorized(&self) -> bool {
        matches!(self, MajorizationVerdict::MajorizesOnWindow(_))
    }
}

/// Default confirmation length: half the window.
pub fn default_confirm(end: u64) -> u64 {
    end / 2
}

pub fn majorizes(
    f: &dyn NatSeq,
    g: &dyn NatSeq,
    end: u64,
    budget: &EvalBudget,
) -> Result<MajorizationVerdict, MeasureError> {
    majorizes_with(f, g, end, default_confirm(end), budget)
}

/// Scans `0..=end`. The witness `n₀` is the latest `n` with `f(n) ≤ g(n)`
/// (0 if there is none), and it is only reported when `end − n₀ ≥ confirm`.
pub fn majorizes_with(
    f: &dyn NatSeq,
    g: &dyn NatSeq,
    end: u64,
    confirm: u64,
    budget: &EvalBudget,
) -> Result<MajorizationVerdict, MeasureError> {
    let mut last_fail = None;
    for n in (0..=end).rev() {
        let (a, b) = (f.value(n, budget)?, g.value(n, budget)?);
        match greater(&a, &b) {
            Some(true) => {}
            Some(false) => {
                last_fail = Some(n);
                break;
            }
            None => return Err(MeasureError::Incomparable { n }),
        }
    }
    Ok(match last_fail {
        Some(n) if n == end => MajorizationVerdict::FailsOnWindow(n),
        Some(n) if end - n < confirm => MajorizationVerdict::Inconclusive(end),
        Some(n) => MajorizationVerdict::MajorizesOnWindow(n),
        None => MajorizationVerdict::MajorizesOnWindow(0),
    })
}

/// `n ↦ f_0(n) + ⋯ + f_{min(n, len−1)}(n) + 1`, which majorizes every `f_i`.
pub fn diagonal_majorizer(fs: Vec<GrowthFn>) -> GrowthFn {
    GrowthFn::Diagonal(fs)
}

/// Result of comparing against the ladder `f_1, f_2, …, f_{m_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HibbardRate {
    Exactly(u64),
    AtLeast(u64),
}

/// The least `m ≤ m_max` whose `f_m` majorizes `f` on `0..=end`.
pub fn hibbard_growth_rate(
    f: &dyn NatSeq,
    m_max: u64,
    end: u64,
    budget: &EvalBudget,
) -> Result<HibbardRate, MeasureError> {
    for m in 1..=m_max {
        if majorizes(&GrowthFn::Hibbard(m), f, end, budget)?.is_majorized() {
            return Ok(HibbardRate::Exactly(m));
        }
    }
    Ok(HibbardRate::AtLeast(m_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use MajorizationVerdict::*;

    fn g(s: &str) -> GrowthFn {
        s.parse().unwrap()
    }

    fn maj(f: &str, h: &str, end: u64) -> MajorizationVerdict {
        majorizes(&g(f), &g(h), end, &EvalBudget::default()).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        assert_eq!(maj("n+1", "n", 100), MajorizesOnWindow(0));
        assert_eq!(maj("n", "n", 100), FailsOnWindow(100));
        assert_eq!(maj("poly2", "10*n", 100), MajorizesOnWindow(10));
        // dominance starts at 91: shorter than half the window
        assert_eq!(maj("n", "90", 100), Inconclusive(100));
        assert_eq!(
            majorizes_with(&g("n"), &g("90"), 100, 5, &EvalBudget::default()).unwrap(),
            MajorizesOnWindow(90)
        );
    }

    #[test]
    fn certified_large_values_compare() {
        let tight = EvalBudget::new(1_000_000, 64).unwrap();
        // h_ω(2) = 8 = 2^3, and h_ω(n) ≥ 2^64 from n = 3 on
        let v = majorizes(&g("fast(w)"), &g("poly3"), 20, &tight).unwrap();
        assert_eq!(v, MajorizesOnWindow(2));
        assert!(matches!(
            majorizes(&g("fast(w)"), &g("exp2"), 80, &tight),
            Err(MeasureError::Incomparable { .. })
        ));
    }

    #[test]
    fn cost_profiles_are_sequences() {
        let p = CostProfile {
            start: 0,
            values: vec![5, 5, 5, 5, 5],
            hint_accepted: true,
        };
        assert_eq!(
            majorizes(&g("n+2"), &p, 4, &EvalBudget::default()).unwrap(),
            Inconclusive(4)
        );
        assert_eq!(
            majorizes_with(&g("n+2"), &p, 4, 1, &EvalBudget::default()).unwrap(),
            MajorizesOnWindow(3)
        );
        assert!(matches!(
            majorizes(&g("n"), &p, 5, &EvalBudget::default()),
            Err(MeasureError::OutsideProfile { n: 5, .. })
        ));
    }

    #[test]
    fn diagonal_of_n_square_exp() {
        let d = diagonal_majorizer(vec![g("n"), g("poly2"), g("exp2")]);
        assert_eq!(
            d.eval(3, &EvalBudget::default()).unwrap(),
            BigUint::from(21u32)
        );
        for f in ["n", "poly2", "exp2"] {
            assert!(maj(&d.to_string(), f, 50).is_majorized(), "{f}");
        }
        let z = diagonal_majorizer(vec![g("0")]);
        assert_eq!(maj(&z.to_string(), "0", 50), MajorizesOnWindow(0));
    }

    #[test]
    fn hibbard_rate_of_zero_and_of_f_m() {
        let b = EvalBudget::default();
        // f_1(k) = k + 1 is positive everywhere
        assert_eq!(
            hibbard_growth_rate(&g("0"), 5, 20, &b).unwrap(),
            HibbardRate::Exactly(1)
        );
        for m0 in 1..=4 {
            match hibbard_growth_rate(&GrowthFn::Hibbard(m0), 8, 20, &b).unwrap() {
                HibbardRate::Exactly(m) => assert!(m > m0),
                HibbardRate::AtLeast(_) => {}
            }
        }
    }
}
