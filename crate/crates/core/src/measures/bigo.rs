//! Windowed Big-O and Big-Θ membership over a finite grid of constants.

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::budget::EvalBudget;

use super::majorize::{default_confirm, NatSeq, SeqValue};
use super::MeasureError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BigOVerdict {
    /// `t(n) ≤ C·f(n)` for all `n₀ ≤ n` in the window.
    Witness {
        c: BigRational,
        n0: u64,
    },
    /// Even the largest `C` fails at the window end.
    RefutedOnWindow {
        n: u64,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BigThetaVerdict {
    /// `C·f(n) ≤ t(n) ≤ C'·f(n)` for all `n₀ ≤ n` in the window.
    Witness {
        c_low: BigRational,
        c_high: BigRational,
        n0: u64,
    },
    Refuted {
        n: u64,
        side: Side,
    },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// Powers of two from `2^-20` to `2^20`, the integers 1 to 16, quarter
/// steps below 4, and the powers of ten up to `10^6`.
pub fn default_grid() -> Vec<BigRational> {
    let mut g: Vec<BigRational> = Vec::new();
    for k in 0..=20u32 {
        let p = BigInt::one() << k;
        g.push(BigRational::from_integer(p.clone()));
        g.push(BigRational::new(BigInt::one(), p));
    }
    for k in 1..=16u32 {
        g.push(BigRational::from_integer(k.into()));
        g.push(BigRational::new(k.into(), 4.into()));
    }
    for k in 1..=6u32 {
        g.push(BigRational::from_integer(BigInt::from(10u32).pow(k)));
    }
    normalize(g)
}

fn normalize(mut g: Vec<BigRational>) -> Vec<BigRational> {
    g.retain(|c| c.is_positive());
    g.sort();
    g.dedup();
    g
}

/// Compares `a` with `c·b`: `Some(true)` iff `a ≤ c·b` is known to hold,
/// `Some(false)` iff it is known to fail.
fn le_scaled(a: &SeqValue, c: &BigRational, b: &SeqValue) -> Option<bool> {
    let scale = |v: &BigUint, r: &BigRational| -> BigRational {
        BigRational::from_integer(BigInt::from(v.clone())) * r
    };
    let one = BigRational::one();
    match (a, b) {
        (SeqValue::Exact(x), SeqValue::Exact(y)) => Some(scale(x, &one) <= scale(y, c)),
        (SeqValue::AtLeast(x), SeqValue::Exact(y)) => {
            (scale(x, &one) > scale(y, c)).then_some(false)
        }
        (SeqValue::Exact(x), SeqValue::AtLeast(y)) => {
            (scale(x, &one) <= scale(y, c)).then_some(true)
        }
        (SeqValue::AtLeast(_), SeqValue::AtLeast(_)) => None,
    }
}

struct Table {
    start: u64,
    t: Vec<SeqValue>,
    f: Vec<SeqValue>,
}

impl Table {
    fn new(
        t: &dyn NatSeq,
        f: &dyn NatSeq,
        window: &RangeInclusive<u64>,
        budget: &EvalBudget,
    ) -> Result<Self, MeasureError> {
        let mut tv = Vec::new();
        let mut fv = Vec::new();
        for n in window.clone() {
            tv.push(t.value(n, budget)?);
            fv.push(f.value(n, budget)?);
        }
        Ok(Self {
            start: *window.start(),
            t: tv,
            f: fv,
        })
    }

    /// Least `n₀` with `holds(n)` on `n₀..=end`, scanning down from the end;
    /// `None` if it fails at the end itself.
    fn least_n0(&self, holds: impl Fn(usize) -> Option<bool>) -> Result<Option<u64>, MeasureError> {
        let mut n0 = None;
        for k in (0..self.t.len()).rev() {
            match holds(k) {
                Some(true) => n0 = Some(self.start + k as u64),
                Some(false) => break,
                None => {
                    return Err(MeasureError::Incomparable {
                        n: self.start + k as u64,
                    })
                }
            }
        }
        Ok(n0)
    }

    fn upper_n0(&self, c: &BigRational) -> Result<Option<u64>, MeasureError> {
        self.least_n0(|k| le_scaled(&self.t[k], c, &self.f[k]))
    }

    fn lower_n0(&self, c: &BigRational) -> Result<Option<u64>, MeasureError> {
        // c·f ≤ t  ⟺  f ≤ (1/c)·t
        let inv = c.recip();
        self.least_n0(|k| le_scaled(&self.f[k], &inv, &self.t[k]))
    }
}

fn confirmed(n0: Option<u64>, window: &RangeInclusive<u64>, confirm: u64) -> Option<u64> {
    n0.filter(|&n0| window.end() - n0 >= confirm || n0 == *window.start())
}

/// Least grid `C` (then least `n₀`) with `t(n) ≤ C·f(n)` from `n₀` to the
/// window end, where the bound must hold on at least half the window.
pub fn big_o_member(
    t: &dyn NatSeq,
    f: &dyn NatSeq,
    window: RangeInclusive<u64>,
    grid: &[BigRational],
    budget: &EvalBudget,
) -> Result<BigOVerdict, MeasureError> {
    let grid = normalize(grid.to_vec());
    if grid.is_empty() {
        return Err(MeasureError::EmptyGrid);
    }
    let end = *window.end();
    let confirm = default_confirm(end - window.start());
    let table = Table::new(t, f, &window, budget)?;
    for c in &grid {
        if let Some(n0) = confirmed(table.upper_n0(c)?, &window, confirm) {
            return Ok(BigOVerdict::Witness { c: c.clone(), n0 });
        }
    }
    let largest = grid.last().expect("nonempty grid");
    Ok(match table.upper_n0(largest)? {
        None => BigOVerdict::RefutedOnWindow { n: end },
        Some(_) => BigOVerdict::Inconclusive,
    })
}

/// Tightest grid pair: the largest lower constant and the least upper one,
/// each holding on at least half the window; `n₀` is the later start.
pub fn big_theta_member(
    t: &dyn NatSeq,
    f: &dyn NatSeq,
    window: RangeInclusive<u64>,
    lower_grid: &[BigRational],
    upper_grid: &[BigRational],
    budget: &EvalBudget,
) -> Result<BigThetaVerdict, MeasureError> {
    let lower_grid = normalize(lower_grid.to_vec());
    let upper_grid = normalize(upper_grid.to_vec());
    if lower_grid.is_empty() || upper_grid.is_empty() {
        return Err(MeasureError::EmptyGrid);
    }
    let end = *window.end();
    let confirm = default_confirm(end - window.start());
    let table = Table::new(t, f, &window, budget)?;

    let mut low = None;
    for c in lower_grid.iter().rev() {
        if let Some(n0) = confirmed(table.lower_n0(c)?, &window, confirm) {
            low = Some((c.clone(), n0));
            break;
        }
    }
    let mut high = None;
    for c in &upper_grid {
        if let Some(n0) = confirmed(table.upper_n0(c)?, &window, confirm) {
            high = Some((c.clone(), n0));
            break;
        }
    }
    Ok(match (low, high) {
        (Some((c_low, a)), Some((c_high, b))) => BigThetaVerdict::Witness {
            c_low,
            c_high,
            n0: a.max(b),
        },
        (None, _) if table.lower_n0(&lower_grid[0])?.is_none() => BigThetaVerdict::Refuted {
            n: end,
            side: Side::Lower,
        },
        (_, None)
            if table
                .upper_n0(upper_grid.last().expect("nonempty"))?
                .is_none() =>
        {
            BigThetaVerdict::Refuted {
                n: end,
                side: Side::Upper,
            }
        }
        _ => BigThetaVerdict::Inconclusive,
    })
}

/// Re-checks a Big-O witness point by point.
pub fn check_big_o_witness(
    t: &dyn NatSeq,
    f: &dyn NatSeq,
    window: RangeInclusive<u64>,
    c: &BigRational,
    n0: u64,
    budget: &EvalBudget,
) -> Result<bool, MeasureError> {
    for n in n0.max(*window.start())..=*window.end() {
        if le_scaled(&t.value(n, budget)?, c, &f.value(n, budget)?) != Some(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::GrowthFn;

    fn g(s: &str) -> GrowthFn {
        s.parse().unwrap()
    }

    fn int(k: i64) -> BigRational {
        BigRational::from_integer(k.into())
    }

    fn big_o(t: &str, f: &str, end: u64, grid: &[BigRational]) -> BigOVerdict {
        big_o_member(&g(t), &g(f), 0..=end, grid, &EvalBudget::default()).unwrap()
    }

    #[test]
    fn linear_in_n() {
        let grid: Vec<_> = (1..=10).map(int).collect();
        // 4n ≥ 3n+2 from n = 2, 3n ≥ 3n+2 never
        assert_eq!(
            big_o("3*n+2", "n", 40, &grid),
            BigOVerdict::Witness { c: int(4), n0: 2 }
        );
        assert_eq!(
            big_o("n", "n", 40, &grid),
            BigOVerdict::Witness { c: int(1), n0: 0 }
        );
    }

    #[test]
    fn exponential_is_not_quadratic() {
        let grid: Vec<_> = (0..=6).map(|k| int(10i64.pow(k))).collect();
        assert_eq!(
            big_o("exp2", "poly2", 40, &grid),
            BigOVerdict::RefutedOnWindow { n: 40 }
        );
    }

    #[test]
    fn theta_cases() {
        let grid = default_grid();
        let b = EvalBudget::default();
        let theta =
            |t: &str, f: &str| big_theta_member(&g(t), &g(f), 0..=60, &grid, &grid, &b).unwrap();
        assert_eq!(
            theta("n", "n"),
            BigThetaVerdict::Witness {
                c_low: int(1),
                c_high: int(1),
                n0: 0
            }
        );
        assert_eq!(
            theta("5*poly2", "poly2"),
            BigThetaVerdict::Witness {
                c_low: int(5),
                c_high: int(5),
                n0: 0
            }
        );
        // a constant of 1/64 keeps n ≥ n²/64 true up to n = 64, so the grid
        // has to be coarser than the window for a refutation
        let small: Vec<_> = (1..=16)
            .map(int)
            .chain([BigRational::new(1.into(), 8.into())])
            .collect();
        let theta_small =
            |t: &str, f: &str| big_theta_member(&g(t), &g(f), 0..=60, &small, &small, &b).unwrap();
        assert_eq!(
            theta_small("n", "poly2"),
            BigThetaVerdict::Refuted {
                n: 60,
                side: Side::Lower
            }
        );
        assert_eq!(
            theta_small("poly2", "n"),
            BigThetaVerdict::Refuted {
                n: 60,
                side: Side::Upper
            }
        );
        assert!(matches!(
            theta("n", "poly2"),
            BigThetaVerdict::Witness { .. }
        ));
    }

    #[test]
    fn witnesses_recheck() {
        let grid = default_grid();
        let b = EvalBudget::default();
        for (t, f) in [
            ("3*n+2", "n"),
            ("poly2", "poly3"),
            ("7", "n+1"),
            ("scaled(n)", "poly2"),
        ] {
            if let BigOVerdict::Witness { c, n0 } = big_o(t, f, 50, &grid) {
                assert!(
                    check_big_o_witness(&g(t), &g(f), 0..=50, &c, n0, &b).unwrap(),
                    "{t} vs {f}"
                );
            } else {
                panic!("{t} should be O({f})");
            }
        }
    }

    #[test]
    fn default_grid_is_sorted_and_positive() {
        let g = default_grid();
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|c| c.is_positive()));
        assert!(g.contains(&BigRational::new(3.into(), 4.into())));
    }
}
