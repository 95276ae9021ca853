use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Caps on a single evaluation: how many rule applications it may perform
/// and how wide any intermediate natural may grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalBudget {
    pub max_expansions: u64,
    pub max_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("evaluation budget fields must be strictly positive")]
pub struct InvalidBudget;

impl EvalBudget {
    pub fn new(max_expansions: u64, max_bits: u64) -> Result<Self, InvalidBudget> {
        if max_expansions == 0 || max_bits == 0 {
            return Err(InvalidBudget);
        }
        Ok(Self {
            max_expansions,
            max_bits,
        })
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        Self {
            max_expansions: 1_000_000,
            max_bits: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BudgetLimit {
    Expansions,
    Bits,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("budget exceeded ({limit:?}) after {expansions} expansions")]
pub struct BudgetExceeded {
    pub limit: BudgetLimit,
    pub expansions: u64,
}

/// Running account against an [`EvalBudget`].
#[derive(Debug, Clone)]
pub(crate) struct Meter {
    budget: EvalBudget,
    expansions: u64,
    peak_bits: u64,
}

impl Meter {
    pub fn new(budget: EvalBudget) -> Self {
        Self {
            budget,
            expansions: 0,
            peak_bits: 0,
        }
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn peak_bits(&self) -> u64 {
        self.peak_bits
    }

    pub fn set_peak_bits(&mut self, bits: u64) {
        self.peak_bits = bits;
    }

    fn exceeded(&self, limit: BudgetLimit) -> BudgetExceeded {
        BudgetExceeded {
            limit,
            expansions: self.expansions,
        }
    }

    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.tick_n(1)
    }

    pub fn tick_n(&mut self, n: u64) -> Result<(), BudgetExceeded> {
        let next = self.expansions.saturating_add(n);
        if next > self.budget.max_expansions {
            self.expansions = self.budget.max_expansions;
            return Err(self.exceeded(BudgetLimit::Expansions));
        }
        self.expansions = next;
        Ok(())
    }

    pub fn observe_bits(&mut self, bits: u64) -> Result<(), BudgetExceeded> {
        if bits > self.budget.max_bits {
            return Err(self.exceeded(BudgetLimit::Bits));
        }
        self.peak_bits = self.peak_bits.max(bits);
        Ok(())
    }

    pub fn check(&mut self, v: BigUint) -> Result<BigUint, BudgetExceeded> {
        self.observe_bits(v.bits())?;
        Ok(v)
    }

    /// `base^exp`, refusing before allocation when the result cannot fit.
    pub fn pow(&mut self, base: &BigUint, exp: &BigUint) -> Result<BigUint, BudgetExceeded> {
        if exp.is_zero() || base.is_one() {
            return Ok(BigUint::one());
        }
        if base.is_zero() {
            return Ok(BigUint::zero());
        }
        // base ≥ 2: the result has at least exp·(bits(base)−1)+1 bits
        let floor_bits = exp
            .to_u64()
            .and_then(|e| e.checked_mul(base.bits() - 1))
            .and_then(|b| b.checked_add(1));
        match floor_bits {
            Some(b) if b <= self.budget.max_bits => {}
            _ => return Err(self.exceeded(BudgetLimit::Bits)),
        }
        let e = exp
            .to_u32()
            .ok_or_else(|| self.exceeded(BudgetLimit::Bits))?;
        self.check(base.pow(e))
    }

    pub fn mul(&mut self, a: &BigUint, b: &BigUint) -> Result<BigUint, BudgetExceeded> {
        if a.bits() + b.bits() > self.budget.max_bits + 1 {
            return Err(self.exceeded(BudgetLimit::Bits));
        }
        self.check(a * b)
    }

    pub fn shl(&mut self, a: &BigUint, k: &BigUint) -> Result<BigUint, BudgetExceeded> {
        if a.is_zero() {
            return Ok(BigUint::zero());
        }
        let k = k
            .to_u64()
            .filter(|k| a.bits().saturating_add(*k) <= self.budget.max_bits)
            .ok_or_else(|| self.exceeded(BudgetLimit::Bits))?;
        self.check(a << k)
    }
}
