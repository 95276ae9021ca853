use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, EvalBudget, Meter};
use crate::hierarchy::{HierarchyEvaluator, HierarchyKind};
use crate::measures::pr::{hibbard_f, pr_enumerate, pr_eval_unary, PrError};
use crate::ordinal::Ordinal;

/// A total function `ℕ → ℕ` drawn from a fixed catalog.
///
/// Text forms: `C`, `n`, `polyK` (`n^K`), `expB` (`B^n`), `scaled(F)`
/// (`n·F(n)+1`), `diag(F;G;…)`, `slow(α)`, `fast(α)`, `hardy(α)` with
/// optional `;exp=E;bits=B` budget overrides, `hibbard(M)`, `pr(I)`, and
/// sums `F+G` and constant multiples `C*F` of these, e.g. `3*n+2` or
/// `5*poly2+5`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrowthFn {
    Affine {
        slope: u64,
        offset: u64,
    },
    Poly(u32),
    Exp(u64),
    Scaled(Box<GrowthFn>),
    /// `f_0(n) + ⋯ + f_{min(n, len−1)}(n) + 1`.
    Diagonal(Vec<GrowthFn>),
    Hierarchy {
        kind: HierarchyKind,
        alpha: Ordinal,
        budget: Option<EvalBudget>,
    },
    /// The `f_m` built from the primitive-recursive enumeration.
    Hibbard(u64),
    /// Unary view of the `i`-th primitive-recursive term.
    Pr(u64),
    /// Built by [`GrowthFn::sum`]: at most one affine part, first.
    Sum(Vec<GrowthFn>),
    /// Built by [`GrowthFn::mul`].
    Mul(u64, Box<GrowthFn>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad growth function {text:?}: {msg}")]
pub struct GrowthParseError {
    pub text: String,
    pub msg: String,
}

impl GrowthFn {
    pub fn identity() -> Self {
        GrowthFn::Affine {
            slope: 1,
            offset: 0,
        }
    }

    pub fn constant(c: u64) -> Self {
        GrowthFn::Affine {
            slope: 0,
            offset: c,
        }
    }

    pub fn affine(slope: u64, offset: u64) -> Self {
        GrowthFn::Affine { slope, offset }
    }

    /// `n ↦ n·f(n) + 1`.
    /// Flattens nested sums and merges the affine parts.
    pub fn sum(parts: Vec<GrowthFn>) -> Self {
        let (mut slope, mut offset) = (0u64, 0u64);
        let mut rest = Vec::new();
        let mut stack: Vec<GrowthFn> = parts.into_iter().rev().collect();
        while let Some(p) = stack.pop() {
            match p {
                GrowthFn::Affine {
                    slope: a,
                    offset: b,
                } => {
                    slope = slope.saturating_add(a);
                    offset = offset.saturating_add(b);
                }
                GrowthFn::Sum(inner) => stack.extend(inner.into_iter().rev()),
                other => rest.push(other),
            }
        }
        let affine = GrowthFn::Affine { slope, offset };
        if rest.is_empty() {
            return affine;
        }
        if slope != 0 || offset != 0 {
            rest.insert(0, affine);
        }
        if rest.len() == 1 {
            rest.pop().expect("one part")
        } else {
            GrowthFn::Sum(rest)
        }
    }

    /// `c·f`, distributed over sums and folded into affine parts.
    pub fn mul(c: u64, f: GrowthFn) -> Self {
        match f {
            GrowthFn::Affine { slope, offset } => GrowthFn::Affine {
                slope: slope.saturating_mul(c),
                offset: offset.saturating_mul(c),
            },
            GrowthFn::Sum(parts) => {
                GrowthFn::sum(parts.into_iter().map(|p| GrowthFn::mul(c, p)).collect())
            }
            GrowthFn::Mul(d, g) => GrowthFn::mul(c.saturating_mul(d), *g),
            _ if c == 0 => GrowthFn::constant(0),
            _ if c == 1 => f,
            other => GrowthFn::Mul(c, Box::new(other)),
        }
    }

    pub fn scaled(f: GrowthFn) -> Self {
        GrowthFn::Scaled(Box::new(f))
    }

    /// If evaluation stops on the bit cap, the value is at least `2^bits`
    /// for the returned `bits`: every intermediate of these forms is at most
    /// the final value. `None` for the primitive-recursive forms, whose
    /// intermediates can be discarded.
    pub fn overflow_floor_bits(&self, budget: &EvalBudget) -> Option<u64> {
        match self {
            GrowthFn::Affine { .. } | GrowthFn::Poly(_) | GrowthFn::Exp(_) => Some(budget.max_bits),
            GrowthFn::Scaled(f) => f
                .overflow_floor_bits(budget)
                .map(|b| b.min(budget.max_bits)),
            GrowthFn::Diagonal(fs) => fs.iter().try_fold(budget.max_bits, |acc, f| {
                f.overflow_floor_bits(budget).map(|b| acc.min(b))
            }),
            GrowthFn::Hierarchy { budget: own, .. } => {
                Some(own.map_or(budget.max_bits, |o| o.max_bits))
            }
            GrowthFn::Sum(fs) => fs.iter().try_fold(budget.max_bits, |acc, f| {
                f.overflow_floor_bits(budget).map(|b| acc.min(b))
            }),
            GrowthFn::Mul(_, f) => f
                .overflow_floor_bits(budget)
                .map(|b| b.min(budget.max_bits)),
            GrowthFn::Hibbard(_) | GrowthFn::Pr(_) => None,
        }
    }

    pub fn eval(&self, n: u64, budget: &EvalBudget) -> Result<BigUint, BudgetExceeded> {
        let mut meter = Meter::new(*budget);
        self.eval_in(n, budget, &mut meter)
    }

    fn eval_in(
        &self,
        n: u64,
        budget: &EvalBudget,
        meter: &mut Meter,
    ) -> Result<BigUint, BudgetExceeded> {
        let big = BigUint::from(n);
        match self {
            GrowthFn::Affine { slope, offset } => meter.check(big * slope + offset),
            GrowthFn::Poly(k) => meter.pow(&big, &BigUint::from(*k)),
            GrowthFn::Exp(b) => meter.pow(&BigUint::from(*b), &big),
            GrowthFn::Scaled(f) => {
                let v = f.eval_in(n, budget, meter)?;
                let prod = meter.mul(&big, &v)?;
                meter.check(prod + 1u32)
            }
            GrowthFn::Diagonal(fs) => {
                let mut acc = BigUint::one();
                let top = (n as usize).min(fs.len().saturating_sub(1));
                for f in fs.iter().take(top + 1) {
                    let v = f.eval_in(n, budget, meter)?;
                    acc = meter.check(acc + v)?;
                }
                Ok(acc)
            }
            GrowthFn::Hierarchy {
                kind,
                alpha,
                budget: own,
            } => {
                let b = own.as_ref().unwrap_or(budget);
                HierarchyEvaluator::unmemoized().eval(*kind, alpha, &big, b)
            }
            GrowthFn::Sum(fs) => {
                let mut acc = BigUint::ZERO;
                for f in fs {
                    let v = f.eval_in(n, budget, meter)?;
                    acc = meter.check(acc + v)?;
                }
                Ok(acc)
            }
            GrowthFn::Mul(c, f) => {
                let v = f.eval_in(n, budget, meter)?;
                meter.mul(&BigUint::from(*c), &v)
            }
            GrowthFn::Hibbard(m) => hibbard_f(*m, n, budget).map_err(|e| e.source),
            GrowthFn::Pr(i) => match pr_eval_unary(&pr_enumerate(*i), &big, budget) {
                Ok(v) => Ok(v),
                Err(PrError::Budget(e)) => Err(e),
                Err(other) => unreachable!("enumerated terms are well-formed: {other}"),
            },
        }
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::Affine { slope: 0, offset } => write!(f, "{offset}"),
            GrowthFn::Affine {
                slope: 1,
                offset: 0,
            } => write!(f, "n"),
            GrowthFn::Affine { slope: 1, offset } => write!(f, "n+{offset}"),
            GrowthFn::Affine { slope, offset: 0 } => write!(f, "{slope}*n"),
            GrowthFn::Affine { slope, offset } => write!(f, "{slope}*n+{offset}"),
            GrowthFn::Poly(k) => write!(f, "poly{k}"),
            GrowthFn::Exp(b) => write!(f, "exp{b}"),
            GrowthFn::Scaled(g) => write!(f, "scaled({g})"),
            GrowthFn::Diagonal(fs) => {
                write!(f, "diag(")?;
                for (k, g) in fs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
            GrowthFn::Hierarchy {
                kind,
                alpha,
                budget,
            } => {
                write!(f, "{kind}({alpha}")?;
                if let Some(b) = budget {
                    write!(f, ";exp={};bits={}", b.max_expansions, b.max_bits)?;
                }
                write!(f, ")")
            }
            GrowthFn::Hibbard(m) => write!(f, "hibbard({m})"),
            GrowthFn::Pr(i) => write!(f, "pr({i})"),
            GrowthFn::Sum(fs) => {
                for (k, g) in fs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
            GrowthFn::Mul(c, g) => match &**g {
                GrowthFn::Affine { .. } | GrowthFn::Sum(_) | GrowthFn::Mul(..) => {
                    write!(f, "{}", GrowthFn::mul(*c, (**g).clone()))
                }
                _ => write!(f, "{c}*{g}"),
            },
        }
    }
}

/// Splits on `sep` outside parentheses.
pub(crate) fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&text[start..k]);
                start = k + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

impl FromStr for GrowthFn {
    type Err = GrowthParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parts = split_top(&text, '+');
        if parts.len() > 1 {
            let fs = parts
                .into_iter()
                .map(parse_term)
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(GrowthFn::sum(fs));
        }
        parse_term(&text)
    }
}

fn parse_term(text: &str) -> Result<GrowthFn, GrowthParseError> {
    {
        let text = text.to_string();
        let err = |msg: &str| GrowthParseError {
            text: text.clone(),
            msg: msg.to_string(),
        };
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| err(&format!("expected a natural, found {t:?}")))
        };

        if split_top(&text, '*').len() > 1 {
            let (c, rest) = text.split_once('*').expect("top-level '*'");
            return Ok(GrowthFn::mul(num(c)?, parse_term(rest)?));
        }
        if let Some((head, rest)) = text.split_once('(') {
            let inner = rest.strip_suffix(')').ok_or_else(|| err("missing ')'"))?;
            let args = split_top(inner, ';');
            let one = || -> Result<&str, GrowthParseError> {
                match args.as_slice() {
                    [a] => Ok(a),
                    _ => Err(err("expected one argument")),
                }
            };
            return match head {
                "scaled" => Ok(GrowthFn::scaled(one()?.parse()?)),
                "diag" => {
                    let fs = args
                        .iter()
                        .map(|a| a.parse())
                        .collect::<Result<Vec<GrowthFn>, _>>()?;
                    Ok(GrowthFn::Diagonal(fs))
                }
                "hibbard" => {
                    let m = num(one()?)?;
                    if m == 0 {
                        return Err(err("hibbard level starts at 1"));
                    }
                    Ok(GrowthFn::Hibbard(m))
                }
                "pr" => {
                    let i = num(one()?)?;
                    if i == 0 {
                        return Err(err("enumeration starts at 1"));
                    }
                    Ok(GrowthFn::Pr(i))
                }
                kind => {
                    let kind: HierarchyKind = kind
                        .parse()
                        .map_err(|e: crate::hierarchy::UnknownHierarchy| err(&e.to_string()))?;
                    let (alpha_text, opts) =
                        args.split_first().ok_or_else(|| err("missing ordinal"))?;
                    let alpha: Ordinal = alpha_text.parse().map_err(|e| err(&format!("{e}")))?;
                    let budget = if opts.is_empty() {
                        None
                    } else {
                        let mut b = EvalBudget::default();
                        for opt in opts {
                            match opt.split_once('=') {
                                Some(("exp", v)) => b.max_expansions = num(v)?,
                                Some(("bits", v)) => b.max_bits = num(v)?,
                                _ => return Err(err(&format!("unknown option {opt:?}"))),
                            }
                        }
                        Some(
                            EvalBudget::new(b.max_expansions, b.max_bits)
                                .map_err(|e| err(&e.to_string()))?,
                        )
                    };
                    Ok(GrowthFn::Hierarchy {
                        kind,
                        alpha,
                        budget,
                    })
                }
            };
        }
        if let Some(k) = text.strip_prefix("poly") {
            let k = u32::try_from(num(k)?).map_err(|_| err("exponent too large"))?;
            return Ok(GrowthFn::Poly(k));
        }
        if let Some(b) = text.strip_prefix("exp") {
            return Ok(GrowthFn::Exp(num(b)?));
        }
        if text == "n" {
            return Ok(GrowthFn::identity());
        }
        Ok(GrowthFn::constant(num(&text)?))
    }
}

impl Serialize for GrowthFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GrowthFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
