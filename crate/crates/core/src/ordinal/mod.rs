//! Ordinals up to and including ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is either the distinguished atom ε₀ or a finite, strictly
//! descending list of terms `ω^α·c`. Because Cantor normal form is unique,
//! structural equality coincides with ordinal equality and the total order is
//! the lexicographic order on (exponent, coefficient) pairs.

mod parse;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::ParseOrdinalError;

/// Fundamental-sequence indices for ε₀ build a tower of this many ω's at most.
pub const MAX_TOWER_INDEX: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("result would exceed epsilon_0")]
    OverflowBeyondEpsilon0,
    #[error("{0} is not a limit ordinal")]
    NotALimit(String),
    #[error("{0} is not a successor ordinal")]
    NotASuccessor(String),
    #[error("fundamental sequence index {0} is too large for epsilon_0")]
    IndexTooLarge(BigUint),
    #[error("invalid Cantor normal form: {0}")]
    InvalidCnf(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

/// One summand `ω^exponent · coefficient` of a Cantor normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    exponent: Ordinal,
    coefficient: BigUint,
}

impl Term {
    pub fn exponent(&self) -> &Ordinal {
        &self.exponent
    }

    pub fn coefficient(&self) -> &BigUint {
        &self.coefficient
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ordinal {
    Epsilon0,
    Cnf(Vec<Term>),
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal::Cnf(Vec::new())
    }

    pub fn one() -> Self {
        Self::finite(1u32)
    }

    pub fn omega() -> Self {
        Ordinal::Cnf(vec![Term {
            exponent: Self::one(),
            coefficient: BigUint::one(),
        }])
    }

    pub fn epsilon0() -> Self {
        Ordinal::Epsilon0
    }

    pub fn finite(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Self::zero()
        } else {
            Ordinal::Cnf(vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }])
        }
    }

    /// Builds `ω^a₁·c₁ + … + ω^aₖ·cₖ`, checking every Cantor-normal-form
    /// invariant.
    pub fn from_terms(terms: Vec<(Ordinal, BigUint)>) -> Result<Self, OrdinalError> {
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (exponent, coefficient) in terms {
            if coefficient.is_zero() {
                return Err(OrdinalError::InvalidCnf("zero coefficient".into()));
            }
            if exponent.is_epsilon0() {
                return Err(OrdinalError::InvalidCnf(
                    "epsilon_0 cannot appear as an exponent".into(),
                ));
            }
            if let Some(prev) = out.last() {
                if prev.exponent <= exponent {
                    return Err(OrdinalError::InvalidCnf(format!(
                        "exponents not strictly decreasing: {} then {}",
                        prev.exponent, exponent
                    )));
                }
            }
            out.push(Term {
                exponent,
                coefficient,
            });
        }
        Ok(Ordinal::Cnf(out))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ordinal::Cnf(t) if t.is_empty())
    }

    pub fn is_epsilon0(&self) -> bool {
        matches!(self, Ordinal::Epsilon0)
    }

    /// The terms of the normal form; `None` for ε₀.
    pub fn terms(&self) -> Option<&[Term]> {
        match self {
            Ordinal::Epsilon0 => None,
            Ordinal::Cnf(t) => Some(t),
        }
    }

    /// The natural number this ordinal equals, if it is finite.
    pub fn as_finite(&self) -> Option<BigUint> {
        match self {
            Ordinal::Epsilon0 => None,
            Ordinal::Cnf(t) => match t.as_slice() {
                [] => Some(BigUint::zero()),
                [only] if only.exponent.is_zero() => Some(only.coefficient.clone()),
                _ => None,
            },
        }
    }

    pub fn classify(&self) -> OrdinalKind {
        match self {
            Ordinal::Epsilon0 => OrdinalKind::Limit,
            Ordinal::Cnf(t) => match t.last() {
                None => OrdinalKind::Zero,
                Some(last) if last.exponent.is_zero() => OrdinalKind::Successor,
                Some(_) => OrdinalKind::Limit,
            },
        }
    }

    /// Splits `λ + k` into `(λ, k)` where `λ` is zero or a limit and `k` is
    /// the trailing finite part.
    pub fn split_finite_tail(&self) -> (Ordinal, BigUint) {
        match self {
            Ordinal::Cnf(t) => match t.last() {
                Some(last) if last.exponent.is_zero() => (
                    Ordinal::Cnf(t[..t.len() - 1].to_vec()),
                    last.coefficient.clone(),
                ),
                _ => (self.clone(), BigUint::zero()),
            },
            Ordinal::Epsilon0 => (Ordinal::Epsilon0, BigUint::zero()),
        }
    }

    /// `β` such that `self = β + 1`.
    pub fn predecessor(&self) -> Result<Ordinal, OrdinalError> {
        match self.classify() {
            OrdinalKind::Successor => {
                let mut terms = self.terms().expect("successor is not epsilon_0").to_vec();
                let last = terms.last_mut().expect("successor has a term");
                if last.coefficient.is_one() {
                    terms.pop();
                } else {
                    last.coefficient -= 1u32;
                }
                Ok(Ordinal::Cnf(terms))
            }
            _ => Err(OrdinalError::NotASuccessor(self.to_string())),
        }
    }

    pub fn add(&self, rhs: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        match (self, rhs) {
            (Ordinal::Epsilon0, _) => Err(OrdinalError::OverflowBeyondEpsilon0),
            (_, Ordinal::Epsilon0) => Ok(Ordinal::Epsilon0),
            (Ordinal::Cnf(left), Ordinal::Cnf(right)) => {
                let lead = &right[0].exponent;
                let mut out: Vec<Term> = Vec::with_capacity(left.len() + right.len());
                let mut carry = BigUint::zero();
                for term in left {
                    match term.exponent.cmp(lead) {
                        Ordering::Greater => out.push(term.clone()),
                        Ordering::Equal => carry = term.coefficient.clone(),
                        Ordering::Less => break,
                    }
                }
                let mut rest = right.iter();
                let first = rest.next().expect("rhs is nonzero");
                out.push(Term {
                    exponent: first.exponent.clone(),
                    coefficient: &first.coefficient + carry,
                });
                out.extend(rest.cloned());
                Ok(Ordinal::Cnf(out))
            }
        }
    }

    pub fn mul(&self, rhs: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Ordinal::zero());
        }
        match (self, rhs) {
            (Ordinal::Epsilon0, r) if *r == Ordinal::one() => Ok(Ordinal::Epsilon0),
            (Ordinal::Epsilon0, _) => Err(OrdinalError::OverflowBeyondEpsilon0),
            // 1 ≤ a < ε₀ implies a·ε₀ = ε₀
            (_, Ordinal::Epsilon0) => Ok(Ordinal::Epsilon0),
            (Ordinal::Cnf(left), Ordinal::Cnf(right)) => {
                let lead = &left[0];
                let mut acc = Ordinal::zero();
                for term in right {
                    let piece = if term.exponent.is_zero() {
                        let mut scaled = left.clone();
                        scaled[0].coefficient = &lead.coefficient * &term.coefficient;
                        Ordinal::Cnf(scaled)
                    } else {
                        Ordinal::Cnf(vec![Term {
                            exponent: lead.exponent.add(&term.exponent)?,
                            coefficient: term.coefficient.clone(),
                        }])
                    };
                    acc = acc.add(&piece)?;
                }
                Ok(acc)
            }
        }
    }

    /// `ω^self`.
    pub fn omega_pow(&self) -> Result<Ordinal, OrdinalError> {
        if self.is_epsilon0() {
            return Err(OrdinalError::OverflowBeyondEpsilon0);
        }
        Ok(Ordinal::Cnf(vec![Term {
            exponent: self.clone(),
            coefficient: BigUint::one(),
        }]))
    }

    /// The standard fundamental sequence entry `λ[i]`.
    ///
    /// A final term `ω^α·c` with `c > 1` is read as `c` unit summands, so only
    /// the last unit is expanded.
    pub fn fundamental_sequence(&self, i: &BigUint) -> Result<Ordinal, OrdinalError> {
        if self.classify() != OrdinalKind::Limit {
            return Err(OrdinalError::NotALimit(self.to_string()));
        }
        match self {
            Ordinal::Epsilon0 => {
                let height = i
                    .to_u64()
                    .filter(|h| *h <= MAX_TOWER_INDEX)
                    .ok_or_else(|| OrdinalError::IndexTooLarge(i.clone()))?;
                let mut tower = Ordinal::omega();
                for _ in 0..height {
                    tower = tower.omega_pow()?;
                }
                Ok(tower)
            }
            Ordinal::Cnf(terms) => {
                let (last, init) = terms.split_last().expect("limit has a term");
                let mut out = init.to_vec();
                if !last.coefficient.is_one() {
                    out.push(Term {
                        exponent: last.exponent.clone(),
                        coefficient: &last.coefficient - 1u32,
                    });
                }
                match last.exponent.classify() {
                    OrdinalKind::Successor => {
                        if !i.is_zero() {
                            out.push(Term {
                                exponent: last.exponent.predecessor()?,
                                coefficient: i.clone(),
                            });
                        }
                    }
                    OrdinalKind::Limit => out.push(Term {
                        exponent: last.exponent.fundamental_sequence(i)?,
                        coefficient: BigUint::one(),
                    }),
                    OrdinalKind::Zero => unreachable!("classified as limit"),
                }
                Ok(Ordinal::Cnf(out))
            }
        }
    }

    pub fn fundamental(&self, i: u64) -> Result<Ordinal, OrdinalError> {
        self.fundamental_sequence(&BigUint::from(i))
    }

    /// Number of nested exponent levels; finite ordinals have depth 1, zero
    /// has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Ordinal::Epsilon0 => usize::MAX,
            Ordinal::Cnf(t) => t.iter().map(|x| 1 + x.exponent.depth()).max().unwrap_or(0),
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ordinal::Epsilon0, Ordinal::Epsilon0) => Ordering::Equal,
            (Ordinal::Epsilon0, _) => Ordering::Greater,
            (_, Ordinal::Epsilon0) => Ordering::Less,
            (Ordinal::Cnf(a), Ordinal::Cnf(b)) => {
                for (s, t) in a.iter().zip(b) {
                    let c = s
                        .exponent
                        .cmp(&t.exponent)
                        .then_with(|| s.coefficient.cmp(&t.coefficient));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = match self {
            Ordinal::Epsilon0 => return f.write_str("e0"),
            Ordinal::Cnf(t) if t.is_empty() => return f.write_str("0"),
            Ordinal::Cnf(t) => t,
        };
        for (idx, term) in terms.iter().enumerate() {
            if idx > 0 {
                f.write_str("+")?;
            }
            if term.exponent.is_zero() {
                write!(f, "{}", term.coefficient)?;
                continue;
            }
            if term.exponent == Ordinal::one() {
                f.write_str("w")?;
            } else {
                let exp = term.exponent.to_string();
                if exp == "w" || exp.bytes().all(|b| b.is_ascii_digit()) {
                    write!(f, "w^{exp}")?;
                } else {
                    write!(f, "w^({exp})")?;
                }
            }
            if !term.coefficient.is_one() {
                write!(f, "*{}", term.coefficient)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = ParseOrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_ordinal(s)
    }
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, ParseOrdinalError> {
    parse::parse_ordinal(text)
}

pub fn format_ordinal(a: &Ordinal) -> String {
    a.to_string()
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
