//! ASCII ordinal expressions: `0`, naturals, `w`, `e0`, `+`, `*`, `w^(...)`
//! and parentheses. Whitespace is ignored.

use num_bigint::BigUint;
use thiserror::Error;

use super::{Ordinal, OrdinalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseOrdinalError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arithmetic error at byte {pos}: {source}")]
    Arithmetic { pos: usize, source: OrdinalError },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub(super) fn parse_ordinal(text: &str) -> Result<Ordinal, ParseOrdinalError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(value)
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ParseOrdinalError {
        ParseOrdinalError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn arith<T>(&self, at: usize, r: Result<T, OrdinalError>) -> Result<T, ParseOrdinalError> {
        r.map_err(|source| ParseOrdinalError::Arithmetic { pos: at, source })
    }

    fn expr(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        let mut acc = self.product()?;
        loop {
            let at = self.pos;
            if !self.eat(b'+') {
                return Ok(acc);
            }
            let rhs = self.product()?;
            acc = self.arith(at, acc.add(&rhs))?;
        }
    }

    fn product(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        let mut acc = self.power()?;
        loop {
            let at = self.pos;
            if !self.eat(b'*') {
                return Ok(acc);
            }
            let rhs = self.power()?;
            acc = self.arith(at, acc.mul(&rhs))?;
        }
    }

    fn power(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        self.skip_ws();
        let base_at = self.pos;
        let base = self.atom()?;
        let at = self.pos;
        if !self.eat(b'^') {
            return Ok(base);
        }
        if base != Ordinal::omega() {
            return Err(ParseOrdinalError::Syntax {
                pos: base_at,
                msg: "only powers of w are supported".into(),
            });
        }
        let exponent = self.power()?;
        self.arith(at, exponent.omega_pow())
    }

    fn atom(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'e') => {
                if self.src.get(self.pos + 1) == Some(&b'0') {
                    self.pos += 2;
                    Ok(Ordinal::Epsilon0)
                } else {
                    Err(self.syntax("expected 'e0'"))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigUint = digits.parse().expect("digits parse");
                Ok(Ordinal::finite(n))
            }
            Some(_) => Err(self.syntax("expected a number, 'w', 'e0' or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}
