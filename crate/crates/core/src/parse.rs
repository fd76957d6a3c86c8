//! Parser for the element grammar: sums of terms `c * t^(a/b) * pi^(e/f)`.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := integer | 't' ['^' exp] | 'pi' ['^' exp]
//! exp    := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```
//!
//! Whitespace is ignored. Exponent denominators must be powers of `p`.

use std::sync::Arc;

use num_traits::Zero;

use crate::element::TwoDimElement;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::rational::{p_power_denominator, q, Q};

pub fn parse_element(input: &str, field: Arc<PrimeField>) -> Result<TwoDimElement> {
    let chars: Vec<(usize, char)> = input.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser { chars, pos: 0, field, input_len: input.len() };
    let out = parser.expr()?;
    if parser.pos != parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    field: Arc<PrimeField>,
    input_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.input_len, |(i, _)| *i)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.offset(), msg: msg.to_string() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TwoDimElement> {
        if self.chars.is_empty() {
            return Err(self.error("empty expression"));
        }
        let mut acc = TwoDimElement::zero(self.field.clone());
        let mut sign = 1i64;
        if self.eat('-') {
            sign = -1;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term(sign)?;
            acc = acc.add(&t)?;
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self, sign: i64) -> Result<TwoDimElement> {
        let mut coeff = sign;
        let mut t_exp = Q::zero();
        let mut pi_exp = Q::zero();
        let mut seen = false;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let n = self.integer()?;
                    coeff = coeff
                        .checked_mul(n)
                        .ok_or_else(|| self.error("coefficient overflow"))?
                        .rem_euclid(self.field.p() as i64);
                }
                Some('p') => {
                    self.pos += 1;
                    if !self.eat('i') {
                        return Err(self.error("expected `pi`"));
                    }
                    pi_exp += self.optional_exponent()?;
                }
                Some('t') => {
                    self.pos += 1;
                    t_exp += self.optional_exponent()?;
                }
                _ if seen => return Err(self.error("expected a factor after `*`")),
                _ => return Err(self.error("expected a term")),
            }
            seen = true;
            if self.eat('*') {
                continue;
            }
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == 'p' || c == 't' => continue,
                _ => break,
            }
        }
        let c = self.field.from_int(coeff);
        Ok(TwoDimElement::monomial(self.field.clone(), c, t_exp, pi_exp))
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
        s.parse::<i64>().map_err(|_| self.error("integer out of range"))
    }

    fn optional_exponent(&mut self) -> Result<Q> {
        if !self.eat('^') {
            return Ok(q(1));
        }
        let at = self.offset();
        let value = if self.eat('(') {
            let neg = self.eat('-');
            let n = self.integer()?;
            let d = if self.eat('/') { self.integer()? } else { 1 };
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            if d == 0 {
                return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
            }
            Q::new(if neg { -n } else { n }, d)
        } else {
            let neg = self.eat('-');
            let n = self.integer()?;
            q(if neg { -n } else { n })
        };
        if p_power_denominator(&value, self.field.p()).is_none() {
            return Err(Error::Parse {
                pos: at,
                msg: format!("exponent denominator {} is not a power of {}", value.denom(), self.field.p()),
            });
        }
        Ok(value)
    }
}
