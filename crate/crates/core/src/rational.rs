//! Exact rationals used for exponents, indices and slopes.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Q = num_rational::Rational64;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Renders `n` or `n/d`, never a decimal.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: `{s}`") };
    match s.split_once('/') {
        Some((n, d)) => {
            let n = i64::from_str(n.trim()).map_err(|_| err("bad numerator"))?;
            let d = i64::from_str(d.trim()).map_err(|_| err("bad denominator"))?;
            if d == 0 {
                return Err(err("zero denominator"));
            }
            Ok(Q::new(n, d))
        }
        None => i64::from_str(s).map(Q::from_integer).map_err(|_| err("bad rational")),
    }
}

/// Smallest power of `p` that is a multiple of the denominator of `x`, if the
/// denominator is a power of `p` at all.
pub fn p_power_denominator(x: &Q, p: u64) -> Option<i64> {
    let mut d = *x.denom();
    let mut out = 1i64;
    while d > 1 {
        if d % p as i64 != 0 {
            return None;
        }
        d /= p as i64;
        out *= p as i64;
    }
    Some(out)
}

/// Whether `x * denom` is an integer divisible by `p`.
pub fn divisible_in_units(x: &Q, denom: i64, p: u64) -> bool {
    let scaled = *x * q(denom);
    scaled.is_integer() && scaled.numer().is_multiple_of(&(p as i64))
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

/// `serde` adapters rendering rationals as `a/b` strings.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        assert_eq!(fmt_q(&qr(6, 4)), "3/2");
        assert_eq!(fmt_q(&q(-7)), "-7");
        assert_eq!(parse_q(" -3/6 ").unwrap(), qr(-1, 2));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn p_power_denominators() {
        assert_eq!(p_power_denominator(&qr(1, 4), 2), Some(4));
        assert_eq!(p_power_denominator(&qr(1, 6), 2), None);
        assert_eq!(p_power_denominator(&q(3), 5), Some(1));
        assert!(divisible_in_units(&qr(1, 2), 4, 2));
        assert!(!divisible_in_units(&qr(1, 4), 4, 2));
    }
}
