//! The linearly ordered index sets `A = {-1, 0} ∪ {(c, s)} ∪ {(i, r)}` and
//! `A2 = A ∪ {(i1, i2) : i2 > 0}`.
//!
//! Order: `-1 < 0 < (c, ·) < everything in the i-region`; within the
//! i-region indices compare by second coordinate first, and `(i, r)` sits
//! strictly below every pair `(x, r)` on its slice.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RamIndex {
    MinusOne,
    Zero,
    /// `(c, s)`, `s > 0`.
    C(Q),
    /// `(i, r)`, `r > 0`.
    I(Q),
}

/// A point `(i1, i2)` of `Q x Q_{>0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pair {
    pub first: Q,
    pub second: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RamIndex2 {
    A(RamIndex),
    Pair(Pair),
}

impl RamIndex {
    pub fn c(s: Q) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::OutOfRange(format!("(c, {}) needs a positive value", fmt_q(&s))));
        }
        Ok(RamIndex::C(s))
    }

    pub fn i(r: Q) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::OutOfRange(format!("(i, {}) needs a positive value", fmt_q(&r))));
        }
        Ok(RamIndex::I(r))
    }

    pub fn value(&self) -> Option<Q> {
        match self {
            RamIndex::C(v) | RamIndex::I(v) => Some(*v),
            _ => None,
        }
    }

    /// Classical constant breaks are integers.
    pub fn is_integral(&self) -> bool {
        self.value().is_none_or(|v| v.denom().is_one())
    }

    fn rank(&self) -> u8 {
        match self {
            RamIndex::MinusOne => 0,
            RamIndex::Zero => 1,
            RamIndex::C(_) => 2,
            RamIndex::I(_) => 3,
        }
    }
}

#[allow(clippy::should_implement_trait)]
impl Pair {
    pub fn new(first: Q, second: Q) -> Result<Self> {
        if !second.is_positive() {
            return Err(Error::OutOfRange(format!(
                "pair second coordinate must be positive, got {}",
                fmt_q(&second)
            )));
        }
        Ok(Pair { first, second })
    }

    /// Unchecked constructor for intermediate values such as the origin.
    pub(crate) fn raw(first: Q, second: Q) -> Self {
        Pair { first, second }
    }

    pub fn origin() -> Self {
        Pair::raw(Q::zero(), Q::zero())
    }

    pub fn add(self, o: Pair) -> Pair {
        Pair::raw(self.first + o.first, self.second + o.second)
    }

    pub fn sub(self, o: Pair) -> Pair {
        Pair::raw(self.first - o.first, self.second - o.second)
    }

    pub fn scale(self, s: Q) -> Pair {
        Pair::raw(self.first * s, self.second * s)
    }
}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.second, self.first).cmp(&(other.second, other.first))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RamIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| self.value().cmp(&other.value()))
    }
}

impl PartialOrd for RamIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RamIndex2 {
    pub fn minus_one() -> Self {
        RamIndex2::A(RamIndex::MinusOne)
    }

    pub fn zero() -> Self {
        RamIndex2::A(RamIndex::Zero)
    }

    pub fn pair(first: Q, second: Q) -> Result<Self> {
        Pair::new(first, second).map(RamIndex2::Pair)
    }

    pub fn as_pair(&self) -> Option<Pair> {
        match self {
            RamIndex2::Pair(p) => Some(*p),
            _ => None,
        }
    }

    /// Forgetful map onto `A`: a pair `(x, r)` goes to `(i, r)`.
    pub fn forget(&self) -> RamIndex {
        match self {
            RamIndex2::A(a) => *a,
            RamIndex2::Pair(p) => RamIndex::I(p.second),
        }
    }

    pub fn is_c_region(&self) -> bool {
        matches!(self, RamIndex2::A(RamIndex::C(_)))
    }

    pub fn is_i_region(&self) -> bool {
        matches!(self, RamIndex2::A(RamIndex::I(_)) | RamIndex2::Pair(_))
    }

    /// Sort key: (region rank, value, sub-rank, first coordinate).
    fn key(&self) -> (u8, Q, u8, Q) {
        let z = Q::zero();
        match self {
            RamIndex2::A(RamIndex::MinusOne) => (0, z, 0, z),
            RamIndex2::A(RamIndex::Zero) => (1, z, 0, z),
            RamIndex2::A(RamIndex::C(s)) => (2, *s, 0, z),
            RamIndex2::A(RamIndex::I(r)) => (3, *r, 0, z),
            RamIndex2::Pair(p) => (3, p.second, 1, p.first),
        }
    }

    /// Multiplies by a positive rational: componentwise on pairs, on the value
    /// for `(c, ·)` and `(i, ·)`; `-1` and `0` are fixed.
    pub fn scale(&self, s: Q) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::OutOfRange("scale factor must be positive".into()));
        }
        Ok(match self {
            RamIndex2::A(RamIndex::C(v)) => RamIndex2::A(RamIndex::C(*v * s)),
            RamIndex2::A(RamIndex::I(v)) => RamIndex2::A(RamIndex::I(*v * s)),
            RamIndex2::A(a) => RamIndex2::A(*a),
            RamIndex2::Pair(p) => RamIndex2::Pair(p.scale(s)),
        })
    }
}

impl From<RamIndex> for RamIndex2 {
    fn from(a: RamIndex) -> Self {
        RamIndex2::A(a)
    }
}

impl From<Pair> for RamIndex2 {
    fn from(p: Pair) -> Self {
        RamIndex2::Pair(p)
    }
}

impl Ord for RamIndex2 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for RamIndex2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn cmp_index(a: &RamIndex2, b: &RamIndex2) -> Ordering {
    a.cmp(b)
}

pub fn scale_index(a: &RamIndex2, s: Q) -> Result<RamIndex2> {
    a.scale(s)
}

pub fn shift_index(a: Pair, h: Pair) -> Result<Pair> {
    Pair::new(a.first + h.first, a.second + h.second)
}

impl fmt::Display for RamIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamIndex::MinusOne => write!(f, "-1"),
            RamIndex::Zero => write!(f, "0"),
            RamIndex::C(v) => write!(f, "c:{}", fmt_q(v)),
            RamIndex::I(v) => write!(f, "i:{}", fmt_q(v)),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_q(&self.first), fmt_q(&self.second))
    }
}

impl fmt::Display for RamIndex2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamIndex2::A(a) => a.fmt(f),
            RamIndex2::Pair(p) => p.fmt(f),
        }
    }
}

impl FromStr for RamIndex2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match s.as_str() {
            "-1" => return Ok(RamIndex2::minus_one()),
            "0" => return Ok(RamIndex2::zero()),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("c:") {
            return Ok(RamIndex::c(parse_q(v)?)?.into());
        }
        if let Some(v) = s.strip_prefix("i:") {
            return Ok(RamIndex::i(parse_q(v)?)?.into());
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            if let Some((a, b)) = inner.split_once(',') {
                return RamIndex2::pair(parse_q(a)?, parse_q(b)?);
            }
        }
        Err(Error::Parse { pos: 0, msg: format!("unrecognized index `{s}`") })
    }
}

impl FromStr for RamIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<RamIndex2>()? {
            RamIndex2::A(a) => Ok(a),
            RamIndex2::Pair(_) => Err(Error::Parse { pos: 0, msg: format!("`{s}` is not in A") }),
        }
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<RamIndex2>()?
            .as_pair()
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("`{s}` is not a pair") })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(RamIndex);
string_serde!(RamIndex2);
string_serde!(Pair);
