//! Elements of `K = F_q((t))((pi))` and of the root-adjoined fields
//! `F_q((t^{1/d_t}))((pi^{1/d_pi}))`, with the rank-2 valuation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fq, PrimeField};
use crate::rational::{fmt_q, min_opt, q, Q};
use crate::series::{fmt_exp, InnerSeries};

/// Absolute exponent caps applied when a computation would otherwise produce
/// an infinite expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub pi: Q,
    pub t: Q,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { pi: q(40), t: q(40) }
    }
}

impl Caps {
    pub fn doubled(self) -> Self {
        Caps { pi: self.pi * q(2), t: self.t * q(2) }
    }
}

/// The rank-2 value `(v1, v2)`, ordered lexicographically by `(v2, v1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuePair {
    #[serde(with = "crate::rational::serde_q")]
    pub v1: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub v2: Q,
}

#[allow(clippy::should_implement_trait)]
impl ValuePair {
    pub fn new(v1: Q, v2: Q) -> Self {
        ValuePair { v1, v2 }
    }

    pub fn add(self, o: Self) -> Self {
        ValuePair::new(self.v1 + o.v1, self.v2 + o.v2)
    }

    pub fn sub(self, o: Self) -> Self {
        ValuePair::new(self.v1 - o.v1, self.v2 - o.v2)
    }

    pub fn scale(self, s: Q) -> Self {
        ValuePair::new(self.v1 * s, self.v2 * s)
    }
}

impl Ord for ValuePair {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.v2, self.v1).cmp(&(other.v2, other.v1))
    }
}

impl PartialOrd for ValuePair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ValuePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_q(&self.v1), fmt_q(&self.v2))
    }
}

/// A truncated element: a map from pi-exponents to inner t-series.
///
/// Terms are known for pi-exponents strictly below `pi_precision` (`None`:
/// exact). Each inner series carries its own t-precision.
#[derive(Clone, Debug)]
pub struct TwoDimElement {
    field: Arc<PrimeField>,
    terms: BTreeMap<Q, InnerSeries>,
    pi_precision: Option<Q>,
    pi_denominator: i64,
}

impl PartialEq for TwoDimElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
            && self.pi_precision == other.pi_precision
            && self.pi_denominator == other.pi_denominator
    }
}

impl Eq for TwoDimElement {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl TwoDimElement {
    pub fn zero(field: Arc<PrimeField>) -> Self {
        TwoDimElement { field, terms: BTreeMap::new(), pi_precision: None, pi_denominator: 1 }
    }

    pub fn one(field: Arc<PrimeField>) -> Self {
        Self::monomial(field, Fq::ONE, Q::zero(), Q::zero())
    }

    pub fn from_int(field: Arc<PrimeField>, n: i64) -> Self {
        let c = field.from_int(n);
        Self::monomial(field, c, Q::zero(), Q::zero())
    }

    /// `c * t^t_exp * pi^pi_exp`.
    pub fn monomial(field: Arc<PrimeField>, c: Fq, t_exp: Q, pi_exp: Q) -> Self {
        let inner = InnerSeries::monomial(field.clone(), c, t_exp);
        Self::from_inner(inner, pi_exp)
    }

    pub fn t(field: Arc<PrimeField>) -> Self {
        Self::monomial(field, Fq::ONE, q(1), Q::zero())
    }

    pub fn pi(field: Arc<PrimeField>) -> Self {
        Self::monomial(field, Fq::ONE, Q::zero(), q(1))
    }

    /// `inner * pi^pi_exp`.
    pub fn from_inner(inner: InnerSeries, pi_exp: Q) -> Self {
        let field = inner.field().clone();
        let mut terms = BTreeMap::new();
        let exact_zero = inner.is_zero();
        if !exact_zero {
            terms.insert(pi_exp, inner);
        }
        TwoDimElement { field, terms, pi_precision: None, pi_denominator: *pi_exp.denom() }
    }

    pub fn from_terms(
        field: Arc<PrimeField>,
        terms: impl IntoIterator<Item = (Q, InnerSeries)>,
        pi_precision: Option<Q>,
    ) -> Result<Self> {
        let mut out = TwoDimElement { field, terms: BTreeMap::new(), pi_precision, pi_denominator: 1 };
        for (e, s) in terms {
            out.add_term(e, s)?;
        }
        out.normalize();
        Ok(out)
    }

    fn add_term(&mut self, e: Q, s: InnerSeries) -> Result<()> {
        if *e.denom() > self.pi_denominator {
            self.pi_denominator = *e.denom();
        }
        match self.terms.get_mut(&e) {
            Some(existing) => *existing = existing.add(&s)?,
            None => {
                self.terms.insert(e, s);
            }
        }
        Ok(())
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, s| !s.is_zero());
        if let Some(p) = self.pi_precision {
            self.terms.retain(|e, _| *e < p);
        }
    }

    pub fn field(&self) -> &Arc<PrimeField> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &InnerSeries)> {
        self.terms.iter()
    }

    pub fn term(&self, e: &Q) -> Option<&InnerSeries> {
        self.terms.get(e)
    }

    pub fn pi_precision(&self) -> Option<Q> {
        self.pi_precision
    }

    pub fn pi_denominator(&self) -> i64 {
        self.pi_denominator
    }

    /// Largest t-denominator among the inner series.
    pub fn t_denominator(&self) -> i64 {
        self.terms.values().map(|s| s.denominator()).max().unwrap_or(1)
    }

    pub fn with_pi_denominator(mut self, d: i64) -> Self {
        self.pi_denominator = self.pi_denominator.max(d);
        self
    }

    /// Re-declares every inner series over `F_q((t^{1/d}))`.
    pub fn with_t_denominator(mut self, d: i64) -> Self {
        for s in self.terms.values_mut() {
            *s = s.clone().with_denominator(d);
        }
        self
    }

    pub fn is_exact(&self) -> bool {
        self.pi_precision.is_none() && self.terms.values().all(|s| s.is_exact())
    }

    /// Certainly zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.pi_precision.is_none()
    }

    /// No known nonzero coefficient.
    pub fn is_zero_known(&self) -> bool {
        self.terms.values().all(|s| s.is_zero_known())
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Incompatible("elements over different residue fields".into()));
        }
        Ok(())
    }

    /// Truncates to the given absolute caps. Dropped terms are recorded in
    /// the precision fields; nothing is recorded when nothing was dropped.
    pub fn truncate(&self, caps: Caps) -> Self {
        let mut out = self.clone();
        if out.pi_precision.is_none_or(|p| p > caps.pi) {
            let before = out.terms.len();
            out.terms.retain(|e, _| *e < caps.pi);
            if before != out.terms.len() {
                out.pi_precision = Some(caps.pi);
            }
        }
        for s in out.terms.values_mut() {
            *s = s.truncate(caps.t);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let mut out = self.clone();
        out.pi_precision = min_opt(self.pi_precision, other.pi_precision);
        out.pi_denominator = self.pi_denominator.max(other.pi_denominator);
        for (e, s) in &other.terms {
            out.add_term(*e, s.clone())?;
        }
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for s in out.terms.values_mut() {
            *s = s.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Lowest pi-exponent carrying a known nonzero inner series.
    fn lowest_known(&self) -> Option<Q> {
        self.terms.iter().find(|(_, s)| !s.is_zero_known()).map(|(e, _)| *e)
    }

    fn pi_prec_valuation(&self) -> Option<Q> {
        self.terms.keys().next().copied().or(self.pi_precision)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let pi_precision = if self.is_zero() || other.is_zero() {
            None
        } else {
            let a = self.pi_precision.zip(other.pi_prec_valuation()).map(|(p, v)| p + v);
            let b = other.pi_precision.zip(self.pi_prec_valuation()).map(|(p, v)| p + v);
            min_opt(a, b)
        };
        let mut out = TwoDimElement {
            field: self.field.clone(),
            terms: BTreeMap::new(),
            pi_precision,
            pi_denominator: self.pi_denominator.max(other.pi_denominator),
        };
        for (e1, s1) in &self.terms {
            for (e2, s2) in &other.terms {
                let e = *e1 + *e2;
                if pi_precision.is_some_and(|p| e >= p) {
                    continue;
                }
                out.add_term(e, s1.mul(s2)?)?;
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Like [`mul`](Self::mul) followed by truncation to `caps`.
    pub fn mul_capped(&self, other: &Self, caps: Caps) -> Result<Self> {
        Ok(self.mul(other)?.truncate(caps))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = TwoDimElement::one(self.field.clone());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn frobenius(&self) -> Self {
        let p = q(self.field.p() as i64);
        TwoDimElement {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, s)| (*e * p, s.frobenius())).collect(),
            pi_precision: self.pi_precision.map(|x| x * p),
            pi_denominator: self.pi_denominator,
        }
    }

    /// `x^p - x`.
    pub fn artin_schreier(&self) -> Result<Self> {
        self.frobenius().sub(self)
    }

    pub fn scale_inner(&self, s: &InnerSeries) -> Result<Self> {
        self.mul(&TwoDimElement::from_inner(s.clone(), Q::zero()))
    }

    /// Multiplies by `pi^e`.
    pub fn shift_pi(&self, e: Q) -> Self {
        TwoDimElement {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, s)| (*k + e, s.clone())).collect(),
            pi_precision: self.pi_precision.map(|p| p + e),
            pi_denominator: self.pi_denominator.max(*e.denom()),
        }
    }

    /// Inverse by geometric-series expansion after factoring out the leading
    /// term. Infinite expansions are cut at `caps`.
    pub fn inv(&self, caps: Caps) -> Result<Self> {
        let e0 = match self.terms.iter().next() {
            Some((e, s)) if !s.is_zero_known() => *e,
            Some(_) => {
                return Err(Error::PrecisionExhausted("leading pi-coefficient unknown".into()))
            }
            None if self.pi_precision.is_none() => return Err(Error::DivisionByZero),
            None => return Err(Error::PrecisionExhausted("element is zero to precision".into())),
        };
        let lead = &self.terms[&e0];
        let lead_inv = lead.inv(caps.t)?;
        let lead_inv_el = TwoDimElement::from_inner(lead_inv, Q::zero());
        // self = pi^e0 * lead * (1 + y)
        let unit = self.shift_pi(-e0).mul(&lead_inv_el)?.truncate(caps);
        let y = unit.sub(&TwoDimElement::one(self.field.clone()))?;
        let rel = match self.pi_precision {
            Some(p) => p - e0,
            None if y.is_zero() => {
                return Ok(lead_inv_el.shift_pi(-e0).with_pi_denominator(self.pi_denominator));
            }
            None => caps.pi + e0,
        };
        if !rel.is_positive() {
            return Err(Error::PrecisionExhausted("inverse has no certain pi-terms".into()));
        }
        let rel_caps = Caps { pi: rel, t: caps.t };
        let y = y.truncate(rel_caps);
        let neg_y = y.neg();
        let mut sum = TwoDimElement::one(self.field.clone());
        let mut term = sum.clone();
        let step = y.lowest_known().unwrap_or(rel);
        if !step.is_positive() {
            return Err(Error::Internal("unit part has nonpositive tail".into()));
        }
        let mut depth = Q::zero();
        while depth < rel {
            term = term.mul(&neg_y)?.truncate(rel_caps);
            sum = sum.add(&term)?;
            depth += step;
        }
        let mut sum = sum.truncate(rel_caps);
        if sum.pi_precision.is_none_or(|p| p > rel) {
            sum.pi_precision = Some(rel);
        }
        let out = sum.mul(&lead_inv_el)?.shift_pi(-e0);
        Ok(out.with_pi_denominator(self.pi_denominator))
    }

    /// Dispatches one of the four field operations.
    pub fn arith(op: ArithOp, x: &Self, y: Option<&Self>, caps: Caps) -> Result<Self> {
        let need = || Error::Incompatible("binary operation needs two operands".into());
        match op {
            ArithOp::Add => x.add(y.ok_or_else(need)?),
            ArithOp::Mul => x.mul(y.ok_or_else(need)?),
            ArithOp::Neg => Ok(x.neg()),
            ArithOp::Inv => x.inv(caps),
        }
    }

    /// The rank-2 valuation `(v1, v2)`: `v2` is the pi-adic order with
    /// `v(pi) = 1`, `v1` the t-adic order (with `w(t) = 1`) of the leading
    /// pi-coefficient.
    pub fn valuation(&self) -> Result<ValuePair> {
        match self.terms.iter().next() {
            Some((e, s)) => match s.valuation() {
                Some(w) => Ok(ValuePair::new(w, *e)),
                None => Err(Error::PrecisionExhausted("leading coefficient unknown".into())),
            },
            None if self.pi_precision.is_none() => {
                Err(Error::Incompatible("valuation of zero".into()))
            }
            None => Err(Error::PrecisionExhausted("element is zero to precision".into())),
        }
    }

    /// Image in the residue field `F_q((t^{1/d_t}))`.
    pub fn residue(&self) -> Result<InnerSeries> {
        if self.terms.keys().next().is_some_and(|e| e.is_negative()) {
            return Err(Error::NotIntegral);
        }
        if self.pi_precision.is_some_and(|p| !p.is_positive()) {
            return Err(Error::PrecisionExhausted("pi^0 coefficient unknown".into()));
        }
        Ok(self
            .terms
            .get(&Q::zero())
            .cloned()
            .unwrap_or_else(|| InnerSeries::zero(self.field.clone()))
            .with_denominator(self.t_denominator()))
    }

    /// Part with pi-exponents strictly below zero.
    pub fn principal_part(&self) -> Self {
        self.filter_pi(|e| e.is_negative())
    }

    pub fn filter_pi(&self, keep: impl Fn(&Q) -> bool) -> Self {
        TwoDimElement {
            field: self.field.clone(),
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, s)| (*e, s.clone())).collect(),
            pi_precision: None,
            pi_denominator: self.pi_denominator,
        }
    }
}

impl fmt::Display for TwoDimElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, s) in &self.terms {
            for (te, c) in s.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let mut factors = Vec::new();
                let trivial = c.0 == 1 && self.field.degree() == 1;
                if !trivial {
                    factors.push(self.field.fmt_elem(*c));
                }
                if !te.is_zero() {
                    factors.push(if *te == q(1) { "t".into() } else { format!("t^{}", fmt_exp(te)) });
                }
                if !e.is_zero() {
                    factors.push(if *e == q(1) { "pi".into() } else { format!("pi^{}", fmt_exp(e)) });
                }
                if factors.is_empty() {
                    factors.push("1".into());
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(p) = self.pi_precision {
            write!(f, " + O(pi^{})", fmt_exp(&p))?;
        }
        Ok(())
    }
}
