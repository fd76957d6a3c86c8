//! Truncated Laurent series over `F_q` in `t^{1/d}` (the residue field `k_K`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Fq, PrimeField};
use crate::rational::{divisible_in_units, fmt_q, min_opt, q, Q};

/// A Laurent series in `t` with exponents in `(1/d_t) Z`, `d_t` a power of `p`.
///
/// Coefficients are known for every exponent strictly below `precision`;
/// `None` means the series is exact (a Laurent polynomial).
#[derive(Clone, Debug)]
pub struct InnerSeries {
    field: Arc<PrimeField>,
    coeffs: BTreeMap<Q, Fq>,
    precision: Option<Q>,
    denominator: i64,
}

impl PartialEq for InnerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && self.precision == other.precision
            && self.denominator == other.denominator
            && self.field == other.field
    }
}

impl Eq for InnerSeries {}

/// Outcome of [`InnerSeries::pth_root`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PthRoot {
    Root(InnerSeries),
    NotAPthPower,
}

impl InnerSeries {
    pub fn zero(field: Arc<PrimeField>) -> Self {
        InnerSeries { field, coeffs: BTreeMap::new(), precision: None, denominator: 1 }
    }

    pub fn constant(field: Arc<PrimeField>, c: Fq) -> Self {
        Self::monomial(field, c, Q::zero())
    }

    pub fn monomial(field: Arc<PrimeField>, c: Fq, exp: Q) -> Self {
        let denominator = *exp.denom();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        InnerSeries { field, coeffs, precision: None, denominator }
    }

    /// Builds a series from raw terms; zero coefficients are pruned and terms
    /// at or above `precision` are dropped.
    pub fn from_terms(
        field: Arc<PrimeField>,
        terms: impl IntoIterator<Item = (Q, Fq)>,
        precision: Option<Q>,
        denominator: i64,
    ) -> Self {
        let mut s = InnerSeries { field, coeffs: BTreeMap::new(), precision, denominator };
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s.normalize();
        s
    }

    fn add_term(&mut self, e: Q, c: Fq) {
        let k = &self.field;
        let entry = self.coeffs.entry(e).or_insert(Fq::ZERO);
        *entry = k.add(*entry, c);
        if *e.denom() > self.denominator {
            self.denominator = *e.denom();
        }
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
        if let Some(prec) = self.precision {
            self.coeffs.retain(|e, _| *e < prec);
        }
    }

    pub fn field(&self) -> &Arc<PrimeField> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Fq)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, e: &Q) -> Fq {
        self.coeffs.get(e).copied().unwrap_or(Fq::ZERO)
    }

    pub fn precision(&self) -> Option<Q> {
        self.precision
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn with_denominator(mut self, d: i64) -> Self {
        self.denominator = self.denominator.max(d);
        self
    }

    /// No known nonzero coefficient (it may still be nonzero beyond precision).
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Certainly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.precision.is_none()
    }

    /// Leading exponent `w(self)`, if a nonzero coefficient is known.
    pub fn valuation(&self) -> Option<Q> {
        self.coeffs.keys().next().copied()
    }

    /// Valuation used in precision propagation: the leading exponent, or the
    /// precision for a series that is zero to precision.
    fn prec_valuation(&self) -> Option<Q> {
        self.valuation().or(self.precision)
    }

    pub fn leading(&self) -> Option<(Q, Fq)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, *c))
    }

    /// Drops everything at or above `cap`, recording the loss in `precision`.
    pub fn truncate(&self, cap: Q) -> Self {
        let mut out = self.clone();
        if out.precision.is_some_and(|p| p <= cap) {
            return out;
        }
        let before = out.coeffs.len();
        out.coeffs.retain(|e, _| *e < cap);
        if out.coeffs.len() != before {
            out.precision = Some(cap);
        }
        out
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Incompatible("series over different residue fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let mut out = self.clone();
        out.precision = min_opt(self.precision, other.precision);
        out.denominator = self.denominator.max(other.denominator);
        for (e, c) in &other.coeffs {
            out.add_term(*e, *c);
        }
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = self.field.neg(*c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fq) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = self.field.mul(*v, c);
        }
        out.normalize();
        out
    }

    /// Multiplies by `t^e`.
    pub fn shift(&self, e: Q) -> Self {
        InnerSeries {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (*k + e, *c)).collect(),
            precision: self.precision.map(|p| p + e),
            denominator: self.denominator.max(*e.denom()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let precision = match (self.precision, other.precision) {
            (None, None) => None,
            _ => {
                let a = self.precision.zip(other.prec_valuation()).map(|(p, v)| p + v);
                let b = other.precision.zip(self.prec_valuation()).map(|(p, v)| p + v);
                match (self.is_zero(), other.is_zero()) {
                    (true, _) | (_, true) => None,
                    _ => min_opt(a, b),
                }
            }
        };
        let mut out = InnerSeries {
            field: self.field.clone(),
            coeffs: BTreeMap::new(),
            precision,
            denominator: self.denominator.max(other.denominator),
        };
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = *e1 + *e2;
                if precision.is_some_and(|p| e >= p) {
                    continue;
                }
                out.add_term(e, self.field.mul(*c1, *c2));
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = InnerSeries::constant(self.field.clone(), Fq::ONE);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `x -> x^p`, computed termwise (additive in characteristic `p`).
    pub fn frobenius(&self) -> Self {
        let p = q(self.field.p() as i64);
        InnerSeries {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e * p, self.field.frobenius(*c)))
                .collect(),
            precision: self.precision.map(|x| x * p),
            denominator: self.denominator,
        }
    }

    /// Multiplicative inverse. Exact non-monomial inputs are expanded up to the
    /// absolute exponent `cap`; inexact inputs keep their relative precision.
    pub fn inv(&self, cap: Q) -> Result<Self> {
        let (w, c) = self.leading().ok_or(Error::DivisionByZero)?;
        let k = self.field.clone();
        let c_inv = k.inv(c)?;
        // self = c t^w (1 + y) with v(y) > 0
        let unit = self.shift(-w).scale(c_inv);
        let y = unit.sub(&InnerSeries::constant(k.clone(), Fq::ONE))?;
        let rel = match self.precision {
            Some(p) => p - w,
            None if y.is_zero() => {
                return Ok(InnerSeries::monomial(k, c_inv, -w).with_denominator(self.denominator));
            }
            None => cap + w,
        };
        if !rel.is_positive() {
            return Err(Error::PrecisionExhausted("inverse has no certain terms".into()));
        }
        let y = y.truncate(rel);
        let step = y.valuation().unwrap_or(rel);
        let mut sum = InnerSeries::constant(k.clone(), Fq::ONE);
        let mut term = sum.clone();
        let neg_y = y.neg();
        let mut depth = Q::zero();
        while depth < rel {
            term = term.mul(&neg_y)?.truncate(rel);
            if term.is_zero_known() && term.precision.is_none_or(|p| p >= rel) {
                break;
            }
            sum = sum.add(&term)?;
            depth += step;
        }
        let mut sum = sum.truncate(rel);
        if sum.precision.is_none_or(|p| p > rel) {
            sum.precision = Some(rel);
        }
        Ok(sum.shift(-w).scale(c_inv).with_denominator(self.denominator))
    }

    /// Decides whether `self` is a p-th power in `F_q((t^{1/d}))`, `d` being
    /// the series' denominator, and returns the root when it is.
    ///
    /// A truncated series is decided only on its known range; an inexact
    /// series whose known part is a p-th power reports precision exhaustion.
    pub fn pth_root(&self) -> Result<PthRoot> {
        if self.is_zero_known() && !self.is_exact() {
            return Err(Error::PrecisionExhausted("cannot decide p-th power of an unknown series".into()));
        }
        let p = self.field.p();
        if self.coeffs.keys().any(|e| !divisible_in_units(e, self.denominator, p)) {
            return Ok(PthRoot::NotAPthPower);
        }
        if !self.is_exact() {
            return Err(Error::PrecisionExhausted(
                "known part is a p-th power; higher terms undecided".into(),
            ));
        }
        let pq = q(p as i64);
        Ok(PthRoot::Root(InnerSeries {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (*e / pq, self.field.pth_root(*c))).collect(),
            precision: None,
            denominator: self.denominator,
        }))
    }

    /// Splits into `(h^p, rest)` where `h^p` collects the monomials that are
    /// p-th powers and `rest` the others. Returns `h` and `rest`.
    pub fn split_pth_powers(&self) -> (InnerSeries, InnerSeries) {
        let p = self.field.p();
        let pq = q(p as i64);
        let mut root = InnerSeries::zero(self.field.clone()).with_denominator(self.denominator);
        let mut rest = InnerSeries::zero(self.field.clone()).with_denominator(self.denominator);
        for (e, c) in &self.coeffs {
            if divisible_in_units(e, self.denominator, p) {
                root.coeffs.insert(*e / pq, self.field.pth_root(*c));
            } else {
                rest.coeffs.insert(*e, *c);
            }
        }
        rest.precision = self.precision;
        root.precision = self.precision.map(|x| x / pq);
        (root, rest)
    }

    /// Whether `self` lies in `wp(F_q((t^{1/d})))`, `wp(x) = x^p - x`.
    /// Returns `None` when the answer depends on unknown coefficients.
    pub fn is_artin_schreier_image(&self) -> Option<bool> {
        let p = q(self.field.p() as i64);
        let mut s = self.clone();
        if s.precision.is_some_and(|prec| prec <= Q::zero()) {
            return None;
        }
        while let Some((e, c)) = s.leading() {
            if !e.is_negative() {
                break;
            }
            if !divisible_in_units(&e, s.denominator, self.field.p()) {
                return Some(false);
            }
            // c t^e = (c^{1/p} t^{e/p})^p ~ c^{1/p} t^{e/p}
            let root = self.field.pth_root(c);
            s.coeffs.remove(&e);
            s.add_term(e / p, root);
            s.normalize();
        }
        let c0 = s.coeff(&Q::zero());
        Some(self.field.is_artin_schreier_image(c0))
    }
}

impl std::fmt::Display for InnerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cs = self.field.fmt_elem(*c);
            if e.is_zero() {
                write!(f, "{cs}")?;
            } else if c.0 == 1 && self.field.degree() == 1 {
                write!(f, "t^{}", fmt_exp(e))?;
            } else {
                write!(f, "{cs}*t^{}", fmt_exp(e))?;
            }
        }
        if let Some(p) = self.precision {
            write!(f, " + O(t^{})", fmt_exp(&p))?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_exp(e: &Q) -> String {
    if e.is_integer() {
        fmt_q(e)
    } else {
        format!("({})", fmt_q(e))
    }
}
