//! Degree-`p` Artin–Schreier extensions `L = K(b)`, `b^p - b = a`.
//!
//! The representative `a` is rewritten modulo `wp(K') = {x^p - x}` over
//! `K' = F_q((t))((pi^{1/p^n}))`. The `t^0`-projection commutes with `wp`, so
//! the part of `a` lying in `k = F_q((pi))` (the constant part) and the rest
//! (the fierce part) are reduced independently:
//!
//! * constant part: classical reduction over `k`, removing `c pi^{-pj}` terms;
//! * fierce part: at the deepest level `s^{-D}` (`s = pi^{1/p^n}`) with a
//!   non-constant coefficient `g`, adjoin `s^{1/p}` while `p` does not divide
//!   `D`, then strip the p-th-power monomials of `g`. A non-p-th-power
//!   remainder `r` gives the normal form `s^{-pm} u` with `u(0) = r`.
//!
//! Every run verifies `a - a_reduced = wp(x)` for the recorded `x`, and for
//! fierce kinds recomputes the refined break through the norm oracle.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::element::{Caps, TwoDimElement};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::index::{RamIndex, RamIndex2};
use crate::norm_oracle;
use crate::rational::{divisible_in_units, fmt_q, q, Q};
use crate::series::{InnerSeries, PthRoot};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub caps: Caps,
    /// Maximal number of pi-root adjunctions.
    pub adjunction_cap: u32,
    /// Recompute fierce breaks through resultant norms.
    pub oracle_check: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { caps: Caps::default(), adjunction_cap: 16, oracle_check: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtensionKind {
    Trivial,
    Unramified,
    Constant,
    Fierce,
    Mixed,
}

impl fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FierceData {
    /// pi-exponent of the deepest fierce level, `-pm / p^n`.
    exponent: Q,
    m: i64,
    residue: InnerSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ASNormalForm {
    /// The input after truncation to the analysis caps.
    pub a_input: TwoDimElement,
    pub a_reduced: TwoDimElement,
    /// `a_input - a_reduced = x^p - x`.
    pub x_recorded: TwoDimElement,
    /// The analysis ran over `F_q((pi^{1/p^n}))`.
    pub adjoined_pi_root_exponent: u32,
    pub kind: ExtensionKind,
    /// `u` with `a_reduced - constant_part = s^{-pm} u`.
    pub fierce_unit: Option<TwoDimElement>,
    /// Principal part of `a_reduced` lying in `k`.
    pub constant_part: Option<TwoDimElement>,
    pub certified: bool,
    pub trace: Vec<String>,
    fierce: Option<FierceData>,
    constant_depth: Option<Q>,
}

impl ASNormalForm {
    /// `m` in `s^{-pm} u`.
    pub fn fierce_depth(&self) -> Option<i64> {
        self.fierce.as_ref().map(|f| f.m)
    }

    /// `w(u(0))`, the t-valuation of the fierce residue.
    pub fn fierce_residue_valuation(&self) -> Option<Q> {
        self.fierce.as_ref().and_then(|f| f.residue.valuation())
    }

    pub fn fierce_residue(&self) -> Option<&InnerSeries> {
        self.fierce.as_ref().map(|f| &f.residue)
    }

    /// `-v(constant_part)`, the classical break of the constant part.
    pub fn constant_depth(&self) -> Option<Q> {
        self.constant_depth
    }

    /// `a_reduced` without its constant principal part.
    pub fn fierce_part(&self) -> Result<TwoDimElement> {
        match &self.constant_part {
            Some(c) => self.a_reduced.sub(c),
            None => Ok(self.a_reduced.clone()),
        }
    }

    fn s_power(&self, m: i64) -> Q {
        Q::new(m, self.a_reduced.field().p().pow(self.adjoined_pi_root_exponent) as i64)
    }

    pub fn break_a(&self) -> RamIndex {
        match (self.kind, &self.fierce) {
            (ExtensionKind::Fierce | ExtensionKind::Mixed, Some(f)) => RamIndex::I(self.s_power(f.m)),
            (ExtensionKind::Constant, _) => RamIndex::C(self.constant_depth.unwrap_or_else(Q::zero)),
            _ => RamIndex::MinusOne,
        }
    }

    /// `v(s^m) - v(c)` with `v(c) = (w(u(0)) / p, 0)`.
    pub fn break_a2(&self) -> Result<RamIndex2> {
        let f = self.fierce.as_ref().ok_or_else(|| Error::WrongKind {
            expected: "Fierce or Mixed".into(),
            actual: self.kind.to_string(),
        })?;
        let w = f.residue.valuation().ok_or_else(|| Error::Internal("fierce residue vanished".into()))?;
        let p = q(self.a_reduced.field().p() as i64);
        RamIndex2::pair(-w / p, self.s_power(f.m))
    }

    pub fn report(&self) -> Result<ExtensionReport> {
        let break_a = self.break_a();
        let break_a2 = match self.kind {
            ExtensionKind::Fierce | ExtensionKind::Mixed => self.break_a2()?,
            _ => RamIndex2::A(break_a),
        };
        Ok(ExtensionReport {
            kind: self.kind,
            break_a,
            break_a2,
            adjoined_root_exponent: self.adjoined_pi_root_exponent,
            certified: self.certified,
            trace: self.trace.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub kind: ExtensionKind,
    #[serde(rename = "break_A")]
    pub break_a: RamIndex,
    #[serde(rename = "break_A2")]
    pub break_a2: RamIndex2,
    pub adjoined_root_exponent: u32,
    pub certified: bool,
    pub trace: Vec<String>,
}

fn log_p(d: i64, p: i64) -> u32 {
    let mut n = 0;
    let mut x = 1i64;
    while x < d {
        x *= p;
        n += 1;
    }
    n
}

fn nonconstant(s: &InnerSeries) -> Result<InnerSeries> {
    let c = s.coeff(&Q::zero());
    if c.is_zero() {
        return Ok(s.clone());
    }
    s.sub(&InnerSeries::constant(s.field().clone(), c))
}

fn constant_projection(field: &Arc<PrimeField>, a: &TwoDimElement, keep: impl Fn(&Q) -> bool) -> Result<TwoDimElement> {
    let mut out = TwoDimElement::zero(field.clone()).with_pi_denominator(a.pi_denominator());
    for (e, s) in a.terms() {
        let c = s.coeff(&Q::zero());
        if keep(e) && !c.is_zero() {
            out = out.add(&TwoDimElement::monomial(field.clone(), c, Q::zero(), *e))?;
        }
    }
    Ok(out)
}

struct Reducer {
    field: Arc<PrimeField>,
    p: i64,
    cur: TwoDimElement,
    x: TwoDimElement,
    trace: Vec<String>,
    certified: bool,
}

impl Reducer {
    /// `cur -= wp(y)`, `x += y`.
    fn subtract_wp(&mut self, y: TwoDimElement) -> Result<()> {
        self.cur = self.cur.sub(&y.artin_schreier()?)?;
        self.trace.push(format!("subtract wp({y})"));
        self.x = self.x.add(&y)?;
        Ok(())
    }

    fn fierce_pass(&mut self, n0: u32, cap: u32) -> Result<(u32, Option<FierceData>)> {
        let mut n = n0;
        loop {
            let mut found = None;
            for (e, s) in self.cur.terms() {
                if !e.is_negative() {
                    break;
                }
                let g = nonconstant(s)?;
                if !g.is_zero_known() {
                    found = Some((*e, g));
                    break;
                }
                if !g.is_exact() {
                    self.certified = false;
                }
            }
            let Some((e, g)) = found else { return Ok((n, None)) };
            let pn = self.p.pow(n);
            let depth = -e * q(pn);
            if !depth.is_integer() {
                return Err(Error::Internal(format!("exponent {} outside pi^(1/{pn})", fmt_q(&e))));
            }
            let depth = depth.to_integer();
            if depth % self.p != 0 {
                if n - n0 >= cap {
                    return Err(Error::AdjunctionCapExceeded(cap));
                }
                n += 1;
                self.trace.push(format!(
                    "adjoin pi^(1/{}): depth {} at pi^{} is prime to p",
                    self.p.pow(n),
                    depth,
                    fmt_q(&e)
                ));
                continue;
            }
            let (h, r) = g.split_pth_powers();
            if !h.is_zero_known() {
                let y = TwoDimElement::from_inner(h, e / q(self.p)).with_pi_denominator(pn);
                self.subtract_wp(y)?;
            }
            if r.is_zero_known() {
                if !r.is_exact() {
                    self.certified = false;
                    self.trace.push(format!("p-th power strip at pi^{} exhausted the known terms", fmt_q(&e)));
                }
                continue;
            }
            debug_assert!(matches!(r.pth_root(), Ok(PthRoot::NotAPthPower)));
            self.trace.push(format!("fierce normal form: s^-{} * ({r} + ...), s = pi^(1/{pn})", depth));
            return Ok((n, Some(FierceData { exponent: e, m: depth / self.p, residue: r })));
        }
    }

    fn constant_pass(&mut self, n0: u32) -> Result<()> {
        let unit = self.p.pow(n0);
        let mut after: Option<Q> = None;
        loop {
            let next = self
                .cur
                .terms()
                .filter(|(e, _)| e.is_negative() && after.is_none_or(|a| **e > a))
                .find_map(|(e, s)| {
                    let c = s.coeff(&Q::zero());
                    (!c.is_zero()).then_some((*e, c))
                });
            let Some((e, c)) = next else { return Ok(()) };
            after = Some(e);
            if divisible_in_units(&e, unit, self.p as u64) {
                let root = self.field.pth_root(c);
                let y = TwoDimElement::monomial(self.field.clone(), root, Q::zero(), e / q(self.p))
                    .with_pi_denominator(unit);
                self.subtract_wp(y)?;
            }
        }
    }
}

/// Rewrites `a` modulo `wp` into normal form and classifies it.
pub fn reduce_representative(a: &TwoDimElement, cfg: &AnalysisConfig) -> Result<ASNormalForm> {
    let field = a.field().clone();
    let p = field.p() as i64;
    let d_t = a.t_denominator();
    let a_input = a.truncate(cfg.caps).with_t_denominator(d_t);
    let pi_den = a.terms().map(|(e, _)| *e.denom()).fold(a.pi_denominator(), i64::max);
    let n0 = log_p(pi_den, p);
    let mut red = Reducer {
        field: field.clone(),
        p,
        cur: a_input.clone(),
        x: TwoDimElement::zero(field.clone()),
        trace: Vec::new(),
        certified: true,
    };
    if !a.is_exact() || a_input != *a {
        red.trace.push(format!("truncated to pi-cap {}, t-cap {}", fmt_q(&cfg.caps.pi), fmt_q(&cfg.caps.t)));
    }
    let (n, fierce) = red.fierce_pass(n0, cfg.adjunction_cap)?;
    red.constant_pass(n0)?;

    let constant_part = constant_projection(&field, &red.cur, |e| e.is_negative())?;
    let constant_depth = constant_part.terms().next().map(|(e, _)| -*e);
    let kind = match (constant_depth.is_some(), fierce.is_some()) {
        (true, true) => ExtensionKind::Mixed,
        (true, false) => ExtensionKind::Constant,
        (false, true) => ExtensionKind::Fierce,
        (false, false) => {
            let residue = red
                .cur
                .term(&Q::zero())
                .cloned()
                .unwrap_or_else(|| InnerSeries::zero(field.clone()).with_denominator(d_t));
            match residue.is_artin_schreier_image() {
                Some(true) => ExtensionKind::Trivial,
                Some(false) => ExtensionKind::Unramified,
                None => {
                    red.certified = false;
                    red.trace.push("residue test undecided at this precision".into());
                    ExtensionKind::Unramified
                }
            }
        }
    };
    if kind == ExtensionKind::Mixed {
        red.certified = false;
    }
    let check = a_input.sub(&red.cur)?.sub(&red.x.artin_schreier()?)?;
    if !check.is_zero_known() {
        return Err(Error::Internal(format!("reduction identity fails: residual {check}")));
    }
    let fierce_unit = match &fierce {
        Some(f) => Some(red.cur.sub(&constant_part)?.shift_pi(-f.exponent)),
        None => None,
    };
    red.trace.push(format!("kind {kind}"));
    let mut nf = ASNormalForm {
        a_input,
        a_reduced: red.cur,
        x_recorded: red.x,
        adjoined_pi_root_exponent: n,
        kind,
        fierce_unit,
        constant_part: constant_depth.is_some().then_some(constant_part),
        certified: red.certified,
        trace: red.trace,
        fierce,
        constant_depth,
    };
    if cfg.oracle_check && nf.fierce.is_some() {
        let own = nf.break_a2()?;
        let oracle = norm_oracle::oracle_break_a2(&nf)?;
        if own != oracle {
            return Err(Error::Internal(format!("norm oracle gives {oracle}, reduction gives {own}")));
        }
        nf.trace.push(format!("norm oracle agrees on {own}"));
    }
    Ok(nf)
}

pub fn classify_extension(a: &TwoDimElement, cfg: &AnalysisConfig) -> Result<ExtensionKind> {
    Ok(reduce_representative(a, cfg)?.kind)
}

/// The jump of `Gal(L/K)` in `A`; `-1` for unramified and trivial extensions.
pub fn break_a(a: &TwoDimElement, cfg: &AnalysisConfig) -> Result<RamIndex> {
    Ok(reduce_representative(a, cfg)?.break_a())
}

/// The refined jump in `A2`; only defined for fierce (and mixed) kinds.
pub fn break_a2(a: &TwoDimElement, cfg: &AnalysisConfig) -> Result<RamIndex2> {
    reduce_representative(a, cfg)?.break_a2()
}

pub fn analyze(a: &TwoDimElement, cfg: &AnalysisConfig) -> Result<ExtensionReport> {
    reduce_representative(a, cfg)?.report()
}
