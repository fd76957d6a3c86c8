//! Piecewise-affine Hasse–Herbrand functions on `A` and `A2`.
//!
//! A [`HerbrandFn`] fixes `-1` and `0` and acts separately on the `(c, ·)`
//! ray and on the i-region. On a ray it is a continuous increasing
//! piecewise-linear map of `(0, ∞)` through the origin. In `A2` mode the
//! i-region map is affine with a scalar slope on each segment between
//! consecutive pair knots: `x -> f(k) + s * (x - k)` where `k` is the knot
//! starting the segment (the origin for the first one). Such maps send each
//! slice `{(·, r)}` onto a slice, and their second coordinate is the
//! one-dimensional function of the same knots.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FilteredGroup, Numbering, Subgroup};
use crate::index::{Pair, RamIndex, RamIndex2};
use crate::rational::{fmt_q, parse_q, q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    A2,
}

/// Piecewise-linear increasing bijection of `(0, ∞)` fixing the origin.
/// `slopes[j]` applies on `(knots[j-1], knots[j]]`; the last slope applies
/// past the last knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch1D {
    knots: Vec<Q>,
    slopes: Vec<Q>,
}

/// The `A2` analogue of [`Branch1D`] with knots ordered in `A2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairBranch {
    knots: Vec<Pair>,
    slopes: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IBranch {
    Ray(Branch1D),
    Plane(PairBranch),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerbrandFn {
    mode: Mode,
    c_branch: Branch1D,
    i_branch: IBranch,
}

impl Branch1D {
    pub fn identity() -> Self {
        Branch1D { knots: vec![], slopes: vec![Q::one()] }
    }

    pub fn new(knots: Vec<Q>, slopes: Vec<Q>) -> Result<Self> {
        if slopes.len() != knots.len() + 1 {
            return Err(Error::OutOfRange("need one more slope than knots".into()));
        }
        if knots.first().is_some_and(|k| !k.is_positive()) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange("knots must be positive and increasing".into()));
        }
        if slopes.iter().any(|s| !s.is_positive()) {
            return Err(Error::OutOfRange("slopes must be positive".into()));
        }
        let mut b = Branch1D { knots, slopes };
        b.merge_equal_slopes();
        Ok(b)
    }

    pub fn knots(&self) -> &[Q] {
        &self.knots
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    fn merge_equal_slopes(&mut self) {
        let mut knots = Vec::new();
        let mut slopes = vec![self.slopes[0]];
        for (k, s) in self.knots.iter().zip(&self.slopes[1..]) {
            if slopes.last() == Some(s) {
                continue;
            }
            knots.push(*k);
            slopes.push(*s);
        }
        self.knots = knots;
        self.slopes = slopes;
    }

    fn segment(&self, x: Q) -> usize {
        self.knots.iter().position(|k| x <= *k).unwrap_or(self.knots.len())
    }

    /// Slope of the segment containing `x` (segments are closed on the right).
    pub fn slope_at(&self, x: Q) -> Q {
        self.slopes[self.segment(x)]
    }

    fn knot_images(&self) -> Vec<Q> {
        let mut prev = Q::zero();
        let mut img = Q::zero();
        self.knots
            .iter()
            .zip(&self.slopes)
            .map(|(k, s)| {
                img += *s * (*k - prev);
                prev = *k;
                img
            })
            .collect()
    }

    pub fn eval(&self, x: Q) -> Q {
        let j = self.segment(x);
        let (base, base_img) = if j == 0 {
            (Q::zero(), Q::zero())
        } else {
            (self.knots[j - 1], self.knot_images()[j - 1])
        };
        base_img + self.slopes[j] * (x - base)
    }

    pub fn invert(&self) -> Self {
        Branch1D { knots: self.knot_images(), slopes: self.slopes.iter().map(|s| s.recip()).collect() }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Self {
        let inv = inner.invert();
        let mut knots: Vec<Q> = inner.knots.clone();
        knots.extend(outer.knots.iter().map(|k| inv.eval(*k)));
        knots.sort();
        knots.dedup();
        let beyond = knots.last().copied().unwrap_or(Q::zero()) + Q::one();
        let slopes = knots
            .iter()
            .chain(std::iter::once(&beyond))
            .map(|k| inner.slope_at(*k) * outer.slope_at(inner.eval(*k)))
            .collect();
        let mut b = Branch1D { knots, slopes };
        b.merge_equal_slopes();
        b
    }
}

impl PairBranch {
    pub fn identity() -> Self {
        PairBranch { knots: vec![], slopes: vec![Q::one()] }
    }

    pub fn new(knots: Vec<Pair>, slopes: Vec<Q>) -> Result<Self> {
        if slopes.len() != knots.len() + 1 {
            return Err(Error::OutOfRange("need one more slope than knots".into()));
        }
        if knots.iter().any(|k| !k.second.is_positive()) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange("pair knots must be increasing with positive second coordinate".into()));
        }
        if slopes.iter().any(|s| !s.is_positive()) {
            return Err(Error::OutOfRange("slopes must be positive".into()));
        }
        let mut b = PairBranch { knots, slopes };
        b.merge_equal_slopes();
        Ok(b)
    }

    pub fn knots(&self) -> &[Pair] {
        &self.knots
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    fn merge_equal_slopes(&mut self) {
        let mut knots = Vec::new();
        let mut slopes = vec![self.slopes[0]];
        for (k, s) in self.knots.iter().zip(&self.slopes[1..]) {
            if slopes.last() == Some(s) {
                continue;
            }
            knots.push(*k);
            slopes.push(*s);
        }
        self.knots = knots;
        self.slopes = slopes;
    }

    fn segment_of(&self, x: &RamIndex2) -> usize {
        self.knots
            .iter()
            .position(|k| *x <= RamIndex2::Pair(*k))
            .unwrap_or(self.knots.len())
    }

    pub fn slope_at(&self, x: &RamIndex2) -> Q {
        self.slopes[self.segment_of(x)]
    }

    fn knot_images(&self) -> Vec<Pair> {
        let mut prev = Pair::origin();
        let mut img = Pair::origin();
        self.knots
            .iter()
            .zip(&self.slopes)
            .map(|(k, s)| {
                img = img.add(k.sub(prev).scale(*s));
                prev = *k;
                img
            })
            .collect()
    }

    fn base(&self, j: usize) -> (Pair, Pair) {
        if j == 0 {
            (Pair::origin(), Pair::origin())
        } else {
            (self.knots[j - 1], self.knot_images()[j - 1])
        }
    }

    pub fn eval_pair(&self, x: Pair) -> Pair {
        let j = self.segment_of(&RamIndex2::Pair(x));
        let (base, img) = self.base(j);
        img.add(x.sub(base).scale(self.slopes[j]))
    }

    /// Image of the slice infimum `(i, r)`.
    pub fn eval_slice(&self, r: Q) -> Q {
        let j = self.segment_of(&RamIndex2::A(RamIndex::I(r)));
        let (base, img) = self.base(j);
        img.second + self.slopes[j] * (r - base.second)
    }

    pub fn invert(&self) -> Self {
        PairBranch { knots: self.knot_images(), slopes: self.slopes.iter().map(|s| s.recip()).collect() }
    }

    pub fn compose(outer: &Self, inner: &Self) -> Self {
        let inv = inner.invert();
        let mut knots: Vec<Pair> = inner.knots.clone();
        knots.extend(outer.knots.iter().map(|k| inv.eval_pair(*k)));
        knots.sort();
        knots.dedup();
        let beyond = Pair::raw(Q::zero(), knots.last().map_or(Q::zero(), |k| k.second) + Q::one());
        let slopes = knots
            .iter()
            .chain(std::iter::once(&beyond))
            .map(|k| {
                let x = RamIndex2::Pair(*k);
                inner.slope_at(&x) * outer.slope_at(&RamIndex2::Pair(inner.eval_pair(*k)))
            })
            .collect();
        let mut b = PairBranch { knots, slopes };
        b.merge_equal_slopes();
        b
    }
}

impl HerbrandFn {
    pub fn identity(mode: Mode) -> Self {
        HerbrandFn {
            mode,
            c_branch: Branch1D::identity(),
            i_branch: match mode {
                Mode::A => IBranch::Ray(Branch1D::identity()),
                Mode::A2 => IBranch::Plane(PairBranch::identity()),
            },
        }
    }

    pub fn from_branches(c_branch: Branch1D, i_branch: IBranch) -> Self {
        let mode = match i_branch {
            IBranch::Ray(_) => Mode::A,
            IBranch::Plane(_) => Mode::A2,
        };
        HerbrandFn { mode, c_branch, i_branch }
    }

    /// The function of a degree-`p` step with a single i-region jump at `h`:
    /// slope `p` up to `h`, then slope 1.
    pub fn one_jump(p: u64, h: &RamIndex2) -> Result<Self> {
        let pq = q(p as i64);
        match h {
            RamIndex2::Pair(k) => Ok(HerbrandFn::from_branches(
                Branch1D::identity(),
                IBranch::Plane(PairBranch::new(vec![*k], vec![pq, Q::one()])?),
            )),
            RamIndex2::A(RamIndex::I(r)) => Ok(HerbrandFn::from_branches(
                Branch1D::identity(),
                IBranch::Ray(Branch1D::new(vec![*r], vec![pq, Q::one()])?),
            )),
            other => Err(Error::UnsupportedJump(format!("{other} is not in the i-region"))),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn c_branch(&self) -> &Branch1D {
        &self.c_branch
    }

    pub fn i_branch(&self) -> &IBranch {
        &self.i_branch
    }

    /// `Phi_{L/K}` of a lower-numbered filtration, with ramification index
    /// `e_lk` normalizing the constant branch.
    ///
    /// On the `(c, ·)` ray the slope is `|G_{c,t} / G_I| / e` where `G_I` is the
    /// group at the start of the i-region (so the quotient is the Galois group
    /// of the maximal almost constant subextension). On the i-region the
    /// slope is `|G_t|`.
    pub fn build_phi(fg: &FilteredGroup, e_lk: u64) -> Result<Self> {
        let mode = if fg.has_pair_jumps() { Mode::A2 } else { Mode::A };
        Self::build_phi_in(fg, q(e_lk as i64), mode)
    }

    /// [`build_phi`](Self::build_phi) with `e = |G_0 / G_I|`.
    pub fn build_phi_auto(fg: &FilteredGroup) -> Result<Self> {
        let mode = if fg.has_pair_jumps() { Mode::A2 } else { Mode::A };
        Self::build_phi_in(fg, ramification_index(fg), mode)
    }

    pub fn build_phi_auto_in(fg: &FilteredGroup, mode: Mode) -> Result<Self> {
        Self::build_phi_in(fg, ramification_index(fg), mode)
    }

    pub fn build_phi_in(fg: &FilteredGroup, e_lk: Q, mode: Mode) -> Result<Self> {
        if !e_lk.is_positive() {
            return Err(Error::OutOfRange("ramification index must be positive".into()));
        }
        let order_i = q(fg.relative_order(&i_region_start(fg)) as i64);

        let mut c_knots = Vec::new();
        let mut c_slopes = Vec::new();
        let mut i_knots = Vec::new();
        let mut pair_knots = Vec::new();
        let mut i_slopes = Vec::new();
        for (idx, h) in fg.jumps() {
            let order = q(fg.relative_order(h) as i64);
            match idx {
                RamIndex2::A(RamIndex::C(s)) => {
                    c_knots.push(*s);
                    c_slopes.push(order / order_i / e_lk);
                }
                RamIndex2::A(RamIndex::I(r)) if mode == Mode::A => {
                    i_knots.push(*r);
                    i_slopes.push(order);
                }
                RamIndex2::Pair(pr) if mode == Mode::A2 => {
                    pair_knots.push(*pr);
                    i_slopes.push(order);
                }
                RamIndex2::A(RamIndex::MinusOne | RamIndex::Zero) => {}
                other => {
                    return Err(Error::UnsupportedJump(format!("jump {other} in {mode:?}-mode filtration")))
                }
            }
        }
        c_slopes.push(Q::one() / e_lk);
        i_slopes.push(Q::one());
        let c_branch = Branch1D::new(c_knots, c_slopes)?;
        let i_branch = match mode {
            Mode::A => IBranch::Ray(Branch1D::new(i_knots, i_slopes)?),
            Mode::A2 => IBranch::Plane(PairBranch::new(pair_knots, i_slopes)?),
        };
        Ok(HerbrandFn { mode, c_branch, i_branch })
    }

    pub fn eval(&self, x: &RamIndex2) -> Result<RamIndex2> {
        Ok(match (x, &self.i_branch) {
            (RamIndex2::A(RamIndex::MinusOne | RamIndex::Zero), _) => *x,
            (RamIndex2::A(RamIndex::C(s)), _) => RamIndex2::A(RamIndex::C(self.c_branch.eval(*s))),
            (RamIndex2::A(RamIndex::I(r)), IBranch::Ray(b)) => RamIndex2::A(RamIndex::I(b.eval(*r))),
            (RamIndex2::A(RamIndex::I(r)), IBranch::Plane(b)) => RamIndex2::A(RamIndex::I(b.eval_slice(*r))),
            (RamIndex2::Pair(pr), IBranch::Plane(b)) => RamIndex2::Pair(b.eval_pair(*pr)),
            (RamIndex2::Pair(_), IBranch::Ray(_)) => {
                return Err(Error::ModeMismatch("pair argument for an A-mode function".into()))
            }
        })
    }

    /// Slope of the piece containing `x` (pieces closed on the right);
    /// `None` at `-1` and `0`.
    pub fn slope_at(&self, x: &RamIndex2) -> Option<Q> {
        match (x, &self.i_branch) {
            (RamIndex2::A(RamIndex::C(s)), _) => Some(self.c_branch.slope_at(*s)),
            (RamIndex2::A(RamIndex::I(r)), IBranch::Ray(b)) => Some(b.slope_at(*r)),
            (_, IBranch::Plane(b)) if x.is_i_region() => Some(b.slope_at(x)),
            _ => None,
        }
    }

    pub fn invert(&self) -> Self {
        HerbrandFn {
            mode: self.mode,
            c_branch: self.c_branch.invert(),
            i_branch: match &self.i_branch {
                IBranch::Ray(b) => IBranch::Ray(b.invert()),
                IBranch::Plane(b) => IBranch::Plane(b.invert()),
            },
        }
    }

    /// `outer ∘ inner`; for a tower `K ⊂ M ⊂ L`,
    /// `Phi_{L/K} = compose(Phi_{M/K}, Phi_{L/M})`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let i_branch = match (&outer.i_branch, &inner.i_branch) {
            (IBranch::Ray(o), IBranch::Ray(i)) => IBranch::Ray(Branch1D::compose(o, i)),
            (IBranch::Plane(o), IBranch::Plane(i)) => IBranch::Plane(PairBranch::compose(o, i)),
            _ => return Err(Error::ModeMismatch("compose needs functions of the same mode".into())),
        };
        Ok(HerbrandFn { mode: outer.mode, c_branch: Branch1D::compose(&outer.c_branch, &inner.c_branch), i_branch })
    }

    pub fn to_json(&self) -> HerbrandJson {
        let c_branch = segments_1d(&self.c_branch);
        let i_branch = match &self.i_branch {
            IBranch::Ray(b) => segments_1d(b),
            IBranch::Plane(b) => {
                let mut from = Pair::origin().to_string_raw();
                let mut out = Vec::new();
                for (j, s) in b.slopes.iter().enumerate() {
                    let to = b.knots.get(j).map(|k| k.to_string_raw());
                    out.push(Segment { from: from.clone(), to: to.clone(), slope: fmt_q(s) });
                    if let Some(t) = to {
                        from = t;
                    }
                }
                out
            }
        };
        HerbrandJson { mode: self.mode, c_branch, i_branch }
    }

    pub fn from_json(j: &HerbrandJson) -> Result<Self> {
        let c_branch = branch_from_segments(&j.c_branch)?;
        let i_branch = match j.mode {
            Mode::A => IBranch::Ray(branch_from_segments(&j.i_branch)?),
            Mode::A2 => {
                let (knots, slopes) = split_segments(&j.i_branch, |s| {
                    s.parse::<Pair>().or_else(|_| parse_raw_pair(s))
                })?;
                IBranch::Plane(PairBranch::new(knots, slopes)?)
            }
        };
        Ok(HerbrandFn { mode: j.mode, c_branch, i_branch })
    }
}

/// Same knots, reciprocal slopes. Applied to the `Phi`-shaped function built
/// on an upper filtration this gives `Psi` in upper coordinates.
fn reciprocal_slopes(mut f: HerbrandFn) -> HerbrandFn {
    for s in f.c_branch.slopes.iter_mut() {
        *s = s.recip();
    }
    match &mut f.i_branch {
        IBranch::Ray(b) => b.slopes.iter_mut().for_each(|s| *s = s.recip()),
        IBranch::Plane(b) => b.slopes.iter_mut().for_each(|s| *s = s.recip()),
    }
    f
}

fn reindex_through(fg: &FilteredGroup, f: &HerbrandFn, numbering: Numbering) -> Result<FilteredGroup> {
    let jumps = fg
        .jumps()
        .iter()
        .map(|(i, h)| Ok((f.eval(i)?, h.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(fg.reindexed(jumps, numbering))
}

/// `G^{Phi(alpha)} = G_alpha`: re-index the jumps through `Phi_{L/K}`.
pub fn lower_to_upper(fg: &FilteredGroup) -> Result<FilteredGroup> {
    if fg.numbering() != Numbering::Lower {
        return Err(Error::ModeMismatch("expected a lower-numbered filtration".into()));
    }
    reindex_through(fg, &HerbrandFn::build_phi_auto(fg)?, Numbering::Upper)
}

pub fn upper_to_lower(fg: &FilteredGroup) -> Result<FilteredGroup> {
    if fg.numbering() != Numbering::Upper {
        return Err(Error::ModeMismatch("expected an upper-numbered filtration".into()));
    }
    let psi = reciprocal_slopes(HerbrandFn::build_phi_auto(fg)?);
    reindex_through(fg, &psi, Numbering::Lower)
}

/// Lower filtration of `G/H` from `(G/H)_{Phi_H(alpha)} = G_alpha H / H`,
/// where `Phi_H` is the function of `H_alpha = H ∩ G_alpha`.
pub fn quotient_lower(fg: &FilteredGroup, h: &Subgroup) -> Result<FilteredGroup> {
    if fg.numbering() != Numbering::Lower {
        return Err(Error::ModeMismatch("expected a lower-numbered filtration".into()));
    }
    let mode = if fg.has_pair_jumps() { Mode::A2 } else { Mode::A };
    let sub = fg.subgroup_filtration(h)?;
    let phi_h = HerbrandFn::build_phi_auto_in(&sub, mode)?;
    reindex_through(&fg.image_in_quotient(h)?, &phi_h, Numbering::Lower)
}

/// `(G/H)^alpha = G^alpha H / H` for a lower-numbered `fg`.
pub fn quotient_upper(fg: &FilteredGroup, h: &Subgroup) -> Result<FilteredGroup> {
    lower_to_upper(fg)?.image_in_quotient(h)
}

/// `e(L|K) = |G_0 / G_I|` for a lower-numbered filtration.
pub fn ramification_index(fg: &FilteredGroup) -> Q {
    let g0 = fg.order_at(&RamIndex2::zero());
    let gi = fg.relative_order(&i_region_start(fg));
    Q::new(g0 as i64, gi as i64)
}

fn i_region_start(fg: &FilteredGroup) -> Subgroup {
    fg.jumps()
        .iter()
        .find(|(idx, _)| idx.is_i_region())
        .map(|(_, h)| h.clone())
        .unwrap_or_else(|| fg.modulus().clone())
}

/// One affine piece in the JSON encoding; `to = None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub from: String,
    pub to: Option<String>,
    pub slope: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HerbrandJson {
    pub mode: Mode,
    pub c_branch: Vec<Segment>,
    pub i_branch: Vec<Segment>,
}

trait RawPair {
    fn to_string_raw(&self) -> String;
}

impl RawPair for Pair {
    fn to_string_raw(&self) -> String {
        format!("({},{})", fmt_q(&self.first), fmt_q(&self.second))
    }
}

fn parse_raw_pair(s: &str) -> Result<Pair> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse { pos: 0, msg: format!("bad pair `{s}`") })?;
    let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse { pos: 0, msg: format!("bad pair `{s}`") })?;
    Ok(Pair::raw(parse_q(a)?, parse_q(b)?))
}

fn segments_1d(b: &Branch1D) -> Vec<Segment> {
    let mut from = "0".to_string();
    let mut out = Vec::new();
    for (j, s) in b.slopes.iter().enumerate() {
        let to = b.knots.get(j).map(fmt_q);
        out.push(Segment { from: from.clone(), to: to.clone(), slope: fmt_q(s) });
        if let Some(t) = to {
            from = t;
        }
    }
    out
}

fn split_segments<T>(segs: &[Segment], parse: impl Fn(&str) -> Result<T>) -> Result<(Vec<T>, Vec<Q>)> {
    let mut knots = Vec::new();
    let mut slopes = Vec::new();
    for (j, s) in segs.iter().enumerate() {
        slopes.push(parse_q(&s.slope)?);
        match (&s.to, j + 1 == segs.len()) {
            (Some(t), false) => knots.push(parse(t)?),
            (None, true) => {}
            _ => return Err(Error::Parse { pos: 0, msg: "only the last segment may be unbounded".into() }),
        }
    }
    Ok((knots, slopes))
}

fn branch_from_segments(segs: &[Segment]) -> Result<Branch1D> {
    let (knots, slopes) = split_segments(segs, parse_q)?;
    Branch1D::new(knots, slopes)
}

/// Order-compatibility helper used by the tests: `Phi` must preserve order.
pub fn preserves_order(f: &HerbrandFn, a: &RamIndex2, b: &RamIndex2) -> Result<bool> {
    Ok(a.cmp(b) == f.eval(a)?.cmp(&f.eval(b)?) || a.cmp(b) == Ordering::Equal)
}
