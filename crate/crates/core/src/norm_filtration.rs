//! Norm maps on the filtration indices of `K_2^top`.
//!
//! Only indices are modelled: a norm from a degree-`p` step sends the piece
//! indexed by `alpha` to a piece indexed by `target`, as a subgroup of index
//! `p^cofactor_exponent`. Towers fold the steps and are checked against the
//! composed Herbrand function.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herbrand::HerbrandFn;
use crate::index::{Pair, RamIndex, RamIndex2};
use crate::rational::{fmt_q, q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    Unramified,
    ConstantTotallyRamified,
    FierceDegreeP,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtStep {
    pub kind: StepKind,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<RamIndex2>,
}

impl ExtStep {
    pub fn unramified(p: u64) -> Self {
        ExtStep { kind: StepKind::Unramified, p, jump: None }
    }

    pub fn constant(p: u64) -> Self {
        ExtStep { kind: StepKind::ConstantTotallyRamified, p, jump: None }
    }

    pub fn fierce(p: u64, h: Pair) -> Self {
        ExtStep { kind: StepKind::FierceDegreeP, p, jump: Some(RamIndex2::Pair(h)) }
    }

    fn fierce_jump(&self) -> Result<Pair> {
        match self.jump {
            Some(RamIndex2::Pair(h)) if h.second.is_positive() => Ok(h),
            Some(other) => Err(Error::UnsupportedJump(format!("fierce step needs a pair jump, got {other}"))),
            None => Err(Error::MissingJump),
        }
    }

    /// The step's `Phi_2`: identity unless fierce, where it has slope `p` up
    /// to the jump and slope 1 after it.
    pub fn herbrand(&self) -> Result<HerbrandFn> {
        match self.kind {
            StepKind::FierceDegreeP => HerbrandFn::one_jump(self.p, &RamIndex2::Pair(self.fierce_jump()?)),
            _ => Ok(HerbrandFn::identity(crate::herbrand::Mode::A2)),
        }
    }
}

impl fmt::Display for ExtStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, &self.jump) {
            (StepKind::Unramified, _) => write!(f, "unramified:p={}", self.p),
            (StepKind::ConstantTotallyRamified, _) => write!(f, "constant:p={}", self.p),
            (StepKind::FierceDegreeP, Some(h)) => write!(f, "fierce:p={},h={h}", self.p),
            (StepKind::FierceDegreeP, None) => write!(f, "fierce:p={}", self.p),
        }
    }
}

/// `kind[:p=P][,h=(a,b)]` with kind one of `unramified`, `constant`, `fierce`.
impl FromStr for ExtStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg} in step `{s}`") };
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = match kind.trim() {
            "unramified" | "u" => StepKind::Unramified,
            "constant" | "c" => StepKind::ConstantTotallyRamified,
            "fierce" | "f" => StepKind::FierceDegreeP,
            _ => return Err(bad("unknown kind")),
        };
        let mut p = None;
        let mut jump = None;
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let (key, tail) = rest.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let tail = tail.trim_start();
            // values may contain commas inside parentheses
            let end = if tail.starts_with('(') {
                tail.find(')').map(|i| i + 1).ok_or_else(|| bad("unclosed parenthesis"))?
            } else {
                tail.find(',').unwrap_or(tail.len())
            };
            let value = &tail[..end];
            match key.trim() {
                "p" => p = Some(value.trim().parse::<u64>().map_err(|_| bad("bad p"))?),
                "h" => jump = Some(value.trim().parse::<RamIndex2>()?),
                _ => return Err(bad("unknown key")),
            }
            rest = tail[end..].trim_start().trim_start_matches(',').trim_start();
        }
        let p = p.ok_or_else(|| bad("missing p"))?;
        if !crate::field::is_prime(p) {
            return Err(bad("p is not prime"));
        }
        let step = ExtStep { kind, p, jump };
        if kind == StepKind::FierceDegreeP {
            step.fierce_jump()?;
        }
        Ok(step)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormIndexResult {
    pub target: Pair,
    /// The norm image has index `p^cofactor_exponent` in the target piece.
    pub cofactor_exponent: u32,
}

fn check_alpha(alpha: Pair) -> Result<()> {
    if !alpha.second.is_positive() {
        return Err(Error::OutOfRange(format!("index {alpha} needs a positive second coordinate")));
    }
    Ok(())
}

/// One step: identity for unramified and constant steps; for a fierce step
/// with jump `h`, `alpha + (p-1)h` above the jump and `p alpha` (index `p`)
/// at or below it.
pub fn norm_image_index(alpha: Pair, step: &ExtStep) -> Result<NormIndexResult> {
    check_alpha(alpha)?;
    match step.kind {
        StepKind::Unramified | StepKind::ConstantTotallyRamified => {
            Ok(NormIndexResult { target: alpha, cofactor_exponent: 0 })
        }
        StepKind::FierceDegreeP => {
            let h = step.fierce_jump()?;
            let p = q(step.p as i64);
            if alpha > h {
                Ok(NormIndexResult { target: alpha.add(h.scale(p - Q::one())), cofactor_exponent: 0 })
            } else {
                Ok(NormIndexResult { target: alpha.scale(p), cofactor_exponent: 1 })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerResult {
    pub result: NormIndexResult,
    /// Intermediate indices, starting with `alpha`.
    pub path: Vec<NormIndexResult>,
    /// `Phi_2` of the whole tower.
    pub phi: HerbrandFn,
}

fn log_p_exact(x: Q, p: u64) -> Option<u32> {
    if !x.is_integer() {
        return None;
    }
    let mut v = x.to_integer();
    let mut n = 0;
    while v > 1 {
        if v % p as i64 != 0 {
            return None;
        }
        v /= p as i64;
        n += 1;
    }
    (v == 1).then_some(n)
}

/// Folds the steps in list order: the first step is the top extension, whose
/// norm acts on `alpha` first. The result is checked against the composed
/// `Phi_2 = Phi_last ∘ ... ∘ Phi_first` and its slope `|G_alpha|` at `alpha`.
pub fn tower_norm_index(alpha: Pair, steps: &[ExtStep]) -> Result<TowerResult> {
    check_alpha(alpha)?;
    let p = steps.iter().find(|s| s.kind == StepKind::FierceDegreeP).map(|s| s.p);
    if let Some(p) = p {
        if steps.iter().any(|s| s.kind == StepKind::FierceDegreeP && s.p != p) {
            return Err(Error::OutOfRange("fierce steps of different characteristics".into()));
        }
    }
    let mut cur = NormIndexResult { target: alpha, cofactor_exponent: 0 };
    let mut path = vec![cur.clone()];
    let mut phi = HerbrandFn::identity(crate::herbrand::Mode::A2);
    for step in steps {
        let r = norm_image_index(cur.target, step)?;
        cur = NormIndexResult { target: r.target, cofactor_exponent: cur.cofactor_exponent + r.cofactor_exponent };
        path.push(cur.clone());
        phi = HerbrandFn::compose(&step.herbrand()?, &phi)?;
    }
    let a = RamIndex2::Pair(alpha);
    let predicted = phi.eval(&a)?;
    if predicted != RamIndex2::Pair(cur.target) {
        return Err(Error::InconsistentFold(format!("fold gives {}, Phi_2 gives {predicted}", cur.target)));
    }
    let slope = phi.slope_at(&a).ok_or_else(|| Error::Internal("no slope in the i-region".into()))?;
    let expected = match p {
        Some(p) => log_p_exact(slope, p),
        None => (slope == Q::one()).then_some(0),
    };
    if expected != Some(cur.cofactor_exponent) {
        return Err(Error::InconsistentFold(format!(
            "fold exponent {}, |G_alpha| = {}",
            cur.cofactor_exponent,
            fmt_q(&slope)
        )));
    }
    Ok(TowerResult { result: cur, path, phi })
}

/// JSON form of a tower computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub alpha: Pair,
    pub steps: Vec<ExtStep>,
    pub target: Pair,
    pub index_exponent: u32,
    pub phi_check: bool,
}

impl TowerResult {
    pub fn to_json(&self, alpha: Pair, steps: &[ExtStep]) -> TowerJson {
        TowerJson {
            alpha,
            steps: steps.to_vec(),
            target: self.result.target,
            index_exponent: self.result.cofactor_exponent,
            phi_check: true,
        }
    }
}

/// Labels of the filtration pieces on `K_2^top(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilLabel {
    MinusOne,
    Zero,
    C(Q),
    TopK,
    ISlice(Q),
    Pair(Pair),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilDescriptor {
    pub label: FilLabel,
    pub name: String,
}

impl FilLabel {
    fn rank(&self) -> u8 {
        match self {
            FilLabel::MinusOne => 0,
            FilLabel::Zero => 1,
            FilLabel::C(_) => 2,
            FilLabel::TopK => 3,
            FilLabel::ISlice(_) | FilLabel::Pair(_) => 4,
        }
    }

    /// The underlying index, where there is one.
    pub fn index(&self) -> Option<RamIndex2> {
        match *self {
            FilLabel::MinusOne => Some(RamIndex2::minus_one()),
            FilLabel::Zero => Some(RamIndex2::zero()),
            FilLabel::C(s) => Some(RamIndex2::A(RamIndex::C(s))),
            FilLabel::TopK => None,
            FilLabel::ISlice(r) => Some(RamIndex2::A(RamIndex::I(r))),
            FilLabel::Pair(a) => Some(RamIndex2::Pair(a)),
        }
    }
}

impl Ord for FilLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self.index(), other.index()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for FilLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FilDescriptor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label.cmp(&other.label)
    }
}

impl PartialOrd for FilDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Validated descriptor; earlier in the order means a larger piece.
pub fn fil_descriptor(label: FilLabel) -> Result<FilDescriptor> {
    let name = match label {
        FilLabel::MinusOne => "fil_-1 = K2top(K)".to_string(),
        FilLabel::Zero => "fil_0".to_string(),
        FilLabel::TopK => "T_K".to_string(),
        FilLabel::C(s) | FilLabel::ISlice(s) if !s.is_positive() => {
            return Err(Error::OutOfRange(format!("index {} must be positive", fmt_q(&s))))
        }
        FilLabel::C(s) => format!("fil_(c,{})", fmt_q(&s)),
        FilLabel::ISlice(r) => format!("fil_(i,{})", fmt_q(&r)),
        FilLabel::Pair(a) => {
            check_alpha(a)?;
            format!("fil_{a}")
        }
    };
    Ok(FilDescriptor { label, name })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn pair(a: i64, b: i64) -> Pair {
        Pair::new(q(a), q(b)).unwrap()
    }

    #[test]
    fn single_steps() {
        let r = norm_image_index(pair(1, 2), &ExtStep::unramified(2)).unwrap();
        assert_eq!(r, NormIndexResult { target: pair(1, 2), cofactor_exponent: 0 });
        let r = norm_image_index(pair(1, 2), &ExtStep::constant(3)).unwrap();
        assert_eq!(r.target, pair(1, 2));
        let f = ExtStep::fierce(2, pair(0, 1));
        assert_eq!(
            norm_image_index(pair(0, 4), &f).unwrap(),
            NormIndexResult { target: pair(0, 5), cofactor_exponent: 0 }
        );
        assert_eq!(
            norm_image_index(pair(0, 1), &f).unwrap(),
            NormIndexResult { target: pair(0, 2), cofactor_exponent: 1 }
        );
        let missing = ExtStep { kind: StepKind::FierceDegreeP, p: 2, jump: None };
        assert_eq!(norm_image_index(pair(0, 1), &missing).unwrap_err(), Error::MissingJump);
    }

    #[test]
    fn towers() {
        let alpha = pair(0, 1);
        assert_eq!(tower_norm_index(alpha, &[]).unwrap().result, NormIndexResult { target: alpha, cofactor_exponent: 0 });
        let steps = [ExtStep::fierce(2, pair(0, 1)), ExtStep::fierce(2, pair(0, 3))];
        let r = tower_norm_index(alpha, &steps).unwrap();
        assert_eq!(r.result, NormIndexResult { target: pair(0, 4), cofactor_exponent: 2 });
        assert_eq!(r.path[1].target, pair(0, 2));
        // above both jumps: (0,10) -> (0,11) -> (0,14)
        let r = tower_norm_index(pair(0, 10), &steps).unwrap();
        assert_eq!(r.result, NormIndexResult { target: pair(0, 14), cofactor_exponent: 0 });
        let mixed = [ExtStep::unramified(2), ExtStep::fierce(2, pair(1, 1)), ExtStep::constant(2)];
        let r = tower_norm_index(pair(-1, 1), &mixed).unwrap();
        assert_eq!(r.result, NormIndexResult { target: pair(-2, 2), cofactor_exponent: 1 });
    }

    #[test]
    fn boundary_continuity() {
        for p in [2u64, 3, 5] {
            let h = Pair::new(qr(1, 3), q(2)).unwrap();
            let step = ExtStep::fierce(p, h);
            let at = norm_image_index(h, &step).unwrap().target;
            assert_eq!(at, h.add(h.scale(q(p as i64 - 1))));
        }
    }

    #[test]
    fn step_parsing() {
        let s: ExtStep = "fierce:p=2,h=(0,1)".parse().unwrap();
        assert_eq!(s, ExtStep::fierce(2, pair(0, 1)));
        assert_eq!(s.to_string().parse::<ExtStep>().unwrap(), s);
        assert_eq!("unramified:p=3".parse::<ExtStep>().unwrap(), ExtStep::unramified(3));
        assert_eq!("constant:p=5".parse::<ExtStep>().unwrap(), ExtStep::constant(5));
        assert!("fierce:p=2".parse::<ExtStep>().is_err());
        assert!("fierce:p=4,h=(0,1)".parse::<ExtStep>().is_err());
        assert!("weird:p=2".parse::<ExtStep>().is_err());
    }

    #[test]
    fn descriptor_order() {
        let d = |l| fil_descriptor(l).unwrap();
        assert!(d(FilLabel::MinusOne) < d(FilLabel::Zero));
        assert!(d(FilLabel::Pair(pair(1, 2))) < d(FilLabel::Pair(pair(0, 3))));
        assert!(d(FilLabel::C(q(5))) < d(FilLabel::Pair(pair(0, 1))));
        assert!(d(FilLabel::C(q(500))) < d(FilLabel::TopK));
        assert!(d(FilLabel::TopK) < d(FilLabel::ISlice(qr(1, 100))));
        assert!(fil_descriptor(FilLabel::C(q(0))).is_err());
        assert!(fil_descriptor(FilLabel::Pair(Pair::origin())).is_err());
    }

    #[test]
    fn json_shape() {
        let steps = [ExtStep::fierce(2, pair(0, 1))];
        let r = tower_norm_index(pair(0, 1), &steps).unwrap();
        let v = serde_json::to_value(r.to_json(pair(0, 1), &steps)).unwrap();
        assert_eq!(v["alpha"], "(0,1)");
        assert_eq!(v["target"], "(0,2)");
        assert_eq!(v["index_exponent"], 1);
        assert_eq!(v["steps"][0]["kind"], "FierceDegreeP");
        assert_eq!(v["steps"][0]["jump"], "(0,1)");
        let back: TowerJson = serde_json::from_value(v).unwrap();
        assert_eq!(back.steps, steps);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_pair() -> impl Strategy<Value = Pair> {
            (-20i64..20, 1i64..5, 1i64..30, 1i64..5)
                .prop_map(|(a, da, b, db)| Pair::new(Q::new(a, da), Q::new(b, db)).unwrap())
        }

        fn arb_step() -> impl Strategy<Value = (u64, Pair)> {
            (prop::sample::select(vec![2u64, 3, 5]), arb_pair())
        }

        proptest! {
            #[test]
            fn single_step_matches_one_jump_phi((p, h) in arb_step(), alpha in arb_pair()) {
                let step = ExtStep::fierce(p, h);
                let r = norm_image_index(alpha, &step).unwrap();
                let phi = step.herbrand().unwrap();
                prop_assert_eq!(RamIndex2::Pair(r.target), phi.eval(&RamIndex2::Pair(alpha)).unwrap());
                let order = if alpha <= h { p } else { 1 };
                prop_assert_eq!(p.pow(r.cofactor_exponent), order);
            }

            #[test]
            fn towers_fold_consistently(
                p in prop::sample::select(vec![2u64, 3]),
                hs in prop::collection::vec(arb_pair(), 2..=3),
                a in arb_pair(),
                b in arb_pair(),
            ) {
                let steps: Vec<_> = hs.iter().map(|h| ExtStep::fierce(p, *h)).collect();
                let ra = tower_norm_index(a, &steps).unwrap().result;
                let rb = tower_norm_index(b, &steps).unwrap().result;
                prop_assert_eq!(a.cmp(&b), ra.target.cmp(&rb.target));
            }
        }
    }
}
