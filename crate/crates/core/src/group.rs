//! Finite abelian groups as products of cyclic groups, their subgroups, and
//! filtrations indexed by `A` / `A2`.
//!
//! A [`FilteredGroup`] lives inside a fixed ambient group: the filtered group
//! is `top / modulus` for two subgroups `modulus ⊆ top` of the ambient group.
//! Subgroups and quotients are then just different choices of `top` and
//! `modulus`, which keeps every subgroup comparable by plain set operations.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::RamIndex2;

/// Exhaustive subgroup checks are limited to groups of this many elements.
pub const MAX_GROUP_ORDER: usize = 1 << 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<u32>,
    order: usize,
}

pub type Element = Vec<u32>;

impl AbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::OutOfRange("cyclic factor of order 0".into()));
        }
        let order = factors.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n as usize));
        match order {
            Some(order) if order <= MAX_GROUP_ORDER => Ok(AbelianGroup { factors, order }),
            _ => Err(Error::OutOfRange(format!("group order exceeds {MAX_GROUP_ORDER}"))),
        }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn encode(&self, e: &[u32]) -> usize {
        e.iter().zip(&self.factors).fold(0usize, |acc, (&x, &n)| acc * n as usize + (x % n) as usize)
    }

    pub fn decode(&self, mut code: usize) -> Element {
        let mut out = vec![0; self.factors.len()];
        for (slot, &n) in out.iter_mut().zip(&self.factors).rev() {
            *slot = (code % n as usize) as u32;
            code /= n as usize;
        }
        out
    }

    fn add_codes(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.decode(a), self.decode(b));
        let sum: Element = x.iter().zip(&y).zip(&self.factors).map(|((a, b), n)| (a + b) % n).collect();
        self.encode(&sum)
    }

    /// The subgroup generated by `gens`.
    pub fn span(self: &Arc<Self>, gens: &[Element]) -> Subgroup {
        let codes: Vec<usize> = gens.iter().map(|g| self.encode(g)).collect();
        let mut members = ElementSet::new(self.order);
        members.insert(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &codes {
                let y = self.add_codes(x, g);
                if members.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup { group: self.clone(), members }
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        let mut members = ElementSet::new(self.order);
        (0..self.order).for_each(|i| {
            members.insert(i);
        });
        Subgroup { group: self.clone(), members }
    }

    pub fn trivial(self: &Arc<Self>) -> Subgroup {
        self.span(&[])
    }

    /// `m * G`.
    pub fn multiple(self: &Arc<Self>, m: u32) -> Subgroup {
        let gens: Vec<Element> = (0..self.factors.len())
            .map(|i| {
                let mut e = vec![0; self.factors.len()];
                e[i] = m % self.factors[i];
                e
            })
            .collect();
        self.span(&gens)
    }

    /// Every subgroup, found by closing the trivial subgroup under adjoining
    /// one cyclic subgroup at a time.
    pub fn all_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let cyclic: Vec<Subgroup> = {
            let mut seen = HashSet::new();
            (0..self.order)
                .map(|c| self.span(&[self.decode(c)]))
                .filter(|s| seen.insert(s.members.clone()))
                .collect()
        };
        let mut seen: HashSet<ElementSet> = HashSet::new();
        let trivial = self.trivial();
        seen.insert(trivial.members.clone());
        let mut out = vec![trivial];
        let mut frontier = 0;
        while frontier < out.len() {
            let current = out[frontier].clone();
            frontier += 1;
            for c in &cyclic {
                if c.is_subgroup_of(&current) {
                    continue;
                }
                let joined = current.join(c);
                if seen.insert(joined.members.clone()) {
                    out.push(joined);
                }
            }
        }
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", if parts.is_empty() { "1".into() } else { parts.join(" x ") })
    }
}

/// Bitset over the encoded elements of the ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementSet(Vec<u64>);

impl ElementSet {
    fn new(n: usize) -> Self {
        ElementSet(vec![0; n.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let fresh = self.0[w] >> b & 1 == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    group: Arc<AbelianGroup>,
    members: ElementSet,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && self.group == other.group
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl Subgroup {
    pub fn group(&self) -> &Arc<AbelianGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: &[u32]) -> bool {
        self.members.contains(self.group.encode(e))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.0.iter().zip(&other.members.0).all(|(a, b)| a & !b == 0)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let words = self.members.0.iter().zip(&other.members.0).map(|(a, b)| a & b).collect();
        Subgroup { group: self.group.clone(), members: ElementSet(words) }
    }

    /// `self + other`.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        self.group.span(&gens)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.iter().map(|c| self.group.decode(c))
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self) -> Vec<Element> {
        let mut gens = Vec::new();
        let mut span = self.group.trivial();
        for code in self.members.iter() {
            if !span.members.contains(code) {
                gens.push(self.group.decode(code));
                span = self.group.span(&gens);
            }
            if span.order() == self.order() {
                break;
            }
        }
        gens
    }

    /// Closure check: a nonempty set closed under addition is a subgroup of a
    /// finite group.
    pub fn from_elements(group: &Arc<AbelianGroup>, elements: &[Element]) -> Result<Subgroup> {
        let mut members = ElementSet::new(group.order());
        for e in elements {
            if e.len() != group.factors().len() {
                return Err(Error::NotASubgroup("element has the wrong arity".into()));
            }
            members.insert(group.encode(e));
        }
        let codes: Vec<usize> = members.iter().collect();
        if !members.contains(0) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &a in &codes {
            for &b in &codes {
                if !members.contains(group.add_codes(a, b)) {
                    return Err(Error::NotASubgroup("not closed under addition".into()));
                }
            }
        }
        Ok(Subgroup { group: group.clone(), members })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Numbering {
    Lower,
    Upper,
}

/// A finite abelian group `top / modulus` with a decreasing filtration given
/// by finitely many jumps.
///
/// `jumps` is sorted by index; the subgroup at index `beta` is the subgroup
/// of the first jump whose index is `>= beta` (right-continuous steps), and
/// the trivial group past the last jump. Listed subgroups all contain
/// `modulus` and lie in `top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredGroup {
    top: Subgroup,
    modulus: Subgroup,
    jumps: Vec<(RamIndex2, Subgroup)>,
    numbering: Numbering,
}

impl FilteredGroup {
    /// Validates and canonicalizes: jumps must be strictly increasing with a
    /// decreasing chain of subgroups starting at the whole group; redundant
    /// jumps (equal to the next step, or trivial) are dropped.
    pub fn new(
        top: Subgroup,
        modulus: Subgroup,
        jumps: Vec<(RamIndex2, Subgroup)>,
        numbering: Numbering,
    ) -> Result<Self> {
        if !modulus.is_subgroup_of(&top) {
            return Err(Error::NotASubgroup("modulus is not contained in the group".into()));
        }
        for w in jumps.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::NotAChain(format!("indices {} and {} not increasing", w[0].0, w[1].0)));
            }
            if !w[1].1.is_subgroup_of(&w[0].1) {
                return Err(Error::NotAChain(format!("subgroup at {} not inside the previous one", w[1].0)));
            }
        }
        for (idx, h) in &jumps {
            if !modulus.is_subgroup_of(h) || !h.is_subgroup_of(&top) {
                return Err(Error::NotAChain(format!("subgroup at {idx} outside [modulus, group]")));
            }
        }
        if let Some((_, first)) = jumps.first() {
            if first != &top {
                return Err(Error::NotAChain("first jump must carry the whole group".into()));
            }
        }
        let mut fg = FilteredGroup { top, modulus, jumps, numbering };
        fg.canonicalize();
        Ok(fg)
    }

    /// Shorthand for a filtration on the whole ambient group.
    pub fn on_group(group: &Arc<AbelianGroup>, jumps: Vec<(RamIndex2, Subgroup)>, numbering: Numbering) -> Result<Self> {
        Self::new(group.whole(), group.trivial(), jumps, numbering)
    }

    fn canonicalize(&mut self) {
        let modulus = self.modulus.clone();
        let mut out: Vec<(RamIndex2, Subgroup)> = Vec::new();
        for (idx, h) in self.jumps.drain(..).rev() {
            if h == modulus {
                continue;
            }
            if out.last().is_some_and(|(_, next)| *next == h) {
                continue;
            }
            out.push((idx, h));
        }
        out.reverse();
        self.jumps = out;
    }

    pub fn top(&self) -> &Subgroup {
        &self.top
    }

    pub fn modulus(&self) -> &Subgroup {
        &self.modulus
    }

    pub fn ambient(&self) -> &Arc<AbelianGroup> {
        self.top.group()
    }

    pub fn jumps(&self) -> &[(RamIndex2, Subgroup)] {
        &self.jumps
    }

    pub fn numbering(&self) -> Numbering {
        self.numbering
    }

    /// `|top / modulus|`.
    pub fn order(&self) -> usize {
        self.top.order() / self.modulus.order()
    }

    pub fn relative_order(&self, h: &Subgroup) -> usize {
        h.order() / self.modulus.order()
    }

    /// `G_beta` (or `G^beta` for upper numbering), as a subgroup of the ambient group.
    pub fn at(&self, beta: &RamIndex2) -> Subgroup {
        if *beta == RamIndex2::minus_one() {
            return self.top.clone();
        }
        self.jumps
            .iter()
            .find(|(idx, _)| idx >= beta)
            .map(|(_, h)| h.clone())
            .unwrap_or_else(|| self.modulus.clone())
    }

    pub fn order_at(&self, beta: &RamIndex2) -> usize {
        self.relative_order(&self.at(beta))
    }

    /// Whether any jump is a pair, i.e. the filtration is genuinely `A2`-indexed.
    pub fn has_pair_jumps(&self) -> bool {
        self.jumps.iter().any(|(i, _)| matches!(i, RamIndex2::Pair(_)))
    }

    /// Same data with new indices (used by numbering changes).
    pub(crate) fn reindexed(&self, jumps: Vec<(RamIndex2, Subgroup)>, numbering: Numbering) -> Self {
        let mut fg = FilteredGroup { top: self.top.clone(), modulus: self.modulus.clone(), jumps, numbering };
        fg.canonicalize();
        fg
    }

    /// `H_alpha = H ∩ G_alpha`, as a filtration on `H / modulus`.
    pub fn subgroup_filtration(&self, h: &Subgroup) -> Result<FilteredGroup> {
        self.check_between(h)?;
        let jumps = self.jumps.iter().map(|(i, g)| (*i, g.intersect(h))).collect();
        let mut fg = FilteredGroup { top: h.clone(), modulus: self.modulus.clone(), jumps, numbering: self.numbering };
        fg.canonicalize();
        Ok(fg)
    }

    /// Image filtration `G_alpha H / H` on `G / H` with the same indices.
    /// For upper numbering this is `(G/H)^alpha`.
    pub fn image_in_quotient(&self, h: &Subgroup) -> Result<FilteredGroup> {
        self.check_between(h)?;
        let jumps = self.jumps.iter().map(|(i, g)| (*i, g.join(h))).collect();
        let mut fg = FilteredGroup { top: self.top.clone(), modulus: h.clone(), jumps, numbering: self.numbering };
        fg.canonicalize();
        Ok(fg)
    }

    fn check_between(&self, h: &Subgroup) -> Result<()> {
        if !h.is_subgroup_of(&self.top) || !self.modulus.is_subgroup_of(h) {
            return Err(Error::NotASubgroup("subgroup must lie between the modulus and the group".into()));
        }
        Ok(())
    }
}

/// Serializable form: `{cyclic_factors, top, modulus, numbering, jumps: [{index, generators}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredGroupJson {
    pub cyclic_factors: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<Element>>,
    #[serde(default = "lower")]
    pub numbering: Numbering,
    pub jumps: Vec<JumpJson>,
}

fn lower() -> Numbering {
    Numbering::Lower
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpJson {
    pub index: RamIndex2,
    pub generators: Vec<Element>,
}

impl FilteredGroup {
    pub fn to_json(&self) -> FilteredGroupJson {
        let g = self.ambient();
        let whole = g.whole();
        let trivial = g.trivial();
        FilteredGroupJson {
            cyclic_factors: g.factors().to_vec(),
            top: (self.top != whole).then(|| self.top.generators()),
            modulus: (self.modulus != trivial).then(|| self.modulus.generators()),
            numbering: self.numbering,
            jumps: self
                .jumps
                .iter()
                .map(|(index, h)| JumpJson { index: *index, generators: h.generators() })
                .collect(),
        }
    }

    pub fn from_json(j: &FilteredGroupJson) -> Result<Self> {
        let g = Arc::new(AbelianGroup::new(j.cyclic_factors.clone())?);
        let top = j.top.as_ref().map_or_else(|| g.whole(), |gens| g.span(gens));
        let modulus = j.modulus.as_ref().map_or_else(|| g.trivial(), |gens| g.span(gens));
        let jumps = j.jumps.iter().map(|jj| (jj.index, g.span(&jj.generators).join(&modulus))).collect();
        FilteredGroup::new(top, modulus, jumps, j.numbering)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn i(r: i64) -> RamIndex2 {
        RamIndex2::A(crate::index::RamIndex::I(q(r)))
    }

    #[test]
    fn subgroup_counts() {
        // Z/4 x Z/2 has 8 subgroups; Z/2^3 has 16.
        let g = Arc::new(AbelianGroup::new(vec![4, 2]).unwrap());
        assert_eq!(g.all_subgroups().len(), 8);
        let e = Arc::new(AbelianGroup::new(vec![2, 2, 2]).unwrap());
        assert_eq!(e.all_subgroups().len(), 16);
        let c = Arc::new(AbelianGroup::new(vec![9]).unwrap());
        assert_eq!(c.all_subgroups().len(), 3);
    }

    #[test]
    fn closure_check() {
        let g = Arc::new(AbelianGroup::new(vec![4]).unwrap());
        assert!(Subgroup::from_elements(&g, &[vec![0], vec![2]]).is_ok());
        assert!(Subgroup::from_elements(&g, &[vec![0], vec![1]]).is_err());
        assert!(Subgroup::from_elements(&g, &[vec![2]]).is_err());
    }

    #[test]
    fn filtration_lookup_and_chain_checks() {
        let g = Arc::new(AbelianGroup::new(vec![4]).unwrap());
        let fg = FilteredGroup::on_group(&g, vec![(i(1), g.whole()), (i(3), g.multiple(2))], Numbering::Lower).unwrap();
        assert_eq!(fg.order_at(&RamIndex2::minus_one()), 4);
        assert_eq!(fg.order_at(&i(1)), 4);
        assert_eq!(fg.order_at(&i(2)), 2);
        assert_eq!(fg.order_at(&i(3)), 2);
        assert_eq!(fg.order_at(&i(4)), 1);
        // not a chain
        assert!(FilteredGroup::on_group(&g, vec![(i(1), g.multiple(2)), (i(3), g.whole())], Numbering::Lower).is_err());
        // first jump must be the whole group
        assert!(FilteredGroup::on_group(&g, vec![(i(1), g.multiple(2))], Numbering::Lower).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Arc::new(AbelianGroup::new(vec![4, 2]).unwrap());
        let fg = FilteredGroup::on_group(&g, vec![(i(1), g.whole()), (i(2), g.multiple(2))], Numbering::Lower).unwrap();
        let back = FilteredGroup::from_json(&fg.to_json()).unwrap();
        assert_eq!(back, fg);
    }
}
