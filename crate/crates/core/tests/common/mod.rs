#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ramify_core::field::Fq;
use ramify_core::group::{AbelianGroup, FilteredGroup, Numbering, Subgroup};
use ramify_core::{Mode, Pair, PrimeField, RamIndex, RamIndex2, TwoDimElement, Q};

pub fn field(p: u64) -> Arc<PrimeField> {
    Arc::new(PrimeField::new(p, 1).unwrap())
}

fn nonzero_coeff(rng: &mut ChaCha8Rng, f: &PrimeField) -> Fq {
    f.from_int(rng.gen_range(1..f.p() as i64))
}

pub fn mono(f: &Arc<PrimeField>, c: Fq, t: i64, pi: i64) -> TwoDimElement {
    TwoDimElement::monomial(f.clone(), c, Q::from_integer(t), Q::from_integer(pi))
}

fn add(a: TwoDimElement, b: TwoDimElement) -> TwoDimElement {
    a.add(&b).unwrap()
}

/// `pi^-d * g + (shallower non-constant terms) + (integral terms)` with `g`
/// containing a non-p-th-power t-monomial and no `t^0` term.
pub fn random_fierce(rng: &mut ChaCha8Rng, f: &Arc<PrimeField>, max_depth: i64) -> TwoDimElement {
    let p = f.p() as i64;
    let d = rng.gen_range(1..=max_depth);
    let mut a = TwoDimElement::zero(f.clone());
    let mut lead = rng.gen_range(-4..=6);
    while lead == 0 || lead % p == 0 {
        lead = rng.gen_range(-4..=6);
    }
    a = add(a, mono(f, nonzero_coeff(rng, f), lead, -d));
    for _ in 0..rng.gen_range(0..3) {
        let j = *[-3i64, -1, 1, 2, 3, 4, 6].choose(rng).unwrap();
        a = add(a, mono(f, nonzero_coeff(rng, f), j, -d));
    }
    for _ in 0..rng.gen_range(0..4) {
        let k = rng.gen_range(-d..=3);
        let mut j = rng.gen_range(-3..=5);
        if k < 0 && j == 0 {
            j = 1;
        }
        a = add(a, mono(f, nonzero_coeff(rng, f), j, k));
    }
    a
}

/// Any kind: constant, fierce, mixed or integral.
pub fn random_element(rng: &mut ChaCha8Rng, f: &Arc<PrimeField>) -> TwoDimElement {
    match rng.gen_range(0..4) {
        0 => random_fierce(rng, f, 12),
        1 => {
            let i = rng.gen_range(1..=12);
            add(mono(f, nonzero_coeff(rng, f), 0, -i), mono(f, nonzero_coeff(rng, f), rng.gen_range(0..3), 1))
        }
        2 => add(random_fierce(rng, f, 8), mono(f, nonzero_coeff(rng, f), 0, -rng.gen_range(1..=8))),
        _ => add(mono(f, nonzero_coeff(rng, f), rng.gen_range(-3..=3), 0), mono(f, nonzero_coeff(rng, f), 1, 2)),
    }
}

/// `x` in `K` with pi-depth at most `depth`.
pub fn random_x(rng: &mut ChaCha8Rng, f: &Arc<PrimeField>, depth: i64) -> TwoDimElement {
    let mut x = TwoDimElement::zero(f.clone());
    for _ in 0..rng.gen_range(1..=3) {
        x = add(x, mono(f, nonzero_coeff(rng, f), rng.gen_range(-3..=4), rng.gen_range(-depth..=3)));
    }
    x
}

/// Random rank-2 element with integral exponents, possibly zero.
pub fn random_plain(rng: &mut ChaCha8Rng, f: &Arc<PrimeField>) -> TwoDimElement {
    let mut x = TwoDimElement::zero(f.clone());
    for _ in 0..rng.gen_range(1..=4) {
        x = add(x, mono(f, nonzero_coeff(rng, f), rng.gen_range(-5..=5), rng.gen_range(-5..=5)));
    }
    x
}

pub fn random_index(rng: &mut ChaCha8Rng, mode: Mode) -> RamIndex2 {
    let r = Q::new(rng.gen_range(1..60), [1, 2, 3, 4][rng.gen_range(0..4)]);
    match rng.gen_range(0..8) {
        0 => RamIndex2::minus_one(),
        1 => RamIndex2::zero(),
        2 | 3 => RamIndex2::A(RamIndex::C(r)),
        _ if mode == Mode::A => RamIndex2::A(RamIndex::I(r)),
        4 => RamIndex2::A(RamIndex::I(r)),
        _ => RamIndex2::pair(Q::new(rng.gen_range(-9..9), [1, 2, 3][rng.gen_range(0..3)]), r).unwrap(),
    }
}

pub fn random_pair(rng: &mut ChaCha8Rng) -> Pair {
    Pair::new(
        Q::new(rng.gen_range(-12..12), [1, 2, 4][rng.gen_range(0..3)]),
        Q::new(rng.gen_range(1..40), [1, 2, 3][rng.gen_range(0..3)]),
    )
    .unwrap()
}

/// Abelian p-group shapes of order at most 256 and rank at most 3.
pub fn random_shape(rng: &mut ChaCha8Rng) -> Vec<u32> {
    loop {
        let p = *[2u32, 3, 5, 7].choose(rng).unwrap();
        let rank = rng.gen_range(1..=3);
        let shape: Vec<u32> = (0..rank).map(|_| p.pow(rng.gen_range(1..=4))).collect();
        if shape.iter().product::<u32>() <= 256 {
            return shape;
        }
    }
}

/// A filtration with 1 to 3 jumps below the whole group, at distinct random
/// indices in the given mode.
pub fn random_filtration(rng: &mut ChaCha8Rng, g: &Arc<AbelianGroup>, subs: &[Subgroup], mode: Mode) -> FilteredGroup {
    let mut chain = vec![g.whole()];
    let jumps = rng.gen_range(1..=3);
    while chain.len() < jumps {
        let cur = chain.last().unwrap();
        let smaller: Vec<_> = subs.iter().filter(|s| s.is_subgroup_of(cur) && *s != cur).collect();
        match smaller.choose(rng) {
            Some(s) => chain.push((*s).clone()),
            None => break,
        }
    }
    let mut idxs: Vec<RamIndex2> = Vec::new();
    while idxs.len() < chain.len() {
        let i = random_index(rng, mode);
        let slice_in_a2 = mode == Mode::A2 && matches!(i, RamIndex2::A(RamIndex::I(_)));
        if i != RamIndex2::minus_one() && !slice_in_a2 {
            idxs.push(i);
            idxs.sort();
            idxs.dedup();
        }
    }
    FilteredGroup::on_group(g, idxs.into_iter().zip(chain).collect(), Numbering::Lower).unwrap()
}
