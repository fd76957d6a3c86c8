//! The finite residue field `F_q`, `q = p^f`.
//!
//! Elements are stored as their base-`p` digit vector packed into a `u32`
//! (coefficients of the polynomial basis `1, g, g^2, ...`). Multiplication goes
//! through discrete-log tables built once per field, which keeps `Fq` a plain
//! `Copy` value.

use std::fmt;

use crate::error::{Error, Result};

const MAX_ORDER: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `F_{p^f}` with an explicit primitive (hence irreducible) defining polynomial.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    f: u32,
    q: u64,
    /// Monic defining polynomial, low degree first, length `f + 1`.
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}

impl Eq for PrimeField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{f} exceeds {MAX_ORDER}")))?;

        // Search monic polynomials of degree f for one where the class of x has
        // order q - 1; such a polynomial is irreducible.
        for tail in 0..p.pow(f) {
            let mut modulus: Vec<u64> = digits(tail as u32, p, f as usize);
            modulus.push(1);
            if f > 1 && modulus[0] == 0 {
                continue;
            }
            if let Some((exp, log)) = build_tables(p, f, q, &modulus) {
                return Ok(PrimeField { p, f, q, modulus, exp, log });
            }
        }
        Err(Error::InvalidField(format!("no primitive polynomial of degree {f} over F_{p}")))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.f == 1 {
            return Fq(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        let (mut x, mut y, mut out, mut place) = (a.0 as u64, b.0 as u64, 0u64, 1u64);
        for _ in 0..self.f {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fq(out as u32)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.f == 1 {
            return Fq(((self.p - a.0 as u64) % self.p) as u32);
        }
        let (mut x, mut out, mut place) = (a.0 as u64, 0u64, 1u64);
        for _ in 0..self.f {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fq(out as u32)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.is_zero() || b.is_zero() {
            return Fq::ZERO;
        }
        let n = self.q - 1;
        let l = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        Fq(self.exp[l as usize])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = (n - self.log[a.0 as usize] as u64) % n;
        Ok(Fq(self.exp[l as usize]))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.is_zero() {
            return Fq::ZERO;
        }
        let n = self.q - 1;
        let l = (self.log[a.0 as usize] as u128 * e as u128 % n as u128) as usize;
        Fq(self.exp[l])
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p)
    }

    /// Inverse Frobenius; every element of a finite field is a p-th power.
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.pow(a, self.q / self.p)
    }

    /// Absolute trace `F_q -> F_p`, returned as an integer in `[0, p)`.
    pub fn trace(&self, a: Fq) -> u64 {
        let mut acc = Fq::ZERO;
        let mut x = a;
        for _ in 0..self.f {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        debug_assert!((acc.0 as u64) < self.p);
        acc.0 as u64
    }

    /// `a^p - a = c` is solvable in `F_q` iff the trace of `c` vanishes.
    pub fn is_artin_schreier_image(&self, c: Fq) -> bool {
        self.trace(c) == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q as u32).map(Fq)
    }

    pub fn fmt_elem(&self, a: Fq) -> String {
        if self.f == 1 {
            return a.0.to_string();
        }
        let d = digits(a.0, self.p, self.f as usize);
        format!("[{}]", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.f)
    }
}

fn digits(mut x: u32, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x as u64 % p);
        x /= p as u32;
    }
    out
}

fn pack(d: &[u64], p: u64) -> u32 {
    d.iter().rev().fold(0u64, |acc, &x| acc * p + x) as u32
}

/// Builds exp/log tables when `x` is primitive modulo `modulus`.
fn build_tables(p: u64, f: u32, q: u64, modulus: &[u64]) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = (q - 1) as usize;
    let mut exp = Vec::with_capacity(n);
    let mut log = vec![u32::MAX; q as usize];
    let mut cur = vec![0u64; f as usize];
    cur[0] = 1;
    let gen = if f == 1 { None } else { Some(()) };
    // For f = 1 the "x" of F_p[x]/(x - c) is the constant c = -modulus[0].
    let c = (p - modulus[0] % p) % p;
    for k in 0..n {
        let packed = pack(&cur, p);
        if log[packed as usize] != u32::MAX {
            return None;
        }
        log[packed as usize] = k as u32;
        exp.push(packed);
        match gen {
            None => cur[0] = cur[0] * c % p,
            Some(()) => {
                // multiply by x and reduce by the monic modulus
                let top = cur[f as usize - 1];
                for i in (1..f as usize).rev() {
                    cur[i] = cur[i - 1];
                }
                cur[0] = 0;
                for i in 0..f as usize {
                    cur[i] = (cur[i] + p * p - top * modulus[i] % p) % p;
                }
            }
        }
    }
    if pack(&cur, p) != 1 {
        return None;
    }
    log[0] = 0;
    Some((exp, log))
}
