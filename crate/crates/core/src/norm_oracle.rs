//! Valuations of norms from `L = K(b)`, `b^p - b = a`, computed through
//! resultants: `N(f(b)) = ±Res_x(x^p - x - a, f)` and `v_L = v_K(N(·)) / p`.
//!
//! Only the valuation of the resultant is needed, so the Euclidean sequence
//! runs on pseudo-remainders and the leading-coefficient powers are tracked as
//! valuations. No element is ever inverted.

use num_traits::Zero;

use crate::artin_schreier::{ASNormalForm, ExtensionKind};
use crate::element::{TwoDimElement, ValuePair};
use crate::error::{Error, Result};
use crate::index::RamIndex2;
use crate::rational::{q, Q};

/// Dense polynomial over `K`, coefficients from degree 0 upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<TwoDimElement>,
}

impl Poly {
    pub fn new(coeffs: Vec<TwoDimElement>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: TwoDimElement) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[TwoDimElement] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> Result<&TwoDimElement> {
        let c = self.coeffs.last().ok_or(Error::ZeroResultant)?;
        if c.is_zero_known() {
            return Err(Error::PrecisionExhausted("leading coefficient undetermined".into()));
        }
        Ok(c)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b)?,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            });
        }
        Ok(Poly::new(out))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&Poly { coeffs: o.coeffs.iter().map(|c| c.neg()).collect() })
    }

    pub fn scale(&self, c: &TwoDimElement) -> Result<Self> {
        Ok(Poly::new(self.coeffs.iter().map(|x| x.mul(c)).collect::<Result<_>>()?))
    }

    /// Multiplies by `x^k`.
    fn shift(&self, k: usize, zero: &TwoDimElement) -> Self {
        let mut coeffs = vec![zero.clone(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// `f(x + 1)`.
    pub fn taylor_shift_one(&self) -> Result<Self> {
        let Some(first) = self.coeffs.first() else { return Ok(self.clone()) };
        let field = first.field().clone();
        let zero = TwoDimElement::zero(field.clone());
        let mut out = vec![zero; self.coeffs.len()];
        // binomial rows mod p
        let p = field.p() as i64;
        let mut row = vec![1i64];
        for (j, c) in self.coeffs.iter().enumerate() {
            for (k, b) in row.iter().enumerate() {
                if *b % p != 0 {
                    let bk = TwoDimElement::from_int(field.clone(), *b);
                    out[k] = out[k].add(&c.mul(&bk)?)?;
                }
            }
            let mut next = vec![1i64; j + 2];
            for k in 1..=j {
                next[k] = (row[k - 1] + row[k]) % p;
            }
            row = next;
        }
        Ok(Poly::new(out))
    }

    /// `f(x + 1) - f(x)`, i.e. `sigma(f(b)) - f(b)` for `sigma(b) = b + 1`.
    pub fn galois_difference(&self) -> Result<Self> {
        self.taylor_shift_one()?.sub(self)
    }
}

/// Pseudo-remainder: `lc(B)^k A mod B` with the `k` actually used.
fn pseudo_rem(a: &Poly, b: &Poly) -> Result<(Poly, u32)> {
    let lc = b.lead()?.clone();
    let m = b.degree().ok_or(Error::ZeroResultant)?;
    let zero = TwoDimElement::zero(lc.field().clone());
    let mut r = a.clone();
    let mut k = 0;
    while let Some(d) = r.degree() {
        if d < m {
            break;
        }
        let lr = r.lead()?.clone();
        r = r.scale(&lc)?.sub(&b.scale(&lr)?.shift(d - m, &zero))?;
        // the top coefficient cancels exactly; drop it if precision kept it
        if r.degree() == Some(d) {
            r.coeffs.pop();
            r.trim();
        }
        k += 1;
    }
    Ok((r, k))
}

fn lead_valuation(p: &Poly) -> Result<ValuePair> {
    p.lead()?.valuation()
}

/// `v(Res(A, B))`.
pub fn resultant_valuation(a: &Poly, b: &Poly) -> Result<ValuePair> {
    let n = a.degree().ok_or(Error::ZeroResultant)?;
    let m = b.degree().ok_or(Error::ZeroResultant)?;
    if m == 0 {
        return Ok(b.lead()?.valuation()?.scale(q(n as i64)));
    }
    if n < m {
        return resultant_valuation(b, a);
    }
    let vlc = lead_valuation(b)?;
    let (r, k) = pseudo_rem(a, b)?;
    let rdeg = r.degree().ok_or(Error::ZeroResultant)?;
    // Res(A,B) = ±lc^{n-r} Res(B, R), Res(B, lc^k R) = lc^{k m} Res(B, R)
    let inner = resultant_valuation(b, &r)?;
    let shift = q(n as i64 - rdeg as i64) - q(k as i64 * m as i64);
    Ok(inner.add(vlc.scale(shift)))
}

/// `x^p - x - a`.
pub fn artin_schreier_poly(a: &TwoDimElement) -> Poly {
    let field = a.field().clone();
    let p = field.p() as usize;
    let zero = TwoDimElement::zero(field.clone());
    let mut coeffs = vec![zero; p + 1];
    coeffs[0] = a.neg();
    coeffs[1] = TwoDimElement::from_int(field.clone(), -1);
    coeffs[p] = coeffs[p].add(&TwoDimElement::one(field)).expect("same field");
    Poly::new(coeffs)
}

/// `v_K(N_{L/K}(f(b)))`.
pub fn norm_valuation(a: &TwoDimElement, f: &Poly) -> Result<ValuePair> {
    if f.is_zero() {
        return Err(Error::ZeroResultant);
    }
    resultant_valuation(&artin_schreier_poly(a), f)
}

/// `v_L(f(b)) = v_K(N(f(b))) / p`.
pub fn valuation_in_extension(a: &TwoDimElement, f: &Poly) -> Result<ValuePair> {
    let p = a.field().p() as i64;
    Ok(norm_valuation(a, f)?.scale(Q::new(1, p)))
}

/// `v_L(sigma(f(b)) - f(b))`.
pub fn oracle_break_via_norm(a: &TwoDimElement, f: &Poly) -> Result<ValuePair> {
    let g = f.galois_difference()?;
    if g.is_zero() {
        return Err(Error::OutOfRange("polynomial is invariant under b -> b + 1".into()));
    }
    valuation_in_extension(a, &g)
}

/// `s^m = pi^{m / p^n}` for a fierce normal form.
pub fn fierce_scale(nf: &ASNormalForm) -> Result<TwoDimElement> {
    let m = nf.fierce_depth().ok_or_else(|| Error::WrongKind {
        expected: "Fierce or Mixed".into(),
        actual: nf.kind.to_string(),
    })?;
    let field = nf.a_reduced.field().clone();
    let pn = (field.p() as i64).pow(nf.adjoined_pi_root_exponent);
    Ok(TwoDimElement::monomial(field, crate::field::Fq::ONE, Q::zero(), Q::new(m, pn)).with_pi_denominator(pn))
}

/// The refined break `v_L(sigma(c) - c) - v_L(c)` for `c = s^m b`, where `b`
/// solves the equation of the fierce part of the normal form.
pub fn oracle_break_a2(nf: &ASNormalForm) -> Result<RamIndex2> {
    if !matches!(nf.kind, ExtensionKind::Fierce | ExtensionKind::Mixed) {
        return Err(Error::WrongKind { expected: "Fierce or Mixed".into(), actual: nf.kind.to_string() });
    }
    let a = nf.fierce_part()?;
    let field = a.field().clone();
    let sm = fierce_scale(nf)?;
    let zero = TwoDimElement::zero(field);
    let c = Poly::new(vec![zero, sm]);
    let v_diff = oracle_break_via_norm(&a, &c)?;
    let v_c = valuation_in_extension(&a, &c)?;
    let d = v_diff.sub(v_c);
    RamIndex2::pair(d.v1, d.v2)
}

/// `v_L(sigma(c) - c)` predicted for `f = sum_j z_j c^j` (`1 <= j < p`):
/// `v(s^m) + min_j (v(z_j) + (j - 1) v_L(c))`.
pub fn predicted_difference_valuation(nf: &ASNormalForm, z: &[TwoDimElement]) -> Result<Option<ValuePair>> {
    let sm = fierce_scale(nf)?.valuation()?;
    let w = nf.fierce_residue_valuation().ok_or(Error::Internal("missing fierce residue".into()))?;
    let p = nf.a_reduced.field().p() as i64;
    let vc = ValuePair::new(w / q(p), Q::zero());
    let mut best: Option<ValuePair> = None;
    for (j, zj) in z.iter().enumerate().skip(1) {
        if zj.is_zero() {
            continue;
        }
        let v = sm.add(zj.valuation()?).add(vc.scale(q(j as i64 - 1)));
        best = Some(best.map_or(v, |b| b.min(v)));
    }
    Ok(best)
}

/// `f(x) = sum_j z_j (s^m x)^j`.
pub fn poly_in_c(nf: &ASNormalForm, z: &[TwoDimElement]) -> Result<Poly> {
    let sm = fierce_scale(nf)?;
    let mut pow = TwoDimElement::one(sm.field().clone());
    let mut coeffs = Vec::with_capacity(z.len());
    for zj in z {
        coeffs.push(zj.mul(&pow)?);
        pow = pow.mul(&sm)?;
    }
    Ok(Poly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::parse::parse_element;
    use std::sync::Arc;

    fn field(p: u64) -> Arc<PrimeField> {
        Arc::new(PrimeField::new(p, 1).unwrap())
    }

    #[test]
    fn linear_resultant_by_hand() {
        let f = field(2);
        let a = parse_element("pi^-2*t", f.clone()).unwrap();
        let g = Poly::constant(parse_element("pi", f.clone()).unwrap());
        assert_eq!(norm_valuation(&a, &g).unwrap(), ValuePair::new(q(0), q(2)));
        let c = Poly::new(vec![TwoDimElement::zero(f.clone()), parse_element("pi", f).unwrap()]);
        assert_eq!(oracle_break_via_norm(&a, &c).unwrap(), ValuePair::new(q(0), q(1)));
    }

    #[test]
    fn norm_of_b_is_a() {
        // N(b) = ±a
        for p in [2, 3, 5] {
            let f = field(p);
            let a = parse_element("pi^-3*t^2 + t^-1 + 1", f.clone()).unwrap();
            let b = Poly::new(vec![TwoDimElement::zero(f.clone()), TwoDimElement::one(f)]);
            assert_eq!(norm_valuation(&a, &b).unwrap(), a.valuation().unwrap());
        }
    }

    #[test]
    fn norm_of_quadratic_matches_product_of_roots() {
        // p = 3, a = t: roots b, b+1, b+2; N(b^2 + 1) = prod((b+j)^2 + 1)
        let f = field(3);
        let a = parse_element("pi^-4*t", f.clone()).unwrap();
        let one = TwoDimElement::one(f.clone());
        let g = Poly::new(vec![one.clone(), TwoDimElement::zero(f.clone()), one]);
        // v_L(b) = v(a)/3 = (1/3, -4/3); b^2 dominates, so v_L(b^2 + 1) = 2 v_L(b)
        let v = valuation_in_extension(&a, &g).unwrap();
        assert_eq!(v, ValuePair::new(Q::new(2, 3), Q::new(-8, 3)));
    }

    #[test]
    fn invariant_polynomial_is_rejected() {
        let f = field(3);
        let a = parse_element("pi^-1*t", f.clone()).unwrap();
        assert!(oracle_break_via_norm(&a, &Poly::constant(TwoDimElement::one(f.clone()))).is_err());
        // x^3 - x is also invariant
        let z = TwoDimElement::zero(f.clone());
        let one = TwoDimElement::one(f.clone());
        let g = Poly::new(vec![z.clone(), one.neg(), z, one]);
        assert!(oracle_break_via_norm(&a, &g).is_err());
    }

    #[test]
    fn taylor_shift() {
        let f = field(5);
        let one = TwoDimElement::one(f.clone());
        let z = TwoDimElement::zero(f.clone());
        // x^2 -> x^2 + 2x + 1
        let g = Poly::new(vec![z.clone(), z, one.clone()]).taylor_shift_one().unwrap();
        let two = TwoDimElement::from_int(f, 2);
        assert_eq!(g, Poly::new(vec![one.clone(), two, one]));
    }
}
