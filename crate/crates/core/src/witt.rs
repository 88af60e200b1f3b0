//! Length-two Witt vectors over `F_p[x]` and the operator `Δ₁`.
//!
//! `Δ₁(a)` is defined through the monomial decomposition `a = Σ M_i` by
//! `(0, Δ₁(a)) = (a, 0) - Σ (M_i, 0)` in `W₂`. Splitting the term list in two
//! halves `A + B` gives `Δ₁(A + B) = Δ₁(A) + Δ₁(B) + Σ_{i=1}^{p-1} c_i A^i B^{p-i}`
//! with `c_i = binom(p, i) / p`, which is how it is computed here.

use crate::error::{Error, Result};
use crate::poly::{same_ring, Polynomial};

/// `(w0, w1)` in `W₂(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct W2Element {
    pub w0: Polynomial,
    pub w1: Polynomial,
}

impl W2Element {
    pub fn new(w0: Polynomial, w1: Polynomial) -> Result<Self> {
        if !same_ring(w0.ring(), w1.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(W2Element { w0, w1 })
    }

    /// `[a] = (a, 0)`.
    pub fn teichmuller(a: Polynomial) -> Self {
        let z = Polynomial::zero(a.ring());
        W2Element { w0: a, w1: z }
    }

    /// `V[b] = (0, b)`.
    pub fn verschiebung(b: Polynomial) -> Self {
        let z = Polynomial::zero(b.ring());
        W2Element { w0: z, w1: b }
    }

    pub fn zero_like(&self) -> Self {
        W2Element::teichmuller(Polynomial::zero(self.w0.ring()))
    }

    fn check(&self, other: &W2Element) -> Result<()> {
        if same_ring(self.w0.ring(), other.w0.ring()) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }
}

/// `Σ_{i=1}^{p-1} c_i a^i b^{p-i}`: the carry of `(a, 0) + (b, 0)` up to sign.
pub fn witt_carry(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let field = a.field();
    let p = field.characteristic() as usize;
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.ring());
    }
    let mut apow = vec![a.clone()];
    let mut bpow = vec![b.clone()];
    for i in 1..p - 1 {
        apow.push(&apow[i - 1] * a);
        bpow.push(&bpow[i - 1] * b);
    }
    let mut acc = Polynomial::zero(a.ring());
    let one = crate::monomial::Monomial::one(a.ring().nvars());
    for i in 1..p {
        let term = &apow[i - 1] * &bpow[p - i - 1];
        acc = acc.add_scaled(&term, field.witt_carry_coefficient(i as u32), &one);
    }
    acc
}

pub fn w2_add(x: &W2Element, y: &W2Element) -> Result<W2Element> {
    x.check(y)?;
    let carry = witt_carry(&x.w0, &y.w0);
    Ok(W2Element {
        w0: &x.w0 + &y.w0,
        w1: &(&x.w1 + &y.w1) - &carry,
    })
}

pub fn w2_neg(x: &W2Element) -> W2Element {
    if x.w0.ring().p() == 2 {
        // (x0, x1) + (x0, x1 + x0^2) = (0, 0) in characteristic 2
        W2Element {
            w0: x.w0.clone(),
            w1: &x.w1 + &(&x.w0 * &x.w0),
        }
    } else {
        W2Element {
            w0: -&x.w0,
            w1: -&x.w1,
        }
    }
}

pub fn w2_sub(x: &W2Element, y: &W2Element) -> Result<W2Element> {
    w2_add(x, &w2_neg(y))
}

pub fn w2_mul(x: &W2Element, y: &W2Element) -> Result<W2Element> {
    x.check(y)?;
    let xp = x.w0.frobenius(1);
    let yp = y.w0.frobenius(1);
    Ok(W2Element {
        w0: &x.w0 * &y.w0,
        w1: &(&xp * &y.w1) + &(&yp * &x.w1),
    })
}

/// `Δ₁(a)` for the decomposition of `a` into its terms.
pub fn delta1(a: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return a.clone();
    }
    let parts: Vec<Polynomial> = a
        .terms()
        .iter()
        .map(|(m, c)| Polynomial::term(a.ring(), m.clone(), *c))
        .collect();
    delta1_of_parts(&parts).1
}

/// `Δ₁` for the decomposition of `a` into groups `h_i H_i`, where `H_i` runs over
/// the distinct monomials in the variables flagged by `primary` and `h_i` collects
/// the remaining variables. Each group counts as one summand, so specializing the
/// other variables to constants commutes with the operator.
pub fn delta1_grouped(a: &Polynomial, primary: &[bool]) -> Polynomial {
    if a.is_zero() {
        return a.clone();
    }
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<Vec<u32>, Vec<(crate::monomial::Monomial, u32)>> = BTreeMap::new();
    for (m, c) in a.terms() {
        let key: Vec<u32> = m
            .exps()
            .iter()
            .zip(primary)
            .map(|(e, &x)| if x { *e } else { 0 })
            .collect();
        groups.entry(key).or_default().push((m.clone(), *c));
    }
    let parts: Vec<Polynomial> = groups
        .into_values()
        .map(|t| Polynomial::from_terms(a.ring(), t))
        .collect();
    delta1_of_parts(&parts).1
}

/// Returns `(Σ parts, Δ₁)` for the given summands.
fn delta1_of_parts(parts: &[Polynomial]) -> (Polynomial, Polynomial) {
    match parts.len() {
        0 => unreachable!("empty decomposition"),
        1 => (parts[0].clone(), Polynomial::zero(parts[0].ring())),
        n => {
            let (l, r) = parts.split_at(n / 2);
            let ((sa, da), (sb, db)) = if n > 32 {
                rayon::join(|| delta1_of_parts(l), || delta1_of_parts(r))
            } else {
                (delta1_of_parts(l), delta1_of_parts(r))
            };
            let cross = witt_carry(&sa, &sb);
            (&sa + &sb, &(&da + &db) + &cross)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::poly::{Ring, RingRef};

    fn r(p: u64) -> RingRef {
        Ring::new(p, &["x", "y", "z"]).unwrap()
    }

    fn pp(r: &RingRef, s: &str) -> Polynomial {
        parse_polynomial(s, r).unwrap()
    }

    #[test]
    fn char_two_sum_of_teichmullers() {
        let r = r(2);
        let a = W2Element::teichmuller(pp(&r, "x"));
        let b = W2Element::teichmuller(pp(&r, "y"));
        let s = w2_add(&a, &b).unwrap();
        assert_eq!(s.w0, pp(&r, "x+y"));
        assert_eq!(s.w1, pp(&r, "x*y"));
        assert_eq!(w2_add(&a, &a.zero_like()).unwrap(), a);
    }

    #[test]
    fn three_ones_in_char_three() {
        let r = r(3);
        let one = W2Element::teichmuller(Polynomial::one(&r));
        let two = w2_add(&one, &one).unwrap();
        let three = w2_add(&two, &one).unwrap();
        // ghost check: 3 = 0^3 + 3 * 1, so 3 = V(1)
        assert!(three.w0.is_zero());
        assert_eq!(three.w1, Polynomial::one(&r));
    }

    #[test]
    fn negation() {
        for p in [2, 3, 5] {
            let r = r(p);
            let x = W2Element::new(pp(&r, "x+y^2"), pp(&r, "z+1")).unwrap();
            let z = w2_add(&x, &w2_neg(&x)).unwrap();
            assert!(z.w0.is_zero() && z.w1.is_zero(), "p={p}");
        }
    }

    #[test]
    fn teichmuller_and_verschiebung_products() {
        let r = r(3);
        let a = pp(&r, "x+y");
        let b = pp(&r, "z^2");
        let t = w2_mul(&W2Element::teichmuller(a.clone()), &W2Element::teichmuller(b.clone())).unwrap();
        assert_eq!(t, W2Element::teichmuller(&a * &b));
        let v = w2_mul(&W2Element::teichmuller(a.clone()), &W2Element::verschiebung(b.clone())).unwrap();
        assert_eq!(v, W2Element::verschiebung(&a.frobenius(1) * &b));
    }

    #[test]
    fn delta_of_monomial_vanishes() {
        assert!(delta1(&pp(&r(5), "3*x^2*y")).is_zero());
        assert!(delta1(&Polynomial::zero(&r(5))).is_zero());
    }

    #[test]
    fn delta_of_d_type_singularity() {
        let r = r(2);
        for n in [2u32, 3, 4, 7] {
            let f = pp(&r, &format!("z^2+x^2*y+x*y^{n}"));
            let expect = pp(&r, &format!("x^2*y*z^2 + x*y^{n}*z^2 + x^3*y^{}", n + 1));
            assert_eq!(delta1(&f), expect, "n={n}");
        }
    }

    #[test]
    fn grouped_delta_matches_on_separated_terms() {
        let r = Ring::new(3, &["a", "b", "x", "y"]).unwrap();
        let g = pp(&r, "a*x^2 + b*x^2 + a*y^2");
        let primary = [false, false, true, true];
        // groups (a+b) x^2 and a y^2
        let expect = witt_carry(&pp(&r, "(a+b)*x^2"), &pp(&r, "a*y^2"));
        assert_eq!(delta1_grouped(&g, &primary), expect);
    }
}
