//! Sparse multivariate polynomials over `F_p`.
//!
//! A [`Polynomial`] stores its terms as a vector sorted in descending
//! graded-reverse-lexicographic order with no zero coefficients, so two equal
//! polynomials always have identical term vectors and identical serializations.
//! Products accumulate into a hash map and are sorted once at the end.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::monomial::{Monomial, MonomialOrder};

/// A polynomial ring `F_p[x_1, ..., x_N]` with named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    field: PrimeField,
    vars: Vec<String>,
}

pub type RingRef = Arc<Ring>;

impl Ring {
    pub fn new(p: u64, vars: &[&str]) -> Result<RingRef> {
        Ring::with_names(p, vars.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_names(p: u64, vars: Vec<String>) -> Result<RingRef> {
        let field = PrimeField::new(p)?;
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty()
                || !v.chars().next().unwrap().is_ascii_alphabetic()
                || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::precondition(format!("invalid variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::precondition(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(Ring { field, vars }))
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.characteristic()
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The same field with extra variables appended (or prepended when `front`).
    pub fn extended(&self, extra: &[String], front: bool) -> Result<RingRef> {
        let vars = if front {
            extra.iter().chain(&self.vars).cloned().collect()
        } else {
            self.vars.iter().chain(extra).cloned().collect()
        };
        Ring::with_names(self.p() as u64, vars)
    }
}

#[inline]
pub(crate) fn same_ring(a: &RingRef, b: &RingRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A sparse polynomial; terms sorted descending by grevlex, coefficients in `[1, p)`.
#[derive(Clone)]
pub struct Polynomial {
    ring: RingRef,
    terms: Vec<(Monomial, u32)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

const ORDER: MonomialOrder = MonomialOrder::Grevlex;

impl Polynomial {
    pub fn zero(ring: &RingRef) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &RingRef) -> Self {
        Polynomial::constant(ring, 1)
    }

    pub fn constant(ring: &RingRef, c: u32) -> Self {
        Polynomial::term(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn var(ring: &RingRef, i: usize) -> Self {
        Polynomial::term(ring, Monomial::var(ring.nvars(), i), 1)
    }

    pub fn term(ring: &RingRef, mono: Monomial, c: u32) -> Self {
        assert_eq!(mono.nvars(), ring.nvars());
        let c = c % ring.p();
        let terms = if c == 0 { Vec::new() } else { vec![(mono, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Build from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(ring: &RingRef, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let field = ring.field();
        let mut acc: FxHashMap<Monomial, u32> = FxHashMap::default();
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars());
            let c = c % field.characteristic();
            if c == 0 {
                continue;
            }
            let e = acc.entry(m).or_insert(0);
            *e = field.add(*e, c);
        }
        Polynomial::from_map(ring, acc)
    }

    pub(crate) fn from_map(ring: &RingRef, acc: FxHashMap<Monomial, u32>) -> Self {
        let mut terms: Vec<(Monomial, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| ORDER.cmp(&b.0, &a.0));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Terms that are already sorted descending and nonzero.
    pub(crate) fn from_sorted_unchecked(ring: &RingRef, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| ORDER.cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|(_, c)| *c != 0));
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    #[inline]
    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.ring.field()
    }

    #[inline]
    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, u32)> {
        self.terms
    }

    /// Number of nonzero terms; `is_zero` is the emptiness test.
    #[allow(clippy::len_without_is_empty)]
    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Leading term under grevlex.
    pub fn leading_term(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.max_exponent()).max().unwrap_or(0)
    }

    /// Coefficient of `mono`, zero when absent.
    pub fn coefficient_of(&self, mono: &Monomial) -> u32 {
        self.terms
            .binary_search_by(|(m, _)| ORDER.cmp(mono, m))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    /// `self + c * mono * other`, merging the two sorted term lists.
    pub fn add_scaled(&self, other: &Polynomial, c: u32, mono: &Monomial) -> Polynomial {
        debug_assert!(same_ring(&self.ring, &other.ring));
        let field = self.field();
        let c = c % field.characteristic();
        if c == 0 || other.is_zero() {
            return self.clone();
        }
        let shift = !mono.is_one();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let mut pending: Option<(Monomial, u32)> = None;
        let next_other = |j: usize| -> (Monomial, u32) {
            let (m, d) = &other.terms[j];
            let m = if shift { m.mul(mono) } else { m.clone() };
            (m, field.mul(*d, c))
        };
        while i < self.terms.len() || j < other.terms.len() || pending.is_some() {
            if pending.is_none() && j < other.terms.len() {
                pending = Some(next_other(j));
                j += 1;
            }
            match (self.terms.get(i), pending.as_ref()) {
                (Some(a), Some(b)) => match ORDER.cmp(&a.0, &b.0) {
                    Ordering::Greater => {
                        out.push(a.clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push(pending.take().unwrap());
                    }
                    Ordering::Equal => {
                        let s = field.add(a.1, b.1);
                        if s != 0 {
                            out.push((a.0.clone(), s));
                        }
                        i += 1;
                        pending = None;
                    }
                },
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(_)) => out.push(pending.take().unwrap()),
                (None, None) => break,
            }
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(self.add_scaled(other, 1, &Monomial::one(self.ring.nvars())))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        let minus_one = self.field().neg(1);
        Ok(self.add_scaled(other, minus_one, &Monomial::one(self.ring.nvars())))
    }

    pub fn scale(&self, c: u32) -> Polynomial {
        let field = self.field();
        let c = c % field.characteristic();
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), field.mul(*d, c))).collect(),
        }
    }

    /// `c * mono * self`; multiplying by a monomial preserves the term order.
    pub fn mul_term(&self, mono: &Monomial, c: u32) -> Polynomial {
        let field = self.field();
        let c = c % field.characteristic();
        if c == 0 {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.mul(mono), field.mul(*d, c)))
                .collect(),
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(self.mul_capped_inner(other, None))
    }

    /// Product with every term having some exponent above `cap[i]` discarded.
    ///
    /// Exponents only grow under multiplication, so the result agrees with the
    /// full product on every monomial whose exponents are all within the cap.
    pub fn capped_multiply(&self, other: &Polynomial, cap: &[u32]) -> Result<Polynomial> {
        self.check_ring(other)?;
        if cap.len() != self.ring.nvars() {
            return Err(Error::precondition("cap length differs from the variable count"));
        }
        Ok(self.mul_capped_inner(other, Some(cap)))
    }

    fn mul_capped_inner(&self, other: &Polynomial, cap: Option<&[u32]>) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let (a, b) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if a.len() == 1 && cap.is_none() {
            let (m, c) = &a.terms[0];
            return b.mul_term(m, *c);
        }
        let field = self.field();
        let mut acc: FxHashMap<Monomial, u32> = FxHashMap::default();
        acc.reserve(a.len() * b.len().min(1 << 16));
        let within = |m: &Monomial| match cap {
            None => true,
            Some(cap) => m.exps().iter().zip(cap).all(|(e, c)| e <= c),
        };
        let a_terms: Vec<&(Monomial, u32)> = a.terms.iter().filter(|(m, _)| within(m)).collect();
        let b_terms: Vec<&(Monomial, u32)> = b.terms.iter().filter(|(m, _)| within(m)).collect();
        for (ma, ca) in &a_terms {
            for (mb, cb) in &b_terms {
                if let Some(cap) = cap {
                    if ma
                        .exps()
                        .iter()
                        .zip(mb.exps())
                        .zip(cap)
                        .any(|((x, y), c)| (*x as u64 + *y as u64) > *c as u64)
                    {
                        continue;
                    }
                }
                let m = ma.mul(mb);
                let c = field.mul(*ca, *cb);
                let e = acc.entry(m).or_insert(0);
                *e = field.add(*e, c);
            }
        }
        Polynomial::from_map(&self.ring, acc)
    }

    /// Keep only the terms with every exponent within `cap`.
    pub fn truncate(&self, cap: &[u32]) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exps().iter().zip(cap).all(|(e, c)| e <= c))
                .cloned()
                .collect(),
        }
    }

    /// The `p^k`-th power: over `F_p` this just multiplies every exponent by `p^k`.
    pub fn frobenius(&self, k: u32) -> Polynomial {
        if k == 0 {
            return self.clone();
        }
        let q = (self.ring.p() as u64).pow(k);
        let q = u32::try_from(q).expect("Frobenius power overflow");
        Polynomial {
            ring: self.ring.clone(),
            // scaling every exponent preserves grevlex order
            terms: self.terms.iter().map(|(m, c)| (m.scale(q), *c)).collect(),
        }
    }

    /// `self^e` using base-`p` digits: `a^(sum d_i p^i) = prod F^i(a^(d_i))`.
    pub fn power(&self, e: u64) -> Result<Polynomial> {
        if e == 0 {
            return Ok(Polynomial::one(&self.ring));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let predicted = self.max_exponent() as u64 * e;
        if predicted > u32::MAX as u64 {
            return Err(Error::ExponentOverflow(predicted));
        }
        let p = self.ring.p() as u64;
        let mut digits = Vec::new();
        let mut r = e;
        while r > 0 {
            digits.push(r % p);
            r /= p;
        }
        let mut acc = Polynomial::one(&self.ring);
        // powers a^d for d < p, shared across digits
        let max_digit = *digits.iter().max().unwrap();
        let mut small = vec![Polynomial::one(&self.ring)];
        for d in 1..=max_digit {
            let next = small[d as usize - 1].mul_capped_inner(self, None);
            small.push(next);
        }
        for (i, d) in digits.iter().enumerate() {
            if *d == 0 {
                continue;
            }
            let factor = small[*d as usize].frobenius(i as u32);
            acc = acc.mul_capped_inner(&factor, None);
        }
        Ok(acc)
    }

    /// Substitute constants for some variables; the result stays in the same ring.
    pub fn substitute_constants(&self, values: &[(usize, u32)]) -> Polynomial {
        let field = self.field();
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut coeff = *c;
            let mut mono = m.clone();
            for &(var, val) in values {
                let e = mono.exps()[var];
                if e > 0 {
                    coeff = field.mul(coeff, field.pow(val % field.characteristic(), e as u64));
                    mono.exps_mut()[var] = 0;
                }
            }
            mono.recompute_degree();
            out.push((mono, coeff));
        }
        Polynomial::from_terms(&self.ring, out)
    }

    /// Evaluate at a point of `F_p^N`.
    pub fn evaluate(&self, point: &[u32]) -> u32 {
        let field = self.field();
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut v = *c;
            for (e, x) in m.exps().iter().zip(point) {
                if *e > 0 {
                    v = field.mul(v, field.pow(*x % field.characteristic(), *e as u64));
                }
            }
            acc = field.add(acc, v);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let field = self.field();
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exps()[i];
            if e == 0 {
                return None;
            }
            let mut mono = m.clone();
            mono.exps_mut()[i] = e - 1;
            mono.recompute_degree();
            Some((mono, field.mul(*c, e % field.characteristic())))
        });
        Polynomial::from_terms(&self.ring, terms)
    }

    /// Move the polynomial into `target`, sending variable `i` to `var_map[i]`.
    pub fn map_into(&self, target: &RingRef, var_map: &[usize]) -> Result<Polynomial> {
        if target.p() != self.ring.p() || var_map.len() != self.ring.nvars() {
            return Err(Error::RingMismatch);
        }
        let n = target.nvars();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut mono = Monomial::one(n);
            for (i, e) in m.exps().iter().enumerate() {
                mono.exps_mut()[var_map[i]] += e;
            }
            mono.recompute_degree();
            (mono, *c)
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Exact division by `d`; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        use crate::groebner::normal_form_with_quotients;
        if d.is_zero() {
            return None;
        }
        let (quotients, rem) = normal_form_with_quotients(self, std::slice::from_ref(d));
        if rem.is_zero() {
            quotients.into_iter().next()
        } else {
            None
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if *c != 1 || m.is_one() {
                parts.push(c.to_string());
            }
            for (i, e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(self.ring.vars[i].clone()),
                    _ => parts.push(format!("{}^{}", self.ring.vars[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("ring mismatch in +")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("ring mismatch in -")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("ring mismatch in *")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(self.field().neg(1))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}
