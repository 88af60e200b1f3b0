//! Gröbner bases for ideals and submodules of free modules over `F_p[x]`.

pub(crate) mod engine;
mod module;

use std::fmt;
use std::sync::OnceLock;

pub use engine::{default_budget, with_budget, ModuleOrder, DEFAULT_BUDGET};
pub use module::{frobenius_module_intersect_keru, module_buchberger, module_normal_form};
pub(crate) use module::residues as residues_for;

use crate::error::{Error, Result};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{same_ring, Polynomial, RingRef};
use engine::{Engine, Row, Term};

/// An ideal given by generators, with a lazily computed reduced grevlex basis.
pub struct Ideal {
    ring: RingRef,
    generators: Vec<Polynomial>,
    gb: OnceLock<Vec<Polynomial>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let gb = OnceLock::new();
        if let Some(b) = self.gb.get() {
            let _ = gb.set(b.clone());
        }
        Ideal {
            ring: self.ring.clone(),
            generators: self.generators.clone(),
            gb,
        }
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.generators.iter().map(|g| g.to_string())).finish()
    }
}

impl Ideal {
    pub fn new(ring: &RingRef, generators: Vec<Polynomial>) -> Self {
        for g in &generators {
            assert!(same_ring(ring, g.ring()), "generator from a different ring");
        }
        Ideal {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            gb: OnceLock::new(),
        }
    }

    /// Ideal whose generators are already a reduced grevlex Gröbner basis.
    pub(crate) fn from_reduced_basis(ring: &RingRef, basis: Vec<Polynomial>) -> Self {
        let gb = OnceLock::new();
        let _ = gb.set(basis.clone());
        Ideal {
            ring: ring.clone(),
            generators: basis,
            gb,
        }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// The reduced grevlex Gröbner basis, computed once.
    pub fn groebner_basis(&self) -> Result<&[Polynomial]> {
        if let Some(b) = self.gb.get() {
            return Ok(b);
        }
        let b = buchberger(&self.generators, MonomialOrder::Grevlex)?;
        Ok(self.gb.get_or_init(|| b))
    }

    pub fn contains(&self, a: &Polynomial) -> Result<bool> {
        ideal_membership(a, self)
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.iter().any(|g| g.is_constant()))
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        Ideal::new(&self.ring, g)
    }
}

pub(crate) fn poly_to_row(a: &Polynomial, order: MonomialOrder) -> Vec<Term> {
    let mut terms: Vec<Term> = a.terms().iter().map(|(m, c)| (0, m.clone(), *c)).collect();
    if order != MonomialOrder::Grevlex {
        terms.sort_by(|x, y| order.cmp(&y.1, &x.1));
    }
    terms
}

pub(crate) fn row_to_poly(ring: &RingRef, terms: &[Term], order: MonomialOrder) -> Polynomial {
    let t = terms.iter().map(|(_, m, c)| (m.clone(), *c));
    if order == MonomialOrder::Grevlex {
        Polynomial::from_sorted_unchecked(ring, t.collect())
    } else {
        Polynomial::from_terms(ring, t)
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger(gens: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    if gens.iter().any(|g| !same_ring(&ring, g.ring())) {
        return Err(Error::RingMismatch);
    }
    let mut e = Engine::new(&ring, ModuleOrder::pot(order), "ideal basis");
    let rows = gens
        .iter()
        .map(|g| Row::new(poly_to_row(g, order), Vec::new()))
        .collect();
    let gb = e.groebner(rows)?;
    Ok(gb.iter().map(|r| row_to_poly(&ring, &r.terms, order)).collect())
}

/// Remainder of `a` on division by the Gröbner basis `gb` (computed under `order`).
pub fn normal_form(a: &Polynomial, gb: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let ring = a.ring();
    let mut e = Engine::new(ring, ModuleOrder::pot(order), "normal form");
    e.budget = u64::MAX;
    let basis: Vec<Row> = gb
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let mut t = poly_to_row(g, order);
            let inv = ring.field().inv(t[0].2);
            for x in t.iter_mut() {
                x.2 = ring.field().mul(x.2, inv);
            }
            Row::new(t, Vec::new())
        })
        .collect();
    let r = e
        .reduce(Row::new(poly_to_row(a, order), Vec::new()), &basis)
        .expect("unbounded budget");
    row_to_poly(ring, &r.terms, order)
}

pub fn ideal_membership(a: &Polynomial, ideal: &Ideal) -> Result<bool> {
    if !same_ring(a.ring(), &ideal.ring) {
        return Err(Error::RingMismatch);
    }
    if a.is_zero() {
        return Ok(true);
    }
    let gb = ideal.groebner_basis()?;
    Ok(normal_form(a, gb, MonomialOrder::Grevlex).is_zero())
}

/// Equality of ideals via their reduced grevlex bases.
pub fn ideal_equal(a: &Ideal, b: &Ideal) -> Result<bool> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(Error::RingMismatch);
    }
    Ok(a.groebner_basis()? == b.groebner_basis()?)
}

/// `I ⊆ J`, tested generator by generator.
pub fn ideal_contained(a: &Ideal, b: &Ideal) -> Result<bool> {
    for g in a.generators() {
        if !ideal_membership(g, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fresh_name(ring: &RingRef) -> String {
    (0..)
        .map(|k| if k == 0 { "t".to_string() } else { format!("t{k}") })
        .find(|n| ring.var_index(n).is_none())
        .unwrap()
}

/// `I ∩ J` by eliminating `t` from `t I + (1 - t) J`.
pub fn intersection(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(Error::RingMismatch);
    }
    let ring = &a.ring;
    if a.generators.is_empty() || b.generators.is_empty() {
        return Ok(Ideal::new(ring, Vec::new()));
    }
    let big = ring.extended(&[fresh_name(ring)], true)?;
    let shift: Vec<usize> = (1..=ring.nvars()).collect();
    let t = Polynomial::var(&big, 0);
    let one_minus_t = &Polynomial::one(&big) - &t;
    let mut gens = Vec::new();
    for g in &a.generators {
        gens.push(&t * &g.map_into(&big, &shift)?);
    }
    for g in &b.generators {
        gens.push(&one_minus_t * &g.map_into(&big, &shift)?);
    }
    let order = MonomialOrder::Elimination { block: 1 };
    let gb = buchberger(&gens, order)?;
    let kept: Vec<Polynomial> = gb
        .iter()
        .filter(|g| g.terms().iter().all(|(m, _)| m.exps()[0] == 0))
        .map(|g| {
            Polynomial::from_terms(
                ring,
                g.terms()
                    .iter()
                    .map(|(m, c)| (Monomial::from_slice(&m.exps()[1..]), *c)),
            )
        })
        .collect();
    Ok(Ideal::new(ring, kept))
}

/// `(I : J) = { a | a J ⊆ I }`.
pub fn colon_ideal(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(Error::RingMismatch);
    }
    let ring = &a.ring;
    let mut acc: Option<Ideal> = None;
    for g in &b.generators {
        let part = colon_principal(a, g)?;
        acc = Some(match acc {
            None => part,
            Some(prev) => intersection(&prev, &part)?,
        });
    }
    let out = acc.unwrap_or_else(|| Ideal::new(ring, vec![Polynomial::one(ring)]));
    let gb = out.groebner_basis()?.to_vec();
    Ok(Ideal::from_reduced_basis(ring, gb))
}

fn colon_principal(a: &Ideal, g: &Polynomial) -> Result<Ideal> {
    let ring = &a.ring;
    let meet = intersection(a, &Ideal::new(ring, vec![g.clone()]))?;
    let gens = meet
        .generators
        .iter()
        .map(|h| {
            h.exact_div(g)
                .ok_or_else(|| Error::precondition("intersection generator not divisible"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(ring, gens))
}

/// Division with quotients: `a = sum q_i d_i + r` under grevlex.
pub(crate) fn normal_form_with_quotients(
    a: &Polynomial,
    divisors: &[Polynomial],
) -> (Vec<Polynomial>, Polynomial) {
    let ring = a.ring();
    let field = ring.field();
    let mut q: Vec<Polynomial> = divisors.iter().map(|_| Polynomial::zero(ring)).collect();
    let mut rem_terms: Vec<(Monomial, u32)> = Vec::new();
    let mut p = a.clone();
    let one = Monomial::one(ring.nvars());
    while let Some((m, c)) = p.leading_term().cloned() {
        let hit = divisors.iter().enumerate().find_map(|(i, d)| {
            let (dm, dc) = d.leading_term()?;
            dm.divides(&m).then(|| (i, dm.quotient_of(&m), field.mul(c, field.inv(*dc))))
        });
        match hit {
            Some((i, qm, qc)) => {
                q[i] = q[i].add_scaled(&Polynomial::one(ring), qc, &qm);
                p = p.add_scaled(&divisors[i], field.neg(qc), &qm);
            }
            None => {
                rem_terms.push((m.clone(), c));
                p = p.add_scaled(&Polynomial::term(ring, m, c), field.neg(1), &one);
            }
        }
    }
    (q, Polynomial::from_sorted_unchecked(ring, rem_terms))
}
