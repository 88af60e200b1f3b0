//! Submodules of `S^{p^N}` indexed by residue vectors, and `F_*I ∩ Ker(u)`.

use crate::error::{Error, Result};
use crate::frobenius::{frobenius_decompose, FreeModuleVector};
use crate::monomial::Monomial;
use crate::poly::{same_ring, Polynomial, RingRef};

use super::engine::{Engine, ModuleOrder, Row, Term};
use super::Ideal;

fn rank(ring: &RingRef) -> Result<u64> {
    (ring.p() as u64)
        .checked_pow(ring.nvars() as u32)
        .filter(|r| *r <= u32::MAX as u64)
        .ok_or_else(|| Error::precondition("free module rank p^N too large"))
}

/// Position of a residue vector; the top residue `(p-1, ..., p-1)` maps to 0.
fn position(alpha: &[u32], p: u32, rank: u64) -> u32 {
    let mut idx: u64 = 0;
    for &a in alpha.iter().rev() {
        idx = idx * p as u64 + a as u64;
    }
    (rank - 1 - idx) as u32
}

fn residue(pos: u32, p: u32, n: usize, rank: u64) -> Vec<u32> {
    let mut idx = rank - 1 - pos as u64;
    let mut out = vec![0; n];
    for slot in out.iter_mut() {
        *slot = (idx % p as u64) as u32;
        idx /= p as u64;
    }
    out
}

fn to_row(v: &FreeModuleVector, engine: &Engine, rank: u64) -> Vec<Term> {
    let p = v.ring().p();
    let mut terms: Vec<Term> = Vec::new();
    for (alpha, h) in v.components() {
        let pos = position(alpha, p, rank);
        terms.extend(h.terms().iter().map(|(m, c)| (pos, m.clone(), *c)));
    }
    engine.normalize_terms(terms)
}

fn from_row(ring: &RingRef, terms: &[Term], rank: u64) -> FreeModuleVector {
    let p = ring.p();
    let n = ring.nvars();
    let mut grouped: std::collections::BTreeMap<u32, Vec<(Monomial, u32)>> = Default::default();
    for (pos, m, c) in terms {
        grouped.entry(*pos).or_default().push((m.clone(), *c));
    }
    FreeModuleVector::from_components(
        ring,
        grouped
            .into_iter()
            .map(|(pos, t)| (residue(pos, p, n, rank), Polynomial::from_terms(ring, t))),
    )
    .expect("well-formed components")
}

/// Reduced Gröbner basis of a submodule of `S^{p^N}` under a position-over-term
/// order whose top position is the `u`-coordinate.
pub fn module_buchberger(
    gens: &[FreeModuleVector],
    order: ModuleOrder,
) -> Result<Vec<FreeModuleVector>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    if gens.iter().any(|g| !same_ring(&ring, g.ring())) {
        return Err(Error::RingMismatch);
    }
    let rank = rank(&ring)?;
    let mut e = Engine::new(&ring, order, "module basis");
    e.rank_one = rank == 1;
    let rows = gens
        .iter()
        .map(|g| Row::new(to_row(g, &e, rank), Vec::new()))
        .collect();
    let gb = e.groebner(rows)?;
    Ok(gb.iter().map(|r| from_row(&ring, &r.terms, rank)).collect())
}

/// Remainder of `v` modulo a module Gröbner basis.
pub fn module_normal_form(
    v: &FreeModuleVector,
    gb: &[FreeModuleVector],
    order: ModuleOrder,
) -> FreeModuleVector {
    let ring = v.ring();
    let rank = rank(ring).expect("rank checked when the basis was built");
    let mut e = Engine::new(ring, order, "module normal form");
    e.budget = u64::MAX;
    let basis: Vec<Row> = gb
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let mut t = to_row(g, &e, rank);
            let inv = ring.field().inv(t[0].2);
            for x in t.iter_mut() {
                x.2 = ring.field().mul(x.2, inv);
            }
            Row::new(t, Vec::new())
        })
        .collect();
    let r = e
        .reduce(Row::new(to_row(v, &e, rank), Vec::new()), &basis)
        .expect("unbounded budget");
    from_row(ring, &r.terms, rank)
}

/// Generators of the `S`-module `F_*I ∩ Ker(u)`.
///
/// `F_*I` is generated by `F_*(x^α g)` for `α ∈ [0, p-1]^N` and `g` in a basis of
/// `I`; elements of a position-over-term basis with zero top component generate the
/// intersection with the kernel of the top projection.
pub fn frobenius_module_intersect_keru(ideal: &Ideal) -> Result<Vec<FreeModuleVector>> {
    let ring = ideal.ring();
    let p = ring.p();
    let n = ring.nvars();
    rank(ring)?;
    let basis = ideal.groebner_basis()?;
    let mut gens = Vec::new();
    for g in basis {
        for alpha in residues(p, n) {
            let shifted = g.mul_term(&Monomial::from_slice(&alpha), 1);
            gens.push(frobenius_decompose(&shifted));
        }
    }
    let gb = module_buchberger(&gens, ModuleOrder::default())?;
    let top = FreeModuleVector::top_residue(ring);
    Ok(gb
        .into_iter()
        .filter(|v| !v.components().contains_key(&top))
        .collect())
}

/// All of `[0, p-1]^n` in lexicographic order.
pub(crate) fn residues(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{u_map, ThetaOperator};
    use crate::parse::parse_polynomial;
    use crate::poly::Ring;

    #[test]
    fn positions_round_trip() {
        let r = 27;
        for pos in 0..r as u32 {
            let a = residue(pos, 3, 3, r);
            assert_eq!(position(&a, 3, r), pos);
        }
        assert_eq!(position(&[2, 2, 2], 3, r), 0);
    }

    #[test]
    fn single_generator() {
        let r = Ring::new(2, &["x", "y"]).unwrap();
        let v = frobenius_decompose(&parse_polynomial("x^3*y + x*y^2 + 1", &r).unwrap());
        let gb = module_buchberger(std::slice::from_ref(&v), ModuleOrder::default()).unwrap();
        assert_eq!(gb, vec![v]);
    }

    #[test]
    fn keru_of_f_power_contains_itself() {
        // Fermat cubic over F_2: u(F_*f) = 0 so F_*f lies in the intersection
        let r = Ring::new(2, &["x", "y", "z"]).unwrap();
        let f = parse_polynomial("x^3+y^3+z^3", &r).unwrap();
        assert!(u_map(&f).is_zero());
        let i = Ideal::new(&r, vec![f.clone()]);
        let ker = frobenius_module_intersect_keru(&i).unwrap();
        assert!(ker.iter().all(|v| v.u_component().is_zero()));
        let fv = frobenius_decompose(&f);
        assert!(module_normal_form(&fv, &ker, ModuleOrder::default()).is_zero());
        // θ of the generators lands in I_2 and stays inside m^[2]
        let th = ThetaOperator::for_polynomial(&f).unwrap();
        for v in &ker {
            let _ = th.apply(&v.reconstruct());
        }
    }
}
