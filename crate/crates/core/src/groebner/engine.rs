//! Buchberger's algorithm on vectors of the free module `S^r`.
//!
//! Rows are sorted term lists `(position, monomial, coefficient)` under a
//! position-over-term order in which position 0 is the greatest. Ideals are the
//! rank-one case. A row may carry a *tower* of polynomials that is transformed
//! along with it: multiplying a row by `c * m` multiplies tower entry `k` by
//! `c * m^(p^(k+1))`. This records preimages under the twisted `p^{-1}`-linear
//! maps used by the quasi-F-split chain.

use std::cmp::Ordering;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Polynomial, RingRef};

pub(crate) type Term = (u32, Monomial, u32);

/// Position-over-term order on `S^r`; position 0 is the top position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModuleOrder {
    pub base: MonomialOrder,
}

impl ModuleOrder {
    pub fn pot(base: MonomialOrder) -> Self {
        ModuleOrder { base }
    }

    #[inline]
    pub(crate) fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        b.0.cmp(&a.0).then_with(|| self.base.cmp(&a.1, &b.1))
    }
}

pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Reduction-step budget; `QFSPLIT_GB_BUDGET` overrides the default.
pub fn default_budget() -> u64 {
    static B: OnceLock<u64> = OnceLock::new();
    *B.get_or_init(|| {
        std::env::var("QFSPLIT_GB_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET)
    })
}

thread_local! {
    static SCOPED_BUDGET: std::cell::Cell<Option<u64>> = const { std::cell::Cell::new(None) };
}

/// Run `f` with a different budget for Gröbner computations started on this thread.
pub fn with_budget<T>(budget: u64, f: impl FnOnce() -> T) -> T {
    let prev = SCOPED_BUDGET.with(|b| b.replace(Some(budget)));
    let out = f();
    SCOPED_BUDGET.with(|b| b.set(prev));
    out
}

fn current_budget() -> u64 {
    SCOPED_BUDGET.with(|b| b.get()).unwrap_or_else(default_budget)
}

#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub terms: Vec<Term>,
    pub tower: Vec<Polynomial>,
}

impl Row {
    pub fn new(terms: Vec<Term>, tower: Vec<Polynomial>) -> Self {
        Row { terms, tower }
    }

    #[inline]
    fn lead(&self) -> &Term {
        &self.terms[0]
    }
}

pub(crate) struct Engine {
    pub field: PrimeField,
    pub ring: RingRef,
    pub order: ModuleOrder,
    pub budget: u64,
    pub steps: u64,
    pub context: &'static str,
    /// True when all rows live in a single position; enables the coprime criterion.
    pub rank_one: bool,
}

struct Lead {
    pos: u32,
    mono: Monomial,
    mask: u64,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    pos: u32,
}

impl Engine {
    pub fn new(ring: &RingRef, order: ModuleOrder, context: &'static str) -> Self {
        Engine {
            field: ring.field(),
            ring: ring.clone(),
            order,
            budget: current_budget(),
            steps: 0,
            context,
            rank_one: true,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                context: self.context.to_string(),
            });
        }
        Ok(())
    }

    /// Sort terms and merge duplicates.
    pub fn normalize_terms(&self, mut terms: Vec<Term>) -> Vec<Term> {
        terms.sort_by(|a, b| self.order.cmp(b, a));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.0 == t.0 && last.1 == t.1 => {
                    last.2 = self.field.add(last.2, t.2);
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| t.2 != 0);
        out
    }

    /// `a + c * m * b` for sorted term lists.
    pub fn axpy(&self, a: &[Term], c: u32, m: &Monomial, b: &[Term]) -> Vec<Term> {
        let f = self.field;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut bi = b.iter().map(|(pos, mono, d)| (*pos, mono.mul(m), f.mul(*d, c)));
        let mut pending = bi.next();
        while let Some(bt) = pending.as_ref() {
            if i == a.len() {
                break;
            }
            match self.order.cmp(&a[i], bt) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(pending.take().unwrap());
                    pending = bi.next();
                }
                Ordering::Equal => {
                    let s = f.add(a[i].2, bt.2);
                    if s != 0 {
                        out.push((a[i].0, a[i].1.clone(), s));
                    }
                    i += 1;
                    pending = bi.next();
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        if let Some(t) = pending {
            out.push(t);
        }
        out.extend(bi);
        out
    }

    fn twist(&self, k: usize, m: &Monomial) -> Monomial {
        let q = (self.field.characteristic() as u64).pow(k as u32 + 1);
        m.scale(u32::try_from(q).expect("Frobenius twist overflow"))
    }

    /// `h += c * m * g`, towers included.
    fn row_axpy(&self, h: &mut Row, c: u32, m: &Monomial, g: &Row) {
        h.terms = self.axpy(&h.terms, c, m, &g.terms);
        self.tower_axpy(h, c, m, g);
    }

    fn tower_axpy(&self, h: &mut Row, c: u32, m: &Monomial, g: &Row) {
        for k in 0..h.tower.len() {
            if g.tower[k].is_zero() {
                continue;
            }
            let tm = self.twist(k, m);
            h.tower[k] = h.tower[k].add_scaled(&g.tower[k], c, &tm);
        }
    }

    fn scale_row(&self, h: &mut Row, c: u32) {
        for t in h.terms.iter_mut() {
            t.2 = self.field.mul(t.2, c);
        }
        for w in h.tower.iter_mut() {
            *w = w.scale(c);
        }
    }

    fn make_monic(&self, h: &mut Row) {
        let lc = h.lead().2;
        if lc != 1 {
            self.scale_row(h, self.field.inv(lc));
        }
    }

    fn find_divisor(
        &self,
        t: &Term,
        leads: &[Lead],
        active: &[bool],
        skip: Option<usize>,
    ) -> Option<usize> {
        let mask = t.1.support_mask();
        leads.iter().enumerate().position(|(k, l)| {
            active[k]
                && Some(k) != skip
                && l.pos == t.0
                && l.mask & !mask == 0
                && l.mono.divides(&t.1)
        })
    }

    /// Reduce the leading term until it is not divisible by any active lead.
    fn top_reduce(
        &mut self,
        h: &mut Row,
        basis: &[Row],
        leads: &[Lead],
        active: &[bool],
    ) -> Result<()> {
        while let Some(lt) = h.terms.first() {
            let Some(k) = self.find_divisor(lt, leads, active, None) else {
                return Ok(());
            };
            let m = leads[k].mono.quotient_of(&lt.1);
            let c = self.field.neg(lt.2);
            self.row_axpy(h, c, &m, &basis[k]);
            self.tick()?;
        }
        Ok(())
    }

    /// Reduce every term of `h`.
    fn full_reduce(
        &mut self,
        h: &mut Row,
        basis: &[Row],
        leads: &[Lead],
        active: &[bool],
        skip: Option<usize>,
    ) -> Result<()> {
        let mut i = 0;
        while i < h.terms.len() {
            let t = &h.terms[i];
            match self.find_divisor(t, leads, active, skip) {
                None => i += 1,
                Some(k) => {
                    let m = leads[k].mono.quotient_of(&t.1);
                    let c = self.field.neg(t.2);
                    let rest = self.axpy(&h.terms[i..], c, &m, &basis[k].terms);
                    h.terms.truncate(i);
                    h.terms.extend(rest);
                    self.tower_axpy(h, c, &m, &basis[k]);
                    self.tick()?;
                }
            }
        }
        Ok(())
    }

    fn spoly(&self, a: &Row, b: &Row, lcm: &Monomial) -> Row {
        let ma = a.lead().1.quotient_of(lcm);
        let mb = b.lead().1.quotient_of(lcm);
        let mut s = Row {
            terms: Vec::new(),
            tower: a.tower.iter().map(|w| Polynomial::zero(w.ring())).collect(),
        };
        self.row_axpy(&mut s, 1, &ma, a);
        let minus = self.field.neg(1);
        self.row_axpy(&mut s, minus, &mb, b);
        s
    }

    fn pair_key(&self, p: &Pair) -> (u64, u32) {
        (p.lcm.degree(), p.pos)
    }

    fn pair_cmp(&self, a: &Pair, b: &Pair) -> Ordering {
        self.pair_key(a)
            .cmp(&self.pair_key(b))
            .then_with(|| self.order.base.cmp(&a.lcm, &b.lcm))
            .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
    }

    /// Gebauer–Möller update after appending the row at index `h`.
    fn update(&self, h: usize, leads: &[Lead], in_g: &mut [bool], pairs: &mut Vec<Pair>) {
        let lh = &leads[h];
        let mut cand: Vec<(usize, Monomial, bool)> = Vec::new();
        for (g, lg) in leads.iter().enumerate().take(h) {
            if !in_g[g] || lg.pos != lh.pos {
                continue;
            }
            let coprime = self.rank_one && lg.mono.coprime(&lh.mono);
            cand.push((g, lg.mono.lcm(&lh.mono), coprime));
        }
        // chain criterion among the new pairs
        let mut keep = vec![true; cand.len()];
        for a in 0..cand.len() {
            if cand[a].2 {
                continue;
            }
            for b in 0..cand.len() {
                if a == b || !keep[b] {
                    continue;
                }
                let divides = cand[b].1.divides(&cand[a].1);
                let equal = divides && cand[b].1 == cand[a].1;
                // for equal lcms keep only the first
                if divides && (!equal || b < a) {
                    keep[a] = false;
                    break;
                }
            }
        }
        // old pairs made redundant by the new lead
        pairs.retain(|p| {
            if p.pos != lh.pos || !lh.mono.divides(&p.lcm) {
                return true;
            }
            let li = leads[p.i].mono.lcm(&lh.mono);
            let lj = leads[p.j].mono.lcm(&lh.mono);
            li == p.lcm || lj == p.lcm
        });
        for (k, (g, lcm, coprime)) in cand.into_iter().enumerate() {
            if keep[k] && !coprime {
                pairs.push(Pair {
                    i: g,
                    j: h,
                    lcm,
                    pos: lh.pos,
                });
            }
        }
        for g in 0..h {
            if in_g[g] && leads[g].pos == lh.pos && lh.mono.divides(&leads[g].mono) {
                in_g[g] = false;
            }
        }
        pairs.sort_by(|a, b| self.pair_cmp(b, a));
    }

    fn lead_of(row: &Row) -> Lead {
        let (pos, mono, _) = row.lead();
        Lead {
            pos: *pos,
            mono: mono.clone(),
            mask: mono.support_mask(),
        }
    }

    /// Reduced Gröbner basis of the rows, sorted by leading term descending.
    pub fn groebner(&mut self, gens: Vec<Row>) -> Result<Vec<Row>> {
        let mut gens: Vec<Row> = gens.into_iter().filter(|r| !r.terms.is_empty()).collect();
        gens.sort_by(|a, b| self.order.cmp(a.lead(), b.lead()));
        let mut basis: Vec<Row> = Vec::new();
        let mut leads: Vec<Lead> = Vec::new();
        let mut in_g: Vec<bool> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();

        let insert = |this: &mut Engine, mut h: Row, basis: &mut Vec<Row>, leads: &mut Vec<Lead>, in_g: &mut Vec<bool>, pairs: &mut Vec<Pair>| {
            this.make_monic(&mut h);
            leads.push(Engine::lead_of(&h));
            basis.push(h);
            in_g.push(true);
            this.update(basis.len() - 1, leads, in_g, pairs);
        };

        for mut g in gens {
            self.top_reduce(&mut g, &basis, &leads, &in_g)?;
            if !g.terms.is_empty() {
                insert(self, g, &mut basis, &mut leads, &mut in_g, &mut pairs);
            }
        }
        while let Some(pair) = pairs.pop() {
            self.tick()?;
            let mut s = self.spoly(&basis[pair.i], &basis[pair.j], &pair.lcm);
            self.top_reduce(&mut s, &basis, &leads, &in_g)?;
            if !s.terms.is_empty() {
                insert(self, s, &mut basis, &mut leads, &mut in_g, &mut pairs);
            }
        }

        // in_g is now a minimal basis; inter-reduce tails
        let keep: Vec<usize> = (0..basis.len()).filter(|&k| in_g[k]).collect();
        let mut out_rows: Vec<Row> = keep.iter().map(|&k| basis[k].clone()).collect();
        let out_leads: Vec<Lead> = out_rows.iter().map(Engine::lead_of).collect();
        let active = vec![true; out_rows.len()];
        for k in 0..out_rows.len() {
            let mut h = out_rows[k].clone();
            self.full_reduce(&mut h, &out_rows, &out_leads, &active, Some(k))?;
            out_rows[k] = h;
        }
        out_rows.sort_by(|a, b| self.order.cmp(b.lead(), a.lead()));
        if cfg!(debug_assertions) {
            assert!(
                self.is_groebner(&out_rows),
                "S-pair postcondition violated ({})",
                self.context
            );
        }
        Ok(out_rows)
    }

    /// Every S-pair of `rows` reduces to zero.
    pub fn is_groebner(&self, rows: &[Row]) -> bool {
        let mut probe = Engine {
            field: self.field,
            ring: self.ring.clone(),
            order: self.order,
            budget: u64::MAX,
            steps: 0,
            context: self.context,
            rank_one: self.rank_one,
        };
        let bare: Vec<Row> = rows
            .iter()
            .map(|r| Row::new(r.terms.clone(), Vec::new()))
            .collect();
        let leads: Vec<Lead> = bare.iter().map(Engine::lead_of).collect();
        let active = vec![true; bare.len()];
        for i in 0..bare.len() {
            for j in i + 1..bare.len() {
                if leads[i].pos != leads[j].pos {
                    continue;
                }
                if self.rank_one && leads[i].mono.coprime(&leads[j].mono) {
                    continue;
                }
                let lcm = leads[i].mono.lcm(&leads[j].mono);
                let mut s = probe.spoly(&bare[i], &bare[j], &lcm);
                probe.top_reduce(&mut s, &bare, &leads, &active).unwrap();
                if !s.terms.is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Remainder of `h` modulo a Gröbner basis.
    pub fn reduce(&mut self, mut h: Row, basis: &[Row]) -> Result<Row> {
        let leads: Vec<Lead> = basis.iter().map(Engine::lead_of).collect();
        let active = vec![true; basis.len()];
        self.full_reduce(&mut h, basis, &leads, &active, None)?;
        Ok(h)
    }
}
