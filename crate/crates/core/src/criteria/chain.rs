//! The ideal chain `I_{n+1} = θ(F_*I_n ∩ Ker u) + I_1`.
//!
//! One step is a single Gröbner computation in `S^2`. Every generator
//! `F_*(x^α G)` of `F_*I_n` is sent to the pair `(u(F_*x^α G), θ(F_*x^α G))`; the
//! pairs together with `(0, i)` for `i ∈ I_1` generate a submodule whose
//! elements with vanishing first coordinate have second coordinates exactly
//! `θ(F_*I_n ∩ Ker u) + I_1`. Under a position-over-term order with the first
//! coordinate on top those elements form a reduced basis of `I_{n+1}`.
//!
//! With tracking on, each basis element `G` of `I_n` carries `(w_{n-1}, ..., w_1)`
//! with `u(F_*w_l) = 0`, `w_{l+1} - θ(F_*w_l) ∈ I_1`, `G - θ(F_*w_{n-1}) ∈ I_1`
//! and `w_1 ∈ I_1`, which is a witness chain for `G`.

use std::sync::OnceLock;

use crate::error::Result;
use crate::frobenius::{in_max_ideal_frobenius_power, u_map, ThetaOperator};
use crate::groebner::engine::{Engine, ModuleOrder, Row, Term};
use crate::groebner::{colon_ideal, Ideal};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Polynomial, RingRef};

/// Data shared by every step of the chain for a fixed complete intersection.
pub struct ChainSetup {
    pub ring: RingRef,
    /// The product `f = f'_1 ⋯ f'_m`.
    pub f: Polynomial,
    theta: OnceLock<ThetaOperator>,
    pub i1: Ideal,
}

/// One ideal of the chain, as a reduced grevlex basis with optional towers.
#[derive(Clone, Debug)]
pub struct Level {
    pub index: u32,
    pub basis: Vec<Polynomial>,
    pub towers: Option<Vec<Vec<Polynomial>>>,
}

impl Level {
    pub fn escapes_bracket(&self) -> bool {
        self.basis.iter().any(|g| !in_max_ideal_frobenius_power(g, 1))
    }

    /// A witness chain `g_1, ..., g_n` ending in a basis element outside `m^{[p]}`.
    pub fn witness_chain(&self) -> Option<Vec<Polynomial>> {
        let towers = self.towers.as_ref()?;
        let k = (0..self.basis.len())
            .filter(|&k| !in_max_ideal_frobenius_power(&self.basis[k], 1))
            .min_by_key(|&k| (self.basis[k].len(), towers[k].iter().map(|w| w.len()).sum::<usize>()))?;
        let mut chain: Vec<Polynomial> = towers[k].iter().rev().cloned().collect();
        chain.push(self.basis[k].clone());
        Some(chain)
    }
}

/// `I_1 = (f^{p-1}) + (f'_1^p, ..., f'_m^p)`.
pub fn i1_generators(gens: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let ring = gens[0].ring();
    let f = product(ring, gens);
    let mut out = vec![f.power(ring.p() as u64 - 1)?];
    if gens.len() > 1 {
        out.extend(gens.iter().map(|g| g.frobenius(1)));
    }
    Ok(out)
}

/// `(I^{[p]} : I)`; `(f^{p-1})` for a principal ideal.
pub fn fedder_colon(ideal: &Ideal) -> Result<Ideal> {
    let gens = ideal.generators();
    if gens.len() == 1 {
        let g = gens[0].power(ideal.ring().p() as u64 - 1)?;
        return Ok(Ideal::new(ideal.ring(), vec![g]));
    }
    let bracket = crate::frobenius::bracket_power(ideal, 1);
    colon_ideal(&bracket, ideal)
}

pub(crate) fn product(ring: &RingRef, gens: &[Polynomial]) -> Polynomial {
    gens.iter().fold(Polynomial::one(ring), |acc, g| &acc * g)
}

impl ChainSetup {
    pub fn new(ideal: &Ideal, i1: Ideal) -> Result<Self> {
        let ring = ideal.ring().clone();
        let f = product(&ring, ideal.generators());
        i1.groebner_basis()?;
        Ok(ChainSetup {
            ring,
            f,
            theta: OnceLock::new(),
            i1,
        })
    }

    /// `θ_f`, built on first use; `Δ_1(f^{p-1})` is expensive for large `p`.
    pub fn theta(&self) -> Result<&ThetaOperator> {
        if let Some(t) = self.theta.get() {
            return Ok(t);
        }
        let t = ThetaOperator::for_polynomial(&self.f)?;
        Ok(self.theta.get_or_init(|| t))
    }

    /// Setup with `I_1 = (f^{p-1}) + I^{[p]}`.
    pub fn standard(ideal: &Ideal) -> Result<Self> {
        let i1 = Ideal::new(ideal.ring(), i1_generators(ideal.generators())?);
        ChainSetup::new(ideal, i1)
    }

    pub fn first(&self, track: bool) -> Result<Level> {
        let basis = self.i1.groebner_basis()?.to_vec();
        let towers = track.then(|| vec![Vec::new(); basis.len()]);
        Ok(Level {
            index: 1,
            basis,
            towers,
        })
    }

    /// `I_{n+1}` from `I_n`; returns the level and the number of reduction steps.
    pub fn step(&self, level: &Level) -> Result<(Level, u64)> {
        let p = self.ring.p();
        let n = self.ring.nvars();
        let depth = level.index as usize;
        let track = level.towers.is_some();
        let zero = Polynomial::zero(&self.ring);
        let alphas = crate::groebner::residues_for(p, n);
        let mut rows: Vec<Row> = Vec::new();
        for (j, g) in level.basis.iter().enumerate() {
            for alpha in &alphas {
                let xa = Monomial::from_slice(alpha);
                let h = g.mul_term(&xa, 1);
                let u = u_map(&h);
                let t = self.theta()?.apply(&h);
                if u.is_zero() && t.is_zero() {
                    continue;
                }
                let mut terms: Vec<Term> = Vec::with_capacity(u.len() + t.len());
                terms.extend(u.terms().iter().map(|(m, c)| (0, m.clone(), *c)));
                terms.extend(t.terms().iter().map(|(m, c)| (1, m.clone(), *c)));
                let tower = if track {
                    let below = &level.towers.as_ref().unwrap()[j];
                    let mut tw = Vec::with_capacity(depth);
                    tw.push(h);
                    let mut q = p;
                    for w in below {
                        tw.push(w.mul_term(&xa.scale(q), 1));
                        q *= p;
                    }
                    tw
                } else {
                    Vec::new()
                };
                rows.push(Row::new(terms, tower));
            }
        }
        for i in self.i1.groebner_basis()? {
            let terms = i.terms().iter().map(|(m, c)| (1, m.clone(), *c)).collect();
            let tower = if track { vec![zero.clone(); depth] } else { Vec::new() };
            rows.push(Row::new(terms, tower));
        }
        let mut engine = Engine::new(&self.ring, ModuleOrder::pot(MonomialOrder::Grevlex), "ideal chain step");
        engine.rank_one = false;
        let gb = engine.groebner(rows)?;
        let mut basis = Vec::new();
        let mut towers = Vec::new();
        for r in gb.into_iter().filter(|r| r.terms[0].0 == 1) {
            let poly = Polynomial::from_sorted_unchecked(
                &self.ring,
                r.terms.into_iter().map(|(_, m, c)| (m, c)).collect(),
            );
            basis.push(poly);
            towers.push(r.tower);
        }
        Ok((
            Level {
                index: level.index + 1,
                basis,
                towers: track.then_some(towers),
            },
            engine.steps,
        ))
    }
}

/// Outcome of running the chain.
#[derive(Clone, Debug)]
pub enum ChainOutcome {
    /// `I_n ⊄ m^{[p]}` first at this level.
    Escaped(Level),
    /// `I_{n+1} = I_n ⊆ m^{[p]}`: the fixed point is reached.
    Stabilized(Level),
    /// The cutoff was reached inside `m^{[p]}` without stabilizing.
    Cutoff(Level),
}

/// Iterate until escape, stabilization, or `n_max` levels. With `stop_on_escape`
/// off the chain is followed to its fixed point, which is then reported as
/// `Stabilized` whether or not it lies in `m^{[p]}`.
pub fn run_chain(
    setup: &ChainSetup,
    n_max: Option<u32>,
    track: bool,
    stop_on_escape: bool,
    steps: &mut u64,
) -> Result<ChainOutcome> {
    let mut level = setup.first(track)?;
    loop {
        if stop_on_escape && level.escapes_bracket() {
            return Ok(ChainOutcome::Escaped(level));
        }
        if n_max.is_some_and(|m| level.index >= m) {
            return Ok(ChainOutcome::Cutoff(level));
        }
        let (next, s) = setup.step(&level)?;
        *steps += s;
        debug_assert!(
            ascending(&level.basis, &next.basis),
            "ideal chain must be ascending"
        );
        if next.basis == level.basis {
            return Ok(ChainOutcome::Stabilized(level));
        }
        level = next;
    }
}

fn ascending(lower: &[Polynomial], upper: &[Polynomial]) -> bool {
    lower.iter().all(|g| {
        crate::groebner::normal_form(g, upper, MonomialOrder::Grevlex).is_zero()
    })
}
