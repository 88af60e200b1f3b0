//! The monomial `p`-basis of `F_*S`, the dual map `u`, the twist `θ` and
//! Frobenius bracket powers.
//!
//! Over `F_p` every coefficient is its own `p`-th root, so `F_*h` decomposes as
//! `Σ_α F_*(h_α^p x^α)` with `h_α` read off from the exponent split `e = p q + α`.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::groebner::Ideal;
use crate::monomial::Monomial;
use crate::poly::{same_ring, Polynomial, RingRef};
use crate::witt::delta1;

/// Components `h_α` of `F_*h` indexed by residue vectors `α ∈ [0, p-1]^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobCoordinates {
    ring: RingRef,
    components: BTreeMap<Vec<u32>, Polynomial>,
}

/// An element of the free module `S^{p^N}` with basis indexed by residue vectors.
pub type FreeModuleVector = FrobCoordinates;

impl FrobCoordinates {
    pub fn zero(ring: &RingRef) -> Self {
        FrobCoordinates {
            ring: ring.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn from_components(
        ring: &RingRef,
        components: impl IntoIterator<Item = (Vec<u32>, Polynomial)>,
    ) -> Result<Self> {
        let p = ring.p();
        let mut out = FrobCoordinates::zero(ring);
        for (alpha, h) in components {
            if alpha.len() != ring.nvars() || alpha.iter().any(|&a| a >= p) {
                return Err(Error::precondition("residue vector out of range"));
            }
            if !same_ring(ring, h.ring()) {
                return Err(Error::RingMismatch);
            }
            if h.is_zero() {
                continue;
            }
            let slot = out
                .components
                .entry(alpha)
                .or_insert_with(|| Polynomial::zero(ring));
            *slot = &*slot + &h;
        }
        out.components.retain(|_, h| !h.is_zero());
        Ok(out)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn components(&self) -> &BTreeMap<Vec<u32>, Polynomial> {
        &self.components
    }

    pub fn component(&self, alpha: &[u32]) -> Polynomial {
        self.components
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.ring))
    }

    /// The top residue `(p-1, ..., p-1)`, dual to `u`.
    pub fn top_residue(ring: &RingRef) -> Vec<u32> {
        vec![ring.p() - 1; ring.nvars()]
    }

    pub fn u_component(&self) -> Polynomial {
        self.component(&FrobCoordinates::top_residue(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// `Σ_α h_α^p x^α`.
    pub fn reconstruct(&self) -> Polynomial {
        let mut terms = Vec::new();
        let p = self.ring.p();
        for (alpha, h) in &self.components {
            let shift = Monomial::from_slice(alpha);
            for (m, c) in h.terms() {
                terms.push((m.scale(p).mul(&shift), *c));
            }
        }
        Polynomial::from_terms(&self.ring, terms)
    }
}

pub fn frobenius_decompose(h: &Polynomial) -> FrobCoordinates {
    let ring = h.ring();
    let p = ring.p();
    let mut parts: BTreeMap<Vec<u32>, Vec<(Monomial, u32)>> = BTreeMap::new();
    for (m, c) in h.terms() {
        let alpha: Vec<u32> = m.exps().iter().map(|e| e % p).collect();
        let q = Monomial::new(m.exps().iter().map(|e| e / p).collect::<crate::monomial::Exponents>());
        parts.entry(alpha).or_default().push((q, *c));
    }
    FrobCoordinates {
        ring: ring.clone(),
        components: parts
            .into_iter()
            .map(|(a, t)| (a, Polynomial::from_terms(ring, t)))
            .collect(),
    }
}

/// `u(F_*h)`: the coefficient of `F_*((x_1 ... x_N)^{p-1})`.
pub fn u_map(h: &Polynomial) -> Polynomial {
    let p = h.ring().p();
    let terms: Vec<(Monomial, u32)> = h
        .terms()
        .iter()
        .filter(|(m, _)| m.exps().iter().all(|e| e % p == p - 1))
        .map(|(m, c)| {
            let q: crate::monomial::Exponents = m.exps().iter().map(|e| e / p).collect();
            (Monomial::new(q), *c)
        })
        .collect();
    // (e - (p-1)) / p is monotone in e, so grevlex order is preserved
    Polynomial::from_sorted_unchecked(h.ring(), terms)
}

/// `u^r(F^r_* h)`.
pub fn iterated_u(h: &Polynomial, r: u32) -> Polynomial {
    assert!(r >= 1, "iterated_u needs r >= 1");
    let mut a = h.clone();
    for _ in 0..r {
        a = u_map(&a);
    }
    a
}

/// `θ(F_*a) = u(F_*(δ a))` where `δ = Δ₁(f^{p-1})` is supplied by the caller.
pub fn theta(a: &Polynomial, delta: &Polynomial) -> Polynomial {
    ThetaOperator::new(delta).apply(a)
}

/// `θ` with the terms of `δ` bucketed by residue, so that only products landing on
/// the top residue are ever formed.
#[derive(Clone, Debug)]
pub struct ThetaOperator {
    ring: RingRef,
    delta: Polynomial,
    buckets: FxHashMap<Vec<u32>, Vec<(Monomial, u32)>>,
}

impl ThetaOperator {
    pub fn new(delta: &Polynomial) -> Self {
        let ring = delta.ring().clone();
        let p = ring.p();
        let mut buckets: FxHashMap<Vec<u32>, Vec<(Monomial, u32)>> = FxHashMap::default();
        for (m, c) in delta.terms() {
            let rho: Vec<u32> = m.exps().iter().map(|e| e % p).collect();
            let q: crate::monomial::Exponents = m.exps().iter().map(|e| e / p).collect();
            buckets.entry(rho).or_default().push((Monomial::new(q), *c));
        }
        ThetaOperator {
            ring,
            delta: delta.clone(),
            buckets,
        }
    }

    /// Build from `f`: `δ = Δ₁(f^{p-1})`.
    pub fn for_polynomial(f: &Polynomial) -> Result<Self> {
        let fp1 = f.power(f.ring().p() as u64 - 1)?;
        Ok(ThetaOperator::new(&delta1(&fp1)))
    }

    pub fn delta(&self) -> &Polynomial {
        &self.delta
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn apply(&self, a: &Polynomial) -> Polynomial {
        let p = self.ring.p();
        let field = self.ring.field();
        let mut acc: FxHashMap<Monomial, u32> = FxHashMap::default();
        let mut need: Vec<u32> = vec![0; self.ring.nvars()];
        for (m, c) in a.terms() {
            for (slot, e) in need.iter_mut().zip(m.exps()) {
                *slot = p - 1 - e % p;
            }
            let Some(bucket) = self.buckets.get(&need) else {
                continue;
            };
            let qa: crate::monomial::Exponents = m.exps().iter().map(|e| e / p).collect();
            let qa = Monomial::new(qa);
            for (qd, d) in bucket {
                let e = acc.entry(qa.mul(qd)).or_insert(0);
                *e = field.add(*e, field.mul(*c, *d));
            }
        }
        Polynomial::from_map(&self.ring, acc)
    }
}

/// `I^{[p^n]}`, generated by the `p^n`-th powers of the generators.
pub fn bracket_power(ideal: &Ideal, n: u32) -> Ideal {
    Ideal::new(
        ideal.ring(),
        ideal.generators().iter().map(|g| g.frobenius(n)).collect(),
    )
}

/// The generators `x_i^{p^n}` of `m^{[p^n]}`.
pub fn max_ideal_frobenius_power(ring: &RingRef, n: u32) -> Ideal {
    let q = (ring.p() as u64).pow(n) as u32;
    Ideal::new(
        ring,
        (0..ring.nvars())
            .map(|i| Polynomial::var(ring, i).frobenius(n))
            .inspect(|g| debug_assert_eq!(g.total_degree(), Some(q as u64)))
            .collect(),
    )
}

/// `a ∈ m^{[p^n]}`: every term has some exponent at least `p^n`.
pub fn in_max_ideal_frobenius_power(a: &Polynomial, n: u32) -> bool {
    let q = (a.ring().p() as u64).saturating_pow(n);
    a.terms()
        .iter()
        .all(|(m, _)| m.exps().iter().any(|&e| e as u64 >= q))
}

/// Input to the two-step splitting evaluator.
#[derive(Clone, Debug)]
pub enum PsiInput {
    /// The Teichmüller lift `[a]`.
    Teichmuller(Polynomial),
    /// `V[a]`.
    Verschiebung(Polynomial),
}

/// `ψ_{f1,f2}(F_*[a]) = u(F_*(f1 a)) + u^2(F^2_*(f2 Δ₁(a)))` and
/// `ψ_{f1,f2}(F_*V[a]) = u^2(F^2_*(f2 a))`.
pub fn psi2_eval(f1: &Polynomial, f2: &Polynomial, elem: &PsiInput) -> Result<Polynomial> {
    if !same_ring(f1.ring(), f2.ring()) {
        return Err(Error::RingMismatch);
    }
    match elem {
        PsiInput::Teichmuller(a) => {
            let first = u_map(&f1.checked_mul(a)?);
            let second = iterated_u(&f2.checked_mul(&delta1(a))?, 2);
            Ok(&first + &second)
        }
        PsiInput::Verschiebung(a) => Ok(iterated_u(&f2.checked_mul(a)?, 2)),
    }
}
