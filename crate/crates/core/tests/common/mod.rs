//! Generators and independent oracles shared by the integration tests.
//!
//! The oracles work over `Z/p^2` with plain integer maps and never call the
//! library's Witt or `Δ₁` code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use qfsplit::criteria::{height, HeightOptions, Verdict};
use qfsplit::{Ideal, Monomial, Polynomial, RingRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_terms` random terms with exponents below `max_exp`.
pub fn random_poly(ring: &RingRef, rng: &mut impl Rng, max_terms: usize, max_exp: u32) -> Polynomial {
    let p = ring.p();
    let n = ring.nvars();
    let k = rng.gen_range(0..=max_terms);
    let terms = (0..k).map(|_| {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..max_exp)).collect();
        (Monomial::from_slice(&e), rng.gen_range(1..p))
    });
    Polynomial::from_terms(ring, terms)
}

/// All exponent vectors of total degree `d` in `n` variables.
pub fn degree_monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut rest in degree_monomials(n - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// A form of degree `d` whose coefficients are uniform, keeping each monomial with probability `density`.
pub fn random_form(ring: &RingRef, rng: &mut impl Rng, d: u32, density: f64) -> Polynomial {
    let p = ring.p();
    let terms: Vec<(Monomial, u32)> = degree_monomials(ring.nvars(), d)
        .into_iter()
        .filter_map(|e| rng.gen_bool(density).then(|| (Monomial::from_slice(&e), rng.gen_range(0..p))))
        .collect();
    Polynomial::from_terms(ring, terms)
}

/// Replace each variable `x_i` of `f` by `images[i]`, a polynomial in `target`.
pub fn compose(f: &Polynomial, target: &RingRef, images: &[Polynomial]) -> Polynomial {
    let mut acc = Polynomial::zero(target);
    for (m, c) in f.terms() {
        let mut t = Polynomial::constant(target, *c);
        for (i, e) in m.exps().iter().enumerate() {
            for _ in 0..*e {
                t = &t * &images[i];
            }
        }
        acc = &acc + &t;
    }
    acc
}

/// Polynomials over `Z/p^2`, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftPoly {
    pub modulus: u64,
    pub terms: BTreeMap<Vec<u32>, u64>,
}

impl LiftPoly {
    pub fn lift(a: &Polynomial) -> Self {
        let p = a.ring().p() as u64;
        let terms = a.terms().iter().map(|(m, c)| (m.exps().to_vec(), *c as u64)).collect();
        LiftPoly { modulus: p * p, terms }
    }

    fn clean(mut self) -> Self {
        self.terms.retain(|_, c| *c != 0);
        self
    }

    pub fn add(&self, o: &LiftPoly) -> LiftPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(k.clone()).or_insert(0);
            *e = (*e + v) % self.modulus;
        }
        LiftPoly { modulus: self.modulus, terms }.clean()
    }

    pub fn sub(&self, o: &LiftPoly) -> LiftPoly {
        self.add(&o.scale(self.modulus - 1))
    }

    pub fn scale(&self, c: u64) -> LiftPoly {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c % self.modulus)).collect();
        LiftPoly { modulus: self.modulus, terms }.clean()
    }

    pub fn mul(&self, o: &LiftPoly) -> LiftPoly {
        let mut terms: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let k: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                let e = terms.entry(k).or_insert(0);
                *e = (*e + x * y) % self.modulus;
            }
        }
        LiftPoly { modulus: self.modulus, terms }.clean()
    }

    pub fn pow(&self, e: u32) -> LiftPoly {
        let mut acc = LiftPoly {
            modulus: self.modulus,
            terms: BTreeMap::new(),
        };
        let n = self.terms.keys().next().map_or(0, |k| k.len());
        acc.terms.insert(vec![0; n], 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// The injective ring map `W₂(F_p[x]) → (Z/p^2)[x]`, `(a0, a1) ↦ ã0^p + p·ã1`.
pub fn ghost(w0: &Polynomial, w1: &Polynomial) -> LiftPoly {
    let p = w0.ring().p();
    LiftPoly::lift(w0).pow(p).add(&LiftPoly::lift(w1).scale(p as u64))
}

/// `Δ₁(a)` from `(ã^p - Σ (c_i M_i)~^p) / p`.
pub fn delta1_oracle(a: &Polynomial) -> Polynomial {
    let ring = a.ring();
    let p = ring.p();
    let mut acc = LiftPoly::lift(a).pow(p);
    for (m, c) in a.terms() {
        let t = Polynomial::term(ring, m.clone(), *c);
        acc = acc.sub(&LiftPoly::lift(&t).pow(p));
    }
    let terms = acc.terms.iter().map(|(k, v)| {
        assert_eq!(v % p as u64, 0, "ghost difference not divisible by p");
        (Monomial::from_slice(k), (v / p as u64) as u32)
    });
    Polynomial::from_terms(ring, terms)
}

/// Number of `F_p`-points of the projective hypersurface `f = 0`.
pub fn projective_point_count(f: &Polynomial) -> u64 {
    let p = f.ring().p();
    let n = f.ring().nvars();
    let mut count = 0;
    for lead in 0..n {
        let free = n - lead - 1;
        for idx in 0..(p as u64).pow(free as u32) {
            let mut pt = vec![0u32; n];
            pt[lead] = 1;
            let mut r = idx;
            for slot in pt.iter_mut().skip(lead + 1) {
                *slot = (r % p as u64) as u32;
                r /= p as u64;
            }
            if f.evaluate(&pt) == 0 {
                count += 1;
            }
        }
    }
    count
}

/// Smoothness over the algebraic closure: some power of every variable lies in
/// `(f, ∂f/∂x_1, ..., ∂f/∂x_N)`.
pub fn smooth_projective(f: &Polynomial, max_power: u32) -> bool {
    let ring = f.ring();
    let n = ring.nvars();
    let mut gens = vec![f.clone()];
    gens.extend((0..n).map(|i| f.derivative(i)).filter(|g| !g.is_zero()));
    let jac = Ideal::new(ring, gens);
    (0..n).all(|i| {
        let x = Polynomial::var(ring, i);
        (1..=max_power).any(|k| jac.contains(&x.power(k as u64).unwrap()).unwrap())
    })
}

/// `(x_1 ⋯ x_N)^{p^n - 1}`-coefficient of `f^{p-1} Δ₁(f^{p-1})^{1 + ... + p^{n-2}}`,
/// computed without truncation from the `Z/p^2` oracle for `Δ₁`.
pub fn top_coefficient_oracle(f: &Polynomial, n: u32) -> u32 {
    let ring = f.ring();
    let p = ring.p() as u64;
    let g = f.power(p - 1).unwrap();
    let d = delta1_oracle(&g);
    let e: u64 = (0..n.saturating_sub(1)).map(|k| p.pow(k)).sum();
    let fn_ = &g * &d.power(e).unwrap();
    let top = vec![(p.pow(n) - 1) as u32; ring.nvars()];
    fn_.coefficient_of(&Monomial::from_slice(&top))
}

pub fn hypersurface_height(f: &Polynomial, n_max: u32) -> Verdict {
    let ideal = Ideal::new(f.ring(), vec![f.clone()]);
    height(&ideal, None, HeightOptions { n_max, cross_check: false })
        .unwrap()
        .verdict
}

/// Order on verdicts where `LowerBound(n)` means "at least `n`".
/// Returns `Some(true)` if `a ≥ b` holds for sure, `Some(false)` if it fails for
/// sure, `None` if undetermined.
pub fn verdict_ge(a: Verdict, b: Verdict) -> Option<bool> {
    use Verdict::*;
    match (a, b) {
        (Infinite, _) => Some(true),
        (Finite(x), Finite(y)) => Some(x >= y),
        (Finite(_), Infinite) => Some(false),
        (Finite(x), LowerBound(y)) => (x < y).then_some(false),
        (LowerBound(x), Finite(y)) => (x >= y).then_some(true),
        (LowerBound(_), _) => None,
    }
}

/// Thirty seeded homogeneous Calabi–Yau hypersurfaces: plane cubics over `F_2`
/// and `F_3`, and quartic surfaces over `F_2`.
pub fn cy_corpus() -> Vec<Polynomial> {
    let mut rng = rng(0xC0FFEE);
    let mut out = Vec::new();
    for (p, n, density) in [(2u64, 3usize, 0.6), (3, 3, 0.5), (2, 4, 0.35)] {
        let names = ["x", "y", "z", "w"];
        let ring = qfsplit::Ring::new(p, &names[..n]).unwrap();
        let mut k = 0;
        while k < 10 {
            let f = random_form(&ring, &mut rng, n as u32, density);
            if f.len() >= 2 {
                out.push(f);
                k += 1;
            }
        }
    }
    out
}

/// `f_n = f^{p-1} Δ₁(f^{p-1})^{1 + ... + p^{n-2}}` without truncation.
pub fn full_f_n(f: &Polynomial, n: u32) -> Polynomial {
    let p = f.ring().p() as u64;
    let g = f.power(p - 1).unwrap();
    let e: u64 = (0..n.saturating_sub(1)).map(|k| p.pow(k)).sum();
    &g * &qfsplit::witt::delta1(&g).power(e).unwrap()
}
