//! Height strata of the family of all degree-`N` hypersurfaces in `N` variables.
//!
//! With `G = Σ a_i m_i` over all degree-`N` monomials, `G_1 = G^{p-1}` and
//! `G_n = G^{p-1} Δ̃₁(G^{p-1})^{1 + p + ... + p^{n-2}}`, the coefficient `b_i` of
//! `(x_1 ⋯ x_N)^{p^i - 1}` in `G_i` is a form of degree `p^i - 1` in the `a_i`.
//! A fiber has height at least `h` exactly when `b_1, ..., b_{h-1}` vanish there.
//! `Δ̃₁` treats each `h_j(a) H_j(x)` as a single term, so specializing the `a_i`
//! commutes with every step and `b_i(s)` is the top coefficient of `f_i` for `G(s)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::criteria::{height, verify_certificate, Check, HeightOptions, HeightResult, Verdict};
use crate::error::{Error, Result};
use crate::groebner::Ideal;
use crate::monomial::{Exponents, Monomial};
use crate::poly::{Polynomial, Ring, RingRef};
use crate::witt::delta1_grouped;

/// The universal degree-`N` hypersurface in `N` variables (or a sub-family).
#[derive(Clone, Debug)]
pub struct FamilyContext {
    pub p: u32,
    pub n: usize,
    /// Exponent vectors of the monomials `m_i`, in the order of the `a_i`.
    pub monomials: Vec<Vec<u32>>,
    /// `x_1, ..., x_N, a_1, ..., a_M`.
    pub ring: RingRef,
    /// `x_1, ..., x_N`.
    pub x_ring: RingRef,
    /// `a_1, ..., a_M`.
    pub a_ring: RingRef,
}

fn x_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn compositions(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(left: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            cur.push(d);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=d).rev() {
            cur.push(e);
            rec(left - 1, d - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

impl FamilyContext {
    /// All degree-`N` monomials in `N` variables.
    pub fn new(p: u64, n: usize) -> Result<Self> {
        Self::with_monomials(p, n, compositions(n, n as u32))
    }

    /// The sub-family spanned by `x_1^N` and the monomials not divisible by `x_1`.
    pub fn restricted(p: u64, n: usize) -> Result<Self> {
        let all = compositions(n, n as u32);
        let nn = n as u32;
        Self::with_monomials(p, n, all.into_iter().filter(|e| e[0] == nn || e[0] == 0).collect())
    }

    pub fn with_monomials(p: u64, n: usize, monomials: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("the family needs at least one variable"));
        }
        if monomials.is_empty() || monomials.iter().any(|m| m.len() != n) {
            return Err(Error::precondition("monomials must have one exponent per variable"));
        }
        let xs = x_names(n);
        let as_: Vec<String> = monomials
            .iter()
            .map(|e| {
                let parts: Vec<String> = e
                    .iter()
                    .zip(&xs)
                    .filter(|(k, _)| **k > 0)
                    .map(|(k, x)| if *k == 1 { x.clone() } else { format!("{x}e{k}") })
                    .collect();
                format!("a_{}", parts.join("_"))
            })
            .collect();
        let x_ring = Ring::with_names(p, xs.clone())?;
        let a_ring = Ring::with_names(p, as_.clone())?;
        let ring = Ring::with_names(p, xs.into_iter().chain(as_).collect())?;
        Ok(FamilyContext {
            p: p as u32,
            n,
            monomials,
            ring,
            x_ring,
            a_ring,
        })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Index of the coefficient variable of a monomial.
    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.monomials.iter().position(|m| m == exps)
    }

    /// `G = Σ a_i m_i` in the joint ring.
    pub fn generic(&self) -> Polynomial {
        let n = self.n;
        let terms = self.monomials.iter().enumerate().map(|(i, e)| {
            let mut exps: Vec<u32> = e.clone();
            exps.resize(n + self.len(), 0);
            exps[n + i] = 1;
            (Monomial::from_slice(&exps), 1)
        });
        Polynomial::from_terms(&self.ring, terms)
    }

    /// `G(s)` in `x_ring`.
    pub fn specialize_point(&self, coeffs: &[u32]) -> Polynomial {
        let terms = self
            .monomials
            .iter()
            .zip(coeffs)
            .map(|(e, c)| (Monomial::from_slice(e), *c));
        Polynomial::from_terms(&self.x_ring, terms)
    }
}

/// `b_1, ..., b_{h_max - 1}` in the coefficient ring.
#[derive(Clone, Debug)]
pub struct StrataPolynomials {
    pub b: Vec<Polynomial>,
}

/// Coefficient of the `x`-part `target` (any `a`-part) in `a * b`, as a polynomial in the `a_i`.
fn x_coefficient_of_product(
    ctx: &FamilyContext,
    a: &Polynomial,
    b: &Polynomial,
    target: &[u32],
) -> Polynomial {
    let n = ctx.n;
    let field = ctx.ring.field();
    let mut by_x: FxHashMap<&[u32], Vec<&Monomial>> = FxHashMap::default();
    let mut coeffs: FxHashMap<&Monomial, u32> = FxHashMap::default();
    for (m, c) in b.terms() {
        by_x.entry(&m.exps()[..n]).or_default().push(m);
        coeffs.insert(m, *c);
    }
    let mut acc: FxHashMap<Monomial, u32> = FxHashMap::default();
    let mut need = vec![0u32; n];
    'terms: for (m, c) in a.terms() {
        for i in 0..n {
            let e = m.exps()[i];
            if e > target[i] {
                continue 'terms;
            }
            need[i] = target[i] - e;
        }
        let Some(partners) = by_x.get(need.as_slice()) else {
            continue;
        };
        for mb in partners {
            let prod: Exponents = m.exps()[n..]
                .iter()
                .zip(&mb.exps()[n..])
                .map(|(x, y)| x + y)
                .collect();
            let e = acc.entry(Monomial::new(prod)).or_insert(0);
            *e = field.add(*e, field.mul(*c, coeffs[mb]));
        }
    }
    Polynomial::from_terms(&ctx.a_ring, acc.into_iter().filter(|(_, c)| *c != 0))
}

/// Compute `b_1, ..., b_{h_max - 1}` with the `x`-exponents capped at `p^i - 1` at level `i`.
pub fn strata_polynomials(ctx: &FamilyContext, h_max: u32) -> Result<StrataPolynomials> {
    let p = ctx.p as u64;
    let n = ctx.n;
    let total = ctx.ring.nvars();
    let g1 = ctx.generic().power(p - 1)?;
    let primary: Vec<bool> = (0..total).map(|i| i < n).collect();
    let delta = delta1_grouped(&g1, &primary);
    let mut b = Vec::new();
    // acc = G^{p-1} Δ̃^{1 + ... + p^{i-2}}, truncated for the level about to be read
    let mut acc = g1.clone();
    for i in 1..h_max {
        let q = p
            .checked_pow(i)
            .filter(|q| *q <= u32::MAX as u64)
            .ok_or(Error::ExponentOverflow(u64::MAX))?;
        let target = vec![(q - 1) as u32; n];
        if i == 1 {
            b.push(x_coefficient_of_product(ctx, &acc, &Polynomial::one(&ctx.ring), &target));
            continue;
        }
        // Δ̃^{p^{i-2}} feeds level i and, through acc, every later level
        let keep = if i + 1 < h_max { q * p - 1 } else { q - 1 };
        let d = p.pow(i - 2);
        let mut pre = vec![(keep / d) as u32; n];
        pre.resize(total, u32::MAX);
        let factor = delta.truncate(&pre).frobenius(i - 2);
        b.push(x_coefficient_of_product(ctx, &acc, &factor, &target));
        if i + 1 < h_max {
            let mut next_cap = vec![keep as u32; n];
            next_cap.resize(total, u32::MAX);
            acc = acc.truncate(&next_cap).capped_multiply(&factor, &next_cap)?;
        }
    }
    Ok(StrataPolynomials { b })
}

impl StrataPolynomials {
    /// The largest `h` with `b_1 = ... = b_{h-1} = 0` at the point; `len + 1` means
    /// every computed `b_i` vanishes, so the height is at least that.
    pub fn profile(&self, point: &[u32]) -> u32 {
        self.b
            .iter()
            .position(|b| b.evaluate(point) != 0)
            .map_or(self.b.len() as u32 + 1, |i| i as u32 + 1)
    }
}

/// See [`StrataPolynomials::profile`].
pub fn specialize(strata: &StrataPolynomials, point: &[u32]) -> u32 {
    strata.profile(point)
}

/// Jacobian criterion at the `F_p`-rational points of projective space only.
pub fn smooth_at_rational_points(f: &Polynomial) -> bool {
    let ring = f.ring();
    let p = ring.p();
    let n = ring.nvars();
    let partials: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    // one representative per line: first nonzero coordinate equal to 1
    let mut point = vec![0u32; n];
    for lead in 0..n {
        let free = n - lead - 1;
        let count = (p as u64).pow(free as u32);
        for idx in 0..count {
            point.iter_mut().for_each(|x| *x = 0);
            point[lead] = 1;
            let mut r = idx;
            for slot in point[lead + 1..].iter_mut() {
                *slot = (r % p as u64) as u32;
                r /= p as u64;
            }
            if f.evaluate(&point) == 0 && partials.iter().all(|d| d.evaluate(&point) == 0) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub target_h: u32,
    /// Number of sampled points.
    pub budget: usize,
    pub seed: u64,
    pub smoothness_check: bool,
    /// Levels for the strata pre-filter; 0 disables it.
    pub prefilter_levels: u32,
    pub n_max: u32,
}

/// One sampled point.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub coefficients: Vec<u32>,
    pub polynomial: String,
    pub profile: Option<u32>,
    pub smooth: Option<bool>,
    pub height: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub index: usize,
    pub polynomial: Polynomial,
    pub result: HeightResult,
    pub check: Check,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub hit: Option<SearchHit>,
    pub samples: Vec<SampleRecord>,
}

fn sample_points(ctx: &FamilyContext, budget: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..budget)
        .map(|_| (0..ctx.len()).map(|_| rng.gen_range(0..ctx.p)).collect())
        .collect()
}

const CHUNK: usize = 64;

/// Sample coefficient vectors until one gives height exactly `target_h` with a
/// certificate that re-verifies. Samples are drawn from a seeded generator and
/// evaluated in parallel; the first hit in sampling order is returned.
pub fn search_height(ctx: &FamilyContext, opts: &SearchOptions) -> Result<SearchReport> {
    let strata = if opts.prefilter_levels > 1 {
        Some(strata_polynomials(ctx, opts.prefilter_levels)?)
    } else {
        None
    };
    let points = sample_points(ctx, opts.budget, opts.seed);
    let mut samples = Vec::new();
    for (c, chunk) in points.chunks(CHUNK).enumerate() {
        let done: Vec<(SampleRecord, Option<SearchHit>)> = chunk
            .par_iter()
            .enumerate()
            .map(|(k, point)| evaluate_point(ctx, opts, strata.as_ref(), c * CHUNK + k, point))
            .collect::<Result<_>>()?;
        let mut hit = None;
        for (rec, h) in done {
            samples.push(rec);
            if hit.is_none() {
                hit = h;
            }
        }
        if let Some(hit) = hit {
            samples.truncate(hit.index + 1);
            return Ok(SearchReport {
                hit: Some(hit),
                samples,
            });
        }
    }
    Ok(SearchReport { hit: None, samples })
}

fn evaluate_point(
    ctx: &FamilyContext,
    opts: &SearchOptions,
    strata: Option<&StrataPolynomials>,
    index: usize,
    point: &[u32],
) -> Result<(SampleRecord, Option<SearchHit>)> {
    let f = ctx.specialize_point(point);
    let mut rec = SampleRecord {
        index,
        coefficients: point.to_vec(),
        polynomial: f.to_string(),
        profile: None,
        smooth: None,
        height: None,
    };
    if f.is_zero() {
        return Ok((rec, None));
    }
    if let Some(s) = strata {
        let prof = s.profile(point);
        rec.profile = Some(prof);
        let bound = s.b.len() as u32 + 1;
        // the profile is the exact height when it is below the bound
        if prof < opts.target_h || (prof < bound && prof > opts.target_h) {
            return Ok((rec, None));
        }
    }
    if opts.smoothness_check {
        let smooth = smooth_at_rational_points(&f);
        rec.smooth = Some(smooth);
        if !smooth {
            return Ok((rec, None));
        }
    }
    let ideal = Ideal::new(&ctx.x_ring, vec![f.clone()]);
    let result = height(
        &ideal,
        None,
        HeightOptions {
            n_max: opts.n_max.max(opts.target_h),
            cross_check: false,
        },
    )?;
    rec.height = Some(result.verdict.to_string());
    if result.verdict != Verdict::Finite(opts.target_h) {
        return Ok((rec, None));
    }
    let check = verify_certificate(&ideal, None, &result)?;
    if !check.ok {
        return Ok((rec, None));
    }
    Ok((
        rec,
        Some(SearchHit {
            index,
            polynomial: f,
            result,
            check,
        }),
    ))
}

/// One CSV row per sample.
pub fn write_samples_csv<W: Write>(samples: &[SampleRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::precondition(format!("csv output: {e}"));
    w.write_record(["index", "coefficients", "polynomial", "profile", "smooth", "height"])
        .map_err(io)?;
    for s in samples {
        let coeffs: Vec<String> = s.coefficients.iter().map(|c| c.to_string()).collect();
        w.write_record([
            s.index.to_string(),
            coeffs.join(" "),
            s.polynomial.clone(),
            s.profile.map(|p| p.to_string()).unwrap_or_default(),
            s.smooth.map(|b| b.to_string()).unwrap_or_default(),
            s.height.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::precondition(format!("csv output: {e}")))?;
    Ok(())
}
