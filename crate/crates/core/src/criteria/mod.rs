//! Decision procedures for the quasi-F-split height, each with a certificate that
//! can be re-checked independently.

pub mod chain;
pub mod graded;
pub mod product;
pub mod quick;

use std::fmt;
use std::time::Instant;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frobenius::{in_max_ideal_frobenius_power, u_map};
use crate::grading::Grading;
use crate::groebner::Ideal;
use crate::parse::parse_polynomial;
use crate::poly::{same_ring, Polynomial};

pub use chain::{fedder_colon, i1_generators, run_chain, ChainOutcome, ChainSetup, Level};
pub use graded::{capped_coefficient, capped_f_n, check_calabi_yau, cy_iterate, verify_coefficient_witness, CyOutcome};
pub use product::{partial_u, product_witness};
pub use quick::{check_non_qfs_test, fedder_fsplit, non_qfs_quick, NonQfsTest};

pub const DEFAULT_N_MAX: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Finite(u32),
    Infinite,
    LowerBound(u32),
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Finite(_) => "Finite",
            Verdict::Infinite => "Infinite",
            Verdict::LowerBound(_) => "LowerBound",
        }
    }

    pub fn n(self) -> Option<u32> {
        match self {
            Verdict::Finite(n) | Verdict::LowerBound(n) => Some(n),
            Verdict::Infinite => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Finite(n) => write!(f, "Finite({n})"),
            Verdict::Infinite => write!(f, "Infinite"),
            Verdict::LowerBound(n) => write!(f, "LowerBound({n})"),
        }
    }
}

/// `u(F_*g_l)` and `θ(F_*g_l)` for one link of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub level: u32,
    pub u_image: String,
    pub theta_image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data")]
pub enum Certificate {
    /// Nonzero coefficient of `(x_1 ⋯ x_N)^{p^n-1}` in `f_n`.
    CoefficientWitness { level: u32, coefficient: u32 },
    /// `g_1, ..., g_n` with `g_n ∉ m^{[p]}`.
    ChainWitness { chain: Vec<String>, steps: Vec<StepRecord> },
    /// Reduced basis of the fixed point of the chain.
    IInftyStabilized { generators: Vec<String>, iterations: u32 },
    NonQfs { test: NonQfsTest },
    /// An ideal `J ⊆ m^{[p]}` closed under the chain step.
    FixedPointEnclosure { generators: Vec<String> },
    /// No verdict beyond the cutoff.
    Cutoff { n_max: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Fedder,
    GradedCy,
    Quick,
    Local,
    QfsDecide,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightResult {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub route: Route,
    /// Reduction steps spent in Gröbner computations.
    pub steps: u64,
    pub wall_time_ms: u64,
}

impl Serialize for HeightResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HeightResult", 6)?;
        st.serialize_field("verdict", self.verdict.label())?;
        st.serialize_field("n", &self.verdict.n())?;
        st.serialize_field("certificate", &self.certificate)?;
        st.serialize_field("route", &self.route)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("wall_time_ms", &self.wall_time_ms)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HeightOptions {
    pub n_max: u32,
    /// Run every applicable route and fail on disagreement.
    pub cross_check: bool,
}

impl Default for HeightOptions {
    fn default() -> Self {
        HeightOptions {
            n_max: DEFAULT_N_MAX,
            cross_check: false,
        }
    }
}

fn strings(polys: &[Polynomial]) -> Vec<String> {
    polys.iter().map(|g| g.to_string()).collect()
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn chain_certificate(setup: &ChainSetup, chain: &[Polynomial]) -> Result<Certificate> {
    let steps = chain[..chain.len() - 1]
        .iter()
        .enumerate()
        .map(|(l, g)| {
            Ok(StepRecord {
                level: l as u32 + 1,
                u_image: u_map(g).to_string(),
                theta_image: setup.theta()?.apply(g).to_string(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Certificate::ChainWitness {
        chain: strings(chain),
        steps,
    })
}

/// Graded Calabi–Yau route: the first level with a nonzero top coefficient.
pub fn height_graded_cy(gens: &[Polynomial], grading: &Grading, n_max: u32) -> Result<HeightResult> {
    let start = Instant::now();
    let (verdict, certificate) = match cy_iterate(gens, grading, n_max)? {
        CyOutcome::Finite { level, coefficient } => {
            (Verdict::Finite(level), Certificate::CoefficientWitness { level, coefficient })
        }
        CyOutcome::Vanishing { cutoff, .. } => (Verdict::LowerBound(cutoff), Certificate::Cutoff { n_max: cutoff }),
    };
    Ok(HeightResult {
        verdict,
        certificate,
        route: Route::GradedCy,
        steps: 0,
        wall_time_ms: elapsed_ms(start),
    })
}

/// Walk `I_1 ⊆ I_2 ⊆ ...` until some `I_n ⊄ m^{[p]}`, the chain stabilizes, or `n_max`.
/// A stabilized chain inside `m^{[p]}` means no `I_n` ever escapes, so the verdict is
/// `Infinite`.
pub fn height_local(ideal: &Ideal, n_max: u32) -> Result<HeightResult> {
    let start = Instant::now();
    let setup = ChainSetup::standard(ideal)?;
    let mut steps = 0;
    let (verdict, certificate) = match run_chain(&setup, Some(n_max), true, true, &mut steps)? {
        ChainOutcome::Escaped(level) => {
            let chain = level
                .witness_chain()
                .ok_or_else(|| Error::Inconsistent("escaped level without a witness".into()))?;
            (Verdict::Finite(level.index), chain_certificate(&setup, &chain)?)
        }
        ChainOutcome::Stabilized(level) => (
            Verdict::Infinite,
            Certificate::IInftyStabilized {
                generators: strings(&level.basis),
                iterations: level.index,
            },
        ),
        ChainOutcome::Cutoff(_) => (Verdict::LowerBound(n_max), Certificate::Cutoff { n_max }),
    };
    Ok(HeightResult {
        verdict,
        certificate,
        route: Route::Local,
        steps,
        wall_time_ms: elapsed_ms(start),
    })
}

/// Outcome of the fixed-point computation.
#[derive(Clone, Debug)]
pub struct QfsDecision {
    pub quasi_f_split: bool,
    /// Reduced basis of `I_∞`.
    pub i_infinity: Vec<Polynomial>,
    pub iterations: u32,
    pub steps: u64,
}

impl QfsDecision {
    pub fn certificate(&self) -> Certificate {
        Certificate::IInftyStabilized {
            generators: strings(&self.i_infinity),
            iterations: self.iterations,
        }
    }
}

/// Iterate `J_0 = (I^{[p]} : I)`, `J_{k+1} = J_k + θ(F_*J_k ∩ Ker u)` to its fixed point.
pub fn qfs_decide(ideal: &Ideal) -> Result<QfsDecision> {
    let setup = ChainSetup::new(ideal, fedder_colon(ideal)?)?;
    let mut steps = 0;
    let level = match run_chain(&setup, None, false, false, &mut steps)? {
        ChainOutcome::Stabilized(level) => level,
        _ => unreachable!("an uncapped chain always stabilizes"),
    };
    Ok(QfsDecision {
        quasi_f_split: level.escapes_bracket(),
        i_infinity: level.basis,
        iterations: level.index,
        steps,
    })
}

/// Result of a certificate check; `failure` names the first failing condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub ok: bool,
    /// For chains: the certified upper bound on the height.
    pub bound: Option<u32>,
    pub failure: Option<String>,
}

impl Check {
    fn pass(bound: Option<u32>) -> Self {
        Check {
            ok: true,
            bound,
            failure: None,
        }
    }

    fn fail(msg: String) -> Self {
        Check {
            ok: false,
            bound: None,
            failure: Some(msg),
        }
    }
}

fn check_ring(ideal: &Ideal, polys: &[Polynomial]) -> Result<()> {
    if polys.iter().all(|g| same_ring(g.ring(), ideal.ring())) {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

/// Check `g_1 ∈ I_1`, `u(F_*g_l) = 0` and `g_{l+1} - θ(F_*g_l) ∈ I_1` for each link, and
/// `g_n ∉ m^{[p]}`; then `g_l ∈ I_l` for all `l` and `sht ≤ n`. If `g_n ∈ m^{[p]}` but
/// `u(F_*g_n) = 0` and `θ(F_*g_n) ∉ m^{[p]}`, the chain closes one level later.
pub fn verify_witness_chain(ideal: &Ideal, chain: &[Polynomial]) -> Result<Check> {
    check_ring(ideal, chain)?;
    if chain.is_empty() {
        return Ok(Check::fail("empty chain".into()));
    }
    let setup = ChainSetup::standard(ideal)?;
    if !setup.i1.contains(&chain[0])? {
        return Ok(Check::fail("step 1: g_1 is not in I_1".into()));
    }
    for (l, pair) in chain.windows(2).enumerate() {
        let l = l + 1;
        let u = u_map(&pair[0]);
        if !u.is_zero() {
            return Ok(Check::fail(format!("step {l}: u(F_*g_{l}) = {u} is nonzero")));
        }
        let t = setup.theta()?.apply(&pair[0]);
        if !setup.i1.contains(&(&pair[1] - &t))? {
            return Ok(Check::fail(format!(
                "step {l}: g_{} - θ(F_*g_{l}) is not in I_1, θ image {t}",
                l + 1
            )));
        }
    }
    let n = chain.len() as u32;
    let last = &chain[chain.len() - 1];
    if !in_max_ideal_frobenius_power(last, 1) {
        return Ok(Check::pass(Some(n)));
    }
    if u_map(last).is_zero() && !in_max_ideal_frobenius_power(&setup.theta()?.apply(last), 1) {
        return Ok(Check::pass(Some(n + 1)));
    }
    Ok(Check::fail(format!("step {n}: g_{n} and its θ image lie in m^[p]")))
}

/// Check `J ⊆ m^{[p]}` and `J ⊇ θ(F_*J ∩ Ker u) + I_1`. Then every `I_n ⊆ J`, so no
/// `I_n` escapes `m^{[p]}` and the height is infinite.
pub fn verify_infinity_certificate(ideal: &Ideal, j: &Ideal) -> Result<Check> {
    check_ring(ideal, j.generators())?;
    if let Some(g) = j.generators().iter().find(|g| !in_max_ideal_frobenius_power(g, 1)) {
        return Ok(Check::fail(format!("generator {g} of J is not in m^[p]")));
    }
    let setup = ChainSetup::standard(ideal)?;
    for g in setup.i1.generators() {
        if !j.contains(g)? {
            return Ok(Check::fail(format!("I_1 generator {g} is not in J")));
        }
    }
    let level = Level {
        index: 1,
        basis: j.groebner_basis()?.to_vec(),
        towers: None,
    };
    let (image, _) = setup.step(&level)?;
    for g in &image.basis {
        if !j.contains(g)? {
            return Ok(Check::fail(format!("θ image {g} is not in J")));
        }
    }
    Ok(Check::pass(None))
}

fn disagree(a: Verdict, b: Verdict, what: &str) -> Error {
    Error::Inconsistent(format!("{what}: {a} versus {b}"))
}

/// Run the criteria in order: Fedder, graded Calabi–Yau (under `grading`, or the
/// standard grading when none is given), the monomial tests, the ideal chain, and
/// finally the fixed point to separate `Infinite` from a cutoff.
pub fn height(ideal: &Ideal, grading: Option<&Grading>, opts: HeightOptions) -> Result<HeightResult> {
    let start = Instant::now();
    let gens = ideal.generators();
    if gens.is_empty() {
        return Err(Error::precondition("no generators"));
    }
    let ring = ideal.ring();
    let n_max = opts.n_max.max(1);
    let finish = |verdict, certificate, route, steps| HeightResult {
        verdict,
        certificate,
        route,
        steps,
        wall_time_ms: elapsed_ms(start),
    };
    let mut steps = 0;

    if fedder_fsplit(ideal)? {
        let f = chain::product(ring, gens);
        let chain = vec![f.power(ring.p() as u64 - 1)?];
        let cert = Certificate::ChainWitness {
            chain: strings(&chain),
            steps: Vec::new(),
        };
        return Ok(finish(Verdict::Finite(1), cert, Route::Fedder, 0));
    }

    let standard = Grading::standard(ring.nvars());
    let grading = grading.unwrap_or(&standard);
    let mut graded_exhausted = false;
    let mut graded_ran = false;
    if check_calabi_yau(gens, grading).is_ok() {
        graded_ran = true;
        let outcome = cy_iterate(gens, grading, n_max)?;
        if opts.cross_check {
            let local = height_local(ideal, n_max)?;
            steps += local.steps;
            let graded = match outcome {
                CyOutcome::Finite { level, .. } => Verdict::Finite(level),
                CyOutcome::Vanishing { .. } => Verdict::LowerBound(n_max),
            };
            let agree = match (graded, local.verdict) {
                (Verdict::LowerBound(_), Verdict::Infinite) => true,
                (a, b) => a == b,
            };
            if !agree {
                return Err(disagree(graded, local.verdict, "graded and local routes"));
            }
        }
        match outcome {
            CyOutcome::Finite { level, coefficient } => {
                let cert = Certificate::CoefficientWitness { level, coefficient };
                return Ok(finish(Verdict::Finite(level), cert, Route::GradedCy, steps));
            }
            CyOutcome::Vanishing { exhausted, .. } => graded_exhausted = exhausted,
        }
    }

    if let Some(test) = non_qfs_quick(gens)? {
        if opts.cross_check {
            let d = qfs_decide(ideal)?;
            if d.quasi_f_split {
                return Err(disagree(Verdict::Infinite, Verdict::LowerBound(n_max), "monomial test and fixed point"));
            }
        }
        return Ok(finish(Verdict::Infinite, Certificate::NonQfs { test }, Route::Quick, steps));
    }

    if !graded_ran {
        let local = height_local(ideal, n_max)?;
        steps += local.steps;
        if !matches!(local.verdict, Verdict::LowerBound(_)) {
            return Ok(finish(local.verdict, local.certificate, Route::Local, steps));
        }
    }

    let d = qfs_decide(ideal)?;
    steps += d.steps;
    if d.quasi_f_split {
        if graded_exhausted {
            return Err(disagree(Verdict::Infinite, Verdict::LowerBound(n_max), "graded route and fixed point"));
        }
        return Ok(finish(Verdict::LowerBound(n_max), Certificate::Cutoff { n_max }, Route::QfsDecide, steps));
    }
    Ok(finish(Verdict::Infinite, d.certificate(), Route::QfsDecide, steps))
}

fn parse_all(ideal: &Ideal, texts: &[String]) -> Result<Vec<Polynomial>> {
    texts.iter().map(|t| parse_polynomial(t, ideal.ring())).collect()
}

/// Re-check a result's certificate against its verdict.
pub fn verify_certificate(ideal: &Ideal, grading: Option<&Grading>, result: &HeightResult) -> Result<Check> {
    let gens = ideal.generators();
    let standard = Grading::standard(ideal.ring().nvars());
    let mismatch = || Ok(Check::fail(format!("certificate does not match verdict {}", result.verdict)));
    match (&result.certificate, result.verdict) {
        (Certificate::CoefficientWitness { level, coefficient }, Verdict::Finite(n)) if *level == n => {
            let ok = verify_coefficient_witness(gens, grading.unwrap_or(&standard), *level, *coefficient)?;
            Ok(if ok {
                Check::pass(Some(n))
            } else {
                Check::fail(format!("coefficient at level {level} does not reproduce"))
            })
        }
        (Certificate::ChainWitness { chain, .. }, Verdict::Finite(n)) => {
            let chain = parse_all(ideal, chain)?;
            let check = verify_witness_chain(ideal, &chain)?;
            if !check.ok {
                return Ok(check);
            }
            if check.bound != Some(n) {
                return Ok(Check::fail(format!("chain certifies height at most {:?}, not {n}", check.bound)));
            }
            if n > 1 && fedder_fsplit(ideal)? {
                return Ok(Check::fail("the ring is F-split".into()));
            }
            Ok(check)
        }
        (
            Certificate::IInftyStabilized { generators, .. } | Certificate::FixedPointEnclosure { generators },
            Verdict::Infinite,
        ) => {
            let j = Ideal::new(ideal.ring(), parse_all(ideal, generators)?);
            verify_infinity_certificate(ideal, &j)
        }
        (Certificate::NonQfs { test }, Verdict::Infinite) => Ok(if check_non_qfs_test(gens, *test)? {
            Check::pass(None)
        } else {
            Check::fail(format!("test `{}` does not hold", test.tag()))
        }),
        (Certificate::Cutoff { n_max }, Verdict::LowerBound(n)) if *n_max == n => Ok(Check::pass(None)),
        _ => mismatch(),
    }
}
