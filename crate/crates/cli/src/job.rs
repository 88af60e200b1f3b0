//! A single unit of work, shared by the subcommands and by batch files.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qfsplit::criteria::{
    fedder_fsplit, height, product_witness, qfs_decide, verify_certificate, verify_infinity_certificate,
    verify_witness_chain, HeightOptions, DEFAULT_N_MAX,
};
use qfsplit::groebner::with_budget;
use qfsplit::rdp::{rdp_table, render_csv, render_markdown};
use qfsplit::strata::{search_height, strata_polynomials, write_samples_csv, FamilyContext, SearchOptions};
use qfsplit::{check_homogeneous, parse_polynomial, Error, Grading, Ideal, Polynomial, Ring, RingRef};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
/// Computed, but a check failed: a certificate was rejected or a table row disagrees
/// with its closed form.
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Height,
    Fsplit,
    Qfs,
    VerifyChain,
    VerifyInfty,
    Strata,
    Search,
    RdpTable,
    Product,
}

/// Job record; batch files hold a JSON list of these.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: Option<Command>,
    #[serde(default)]
    pub p: u64,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub polys: Vec<String>,
    /// Grading matrix, rows separated by `|` or `;`.
    pub grading: Option<String>,
    pub weights: Option<Vec<u32>>,
    pub n_max: Option<u32>,
    /// Gröbner reduction-step budget for this job.
    pub budget: Option<u64>,
    #[serde(default)]
    pub verify: bool,
    /// Chain for `verify-chain`, or the `X`-side chain for `product`.
    #[serde(default)]
    pub chain: Vec<String>,
    /// Generators of the enclosing ideal for `verify-infty`.
    #[serde(default)]
    pub j: Vec<String>,
    /// `product`: the `X` and `Y` hypersurfaces and the `Y`-side multiplier.
    pub x_poly: Option<String>,
    pub y_poly: Option<String>,
    pub h: Option<String>,
    /// `strata` / `search`: number of variables (= degree).
    pub n: Option<usize>,
    pub h_max: Option<u32>,
    pub target: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub restricted: bool,
    #[serde(default)]
    pub smooth: bool,
    /// `search`: write one CSV row per sample here.
    pub csv: Option<String>,
    /// `rdp-table`
    pub primes: Option<Vec<u32>>,
    pub n_bound: Option<u32>,
    pub table_format: Option<String>,
}

/// Outcome of a job: exit code, JSON report, and a text rendering.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub text: String,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    }
}

pub fn failure(e: &Error) -> Outcome {
    Outcome {
        code: exit_code(e),
        report: json!({ "error": e.to_string() }),
        text: format!("error: {e}"),
    }
}

struct Input {
    ring: RingRef,
    gens: Vec<Polynomial>,
    grading: Option<Grading>,
}

fn parse_list(ring: &RingRef, texts: &[String]) -> Result<Vec<Polynomial>, Error> {
    texts.iter().map(|t| parse_polynomial(t, ring)).collect()
}

fn input(job: &Job) -> Result<Input, Error> {
    let names: Vec<&str> = job.vars.iter().map(|s| s.as_str()).collect();
    let ring = Ring::new(job.p, &names)?;
    let gens = parse_list(&ring, &job.polys)?;
    if gens.is_empty() {
        return Err(Error::precondition("no polynomial given"));
    }
    if gens.iter().any(|g| g.is_zero()) {
        return Err(Error::precondition("zero generator"));
    }
    let grading = match (&job.grading, &job.weights) {
        (Some(_), Some(_)) => return Err(Error::InvalidGrading("give either a grading matrix or weights".into())),
        (Some(g), None) => Some(Grading::parse(g)?),
        (None, Some(w)) => Some(Grading::weighted(w)?),
        (None, None) => None,
    };
    if let Some(g) = &grading {
        if g.nvars() != ring.nvars() {
            return Err(Error::InvalidGrading(format!(
                "{} columns for {} variables",
                g.nvars(),
                ring.nvars()
            )));
        }
        for f in &gens {
            check_homogeneous(f, g)?;
        }
    }
    Ok(Input { ring, gens, grading })
}

/// Default cutoff, raised with the degree so that the `D` families fit.
fn n_max_for(job: &Job, gens: &[Polynomial]) -> u32 {
    if let Some(n) = job.n_max {
        return n.max(1);
    }
    let deg = gens.iter().filter_map(|g| g.total_degree()).max().unwrap_or(1).max(2);
    let by_degree = 64 - (deg - 1).leading_zeros() + 2;
    DEFAULT_N_MAX.max(by_degree)
}

pub fn run(job: &Job) -> Outcome {
    let go = || match job.command {
        Some(c) => dispatch(c, job),
        None => Err(Error::precondition("job has no command")),
    };
    let res = match job.budget {
        Some(b) => with_budget(b, go),
        None => go(),
    };
    res.unwrap_or_else(|e| failure(&e))
}

fn dispatch(c: Command, job: &Job) -> Result<Outcome, Error> {
    match c {
        Command::Height => run_height(job),
        Command::Fsplit => run_fsplit(job),
        Command::Qfs => run_qfs(job),
        Command::VerifyChain => run_verify_chain(job),
        Command::VerifyInfty => run_verify_infty(job),
        Command::Strata => run_strata(job),
        Command::Search => run_search(job),
        Command::RdpTable => run_rdp(job),
        Command::Product => run_product(job),
    }
}

fn ok(report: Value, text: String) -> Result<Outcome, Error> {
    Ok(Outcome {
        code: EXIT_OK,
        report,
        text,
    })
}

fn run_height(job: &Job) -> Result<Outcome, Error> {
    let inp = input(job)?;
    let ideal = Ideal::new(&inp.ring, inp.gens.clone());
    let opts = HeightOptions {
        n_max: n_max_for(job, &inp.gens),
        cross_check: false,
    };
    let result = height(&ideal, inp.grading.as_ref(), opts)?;
    let mut report = serde_json::to_value(&result).expect("report serializes");
    let mut text = format!("verdict: {}\nroute: {}\n", result.verdict, report["route"].as_str().unwrap_or(""));
    text.push_str(&render_certificate(&report["certificate"]));
    if job.verify {
        let check = verify_certificate(&ideal, inp.grading.as_ref(), &result)?;
        report["verified"] = json!(check.ok);
        text.push_str(&format!("verified: {}\n", check.ok));
        if let Some(f) = &check.failure {
            report["verify_failure"] = json!(f);
            text.push_str(&format!("verify failure: {f}\n"));
        }
        return checked(check.ok, report, text);
    }
    ok(report, text)
}

fn render_certificate(cert: &Value) -> String {
    let kind = cert["kind"].as_str().unwrap_or("?");
    let data = &cert["data"];
    let mut s = format!("certificate: {kind}\n");
    match kind {
        "CoefficientWitness" => {
            s.push_str(&format!("  level {} coefficient {}\n", data["level"], data["coefficient"]));
        }
        "ChainWitness" => {
            for (i, g) in data["chain"].as_array().into_iter().flatten().enumerate() {
                s.push_str(&format!("  g_{} = {}\n", i + 1, g.as_str().unwrap_or("")));
            }
        }
        "IInftyStabilized" | "FixedPointEnclosure" => {
            for g in data["generators"].as_array().into_iter().flatten() {
                s.push_str(&format!("  {}\n", g.as_str().unwrap_or("")));
            }
        }
        "NonQfs" => s.push_str(&format!("  test: {}\n", data["test"].as_str().unwrap_or(""))),
        "Cutoff" => s.push_str(&format!("  cutoff n_max = {}\n", data["n_max"])),
        _ => {}
    }
    s
}

fn run_fsplit(job: &Job) -> Result<Outcome, Error> {
    let inp = input(job)?;
    let split = fedder_fsplit(&Ideal::new(&inp.ring, inp.gens))?;
    ok(json!({ "f_split": split }), format!("F-split: {split}\n"))
}

fn run_qfs(job: &Job) -> Result<Outcome, Error> {
    let inp = input(job)?;
    let ideal = Ideal::new(&inp.ring, inp.gens);
    let d = qfs_decide(&ideal)?;
    let gens: Vec<String> = d.i_infinity.iter().map(|g| g.to_string()).collect();
    let mut report = json!({
        "verdict": if d.quasi_f_split { "QuasiFSplit" } else { "Infinite" },
        "quasi_f_split": d.quasi_f_split,
        "certificate": d.certificate(),
        "steps": d.steps,
    });
    let mut text = format!(
        "verdict: {}\nI_inf after {} iterations:\n",
        if d.quasi_f_split { "quasi-F-split" } else { "Infinite" },
        d.iterations
    );
    for g in &gens {
        text.push_str(&format!("  {g}\n"));
    }
    if job.verify && !d.quasi_f_split {
        let check = verify_infinity_certificate(&ideal, &Ideal::new(&inp.ring, d.i_infinity.clone()))?;
        report["verified"] = json!(check.ok);
        text.push_str(&format!("verified: {}\n", check.ok));
        return checked(check.ok, report, text);
    }
    ok(report, text)
}

fn checked(ok: bool, report: Value, text: String) -> Result<Outcome, Error> {
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_MISMATCH },
        report,
        text,
    })
}

fn check_report(check: &qfsplit::criteria::Check) -> (Value, String) {
    let mut text = format!("accepted: {}\n", check.ok);
    if let Some(b) = check.bound {
        text.push_str(&format!("height at most {b}\n"));
    }
    if let Some(f) = &check.failure {
        text.push_str(&format!("failure: {f}\n"));
    }
    (
        json!({ "accepted": check.ok, "bound": check.bound, "failure": check.failure }),
        text,
    )
}

fn run_verify_chain(job: &Job) -> Result<Outcome, Error> {
    let inp = input(job)?;
    let chain = parse_list(&inp.ring, &job.chain)?;
    let check = verify_witness_chain(&Ideal::new(&inp.ring, inp.gens), &chain)?;
    let (r, t) = check_report(&check);
    checked(check.ok, r, t)
}

fn run_verify_infty(job: &Job) -> Result<Outcome, Error> {
    let inp = input(job)?;
    let j = parse_list(&inp.ring, &job.j)?;
    if j.is_empty() {
        return Err(Error::precondition("no generators for J"));
    }
    let check = verify_infinity_certificate(&Ideal::new(&inp.ring, inp.gens), &Ideal::new(&inp.ring, j))?;
    let (r, t) = check_report(&check);
    checked(check.ok, r, t)
}

fn family(job: &Job) -> Result<FamilyContext, Error> {
    let n = job.n.ok_or_else(|| Error::precondition("missing n"))?;
    if job.restricted {
        FamilyContext::restricted(job.p, n)
    } else {
        FamilyContext::new(job.p, n)
    }
}

fn run_strata(job: &Job) -> Result<Outcome, Error> {
    let ctx = family(job)?;
    let h_max = job.h_max.unwrap_or(3).max(2);
    let s = strata_polynomials(&ctx, h_max)?;
    let b: Vec<String> = s.b.iter().map(|b| b.to_string()).collect();
    let mut text = String::new();
    for (i, x) in b.iter().enumerate() {
        text.push_str(&format!("b_{} = {x}\n", i + 1));
    }
    ok(json!({ "p": job.p, "n": ctx.n, "monomials": ctx.len(), "b": b }), text)
}

fn run_search(job: &Job) -> Result<Outcome, Error> {
    let ctx = family(job)?;
    let target = job.target.ok_or_else(|| Error::precondition("missing target"))?;
    let opts = SearchOptions {
        target_h: target,
        budget: job.samples.unwrap_or(200),
        seed: job.seed.unwrap_or(0),
        smoothness_check: job.smooth,
        prefilter_levels: job.h_max.unwrap_or(0),
        n_max: job.n_max.unwrap_or(DEFAULT_N_MAX),
    };
    let rep = search_height(&ctx, &opts)?;
    if let Some(path) = &job.csv {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::precondition(format!("cannot write {path}: {e}")))?;
        write_samples_csv(&rep.samples, file)?;
    }
    let (hit, text) = match &rep.hit {
        Some(h) => (
            json!({
                "sample": h.index,
                "polynomial": h.polynomial.to_string(),
                "result": h.result,
                "verified": h.check.ok,
            }),
            format!(
                "found after {} samples: {}\nverdict: {} (certificate verified: {})\n",
                h.index + 1,
                h.polynomial,
                h.result.verdict,
                h.check.ok
            ),
        ),
        None => (Value::Null, format!("no witness of height {target} in {} samples\n", rep.samples.len())),
    };
    ok(json!({ "target": target, "samples": rep.samples.len(), "hit": hit }), text)
}

fn run_rdp(job: &Job) -> Result<Outcome, Error> {
    let primes = job.primes.clone().unwrap_or_else(|| vec![2, 3, 5]);
    if let Some(p) = primes.iter().find(|p| ![2, 3, 5].contains(*p)) {
        return Err(Error::precondition(format!("the table covers p in {{2, 3, 5}}, not {p}")));
    }
    let rows = rdp_table(&primes, job.n_bound.unwrap_or(8))?;
    let all = rows.iter().all(|r| r.matches);
    let text = match job.table_format.as_deref() {
        Some("csv") => render_csv(&rows),
        _ => render_markdown(&rows),
    };
    checked(all, json!({ "rows": rows, "all_match": all }), text)
}

fn run_product(job: &Job) -> Result<Outcome, Error> {
    let names: Vec<&str> = job.vars.iter().map(|s| s.as_str()).collect();
    let ring = Ring::new(job.p, &names)?;
    let need = |o: &Option<String>, what: &str| -> Result<Polynomial, Error> {
        let t = o.as_ref().ok_or_else(|| Error::precondition(format!("missing {what}")))?;
        parse_polynomial(t, &ring)
    };
    let fx = need(&job.x_poly, "x_poly")?;
    let fy = need(&job.y_poly, "y_poly")?;
    let h = need(&job.h, "h")?;
    let gs = parse_list(&ring, &job.chain)?;
    let chain = product_witness(&gs, &h, &fx, &fy)?;
    let check = verify_witness_chain(&Ideal::new(&ring, vec![fx, fy]), &chain)?;
    let strings: Vec<String> = chain.iter().map(|g| g.to_string()).collect();
    let mut text = String::new();
    for (i, g) in strings.iter().enumerate() {
        text.push_str(&format!("f_{} = {g}\n", i + 1));
    }
    let (r, t) = check_report(&check);
    text.push_str(&t);
    checked(check.ok, json!({ "chain": strings, "check": r }), text)
}
