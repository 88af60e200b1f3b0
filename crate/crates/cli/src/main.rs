//! `qfsplit`: quasi-F-split heights from the command line.

mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use job::{failure, Command, Job, Outcome, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "qfsplit", version, about = "Quasi-F-split heights of hypersurfaces and complete intersections over F_p")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Zero out wall-clock times so reports are byte-stable.
    #[arg(long, global = true)]
    stable: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// The prime p.
    #[arg(long)]
    p: u64,
    /// Comma-separated variable names.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    /// A generator; repeat for complete intersections.
    #[arg(long = "poly")]
    polys: Vec<String>,
    /// Grading matrix: entries separated by commas, rows by `|` or `;`.
    #[arg(long)]
    grading: Option<String>,
    /// Weights of a weighted projective space.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u32>>,
    /// Gröbner reduction-step budget.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quasi-F-split height through all criteria.
    Height {
        #[command(flatten)]
        c: Common,
        /// Chain cutoff; the default grows with the degree.
        #[arg(long)]
        n_max: Option<u32>,
        /// Re-check the certificate before printing.
        #[arg(long)]
        verify: bool,
    },
    /// Fedder's F-splitting test.
    Fsplit {
        #[command(flatten)]
        c: Common,
    },
    /// Decide quasi-F-splitness through the fixed point I_inf.
    Qfs {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        verify: bool,
    },
    /// Check a witness chain g_1, ..., g_n.
    VerifyChain {
        #[command(flatten)]
        c: Common,
        /// A chain element; repeat in order.
        #[arg(long = "chain")]
        chain: Vec<String>,
    },
    /// Check that J encloses I_inf inside m^[p].
    VerifyInfty {
        #[command(flatten)]
        c: Common,
        /// A generator of J; repeat.
        #[arg(long = "j")]
        j: Vec<String>,
    },
    /// Strata polynomials b_1, ..., b_{h-1} of the degree-N family in N variables.
    Strata {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        h_max: u32,
        /// Only x_1^N and monomials without x_1.
        #[arg(long)]
        restricted: bool,
    },
    /// Seeded search for a hypersurface of prescribed height.
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        restricted: bool,
        /// Reject candidates singular at an F_p-point.
        #[arg(long)]
        smooth: bool,
        /// Pre-filter with strata polynomials up to this level (0 = off).
        #[arg(long, default_value_t = 0)]
        prefilter: u32,
        #[arg(long)]
        n_max: Option<u32>,
        /// Write one CSV row per sample.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reproduce the table of non-taut rational double points.
    RdpTable {
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u32>,
        #[arg(long, default_value_t = 8)]
        n_bound: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Markdown)]
        table: TableFormat,
    },
    /// Combine a chain for X with a multiplier for Y into a chain for X x Y.
    Product {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long)]
        x_poly: String,
        #[arg(long)]
        y_poly: String,
        #[arg(long = "chain")]
        chain: Vec<String>,
        #[arg(long)]
        h: String,
    },
    /// Run a JSON list of jobs in parallel.
    Batch { path: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Markdown,
    Csv,
}

fn base(command: Command, c: Common) -> Job {
    Job {
        command: Some(command),
        p: c.p,
        vars: c.vars,
        polys: c.polys,
        grading: c.grading,
        weights: c.weights,
        budget: c.budget,
        ..Job::default()
    }
}

fn to_job(cmd: Cmd) -> Job {
    match cmd {
        Cmd::Height { c, n_max, verify } => Job {
            n_max,
            verify,
            ..base(Command::Height, c)
        },
        Cmd::Fsplit { c } => base(Command::Fsplit, c),
        Cmd::Qfs { c, verify } => Job {
            verify,
            ..base(Command::Qfs, c)
        },
        Cmd::VerifyChain { c, chain } => Job {
            chain,
            ..base(Command::VerifyChain, c)
        },
        Cmd::VerifyInfty { c, j } => Job {
            j,
            ..base(Command::VerifyInfty, c)
        },
        Cmd::Strata { p, n, h_max, restricted } => Job {
            command: Some(Command::Strata),
            p,
            n: Some(n),
            h_max: Some(h_max),
            restricted,
            ..Job::default()
        },
        Cmd::Search {
            p,
            n,
            target,
            samples,
            seed,
            restricted,
            smooth,
            prefilter,
            n_max,
            csv,
        } => Job {
            command: Some(Command::Search),
            p,
            n: Some(n),
            target: Some(target),
            samples: Some(samples),
            seed: Some(seed),
            restricted,
            smooth,
            h_max: Some(prefilter),
            n_max,
            csv: csv.map(|p| p.display().to_string()),
            ..Job::default()
        },
        Cmd::RdpTable { primes, n_bound, table } => Job {
            command: Some(Command::RdpTable),
            primes: Some(primes),
            n_bound: Some(n_bound),
            table_format: Some(if table == TableFormat::Csv { "csv" } else { "markdown" }.into()),
            ..Job::default()
        },
        Cmd::Product {
            p,
            vars,
            x_poly,
            y_poly,
            chain,
            h,
        } => Job {
            command: Some(Command::Product),
            p,
            vars,
            x_poly: Some(x_poly),
            y_poly: Some(y_poly),
            chain,
            h: Some(h),
            ..Job::default()
        },
        Cmd::Batch { .. } => unreachable!("batch is handled separately"),
    }
}

fn scrub_times(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                if k == "wall_time_ms" {
                    *x = json!(0);
                } else {
                    scrub_times(x);
                }
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(scrub_times),
        _ => {}
    }
}

fn caveat(job: &Job) {
    if job.polys.len() > 1 {
        eprintln!("note: the generators are assumed to form a regular sequence; this is not checked");
    }
}

fn batch(path: &PathBuf) -> (i32, Value, String) {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let msg = format!("cannot read {}: {e}", path.display());
            return (EXIT_INPUT, json!({ "error": msg }), format!("error: {msg}\n"));
        }
    };
    let raw: Vec<Value> = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            let msg = format!("batch file is not a JSON list: {e}");
            return (EXIT_INPUT, json!({ "error": msg }), format!("error: {msg}\n"));
        }
    };
    let outcomes: Vec<Outcome> = raw
        .into_par_iter()
        .map(|v| match serde_json::from_value::<Job>(v) {
            Ok(job) => job::run(&job),
            Err(e) => failure(&qfsplit::Error::precondition(format!("bad job record: {e}"))),
        })
        .collect();
    let code = outcomes.iter().map(|o| o.code).max().unwrap_or(0);
    let mut text = String::new();
    let reports: Vec<Value> = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            text.push_str(&format!("== job {i} (exit {}) ==\n{}", o.code, o.text));
            if !o.text.ends_with('\n') {
                text.push('\n');
            }
            json!({ "job": i, "exit_code": o.code, "report": o.report })
        })
        .collect();
    (code, json!({ "jobs": reports, "exit_code": code }), text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let is_batch = matches!(cli.cmd, Cmd::Batch { .. });
    let (code, mut report, text) = match cli.cmd {
        Cmd::Batch { ref path } => batch(path),
        cmd => {
            let job = to_job(cmd);
            caveat(&job);
            let o = job::run(&job);
            (o.code, o.report, o.text)
        }
    };
    if cli.stable {
        scrub_times(&mut report);
    }
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => {
            if !is_batch && (code == EXIT_INPUT || code == job::EXIT_BUDGET) {
                eprint!("{text}");
                if !text.ends_with('\n') {
                    eprintln!();
                }
            } else {
                print!("{text}");
            }
        }
    }
    ExitCode::from(code as u8)
}
