//! Command-line front end. Results go to stdout as one line of JSON with
//! numbers rounded to 12 significant digits; diagnostics go to stderr.
//!
//! Exit codes: 0 on success, 2 on bad input, 3 when a search-space cap is hit.

pub mod io;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::binpack::DEFAULT_SIZE_CAP;
use crate::error::Error;
use crate::greedy::{greedy_metric_bound_with, GreedyMmiTrace, GreedyOptions};
use crate::info::entropy;
use crate::prob::{ConditionalMatrix, Distribution, LogBase};
use crate::reduction::{exact_reduce, greedy_reduce};
use crate::transport::{closed_form_2x2, exact_metric, exact_n_by_2};

use self::io::{read_distribution, round_numbers, DistributionFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIZE_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vimetric",
    version,
    about = "Variation-of-information distance between distributions of different sizes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance d(phi, psi) and the two conditional entropies.
    Distance(DistanceArgs),
    /// Aggregate phi into m symbols of maximal entropy.
    Reduce(ReduceArgs),
    /// Shannon entropy of a distribution.
    Entropy(EntropyArgs),
    /// Write a seeded random distribution.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceMethod {
    Exact,
    Greedy,
    #[value(name = "closed2x2")]
    Closed2x2,
    #[value(name = "n_by_2")]
    NBy2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenStyle {
    /// exp(U[0,1]) weights, normalized.
    #[value(name = "exp_stretch")]
    ExpStretch,
    /// -ln U weights, normalized (uniform on the simplex).
    #[value(name = "uniform_simplex")]
    UniformSimplex,
}

#[derive(Debug, clap::Args)]
pub struct DistanceArgs {
    #[arg(long, value_enum, default_value = "greedy")]
    pub method: DistanceMethod,
    #[arg(long)]
    pub phi: PathBuf,
    #[arg(long)]
    pub psi: PathBuf,
    /// e, 2 or 10.
    #[arg(long, default_value = "e")]
    pub log_base: LogBase,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    pub size_cap: u64,
    /// Include per-round records (greedy) or the optimal coupling (exact).
    #[arg(long)]
    pub trace: bool,
    /// Rescale inputs whose sum is not 1, e.g. vectors printed to 4 decimals.
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, clap::Args)]
pub struct ReduceArgs {
    #[arg(long, value_enum, default_value = "greedy")]
    pub method: ReduceMethod,
    #[arg(long)]
    pub phi: PathBuf,
    #[arg(long)]
    pub m: usize,
    /// Pack symbols in descending order of probability (greedy only).
    #[arg(long)]
    pub presort: bool,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    pub size_cap: u64,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, clap::Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub phi: PathBuf,
    #[arg(long, default_value = "e")]
    pub log_base: LogBase,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exp_stretch")]
    pub style: GenStyle,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeCapExceeded { .. } => EXIT_SIZE_CAP,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(Some(mut record)) => {
            round_numbers(&mut record);
            let _ = writeln!(stdout, "{record}");
            EXIT_OK
        }
        Ok(None) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command. Returns the record to print, if any.
pub fn execute(command: &Command) -> Result<Option<Value>, Failure> {
    match command {
        Command::Distance(a) => distance(a).map(Some),
        Command::Reduce(a) => reduce(a).map(Some),
        Command::Entropy(a) => {
            let phi = read_distribution(&a.phi, a.renormalize).map_err(Failure::input)?;
            Ok(Some(json!({
                "n": phi.len(),
                "log_base": a.log_base.label(),
                "entropy": a.log_base.from_nats(entropy(&phi)),
            })))
        }
        Command::Gen(a) => gen(a),
    }
}

fn rows(p: &ConditionalMatrix) -> Vec<Vec<f64>> {
    p.matrix().to_rows()
}

fn distance(a: &DistanceArgs) -> Result<Value, Failure> {
    let phi = read_distribution(&a.phi, a.renormalize).map_err(Failure::input)?;
    let psi = read_distribution(&a.psi, a.renormalize).map_err(Failure::input)?;
    let (hp, hq) = (entropy(&phi), entropy(&psi));
    let b = a.log_base;
    let (method, w, v_pq, exact, trace) = match a.method {
        DistanceMethod::Exact => {
            let r = exact_metric(&phi, &psi, a.size_cap)?;
            let trace = json!({
                "joint": r.argmin_joint.matrix().to_rows(),
                "P": rows(&r.argmin_p),
            });
            ("exact", Some(r.w), r.v_phi_psi, true, trace)
        }
        DistanceMethod::Greedy => {
            let options = GreedyOptions {
                size_cap: a.size_cap,
                ..GreedyOptions::default()
            };
            let t = greedy_metric_bound_with(&phi, &psi, options)?;
            let v = t.v_bound;
            ("greedy", None, v, false, greedy_trace(&t))
        }
        DistanceMethod::Closed2x2 => {
            let c = closed_form_2x2(&phi, &psi)?;
            (
                "closed2x2",
                Some(c.v + hp),
                c.v,
                true,
                json!({ "P": rows(&c.p) }),
            )
        }
        DistanceMethod::NBy2 => {
            let c = exact_n_by_2(&phi, &psi, a.size_cap)?;
            (
                "n_by_2",
                Some(c.v + hp),
                c.v,
                true,
                json!({ "P": rows(&c.p) }),
            )
        }
    };
    let v_qp = (v_pq + hp - hq).max(0.0);
    let mut record = json!({
        "method": method,
        "n": phi.len(),
        "m": psi.len(),
        "log_base": b.label(),
        "V_phi_psi": b.from_nats(v_pq),
        "V_psi_phi": b.from_nats(v_qp),
        "d": b.from_nats(v_pq + v_qp),
        "exact": exact,
    });
    if let Some(w) = w {
        record["W"] = json!(b.from_nats(w));
    }
    if a.trace {
        record["trace"] = trace;
    }
    Ok(record)
}

fn greedy_trace(t: &GreedyMmiTrace) -> Value {
    let rounds: Vec<Value> = t
        .rounds
        .iter()
        .map(|r| {
            json!({
                "round": r.round,
                "n": r.n,
                "m": r.m,
                "phi": r.phi.as_slice(),
                "psi": r.psi.as_slice(),
                "assignments": r.assignments,
                "overflow": r.overflow,
                "alpha": r.alpha,
                "c": r.c,
                "V": r.v,
                "U": r.u,
                "P": rows(&r.p),
                "Q": rows(&r.q),
                "solver": r.solver,
            })
        })
        .collect();
    json!({ "swapped": t.swapped, "rounds": rounds, "P": rows(&t.p) })
}

fn reduce(a: &ReduceArgs) -> Result<Value, Failure> {
    let phi = read_distribution(&a.phi, a.renormalize).map_err(Failure::input)?;
    let (method, reduction, bound) = match a.method {
        ReduceMethod::Exact => ("exact", exact_reduce(&phi, a.m, a.size_cap)?, Value::Null),
        ReduceMethod::Greedy => {
            let g = greedy_reduce(&phi, a.m, a.presort)?;
            let bound = json!({
                "rho": g.rho,
                "bound": g.rho_bound,
                "ok": g.rho <= g.rho_bound + 1e-12,
            });
            ("greedy", g.reduction, bound)
        }
    };
    Ok(json!({
        "method": method,
        "m": a.m,
        "presort": a.presort,
        "partition": reduction.aggregation.partition,
        "psi_a": reduction.aggregation.psi_a.as_slice(),
        "entropy": reduction.entropy,
        "distance": reduction.distance,
        "best_fit_bound": bound,
    }))
}

/// Draws `n` weights from a ChaCha8 stream seeded with `seed`.
pub fn generate(n: usize, seed: u64, style: GenStyle) -> Result<Distribution, Error> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            match style {
                GenStyle::ExpStretch => u.exp(),
                GenStyle::UniformSimplex => -(1.0 - u).ln(),
            }
        })
        .collect();
    Distribution::from_weights(weights)
}

fn gen(a: &GenArgs) -> Result<Option<Value>, Failure> {
    let phi = generate(a.n, a.seed, a.style)?;
    let style = match a.style {
        GenStyle::ExpStretch => "exp_stretch",
        GenStyle::UniformSimplex => "uniform_simplex",
    };
    let file = DistributionFile {
        p: phi.into_vec(),
        name: Some(format!("{style} n={} seed={}", a.n, a.seed)),
    };
    let text = serde_json::to_string(&file).expect("plain data serializes");
    match &a.out {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok(None)
        }
        None => Ok(Some(serde_json::from_str(&text).expect("just serialized"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_weights_stay_in_range() {
        let phi = generate(40, 7, GenStyle::ExpStretch).unwrap();
        assert!((phi.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let max = phi.max();
        let min = phi.as_slice().iter().copied().fold(1.0, f64::min);
        assert!(max / min <= std::f64::consts::E);
        assert_eq!(phi, generate(40, 7, GenStyle::ExpStretch).unwrap());
        assert_ne!(phi, generate(40, 8, GenStyle::ExpStretch).unwrap());
    }

    #[test]
    fn size_cap_maps_to_exit_three() {
        let f = Failure::from(Error::SizeCapExceeded {
            required: 1e9,
            cap: 10,
        });
        assert_eq!(f.code, EXIT_SIZE_CAP);
        assert_eq!(Failure::from(Error::Empty).code, EXIT_INPUT);
    }
}
