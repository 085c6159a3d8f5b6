//! `nbrefute`: generate random instances, certify refutations, audit
//! certificates and run walk experiments.
//!
//! Exit codes: 0 success, 2 bad input, 3 audit failure, 4 infeasible
//! within the configured caps. `NBREFUTE_THREADS` caps the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nbrefute::certify::{AuditStatus, Mode, DEFAULT_Z};
use nbrefute::instances::{parse_instance, parse_predicate, sample_csp, sample_kxor, Instance};
use nbrefute::linalg::SymWeightedMatrix;
use nbrefute::nonbacktracking::ihara_bass_residual;
use nbrefute::refute::{audit_refutation, refute};
use nbrefute::walks::{count_canonical, lemma_bound, rho_b_experiment};
use nbrefute::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "nbrefute", version, about = "Spectral refutation certificates for random k-XOR and CSPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Xor,
    Csp,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Arity (xor only).
        #[arg(long)]
        k: Option<usize>,
        /// `3sat`, `parity-K` or `tt:BITS` (csp only).
        #[arg(long)]
        predicate: Option<String>,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify an upper bound on the optimum of an instance.
    Refute {
        #[arg(long = "in")]
        input: PathBuf,
        /// sound, estimate, eig, gelfand or witness.
        #[arg(long, default_value = "sound")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a refutation certificate against its instance.
    Audit {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Sweep the determinant identity over random matrices.
    CheckIdentity {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Values of u per matrix, evenly spaced in (−0.9, 0.9).
        #[arg(long, default_value_t = 20)]
        u_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Walk and spectrum experiments.
    Walks {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// ρ(B) of random signed graphs, one JSON line per seed.
    Rho {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: f64,
        /// Number of seeds, starting at `first-seed`.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long, default_value_t = 32)]
        z: usize,
    },
    /// Count canonical block walks and compare with the enumeration bound.
    Canonical {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        t: usize,
    },
}

enum Failure {
    Input(String),
    Audit(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Audit(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } | Error::OracleInfeasible { .. } | Error::NoConvergence { .. } => {
                Failure::Infeasible(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn gen(kind: Kind, n: usize, k: Option<usize>, predicate: Option<String>, p: f64, seed: u64, out: Option<&Path>) -> Outcome {
    let inst = match kind {
        Kind::Xor => {
            let k = k.ok_or_else(|| Failure::Input("--k is required for xor".into()))?;
            Instance::Xor(sample_kxor(n, k, p, seed)?)
        }
        Kind::Csp => {
            let name = predicate.ok_or_else(|| Failure::Input("--predicate is required for csp".into()))?;
            let mut c = sample_csp(&parse_predicate(&name)?, n, p, seed)?;
            c.meta.predicate = Some(name);
            Instance::Csp(c)
        }
    };
    emit(out, &inst.to_json())?;
    eprintln!("m={} seed={seed}", inst.m());
    Ok(())
}

fn cmd_refute(input: &Path, mode: &str, z: usize, out: Option<&Path>) -> Outcome {
    let inst = parse_instance(&read(input)?)?;
    let mode: Mode = mode.parse()?;
    let cert = refute(&inst, mode, z)?;
    emit(out, &cert.to_json())?;
    eprintln!("U={} informative={} sound={}", cert.final_bound, cert.informative.unwrap_or(false), cert.sound);
    Ok(())
}

fn cmd_audit(cert: &Path, input: &Path) -> Outcome {
    let inst = parse_instance(&read(input)?)?;
    let cert = match serde_json::from_str(&read(cert)?) {
        Ok(c) => c,
        Err(e) => return Err(Failure::Input(format!("certificate: {e}"))),
    };
    let report = audit_refutation(&inst, &cert)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    match report.status {
        AuditStatus::Pass => Ok(()),
        AuditStatus::Fail => Err(Failure::Audit(report.reason.unwrap_or_else(|| "bound below the optimum".into()))),
        AuditStatus::NotAuditable => Err(Failure::Infeasible(report.reason.unwrap_or_default())),
    }
}

fn check_identity(n: usize, trials: usize, u_samples: usize, seed: u64, tol: f64) -> Outcome {
    if n == 0 || u_samples == 0 {
        return Err(Failure::Input("n and u-samples must be positive".into()));
    }
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let density = 0.2 + 0.2 * (trial % 5) as f64;
        let a = SymWeightedMatrix::random(n, density, 2.0, seed.wrapping_add(trial as u64))?;
        for j in 0..u_samples {
            let u = -0.9 + 1.8 * (j as f64 + 0.5) / u_samples as f64;
            worst = worst.max(ihara_bass_residual(&a, u)?);
        }
    }
    let pass = worst <= tol;
    let report = json!({ "n": n, "trials": trials, "u_samples": u_samples, "seed": seed, "max_residual": worst, "tol": tol, "pass": pass });
    println!("{report}");
    if pass {
        Ok(())
    } else {
        Err(Failure::Audit(format!("max residual {worst:e} exceeds {tol:e}")))
    }
}

fn walks(experiment: Experiment) -> Outcome {
    match experiment {
        Experiment::Rho { n, d, seeds, first_seed, z } => {
            let list: Vec<u64> = (first_seed..first_seed + seeds).collect();
            let report = rho_b_experiment(n, d, &list, z)?;
            print!("{}", report.to_json_lines());
            eprintln!("median rho_B/sqrt(d) = {}", report.median_ratio);
        }
        Experiment::Canonical { q, z, v, e, t } => {
            let count = count_canonical(q, z, v, e, t)?;
            let bound = lemma_bound(q, z, v, e, t);
            println!("{}", json!({ "q": q, "z": z, "v": v, "e": e, "t": t, "count": count, "bound": bound, "within": count as f64 <= bound }));
        }
    }
    Ok(())
}

fn configure_threads() -> Outcome {
    let Ok(value) = std::env::var("NBREFUTE_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("NBREFUTE_THREADS={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Gen { kind, n, k, predicate, p, seed, out } => gen(kind, n, k, predicate, p, seed, out.as_deref()),
        Command::Refute { input, mode, z, out } => cmd_refute(&input, &mode, z, out.as_deref()),
        Command::Audit { cert, input } => cmd_audit(&cert, &input),
        Command::CheckIdentity { n, trials, u_samples, seed, tol } => check_identity(n, trials, u_samples, seed, tol),
        Command::Walks { experiment } => walks(experiment),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Audit(msg) | Failure::Infeasible(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
