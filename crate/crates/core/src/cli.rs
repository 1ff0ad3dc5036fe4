//! Command-line front end. Every subcommand is a thin wrapper over a library
//! call with the same parameters.
//!
//! Settings resolve in the order: built-in defaults, `TURANLAB_BITS`,
//! `--config` file, flags.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{solve_endpoint_with, solve_variation_with, Denominator, RatioProblem};
use crate::lab::{verify_lemmas, LemmaId, DEFAULT_TRIALS};
use crate::muntz::{muntz_chebyshev, t_squared_integral, MuntzChebyshev};
use crate::poly::Weight;
use crate::real::BITS_ENV_VAR;
use crate::report::{csv_string, is_solver_failure, parse_seed, run_sweep, write_atomic, SweepConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "turanlab", version, about = "Reverse Markov and Bernstein inequalities for incomplete polynomials")]
pub struct Cli {
    /// Mantissa bits of the working precision.
    #[arg(long, global = true)]
    bits: Option<u32>,
    /// Root seed, decimal or 0x-hex.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Relative certificate gap.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cells solved concurrently.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Müntz–Chebyshev polynomial T_{ν,κ}.
    Muntz { nu: u32, kappa: u32 },
    /// One extremal ratio certificate.
    Ratio {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "variation")]
        denominator: Denominator,
        #[arg(long, default_value = "unit")]
        weight: Weight,
    },
    /// Sandwich checks over an (n, k, theorem) grid.
    Sweep(GridArgs),
    /// Seeded randomized lemma checks.
    VerifyLemmas {
        /// 3.1, 3.2, 3.4, 3.5, 3.6, 4.1 or all.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Empirical constants over a sweep grid.
    EstimateConstants(GridArgs),
}

#[derive(Debug, clap::Args)]
struct GridArgs {
    /// Comma-separated n values.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated k values.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated theorems (2.1, 2.2).
    #[arg(long)]
    theorems: Option<String>,
}

impl Cli {
    fn config(&self) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        if let Ok(bits) = std::env::var(BITS_ENV_VAR) {
            cfg.set("bits", &bits)?;
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(b) = self.bits {
            cfg.bits = b;
        }
        if let Some(s) = &self.seed {
            cfg.seed = parse_seed(s)?;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        Ok(cfg)
    }
}

impl GridArgs {
    fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        for (key, value) in [("n_values", &self.n), ("k_values", &self.k), ("theorems", &self.theorems)] {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if is_solver_failure(e) {
        EXIT_SOLVER
    } else {
        EXIT_USAGE
    }
}

/// Prints `value` as JSON and writes it to `<out>/<name>` when `--out` is set.
fn emit<T: Serialize>(value: &T, cfg: &SweepConfig, name: &str) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    print!("{text}");
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join(name), text.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MuntzOutput<'a> {
    #[serde(flatten)]
    t: &'a MuntzChebyshev,
    t2_integral: crate::real::Real,
}

fn execute(cli: &Cli) -> Result<i32> {
    let mut cfg = cli.config()?;
    cfg.validate()?;
    let ctx = cfg.context()?;
    match &cli.command {
        Command::Muntz { nu, kappa } => {
            let t = muntz_chebyshev(*nu, *kappa, &ctx)?;
            emit(&MuntzOutput { t2_integral: t_squared_integral(&t, &ctx), t: &t }, &cfg, "muntz.json")?;
            Ok(EXIT_PASS)
        }
        Command::Ratio {
            n,
            k,
            denominator,
            weight,
        } => {
            let problem = RatioProblem::new(*n, *k, *denominator, *weight)?;
            let opts = cfg.solver_options();
            let cert = match denominator {
                Denominator::Endpoint => solve_endpoint_with(&problem, &ctx, &opts)?,
                Denominator::Variation => solve_variation_with(&problem, &ctx, &opts)?,
            };
            emit(&cert, &cfg, "ratio.json")?;
            Ok(EXIT_PASS)
        }
        Command::Sweep(grid) => {
            grid.apply(&mut cfg)?;
            let report = run_sweep(&cfg)?;
            print!("{}", csv_string(&report));
            for row in &report.rows {
                if let crate::report::CellStatus::Skipped { reason } | crate::report::CellStatus::Failed { error: reason, .. } =
                    &row.status
                {
                    eprintln!("n={} k={} theorem {}: {reason}", row.n, row.k, row.theorem);
                }
            }
            Ok(report.exit_code())
        }
        Command::VerifyLemmas { lemma, trials } => {
            let lemmas: Vec<LemmaId> = if lemma == "all" {
                LemmaId::ALL.to_vec()
            } else {
                vec![lemma.parse().map_err(|_| Error::Config(format!("unknown lemma {lemma:?}")))?]
            };
            let reports = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(|| verify_lemmas(&lemmas, *trials, cfg.seed, &ctx))?;
            emit(&reports, &cfg, "lemmas.json")?;
            Ok(if reports.iter().all(|r| r.pass) {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::EstimateConstants(grid) => {
            grid.apply(&mut cfg)?;
            let out = cfg.out.take();
            let report = run_sweep(&cfg)?;
            cfg.out = out;
            let constants = report
                .constants
                .as_ref()
                .ok_or_else(|| Error::Empty("no instance of the grid was solved".into()))?;
            emit(constants, &cfg, "constants.json")?;
            Ok(report.exit_code())
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
