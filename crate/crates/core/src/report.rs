//! Sweep orchestration over an `(n, k, theorem)` grid and CSV/JSON emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{theorem_check_with, SandwichReport, SolverOptions, Theorem, MAX_VARIATION_K};
use crate::lab::{estimate_constants, ConstantEstimates, DEFAULT_SEED};
use crate::muntz::{muntz_chebyshev, MAX_KAPPA};
use crate::poly::Weight;
use crate::real::{PrecisionContext, Real, DEFAULT_BITS};

pub const CSV_HEADER: &str = "n,k,theorem,weight,theorem_lower,value_lower,value_upper,gap,witness_ratio,pass";
pub const CSV_FILE: &str = "sweep.csv";
pub const JSON_FILE: &str = "sweep.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_values: Vec<u32>,
    pub k_values: Vec<u32>,
    pub theorems: Vec<Theorem>,
    pub bits: u32,
    /// Relative certificate gap required of every cell.
    pub tol: f64,
    pub seed: u64,
    /// Directory receiving `sweep.csv` and `sweep.json`; nothing is written when unset.
    pub out: Option<PathBuf>,
    /// Cells solved concurrently.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: vec![20, 40, 80],
            k_values: vec![1, 2, 4],
            theorems: vec![Theorem::Markov, Theorem::Bernstein],
            bits: DEFAULT_BITS,
            tol: SolverOptions::default().gap_tol,
            seed: DEFAULT_SEED,
            out: None,
            jobs: 1,
        }
    }
}

fn parse_list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn parse_u32(s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::Config(format!("{s:?} is not a non-negative integer")))
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("{s:?} is not a seed")))
}

impl SweepConfig {
    /// Sets one key of the flat `key=value` format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "n_values" | "n" => self.n_values = parse_list(value, parse_u32)?,
            "k_values" | "k" => self.k_values = parse_list(value, parse_u32)?,
            "theorems" => self.theorems = parse_list(value, |s| s.parse())?,
            "bits" => self.bits = parse_u32(value)?,
            "tol" => {
                self.tol = value
                    .parse()
                    .map_err(|_| Error::Config(format!("tol {value:?} is not a number")))?
            }
            "seed" => self.seed = parse_seed(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "jobs" => self.jobs = parse_u32(value)? as usize,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key=value` text on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = SweepConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.k_values.is_empty() || self.theorems.is_empty() {
            return Err(Error::Config("n_values, k_values and theorems must be nonempty".into()));
        }
        if self.n_values.iter().chain(&self.k_values).any(|&v| v == 0) {
            return Err(Error::Config("all n and k must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        PrecisionContext::with_bits(self.bits).map(|_| ())
    }

    pub fn context(&self) -> Result<PrecisionContext> {
        PrecisionContext::with_bits(self.bits)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            gap_tol: self.tol,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }

    /// `(n, k, theorem)` in report order.
    pub fn cells(&self) -> Vec<(u32, u32, Theorem)> {
        let mut cells = Vec::new();
        for &n in &self.n_values {
            for &k in &self.k_values {
                for &t in &self.theorems {
                    cells.push((n, k, t));
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Solved,
    Skipped { reason: String },
    Failed { error: String, solver_failure: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub k: u32,
    pub theorem: Theorem,
    pub weight: Weight,
    pub theorem_lower: Option<Real>,
    pub value_lower: Option<Real>,
    pub value_upper: Option<Real>,
    pub gap: Option<Real>,
    pub witness_ratio: Option<Real>,
    pub pass: bool,
    #[serde(flatten)]
    pub status: CellStatus,
    #[serde(skip)]
    pub report: Option<SandwichReport>,
}

impl SweepRow {
    fn empty(n: u32, k: u32, theorem: Theorem, status: CellStatus) -> SweepRow {
        SweepRow {
            n,
            k,
            theorem,
            weight: theorem.weight(),
            theorem_lower: None,
            value_lower: None,
            value_upper: None,
            gap: None,
            witness_ratio: None,
            pass: false,
            status,
            report: None,
        }
    }

    fn from_report(r: SandwichReport, gap_tol: f64) -> SweepRow {
        let pass = r.pass && r.computed.gap <= gap_tol;
        SweepRow {
            n: r.problem.n,
            k: r.problem.k,
            theorem: r.theorem,
            weight: r.theorem.weight(),
            theorem_lower: Some(r.theorem_lower.clone()),
            value_lower: Some(r.computed.value_lower.clone()),
            value_upper: Some(r.computed.value_upper.clone()),
            gap: Some(r.computed.gap.clone()),
            witness_ratio: Some(r.witness_ratio.clone()),
            pass,
            status: CellStatus::Solved,
            report: Some(r),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub version: String,
    pub seed: u64,
    pub bits: u32,
    pub tol: f64,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// `None` when no cell was solved.
    pub constants: Option<ConstantEstimates>,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    /// 0 all pass, 1 an inequality check failed, 2 a cell's solver failed.
    pub fn exit_code(&self) -> i32 {
        let solver_failed = self
            .rows
            .iter()
            .any(|r| matches!(r.status, CellStatus::Failed { solver_failure: true, .. }));
        let any_failed = self
            .rows
            .iter()
            .any(|r| matches!(r.status, CellStatus::Failed { .. }) || (r.status == CellStatus::Solved && !r.pass));
        let constants_fail = self.constants.as_ref().is_some_and(|c| !c.lower_constants_hold);
        if solver_failed {
            2
        } else if any_failed || constants_fail {
            1
        } else {
            0
        }
    }
}

/// Whether an error means the solver, rather than the input, gave up.
pub fn is_solver_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NonConvergence { .. }
            | Error::IllConditioned(_)
            | Error::DegenerateNormalization(_)
            | Error::OracleDisagreement { .. }
    )
}

fn run_cell(n: u32, k: u32, theorem: Theorem, ctx: &PrecisionContext, opts: &SolverOptions) -> SweepRow {
    if k > MAX_VARIATION_K {
        let reason = format!("k = {k} exceeds the variation solver guard {MAX_VARIATION_K}");
        return SweepRow::empty(n, k, theorem, CellStatus::Skipped { reason });
    }
    match theorem_check_with(n, k, theorem, ctx, opts) {
        Ok(r) => SweepRow::from_report(r, opts.gap_tol),
        Err(e) => SweepRow::empty(
            n,
            k,
            theorem,
            CellStatus::Failed {
                solver_failure: is_solver_failure(&e),
                error: e.to_string(),
            },
        ),
    }
}

/// Solves every cell (up to `cfg.jobs` at a time), estimates the constants,
/// and writes `sweep.csv` and `sweep.json` into `cfg.out` when set. Cell
/// failures are recorded in their rows; only configuration and I/O errors
/// abort.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let ctx = cfg.context()?;
    let opts = cfg.solver_options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let cells = cfg.cells();
    let rows: Vec<SweepRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, k, t)| run_cell(n, k, t, &ctx, &opts))
            .collect()
    });

    let sandwiches: Vec<SandwichReport> = rows.iter().filter_map(|r| r.report.clone()).collect();
    let muntz = pool.install(|| muntz_inputs(cfg, &ctx));
    let constants = if sandwiches.is_empty() && muntz.is_empty() {
        None
    } else {
        Some(estimate_constants(&sandwiches, &muntz, &ctx)?)
    };
    let report = SweepReport {
        rows,
        constants,
        metadata: SweepMetadata {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.seed,
            bits: cfg.bits,
            tol: cfg.tol,
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
    };
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        emit_csv(&report, &dir.join(CSV_FILE))?;
        emit_json(&report, &dir.join(JSON_FILE))?;
    }
    Ok(report)
}

/// `T_{ν,κ}` for `ν` in the n grid and `κ` in the k grid, the inputs of the
/// `c3`–`c5` estimates. Cells whose exchange fails are left out.
fn muntz_inputs(cfg: &SweepConfig, ctx: &PrecisionContext) -> Vec<crate::muntz::MuntzChebyshev> {
    let mut pairs = Vec::new();
    for &nu in &cfg.n_values {
        for &kappa in cfg.k_values.iter().filter(|&&k| k <= MAX_KAPPA) {
            pairs.push((nu, kappa));
        }
    }
    pairs
        .par_iter()
        .filter_map(|&(nu, kappa)| muntz_chebyshev(nu, kappa, ctx).ok())
        .collect()
}

fn csv_number(v: &Option<Real>) -> String {
    v.as_ref().map_or_else(String::new, |x| format!("{}", x.to_f64()))
}

/// The CSV text of a report: fixed header, one line per row, LF endings,
/// numbers in shortest round-trip form. Unsolved rows leave the numeric
/// fields empty.
pub fn csv_string(report: &SweepReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let fields = [
            r.n.to_string(),
            r.k.to_string(),
            r.theorem.to_string(),
            r.weight.as_str().to_string(),
            csv_number(&r.theorem_lower),
            csv_number(&r.value_lower),
            csv_number(&r.value_upper),
            csv_number(&r.gap),
            csv_number(&r.witness_ratio),
            r.pass.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn emit_csv(report: &SweepReport, path: &Path) -> Result<()> {
    write_atomic(path, csv_string(report).as_bytes())
}

pub fn emit_json(report: &SweepReport, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
