//! Runs a small sandwich sweep and writes sweep.csv and sweep.json.
//!
//! cargo run --release --example sweep -- target/sweep-demo

use std::path::PathBuf;

use turanlab::extremal::Theorem;
use turanlab::report::{csv_string, emit_csv, emit_json, run_sweep, SweepConfig, CSV_FILE, JSON_FILE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let cfg = SweepConfig {
        n_values: vec![20, 40],
        k_values: vec![1, 2],
        theorems: vec![Theorem::Markov, Theorem::Bernstein],
        jobs: std::thread::available_parallelism().map_or(1, |p| p.get()),
        ..SweepConfig::default()
    };
    let report = run_sweep(&cfg)?;
    print!("{}", csv_string(&report));
    println!("wall time {:.1}s, exit code {}", report.metadata.wall_time_seconds, report.exit_code());
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        emit_csv(&report, &dir.join(CSV_FILE))?;
        emit_json(&report, &dir.join(JSON_FILE))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
