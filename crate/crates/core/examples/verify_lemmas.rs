//! Seeded randomized checks of the growth, decay, Bernstein and majorant lemmas.
//!
//! cargo run --release --example verify_lemmas -- 200 0x5EED

use std::time::Instant;

use turanlab::lab::{verify_lemmas, LemmaId, DEFAULT_SEED, DEFAULT_TRIALS};
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trials: usize = args.first().map_or(Ok(DEFAULT_TRIALS), |s| s.parse())?;
    let seed = match args.get(1) {
        Some(s) => u64::from_str_radix(s.trim_start_matches("0x"), 16)?,
        None => DEFAULT_SEED,
    };
    let ctx = PrecisionContext::from_env()?;

    for id in LemmaId::ALL {
        let start = Instant::now();
        let r = &verify_lemmas(&[id], trials, seed, &ctx)?[0];
        println!(
            "lemma {id}: trials {} worst margin {:.12} pass {} ({:.2?})",
            r.trials,
            r.worst_margin,
            r.pass,
            start.elapsed()
        );
        println!("  worst case {}", r.worst_case);
    }
    Ok(())
}
