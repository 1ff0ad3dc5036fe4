//! Runs the sandwich check for one cell and prints the brackets.
//!
//! cargo run --release --example theorem_check -- 40 2 2.1

use std::time::Instant;

use turanlab::extremal::{theorem_check, Theorem};
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(Ok(40), |s| s.parse())?;
    let k: u32 = args.get(1).map_or(Ok(2), |s| s.parse())?;
    let theorem: Theorem = args.get(2).map_or(Ok(Theorem::Markov), |s| s.parse())?;
    let ctx = PrecisionContext::from_env()?;

    let start = Instant::now();
    let r = theorem_check(n, k, theorem, &ctx)?;
    println!("n={n} k={k} theorem {theorem}");
    println!("  theorem lower      {}", r.theorem_lower);
    println!("  chain lower        {}", r.chain_lower);
    println!("  variation bracket  [{}, {}]  gap {:e}", r.computed.value_lower, r.computed.value_upper, r.computed.gap.to_f64());
    println!("  descent oracle     {}", r.computed.descent_value.unwrap_or(f64::NAN));
    println!("  endpoint bracket   [{}, {}]", r.endpoint.value_lower, r.endpoint.value_upper);
    println!("  witness ({:?})   {}", r.witness, r.witness_ratio);
    println!("  chain audit        {:?}", r.computed.chain);
    println!("  breakpoints        {:?}", r.computed.breakpoints.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
    println!("  active points      {:?}", r.computed.active_points.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
    println!("  pass               {}", r.pass);
    println!("  elapsed            {:.2?}", start.elapsed());
    Ok(())
}
