//! Builds the Müntz witness P(x) = ∫_0^x T² and compares its ratio with n/k.
//!
//! cargo run --release --example witness_upper -- 120 6

use turanlab::muntz::witness_upper;
use turanlab::poly::Weight;
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(Ok(120), |s| s.parse())?;
    let k: u32 = args.get(1).map_or(Ok(6), |s| s.parse())?;
    let ctx = PrecisionContext::from_env()?;

    for w in [Weight::Unit, Weight::Circle] {
        let wu = witness_upper(n, k, w, &ctx)?;
        let scale = match w {
            Weight::Unit => n as f64 / k as f64,
            Weight::Circle => (n as f64 / k as f64).sqrt(),
        };
        println!(
            "{:<6} ν={} κ={}  ‖T²w‖ = {:.6e}  P(1) = {:.6e}  ratio = {:.6}  ratio/scale = {:.4}",
            w.as_str(),
            wu.nu,
            wu.kappa,
            wu.numerator.to_f64(),
            wu.denominator.to_f64(),
            wu.ratio.to_f64(),
            wu.ratio.to_f64() / scale
        );
    }
    Ok(())
}
