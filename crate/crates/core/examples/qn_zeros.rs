//! Compares the zeros of q_n with their explicit bounds γ_j.
//!
//! cargo run --release --example qn_zeros -- 60 4

use turanlab::muntz::qn_gamma_check;
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(Ok(60), |s| s.parse())?;
    let k: u32 = args.get(1).map_or(Ok(4), |s| s.parse())?;
    let ctx = PrecisionContext::from_env()?;

    let rec = qn_gamma_check(n, k, &ctx)?;
    println!("n={n} k={k} m={}  γ ordering ok: {}", rec.m, rec.gamma_ordering_ok);
    println!("   j        ρ_j              γ_j          γ_j - ρ_j");
    for j in 0..rec.gammas.len() {
        println!(
            "  {:>2}  {:>15.12}  {:>15.12}  {:>12.4e}",
            j + 1,
            rec.rhos[j].to_f64(),
            rec.gammas[j].to_f64(),
            rec.slacks[j].to_f64()
        );
    }
    println!("min slack {:e}", rec.min_slack().to_f64());
    Ok(())
}
