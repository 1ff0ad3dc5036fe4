//! Computes T_{ν,κ} by Remez exchange and prints its reference, zeros and norm.
//!
//! cargo run --release --example muntz_chebyshev -- 10 3

use turanlab::muntz::{muntz_chebyshev, t_squared_integral, zero_bound_check};
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let nu: u32 = args.first().map_or(Ok(10), |s| s.parse())?;
    let kappa: u32 = args.get(1).map_or(Ok(3), |s| s.parse())?;
    let ctx = PrecisionContext::from_env()?;

    let t = muntz_chebyshev(nu, kappa, &ctx)?;
    println!("T_{{{nu},{kappa}}} after {} exchange steps, residual {:e}", t.iterations, t.residual.to_f64());
    println!("  sup norm     {}", t.norm());
    for (j, c) in t.coeffs.iter().enumerate() {
        println!("  x^{:<3}       {}", nu as usize + j, c.to_f64());
    }
    for (j, x) in t.alternation_points.iter().enumerate() {
        println!("  x_{j}          {:.12}  T = {:+.3e}", x.to_f64(), t.eval(x).to_f64());
    }
    let slack = zero_bound_check(&t);
    for (j, (b, s)) in t.zeros.iter().zip(&slack).enumerate() {
        println!("  beta_{}       {:.12}  slack {:.4}", j + 1, b.to_f64(), s.to_f64());
    }
    println!("  ∫T²          {}", t_squared_integral(&t, &ctx).to_f64());
    Ok(())
}
