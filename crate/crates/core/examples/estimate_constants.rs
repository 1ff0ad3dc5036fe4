//! Empirical constants from a handful of sandwiches and Müntz–Chebyshev polynomials.
//!
//! cargo run --release --example estimate_constants

use turanlab::extremal::{theorem_check, Theorem};
use turanlab::lab::estimate_constants;
use turanlab::muntz::muntz_chebyshev;
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = PrecisionContext::from_env()?;
    let mut sandwiches = Vec::new();
    for (n, k) in [(20, 1), (40, 2), (80, 2)] {
        for theorem in [Theorem::Markov, Theorem::Bernstein] {
            sandwiches.push(theorem_check(n, k, theorem, &ctx)?);
        }
    }
    let muntz = [(10, 1), (20, 2), (40, 2)]
        .into_iter()
        .map(|(nu, kappa)| muntz_chebyshev(nu, kappa, &ctx))
        .collect::<Result<Vec<_>, _>>()?;

    let c = estimate_constants(&sandwiches, &muntz, &ctx)?;
    let show = |name: &str, v: &Option<turanlab::real::Real>| match v {
        Some(v) => println!("  {name:<16} {:.6}", v.to_f64()),
        None => println!("  {name:<16} -"),
    };
    show("c1 (n/k)", &c.c1_endpoint_hat);
    show("c1 sqrt(n/k)", &c.c1_sqrt_hat);
    show("c2 (n/k+1)", &c.c2_hat);
    show("c2 sqrt(n/k+1)", &c.c2_sqrt_hat);
    show("c3", &c.c3_hat);
    show("c4", &c.c4_hat);
    show("c5", &c.c5_hat);
    println!("lower constants hold: {}", c.lower_constants_hold);
    Ok(())
}
