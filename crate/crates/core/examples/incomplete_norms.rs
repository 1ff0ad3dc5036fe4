//! Norms, endpoint value and total variation of an incomplete polynomial
//! P = x^{n+1} R, here with R given by monomial coefficients.
//!
//! cargo run --release --example incomplete_norms -- 30 1,-3,2.1

use turanlab::poly::{sup_norm, Basis, IncompletePolynomial, Polynomial, Weight};
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(Ok(30), |s| s.parse())?;
    let coeffs: Vec<f64> = match args.get(1) {
        Some(s) => s.split(',').map(|c| c.trim().parse()).collect::<Result<_, _>>()?,
        None => vec![1.0, -3.0, 2.1],
    };
    let k = coeffs.len() as u32;
    let ctx = PrecisionContext::from_env()?;

    let ip = IncompletePolynomial::new(n, k, Polynomial::from_f64(Basis::Monomial, &coeffs, &ctx)?)?;
    let one = ctx.one();
    let q = ip.derivative_q();
    let p1 = ip.eval(&one, &ctx)?.value;
    println!("n={n} k={k}  P(1) = {}", p1.to_f64());
    for w in [Weight::Unit, Weight::Circle] {
        let s = sup_norm(|x| ip.derivative_at(&q, x), &ctx.zero(), &one, w, &ctx)?;
        println!("  ‖P' w‖ {:<6} = {:.12} at x = {:.9}", w.as_str(), s.value.to_f64(), s.argmax.to_f64());
    }
    let tv = ip.total_variation(&ctx)?;
    println!("  V(P) = {:.12}", tv.value.to_f64());
    println!("  sign changes of P' {:?}", tv.critical_points.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
    Ok(())
}
