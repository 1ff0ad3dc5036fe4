//! Solves one extremal ratio problem with both denominators.
//!
//! cargo run --release --example extremal_ratio -- 40 3 circle

use turanlab::extremal::{solve_endpoint, solve_variation, Denominator, RatioProblem};
use turanlab::poly::Weight;
use turanlab::real::PrecisionContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map_or(Ok(40), |s| s.parse())?;
    let k: u32 = args.get(1).map_or(Ok(3), |s| s.parse())?;
    let weight: Weight = args.get(2).map_or(Ok(Weight::Unit), |s| s.parse())?;
    let ctx = PrecisionContext::from_env()?;

    for denominator in [Denominator::Endpoint, Denominator::Variation] {
        let problem = RatioProblem::new(n, k, denominator, weight)?;
        let cert = match denominator {
            Denominator::Endpoint => solve_endpoint(&problem, &ctx)?,
            Denominator::Variation => solve_variation(&problem, &ctx)?,
        };
        println!("{} / {}:", denominator.as_str(), weight.as_str());
        println!("  bracket       [{}, {}]", cert.value_lower.to_f64(), cert.value_upper.to_f64());
        println!("  gap           {:e}", cert.gap.to_f64());
        println!("  active points {:?}", cert.active_points.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
        if let Some(d) = cert.descent_value {
            println!("  breakpoints   {:?}", cert.breakpoints.iter().map(|x| x.to_f64()).collect::<Vec<_>>());
            println!("  descent       {d}");
        }
        println!("  chain holds   {}", cert.chain.holds());
    }
    Ok(())
}
