use proptest::prelude::*;

use turanlab::extremal::{ratio_of, Denominator};
use turanlab::lab::{check_decay, check_growth, decay_majorant, DecayForm};
use turanlab::poly::{Basis, IncompletePolynomial, Polynomial, Weight};
use turanlab::real::{PrecisionContext, Real};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn rel(a: &Real, b: &Real) -> f64 {
    ((a - b).abs() / b.abs()).to_f64()
}

fn coeffs(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len).prop_filter("nonzero leading", |c| c.last().unwrap().abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn basis_round_trip(c in coeffs(1..=12)) {
        let ctx = ctx();
        let p = Polynomial::from_f64(Basis::Monomial, &c, &ctx).unwrap();
        let back = p.to_shifted_chebyshev().to_monomial();
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs().to_f64() < 1e-60);
        }
        for x in [0.0, 0.3, 0.77, 1.0] {
            let x = ctx.real(x);
            prop_assert!((p.eval(&x) - p.to_shifted_chebyshev().eval(&x)).abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn growth_margin_is_scale_invariant(c in coeffs(1..=6), s in 0.01f64..100.0) {
        let ctx = ctx();
        let (a, b) = (ctx.real(-0.5), ctx.real(0.5));
        let q = Polynomial::from_f64(Basis::Monomial, &c, &ctx).unwrap();
        let xs: Vec<Real> = [-3.0, -1.0, 0.75, 2.5].iter().map(|&x| ctx.real(x)).collect();
        let m1 = check_growth(&q, &a, &b, &xs, &ctx).unwrap();
        let m2 = check_growth(&q.scale(&ctx.real(s)), &a, &b, &xs, &ctx).unwrap();
        prop_assert!(rel(&m2.worst_margin, &m1.worst_margin) < 1e-12);
        prop_assert!(m1.pass);
    }

    #[test]
    fn ratio_is_scale_invariant(c in coeffs(1..=3), n in 10u32..40) {
        let ctx = ctx();
        let k = c.len() as u32;
        let r = Polynomial::from_f64(Basis::ShiftedChebyshev, &c, &ctx).unwrap();
        let ip = IncompletePolynomial::new(n, k, r).unwrap();
        let scaled = ip.scaled(&ctx.real(17.0));
        for (d, w) in [(Denominator::Variation, Weight::Unit), (Denominator::Variation, Weight::Circle)] {
            let a = ratio_of(&ip, d, w, &ctx).unwrap();
            let b = ratio_of(&scaled, d, w, &ctx).unwrap();
            prop_assert!(rel(&b, &a) < 1e-12);
        }
    }

    #[test]
    fn decay_holds_for_random_factors(c in coeffs(1..=2), n in 40u32..160) {
        let ctx = ctx();
        let factor = Polynomial::from_f64(Basis::ShiftedChebyshev, &c, &ctx).unwrap();
        let k = c.len() as u32;
        let report = check_decay(n, k, &factor, DecayForm::Plain, &ctx).unwrap();
        prop_assert!(report.pass, "margin {}", report.worst_margin);
    }

    #[test]
    fn majorant_decreases_toward_origin(n in 20u32..200, k in 1u32..4, x in 0.05f64..0.9) {
        prop_assume!(x < n as f64 / (n + 2 * k) as f64);
        let ctx = ctx();
        let lo = decay_majorant(n, k, &ctx.real(x * 0.9), &ctx);
        let hi = decay_majorant(n, k, &ctx.real(x), &ctx);
        prop_assert!(lo <= hi);
    }
}
