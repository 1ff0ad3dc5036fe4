use serde::{Deserialize, Serialize};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::real::{PrecisionContext, Real};

/// Largest degree the root finder accepts.
pub const MAX_ROOT_DEGREE: usize = 64;

/// Real roots found in an open interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Sign-change roots, ascending.
    pub roots: Vec<Real>,
    /// Local extrema where the polynomial nearly touches zero without changing
    /// sign: candidates for even-order roots that a sign-change scan cannot see.
    pub suspected_even: Vec<Real>,
}

/// All real roots of `q` in `(lo, hi)`.
///
/// The interval is split at the sign-change roots of `q'` (found recursively),
/// so `q` is monotone on every piece and each piece holds at most one
/// sign-change root, which is then bisected to `ctx.root_tol`.
pub fn real_roots(q: &Polynomial, lo: &Real, hi: &Real, ctx: &PrecisionContext) -> Result<RootSet> {
    let q = q.clone().trimmed();
    let degree = q.degree().unwrap_or(0);
    if degree > MAX_ROOT_DEGREE {
        return Err(Error::DegreeGuard {
            degree,
            limit: MAX_ROOT_DEGREE,
        });
    }
    if lo >= hi {
        return Err(Error::Domain("root interval must satisfy lo < hi".into()));
    }
    let lo = lo.round_to(ctx.mantissa_bits.max(lo.prec()));
    let hi = hi.round_to(ctx.mantissa_bits.max(hi.prec()));
    let mut suspected = Vec::new();
    let roots = sign_change_roots(&q, &lo, &hi, ctx, &mut suspected);
    Ok(RootSet {
        roots,
        suspected_even: suspected,
    })
}

fn sign_change_roots(
    q: &Polynomial,
    lo: &Real,
    hi: &Real,
    ctx: &PrecisionContext,
    suspected: &mut Vec<Real>,
) -> Vec<Real> {
    let degree = match q.degree() {
        None | Some(0) => return Vec::new(),
        Some(d) => d,
    };
    let mut breaks = vec![lo.clone()];
    if degree >= 2 {
        let mut inner = Vec::new();
        breaks.extend(sign_change_roots(&q.derivative(), lo, hi, ctx, &mut inner));
    }
    breaks.push(hi.clone());

    let scale = coefficient_scale(q);
    let touch_tol = &scale * ctx.epsilon().sqrt();
    let values: Vec<Real> = breaks.iter().map(|x| q.eval(x)).collect();
    let mut roots = Vec::new();
    for i in 0..breaks.len() - 1 {
        let (a, b) = (&breaks[i], &breaks[i + 1]);
        let (fa, fb) = (&values[i], &values[i + 1]);
        if i > 0 && fa.is_zero() {
            // exact root at an interior critical point
            push_distinct(&mut roots, a.clone(), ctx.root_tol);
            continue;
        }
        if fa.signum() * fb.signum() < 0 {
            let r = bisect(q, a, b, fa.signum(), ctx.root_tol);
            push_distinct(&mut roots, r, ctx.root_tol);
        }
    }
    // interior extrema that nearly touch zero without a sign change
    for i in 1..breaks.len() - 1 {
        let v = &values[i];
        if !v.is_zero() && v.abs() <= touch_tol {
            let left = values[i - 1].signum();
            let right = values[i + 1].signum();
            if left == v.signum() && right == v.signum() {
                suspected.push(breaks[i].clone());
            }
        }
    }
    roots
}

fn coefficient_scale(q: &Polynomial) -> Real {
    q.coeffs()
        .iter()
        .fold(q.coeffs()[0].zero_like(), |m, c| m.max(c.abs()))
}

fn push_distinct(roots: &mut Vec<Real>, r: Real, tol: f64) {
    if let Some(last) = roots.last() {
        if (&r - last).abs() <= tol {
            return;
        }
    }
    roots.push(r);
}

/// Bisection on a bracket whose left end has sign `left_sign`.
fn bisect(q: &Polynomial, a: &Real, b: &Real, left_sign: i32, tol: f64) -> Real {
    let mut a = a.clone();
    let mut b = b.clone();
    let eps = a.unit_roundoff_scaled();
    for _ in 0..4096 {
        let width = &b - &a;
        if width <= tol || width <= &b.abs() * eps {
            break;
        }
        let mid = (&a + &b) / 2.0;
        let s = q.eval(&mid).signum();
        if s == 0 {
            return mid;
        }
        if s == left_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a + b) / 2.0
}

trait RoundoffScale {
    fn unit_roundoff_scaled(&self) -> f64;
}

impl RoundoffScale for Real {
    fn unit_roundoff_scaled(&self) -> f64 {
        4.0 * 2f64.powi(-(self.prec().min(1000) as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Basis;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn unit(ctx: &PrecisionContext) -> (Real, Real) {
        (ctx.zero(), ctx.one())
    }

    #[test]
    fn linear_root() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        let q = Polynomial::from_f64(Basis::Monomial, &[2.0, -3.0], &ctx).unwrap();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0].to_f64() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn no_real_roots() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        let q = Polynomial::from_f64(Basis::Monomial, &[1.0, 0.0, 1.0], &ctx).unwrap();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert!(rs.roots.is_empty());
        assert!(rs.suspected_even.is_empty());
    }

    #[test]
    fn planted_cubic_roots_recovered() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        // 2.5 (x - 0.2)(x - 0.5)(x - 0.9), expanded independently
        let planted = [0.2, 0.5, 0.9];
        let mut coeffs = vec![ctx.real(2.5)];
        for r in planted {
            let shifted = Polynomial::monomial(coeffs.clone()).unwrap().mul_x();
            let scaled = Polynomial::monomial(coeffs.iter().map(|c| c * (-r)).collect()).unwrap();
            coeffs = shifted.add(&scaled).into_coeffs();
        }
        let q = Polynomial::monomial(coeffs).unwrap().to_shifted_chebyshev();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert_eq!(rs.roots.len(), 3);
        for (found, want) in rs.roots.iter().zip(planted) {
            assert!((found - ctx.parse(&want.to_string()).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn double_root_is_flagged_not_returned() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        // (x - 0.5)^2 + 1e-40
        let q = Polynomial::new(
            Basis::Monomial,
            vec![ctx.real(0.25) + ctx.parse("1e-40").unwrap(), ctx.real(-1.0), ctx.real(1.0)],
        )
        .unwrap();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert!(rs.roots.is_empty());
        assert_eq!(rs.suspected_even.len(), 1);
        assert!((rs.suspected_even[0].to_f64() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn exact_double_root_is_reported() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        let q = Polynomial::from_f64(Basis::Monomial, &[0.25, -1.0, 1.0], &ctx).unwrap();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert_eq!(rs.roots.len(), 1);
    }

    #[test]
    fn degree_guard() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        let q = Polynomial::from_f64(Basis::Monomial, &vec![1.0; 66], &ctx).unwrap();
        assert!(matches!(
            real_roots(&q, &lo, &hi, &ctx),
            Err(Error::DegreeGuard { degree: 65, .. })
        ));
    }

    #[test]
    fn chebyshev_roots_of_high_degree() {
        let ctx = ctx();
        let (lo, hi) = unit(&ctx);
        let mut c = vec![0.0; 41];
        c[40] = 1.0;
        let q = Polynomial::from_f64(Basis::ShiftedChebyshev, &c, &ctx).unwrap();
        let rs = real_roots(&q, &lo, &hi, &ctx).unwrap();
        assert_eq!(rs.roots.len(), 40);
        for (j, r) in rs.roots.iter().enumerate() {
            // ascending order: j-th root is (1 + cos((2(40-j)-1) pi / 80)) / 2
            let want = (1.0 + ((2.0 * (40 - j) as f64 - 1.0) * std::f64::consts::PI / 80.0).cos()) / 2.0;
            assert!((r.to_f64() - want).abs() < 1e-13);
        }
    }
}
