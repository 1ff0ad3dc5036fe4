use serde::{Deserialize, Serialize};

use super::{real_roots, Basis, Polynomial};
use crate::error::{Error, Result};
use crate::real::{PrecisionContext, Real};

/// Weight applied to `P'` in the numerator norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    /// `w(x) = 1`
    Unit,
    /// `w(x) = sqrt(1 - x^2)` on `[0, 1]`
    Circle,
}

impl Weight {
    pub fn eval(&self, x: &Real) -> Real {
        match self {
            Weight::Unit => x.one_like(),
            Weight::Circle => {
                let s = 1.0 - x * x;
                if s.is_negative() {
                    x.zero_like()
                } else {
                    s.sqrt()
                }
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Circle => (1.0 - x * x).max(0.0).sqrt(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Weight::Unit => "unit",
            Weight::Circle => "circle",
        }
    }
}

impl std::str::FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Weight> {
        match s {
            "unit" => Ok(Weight::Unit),
            "circle" => Ok(Weight::Circle),
            other => Err(Error::Config(format!("unknown weight {other:?} (expected unit|circle)"))),
        }
    }
}

/// `P(x) = x^{n+1} R(x)` with `deg R <= k - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompletePolynomial {
    n: u32,
    k: u32,
    r: Polynomial,
}

/// Value of an incomplete polynomial; `underflow` is set when `x^{n+1}`
/// vanished at working precision for `x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteValue {
    pub value: Real,
    pub underflow: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalVariation {
    pub value: Real,
    /// Sign changes of `P'` in `(0, 1)`, ascending.
    pub critical_points: Vec<Real>,
    /// Near-touching extrema of `Q` reported by the root finder. They cannot
    /// change the sign of `P'` and do not affect `value`.
    pub suspected_even_roots: Vec<Real>,
}

impl IncompletePolynomial {
    pub fn new(n: u32, k: u32, r: Polynomial) -> Result<IncompletePolynomial> {
        if n < 1 || k < 1 {
            return Err(Error::Domain(format!("need n >= 1 and k >= 1, got n={n}, k={k}")));
        }
        if let Some(d) = r.degree() {
            if d > (k - 1) as usize {
                return Err(Error::Domain(format!("deg R = {d} exceeds k - 1 = {}", k - 1)));
            }
        }
        Ok(IncompletePolynomial { n, k, r })
    }

    /// `x^{n+1}`, the `R = 1` member.
    pub fn monomial_witness(n: u32, k: u32, ctx: &PrecisionContext) -> Result<IncompletePolynomial> {
        IncompletePolynomial::new(n, k, Polynomial::constant(ctx.one()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> &Polynomial {
        &self.r
    }

    pub fn scaled(&self, s: &Real) -> IncompletePolynomial {
        IncompletePolynomial {
            n: self.n,
            k: self.k,
            r: self.r.scale(s),
        }
    }

    /// `x^{n+1} R(x)` on `[0, 1]`.
    pub fn eval(&self, x: &Real, ctx: &PrecisionContext) -> Result<IncompleteValue> {
        if x.is_negative() || *x > 1.0 {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        let x = x.round_to(ctx.mantissa_bits.max(x.prec()));
        let power = x.powi(self.n + 1);
        let underflow = power.is_zero() && !x.is_zero();
        Ok(IncompleteValue {
            value: power * self.r.eval(&x),
            underflow,
        })
    }

    /// Unchecked evaluation for callers that already know `x in [0, 1]`.
    pub(crate) fn value_at(&self, x: &Real) -> Real {
        x.powi(self.n + 1) * self.r.eval(x)
    }

    /// `Q = (n+1) R + x R'`, so that `P'(x) = x^n Q(x)`. Returned in the basis of `R`.
    pub fn derivative_q(&self) -> Polynomial {
        let r = &self.r;
        let lead = r.scale(&r.coeffs()[0].lift((self.n + 1) as f64));
        let tail = r.derivative().mul_x();
        let len = r.coeffs().len();
        let mut q = lead.add(&tail).into_coeffs();
        q.truncate(len.max(1));
        Polynomial::new(r.basis(), q).expect("nonempty")
    }

    /// `P'(x) = x^n Q(x)` for a precomputed `Q`.
    pub fn derivative_at(&self, q: &Polynomial, x: &Real) -> Real {
        x.powi(self.n) * q.eval(x)
    }

    /// Dense monomial coefficients of `P`, degree `n + k`.
    pub fn to_polynomial(&self) -> Polynomial {
        let r = self.r.to_monomial();
        let zero = r.coeffs()[0].zero_like();
        let mut coeffs = vec![zero; (self.n + 1) as usize];
        coeffs.extend(r.coeffs().iter().cloned());
        Polynomial::new(Basis::Monomial, coeffs).expect("nonempty")
    }

    /// `V_0^1(P)`, summed exactly over the monotone pieces of `P` delimited by
    /// the sign changes of `Q`.
    pub fn total_variation(&self, ctx: &PrecisionContext) -> Result<TotalVariation> {
        let q = self.derivative_q();
        let roots = real_roots(&q, &ctx.zero(), &ctx.one(), ctx)?;
        let mut ts = vec![ctx.zero()];
        ts.extend(roots.roots.iter().cloned());
        ts.push(ctx.one());
        let values: Vec<Real> = ts.iter().map(|t| self.value_at(t)).collect();
        let value = values
            .windows(2)
            .fold(ctx.zero(), |acc, w| acc + (&w[1] - &w[0]).abs());
        Ok(TotalVariation {
            value,
            critical_points: roots.roots,
            suspected_even_roots: roots.suspected_even,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn ip(n: u32, k: u32, r: &[f64], ctx: &PrecisionContext) -> IncompletePolynomial {
        IncompletePolynomial::new(n, k, Polynomial::from_f64(Basis::Monomial, r, ctx).unwrap()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let ctx = ctx();
        let p = ip(1, 1, &[1.0], &ctx);
        assert_eq!(p.eval(&ctx.real(0.5), &ctx).unwrap().value, 0.25);
        let p = ip(20, 1, &[1.0], &ctx);
        assert!(p.eval(&ctx.zero(), &ctx).unwrap().value.is_zero());
        assert!(p.eval(&ctx.real(1.5), &ctx).is_err());
        assert!(p.eval(&ctx.real(-0.1), &ctx).is_err());
    }

    #[test]
    fn ninety_nine_power_against_repeated_multiplication() {
        let ctx = ctx();
        let p = ip(99, 1, &[1.0], &ctx);
        let x = ctx.parse("0.9").unwrap();
        let mut oracle = ctx.one();
        for _ in 0..100 {
            oracle = oracle * &x;
        }
        let v = p.eval(&x, &ctx).unwrap().value;
        assert!(((&v - &oracle) / &oracle).abs() < 1e-70);
        assert!((v.to_f64() - 2.6561398887587e-5).abs() < 1e-15);
    }

    #[test]
    fn underflow_is_flagged() {
        let ctx = PrecisionContext::with_bits(64).unwrap();
        let p = ip(u32::MAX - 2, 1, &[1.0], &ctx);
        let tiny = ctx.parse("1e-300").unwrap();
        let v = p.eval(&tiny, &ctx).unwrap();
        assert!(v.value.is_zero());
        assert!(v.underflow);
    }

    #[test]
    fn q_examples() {
        let ctx = ctx();
        let p = ip(1, 2, &[1.0, -1.0], &ctx);
        let q = p.derivative_q().to_monomial();
        assert_eq!(q.coeffs()[0], 2.0);
        assert_eq!(q.coeffs()[1], -3.0);

        let p = ip(7, 3, &[2.5], &ctx);
        let q = p.derivative_q();
        assert_eq!(q.degree(), Some(0));
        assert_eq!(q.coeffs()[0], 20.0);
    }

    #[test]
    fn q_identity_against_finite_differences() {
        let ctx = ctx();
        let r = Polynomial::from_f64(Basis::ShiftedChebyshev, &[0.3, -0.7, 0.2, 0.9], &ctx).unwrap();
        let p = IncompletePolynomial::new(12, 4, r).unwrap();
        let q = p.derivative_q();
        let dense = p.to_polynomial();
        let h = ctx.parse("1e-30").unwrap();
        for i in 0..100 {
            let x = ctx.real(0.01 + 0.98 * i as f64 / 99.0);
            let fd = (dense.eval(&(&x + &h)) - dense.eval(&(&x - &h))) / (&h * 2.0);
            let analytic = p.derivative_at(&q, &x);
            let scale = analytic.abs().max(ctx.real(1e-10));
            assert!(((fd - &analytic) / scale).abs() < 1e-30, "x = {x}");
        }
    }

    #[test]
    fn total_variation_examples() {
        let ctx = ctx();
        let mono = ip(5, 3, &[1.0], &ctx);
        assert_eq!(mono.total_variation(&ctx).unwrap().value, 1.0);

        // x^2 (1 - x): peak at 2/3, variation 2 P(2/3) = 8/27
        let hump = ip(1, 2, &[1.0, -1.0], &ctx);
        let tv = hump.total_variation(&ctx).unwrap();
        assert_eq!(tv.critical_points.len(), 1);
        assert!((tv.value.to_f64() - 8.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn weight_values() {
        let ctx = ctx();
        assert_eq!(Weight::Circle.eval(&ctx.one()), 0.0);
        assert_eq!(Weight::Circle.eval(&ctx.zero()), 1.0);
        assert_eq!(Weight::Unit.eval(&ctx.real(0.3)), 1.0);
        assert_eq!("circle".parse::<Weight>().unwrap(), Weight::Circle);
        assert!("disk".parse::<Weight>().is_err());
    }

    #[test]
    fn degree_bound_enforced() {
        let ctx = ctx();
        let r = Polynomial::from_f64(Basis::Monomial, &[1.0, 1.0, 1.0], &ctx).unwrap();
        assert!(IncompletePolynomial::new(4, 2, r.clone()).is_err());
        assert!(IncompletePolynomial::new(4, 3, r.clone()).is_ok());
        assert!(IncompletePolynomial::new(0, 3, r).is_err());
    }
}
