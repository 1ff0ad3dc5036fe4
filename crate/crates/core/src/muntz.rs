//! Chebyshev polynomials of the Müntz space `span{x^ν, ..., x^{ν+κ}}` on
//! `[0, 1]`, computed by exchange iteration, and the checks built on them.
//!
//! Internally `T(x) = x^ν p(u)` where `u = (x - a) / (1 - a)` maps the window
//! `[a, 1]` that holds the alternation onto `[0, 1]`, and `p` is kept in the
//! shifted-Chebyshev basis in `u`. The reported `coeffs` are the monomial
//! coefficients of `x^{ν+j}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{
    chebyshev_monomial_table_real, clenshaw, combine_rows, convolve, real_roots, sup_norm, Basis,
    IncompletePolynomial, Polynomial, Weight,
};
use crate::real::{PrecisionContext, Real};

/// Largest κ accepted by [`muntz_chebyshev`].
pub const MAX_KAPPA: u32 = 64;

/// Exchange iterations before giving up.
pub const MAX_EXCHANGE_ITERATIONS: usize = 100;

/// Relative equioscillation residual at which the exchange is considered converged.
pub const EXCHANGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct MuntzChebyshev {
    pub nu: u32,
    pub kappa: u32,
    /// Coefficients of `x^{ν+j}`, `j = 0..=κ`.
    pub coeffs: Vec<Real>,
    /// `1 = x_0 > x_1 > ... > x_κ`, where `T(x_j) = ±1` alternately.
    pub alternation_points: Vec<Real>,
    /// `β_1 > ... > β_κ`, with `β_j` between `x_j` and `x_{j-1}`.
    pub zeros: Vec<Real>,
    /// `max_j (‖T‖ - |T(x_j)|) / ‖T‖` at the final reference.
    pub residual: Real,
    pub iterations: usize,
    #[serde(skip_serializing)]
    window_lo: Real,
    #[serde(skip_serializing)]
    window_coeffs: Vec<Real>,
}

impl MuntzChebyshev {
    fn window_u(&self, x: &Real) -> Real {
        (x - &self.window_lo) / (1.0 - &self.window_lo)
    }

    /// `x^ν p(u(x))`; the factor `x^ν` is applied last so no row of the
    /// computation underflows for small `x`.
    pub fn eval(&self, x: &Real) -> Real {
        let u = self.window_u(x);
        let p = clenshaw(&self.window_coeffs, &(u * 2.0 - 1.0));
        x.powi(self.nu) * p
    }

    /// The monomial form as a polynomial of degree `ν + κ`.
    pub fn to_polynomial(&self) -> Polynomial {
        let zero = self.coeffs[0].zero_like();
        let mut c = vec![zero; self.nu as usize];
        c.extend(self.coeffs.iter().cloned());
        Polynomial::new(Basis::Monomial, c).expect("nonempty")
    }

    /// The cofactor `p` with `T = x^ν p`, in the monomial basis.
    pub fn cofactor(&self) -> Polynomial {
        Polynomial::new(Basis::Monomial, self.coeffs.clone()).expect("nonempty")
    }

    /// Sup norm over `[0, 1]`, read off the alternation points.
    pub fn norm(&self) -> Real {
        self.alternation_points
            .iter()
            .map(|x| self.eval(x).abs())
            .fold(self.coeffs[0].zero_like(), Real::max)
    }
}

/// Computes `T_{ν,κ}` normalized by `T(1) = 1`.
pub fn muntz_chebyshev(nu: u32, kappa: u32, ctx: &PrecisionContext) -> Result<MuntzChebyshev> {
    if kappa < 1 || kappa > MAX_KAPPA {
        return Err(Error::Precondition(format!("kappa must be in 1..={MAX_KAPPA}, got {kappa}")));
    }
    let k = kappa as usize;
    let bits = ctx.mantissa_bits;
    let span = if nu == 0 {
        ctx.one()
    } else {
        ctx.real((10.0 * kappa as f64 / nu as f64).min(1.0))
    };
    let lo = 1.0 - &span;
    let x_of_u = |u: &Real| &lo + &span * u;
    let u_of_x = |x: &Real| (x - &lo) / &span;

    // cos-spaced references in u, pulled off x = 0 when ν > 0 (x^ν would vanish there)
    let denom = if nu == 0 { kappa as f64 } else { kappa as f64 + 0.5 };
    let mut refs: Vec<Real> = (0..=k)
        .map(|j| {
            let u = (1.0 + (ctx.pi() * (j as f64 / denom)).cos()) / 2.0;
            x_of_u(&u)
        })
        .collect();
    refs[0] = ctx.one();

    let polish_floor = 2f64.powi(-(bits as i32) / 2);
    let mut prev_residual: Option<Real> = None;
    for iteration in 1..=MAX_EXCHANGE_ITERATIONS {
        let coeffs = solve_reference(&refs, nu, &u_of_x)?;
        let p_u = Polynomial::new(Basis::ShiftedChebyshev, coeffs.clone())?;

        // interior extrema: zeros of ν p + (a/L) p_u + u p_u
        let dp = p_u.derivative();
        let r = if nu == 0 {
            dp.clone()
        } else {
            p_u.scale(&ctx.real(nu as f64))
                .add(&dp.scale(&(&lo / &span)))
                .add(&dp.mul_x())
        };
        let u_lo = u_of_x(&ctx.zero());
        let crit = real_roots(&r, &u_lo, &ctx.one(), ctx)?;
        let mut next: Vec<Real> = vec![ctx.one()];
        next.extend(crit.roots.iter().rev().map(&x_of_u));
        if nu == 0 {
            next.push(ctx.zero());
        }
        if next.len() != k + 1 {
            return Err(Error::IllConditioned(format!(
                "exchange for nu={nu}, kappa={kappa} found {} extrema instead of {}",
                next.len(),
                k + 1
            )));
        }
        let t_at = |x: &Real| x.powi(nu) * p_u.eval(&u_of_x(x));
        let values: Vec<Real> = next.iter().map(t_at).collect();
        for (j, v) in values.iter().enumerate() {
            let expected = if j % 2 == 0 { 1 } else { -1 };
            if v.signum() != expected {
                return Err(Error::IllConditioned(format!(
                    "extremum {j} of the nu={nu}, kappa={kappa} iterate has the wrong sign"
                )));
            }
        }
        let hi = values.iter().map(Real::abs).fold(ctx.zero(), Real::max);
        let lo_v = values.iter().map(Real::abs).fold(hi.clone(), Real::min);
        let residual = (&hi - &lo_v) / &hi;

        let stalled = prev_residual
            .as_ref()
            .map_or(false, |prev| residual >= prev * 0.5);
        let done = residual <= EXCHANGE_TOL && (residual <= polish_floor || stalled);
        if done {
            return finish(nu, kappa, lo, coeffs, next, ctx, iteration);
        }
        prev_residual = Some(residual);
        refs = next;
    }
    Err(Error::NonConvergence {
        iterations: MAX_EXCHANGE_ITERATIONS,
        residual: prev_residual.map_or(f64::NAN, |r| r.to_f64()),
        suggested_bits: bits * 2,
    })
}

/// Coefficients of the window-Chebyshev cofactor that interpolates `(-1)^j`
/// at the references. Row `j` is divided by `x_j^ν`.
fn solve_reference<U>(refs: &[Real], nu: u32, u_of_x: &U) -> Result<Vec<Real>>
where
    U: Fn(&Real) -> Real,
{
    let k = refs.len() - 1;
    let mut rows = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for (j, x) in refs.iter().enumerate() {
        let t = u_of_x(x) * 2.0 - 1.0;
        rows.push(chebyshev_values(&t, k));
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        rhs.push(x.lift(sign) / x.powi(nu));
    }
    linalg::solve(&rows, &rhs)
}

/// `[T_0(t), ..., T_d(t)]`.
pub(crate) fn chebyshev_values(t: &Real, d: usize) -> Vec<Real> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(t.one_like());
    if d >= 1 {
        out.push(t.clone());
    }
    for i in 2..=d {
        let v = t * &out[i - 1] * 2.0 - &out[i - 2];
        out.push(v);
    }
    out
}

fn finish(
    nu: u32,
    kappa: u32,
    window_lo: Real,
    window_coeffs: Vec<Real>,
    alternation_points: Vec<Real>,
    ctx: &PrecisionContext,
    iterations: usize,
) -> Result<MuntzChebyshev> {
    let k = kappa as usize;
    let bits = ctx.mantissa_bits;
    let guard = bits + 3 * k as u32 + 32;
    let table = chebyshev_monomial_table_real(k, &window_lo.round_to(guard), &ctx.one().round_to(guard));
    let lifted: Vec<Real> = window_coeffs.iter().map(|c| c.round_to(guard)).collect();
    let coeffs = combine_rows(&table, &lifted)
        .into_iter()
        .map(|c| c.round_to(bits))
        .collect();
    let mut mc = MuntzChebyshev {
        nu,
        kappa,
        coeffs,
        alternation_points,
        zeros: Vec::new(),
        residual: ctx.zero(),
        iterations,
        window_lo,
        window_coeffs,
    };

    // T(1) = 1 holds by construction (x_0 = 1 carries +1); normalize anyway
    let at_one = mc.eval(&ctx.one());
    if (&at_one - 1.0).abs() > 1e-20 {
        return Err(Error::DegenerateNormalization(format!("T(1) = {at_one}")));
    }

    let values: Vec<Real> = mc.alternation_points.iter().map(|x| mc.eval(x).abs()).collect();
    let norm = values.iter().fold(ctx.zero(), |m, v| m.max(v.clone()));
    let min = values.iter().fold(norm.clone(), |m, v| m.min(v.clone()));
    mc.residual = (&norm - &min) / &norm;

    let zeros = (1..=k)
        .map(|j| {
            let hi = &mc.alternation_points[j - 1];
            let lo = &mc.alternation_points[j];
            bisect_zero(&mc, lo, hi)
        })
        .collect();
    mc.zeros = zeros;
    Ok(mc)
}

/// Bisects to full working precision; `T` is steep near its zeros when ν is large.
fn bisect_zero(mc: &MuntzChebyshev, lo: &Real, hi: &Real) -> Real {
    let sign_lo = mc.eval(lo).signum();
    let mut a = lo.clone();
    let mut b = hi.clone();
    let eps = 4.0 * 2f64.powi(-(b.prec().min(1000) as i32));
    for _ in 0..4096 {
        if (&b - &a) <= &b.abs() * eps {
            break;
        }
        let mid = (&a + &b) / 2.0;
        let s = mc.eval(&mid).signum();
        if s == 0 {
            return mid;
        }
        if s == sign_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a + b) / 2.0
}

/// `s_j = (1 - β_j) (ν + κ) κ / j²` for `j = 1..=κ`.
pub fn zero_bound_check(mc: &MuntzChebyshev) -> Vec<Real> {
    let scale = ((mc.nu + mc.kappa) as f64) * mc.kappa as f64;
    mc.zeros
        .iter()
        .enumerate()
        .map(|(i, beta)| {
            let j = (i + 1) as f64;
            (1.0 - beta) * scale / (j * j)
        })
        .collect()
}

/// `∫_0^1 T(u)^2 du` from the convolution of the monomial coefficients.
pub fn t_squared_integral(mc: &MuntzChebyshev, ctx: &PrecisionContext) -> Real {
    let squared = convolve(&mc.coeffs, &mc.coeffs);
    squared
        .iter()
        .enumerate()
        .fold(ctx.zero(), |acc, (m, c)| acc + c / ((2 * mc.nu as usize + m + 1) as f64))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QnCheckRecord {
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub alphas: Vec<Real>,
    pub gammas: Vec<Real>,
    pub rhos: Vec<Real>,
    /// `γ_j - ρ_j`
    pub slacks: Vec<Real>,
    /// `1 > γ_1 > ... > γ_k > 0`
    pub gamma_ordering_ok: bool,
}

impl QnCheckRecord {
    pub fn min_slack(&self) -> Real {
        self.slacks
            .iter()
            .cloned()
            .reduce(Real::min)
            .expect("k >= 1")
    }
}

/// Compares the zeros `ρ_j` of `q_n` with the explicit bounds `γ_j`.
///
/// `q_n(x) = (x+1)^{n-k} ∏(x - ρ_j)` is, under `x = 2u - 1`, the Chebyshev
/// polynomial of `span{u^{n-k}, ..., u^n}` on `[0, 1]`, so `ρ_j = 2β_j - 1`
/// with `β_j` the zeros of `T_{n-k,k}`. `q_n` itself is never formed.
pub fn qn_gamma_check(n: u32, k: u32, ctx: &PrecisionContext) -> Result<QnCheckRecord> {
    if k < 1 || n < 2 * k + 1 {
        return Err(Error::Precondition(format!(
            "need k >= 1 and m = n - 2k >= 1, got n={n}, k={k}"
        )));
    }
    let m = n - 2 * k;
    let mc = muntz_chebyshev(n - k, k, ctx)?;
    let ratio = ctx.real(m as f64) / ctx.real(k as f64);
    let alphas: Vec<Real> = (1..=k)
        .map(|j| 1.0 + (ctx.pi() * ((2 * j - 1) as f64) / ((4 * k) as f64)).cos())
        .collect();
    let gammas: Vec<Real> = alphas
        .iter()
        .map(|a| (a - (1.0 - &ratio)) / (1.0 + &ratio))
        .collect();
    let rhos: Vec<Real> = mc.zeros.iter().map(|b| b * 2.0 - 1.0).collect();
    let slacks = gammas.iter().zip(&rhos).map(|(g, r)| g - r).collect();
    let gamma_ordering_ok = gammas[0] < 1.0
        && gammas.windows(2).all(|w| w[0] > w[1])
        && gammas[gammas.len() - 1] > 0.0;
    Ok(QnCheckRecord {
        n,
        k,
        m,
        alphas,
        gammas,
        rhos,
        slacks,
        gamma_ordering_ok,
    })
}

/// The witness `P(x) = ∫_0^x T_{ν,κ}(u)^2 du` and its weighted ratio
/// `‖P' w‖ / P(1)`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessUpper {
    pub nu: u32,
    pub kappa: u32,
    pub ip: IncompletePolynomial,
    /// `‖T^2 w‖_{[0,1]}`
    pub numerator: Real,
    /// `P(1) = ∫_0^1 T^2`
    pub denominator: Real,
    pub ratio: Real,
}

/// Builds the Müntz witness for even `n = 2ν`, even `k = 2κ + 2 >= 6` with `20κ <= ν`.
pub fn witness_upper(n: u32, k: u32, w: Weight, ctx: &PrecisionContext) -> Result<WitnessUpper> {
    if n % 2 != 0 || k % 2 != 0 || k < 6 {
        return Err(Error::Precondition(format!(
            "witness needs even n and even k >= 6, got n={n}, k={k}"
        )));
    }
    let nu = n / 2;
    let kappa = (k - 2) / 2;
    if 20 * kappa > nu {
        return Err(Error::Precondition(format!(
            "witness needs 20 kappa <= nu, got kappa={kappa}, nu={nu}"
        )));
    }
    let mc = muntz_chebyshev(nu, kappa, ctx)?;
    let squared = convolve(&mc.coeffs, &mc.coeffs);
    let r_coeffs: Vec<Real> = squared
        .iter()
        .enumerate()
        .map(|(m, c)| c / ((2 * nu as usize + m + 1) as f64))
        .collect();
    let denominator = r_coeffs.iter().fold(ctx.zero(), |s, c| s + c);
    let r = Polynomial::new(Basis::Monomial, r_coeffs)?.to_shifted_chebyshev();
    let ip = IncompletePolynomial::new(n, k, r)?;
    let t_sq = |x: &Real| {
        let t = mc.eval(x);
        &t * &t
    };
    let numerator = sup_norm(t_sq, &ctx.zero(), &ctx.one(), w, ctx)?.value;
    let ratio = &numerator / &denominator;
    Ok(WitnessUpper {
        nu,
        kappa,
        ip,
        numerator,
        denominator,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn kappa_two_is_shifted_chebyshev() {
        let ctx = ctx();
        let mc = muntz_chebyshev(0, 2, &ctx).unwrap();
        for (c, want) in mc.coeffs.iter().zip([1.0, -8.0, 8.0]) {
            assert!((c - want).abs() < 1e-60, "{c:?}");
        }
        let s2 = 2f64.sqrt();
        assert!((mc.zeros[0].to_f64() - (2.0 + s2) / 4.0).abs() < 1e-14);
        assert!((mc.zeros[1].to_f64() - (2.0 - s2) / 4.0).abs() < 1e-14);
        assert_eq!(mc.alternation_points.len(), 3);
    }

    #[test]
    fn normalized_at_one() {
        let ctx = ctx();
        for (nu, kappa) in [(3, 1), (20, 2), (45, 5), (7, 6)] {
            let mc = muntz_chebyshev(nu, kappa, &ctx).unwrap();
            assert!((mc.eval(&ctx.one()) - 1.0).abs() < 1e-40);
            let sum = mc.coeffs.iter().fold(ctx.zero(), |s, c| s + c);
            assert!((sum - 1.0).abs() < 1e-30);
        }
    }

    #[test]
    fn nu_twenty_kappa_one_against_grid_search() {
        // T = x^20 (a + b x) with a + b = 1; brute force over b on a grid,
        // sup over a dense x grid, minimizing the sup.
        let ctx = ctx();
        let mc = muntz_chebyshev(20, 1, &ctx).unwrap();
        let sup_of = |b: f64| {
            let a = 1.0 - b;
            (0..=20000)
                .map(|i| 0.5 + 0.5 * i as f64 / 20000.0)
                .map(|x| (x.powi(20) * (a + b * x)).abs())
                .fold(0.0f64, f64::max)
        };
        // T grows fastest at 1 among normalized elements: maximize the leading
        // coefficient b subject to sup <= 1 + tiny
        let (mut lo, mut hi) = (1.0f64, 200.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sup_of(mid) <= 1.0 + 1e-12 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = mc.coeffs[1].to_f64();
        assert!((b - lo).abs() / lo < 1e-6, "exchange b = {b}, grid b = {lo}");
        assert!((mc.coeffs[0].to_f64() - (1.0 - lo)).abs() / lo < 1e-6);
    }

    #[test]
    fn equioscillation_and_interlacing() {
        let ctx = ctx();
        for (nu, kappa) in [(0, 5), (1, 1), (12, 3), (80, 4), (160, 4)] {
            let mc = muntz_chebyshev(nu, kappa, &ctx).unwrap();
            assert!(mc.residual < 1e-10);
            assert_eq!(mc.alternation_points.len(), kappa as usize + 1);
            assert_eq!(mc.alternation_points[0], 1.0);
            for (j, x) in mc.alternation_points.iter().enumerate() {
                let v = mc.eval(x);
                assert_eq!(v.signum(), if j % 2 == 0 { 1 } else { -1 });
                assert!((v.abs() - 1.0).abs() < 1e-10);
            }
            for (j, beta) in mc.zeros.iter().enumerate() {
                assert!(*beta < mc.alternation_points[j]);
                assert!(*beta > mc.alternation_points[j + 1]);
                assert!(mc.eval(beta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smallest_alternation_point_stays_near_one() {
        let ctx = ctx();
        for (nu, kappa) in [(40, 2), (60, 3), (100, 5)] {
            let mc = muntz_chebyshev(nu, kappa, &ctx).unwrap();
            let bound = 1.0 - 10.0 * kappa as f64 / nu as f64;
            assert!(mc.alternation_points[kappa as usize].to_f64() >= bound);
        }
    }

    #[test]
    fn zero_bound_slacks_for_shifted_chebyshev() {
        let ctx = ctx();
        let mc = muntz_chebyshev(0, 2, &ctx).unwrap();
        let s = zero_bound_check(&mc);
        assert!((s[0].to_f64() - 0.585786437626905).abs() < 1e-12);
        assert!((s[1].to_f64() - 0.853553390593274).abs() < 1e-12);
    }

    #[test]
    fn t_squared_integral_closed_forms() {
        let ctx = ctx();
        let t1 = t_squared_integral(&muntz_chebyshev(0, 1, &ctx).unwrap(), &ctx);
        assert!((t1 - ctx.ratio(1, 3)).abs() < 1e-60);
        let t2 = t_squared_integral(&muntz_chebyshev(0, 2, &ctx).unwrap(), &ctx);
        assert!((t2 - ctx.ratio(7, 15)).abs() < 1e-60);
    }

    #[test]
    fn qn_examples() {
        let ctx = ctx();
        let rec = qn_gamma_check(3, 1, &ctx).unwrap();
        assert!((rec.alphas[0].to_f64() - 1.707106781186548).abs() < 1e-14);
        assert!((rec.gammas[0].to_f64() - 0.853553390593274).abs() < 1e-14);
        assert!(rec.rhos[0] <= rec.gammas[0].clone() + 1e-10);
        // T_{2,1} = c x^2 (x - β) with 4β^3 + 27β - 27 = 0
        let beta = (rec.rhos[0].to_f64() + 1.0) / 2.0;
        assert!((4.0 * beta.powi(3) + 27.0 * beta - 27.0).abs() < 1e-12);

        let rec = qn_gamma_check(20, 4, &ctx).unwrap();
        assert!(rec.gamma_ordering_ok);
        assert!(qn_gamma_check(8, 4, &ctx).is_err());
    }

    #[test]
    fn witness_unit_ratio_is_reciprocal_integral() {
        let ctx = ctx();
        let w = witness_upper(80, 6, Weight::Unit, &ctx).unwrap();
        assert!((&w.numerator - 1.0).abs() < 1e-12);
        let mc = muntz_chebyshev(40, 2, &ctx).unwrap();
        let integral = t_squared_integral(&mc, &ctx);
        assert!(((&w.ratio * &integral) - 1.0).abs() < 1e-12);
        // P(1) from the incomplete form agrees with the integral
        let p1 = w.ip.eval(&ctx.one(), &ctx).unwrap().value;
        assert!(((p1 - &integral) / &integral).abs() < 1e-40);
        // P' = T^2
        let q = w.ip.derivative_q();
        for x in [0.3, 0.8, 0.97] {
            let x = ctx.real(x);
            let t = mc.eval(&x);
            assert!((w.ip.derivative_at(&q, &x) - &t * &t).abs() < 1e-40);
        }
    }

    #[test]
    fn witness_circle_numerator_bound() {
        let ctx = ctx();
        let w = witness_upper(80, 6, Weight::Circle, &ctx).unwrap();
        assert!(w.numerator.to_f64() <= (20.0 * 6.0 / 80.0f64).sqrt());
    }

    #[test]
    fn witness_preconditions() {
        let ctx = ctx();
        assert!(witness_upper(81, 6, Weight::Unit, &ctx).is_err());
        assert!(witness_upper(80, 4, Weight::Unit, &ctx).is_err());
        assert!(witness_upper(60, 6, Weight::Unit, &ctx).is_err());
    }

    #[test]
    fn rejects_bad_kappa() {
        let ctx = ctx();
        assert!(muntz_chebyshev(3, 0, &ctx).is_err());
        assert!(muntz_chebyshev(3, 65, &ctx).is_err());
    }
}
