//! The family `P' = x^n Q w` with `Q` expanded in Chebyshev polynomials of
//! the window `[a, 1]`, `a = max(0, 1 - 20k/n)`.

use crate::error::Result;
use crate::muntz::chebyshev_values;
use crate::poly::{
    chebyshev_monomial_table_real, combine_rows, real_roots, Basis, IncompletePolynomial, Polynomial,
    Weight,
};
use crate::real::{PrecisionContext, Real};

/// Fraction of grid nodes placed inside the window.
const WINDOW_SHARE: f64 = 0.75;

#[derive(Debug, Clone)]
pub(crate) struct Family {
    pub n: u32,
    pub k: u32,
    pub lo: Real,
    pub span: Real,
    ctx: PrecisionContext,
    guard: u32,
    /// Row `j`: monomial coefficients (in `x`) of the `j`-th window Chebyshev
    /// polynomial, at guard precision.
    table: Vec<Vec<Real>>,
}

/// A local maximum of `|x^n Q w|`.
#[derive(Debug, Clone)]
pub(crate) struct Peak {
    pub x: Real,
    pub value: Real,
}

impl Family {
    pub fn new(n: u32, k: u32, ctx: &PrecisionContext) -> Family {
        let lo = ctx.real((1.0 - 20.0 * k as f64 / n as f64).max(0.0));
        let span = 1.0 - &lo;
        let guard = ctx.mantissa_bits + 4 * k + 64;
        let table = chebyshev_monomial_table_real((k - 1) as usize, &lo.round_to(guard), &ctx.one().round_to(guard));
        Family {
            n,
            k,
            lo,
            span,
            ctx: ctx.clone(),
            guard,
            table,
        }
    }

    pub fn dim(&self) -> usize {
        self.k as usize
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn u_of(&self, x: &Real) -> Real {
        (x - &self.lo) / &self.span
    }

    fn x_of(&self, u: &Real) -> Real {
        &self.lo + &self.span * u
    }

    /// Chebyshev-clustered nodes on `[0, 1]`, `WINDOW_SHARE` of them in the
    /// window, ascending.
    pub fn grid(&self, size: usize) -> Vec<Real> {
        let ctx = &self.ctx;
        let lobatto = |a: &Real, b: &Real, m: usize| -> Vec<Real> {
            let half = (b - a) / 2.0;
            let mid = (a + b) / 2.0;
            (0..m)
                .map(|i| &mid - &half * (ctx.pi() * (i as f64 / (m - 1) as f64)).cos())
                .collect()
        };
        if self.lo.is_zero() {
            return lobatto(&ctx.zero(), &ctx.one(), size.max(2));
        }
        let inside = ((size as f64 * WINDOW_SHARE).ceil() as usize).max(2);
        let outside = size.saturating_sub(inside).max(2);
        let mut xs = lobatto(&ctx.zero(), &self.lo, outside + 1);
        xs.pop();
        xs.extend(lobatto(&self.lo, &ctx.one(), inside));
        xs
    }

    /// `x^n w(x) [B_0(x), ..., B_{k-1}(x)]`
    pub fn row(&self, x: &Real, w: Weight) -> Vec<Real> {
        let t = self.u_of(x) * 2.0 - 1.0;
        let scale = x.powi(self.n) * w.eval(x);
        chebyshev_values(&t, self.dim() - 1)
            .into_iter()
            .map(|b| b * &scale)
            .collect()
    }

    /// `∫_0^t x^n B_j(x) dx` for each `j`.
    pub fn moment(&self, t: &Real) -> Vec<Real> {
        let t = t.round_to(self.guard);
        let n = self.n as usize;
        let powers: Vec<Real> = {
            let base = t.powi(self.n + 1);
            let mut out = vec![base];
            for m in 1..self.dim() {
                let next = &out[m - 1] * &t;
                out.push(next);
            }
            out
        };
        self.table
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold(t.zero_like(), |acc, (m, b)| acc + b * &powers[m] / ((n + m + 1) as f64))
                    .round_to(self.ctx.mantissa_bits)
            })
            .collect()
    }

    /// `Q` as a shifted-Chebyshev polynomial in the window variable `u`.
    pub fn q_in_u(&self, q: &[Real]) -> Polynomial {
        Polynomial::new(Basis::ShiftedChebyshev, q.to_vec()).expect("nonempty")
    }

    /// `x^n Q(x) w(x)`
    pub fn value(&self, qu: &Polynomial, x: &Real, w: Weight) -> Real {
        x.powi(self.n) * qu.eval(&self.u_of(x)) * w.eval(x)
    }

    /// `x f(u)` expressed in `u`.
    fn times_x(&self, f: &Polynomial) -> Polynomial {
        f.scale(&self.lo).add(&f.mul_x().scale(&self.span))
    }

    /// Sign changes of `Q` in `(0, 1)`, ascending in `x`.
    pub fn sign_changes(&self, qu: &Polynomial) -> Result<Vec<Real>> {
        let u0 = self.u_of(&self.ctx.zero());
        let roots = real_roots(qu, &u0, &self.ctx.one(), &self.ctx)?;
        Ok(roots.roots.iter().map(|u| self.x_of(u)).collect())
    }

    /// Every local maximum of `|x^n Q w|` on `[0, 1]`, from the roots of the
    /// derivative numerator, together with the right endpoint.
    pub fn peaks(&self, qu: &Polynomial, w: Weight) -> Result<Vec<Peak>> {
        let ctx = &self.ctx;
        let n = ctx.real(self.n as f64);
        let dq = qu.derivative();
        // x Q_x = (a/L) Q_u + u Q_u
        let x_dq = dq.scale(&(&self.lo / &self.span)).add(&dq.mul_x());
        let g = qu.scale(&n).add(&x_dq);
        let numerator = match w {
            Weight::Unit => g,
            Weight::Circle => {
                let both = g.add(qu);
                g.add(&self.times_x(&self.times_x(&both)).scale(&ctx.real(-1.0)))
            }
        };
        let u0 = self.u_of(&ctx.zero());
        let crit = real_roots(&numerator, &u0, &ctx.one(), ctx)?;
        let mut xs: Vec<Real> = crit.roots.iter().map(|u| self.x_of(u)).collect();
        xs.extend(crit.suspected_even.iter().map(|u| self.x_of(u)));
        xs.push(ctx.one());
        Ok(xs
            .into_iter()
            .filter(|x| !x.is_negative() && *x <= 1.0)
            .map(|x| {
                let value = self.value(qu, &x, w).abs();
                Peak { x, value }
            })
            .collect())
    }

    /// `sup_{[0,1]} |x^n Q w|` and the peaks achieving it.
    pub fn exact_sup(&self, qu: &Polynomial, w: Weight) -> Result<(Real, Vec<Peak>)> {
        let peaks = self.peaks(qu, w)?;
        let sup = peaks
            .iter()
            .map(|p| p.value.clone())
            .fold(self.ctx.zero(), Real::max);
        Ok((sup, peaks))
    }

    /// The incomplete polynomial with `P' = x^n Q`, scaled by `s`.
    pub fn to_incomplete(&self, q: &[Real], s: &Real) -> Result<IncompletePolynomial> {
        let lifted: Vec<Real> = q.iter().map(|c| (c * s).round_to(self.guard)).collect();
        let q_mono = combine_rows(&self.table, &lifted);
        let r_mono: Vec<Real> = q_mono
            .iter()
            .enumerate()
            .map(|(m, c)| c / ((self.n as usize + m + 1) as f64))
            .collect();
        let r = Polynomial::new(Basis::Monomial, r_mono)?.to_shifted_chebyshev();
        let bits = self.ctx.mantissa_bits;
        let r = Polynomial::new(
            Basis::ShiftedChebyshev,
            r.coeffs().iter().map(|c| c.round_to(bits)).collect(),
        )?;
        IncompletePolynomial::new(self.n, self.k, r)
    }
}
