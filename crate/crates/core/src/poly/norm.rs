use serde::{Deserialize, Serialize};

use super::Weight;
use crate::error::{Error, Result};
use crate::real::{PrecisionContext, Real};

/// Number of Chebyshev-distributed scan points used before refinement.
pub const SCAN_POINTS: usize = 2049;

/// Peaks of the scan that are refined by golden-section search.
const REFINED_PEAKS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: Real,
    pub argmax: Real,
}

/// `sup_{x in [a,b]} |f(x) w(x)|`.
///
/// Scans `SCAN_POINTS` Chebyshev-distributed nodes, then refines the best few
/// local peaks of the scan by golden-section ascent until the bracket shrinks
/// below `ctx.sup_tol` relative to the argmax.
pub fn sup_norm<F>(f: F, a: &Real, b: &Real, w: Weight, ctx: &PrecisionContext) -> Result<SupNorm>
where
    F: Fn(&Real) -> Real,
{
    if a >= b {
        return Err(Error::Domain("sup_norm needs a < b".into()));
    }
    let a = a.round_to(ctx.mantissa_bits.max(a.prec()));
    let b = b.round_to(ctx.mantissa_bits.max(b.prec()));
    let g = |x: &Real| (f(x) * w.eval(x)).abs();

    let half_width = (&b - &a) / 2.0;
    let mid = (&a + &b) / 2.0;
    let step = a.pi_like() / (SCAN_POINTS - 1) as f64;
    let xs: Vec<Real> = (0..SCAN_POINTS)
        .map(|i| {
            if i == 0 {
                a.clone()
            } else if i == SCAN_POINTS - 1 {
                b.clone()
            } else {
                &mid - &half_width * (&step * i as f64).cos()
            }
        })
        .collect();
    let vals: Vec<Real> = xs.iter().map(g).collect();

    let mut peaks: Vec<usize> = (0..SCAN_POINTS)
        .filter(|&i| {
            let left = i == 0 || vals[i] >= vals[i - 1];
            let right = i == SCAN_POINTS - 1 || vals[i] >= vals[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    peaks.truncate(REFINED_PEAKS);

    let best = peaks[0];
    let mut out = SupNorm {
        value: vals[best].clone(),
        argmax: xs[best].clone(),
    };
    for &i in &peaks {
        let lo = &xs[i.saturating_sub(1)];
        let hi = &xs[(i + 1).min(SCAN_POINTS - 1)];
        let (x, v) = golden_max(&g, lo, hi, ctx.sup_tol);
        if v > out.value {
            out = SupNorm { value: v, argmax: x };
        }
    }
    Ok(out)
}

fn golden_max<G: Fn(&Real) -> Real>(g: &G, lo: &Real, hi: &Real, tol: f64) -> (Real, Real) {
    let inv_phi = (lo.lift(5.0).sqrt() - 1.0) / 2.0;
    let mut a = lo.clone();
    let mut b = hi.clone();
    let mut c = &b - (&b - &a) * &inv_phi;
    let mut d = &a + (&b - &a) * &inv_phi;
    let mut gc = g(&c);
    let mut gd = g(&d);
    for _ in 0..400 {
        let scale = b.abs().max(a.abs()).max(lo.lift(1e-300));
        if (&b - &a) <= &scale * tol {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = &b - (&b - &a) * &inv_phi;
            gc = g(&c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = &a + (&b - &a) * &inv_phi;
            gd = g(&d);
        }
    }
    // the bracket ends are candidates too (peaks sitting on the interval boundary)
    let mut best = if gc >= gd { (c, gc) } else { (d, gd) };
    for x in [lo, hi] {
        let v = g(x);
        if v > best.1 {
            best = (x.clone(), v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn power_peaks_at_one() {
        let ctx = ctx();
        let s = sup_norm(|x| x.powi(17), &ctx.zero(), &ctx.one(), Weight::Unit, &ctx).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.argmax, 1.0);
    }

    #[test]
    fn circle_weight_peak() {
        let ctx = ctx();
        let s = sup_norm(|x| x * 2.0, &ctx.zero(), &ctx.one(), Weight::Circle, &ctx).unwrap();
        assert!((s.value.to_f64() - 1.0).abs() < 1e-12);
        assert!((s.argmax.to_f64() - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn shifted_chebyshev_against_dense_grid() {
        let ctx = ctx();
        // T*_2 on [0.1, 0.8] with circle weight: (8x^2 - 8x + 1) sqrt(1 - x^2)
        let f = |x: &Real| x * x * 8.0 - x * 8.0 + 1.0;
        let s = sup_norm(f, &ctx.real(0.1), &ctx.real(0.8), Weight::Circle, &ctx).unwrap();
        let dense = (0..=1_000_000)
            .map(|i| 0.1 + 0.7 * i as f64 / 1e6)
            .map(|x| ((8.0 * x * x - 8.0 * x + 1.0) * (1.0 - x * x).sqrt()).abs())
            .fold(0.0f64, f64::max);
        assert!((s.value.to_f64() - dense).abs() / dense < 1e-10);
    }

    #[test]
    fn scale_equivariance() {
        let ctx = ctx();
        let f = |x: &Real| x.powi(5) * (x * -3.0 + 2.0);
        let base = sup_norm(f, &ctx.zero(), &ctx.one(), Weight::Unit, &ctx).unwrap();
        let scaled = sup_norm(|x| f(x) * -7.5, &ctx.zero(), &ctx.one(), Weight::Unit, &ctx).unwrap();
        let rel = ((&scaled.value - &base.value * 7.5) / &scaled.value).abs();
        assert!(rel.to_f64() <= ctx.sup_tol);
    }

    #[test]
    fn rejects_empty_interval() {
        let ctx = ctx();
        assert!(sup_norm(|x| x.clone(), &ctx.one(), &ctx.one(), Weight::Unit, &ctx).is_err());
    }
}
