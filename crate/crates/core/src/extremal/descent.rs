//! Independent double-precision oracle for the variation problem:
//! multistart Nelder–Mead on `‖P' w‖ / V_0^1(P)`.
//!
//! The search variables are the values of `P'` at `k` Chebyshev–Lobatto nodes of
//! `[1 - 2k/n, 1]` (where the optimizers oscillate), mapped linearly to the coefficients of `R`; in these
//! variables the optimum is well scaled, unlike in the coefficients themselves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::solve;
use crate::poly::Weight;
use crate::real::{PrecisionContext, Real};

pub const RESTARTS: usize = 64;
const WINDOW_NODES: usize = 1200;
const OUTER_NODES: usize = 100;
/// Grid of the screening pass over all starts.
const COARSE_NODES: (usize, usize) = (300, 40);
/// Screened starts carried to the fine grid.
/// Geometric growth of the start values along the nodes.
const GROWTHS: [f64; 3] = [1.0, 2.5, 6.0];
const POLISHED: usize = 4;
const SURROGATE_POWERS: [f64; 4] = [16.0, 64.0, 256.0, 1024.0];

struct Evaluator {
    n: i32,
    w: Weight,
    lo: f64,
    span: f64,
    grid: Vec<f64>,
    /// `x^n` on the grid.
    powers: Vec<f64>,
    /// `w(x)` on the grid.
    wvals: Vec<f64>,
    /// Trapezoid weights of the grid.
    weights: Vec<f64>,
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cj in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + cj;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

fn chebyshev_derivative(c: &[f64]) -> Vec<f64> {
    let k = c.len();
    if k == 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; k + 1];
    for j in (1..k).rev() {
        d[j - 1] = d[j + 1] + 2.0 * j as f64 * c[j];
    }
    d[0] /= 2.0;
    d.truncate(k - 1);
    d
}

impl Evaluator {
    fn new(n: u32, k: u32, w: Weight) -> Evaluator {
        Evaluator::with_nodes(n, k, w, WINDOW_NODES, OUTER_NODES)
    }

    fn with_nodes(n: u32, k: u32, w: Weight, window: usize, outer: usize) -> Evaluator {
        let lo = (1.0 - 20.0 * k as f64 / n as f64).max(0.0);
        let span = 1.0 - lo;
        let cheb = |a: f64, b: f64, m: usize| -> Vec<f64> {
            (0..m)
                .map(|i| {
                    let th = std::f64::consts::PI * i as f64 / (m - 1) as f64;
                    0.5 * (a + b) - 0.5 * (b - a) * th.cos()
                })
                .collect()
        };
        let mut grid = if lo > 0.0 {
            let mut g = cheb(0.0, lo, outer);
            g.pop();
            g
        } else {
            Vec::new()
        };
        grid.extend(cheb(lo, 1.0, window));
        let weights = (0..grid.len())
            .map(|i| {
                let left = if i == 0 { 0.0 } else { grid[i] - grid[i - 1] };
                let right = if i + 1 == grid.len() { 0.0 } else { grid[i + 1] - grid[i] };
                0.5 * (left + right)
            })
            .collect();
        let powers = grid.iter().map(|x| x.powi(n as i32)).collect();
        let wvals = grid.iter().map(|&x| w.eval_f64(x)).collect();
        Evaluator {
            wvals,
            powers,
            weights,
            n: n as i32,
            w,
            lo,
            span,
            grid,
        }
    }

    fn t_of(&self, x: f64) -> f64 {
        2.0 * (x - self.lo) / self.span - 1.0
    }

    fn p(&self, r: &[f64], x: f64) -> f64 {
        x.powi(self.n + 1) * clenshaw(r, self.t_of(x))
    }

    fn dp(&self, r: &[f64], dr: &[f64], x: f64) -> f64 {
        x.powi(self.n) * self.q(r, dr, x)
    }

    /// `P'(x) / x^n`
    fn q(&self, r: &[f64], dr: &[f64], x: f64) -> f64 {
        let t = self.t_of(x);
        let rx = clenshaw(dr, t) * 2.0 / self.span;
        (self.n + 1) as f64 * clenshaw(r, t) + x * rx
    }

    fn ratio(&self, theta: &[f64]) -> f64 {
        self.objective(theta, None)
    }

    /// The ratio, or with `Some(p)` its smooth surrogate whose numerator is
    /// the grid `L^p` norm of `P' w`.
    fn objective(&self, theta: &[f64], p: Option<f64>) -> f64 {
        let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return f64::INFINITY;
        }
        let r: Vec<f64> = theta.iter().map(|v| v / norm).collect();
        let dr = chebyshev_derivative(&r);
        let g = &self.grid;
        let vals: Vec<f64> = g
            .iter()
            .zip(&self.powers)
            .map(|(&x, p)| p * self.q(&r, &dr, x))
            .collect();

        let weighted = |x: f64| (self.dp(&r, &dr, x) * self.w.eval_f64(x)).abs();
        let mags: Vec<f64> = vals.iter().zip(&self.wvals).map(|(v, w)| (v * w).abs()).collect();
        // three largest grid values, largest first
        let mut peaks: Vec<usize> = Vec::with_capacity(4);
        for (i, &m) in mags.iter().enumerate() {
            let pos = peaks.iter().position(|&j| m > mags[j]).unwrap_or(peaks.len());
            if pos < 3 {
                peaks.insert(pos, i);
                peaks.truncate(3);
            }
        }
        let mut num = 0.0f64;
        if let Some(p) = p {
            let top = mags[peaks[0]];
            if top == 0.0 {
                return f64::INFINITY;
            }
            let sum: f64 = mags
                .iter()
                .zip(&self.weights)
                .map(|(m, wt)| wt * (m / top).powf(p))
                .sum();
            num = top * sum.powf(1.0 / p);
        }
        for &i in peaks.iter().take(if p.is_some() { 0 } else { 3 }) {
            let a = g[i.saturating_sub(1)];
            let b = g[(i + 1).min(g.len() - 1)];
            num = num.max(golden_max(&weighted, a, b));
        }

        let mut ts = vec![0.0];
        for i in 0..g.len() - 1 {
            if vals[i] == 0.0 && i > 0 {
                ts.push(g[i]);
            } else if vals[i] * vals[i + 1] < 0.0 {
                let (mut a, mut b) = (g[i], g[i + 1]);
                let sa = vals[i].signum();
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if self.dp(&r, &dr, m).signum() == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                ts.push(0.5 * (a + b));
            }
        }
        ts.push(1.0);
        let v: f64 = ts
            .windows(2)
            .map(|w| (self.p(&r, w[1]) - self.p(&r, w[0])).abs())
            .sum();
        if v == 0.0 {
            f64::INFINITY
        } else {
            num / v
        }
    }
}

/// `k x k` matrix taking values of `P'` at the nodes to coefficients of `R`,
/// assembled and inverted at 256 bits.
fn node_map(ev: &Evaluator, n: u32, k: u32) -> Option<Vec<Vec<f64>>> {
    let ctx = PrecisionContext::default();
    let k = k as usize;
    let lo = (1.0 - 2.0 * k as f64 / n as f64).max(0.0);
    let nodes: Vec<Real> = (0..k)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / (k - 1) as f64;
            ctx.real(lo + (1.0 - lo) * (1.0 - th.cos()) / 2.0)
        })
        .collect();
    let span = ctx.real(ev.span);
    let window_lo = ctx.real(ev.lo);
    let np1 = ctx.real((n + 1) as f64);
    // column j: P' at the nodes for R = T_j(t)
    let g: Vec<Vec<Real>> = nodes
        .iter()
        .map(|x| {
            let t = (x - &window_lo) / &span * 2.0 - 1.0;
            let vals = crate::muntz::chebyshev_values(&t, k - 1);
            // dT_j/dt = j U_{j-1}(t)
            let mut u = vec![ctx.one(), &t * 2.0];
            for m in 2..k {
                let next = &t * &u[m - 1] * 2.0 - &u[m - 2];
                u.push(next);
            }
            let xn = x.powi(n);
            (0..k)
                .map(|j| {
                    let dt = if j == 0 { ctx.zero() } else { &u[j - 1] * j as f64 };
                    let rx = dt * 2.0 / &span;
                    &xn * (&np1 * &vals[j] + x * rx)
                })
                .collect()
        })
        .collect();
    let mut inverse = vec![vec![0.0; k]; k];
    for col in 0..k {
        let mut e = vec![ctx.zero(); k];
        e[col] = ctx.one();
        let x = solve(&g, &e).ok()?;
        for (row, v) in x.iter().enumerate() {
            inverse[row][col] = v.to_f64();
        }
    }
    Some(inverse)
}

/// Sign patterns of `P'` at the nodes, all of them when there are at most
/// `RESTARTS`, padded with uniform random points.
fn starts(k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let patterns = 1usize << k.min(20);
    let bits: Vec<usize> = if patterns <= RESTARTS {
        (0..patterns).collect()
    } else {
        rand::seq::index::sample(rng, patterns, RESTARTS).into_vec()
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for growth in GROWTHS {
        out.extend(bits.iter().map(|&b| sign_pattern(b, k, growth)));
    }
    while out.len() < GROWTHS.len() * RESTARTS {
        out.push((0..k).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    out
}

fn sign_pattern(bits: usize, k: usize, growth: f64) -> Vec<f64> {
    (0..k)
        .map(|i| {
            let s = if bits >> i & 1 == 1 { -1.0 } else { 1.0 };
            s * growth.powi(i as i32)
        })
        .collect()
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    let ends = f(a).max(f(b));
    while b - a > 1e-13 * b.abs().max(1e-300) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    fc.max(fd).max(ends)
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    let mut evals = d + 1;
    let point = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (fb, fw) = (simplex[0].1, simplex[d].1);
        if (fw - fb).abs() <= 1e-14 * fb.abs() {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].0.clone();
        let refl = point(&centroid, &worst, -1.0);
        let fr = f(&refl);
        evals += 1;
        if fr < simplex[0].1 {
            let exp = point(&centroid, &worst, -2.0);
            let fe = f(&exp);
            evals += 1;
            simplex[d] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (refl, fr);
        } else {
            let con = if fr < fw {
                point(&centroid, &refl, 0.5)
            } else {
                point(&centroid, &worst, 0.5)
            };
            let fc = f(&con);
            evals += 1;
            if fc < fr.min(fw) {
                simplex[d] = (con, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    p.0 = point(&best, &p.0, 0.5);
                    p.1 = f(&p.0);
                }
                evals += d;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}

/// Smallest `‖P' w‖ / V_0^1(P)` found by seeded Nelder–Mead restarts: every
/// start is screened on a coarse grid, and the best few are re-started from
/// their own minimizers on the fine grid until they stop improving.
pub fn descent_minimum(n: u32, k: u32, w: Weight, seed: u64) -> f64 {
    let ev = Evaluator::new(n, k, w);
    if k == 1 {
        return ev.ratio(&[1.0]);
    }
    let coarse = Evaluator::with_nodes(n, k, w, COARSE_NODES.0, COARSE_NODES.1);
    let map = node_map(&ev, n, k);
    let coeffs = |v: &[f64]| -> Vec<f64> {
        match &map {
            Some(m) => m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect(),
            None => v.to_vec(),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDE5C_0000_0000 ^ ((n as u64) << 20) ^ ((k as u64) << 4) ^ (w == Weight::Circle) as u64);
    let max_evals = 300 * k as usize;
    let mut screened: Vec<(f64, Vec<f64>)> = Vec::new();
    for x0 in starts(k as usize, &mut rng) {
        let mut x = x0;
        let mut step = 0.25;
        // continuation through smooth surrogates, then the ratio itself
        for p in SURROGATE_POWERS {
            let f = |v: &[f64]| coarse.objective(&coeffs(v), Some(p));
            x = nelder_mead(&f, &x, step, max_evals).0;
            step = 0.1 * norm(&x);
        }
        let f = |v: &[f64]| coarse.ratio(&coeffs(v));
        let (x, v) = nelder_mead(&f, &x, step, max_evals);
        screened.push((v, x));
    }
    screened.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let f = |v: &[f64]| ev.ratio(&coeffs(v));
    let mut best = f64::INFINITY;
    for (_, x) in screened.into_iter().take(POLISHED) {
        let (mut x, mut v) = nelder_mead(&f, &x, 0.05 * norm(&x), max_evals);
        for _ in 0..6 {
            let (x2, v2) = nelder_mead(&f, &x, 0.02 * norm(&x), max_evals);
            let improved = v2 < v * (1.0 - 1e-12);
            if v2 < v {
                x = x2;
                v = v2;
            }
            if !improved {
                break;
            }
        }
        best = best.min(v);
    }
    best
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_ratio() {
        let ev = Evaluator::new(10, 1, Weight::Unit);
        assert!((ev.ratio(&[1.0]) - 11.0).abs() < 1e-12);
        let ev = Evaluator::new(10, 1, Weight::Circle);
        let want = 11.0 * (10.0f64 / 11.0).powi(5) / 11f64.sqrt();
        assert!((ev.ratio(&[1.0]) - want).abs() < 1e-10);
    }

    #[test]
    fn hump_variation() {
        // R = 1 - x on window [0, 1] (n = 1, k = 2): P = x^2 (1 - x),
        // ‖P'‖ = 1 at x = 1, V = 8/27
        let ev = Evaluator::new(1, 2, Weight::Unit);
        let r = [0.5, -0.5];
        assert!((ev.ratio(&r) - 27.0 / 8.0).abs() < 1e-10);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
        let (x, v) = nelder_mead(&f, &[0.0, 0.0], 0.5, 2000);
        assert!(v < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
    }
}
