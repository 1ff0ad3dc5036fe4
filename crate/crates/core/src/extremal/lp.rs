//! Exchange solver for `max c·q  s.t.  |A_i q| <= 1`, the discretized
//! semi-infinite problems of the extremal solvers.
//!
//! Runs the dual simplex on `min sum λ_i  s.t.  sum λ_i s_i A_i = c, λ >= 0`.
//! A basis is `d` active rows with signs; the primal iterate solves
//! `A_B q = s_B`, the most violated row enters, and the ratio test on
//! `A_B^T y = A_e` picks the row that leaves.

use crate::error::{Error, Result};
use crate::linalg::{solve, solve_transposed};
use crate::real::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct LpSolution<S> {
    pub q: Vec<S>,
    pub value: S,
    /// Active rows, ascending.
    pub basis: Vec<usize>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub iterations: usize,
}

const MAX_PIVOTS: usize = 20_000;

/// `tol` is the relative primal violation accepted at optimality.
pub(crate) fn maximize<S: Scalar>(
    rows: &[Vec<S>],
    c: &[S],
    warm: Option<&[usize]>,
    tol: f64,
) -> Result<LpSolution<S>> {
    let d = c.len();
    if d == 0 || rows.len() < d {
        return Err(Error::Domain(format!("lp needs at least {d} rows")));
    }
    let mut basis: Vec<usize> = match warm {
        Some(b) if b.len() == d && independent(rows, b) => b.to_vec(),
        _ => initial_basis(rows, d)?,
    };

    // dual multipliers fix the signs: λ_i = s_i μ_i >= 0
    let basis_rows = |b: &[usize]| b.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>();
    let mu = solve_transposed(&basis_rows(&basis), c)?;
    let mut signs: Vec<f64> = mu.iter().map(|m| if m.as_f64() < 0.0 { -1.0 } else { 1.0 }).collect();

    let mut last_objective = f64::INFINITY;
    let mut stalls = 0;
    for iteration in 0..MAX_PIVOTS {
        let ab = basis_rows(&basis);
        let rhs: Vec<S> = signs.iter().map(|&s| c[0].lift(s)).collect();
        let q = solve(&ab, &rhs)?;

        // pricing: most violated row, smallest index on ties
        let mut entering: Option<(usize, S)> = None;
        for (i, row) in rows.iter().enumerate() {
            let v = dot(row, &q);
            let mag = v.magnitude();
            if mag.as_f64() <= 1.0 + tol {
                continue;
            }
            match &entering {
                Some((_, best)) if mag.clone() <= best.magnitude() => {}
                _ => entering = Some((i, v)),
            }
        }
        let Some((e, ve)) = entering else {
            return Ok(finish(c, q, &basis, iteration));
        };
        let se = if ve.as_f64() < 0.0 { -1.0 } else { 1.0 };

        // the dual objective c·q must fall; a run of pivots that leave it
        // unchanged means the remaining violation is roundoff
        let objective = dot(c, &q).as_f64();
        let unit = c[0].unit_roundoff();
        if objective >= last_objective * (1.0 - 64.0 * unit * d as f64) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        last_objective = objective;
        if stalls > 4 * d {
            if ve.magnitude().as_f64() <= 1.0 + unit.sqrt() {
                return Ok(finish(c, q, &basis, iteration));
            }
            return Err(Error::IllConditioned(format!(
                "exchange stalled with violation {:e}",
                ve.magnitude().as_f64() - 1.0
            )));
        }

        let mu = solve_transposed(&ab, c)?;
        let y = solve_transposed(&ab, &rows[e])?;
        let mut leave: Option<(usize, S)> = None;
        for j in 0..d {
            let rate = y[j].clone() * c[0].lift(signs[j] * se);
            if rate.as_f64() <= 0.0 {
                continue;
            }
            let lambda = mu[j].clone() * c[0].lift(signs[j]);
            let lambda = if lambda.as_f64() < 0.0 { c[0].lift(0.0) } else { lambda };
            let theta = lambda / rate;
            let better = match &leave {
                None => true,
                Some((jb, tb)) => theta < *tb || (theta == *tb && basis[j] < basis[*jb]),
            };
            if better {
                leave = Some((j, theta));
            }
        }
        let Some((j, _)) = leave else {
            return Err(Error::IllConditioned("exchange ratio test found no leaving row".into()));
        };
        basis[j] = e;
        signs[j] = se;
    }
    Err(Error::NonConvergence {
        iterations: MAX_PIVOTS,
        residual: f64::NAN,
        suggested_bits: 0,
    })
}

fn finish<S: Scalar>(c: &[S], q: Vec<S>, basis: &[usize], iterations: usize) -> LpSolution<S> {
    let mut sorted = basis.to_vec();
    sorted.sort_unstable();
    LpSolution {
        value: dot(c, &q),
        q,
        basis: sorted,
        iterations,
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = a[0].clone() * b[0].clone();
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

fn independent<S: Scalar>(rows: &[Vec<S>], b: &[usize]) -> bool {
    let ab: Vec<Vec<S>> = b.iter().map(|&i| rows[i].clone()).collect();
    let probe: Vec<S> = ab.iter().map(|r| r[0].lift(1.0)).collect();
    b.iter().all(|&i| i < rows.len()) && solve(&ab, &probe).is_ok()
}

/// Greedy pivoted elimination: each step takes the row with the largest
/// remaining component in the pivot column.
fn initial_basis<S: Scalar>(rows: &[Vec<S>], d: usize) -> Result<Vec<usize>> {
    let mut work: Vec<Vec<S>> = rows.to_vec();
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    let mut used = vec![false; rows.len()];
    let scale = rows
        .iter()
        .flatten()
        .map(|v| v.magnitude().as_f64())
        .fold(0.0f64, f64::max);
    let floor = scale * rows[0][0].unit_roundoff() * 64.0;
    for col in 0..d {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in work.iter().enumerate() {
            if used[i] {
                continue;
            }
            let mag = row[col].magnitude().as_f64();
            if best.map_or(true, |(_, m)| mag > m) {
                best = Some((i, mag));
            }
        }
        let (p, mag) = best.ok_or_else(|| Error::IllConditioned("no rows left".into()))?;
        if mag <= floor {
            return Err(Error::IllConditioned(format!("constraint rows span fewer than {d} dimensions")));
        }
        used[p] = true;
        chosen.push(p);
        let pivot_row = work[p].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if used[i] {
                continue;
            }
            let f = row[col].clone() / pivot_row[col].clone();
            for c in col..d {
                let v = row[c].clone() - f.clone() * pivot_row[c].clone();
                row[c] = v;
            }
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{PrecisionContext, Real};

    #[test]
    fn box_constraints() {
        // max q0 + 2 q1 with |q0| <= 1, |q1| <= 1, |q0 + q1| <= 1.5
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0 / 1.5, 1.0 / 1.5]];
        let sol = maximize(&rows, &[1.0, 2.0], None, 1e-12).unwrap();
        assert!((sol.value - 2.5).abs() < 1e-12);
        assert!((sol.q[0] - 0.5).abs() < 1e-12 && (sol.q[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_leading_coefficient_on_grid() {
        // max leading coefficient of a cubic bounded by 1 on [-1, 1]: 4 (T_3)
        let grid: Vec<f64> = (0..=400).map(|i| -1.0 + 2.0 * i as f64 / 400.0).collect();
        let rows: Vec<Vec<f64>> = grid.iter().map(|&x| vec![1.0, x, x * x, x * x * x]).collect();
        let sol = maximize(&rows, &[0.0, 0.0, 0.0, 1.0], None, 1e-12).unwrap();
        assert!((sol.value - 4.0).abs() < 1e-9);
        assert!((sol.q[1] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn warm_start_and_extended_precision_agree() {
        let ctx = PrecisionContext::default();
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let rows_f: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x.powi(5), x.powi(6), x.powi(7)]).collect();
        let c_f = [1.0 / 6.0, 1.0 / 7.0, 1.0 / 8.0];
        let cold = maximize(&rows_f, &c_f, None, 1e-12).unwrap();

        let rows: Vec<Vec<Real>> = rows_f
            .iter()
            .map(|r| r.iter().map(|&v| ctx.real(v)).collect())
            .collect();
        let c: Vec<Real> = [6, 7, 8].iter().map(|&d| ctx.ratio(1, d)).collect();
        let warm = maximize(&rows, &c, Some(&cold.basis), 1e-40).unwrap();
        assert!((warm.value.to_f64() - cold.value).abs() < 1e-10);
        assert!(warm.iterations <= 2);
    }
}
