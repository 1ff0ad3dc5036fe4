//! Small dense linear solves with complete pivoting.

use crate::error::{Error, Result};
use crate::real::Scalar;

/// Solves `A x = b` by Gaussian elimination with complete pivoting.
///
/// Fails with `IllConditioned` when a pivot falls below the roundoff level of
/// the largest entry of `A`, i.e. when the elimination has no digits left.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Domain(format!("solve: expected a {n}x{n} system")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut rhs: Vec<S> = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = a
        .iter()
        .flatten()
        .map(|v| v.magnitude().as_f64())
        .fold(0.0f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::IllConditioned("zero or non-finite matrix".into()));
    }
    let floor = scale * b[0].unit_roundoff() * 16.0;

    for step in 0..n {
        let (mut pr, mut pc) = (step, step);
        let mut best = m[step][step].magnitude();
        for (r, row) in m.iter().enumerate().skip(step) {
            for (c, v) in row.iter().enumerate().skip(step) {
                let mag = v.magnitude();
                if mag > best {
                    best = mag;
                    pr = r;
                    pc = c;
                }
            }
        }
        if best.as_f64() <= floor {
            return Err(Error::IllConditioned(format!(
                "pivot {:e} at step {step} is below roundoff ({floor:e})",
                best.as_f64()
            )));
        }
        m.swap(step, pr);
        rhs.swap(step, pr);
        if pc != step {
            for row in m.iter_mut() {
                row.swap(step, pc);
            }
            col_perm.swap(step, pc);
        }
        let pivot = m[step][step].clone();
        for r in step + 1..n {
            let factor = m[r][step].clone() / pivot.clone();
            for c in step..n {
                let v = m[r][c].clone() - factor.clone() * m[step][c].clone();
                m[r][c] = v;
            }
            let v = rhs[r].clone() - factor * rhs[step].clone();
            rhs[r] = v;
        }
    }

    let mut y = vec![b[0].lift(0.0); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc = acc - m[r][c].clone() * y[c].clone();
        }
        y[r] = acc / m[r][r].clone();
    }
    let mut x = vec![b[0].lift(0.0); n];
    for (i, &p) in col_perm.iter().enumerate() {
        x[p] = y[i].clone();
    }
    Ok(x)
}

/// Solves `A^T x = b`.
pub fn solve_transposed<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    let t: Vec<Vec<S>> = (0..n).map(|c| a.iter().map(|row| row[c].clone()).collect()).collect();
    solve(&t, b)
}
