//! Double-precision search over breakpoint configurations for the variation
//! problem. Produces starting configurations for the extended-precision ascent.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::family::Family;
use super::lp;
use crate::error::Result;
use crate::poly::Weight;
use crate::real::Real;

const SEARCH_GRID: usize = 512;
/// Candidate breakpoints per level.
const CANDIDATES: usize = 128;
const ZOOM_LEVELS: u32 = 3;
/// Random configurations tried for each `m >= 3`.
const SAMPLES: usize = 1024;
const KEEP: usize = 3;

struct Searcher<'a> {
    fam: &'a Family,
    rows: Vec<Vec<f64>>,
    full: Vec<f64>,
    warm: Option<Vec<usize>>,
}

impl Searcher<'_> {
    fn moment(&self, t: f64) -> Vec<f64> {
        let ctx = self.fam.ctx();
        self.fam.moment(&ctx.real(t)).iter().map(Real::to_f64).collect()
    }

    /// LP value of the configuration whose breakpoint moments are `ms`.
    fn value(&mut self, ms: &[&[f64]]) -> f64 {
        let sign_end = if ms.len() % 2 == 0 { 1.0 } else { -1.0 };
        let mut c: Vec<f64> = self.full.iter().map(|v| v * sign_end).collect();
        for (i, m) in ms.iter().enumerate() {
            let s = if i % 2 == 0 { 2.0 } else { -2.0 };
            for (cj, mj) in c.iter_mut().zip(m.iter()) {
                *cj += s * mj;
            }
        }
        match lp::maximize(&self.rows, &c, self.warm.as_deref(), 1e-12) {
            Ok(sol) => {
                self.warm = Some(sol.basis);
                sol.value
            }
            Err(_) => {
                self.warm = None;
                f64::NEG_INFINITY
            }
        }
    }

    fn value_at(&mut self, t: &[f64]) -> f64 {
        let ms: Vec<Vec<f64>> = t.iter().map(|&x| self.moment(x)).collect();
        let refs: Vec<&[f64]> = ms.iter().map(Vec::as_slice).collect();
        self.value(&refs)
    }
}

fn keep_best(best: &mut Vec<(f64, Vec<f64>)>, value: f64, t: Vec<f64>) {
    if !value.is_finite() {
        return;
    }
    best.push((value, t));
    best.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.len().cmp(&b.1.len())));
    best.truncate(KEEP);
}

/// Breakpoint configurations worth polishing: the monotone one plus the best
/// of an exhaustive (`m <= 2`) or sampled (`m >= 3`) scan over candidate
/// breakpoints in the window, each zoomed coordinate-wise.
pub(super) fn breakpoint_search(fam: &Family, w: Weight, seed: u64) -> Result<Vec<Vec<Real>>> {
    let ctx = fam.ctx();
    let rows: Vec<Vec<f64>> = fam
        .grid(SEARCH_GRID)
        .iter()
        .map(|x| fam.row(x, w).iter().map(Real::to_f64).collect())
        .collect();
    let full: Vec<f64> = fam.moment(&ctx.one()).iter().map(Real::to_f64).collect();
    let mut s = Searcher {
        fam,
        rows,
        full,
        warm: None,
    };
    let lo = fam.lo.to_f64();
    let span = fam.span.to_f64();
    let cand: Vec<f64> = (0..CANDIDATES)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / CANDIDATES as f64;
            lo + span * (1.0 - theta.cos()) / 2.0
        })
        .collect();
    let cand_m: Vec<Vec<f64>> = cand.iter().map(|&x| s.moment(x)).collect();

    let max_m = (fam.k - 1) as usize;
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let v0 = s.value(&[]);
    keep_best(&mut best, v0, Vec::new());
    if max_m >= 1 {
        for i in 0..CANDIDATES {
            let v = s.value(&[&cand_m[i]]);
            keep_best(&mut best, v, vec![cand[i]]);
        }
    }
    if max_m >= 2 {
        for i in 0..CANDIDATES {
            for j in i + 1..CANDIDATES {
                let v = s.value(&[&cand_m[i], &cand_m[j]]);
                keep_best(&mut best, v, vec![cand[i], cand[j]]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((fam.n as u64) << 16) ^ fam.k as u64);
    for m in 3..=max_m {
        for _ in 0..SAMPLES {
            let mut idx = sample(&mut rng, CANDIDATES, m).into_vec();
            idx.sort_unstable();
            let ms: Vec<&[f64]> = idx.iter().map(|&i| cand_m[i].as_slice()).collect();
            let v = s.value(&ms);
            keep_best(&mut best, v, idx.iter().map(|&i| cand[i]).collect());
        }
    }

    let spacing = span / CANDIDATES as f64;
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for (mut value, mut t) in best {
        for level in 1..=ZOOM_LEVELS {
            let h = spacing / 8f64.powi(level as i32 - 1) / 8.0;
            for i in 0..t.len() {
                let left = if i == 0 { 0.0 } else { t[i - 1] };
                let right = if i + 1 == t.len() { 1.0 } else { t[i + 1] };
                let centre = t[i];
                for step in -8i32..=8 {
                    let x = centre + step as f64 * h;
                    if step == 0 || x <= left || x >= right {
                        continue;
                    }
                    let mut trial = t.clone();
                    trial[i] = x;
                    let v = s.value_at(&trial);
                    if v > value {
                        value = v;
                        t = trial;
                    }
                }
            }
        }
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out
        .into_iter()
        .map(|t| t.into_iter().map(|x| ctx.real(x)).collect())
        .collect())
}
