//! Property checks for the growth, decay and restricted-zero Bernstein
//! lemmas and for the decay majorant `f`, plus empirical estimates of the
//! absolute constants.
//!
//! Every check reports a margin `lhs / bound`; the inequalities are theorems,
//! so a margin above `1 + MARGIN_TOL` points at a numerical bug.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extremal::{SandwichReport, Theorem};
use crate::muntz::{muntz_chebyshev, t_squared_integral, zero_bound_check, MuntzChebyshev};
use crate::poly::{sup_norm, Basis, Polynomial, Weight};
use crate::real::{PrecisionContext, Real};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_TRIALS: usize = 200;
/// Slack allowed on a margin before a check counts as failed.
pub const MARGIN_TOL: f64 = 1e-10;
/// Initial nodes of the argument-principle contour.
pub const WINDING_NODES: usize = 1024;

const DECAY_GRID: usize = 2048;
const MONOTONE_SAMPLES: usize = 512;
/// Bisections allowed on one contour step whose argument jump is too large.
const WINDING_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    /// `|Q(x)| <= |2x|^k ‖Q‖_[-1,1]` outside `(-1, 1)`.
    #[serde(rename = "3.1")]
    ChebyshevGrowth,
    /// The same on a general interval `[a, b]`.
    #[serde(rename = "3.2")]
    IntervalGrowth,
    /// `|x^n R(x)| <= x^{n/2} ‖x^n R‖` on `[0, 1 - 10k/n]`.
    #[serde(rename = "3.4")]
    Decay,
    /// The same for `x^n Q(x) sqrt(1 - x^2)`.
    #[serde(rename = "3.5")]
    WeightedDecay,
    /// Bernstein factor of polynomials with few zeros in the disk with
    /// diameter `(0, 1)`. No explicit constant, so the margin is an estimate.
    #[serde(rename = "3.6")]
    RestrictedBernstein,
    /// `f(1 - 10k/n) <= (40/e^4)^k <= 1` and monotonicity of `f`.
    #[serde(rename = "4.1")]
    DecayMajorant,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::ChebyshevGrowth,
        LemmaId::IntervalGrowth,
        LemmaId::Decay,
        LemmaId::WeightedDecay,
        LemmaId::RestrictedBernstein,
        LemmaId::DecayMajorant,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::ChebyshevGrowth => "3.1",
            LemmaId::IntervalGrowth => "3.2",
            LemmaId::Decay => "3.4",
            LemmaId::WeightedDecay => "3.5",
            LemmaId::RestrictedBernstein => "3.6",
            LemmaId::DecayMajorant => "4.1",
        }
    }

    /// Whether the margin is compared against one.
    pub fn is_bounded(&self) -> bool {
        *self != LemmaId::RestrictedBernstein
    }

    fn salt(&self) -> u64 {
        0x1E44A ^ ((*self as u64 + 1) << 32)
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<LemmaId> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown lemma {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub trials: usize,
    /// Largest `lhs / bound` seen.
    pub worst_margin: Real,
    /// Inputs attaining `worst_margin`.
    pub worst_case: Value,
    pub pass: bool,
}

impl LemmaReport {
    fn new(lemma_id: LemmaId, trials: usize, worst_margin: Real, worst_case: Value) -> LemmaReport {
        let pass = !lemma_id.is_bounded() || worst_margin <= 1.0 + MARGIN_TOL;
        LemmaReport {
            lemma_id,
            trials,
            worst_margin,
            worst_case,
            pass,
        }
    }

    /// Report with no trials, for an empty domain.
    fn vacuous(lemma_id: LemmaId, reason: &str, ctx: &PrecisionContext) -> LemmaReport {
        LemmaReport::new(lemma_id, 0, ctx.zero(), json!({ "vacuous": reason }))
    }

    /// Combines reports of the same lemma; ties keep the earlier worst case.
    pub fn merge(lemma_id: LemmaId, reports: Vec<LemmaReport>, ctx: &PrecisionContext) -> LemmaReport {
        let mut trials = 0;
        let mut worst: Option<(Real, Value)> = None;
        for r in reports {
            trials += r.trials;
            if worst.as_ref().map_or(true, |(m, _)| r.worst_margin > *m) {
                worst = Some((r.worst_margin, r.worst_case));
            }
        }
        let (margin, case) = worst.unwrap_or_else(|| (ctx.zero(), Value::Null));
        LemmaReport::new(lemma_id, trials, margin, case)
    }
}

fn coeff_json(p: &Polynomial) -> Value {
    json!({ "basis": p.basis(), "coeffs": p.coeffs() })
}

/// `|Q(x)| / (|(4x - 2(a+b)) / (b-a)|^k ‖Q‖_[a,b])` maximized over `xs`,
/// with `k = deg Q`.
pub fn check_growth(q: &Polynomial, a: &Real, b: &Real, xs: &[Real], ctx: &PrecisionContext) -> Result<LemmaReport> {
    if a >= b {
        return Err(Error::Domain("check_growth needs a < b".into()));
    }
    if let Some(x) = xs.iter().find(|x| *x > a && *x < b) {
        return Err(Error::Domain(format!("sample point {x} lies inside (a, b)")));
    }
    let id = if *a == -1.0 && *b == 1.0 {
        LemmaId::ChebyshevGrowth
    } else {
        LemmaId::IntervalGrowth
    };
    let k = q.degree().unwrap_or(0) as u32;
    let norm = sup_norm(|x| q.eval(x), a, b, Weight::Unit, ctx)?.value;
    let width = b - a;
    let centre = a + b;
    let reports = xs
        .iter()
        .map(|x| {
            let margin = if norm.is_zero() {
                ctx.zero()
            } else {
                let bound = ((x * 4.0 - &centre * 2.0) / &width).abs().powi(k);
                q.eval(x).abs() / (bound * &norm)
            };
            let case = json!({ "a": a, "b": b, "x": x, "q": coeff_json(q) });
            LemmaReport::new(id, 1, margin, case)
        })
        .collect();
    let mut report = LemmaReport::merge(id, reports, ctx);
    report.trials = 1;
    Ok(report)
}

/// Which decay lemma a factor is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayForm {
    /// `S = x^n R(x)`, `deg R <= k`.
    Plain,
    /// `S = x^n Q(x) sqrt(1 - x^2)`, `deg Q <= k - 1`.
    Weighted,
}

/// `sup |S(x)| / (x^{n/2} ‖S‖_[0,1])` over a dense grid of `[0, 1 - 10k/n]`.
pub fn check_decay(n: u32, k: u32, factor: &Polynomial, form: DecayForm, ctx: &PrecisionContext) -> Result<LemmaReport> {
    if n == 0 || k == 0 {
        return Err(Error::Precondition("check_decay needs n, k >= 1".into()));
    }
    let (id, weight, max_degree) = match form {
        DecayForm::Plain => (LemmaId::Decay, Weight::Unit, k as usize),
        DecayForm::Weighted => (LemmaId::WeightedDecay, Weight::Circle, k as usize - 1),
    };
    if factor.degree().unwrap_or(0) > max_degree {
        return Err(Error::Precondition(format!("factor degree exceeds {max_degree}")));
    }
    let edge = ctx.one() - ctx.ratio(10 * k as i64, n as i64);
    if edge <= 0.0 {
        return Ok(LemmaReport::vacuous(id, "1 - 10k/n <= 0", ctx));
    }
    let norm = sup_norm(|x| x.powi(n) * factor.eval(x), &ctx.zero(), &ctx.one(), weight, ctx)?.value;
    if norm.is_zero() {
        return Err(Error::Domain("check_decay needs a nonzero factor".into()));
    }
    let mut worst = (ctx.zero(), ctx.zero());
    for i in 1..=DECAY_GRID {
        let x = &edge * i as f64 / DECAY_GRID as f64;
        // |S(x)| / x^{n/2} = x^{n/2} |factor(x)| w(x)
        let margin = x.pow_half(n) * factor.eval(&x).abs() * weight.eval(&x) / &norm;
        if margin > worst.0 {
            worst = (margin, x);
        }
    }
    let case = json!({ "n": n, "k": k, "form": form, "x": worst.1, "factor": coeff_json(factor) });
    Ok(LemmaReport::new(id, 1, worst.0, case))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FBound {
    pub n: u32,
    pub k: u32,
    /// `f(1 - 10k/n)`.
    pub f_at_edge: Real,
    /// `(40/e^4)^k`.
    pub cap: Real,
    /// `f` non-decreasing on sampled points of `[0, 1 - 2k/n]`.
    pub monotone_ok: bool,
}

impl FBound {
    pub fn holds(&self) -> bool {
        self.f_at_edge <= self.cap && self.cap <= 1.0 && self.monotone_ok
    }

    /// `max(f / cap, cap)`, or infinity when monotonicity fails.
    pub fn margin(&self) -> Real {
        if !self.monotone_ok {
            return self.cap.lift(f64::INFINITY);
        }
        (&self.f_at_edge / &self.cap).max(self.cap.clone())
    }
}

/// `f(x) = x^{n/2} ((4 - 4x)/δ)^k (1 - δ)^{-n}` with `δ = k/n`.
pub fn decay_majorant(n: u32, k: u32, x: &Real, ctx: &PrecisionContext) -> Real {
    let delta = ctx.ratio(k as i64, n as i64);
    let shrink = (ctx.one() - &delta).powi(n);
    x.pow_half(n) * ((4.0 - x * 4.0) / &delta).powi(k) / shrink
}

pub fn f_bound_check(n: u32, k: u32, ctx: &PrecisionContext) -> Result<FBound> {
    if k == 0 || n < 10 * k {
        return Err(Error::Precondition(format!("f_bound_check needs 1 - 10k/n >= 0 (n = {n}, k = {k})")));
    }
    let edge = ctx.one() - ctx.ratio(10 * k as i64, n as i64);
    let f_at_edge = decay_majorant(n, k, &edge, ctx);
    let cap = (ctx.real(40.0) * ctx.real(-4.0).exp()).powi(k);
    let right = ctx.one() - ctx.ratio(2 * k as i64, n as i64);
    let mut prev = decay_majorant(n, k, &ctx.zero(), ctx);
    let mut monotone_ok = true;
    for i in 1..=MONOTONE_SAMPLES {
        let v = decay_majorant(n, k, &(&right * i as f64 / MONOTONE_SAMPLES as f64), ctx);
        monotone_ok &= v >= prev;
        prev = v;
    }
    Ok(FBound {
        n,
        k,
        f_at_edge,
        cap,
        monotone_ok,
    })
}

/// Zeros of `p` in the open disk with diameter `(0, 1)`, counted by the
/// argument principle on its boundary. Zeros at the origin are factored out
/// exactly first; contour steps whose argument jumps by more than `π/4` are
/// bisected. A zero on the contour rejects the input.
pub fn zeros_in_disk(p: &Polynomial, ctx: &PrecisionContext) -> Result<usize> {
    let mono = p.to_monomial();
    let c = mono.coeffs();
    let Some(deg) = mono.degree() else {
        return Err(Error::Rejected("zero polynomial".into()));
    };
    let low = c.iter().position(|v| !v.is_zero()).expect("nonzero");
    let c = &c[low..=deg];
    let half = ctx.ratio(1, 2);
    let two_pi = ctx.pi() * 2.0;
    let eval = |theta: &Real| -> (Real, Real) {
        let zr = &half + &half * theta.cos();
        let zi = &half * theta.sin();
        let (mut re, mut im) = (ctx.zero(), ctx.zero());
        for ci in c.iter().rev() {
            let r = &re * &zr - &im * &zi + ci;
            im = &re * &zi + &im * &zr;
            re = r;
        }
        (re, im)
    };
    // argument of w1 / w0
    let step_arg = |w0: &(Real, Real), w1: &(Real, Real)| -> Real {
        let re = &w1.0 * &w0.0 + &w1.1 * &w0.1;
        let im = &w1.1 * &w0.0 - &w1.0 * &w0.1;
        im.atan2(&re)
    };
    let limit = ctx.pi() / 4.0;

    fn accumulate<E, A>(t0: &Real, t1: &Real, w0: &(Real, Real), w1: &(Real, Real), depth: u32, eval: &E, arg: &A, limit: &Real) -> Result<Real>
    where
        E: Fn(&Real) -> (Real, Real),
        A: Fn(&(Real, Real), &(Real, Real)) -> Real,
    {
        if w1.0.is_zero() && w1.1.is_zero() {
            return Err(Error::Rejected("zero on the disk boundary".into()));
        }
        let d = arg(w0, w1);
        if d.abs() <= *limit {
            return Ok(d);
        }
        if depth == 0 {
            return Err(Error::Rejected("zero on or too close to the disk boundary".into()));
        }
        let tm = (t0 + t1) / 2.0;
        let wm = eval(&tm);
        Ok(accumulate(t0, &tm, w0, &wm, depth - 1, eval, arg, limit)? + accumulate(&tm, t1, &wm, w1, depth - 1, eval, arg, limit)?)
    }

    // offset nodes so neither 0 nor 1 is sampled
    let theta = |j: usize| &two_pi * ((j as f64 + 0.5) / WINDING_NODES as f64);
    let mut total = ctx.zero();
    let mut t0 = theta(0);
    let mut w0 = eval(&t0);
    for j in 1..=WINDING_NODES {
        let t1 = theta(j);
        let w1 = eval(&t1);
        total += accumulate(&t0, &t1, &w0, &w1, WINDING_DEPTH, &eval, &step_arg, &limit)?;
        t0 = t1;
        w0 = w1;
    }
    let turns = (total / &two_pi).to_f64();
    if (turns - turns.round()).abs() > 1e-6 || turns < -0.5 {
        return Err(Error::Rejected(format!("winding number {turns} is not a count")));
    }
    Ok(turns.round() as usize)
}

/// `sup_x |P'(x)| sqrt(x(1-x) / ((ν+κ)κ)) / ‖P‖_[0,1]` for `P` of degree at
/// most `ν + κ` with at most `κ` zeros in the disk with diameter `(0, 1)`.
pub fn check_bernstein_restricted(p: &Polynomial, nu: u32, kappa: u32, ctx: &PrecisionContext) -> Result<Real> {
    if kappa == 0 {
        return Err(Error::Precondition("κ must be at least 1".into()));
    }
    if p.degree().unwrap_or(0) > (nu + kappa) as usize {
        return Err(Error::Precondition(format!("degree exceeds ν + κ = {}", nu + kappa)));
    }
    let inside = zeros_in_disk(p, ctx)?;
    if inside > kappa as usize {
        return Err(Error::Rejected(format!("{inside} zeros in the disk, more than κ = {kappa}")));
    }
    let (zero, one) = (ctx.zero(), ctx.one());
    let norm = sup_norm(|x| p.eval(x), &zero, &one, Weight::Unit, ctx)?.value;
    if norm.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    let dp = p.derivative();
    let top = sup_norm(|x| dp.eval(x) * (x * (1.0 - x)).sqrt(), &zero, &one, Weight::Unit, ctx)?.value;
    let scale = ctx.real(((nu + kappa) * kappa) as f64).sqrt();
    Ok(top / scale / norm)
}

/// `sum_j c_j T_j((2x - a - b)/(b - a))` in the monomial basis.
pub fn interval_polynomial(coeffs: &[Real], a: &Real, b: &Real) -> Result<Polynomial> {
    let in_u = Polynomial::new(Basis::ShiftedChebyshev, coeffs.to_vec())?.to_monomial();
    // u = (x - a)/(b - a), Horner in u
    let alpha = (b - a).lift(1.0) / (b - a);
    let beta = -(a * &alpha);
    let c = in_u.coeffs();
    let mut acc = Polynomial::constant(c[c.len() - 1].clone());
    for ci in c.iter().rev().skip(1) {
        acc = acc.mul_x().scale(&alpha).add(&acc.scale(&beta)).add(&Polynomial::constant(ci.clone()));
    }
    Ok(acc)
}

fn uniform_coeffs(rng: &mut ChaCha8Rng, len: usize, ctx: &PrecisionContext) -> Vec<Real> {
    (0..len).map(|_| ctx.real(rng.gen_range(-1.0..1.0))).collect()
}

/// Coefficients of the `i`-th trial of degree `d`: `T_d` first, then a
/// single monomial, then uniform shifted-Chebyshev draws.
fn growth_factor(i: usize, d: usize, rng: &mut ChaCha8Rng, a: &Real, b: &Real, ctx: &PrecisionContext) -> Result<Polynomial> {
    match i % 7 {
        0 => {
            let mut c = vec![ctx.zero(); d + 1];
            c[d] = ctx.one();
            interval_polynomial(&c, a, b)
        }
        1 => {
            let mut c = vec![ctx.zero(); d + 1];
            c[d] = ctx.one();
            Polynomial::monomial(c)
        }
        _ => interval_polynomial(&uniform_coeffs(rng, d + 1, ctx), a, b),
    }
}

fn growth_suite(id: LemmaId, trials: usize, rng: &mut ChaCha8Rng, ctx: &PrecisionContext) -> Result<LemmaReport> {
    let mut inputs = Vec::with_capacity(trials);
    for i in 0..trials {
        let (a, b) = if id == LemmaId::ChebyshevGrowth {
            (ctx.real(-1.0), ctx.one())
        } else {
            let a = rng.gen_range(-3.0..2.0);
            (ctx.real(a), ctx.real(a + rng.gen_range(0.05..3.0)))
        };
        let d = rng.gen_range(0..=6);
        let q = growth_factor(i / 7, d, rng, &a, &b, ctx)?;
        let xs: Vec<Real> = if id == LemmaId::ChebyshevGrowth {
            [1.01, 2.0, 10.0].iter().flat_map(|&x| [ctx.real(x), ctx.real(-x)]).collect()
        } else {
            let w = &b - &a;
            [0.0, 0.01, 1.0, 5.0]
                .iter()
                .flat_map(|&s| [&a - &w * s, &b + &w * s])
                .collect()
        };
        inputs.push((q, a, b, xs));
    }
    let reports = inputs
        .par_iter()
        .map(|(q, a, b, xs)| check_growth(q, a, b, xs, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::merge(id, reports, ctx))
}

fn decay_suite(form: DecayForm, trials: usize, rng: &mut ChaCha8Rng, ctx: &PrecisionContext) -> Result<LemmaReport> {
    let id = match form {
        DecayForm::Plain => LemmaId::Decay,
        DecayForm::Weighted => LemmaId::WeightedDecay,
    };
    let mut inputs = Vec::with_capacity(trials);
    for i in 0..trials {
        let (n, k) = if i < 8 {
            (80, 2)
        } else {
            let k: u32 = rng.gen_range(1..=4);
            (rng.gen_range(10 * k + 1..=200), k)
        };
        let len = match form {
            DecayForm::Plain => k as usize + 1,
            DecayForm::Weighted => k as usize,
        };
        let mut c = match i % 4 {
            0 => vec![ctx.zero(); len],
            _ => uniform_coeffs(rng, len, ctx),
        };
        if i % 4 == 0 {
            c[len - 1] = ctx.one();
        }
        inputs.push((n, k, Polynomial::new(Basis::ShiftedChebyshev, c)?));
    }
    let reports = inputs
        .par_iter()
        .map(|(n, k, r)| check_decay(*n, *k, r, form, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::merge(id, reports, ctx))
}

fn majorant_suite(trials: usize, rng: &mut ChaCha8Rng, ctx: &PrecisionContext) -> Result<LemmaReport> {
    let cells: Vec<(u32, u32)> = (0..trials)
        .map(|i| {
            let k = 1 + (i % 8) as u32;
            let n = if i < 8 { 10 * k } else { 10 * k + rng.gen_range(0..=400) };
            (n, k)
        })
        .collect();
    let reports = cells
        .par_iter()
        .map(|&(n, k)| {
            let fb = f_bound_check(n, k, ctx)?;
            let case = serde_json::to_value(&fb)?;
            Ok(LemmaReport::new(LemmaId::DecayMajorant, 1, fb.margin(), case))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::merge(LemmaId::DecayMajorant, reports, ctx))
}

/// Müntz–Chebyshev polynomials used as restricted-zero inputs.
const BERNSTEIN_MUNTZ: [(u32, u32); 8] = [(0, 1), (0, 2), (5, 2), (10, 1), (12, 3), (20, 2), (20, 3), (40, 4)];

fn bernstein_suite(trials: usize, rng: &mut ChaCha8Rng, ctx: &PrecisionContext) -> Result<LemmaReport> {
    let muntz = BERNSTEIN_MUNTZ
        .par_iter()
        .map(|&(nu, kappa)| muntz_chebyshev(nu, kappa, ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut inputs: Vec<(Polynomial, u32, u32, Value)> = Vec::with_capacity(trials);
    for i in 0..trials {
        if i % 2 == 1 {
            let t = &muntz[(i / 2) % muntz.len()];
            inputs.push((t.to_polynomial(), t.nu, t.kappa, json!({ "muntz": [t.nu, t.kappa] })));
            continue;
        }
        // x^ν times real linear factors with roots off [0, 1]
        let nu: u32 = rng.gen_range(0..=40);
        let kappa: u32 = rng.gen_range(1..=4);
        let mut p = Polynomial::monomial({
            let mut c = vec![ctx.zero(); nu as usize + 1];
            c[nu as usize] = ctx.one();
            c
        })?;
        let mut roots = Vec::with_capacity(kappa as usize);
        for _ in 0..kappa {
            let r = if rng.gen_bool(0.5) {
                rng.gen_range(1.05..3.0)
            } else {
                rng.gen_range(-2.0..-0.05)
            };
            roots.push(r);
            p = p.mul_x().add(&p.scale(&ctx.real(-r)));
        }
        inputs.push((p, nu, kappa, json!({ "nu": nu, "roots": roots })));
    }
    let reports = inputs
        .par_iter()
        .map(|(p, nu, kappa, case)| {
            let ratio = check_bernstein_restricted(p, *nu, *kappa, ctx)?;
            Ok(LemmaReport::new(LemmaId::RestrictedBernstein, 1, ratio, json!({ "nu": nu, "kappa": kappa, "input": case })))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::merge(LemmaId::RestrictedBernstein, reports, ctx))
}

/// Seeded randomized suite of `trials` inputs per lemma. Inputs are drawn
/// sequentially from a per-lemma stream of `seed`, so reports do not depend
/// on the thread count.
pub fn verify_lemmas(lemmas: &[LemmaId], trials: usize, seed: u64, ctx: &PrecisionContext) -> Result<Vec<LemmaReport>> {
    lemmas
        .iter()
        .map(|&id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ id.salt());
            match id {
                LemmaId::ChebyshevGrowth | LemmaId::IntervalGrowth => growth_suite(id, trials, &mut rng, ctx),
                LemmaId::Decay => decay_suite(DecayForm::Plain, trials, &mut rng, ctx),
                LemmaId::WeightedDecay => decay_suite(DecayForm::Weighted, trials, &mut rng, ctx),
                LemmaId::RestrictedBernstein => bernstein_suite(trials, &mut rng, ctx),
                LemmaId::DecayMajorant => majorant_suite(trials, &mut rng, ctx),
            }
        })
        .collect()
}

/// Extremes of the sweep, each `None` when no instance informs it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimates {
    /// `min value_lower / (n/k)` over the endpoint-weight (2.1) rows.
    pub c1_endpoint_hat: Option<Real>,
    /// `min value_lower / sqrt(n/k)` over the circle-weight (2.2) rows.
    pub c1_sqrt_hat: Option<Real>,
    /// `max value_upper / (n/k + 1)` of the endpoint problem, over the (2.1) rows.
    pub c2_hat: Option<Real>,
    /// `max value_upper / sqrt(n/k + 1)` of the endpoint problem, over the (2.2) rows.
    pub c2_sqrt_hat: Option<Real>,
    /// Largest restricted Bernstein ratio of the Müntz–Chebyshev inputs.
    pub c3_hat: Option<Real>,
    /// Smallest zero-bound slack.
    pub c4_hat: Option<Real>,
    /// Smallest `ν/κ ∫T²` with `ν >= 1`.
    pub c5_hat: Option<Real>,
    /// `c1_endpoint_hat >= 1/12` and `c1_sqrt_hat >= 1/6`.
    pub lower_constants_hold: bool,
}

fn fold_min(acc: Option<Real>, v: Real) -> Option<Real> {
    Some(acc.map_or(v.clone(), |a| a.min(v)))
}

fn fold_max(acc: Option<Real>, v: Real) -> Option<Real> {
    Some(acc.map_or(v.clone(), |a| a.max(v)))
}

pub fn estimate_constants(
    sandwiches: &[SandwichReport],
    muntz: &[MuntzChebyshev],
    ctx: &PrecisionContext,
) -> Result<ConstantEstimates> {
    if sandwiches.is_empty() && muntz.is_empty() {
        return Err(Error::Empty("estimate_constants needs at least one instance".into()));
    }
    let mut est = ConstantEstimates {
        c1_endpoint_hat: None,
        c1_sqrt_hat: None,
        c2_hat: None,
        c2_sqrt_hat: None,
        c3_hat: None,
        c4_hat: None,
        c5_hat: None,
        lower_constants_hold: true,
    };
    for s in sandwiches {
        let scale = ctx.ratio(s.problem.n as i64, s.problem.k as i64);
        match s.theorem {
            Theorem::Markov => {
                est.c1_endpoint_hat = fold_min(est.c1_endpoint_hat, &s.computed.value_lower / &scale);
                est.c2_hat = fold_max(est.c2_hat, &s.endpoint.value_upper / (scale.clone() + 1.0));
            }
            Theorem::Bernstein => {
                let root = scale.sqrt();
                est.c1_sqrt_hat = fold_min(est.c1_sqrt_hat, &s.computed.value_lower / &root);
                est.c2_sqrt_hat = fold_max(est.c2_sqrt_hat, &s.endpoint.value_upper / (scale.clone() + 1.0).sqrt());
            }
        }
    }
    for t in muntz {
        if let Ok(ratio) = check_bernstein_restricted(&t.to_polynomial(), t.nu, t.kappa, ctx) {
            est.c3_hat = fold_max(est.c3_hat, ratio);
        }
        for slack in zero_bound_check(t) {
            est.c4_hat = fold_min(est.c4_hat, slack);
        }
        if t.nu >= 1 {
            let v = t_squared_integral(t, ctx) * t.nu as f64 / t.kappa as f64;
            est.c5_hat = fold_min(est.c5_hat, v);
        }
    }
    est.lower_constants_hold = est.c1_endpoint_hat.as_ref().map_or(true, |c| *c >= ctx.ratio(1, 12))
        && est.c1_sqrt_hat.as_ref().map_or(true, |c| *c >= ctx.ratio(1, 6));
    Ok(est)
}
