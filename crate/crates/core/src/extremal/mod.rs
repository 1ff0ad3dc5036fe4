//! Extremal ratio problems over incomplete polynomials
//! `P(x) = x^{n+1} R(x)`, `deg R <= k - 1`:
//!
//! * endpoint: `min ‖P' w‖ / |P(1)|`
//! * variation: `min ‖P' w‖ / V_0^1(P)`
//!
//! with `w = 1` or `w = sqrt(1 - x^2)`, and the sandwich checks built on them.

mod descent;
mod family;
mod lp;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::muntz::witness_upper;
use crate::poly::{sup_norm, IncompletePolynomial, Polynomial, Weight};
use crate::real::{PrecisionContext, Real};

pub use descent::descent_minimum;
use family::{Family, Peak};

/// Largest `k` accepted by the variation solver.
pub const MAX_VARIATION_K: u32 = 8;

/// Relative disagreement between the breakpoint and descent values that is
/// reported as an error.
pub const ORACLE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// `|P(1)|`
    Endpoint,
    /// `V_0^1(P)`
    Variation,
}

impl Denominator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Denominator::Endpoint => "endpoint",
            Denominator::Variation => "variation",
        }
    }
}

impl std::str::FromStr for Denominator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Denominator> {
        match s {
            "endpoint" => Ok(Denominator::Endpoint),
            "variation" => Ok(Denominator::Variation),
            other => Err(Error::Config(format!(
                "unknown denominator {other:?} (expected endpoint|variation)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioProblem {
    pub n: u32,
    pub k: u32,
    pub denominator: Denominator,
    pub weight: Weight,
}

impl RatioProblem {
    pub fn new(n: u32, k: u32, denominator: Denominator, weight: Weight) -> Result<RatioProblem> {
        if n < 1 || k < 1 {
            return Err(Error::Precondition(format!("need n >= 1 and k >= 1, got n={n}, k={k}")));
        }
        Ok(RatioProblem {
            n,
            k,
            denominator,
            weight,
        })
    }
}

/// Per-candidate audit of the two variation bounds
/// `V <= ((10k+2)/n) ‖P'‖` and `V <= 6 sqrt(k/n) ‖P' sqrt(1-x^2)‖`.
/// Margins are `lhs / rhs`; both must stay at or below one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    pub candidates: usize,
    pub worst_markov_margin: f64,
    pub worst_bernstein_margin: f64,
}

impl ChainAudit {
    fn empty() -> ChainAudit {
        ChainAudit {
            candidates: 0,
            worst_markov_margin: 0.0,
            worst_bernstein_margin: 0.0,
        }
    }

    pub fn holds(&self) -> bool {
        self.worst_markov_margin <= 1.0 + 1e-10 && self.worst_bernstein_margin <= 1.0 + 1e-10
    }

    fn merge(&mut self, other: &ChainAudit) {
        self.candidates += other.candidates;
        self.worst_markov_margin = self.worst_markov_margin.max(other.worst_markov_margin);
        self.worst_bernstein_margin = self.worst_bernstein_margin.max(other.worst_bernstein_margin);
    }

    fn record(&mut self, fam: &Family, q: &[Real], variation: &Real) -> Result<()> {
        let qu = fam.q_in_u(q);
        let (unit, _) = fam.exact_sup(&qu, Weight::Unit)?;
        let (circle, _) = fam.exact_sup(&qu, Weight::Circle)?;
        let (n, k) = (fam.n as f64, fam.k as f64);
        let markov = variation / (unit * ((10.0 * k + 2.0) / n));
        let bernstein = variation / (circle * (6.0 * (k / n).sqrt()));
        self.candidates += 1;
        self.worst_markov_margin = self.worst_markov_margin.max(markov.to_f64());
        self.worst_bernstein_margin = self.worst_bernstein_margin.max(bernstein.to_f64());
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioCertificate {
    pub problem: RatioProblem,
    pub value_lower: Real,
    pub value_upper: Real,
    /// `R` of the optimizer, normalized so the denominator equals one.
    #[serde(rename = "R_opt")]
    pub r_opt: Polynomial,
    /// Points where `|P' w|` is within the gap of its maximum.
    pub active_points: Vec<Real>,
    pub gap: Real,
    /// Sign changes of `P'` of the optimizer (variation problems).
    pub breakpoints: Vec<Real>,
    /// Multistart descent value (variation problems).
    pub descent_value: Option<f64>,
    pub chain: ChainAudit,
}

impl RatioCertificate {
    pub fn incomplete(&self) -> IncompletePolynomial {
        IncompletePolynomial::new(self.problem.n, self.problem.k, self.r_opt.clone())
            .expect("certificate polynomial satisfies the degree bound")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Initial number of grid nodes.
    pub grid_size: usize,
    /// Required relative certificate gap.
    pub gap_tol: f64,
    /// Root of the random streams of the breakpoint search and the descent oracle.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_size: 4096,
            gap_tol: 1e-6,
            seed: 0x5EED,
        }
    }
}

/// `‖P' w‖ / denominator(P)` evaluated from scratch.
pub fn ratio_of(
    ip: &IncompletePolynomial,
    denominator: Denominator,
    w: Weight,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let q = ip.derivative_q();
    let num = sup_norm(|x| ip.derivative_at(&q, x), &ctx.zero(), &ctx.one(), w, ctx)?.value;
    let den = match denominator {
        Denominator::Endpoint => ip.eval(&ctx.one(), ctx)?.value.abs(),
        Denominator::Variation => ip.total_variation(ctx)?.value,
    };
    if den.is_zero() {
        return Err(Error::DegenerateNormalization("denominator vanishes".into()));
    }
    Ok(num / den)
}

/// The discrete problem on a growing grid, refined at the peaks of the
/// optimizer until `1 - 1/sup <= gap_tol`.
struct Refined {
    q: Vec<Real>,
    value: Real,
    sup: Real,
    peaks: Vec<Peak>,
    basis: Vec<usize>,
}

const MAX_REFINEMENTS: usize = 60;

struct Grid {
    w: Weight,
    rows: Vec<Vec<Real>>,
    rows_f64: Vec<Vec<f64>>,
}

impl Grid {
    fn new(fam: &Family, w: Weight, size: usize) -> Grid {
        let mut g = Grid {
            w,
            rows: Vec::new(),
            rows_f64: Vec::new(),
        };
        for x in fam.grid(size) {
            g.push(fam, &x);
        }
        g
    }

    fn push(&mut self, fam: &Family, x: &Real) {
        let row = fam.row(x, self.w);
        self.rows_f64.push(row.iter().map(Real::to_f64).collect());
        self.rows.push(row);
    }
}

fn solve_refined(
    fam: &Family,
    grid: &mut Grid,
    c: &[Real],
    warm: Option<&[usize]>,
    gap_tol: f64,
) -> Result<Refined> {
    let ctx = fam.ctx();
    let lp_tol = ctx.epsilon().sqrt().max(1e-60);
    let mut warm: Option<Vec<usize>> = warm.map(<[usize]>::to_vec);
    let c_f64: Vec<f64> = c.iter().map(Real::to_f64).collect();
    let mut last_sup = f64::NAN;
    for _ in 0..MAX_REFINEMENTS {
        if warm.is_none() {
            if let Ok(sol) = lp::maximize(&grid.rows_f64, &c_f64, None, 1e-13) {
                warm = Some(sol.basis);
            }
        }
        let sol = lp::maximize(&grid.rows, c, warm.as_deref(), lp_tol)?;
        let qu = fam.q_in_u(&sol.q);
        let (sup, peaks) = fam.exact_sup(&qu, grid.w)?;
        last_sup = sup.to_f64();
        let gap = 1.0 - 1.0 / &sup;
        if gap <= gap_tol {
            return Ok(Refined {
                q: sol.q,
                value: sol.value,
                sup,
                peaks,
                basis: sol.basis,
            });
        }
        for p in peaks.iter().filter(|p| p.value > 1.0) {
            grid.push(fam, &p.x);
        }
        warm = Some(sol.basis);
    }
    Err(Error::NonConvergence {
        iterations: MAX_REFINEMENTS,
        residual: 1.0 - 1.0 / last_sup,
        suggested_bits: ctx.mantissa_bits * 2,
    })
}

fn active_points(peaks: &[Peak], sup: &Real, gap_tol: f64) -> Vec<Real> {
    let cut = sup * (1.0 - gap_tol);
    let mut xs: Vec<Real> = peaks.iter().filter(|p| p.value >= cut).map(|p| p.x.clone()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    xs
}

/// `V_0^1(P)` for `P' = x^n Q`, from the sign changes of `Q`, together with them.
fn variation_of(fam: &Family, q: &[Real]) -> Result<(Real, Vec<Real>)> {
    let ctx = fam.ctx();
    let changes = fam.sign_changes(&fam.q_in_u(q))?;
    let mut ts = vec![ctx.zero()];
    ts.extend(changes.iter().cloned());
    ts.push(ctx.one());
    let p_at = |t: &Real| {
        fam.moment(t)
            .iter()
            .zip(q)
            .fold(ctx.zero(), |acc, (m, c)| acc + m * c)
    };
    let values: Vec<Real> = ts.iter().map(p_at).collect();
    let v = values
        .windows(2)
        .fold(ctx.zero(), |acc, w| acc + (&w[1] - &w[0]).abs());
    Ok((v, changes))
}

pub fn solve_endpoint(problem: &RatioProblem, ctx: &PrecisionContext) -> Result<RatioCertificate> {
    solve_endpoint_with(problem, ctx, &SolverOptions::default())
}

/// Normalizes `P(1) = 1` and solves the discrete minimax
/// `max ∫_0^1 x^n Q  s.t.  |x_i^n Q(x_i) w(x_i)| <= 1` with grid refinement.
pub fn solve_endpoint_with(
    problem: &RatioProblem,
    ctx: &PrecisionContext,
    opts: &SolverOptions,
) -> Result<RatioCertificate> {
    if problem.denominator != Denominator::Endpoint {
        return Err(Error::Precondition("solve_endpoint needs an endpoint problem".into()));
    }
    let problem = RatioProblem::new(problem.n, problem.k, problem.denominator, problem.weight)?;
    let fam = Family::new(problem.n, problem.k, ctx);
    let mut grid = Grid::new(&fam, problem.weight, opts.grid_size);
    let c = fam.moment(&ctx.one());
    let refined = solve_refined(&fam, &mut grid, &c, None, opts.gap_tol)?;
    if !(refined.value > 0.0) {
        return Err(Error::DegenerateNormalization(format!(
            "discrete optimum {} is not positive",
            refined.value
        )));
    }
    let value_lower = ctx.one() / &refined.value;
    let value_upper = &refined.sup / &refined.value;
    let gap = (&value_upper - &value_lower) / &value_upper;
    let ip = fam.to_incomplete(&refined.q, &value_lower)?;

    let mut chain = ChainAudit::empty();
    let (v, _) = variation_of(&fam, &refined.q)?;
    chain.record(&fam, &refined.q, &v)?;

    Ok(RatioCertificate {
        problem,
        value_lower,
        value_upper,
        r_opt: ip.r().clone(),
        active_points: active_points(&refined.peaks, &refined.sup, opts.gap_tol),
        gap,
        breakpoints: Vec::new(),
        descent_value: None,
        chain,
    })
}

pub fn solve_variation(problem: &RatioProblem, ctx: &PrecisionContext) -> Result<RatioCertificate> {
    solve_variation_with(problem, ctx, &SolverOptions::default())
}

/// Maximizes `V_0^1(P)` subject to `‖P' w‖ <= 1` through the breakpoint
/// reformulation, then cross-checks with a multistart descent.
pub fn solve_variation_with(
    problem: &RatioProblem,
    ctx: &PrecisionContext,
    opts: &SolverOptions,
) -> Result<RatioCertificate> {
    if problem.denominator != Denominator::Variation {
        return Err(Error::Precondition("solve_variation needs a variation problem".into()));
    }
    let problem = RatioProblem::new(problem.n, problem.k, problem.denominator, problem.weight)?;
    if problem.k > MAX_VARIATION_K {
        return Err(Error::DegreeGuard {
            degree: problem.k as usize,
            limit: MAX_VARIATION_K as usize,
        });
    }
    let fam = Family::new(problem.n, problem.k, ctx);
    let starts = search::breakpoint_search(&fam, problem.weight, opts.seed)?;

    let mut grid = Grid::new(&fam, problem.weight, opts.grid_size);
    let mut chain = ChainAudit::empty();
    let mut best: Option<Ascent> = None;
    let mut first_error = None;
    for t0 in starts {
        let res = ascend(&fam, &mut grid, t0, opts.gap_tol);
        match res {
            Ok(a) => {
                chain.merge(&a.chain);
                let better = best.as_ref().map_or(true, |b| a.upper < b.upper);
                if better {
                    best = Some(a);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let best = match (best, first_error) {
        (Some(b), _) => b,
        (None, Some(e)) => return Err(e),
        (None, None) => return Err(Error::Empty("no breakpoint configurations".into())),
    };

    // discrete ratio of the optimizer: its grid maximum is one
    let value_lower = ctx.one() / &best.variation;
    let value_upper = best.upper.clone();
    let gap = (&value_upper - &value_lower) / &value_upper;
    let ip = fam.to_incomplete(&best.refined.q, &(ctx.one() / &best.variation))?;

    let descent = descent_minimum(problem.n, problem.k, problem.weight, opts.seed);
    let relative = ((descent - value_upper.to_f64()) / value_upper.to_f64()).abs();
    if relative > ORACLE_TOLERANCE {
        return Err(Error::OracleDisagreement {
            breakpoint: value_upper.to_f64(),
            descent,
            relative,
        });
    }

    Ok(RatioCertificate {
        problem,
        value_lower,
        value_upper,
        r_opt: ip.r().clone(),
        active_points: active_points(&best.refined.peaks, &best.refined.sup, opts.gap_tol),
        gap,
        breakpoints: best.breakpoints,
        descent_value: Some(descent),
        chain,
    })
}

struct Ascent {
    refined: Refined,
    variation: Real,
    upper: Real,
    breakpoints: Vec<Real>,
    chain: ChainAudit,
}

const MAX_ASCENT_STEPS: usize = 40;

/// `c = sum_i σ_i ∫_{t_i}^{t_{i+1}} x^n B`, signs alternating from `+` on `[0, t_1]`.
fn config_objective(fam: &Family, t: &[Real]) -> Vec<Real> {
    let ctx = fam.ctx();
    let mut c = fam.moment(&ctx.one());
    if t.len() % 2 == 1 {
        c = c.into_iter().map(|v| -v).collect();
    }
    for (i, ti) in t.iter().enumerate() {
        let sign = if i % 2 == 0 { 2.0 } else { -2.0 };
        for (cj, mj) in c.iter_mut().zip(fam.moment(ti)) {
            *cj += mj * sign;
        }
    }
    c
}

/// Fixed-point ascent: breakpoints move to the sign changes of the current
/// optimizer, which never lowers the configuration value.
fn ascend(fam: &Family, grid: &mut Grid, t0: Vec<Real>, gap_tol: f64) -> Result<Ascent> {
    let mut t = t0;
    let mut chain = ChainAudit::empty();
    let mut best: Option<Ascent> = None;
    let mut warm: Option<Vec<usize>> = None;
    let mut last_v: Option<Real> = None;
    for _ in 0..MAX_ASCENT_STEPS {
        let c = config_objective(fam, &t);
        let refined = solve_refined(fam, grid, &c, warm.as_deref(), gap_tol)?;
        let (v, changes) = variation_of(fam, &refined.q)?;
        chain.record(fam, &refined.q, &v)?;
        let upper = &refined.sup / &v;
        warm = Some(refined.basis.clone());
        let same = changes.len() == t.len()
            && changes.iter().zip(&t).all(|(a, b)| (a - b).abs() < 1e-30);
        let stalled = last_v.as_ref().map_or(false, |lv| v <= lv.clone() * (1.0 + 1e-40));
        last_v = Some(v.clone());
        let improves = best.as_ref().map_or(true, |b| upper < b.upper);
        if improves {
            best = Some(Ascent {
                refined,
                variation: v,
                upper,
                breakpoints: changes.clone(),
                chain: ChainAudit::empty(),
            });
        }
        if same || stalled {
            break;
        }
        if changes.len() != t.len() {
            warm = None;
        }
        t = changes;
    }
    let mut best = best.expect("at least one ascent step");
    best.chain = chain;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "2.1")]
    Markov,
    #[serde(rename = "2.2")]
    Bernstein,
}

impl Theorem {
    pub fn weight(&self) -> Weight {
        match self {
            Theorem::Markov => Weight::Unit,
            Theorem::Bernstein => Weight::Circle,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::Markov => "2.1",
            Theorem::Bernstein => "2.2",
        }
    }

    /// `(1/12)(n/k)` or `(1/6) sqrt(n/k)`.
    pub fn lower(&self, n: u32, k: u32, ctx: &PrecisionContext) -> Real {
        let ratio = ctx.real(n as f64) / ctx.real(k as f64);
        match self {
            Theorem::Markov => ratio / 12.0,
            Theorem::Bernstein => ratio.sqrt() / 6.0,
        }
    }

    /// `n/(10k+2)` for 2.1, `(1/6) sqrt(n/k)` for 2.2.
    pub fn chain_lower(&self, n: u32, k: u32, ctx: &PrecisionContext) -> Real {
        match self {
            Theorem::Markov => ctx.real(n as f64) / ctx.real((10 * k + 2) as f64),
            Theorem::Bernstein => self.lower(n, k, ctx),
        }
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Theorem> {
        match s {
            "2.1" => Ok(Theorem::Markov),
            "2.2" => Ok(Theorem::Bernstein),
            other => Err(Error::Config(format!("unknown theorem {other:?} (expected 2.1|2.2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// `∫_0^x T_{ν,κ}^2`
    Muntz,
    /// `x^{n+1}`
    Monomial,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub problem: RatioProblem,
    pub theorem: Theorem,
    pub theorem_lower: Real,
    pub chain_lower: Real,
    /// Variation certificate.
    pub computed: RatioCertificate,
    pub endpoint: RatioCertificate,
    pub witness_ratio: Real,
    pub witness: WitnessKind,
    pub pass: bool,
}

/// Absolute slack allowed in the sandwich comparisons.
pub const SANDWICH_TOL: f64 = 1e-9;

pub fn theorem_check(n: u32, k: u32, theorem: Theorem, ctx: &PrecisionContext) -> Result<SandwichReport> {
    theorem_check_with(n, k, theorem, ctx, &SolverOptions::default())
}

pub fn theorem_check_with(
    n: u32,
    k: u32,
    theorem: Theorem,
    ctx: &PrecisionContext,
    opts: &SolverOptions,
) -> Result<SandwichReport> {
    let w = theorem.weight();
    let problem = RatioProblem::new(n, k, Denominator::Variation, w)?;
    let computed = solve_variation_with(&problem, ctx, opts)?;
    let endpoint = solve_endpoint_with(&RatioProblem::new(n, k, Denominator::Endpoint, w)?, ctx, opts)?;
    let (witness_ratio, witness) = match witness_upper(n, k, w, ctx) {
        Ok(wu) => (wu.ratio, WitnessKind::Muntz),
        Err(Error::Precondition(_)) => {
            let ip = IncompletePolynomial::monomial_witness(n, k, ctx)?;
            (ratio_of(&ip, Denominator::Endpoint, w, ctx)?, WitnessKind::Monomial)
        }
        Err(e) => return Err(e),
    };
    let theorem_lower = theorem.lower(n, k, ctx);
    let chain_lower = theorem.chain_lower(n, k, ctx);
    let pass = theorem_lower <= computed.value_upper.clone() + SANDWICH_TOL
        && computed.value_lower <= witness_ratio.clone() + SANDWICH_TOL
        && chain_lower <= computed.value_lower.clone() + SANDWICH_TOL
        && computed.value_lower <= endpoint.value_upper.clone() + SANDWICH_TOL
        && computed.chain.holds()
        && endpoint.chain.holds();
    Ok(SandwichReport {
        problem,
        theorem,
        theorem_lower,
        chain_lower,
        computed,
        endpoint,
        witness_ratio,
        witness,
        pass,
    })
}
