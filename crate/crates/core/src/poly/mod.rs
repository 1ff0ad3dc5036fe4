//! Dense real polynomials in the monomial or shifted-Chebyshev basis, plus the
//! incomplete-polynomial class `x^{n+1} R(x)`.

mod incomplete;
mod norm;
mod roots;

pub use incomplete::{IncompletePolynomial, IncompleteValue, TotalVariation, Weight};
pub use norm::{sup_norm, SupNorm, SCAN_POINTS};
pub use roots::{real_roots, RootSet, MAX_ROOT_DEGREE};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::{PrecisionContext, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "monomial")]
    Monomial,
    /// `T_j(2x - 1)`, orthogonal on `[0, 1]`.
    #[serde(rename = "shifted-chebyshev")]
    ShiftedChebyshev,
}

/// A polynomial `sum_j coeffs[j] * B_j(x)` in a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    basis: Basis,
    coeffs: Vec<Real>,
}

impl Polynomial {
    pub fn new(basis: Basis, coeffs: Vec<Real>) -> Result<Polynomial> {
        if coeffs.is_empty() {
            return Err(Error::Domain("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite polynomial coefficient".into()));
        }
        Ok(Polynomial { basis, coeffs })
    }

    pub fn monomial(coeffs: Vec<Real>) -> Result<Polynomial> {
        Polynomial::new(Basis::Monomial, coeffs)
    }

    pub fn from_f64(basis: Basis, coeffs: &[f64], ctx: &PrecisionContext) -> Result<Polynomial> {
        Polynomial::new(basis, coeffs.iter().map(|&c| ctx.real(c)).collect())
    }

    pub fn constant(c: Real) -> Polynomial {
        Polynomial {
            basis: Basis::Monomial,
            coeffs: vec![c],
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Real> {
        self.coeffs
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(Real::prec).max().unwrap_or(64)
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Drops trailing zero coefficients (keeps at least one).
    pub fn trimmed(mut self) -> Polynomial {
        let len = self.degree().map_or(1, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    pub fn eval(&self, x: &Real) -> Real {
        match self.basis {
            Basis::Monomial => horner(&self.coeffs, x),
            Basis::ShiftedChebyshev => clenshaw(&self.coeffs, &(x * 2.0 - 1.0)),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let c: Vec<f64> = self.coeffs.iter().map(Real::to_f64).collect();
        match self.basis {
            Basis::Monomial => c.iter().rev().fold(0.0, |acc, ci| acc * x + ci),
            Basis::ShiftedChebyshev => {
                let t = 2.0 * x - 1.0;
                let (mut b1, mut b2) = (0.0, 0.0);
                for ci in c.iter().skip(1).rev() {
                    let b0 = ci + 2.0 * t * b1 - b2;
                    b2 = b1;
                    b1 = b0;
                }
                c[0] + t * b1 - b2
            }
        }
    }

    /// Basis change. Both directions are computed with guard bits (the
    /// Chebyshev-to-monomial map amplifies rounding by roughly `5.83^deg`) and
    /// rounded back to the input precision.
    pub fn to_basis(&self, basis: Basis) -> Polynomial {
        if self.basis == basis {
            return self.clone();
        }
        let prec = self.prec();
        let deg = self.coeffs.len() - 1;
        let work = prec + 3 * deg as u32 + 32;
        let lifted: Vec<Real> = self.coeffs.iter().map(|c| c.round_to(work)).collect();
        let converted = match basis {
            Basis::Monomial => {
                let table = chebyshev_monomial_table(deg, 0.0, 1.0, work);
                combine_rows(&table, &lifted)
            }
            Basis::ShiftedChebyshev => {
                // Horner in the Chebyshev basis: p = a_0 + x (a_1 + x (...))
                let mut acc = Polynomial {
                    basis: Basis::ShiftedChebyshev,
                    coeffs: vec![lifted[deg].clone()],
                };
                for a in lifted.iter().rev().skip(1) {
                    acc = acc.mul_x();
                    acc.coeffs[0] += a;
                }
                acc.coeffs
            }
        };
        Polynomial {
            basis,
            coeffs: converted.into_iter().map(|c| c.round_to(prec)).collect(),
        }
    }

    pub fn to_monomial(&self) -> Polynomial {
        self.to_basis(Basis::Monomial)
    }

    pub fn to_shifted_chebyshev(&self) -> Polynomial {
        self.to_basis(Basis::ShiftedChebyshev)
    }

    pub fn derivative(&self) -> Polynomial {
        let zero = self.coeffs[0].zero_like();
        let deg = self.coeffs.len() - 1;
        if deg == 0 {
            return Polynomial {
                basis: self.basis,
                coeffs: vec![zero],
            };
        }
        let coeffs = match self.basis {
            Basis::Monomial => (1..=deg).map(|j| &self.coeffs[j] * j as f64).collect(),
            Basis::ShiftedChebyshev => {
                // d/dt recurrence c'_{j-1} = c'_{j+1} + 2 j c_j, then d/dx = 2 d/dt
                let mut d = vec![zero.clone(); deg + 1];
                for j in (1..=deg).rev() {
                    let next = d.get(j + 1).cloned().unwrap_or_else(|| zero.clone());
                    d[j - 1] = next + &self.coeffs[j] * (2.0 * j as f64);
                }
                d[0] = &d[0] / 2.0;
                d.truncate(deg);
                d.into_iter().map(|c| c * 2.0).collect()
            }
        };
        Polynomial {
            basis: self.basis,
            coeffs,
        }
    }

    pub fn scale(&self, s: &Real) -> Polynomial {
        Polynomial {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Sum in the basis of `self`.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let other = other.to_basis(self.basis);
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..len)
            .map(|j| {
                let a = self.coeffs.get(j).unwrap_or(&zero);
                let b = other.coeffs.get(j).unwrap_or(&zero);
                a + b
            })
            .collect();
        Polynomial {
            basis: self.basis,
            coeffs,
        }
    }

    /// `x * self`, in the basis of `self`.
    pub fn mul_x(&self) -> Polynomial {
        let zero = self.coeffs[0].zero_like();
        let deg = self.coeffs.len() - 1;
        let mut out = vec![zero; deg + 2];
        match self.basis {
            Basis::Monomial => {
                for (j, c) in self.coeffs.iter().enumerate() {
                    out[j + 1] = c.clone();
                }
            }
            Basis::ShiftedChebyshev => {
                // x = (1 + t) / 2 and t T_j = (T_{j+1} + T_{|j-1|}) / 2
                for (j, c) in self.coeffs.iter().enumerate() {
                    let half = c / 2.0;
                    let quarter = c / 4.0;
                    out[j] += &half;
                    out[j + 1] += &quarter;
                    if j == 0 {
                        out[1] += &quarter;
                    } else {
                        out[j - 1] += &quarter;
                    }
                }
            }
        }
        Polynomial {
            basis: self.basis,
            coeffs: out,
        }
    }

    /// Product, returned in the monomial basis.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let a = self.to_monomial();
        let b = other.to_monomial();
        Polynomial {
            basis: Basis::Monomial,
            coeffs: convolve(&a.coeffs, &b.coeffs),
        }
    }
}

fn horner(coeffs: &[Real], x: &Real) -> Real {
    let mut acc = &coeffs[coeffs.len() - 1] + &x.zero_like();
    for c in coeffs.iter().rev().skip(1) {
        acc = &acc * x + c;
    }
    acc
}

/// Clenshaw recurrence for `sum c_j T_j(t)`.
pub(crate) fn clenshaw(coeffs: &[Real], t: &Real) -> Real {
    let zero = t.zero_like();
    let mut b1 = zero.clone();
    let mut b2 = zero;
    let two_t = t * 2.0;
    for c in coeffs.iter().skip(1).rev() {
        let b0 = &two_t * &b1 - &b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * &b1 - &b2 + &coeffs[0]
}

pub(crate) fn convolve(a: &[Real], b: &[Real]) -> Vec<Real> {
    let zero = a[0].zero_like() + b[0].zero_like();
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Monomial coefficients of `T_j((2x - a - b)/(b - a))` for `j = 0..=deg`;
/// row `j` has length `deg + 1`.
pub(crate) fn chebyshev_monomial_table(deg: usize, a: f64, b: f64, bits: u32) -> Vec<Vec<Real>> {
    let lo = Real::with_bits(bits, a);
    let hi = Real::with_bits(bits, b);
    chebyshev_monomial_table_real(deg, &lo, &hi)
}

pub(crate) fn chebyshev_monomial_table_real(deg: usize, a: &Real, b: &Real) -> Vec<Vec<Real>> {
    let zero = a.zero_like();
    let width = b - a;
    let slope = 2.0 / &width;
    let offset = -((a + b) / &width);
    let mut rows: Vec<Vec<Real>> = Vec::with_capacity(deg + 1);
    let mut first = vec![zero.clone(); deg + 1];
    first[0] = zero.one_like();
    rows.push(first);
    if deg >= 1 {
        let mut second = vec![zero.clone(); deg + 1];
        second[0] = offset.clone();
        second[1] = slope.clone();
        rows.push(second);
    }
    for j in 2..=deg {
        let prev = &rows[j - 1];
        let prev2 = &rows[j - 2];
        let mut next = vec![zero.clone(); deg + 1];
        for m in 0..=deg {
            let mut v = &prev[m] * &offset * 2.0 - &prev2[m];
            if m >= 1 {
                v += &prev[m - 1] * &slope * 2.0;
            }
            next[m] = v;
        }
        rows.push(next);
    }
    rows
}

/// `sum_j weights[j] * table[j]`.
pub(crate) fn combine_rows(table: &[Vec<Real>], weights: &[Real]) -> Vec<Real> {
    let len = table[0].len();
    let mut out = vec![weights[0].zero_like(); len];
    for (row, w) in table.iter().zip(weights) {
        for (o, t) in out.iter_mut().zip(row) {
            *o += w * t;
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    basis: Basis,
    coeffs: Vec<Real>,
    /// -1 encodes the zero polynomial.
    degree: i64,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRepr {
            basis: self.basis,
            coeffs: self.coeffs.clone(),
            degree: self.degree().map_or(-1, |d| d as i64),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Polynomial, D::Error> {
        let repr = PolynomialRepr::deserialize(d)?;
        let p = Polynomial::new(repr.basis, repr.coeffs).map_err(serde::de::Error::custom)?;
        let degree = p.degree().map_or(-1, |d| d as i64);
        if degree != repr.degree {
            return Err(serde::de::Error::custom(format!(
                "declared degree {} does not match coefficients (degree {degree})",
                repr.degree
            )));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn eval_examples() {
        let ctx = ctx();
        let p = Polynomial::from_f64(Basis::Monomial, &[-1.0, 0.0, 2.0], &ctx).unwrap();
        assert_eq!(p.eval(&ctx.real(0.5)), -0.5);

        let x = (ctx.pi() / 8.0).cos();
        let expected = (ctx.pi() / 4.0).cos();
        assert!((p.eval(&x) - expected).abs() < 1e-70);

        let id = Polynomial::from_f64(Basis::Monomial, &[0.0, 1.0], &ctx).unwrap();
        assert_eq!(id.eval(&ctx.real(3.0)), 3.0);
    }

    #[test]
    fn shifted_chebyshev_eval_matches_cosine() {
        let ctx = ctx();
        // T*_3(x) = cos(3 arccos(2x - 1))
        let p = Polynomial::from_f64(Basis::ShiftedChebyshev, &[0.0, 0.0, 0.0, 1.0], &ctx).unwrap();
        for &x in &[0.0, 0.1, 0.5, 0.77, 1.0] {
            let expected = (3.0 * (2.0 * x - 1.0f64).acos()).cos();
            assert!((p.eval(&ctx.real(x)).to_f64() - expected).abs() < 1e-14);
        }
        assert!((p.eval_f64(0.3) - (3.0 * (-0.4f64).acos()).cos()).abs() < 1e-14);
    }

    #[test]
    fn degree_and_zero_sentinel() {
        let ctx = ctx();
        let p = Polynomial::from_f64(Basis::Monomial, &[1.0, 2.0, 0.0], &ctx).unwrap();
        assert_eq!(p.degree(), Some(1));
        let z = Polynomial::from_f64(Basis::Monomial, &[0.0, 0.0], &ctx).unwrap();
        assert_eq!(z.degree(), None);
        assert!(Polynomial::new(Basis::Monomial, vec![]).is_err());
        let json = serde_json::to_value(&z).unwrap();
        assert_eq!(json["degree"], -1);
    }

    #[test]
    fn derivative_in_both_bases() {
        let ctx = ctx();
        let p = Polynomial::from_f64(Basis::Monomial, &[1.0, -3.0, 0.5, 2.0, -1.0], &ctx).unwrap();
        let dp = p.derivative();
        let dc = p.to_shifted_chebyshev().derivative();
        for &x in &[0.0, 0.3, 0.9, 1.7] {
            let x = ctx.real(x);
            assert!((dp.eval(&x) - dc.eval(&x)).abs() < 1e-60);
        }
    }

    #[test]
    fn mul_x_in_both_bases() {
        let ctx = ctx();
        let p = Polynomial::from_f64(Basis::ShiftedChebyshev, &[0.3, -1.0, 0.25, 2.0], &ctx).unwrap();
        let xp = p.mul_x();
        let xm = p.to_monomial().mul_x();
        for &x in &[0.0, 0.2, 0.6, 1.0] {
            let x = ctx.real(x);
            let direct = &x * p.eval(&x);
            assert!((xp.eval(&x) - &direct).abs() < 1e-60);
            assert!((xm.eval(&x) - &direct).abs() < 1e-60);
        }
    }

    #[test]
    fn json_round_trip_keeps_full_precision() {
        let ctx = ctx();
        let third = ctx.one() / ctx.real(3.0);
        let p = Polynomial::new(Basis::ShiftedChebyshev, vec![third.clone(), ctx.real(-2.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"basis\":\"shifted-chebyshev\""));
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = s.replace("\"degree\":1", "\"degree\":3");
        assert!(serde_json::from_str::<Polynomial>(&bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn basis_round_trip(coeffs in prop::collection::vec(-1.0f64..1.0, 1..65)) {
            let ctx = ctx();
            let p = Polynomial::from_f64(Basis::Monomial, &coeffs, &ctx).unwrap();
            let back = p.to_shifted_chebyshev().to_monomial();
            let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
            let tol = 2f64.powi(-(ctx.mantissa_bits as i32) + 10);
            for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
                let rel = ((a - b).abs() / scale).to_f64();
                prop_assert!(rel <= tol, "relative error {rel:e} above {tol:e}");
            }
        }
    }
}
