//! Extended-precision reals backed by MPFR, and the precision context that
//! every numerical routine in the crate takes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default mantissa width in bits.
pub const DEFAULT_BITS: u32 = 256;

/// Environment variable overriding the default mantissa width.
pub const BITS_ENV_VAR: &str = "TURANLAB_BITS";

/// Precision settings shared by all operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub mantissa_bits: u32,
    /// Relative tolerance for sup-norm and argmax refinement.
    pub sup_tol: f64,
    /// Absolute width to which real roots are bracketed.
    pub root_tol: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: DEFAULT_BITS,
            sup_tol: 1e-12,
            root_tol: 1e-14,
        }
    }
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32, sup_tol: f64, root_tol: f64) -> Result<Self> {
        let ctx = PrecisionContext {
            mantissa_bits,
            sup_tol,
            root_tol,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_bits(mantissa_bits: u32) -> Result<Self> {
        PrecisionContext {
            mantissa_bits,
            ..Default::default()
        }
        .checked()
    }

    /// Default context, with the mantissa width taken from `TURANLAB_BITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BITS_ENV_VAR) {
            Ok(s) => {
                let bits = s
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("{BITS_ENV_VAR}={s:?} is not an integer")))?;
                Self::with_bits(bits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 64 {
            return Err(Error::Config(format!(
                "mantissa_bits must be at least 64, got {}",
                self.mantissa_bits
            )));
        }
        if !(self.sup_tol > 0.0 && self.sup_tol.is_finite()) {
            return Err(Error::Config(format!("sup_tol must be positive, got {}", self.sup_tol)));
        }
        if !(self.root_tol > 0.0 && self.root_tol.is_finite()) {
            return Err(Error::Config(format!("root_tol must be positive, got {}", self.root_tol)));
        }
        Ok(())
    }

    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn real(&self, v: f64) -> Real {
        Real::with_bits(self.mantissa_bits, v)
    }

    pub fn zero(&self) -> Real {
        self.real(0.0)
    }

    pub fn one(&self) -> Real {
        self.real(1.0)
    }

    pub fn pi(&self) -> Real {
        Real(Float::with_val(self.mantissa_bits, Constant::Pi))
    }

    /// Exact ratio `num / den` rounded once at context precision.
    pub fn ratio(&self, num: i64, den: i64) -> Real {
        self.real(num as f64) / self.real(den as f64)
    }

    pub fn parse(&self, s: &str) -> Result<Real> {
        Real::parse_with_bits(s, self.mantissa_bits)
    }

    /// Relative unit roundoff at this precision.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.mantissa_bits.min(1000) as i32))
    }
}

/// An MPFR float. Binary operations round to the wider of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn with_bits(bits: u32, v: f64) -> Real {
        Real(Float::with_val(bits, v))
    }

    pub fn from_float(f: Float) -> Real {
        Real(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn round_to(&self, bits: u32) -> Real {
        Real(Float::with_val(bits, &self.0))
    }

    /// Same precision as `self`, value `v`.
    pub fn lift(&self, v: f64) -> Real {
        Real::with_bits(self.prec(), v)
    }

    pub fn zero_like(&self) -> Real {
        self.lift(0.0)
    }

    pub fn one_like(&self) -> Real {
        self.lift(1.0)
    }

    pub fn pi_like(&self) -> Real {
        Real(Float::with_val(self.prec(), Constant::Pi))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    pub fn cos(&self) -> Real {
        Real(self.0.clone().cos())
    }

    pub fn sin(&self) -> Real {
        Real(self.0.clone().sin())
    }

    pub fn atan2(&self, x: &Real) -> Real {
        Real(self.0.clone().atan2(&x.0))
    }

    /// `self^e` by repeated squaring.
    pub fn powi(&self, e: u32) -> Real {
        let mut result = self.one_like();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self^(e/2)` for `self >= 0`.
    pub fn pow_half(&self, e: u32) -> Real {
        if e % 2 == 0 {
            self.powi(e / 2)
        } else {
            self.sqrt().powi(e)
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn parse_with_bits(s: &str, bits: u32) -> Result<Real> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Real(Float::with_val(bits, parsed)))
    }

    /// Decimal string with enough digits to round-trip at the value's precision.
    pub fn to_decimal_string(&self) -> String {
        self.0.to_string_radix(10, None)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Real, D::Error> {
        let s = String::deserialize(d)?;
        Real::parse_with_bits(&s, bits_for_decimal(&s)).map_err(serde::de::Error::custom)
    }
}

/// Precision whose shortest round-trip decimal has as many digits as `s`;
/// short literals get the default precision.
fn bits_for_decimal(s: &str) -> u32 {
    let digits = s
        .chars()
        .take_while(|c| *c != 'e' && *c != 'E')
        .filter(|c| c.is_ascii_digit())
        .count() as u32;
    if digits <= 17 {
        return DEFAULT_BITS;
    }
    let log10_2 = std::f64::consts::LN_2 / std::f64::consts::LN_10;
    let mut p = 64;
    while 1 + ((p as f64) * log10_2).ceil() as u32 <= digits - 1 {
        p += 1;
    }
    p
}

fn wider(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(Float::with_val(wider(&self.0, &rhs.0), &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                Real(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<&Real> for f64 {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(Float::with_val(rhs.0.prec(), self $op &rhs.0))
            }
        }
        impl $tr<Real> for f64 {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $atr<&Real> for Real {
            fn $amethod(&mut self, rhs: &Real) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $atr<Real> for Real {
            fn $amethod(&mut self, rhs: Real) {
                *self = (&*self).$method(&rhs);
            }
        }
        impl $atr<f64> for Real {
            fn $amethod(&mut self, rhs: f64) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign, +);
real_binop!(Sub, sub, SubAssign, sub_assign, -);
real_binop!(Mul, mul, MulAssign, mul_assign, *);
real_binop!(Div, div, DivAssign, div_assign, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.0.prec(), -&self.0))
    }
}

/// Minimal field interface shared by `f64` and [`Real`], so the linear
/// programming engine can run a cheap double-precision search and an
/// extended-precision polish from the same code.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A value of the same precision as `self`.
    fn lift(&self, v: f64) -> Self;
    fn magnitude(&self) -> Self;
    fn as_f64(&self) -> f64;
    /// Relative unit roundoff.
    fn unit_roundoff(&self) -> f64;
}

impl Scalar for f64 {
    fn lift(&self, v: f64) -> f64 {
        v
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn unit_roundoff(&self) -> f64 {
        f64::EPSILON
    }
}

impl Scalar for Real {
    fn lift(&self, v: f64) -> Real {
        Real::lift(self, v)
    }
    fn magnitude(&self) -> Real {
        self.abs()
    }
    fn as_f64(&self) -> f64 {
        self.to_f64()
    }
    fn unit_roundoff(&self) -> f64 {
        2f64.powi(-(self.prec().min(1000) as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_bad_settings() {
        assert!(PrecisionContext::with_bits(32).is_err());
        assert!(PrecisionContext::new(128, 0.0, 1e-14).is_err());
        assert!(PrecisionContext::new(128, 1e-12, -1.0).is_err());
        assert!(PrecisionContext::new(64, 1e-12, 1e-14).is_ok());
    }

    #[test]
    fn operations_keep_wider_precision() {
        let a = Real::with_bits(128, 1.0);
        let b = Real::with_bits(300, 3.0);
        assert_eq!((&a / &b).prec(), 300);
        assert_eq!((&a * 2.0).prec(), 128);
    }

    #[test]
    fn powi_matches_mpfr_power() {
        let ctx = PrecisionContext::default();
        let x = ctx.parse("0.9").unwrap();
        let by_squaring = x.powi(100);
        use rug::ops::Pow;
        let reference = Real::from_float(Float::with_val(256, x.as_float().pow(100u32)));
        let rel = ((&by_squaring - &reference) / &reference).abs();
        assert!(rel < 1e-70, "{rel:?}");
    }

    #[test]
    fn decimal_string_round_trips() {
        let ctx = PrecisionContext::default();
        let x = ctx.one() / ctx.real(3.0);
        let s = x.to_decimal_string();
        assert_eq!(ctx.parse(&s).unwrap(), x);
        let json = serde_json::to_string(&x).unwrap();
        let back: Real = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn sqrt_two() {
        let ctx = PrecisionContext::default();
        let r = ctx.real(2.0).sqrt();
        let err = (&r * &r - 2.0).abs();
        assert!(err < 1e-70);
    }
}
