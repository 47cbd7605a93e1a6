//! Scalar abstractions.
//!
//! [`Real`] is a floating type (f32, f64, double-double). [`Weight`] is any
//! field the polynomial evaluators can run over: the reals, exact rationals and
//! the log-scaled [`Scaled`](crate::scaled::Scaled) carrier.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use crate::dd::DoubleDouble;

pub trait Real:
    Weight + Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Conversion from an f64 literal.
    fn lit(v: f64) -> Self;

    fn of(v: usize) -> Self {
        Self::from_usize(v).expect("representable integer")
    }

    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    fn lit(v: f64) -> Self {
        v as f32
    }
}

impl Real for f64 {
    fn lit(v: f64) -> Self {
        v
    }
}

impl Real for DoubleDouble {
    fn lit(v: f64) -> Self {
        DoubleDouble::new(v)
    }
}

/// Field operations plus the magnitude queries needed for renormalisation.
pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Inexact carriers renormalise long products; exact ones never do.
    const FLOATING: bool;

    fn int(v: i64) -> Self;

    fn from_lit(v: f64) -> Option<Self>;

    /// Natural log of the absolute value; `-inf` at zero.
    fn ln_abs(&self) -> f64;

    fn signum_i8(&self) -> i8;

    /// Nearest f64 (may under- or overflow).
    fn approx(&self) -> f64;

    /// Multiply by `exp(s)`. Exact carriers only accept `s == 0`.
    fn scale_exp(&self, s: f64) -> Self;

    /// Multiply by `2^e`; exact for binary floats away from under- and overflow.
    fn scale_pow2(&self, e: i64) -> Self {
        self.scale_exp(e as f64 * std::f64::consts::LN_2)
    }

    fn uint(v: usize) -> Self {
        Self::int(v as i64)
    }
}

macro_rules! float_weight {
    ($($t:ty),*) => {$(
        impl Weight for $t {
            const FLOATING: bool = true;
            fn int(v: i64) -> Self { <$t as FromPrimitive>::from_i64(v).unwrap() }
            fn from_lit(v: f64) -> Option<Self> { Some(<$t as Real>::lit(v)) }
            fn ln_abs(&self) -> f64 { Real::f64(Float::ln(Float::abs(*self))) }
            fn signum_i8(&self) -> i8 {
                if *self > <$t as Zero>::zero() { 1 } else if *self < <$t as Zero>::zero() { -1 } else { 0 }
            }
            fn approx(&self) -> f64 { Real::f64(*self) }
            fn scale_exp(&self, s: f64) -> Self {
                if s == 0.0 { *self } else { *self * Float::exp(<$t as Real>::lit(s)) }
            }
            fn scale_pow2(&self, e: i64) -> Self {
                let (mut v, mut e) = (*self, e);
                while e.abs() > 1000 {
                    let step = 1000 * e.signum();
                    v *= <$t as Real>::lit(2f64.powi(step as i32));
                    e -= step;
                }
                v * <$t as Real>::lit(2f64.powi(e as i32))
            }
        }
    )*};
}
float_weight!(f32, f64, DoubleDouble);

/// `ln |v|` for arbitrarily large integers.
pub fn ln_bigint(v: &BigInt) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits < 1000 {
        return v.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

impl Weight for BigRational {
    const FLOATING: bool = false;
    fn int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_lit(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn ln_abs(&self) -> f64 {
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }
    fn signum_i8(&self) -> i8 {
        match self.numer().sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => 0,
        }
    }
    fn approx(&self) -> f64 {
        match ToPrimitive::to_f64(self) {
            Some(v) if v.is_finite() && (v != 0.0 || self.is_zero()) => v,
            _ => self.signum_i8() as f64 * self.ln_abs().exp(),
        }
    }
    fn scale_exp(&self, s: f64) -> Self {
        assert!(s == 0.0, "exact carrier cannot be rescaled by exp({s})");
        self.clone()
    }
}

/// Rational from a numerator and denominator.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
