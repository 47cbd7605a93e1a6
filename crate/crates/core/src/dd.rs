//! Double-double scalar (about 106 significant bits) over [`qd::Quad`].
//!
//! Addition uses the accurate two-sum variant: the recursions cancel heavily
//! and the sloppy sum loses the low word under cancellation.

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ParseFloatError, ToPrimitive, Zero};
use qd::Quad;
use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
pub struct DoubleDouble(Quad);

impl DoubleDouble {
    pub const fn new(v: f64) -> Self {
        DoubleDouble(Quad(v, 0.0))
    }

    /// Normalised sum of two words.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let bb = s - hi;
        DoubleDouble(Quad(s, (hi - (s - bb)) + (lo - bb)))
    }

    pub fn hi(self) -> f64 {
        self.0 .0
    }

    pub fn lo(self) -> f64 {
        self.0 .1
    }

    fn pi() -> Self {
        DoubleDouble(Quad::PI)
    }

    fn int_pow(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self, Self::one());
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Sine and cosine on `|r| <= pi/4` by Taylor series.
    fn sin_cos_reduced(r: Self) -> (Self, Self) {
        let r2 = r * r;
        let (mut s, mut c) = (r, Self::one());
        let (mut ts, mut tc) = (r, Self::one());
        for j in 1..30 {
            let j = j as f64;
            ts = -ts * r2 / Self::new((2.0 * j) * (2.0 * j + 1.0));
            tc = -tc * r2 / Self::new((2.0 * j - 1.0) * (2.0 * j));
            s += ts;
            c += tc;
            if ts.hi().abs() < 1e-34 && tc.hi().abs() < 1e-34 {
                break;
            }
        }
        (s, c)
    }
}

impl Default for DoubleDouble {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self::new(v)
    }
}

impl From<DoubleDouble> for f64 {
    fn from(v: DoubleDouble) -> f64 {
        v.hi() + v.lo()
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, o: &Self) -> bool {
        self.hi() == o.hi() && self.lo() == o.lo()
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.0.partial_cmp(o.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DoubleDouble(self.0.add_accurate(o.0))
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        DoubleDouble(self.0.sub_accurate(o.0))
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DoubleDouble(self.0 * o.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        DoubleDouble(self.0 / o.0)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        self - (self / o).trunc() * o
    }
}

macro_rules! assign_ops {
    ($($tr:ident $f:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $f(&mut self, o: Self) {
                *self = *self $op o;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::new(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseFloatError;

    /// Decimal only; digits are accumulated exactly before one scaling.
    fn from_str_radix(src: &str, radix: u32) -> Result<Self, ParseFloatError> {
        let bad = || ParseFloatError { kind: num_traits::FloatErrorKind::Invalid };
        if radix != 10 {
            return Err(bad());
        }
        let s = src.trim();
        let (neg, s) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let mut acc = Self::zero();
        for ch in int.chars().chain(frac.chars()) {
            let d = ch.to_digit(10).ok_or_else(bad)?;
            acc = acc * Self::new(10.0) + Self::new(d as f64);
        }
        let e = exp - frac.len() as i32;
        let p = Self::new(10.0).int_pow(e.unsigned_abs() as u64);
        let v = if e >= 0 { acc * p } else { acc / p };
        Ok(if neg { -v } else { v })
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        i64::try_from(t.hi().to_i128()? + t.lo().to_i128()?).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(v: i64) -> Option<Self> {
        let hi = v as f64;
        Some(Self::from_parts(hi, (v as i128 - hi as i128) as f64))
    }
    fn from_u64(v: u64) -> Option<Self> {
        let hi = v as f64;
        Some(Self::from_parts(hi, (v as i128 - hi as i128) as f64))
    }
    fn from_f64(v: f64) -> Option<Self> {
        Some(Self::new(v))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Self::new)
    }
}

impl fmt::Display for DoubleDouble {
    /// With a precision, formats the rounded f64; otherwise 32 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.precision().is_some() || !self.is_finite() || self.is_zero() {
            return fmt::Display::fmt(&(self.hi() + self.lo()), f);
        }
        let mut v = self.abs();
        let mut e = v.hi().log10().floor() as i32;
        let p = Self::new(10.0).int_pow(e.unsigned_abs() as u64);
        v = if e >= 0 { v / p } else { v * p };
        if v >= Self::new(10.0) {
            v /= Self::new(10.0);
            e += 1;
        } else if v < Self::one() {
            v *= Self::new(10.0);
            e -= 1;
        }
        let mut digits = Vec::with_capacity(33);
        for _ in 0..33 {
            let d = v.hi().floor().clamp(0.0, 9.0);
            digits.push(d as u8);
            v = (v - Self::new(d)) * Self::new(10.0);
        }
        // Round half up on the 33rd digit and carry.
        let mut carry = digits.pop().unwrap() >= 5;
        for d in digits.iter_mut().rev() {
            if !carry {
                break;
            }
            *d = (*d + 1) % 10;
            carry = *d == 0;
        }
        if carry {
            digits.insert(0, 1);
            digits.pop();
            e += 1;
        }
        let mut text: String = digits.iter().map(|&d| char::from(b'0' + d)).collect();
        text.insert(1, '.');
        let sign = if self.is_sign_negative() { "-" } else { "" };
        write!(f, "{sign}{text}e{e}")
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        DoubleDouble(Quad::NAN)
    }
    fn infinity() -> Self {
        DoubleDouble(Quad::INFINITY)
    }
    fn neg_infinity() -> Self {
        DoubleDouble(Quad::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::new(-0.0)
    }
    fn min_value() -> Self {
        DoubleDouble(Quad::MIN)
    }
    fn min_positive_value() -> Self {
        DoubleDouble(Quad::MIN_POSITIVE)
    }
    fn epsilon() -> Self {
        DoubleDouble(Quad::EPSILON)
    }
    fn max_value() -> Self {
        DoubleDouble(Quad::MAX)
    }
    fn is_nan(self) -> bool {
        self.0.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi().is_infinite()
    }
    fn is_finite(self) -> bool {
        self.0.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi().is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi().classify()
    }
    fn floor(self) -> Self {
        let h = self.hi().floor();
        if h == self.hi() {
            Self::from_parts(h, self.lo().floor())
        } else {
            Self::new(h)
        }
    }
    fn ceil(self) -> Self {
        -(-self).floor()
    }
    fn round(self) -> Self {
        let t = (self.abs() + Self::new(0.5)).floor();
        if self.is_sign_negative() {
            -t
        } else {
            t
        }
    }
    fn trunc(self) -> Self {
        if self.is_sign_negative() {
            self.ceil()
        } else {
            self.floor()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::new(self.hi().signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi().is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi().is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let p = self.int_pow(n.unsigned_abs() as u64);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }
    fn powf(self, n: Self) -> Self {
        if n.fract().is_zero() && n.abs().hi() < 1e9 {
            return self.powi(n.hi() as i32 + n.lo() as i32);
        }
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        if self.hi() < 0.0 {
            return Self::nan();
        }
        DoubleDouble(self.0.sqrt())
    }
    fn exp(self) -> Self {
        DoubleDouble(self.0.exp())
    }
    fn exp2(self) -> Self {
        (self * Self::ln_2()).exp()
    }
    fn ln(self) -> Self {
        DoubleDouble(self.0.ln())
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.ln() / Self::ln_2()
    }
    fn log10(self) -> Self {
        self.ln() / Self::ln_10()
    }
    fn max(self, o: Self) -> Self {
        if self.is_nan() || o > self {
            o
        } else {
            self
        }
    }
    fn min(self, o: Self) -> Self {
        if self.is_nan() || o < self {
            o
        } else {
            self
        }
    }
    fn abs_sub(self, o: Self) -> Self {
        (self - o).max(Self::zero())
    }
    fn cbrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let y = Self::new(self.hi().cbrt());
        y - (y * y * y - self) / (Self::new(3.0) * y * y)
    }
    fn hypot(self, o: Self) -> Self {
        (self * self + o * o).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }
    fn asin(self) -> Self {
        self.atan2((Self::one() - self * self).sqrt())
    }
    fn acos(self) -> Self {
        (Self::one() - self * self).sqrt().atan2(self)
    }
    fn atan(self) -> Self {
        // One Newton step on tan from the f64 seed doubles the correct bits.
        let a = Self::new(self.hi().atan());
        let (s, c) = a.sin_cos();
        a + (self * c - s) * c
    }
    fn atan2(self, o: Self) -> Self {
        if o.is_zero() {
            return match self.hi().partial_cmp(&0.0) {
                Some(Ordering::Greater) => Self::frac_pi_2(),
                Some(Ordering::Less) => -Self::frac_pi_2(),
                _ => Self::zero(),
            };
        }
        let t = (self / o).atan();
        if o.hi() > 0.0 {
            t
        } else if self.hi() >= 0.0 {
            t + Self::pi()
        } else {
            t - Self::pi()
        }
    }
    fn sin_cos(self) -> (Self, Self) {
        let half_pi = Self::frac_pi_2();
        let q = (self / half_pi).round();
        let (s, c) = Self::sin_cos_reduced(self - q * half_pi);
        match q.rem_euclid_4() {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    fn exp_m1(self) -> Self {
        if self.hi().abs() < 1e-3 {
            let (mut term, mut sum) = (self, self);
            for j in 2..20 {
                term = term * self / Self::new(j as f64);
                sum += term;
            }
            sum
        } else {
            self.exp() - Self::one()
        }
    }
    fn ln_1p(self) -> Self {
        let u = Self::one() + self;
        if u == Self::one() {
            return self;
        }
        // ln(u) * self / (u - 1) cancels the rounding of u.
        u.ln() * self / (u - Self::one())
    }
    fn sinh(self) -> Self {
        let e = self.exp_m1();
        (e + e / (e + Self::one())) / Self::new(2.0)
    }
    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()) / Self::new(2.0)
    }
    fn tanh(self) -> Self {
        let e = (Self::new(2.0) * self).exp_m1();
        e / (e + Self::new(2.0))
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let r = (a + (a * a + Self::one()).sqrt()).ln();
        if self.is_sign_negative() {
            -r
        } else {
            r
        }
    }
    fn acosh(self) -> Self {
        (self + (self * self - Self::one()).sqrt()).ln()
    }
    fn atanh(self) -> Self {
        ((Self::one() + self) / (Self::one() - self)).ln() / Self::new(2.0)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi().integer_decode()
    }
}

impl DoubleDouble {
    fn rem_euclid_4(self) -> i64 {
        (self.to_i64().unwrap_or(0)).rem_euclid(4)
    }
}

impl FloatConst for DoubleDouble {
    fn E() -> Self {
        Self::one().exp()
    }
    fn FRAC_1_PI() -> Self {
        Self::pi().recip()
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self::new(0.5).sqrt()
    }
    fn FRAC_2_PI() -> Self {
        Self::new(2.0) / Self::pi()
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self::new(2.0) / Self::pi().sqrt()
    }
    fn FRAC_PI_2() -> Self {
        Self::pi() / Self::new(2.0)
    }
    fn FRAC_PI_3() -> Self {
        Self::pi() / Self::new(3.0)
    }
    fn FRAC_PI_4() -> Self {
        Self::pi() / Self::new(4.0)
    }
    fn FRAC_PI_6() -> Self {
        Self::pi() / Self::new(6.0)
    }
    fn FRAC_PI_8() -> Self {
        Self::pi() / Self::new(8.0)
    }
    fn LN_10() -> Self {
        DoubleDouble(Quad::LN_10)
    }
    fn LN_2() -> Self {
        DoubleDouble(Quad::LN_2)
    }
    fn LOG10_E() -> Self {
        DoubleDouble(Quad::FRAC_1_LN_10)
    }
    fn LOG2_E() -> Self {
        DoubleDouble(Quad::FRAC_1_LN_2)
    }
    fn PI() -> Self {
        Self::pi()
    }
    fn SQRT_2() -> Self {
        Self::new(2.0).sqrt()
    }
}

impl DoubleDouble {
    fn ln_2() -> Self {
        <Self as FloatConst>::LN_2()
    }
    fn ln_10() -> Self {
        <Self as FloatConst>::LN_10()
    }
    fn frac_pi_2() -> Self {
        <Self as FloatConst>::FRAC_PI_2()
    }
}
