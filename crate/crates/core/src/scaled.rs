//! Signed log-magnitude numbers: `value = sign * exp(log)`.

use crate::scalar::{Real, Weight};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug)]
pub struct Scaled<F> {
    sign: i8,
    log: F,
}

impl<F: Real> Scaled<F> {
    pub fn new(sign: i8, log: F) -> Self {
        if sign == 0 || log == F::neg_infinity() {
            Self::zero()
        } else {
            Scaled { sign: sign.signum(), log }
        }
    }

    pub fn from_log(log: F) -> Self {
        Self::new(1, log)
    }

    pub fn from_real(v: F) -> Self {
        if v > F::zero() {
            Scaled { sign: 1, log: v.ln() }
        } else if v < F::zero() {
            Scaled { sign: -1, log: (-v).ln() }
        } else {
            Self::zero()
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` at zero.
    pub fn log(&self) -> F {
        self.log
    }

    pub fn to_real(&self) -> F {
        match self.sign {
            0 => F::zero(),
            s => F::from_i8(s).unwrap() * self.log.exp(),
        }
    }

    pub fn abs(&self) -> Self {
        Scaled { sign: self.sign.abs(), log: self.log }
    }

    pub fn powi(&self, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let sign = if e % 2 == 0 { self.sign.abs() } else { self.sign };
        Self::new(sign, self.log * F::from_i32(e).unwrap())
    }

    /// `sum` anchored at the largest magnitude; exact for same-sign terms.
    pub fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let terms: Vec<Self> = terms.into_iter().filter(|t| t.sign != 0).collect();
        let Some(anchor) = terms.iter().map(|t| t.log).fold(None, |m: Option<F>, l| {
            Some(m.map_or(l, |m| m.max(l)))
        }) else {
            return Self::zero();
        };
        let acc = terms.iter().fold(F::zero(), |acc, t| {
            acc + F::from_i8(t.sign).unwrap() * (t.log - anchor).exp()
        });
        Self::from_real(acc).mul_exp(anchor)
    }

    fn mul_exp(self, l: F) -> Self {
        Self::new(self.sign, self.log + l)
    }
}

impl<F: Real> Zero for Scaled<F> {
    fn zero() -> Self {
        Scaled { sign: 0, log: F::neg_infinity() }
    }
    fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

impl<F: Real> One for Scaled<F> {
    fn one() -> Self {
        Scaled { sign: 1, log: F::zero() }
    }
}

impl<F: Real> PartialEq for Scaled<F> {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.log == other.log)
    }
}

impl<F: Real> PartialOrd for Scaled<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log.partial_cmp(&other.log),
                _ => other.log.partial_cmp(&self.log),
            },
            o => Some(o),
        }
    }
}

impl<F: Real> Add for Scaled<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log >= rhs.log { (self, rhs) } else { (rhs, self) };
        let r = (small.log - big.log).exp();
        if big.sign == small.sign {
            Scaled { sign: big.sign, log: big.log + r.ln_1p() }
        } else if r == F::one() {
            Self::zero()
        } else {
            Scaled { sign: big.sign, log: big.log + (-r).ln_1p() }
        }
    }
}

impl<F: Real> Neg for Scaled<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Scaled { sign: -self.sign, log: self.log }
    }
}

impl<F: Real> Sub for Scaled<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Real> Mul for Scaled<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.sign * rhs.sign, self.log + rhs.log)
    }
}

impl<F: Real> Div for Scaled<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division of scaled value by zero");
        Self::new(self.sign * rhs.sign, self.log - rhs.log)
    }
}

impl<F: Real> Weight for Scaled<F> {
    const FLOATING: bool = false;
    fn int(v: i64) -> Self {
        Self::from_real(<F as num_traits::FromPrimitive>::from_i64(v).unwrap())
    }
    fn from_lit(v: f64) -> Option<Self> {
        Some(Self::from_real(F::lit(v)))
    }
    fn ln_abs(&self) -> f64 {
        self.log.f64()
    }
    fn signum_i8(&self) -> i8 {
        self.sign
    }
    fn approx(&self) -> f64 {
        self.to_real().f64()
    }
    fn scale_exp(&self, s: f64) -> Self {
        self.mul_exp(F::lit(s))
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    sign: i8,
    log: Option<f64>,
}

impl<F: Real> Serialize for Scaled<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let log = if self.sign == 0 { None } else { Some(self.log.f64()) };
        Wire { sign: self.sign, log }.serialize(s)
    }
}

impl<'de, F: Real> Deserialize<'de> for Scaled<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        Ok(match w.log {
            Some(l) => Self::new(w.sign, F::lit(l)),
            None => Self::zero(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = Scaled<f64>;

    #[test]
    fn arithmetic_matches_reals() {
        let vals = [-3.5, -1.0, -0.25, 0.0, 0.5, 2.0, 7.0];
        for &a in &vals {
            for &b in &vals {
                let (sa, sb) = (S::from_real(a), S::from_real(b));
                assert!(((sa + sb).to_real() - (a + b)).abs() < 1e-12);
                assert!(((sa - sb).to_real() - (a - b)).abs() < 1e-12);
                assert!(((sa * sb).to_real() - a * b).abs() < 1e-12);
                if b != 0.0 {
                    assert!(((sa / sb).to_real() - a / b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn survives_far_below_underflow() {
        let a = S::from_log(-5000.0);
        let b = S::from_log(-5000.0 + 2f64.ln());
        assert!(((a + a).log() - b.log()).abs() < 1e-12);
        assert!((a - a).is_zero());
    }

    #[test]
    fn sum_is_order_free() {
        let t = [S::from_log(-900.0), S::from_log(-901.0), -S::from_log(-902.0)];
        let direct = t[0] + t[1] + t[2];
        assert!((S::sum(t).log() - direct.log()).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let v = S::new(-1, 2.5);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"sign":-1,"log":2.5}"#);
        let z: S = serde_json::from_str(r#"{"sign":0,"log":null}"#).unwrap();
        assert!(z.is_zero());
    }
}
