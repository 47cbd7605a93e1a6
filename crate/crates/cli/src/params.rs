//! Indeterminate families selected by `--param` and their exact rational forms.

use crate::error::CliError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rnc_core::gfc::gfc_x;
use rnc_core::partition::SpecialPoint;
use rnc_core::DoubleDouble;

#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Gfc { alpha: f64, text: String },
    Ones,
    Inv,
    InvFactorial,
    /// Explicit values, kept as decimal text so the rational form is exact.
    Values(Vec<String>),
}

impl Param {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if let Some(a) = s.strip_prefix("gfc:") {
            let alpha: f64 = a.parse().map_err(|_| CliError::domain(format!("bad GFC parameter '{a}'")))?;
            if !alpha.is_finite() {
                return Err(CliError::domain("the GFC parameter must be finite"));
            }
            return Ok(Param::Gfc { alpha, text: a.to_string() });
        }
        if let Some(path) = s.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::domain(format!("cannot read '{path}': {e}")))?;
            return Param::from_json(&text);
        }
        match s {
            "ones" => Ok(Param::Ones),
            "inv" => Ok(Param::Inv),
            "inv-factorial" => Ok(Param::InvFactorial),
            _ => Err(CliError::domain(format!("unknown parameter family '{s}'"))),
        }
    }

    fn from_json(text: &str) -> Result<Self, CliError> {
        let v: Vec<serde_json::Number> =
            serde_json::from_str(text).map_err(|e| CliError::domain(format!("parameter file: {e}")))?;
        Ok(Param::Values(v.iter().map(|n| n.to_string()).collect()))
    }

    /// The special point with a closed form, if any.
    pub fn special(&self) -> Option<SpecialPoint> {
        match self {
            Param::Ones => Some(SpecialPoint::Ones),
            Param::Inv => Some(SpecialPoint::Inv),
            Param::InvFactorial => Some(SpecialPoint::InvFactorial),
            Param::Gfc { alpha, .. } if *alpha == -1.0 || *alpha == 0.5 => Some(SpecialPoint::Gfc(*alpha)),
            _ => None,
        }
    }

    pub fn x_f64(&self, len: usize) -> Result<Vec<f64>, CliError> {
        match self {
            Param::Gfc { alpha, .. } => Ok(gfc_x(*alpha, len)),
            Param::Values(v) => {
                check_len(v.len(), len)?;
                v.iter().map(|t| t.parse::<f64>().map_err(|_| CliError::domain(format!("bad value '{t}'")))).collect()
            }
            other => Ok(other.special().expect("closed-form family").x(len)),
        }
    }

    pub fn x_dd(&self, len: usize) -> Result<Vec<DoubleDouble>, CliError> {
        match self {
            Param::Gfc { alpha, .. } => Ok(gfc_x(DoubleDouble::from(*alpha), len)),
            _ => Ok(self.x_rational(len)?.iter().map(rational_to_dd).collect()),
        }
    }

    pub fn x_rational(&self, len: usize) -> Result<Vec<BigRational>, CliError> {
        let one = BigRational::one();
        Ok(match self {
            Param::Ones => vec![one; len],
            Param::Inv => (1..=len).map(|i| BigRational::new(1.into(), BigInt::from(i))).collect(),
            Param::InvFactorial => {
                let mut f = BigInt::one();
                (1..=len)
                    .map(|i| {
                        f *= BigInt::from(i);
                        BigRational::new(1.into(), f.clone())
                    })
                    .collect()
            }
            Param::Gfc { text, .. } => {
                // x_i = (1-α)_{i-1} / i!
                let a = decimal(text)?;
                let mut out = Vec::with_capacity(len);
                let mut v = one.clone();
                for i in 1..=len {
                    if i > 1 {
                        v *= one.clone() - a.clone() + BigRational::from_integer(BigInt::from(i - 2));
                    }
                    v /= BigRational::from_integer(BigInt::from(i));
                    out.push(v.clone());
                }
                out
            }
            Param::Values(v) => {
                check_len(v.len(), len)?;
                v.iter().map(|t| decimal(t)).collect::<Result<_, _>>()?
            }
        })
    }
}

fn check_len(got: usize, want: usize) -> Result<(), CliError> {
    if got != want {
        return Err(CliError::domain(format!("expected {want} indeterminates, got {got}")));
    }
    Ok(())
}

/// Exact value of a decimal literal such as `-0.25` or `1.5e-3`.
pub fn decimal(text: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::domain(format!("bad decimal '{text}'"));
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * scale)
    } else {
        BigRational::new(num, scale)
    })
}

fn rational_to_dd(r: &BigRational) -> DoubleDouble {
    if r.is_zero() {
        return DoubleDouble::from(0.0);
    }
    let hi = r.to_f64().unwrap_or(f64::NAN);
    let rest = r - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
    DoubleDouble::from_parts(hi, rest.to_f64().unwrap_or(0.0))
}
