use super::ProblemSpec;
use crate::error::{domain, Result};
use crate::scaled::Scaled;
use crate::ScaledValue;
use serde::{Deserialize, Serialize};

/// Indeterminate choices with closed-form or triangle-recurrence values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialPoint {
    /// `x_i = 1`.
    Ones,
    /// `x_i = (1/2)_{i-1} / i!`.
    HalfRising,
    /// `x_i = 1/i`.
    Inv,
    /// `x_i = 1/i!`.
    InvFactorial,
    /// `x_i = (1-α)_{i-1} / i!`, closed form only at α = -1 and α = 1/2.
    Gfc(f64),
}

impl SpecialPoint {
    /// The indeterminates `x_1..x_len`.
    pub fn x(&self, len: usize) -> Vec<f64> {
        match *self {
            SpecialPoint::Ones => vec![1.0; len],
            SpecialPoint::HalfRising => crate::gfc::gfc_x(0.5, len),
            SpecialPoint::Inv => (1..=len).map(|i| 1.0 / i as f64).collect(),
            SpecialPoint::InvFactorial => (1..=len).map(|i| (-ln_fact(i)).exp()).collect(),
            SpecialPoint::Gfc(a) => crate::gfc::gfc_x(a, len),
        }
    }
}

pub(crate) fn ln_fact(m: usize) -> f64 {
    libm::lgamma(m as f64 + 1.0)
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_fact(n) - ln_fact(k) - ln_fact(n - k)
}

/// `Z_{n,k}` at a special point.
pub fn special_value(point: SpecialPoint, spec: &ProblemSpec) -> Result<ScaledValue> {
    if spec.is_restricted() {
        return domain("special values are defined for the unrestricted support only");
    }
    let (n, k) = (spec.n, spec.k);
    let log = match point {
        SpecialPoint::Ones | SpecialPoint::Gfc(-1.0) => ln_binom(n - 1, k - 1) - ln_fact(k),
        SpecialPoint::HalfRising | SpecialPoint::Gfc(0.5) => {
            ln_fact(2 * n - k - 1)
                - 2.0 * (n - k) as f64 * std::f64::consts::LN_2
                - ln_fact(n)
                - ln_fact(n - k)
                - ln_fact(k - 1)
        }
        SpecialPoint::Inv => return Ok(stirling_scaled(n, k, |m, _| (m - 1) as f64)),
        SpecialPoint::InvFactorial => return Ok(stirling_scaled(n, k, |_, j| j as f64)),
        SpecialPoint::Gfc(a) => return domain(format!("no closed form at alpha={a}")),
    };
    Ok(Scaled::from_log(log))
}

/// `T(m,j) = (c(m,j) T(m-1,j) + T(m-1,j-1)) / m`, the Stirling triangles over `m!`.
fn stirling_scaled(n: usize, k: usize, c: impl Fn(usize, usize) -> f64) -> ScaledValue {
    let mut row = vec![ScaledValue::from_log(0.0)];
    row.resize(k + 1, Scaled::new(0, 0.0));
    for m in 1..=n {
        let mut next = vec![Scaled::new(0, 0.0); k + 1];
        let lm = (m as f64).ln();
        for j in 1..=k.min(m) {
            let stay = if c(m, j) > 0.0 { row[j] * Scaled::from_real(c(m, j)) } else { Scaled::new(0, 0.0) };
            let v = stay + row[j - 1];
            next[j] = Scaled::new(v.sign(), v.log() - lm);
        }
        row = next;
    }
    row[k]
}
