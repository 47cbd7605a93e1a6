//! Mittag-Leffler density `g_α(u)`, `0 < α < 1`.
//!
//! The alternating series is summed in the caller's scalar. When its partial sums
//! cancel beyond what that scalar can carry, the Kanter integral takes over.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use std::f64::consts::PI;

pub const SERIES_MAX_TERMS: usize = 500;
pub const SERIES_REL_TOL: f64 = 1e-15;

/// Digits the series may cancel before its sum is declared untrustworthy.
fn max_cancellation<F: Real>() -> f64 {
    (SERIES_REL_TOL / F::epsilon().f64()).max(1.0)
}

const BERNOULLI: [(f64, f64); 14] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
];

/// `ln Γ(z)`, `z > 0`, to the working precision of `F`: upward shift then Stirling.
pub fn ln_gamma<F: Real>(z: F) -> F {
    let shift_to = F::lit(35.0);
    let (mut z, mut prod) = (z, F::one());
    while z < shift_to {
        prod = prod * z;
        z = z + F::one();
    }
    let half = F::lit(0.5);
    let mut s = (z - half) * z.ln() - z + half * (F::lit(2.0) * F::PI()).ln();
    let z2 = z * z;
    let mut zp = z;
    for (j, &(num, den)) in BERNOULLI.iter().enumerate() {
        let k2 = F::of(2 * (j + 1));
        s = s + F::lit(num) / F::lit(den) / (k2 * (k2 - F::one()) * zp);
        zp = zp * z2;
    }
    s - prod.ln()
}

/// `g_α(u)` by its alternating series; errors when it does not converge or cancels too much.
pub fn mittag_leffler_series<F: Real>(alpha: F, u: F) -> Result<F> {
    check(alpha.f64(), u.f64())?;
    if u.is_zero() {
        return Ok((-ln_gamma(F::one() - alpha)).exp());
    }
    let lu = u.ln();
    let (mut sum, mut peak, mut quiet) = (F::zero(), F::zero(), 0);
    for i in 1..=SERIES_MAX_TERMS {
        let fi = F::of(i);
        let s = (F::PI() * alpha * fi).sin();
        let mag = (F::of(i - 1) * lu - ln_gamma(fi + F::one()) + ln_gamma(alpha * fi + F::one())).exp();
        let term = if i % 2 == 1 { mag * s } else { -mag * s };
        sum = sum + term;
        peak = peak.max(term.abs());
        if term.abs() < F::lit(SERIES_REL_TOL) * sum.abs() {
            quiet += 1;
            if quiet == 3 {
                if (peak / sum.abs()).f64() > max_cancellation::<F>() {
                    return Err(Error::SeriesTruncation(format!(
                        "partial sums cancel by {:.1} digits at u={}",
                        (peak / sum.abs()).f64().log10(),
                        u.f64()
                    )));
                }
                return Ok(sum / (F::PI() * alpha));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesTruncation(format!("no convergence in {SERIES_MAX_TERMS} terms at u={}", u.f64())))
}

/// `ln A(φ)`, `A = [sin(αφ)^α sin((1-α)φ)^{1-α} / sin φ]^{1/(1-α)}`; increasing on `(0, π)`
/// from `A(0) = α^{α/(1-α)} (1-α)`.
fn kanter_ln_a(alpha: f64, phi: f64) -> f64 {
    let b = 1.0 - alpha;
    if phi < 1e-6 {
        return alpha * alpha.ln() / b + b.ln();
    }
    (alpha * (alpha * phi).sin().ln() + b * (b * phi).sin().ln() - phi.sin().ln()) / b
}

/// `ln g_α(u)` from `g = u^{α/(1-α)} / (π(1-α)) ∫_0^π A e^{-A u^{1/(1-α)}} dφ`.
pub fn mittag_leffler_log_integral(alpha: f64, u: f64) -> Result<f64> {
    check(alpha, u)?;
    let b = 1.0 - alpha;
    let v = u.powf(1.0 / b);
    // The exponent ln A - A v peaks at A = 1/v or at the left end.
    let a0 = kanter_ln_a(alpha, 0.0).exp();
    let peak = if a0 * v >= 1.0 { a0.ln() - a0 * v } else { -v.ln() - 1.0 };
    let f = |phi: f64| {
        let la = kanter_ln_a(alpha, phi);
        (la - la.exp() * v - peak).exp()
    };
    let out = quadrature::integrate(f, 0.0, PI, 1e-14);
    if !(out.integral > 0.0) || !out.integral.is_finite() {
        return Err(Error::Numeric(format!("Kanter integral failed at alpha={alpha}, u={u}")));
    }
    Ok(alpha / b * u.ln() - (PI * b).ln() + peak + out.integral.ln())
}

/// `ln g_α(u)`: the series in `F`, else the integral.
pub fn mittag_leffler_log_density<F: Real>(alpha: f64, u: f64) -> Result<f64> {
    match mittag_leffler_series(F::lit(alpha), F::lit(u)) {
        Ok(g) if g > F::zero() => Ok(g.ln().f64()),
        Ok(_) | Err(Error::SeriesTruncation(_)) => mittag_leffler_log_integral(alpha, u),
        Err(e) => Err(e),
    }
}

fn check(alpha: f64, u: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Mittag-Leffler density needs 0 < alpha < 1, got {alpha}"));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return domain(format!("Mittag-Leffler density needs u >= 0, got {u}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DoubleDouble;
    use num_traits::{Float, FloatConst};

    fn half_closed(u: f64) -> f64 {
        (-u * u / 4.0).exp() / PI.sqrt()
    }

    #[test]
    fn ln_gamma_matches_known_values() {
        assert!((ln_gamma(5.0f64) - 24f64.ln()).abs() < 1e-12);
        let h = ln_gamma(DoubleDouble::new(0.5));
        let want = DoubleDouble::PI().sqrt().ln();
        assert!(((h - want).abs()).f64() < 1e-30, "{h}");
        let big = ln_gamma(DoubleDouble::new(101.0));
        assert!((big.f64() - libm::lgamma(101.0)).abs() < 1e-12);
    }

    #[test]
    fn series_and_integral_match_half_closed_form() {
        for u in [0.1, 0.5, 1.0, 2.0, 3.1622776601683795, 5.0] {
            let s = mittag_leffler_series(DoubleDouble::new(0.5), DoubleDouble::new(u)).unwrap().f64();
            assert!((s / half_closed(u) - 1.0).abs() < 1e-12, "series u={u}: {s}");
            let i = mittag_leffler_log_integral(0.5, u).unwrap();
            assert!((i - half_closed(u).ln()).abs() < 1e-9, "integral u={u}: {i}");
        }
    }

    #[test]
    fn paths_agree_off_the_closed_form() {
        for alpha in [0.2, 0.35, 0.7] {
            for u in [0.3, 1.0, 2.0] {
                let s = mittag_leffler_series(DoubleDouble::new(alpha), DoubleDouble::new(u)).unwrap().f64().ln();
                let i = mittag_leffler_log_integral(alpha, u).unwrap();
                assert!((s - i).abs() < 1e-8, "alpha={alpha} u={u}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn heavy_cancellation_is_reported_and_falls_back() {
        let u = 400.0 / 800f64.sqrt();
        assert!(matches!(
            mittag_leffler_series(DoubleDouble::new(0.5), DoubleDouble::new(u)),
            Err(Error::SeriesTruncation(_))
        ));
        let g = mittag_leffler_log_density::<DoubleDouble>(0.5, u).unwrap();
        assert!((g - (-u * u / 4.0 - 0.5 * PI.ln())).abs() < 1e-9);
    }

    #[test]
    fn density_integrates_to_one() {
        let out = quadrature::integrate(|u| mittag_leffler_log_integral(0.5, u).unwrap().exp(), 0.0, 12.0, 1e-12);
        assert!((out.integral - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(mittag_leffler_log_integral(1.0, 1.0).unwrap_err().is_domain());
        assert!(mittag_leffler_series(0.5f64, -1.0).unwrap_err().is_domain());
    }
}
