//! Unconditional log-affine fit at fixed odds and the Gaussian approximation of `Z`.

use crate::error::{domain, Error, Result};
use crate::partition::ProblemSpec;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const IPS_TOL: f64 = 1e-12;
pub const IPS_MAX_ITER: usize = 100_000;

/// `m = x(θ̂)` with `Am = b` and odds of `m` equal to `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogAffineFit {
    pub m: Vec<f64>,
    /// `θ̂_1` multiplies the row `(0, 1, …, n-k)`, `θ̂_2` the row of ones.
    pub theta: [f64; 2],
    pub y: Vec<f64>,
    pub iterations: usize,
}

/// Row `i` of the Gale matrix: `i e_1 - (i+1) e_2 + e_{i+2}`.
pub fn gale_matrix(len: usize) -> DMatrix<f64> {
    let r = len.saturating_sub(2);
    DMatrix::from_fn(r, len, |i, j| match j {
        0 => (i + 1) as f64,
        1 => -((i + 2) as f64),
        _ if j == i + 2 => 1.0,
        _ => 0.0,
    })
}

/// `Āᵀ(ĀĀᵀ)⁻¹ log y`, the odds component of `log x(θ)`.
fn odds_component(y: &[f64]) -> Result<Vec<f64>> {
    let g = gale_matrix(y.len() + 2);
    let ly = DVector::from_iterator(y.len(), y.iter().map(|v| v.ln()));
    let z = (&g * g.transpose())
        .cholesky()
        .ok_or_else(|| Error::Singular("Gale Gram matrix".into()))?
        .solve(&ly);
    Ok((g.transpose() * z).iter().copied().collect())
}

fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    m + v.map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Solves `A x(θ) = b`. The ones row is matched in closed form at each step;
/// the degree row is a monotone 1-D equation in `θ_1` solved by safeguarded Newton.
pub fn ips_fit(spec: &ProblemSpec, y: &[f64]) -> Result<LogAffineFit> {
    let len = spec.len();
    if spec.is_restricted() || len < 3 {
        return domain("IPS needs an unrestricted spec with n >= k+2");
    }
    if y.len() != len - 2 {
        return domain(format!("expected {} odds ratios, got {}", len - 2, y.len()));
    }
    if y.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return domain("odds ratios must be strictly positive");
    }
    let c = odds_component(y)?;
    let (k, d) = (spec.k as f64, spec.d() as f64);
    let target = d / k;
    let logs = |t1: f64| c.iter().enumerate().map(move |(i, ci)| ci + t1 * i as f64).collect::<Vec<_>>();
    // Mean and variance of the degree under weights exp(c_i + θ_1 i).
    let moments = |t1: f64| {
        let l = logs(t1);
        let z = log_sum_exp(l.iter().copied());
        let p: Vec<f64> = l.iter().map(|v| (v - z).exp()).collect();
        let mean: f64 = p.iter().enumerate().map(|(i, w)| i as f64 * w).sum();
        let var: f64 = p.iter().enumerate().map(|(i, w)| (i as f64 - mean).powi(2) * w).sum();
        (mean, var, z)
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while moments(lo).0 > target {
        lo *= 2.0;
    }
    while moments(hi).0 < target {
        hi *= 2.0;
    }
    let mut t1 = 0.0f64.clamp(lo, hi);
    let mut resid = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=IPS_MAX_ITER {
        iterations = it;
        let (mean, var, z) = moments(t1);
        let t2 = k.ln() - z;
        let m: Vec<f64> = logs(t1).iter().map(|v| (v + t2).exp()).collect();
        let r1 = (m.iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() - d).abs() / d.max(1.0);
        let r2 = (m.iter().sum::<f64>() - k).abs() / k.max(1.0);
        resid = r1.max(r2);
        if resid < IPS_TOL {
            return Ok(LogAffineFit { m, theta: [t1, t2], y: y.to_vec(), iterations: it });
        }
        if mean < target {
            lo = t1;
        } else {
            hi = t1;
        }
        let step = t1 - (mean - target) / var;
        t1 = if var > 0.0 && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < f64::EPSILON * t1.abs().max(1.0) && it > 200 {
            break;
        }
    }
    Err(Error::IterationLimit { iterations, residual: resid })
}

/// Exponent of `(2πγ)`: `n-k-1`, which matches the reference values at `α = -1`, base `(4, 2)`.
pub fn gaussian_exponent(base: &ProblemSpec) -> f64 {
    (base.d() as f64) - 1.0
}

/// `log Z_{γn,γk}(x)` from the base shape `(n, k)`; `x` has the base length.
pub fn gaussian_approx_log_z_base(base: &ProblemSpec, x: &[f64], gamma: f64) -> Result<f64> {
    base.check_len(x)?;
    if !(gamma > 0.0) {
        return domain("gamma must be positive");
    }
    if x.iter().any(|v| !(*v > 0.0)) {
        return domain("Gaussian approximation needs strictly positive indeterminates");
    }
    let y = crate::partition::odds_from_x(x)?;
    let fit = ips_fit(base, &y)?;
    let m = &fit.m;
    let main: f64 = m
        .iter()
        .zip(x)
        .map(|(mi, xi)| gamma * mi * xi.ln() - libm::lgamma(gamma * mi + 1.0))
        .sum();
    let g = gale_matrix(m.len());
    let minv = DMatrix::from_diagonal(&DVector::from_iterator(m.len(), m.iter().map(|v| 1.0 / v)));
    let det = (&g * minv * g.transpose()).determinant();
    if !(det > 0.0) {
        return Err(Error::Singular("Gale-weighted covariance is not positive definite".into()));
    }
    Ok(main + gaussian_exponent(base) * (2.0 * std::f64::consts::PI * gamma).ln() - 0.5 * det.ln())
}

/// `log Z_{N,K}(x)` for the target `(N, K) = γ (n, k)`; the first `n-k+1` indeterminates enter.
pub fn gaussian_approx_log_z(target: &ProblemSpec, x: &[f64], gamma: usize) -> Result<f64> {
    target.check_len(x)?;
    if gamma == 0 || !target.n.is_multiple_of(gamma) || !target.k.is_multiple_of(gamma) {
        return domain(format!("gamma={gamma} must divide n={} and k={}", target.n, target.k));
    }
    let base = ProblemSpec::new(target.n / gamma, target.k / gamma)?;
    gaussian_approx_log_z_base(&base, &x[..base.len()], gamma as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_for_n_equals_k_plus_two() {
        for y1 in [0.1, 1.0, 10.0] {
            for n in [4usize, 7, 12] {
                let spec = ProblemSpec::new(n, n - 2).unwrap();
                let fit = ips_fit(&spec, &[y1]).unwrap();
                let t2 = (2.0 * y1.powf(1.0 / 3.0) / (1.0 + 2.0 * y1.sqrt())).ln();
                if n == 4 {
                    assert!(fit.theta[0].abs() < 1e-10 && (fit.theta[1] - t2).abs() < 1e-10, "{:?}", fit.theta);
                    let m2 = 2.0 / (1.0 + 2.0 * y1.sqrt());
                    let expect = [y1.sqrt() * m2, m2, y1.sqrt() * m2];
                    assert!(fit.m.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-10));
                }
                assert!((fit.m[0] * fit.m[2] / (fit.m[1] * fit.m[1]) - y1).abs() < 1e-10 * y1);
            }
        }
    }

    #[test]
    fn unit_odds_at_base_four_two_by_bisection() {
        // m1 = m3 = t, m2 = 2 - 2t, unit odds t^2 = m2^2.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let t = 0.5 * (lo + hi);
            if t * t - (2.0 - 2.0 * t).powi(2) < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
        }
        let fit = ips_fit(&ProblemSpec::new(4, 2).unwrap(), &[1.0]).unwrap();
        assert!((fit.m[0] - lo).abs() < 1e-12 && (fit.m[2] - lo).abs() < 1e-12);
        assert!((fit.m.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!((fit.m[1] + 2.0 * fit.m[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_minus_one_values() {
        let x = crate::gfc::gfc_x(-1.0, 3);
        for (g, expect) in [(10.0, -20.5405), (25.0, -93.7043), (100.0, -643.657), (200.0, -1561.20)] {
            let v = gaussian_approx_log_z_base(&ProblemSpec::new(4, 2).unwrap(), &x, g).unwrap();
            assert!((v - expect).abs() < 0.01, "gamma={g}: {v}");
        }
    }

    #[test]
    fn target_and_base_forms_agree() {
        let t = ProblemSpec::new(40, 20).unwrap();
        let x = crate::gfc::gfc_x(0.5, t.len());
        let a = gaussian_approx_log_z(&t, &x, 10).unwrap();
        let b = gaussian_approx_log_z_base(&ProblemSpec::new(4, 2).unwrap(), &x[..3], 10.0).unwrap();
        assert_eq!(a, b);
        assert!(gaussian_approx_log_z(&t, &x, 3).is_err());
    }

    #[test]
    fn rejects_bad_odds() {
        let s = ProblemSpec::new(6, 2).unwrap();
        assert!(ips_fit(&s, &[1.0, 0.0, 1.0]).is_err());
        assert!(ips_fit(&s, &[1.0]).is_err());
    }
}
