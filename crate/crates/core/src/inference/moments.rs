//! Dual coordinates `η = ∂ψ/∂ξ` and the Fisher metric `g = ∂²ψ/∂ξ∂ξ`.

use crate::error::{domain, Error, Result};
use crate::partition::ProblemSpec;
use crate::pfaffian::{invert_upper, p_tilde};
use crate::recurrence::z_table;
use crate::scalar::Weight;
use crate::scaled::Scaled;
use crate::DoubleDouble;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Relative disagreement tolerated between the two metric formulas.
const METRIC_CHECK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub eta: Vec<f64>,
    pub g: Vec<Vec<f64>>,
}

fn check_spec(spec: &ProblemSpec, len: usize) -> Result<()> {
    if spec.is_restricted() {
        return domain("the moment map is defined on the unrestricted support");
    }
    if len != spec.len() {
        return domain(format!("expected {} indeterminates, got {len}", spec.len()));
    }
    Ok(())
}

/// `η_i = x_i Z_{n-i,k-1}/Z` and
/// `g_ij = x_i x_j Z_{n-i-j,k-2}/Z - η_i η_j + η_i δ_ij` from one table.
pub fn moment_map_in<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<(Vec<W>, Vec<Vec<W>>)> {
    check_spec(spec, x.len())?;
    let (n, k, len) = (spec.n, spec.k, spec.len());
    let t = z_table(x, k, spec.d());
    let z = t.get(n, k);
    if z.is_zero() {
        return domain("Z vanishes at these indeterminates");
    }
    let eta: Vec<W> = (1..=len).map(|i| x[i - 1].clone() * t.get(n - i, k - 1) / z.clone()).collect();
    let mut g = vec![vec![W::zero(); len]; len];
    for i in 1..=len {
        for j in i..=len {
            let mut v = -(eta[i - 1].clone() * eta[j - 1].clone());
            if k >= 2 && i + j <= n - k + 2 {
                v = v + x[i - 1].clone() * x[j - 1].clone() * t.get(n - i - j, k - 2) / z.clone();
            }
            if i == j {
                v = v + eta[i - 1].clone();
            }
            g[i - 1][j - 1] = v.clone();
            g[j - 1][i - 1] = v;
        }
    }
    Ok((eta, g))
}

/// Block `i, j ≥ 3` of `g` from `g_ij = Σ_l (P̃_i^{-1})_{j-2,l} η_{l+i+1} 1{i+j ≤ n-k+2} - η_i η_j + η_i δ_ij`.
///
/// Entry `[a][b]` holds `g_{a+3, b+3}`.
pub fn pfaffian_metric<W: Weight>(spec: &ProblemSpec, x: &[W], eta: &[W]) -> Result<Vec<Vec<W>>> {
    check_spec(spec, x.len())?;
    let (n, k, d) = (spec.n, spec.k, spec.d());
    if d < 2 {
        return Ok(Vec::new());
    }
    let size = d - 1;
    let mut g = vec![vec![W::zero(); size]; size];
    for i in 3..=d + 1 {
        let inv = if i < d { invert_upper(&p_tilde(n, k, i, x)?)? } else { Vec::new() };
        for j in 3..=d + 1 {
            let mut v = -(eta[i - 1].clone() * eta[j - 1].clone());
            if i + j <= d + 2 {
                v = (1..=d - i).fold(v, |acc, l| acc + inv[j - 3][l - 1].clone() * eta[l + i].clone());
            }
            if i == j {
                v = v + eta[i - 1].clone();
            }
            g[i - 3][j - 3] = v;
        }
    }
    Ok(g)
}

pub(crate) fn to_scaled(x: &[f64]) -> Result<Vec<Scaled<f64>>> {
    if x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return domain("indeterminates must be finite and strictly positive");
    }
    Ok(x.iter().map(|&v| Scaled::from_real(v)).collect())
}

/// Moment map in log-scaled arithmetic, without the Pfaffian cross-check.
pub(crate) fn moments_unchecked(spec: &ProblemSpec, x: &[f64]) -> Result<MomentState> {
    let xs = to_scaled(x)?;
    let (eta, g) = moment_map_in(spec, &xs)?;
    Ok(MomentState {
        eta: eta.iter().map(Scaled::to_real).collect(),
        g: g.iter().map(|r| r.iter().map(Scaled::to_real).collect()).collect(),
    })
}

/// Largest `n-k` for which a failed double-double check is settled in exact arithmetic.
const EXACT_CHECK_MAX_D: usize = 64;

/// First entry where the Pfaffian metric and the direct metric differ by more than `tol`.
fn metric_mismatch<W: Weight>(alt: &[Vec<W>], g: &[Vec<W>], tol: f64, real: impl Fn(&W) -> f64) -> Option<(usize, usize, f64)> {
    for (a, row) in alt.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let diff = (real(v) - real(&g[a + 2][b + 2])).abs();
            if !(diff <= tol) {
                return Some((a + 3, b + 3, diff));
            }
        }
    }
    None
}

/// `η` and `g` at strictly positive `x`; the metric is recomputed through the
/// Pfaffian system and the two must agree.
///
/// Both run in double-double. Inverting `P̃_i` can cancel more digits than that
/// carries, so a failed check on a small shape is repeated exactly.
pub fn moment_map(spec: &ProblemSpec, x: &[f64]) -> Result<MomentState> {
    to_scaled(x)?;
    let xs: Vec<Scaled<DoubleDouble>> = x.iter().map(|&v| Scaled::from_real(DoubleDouble::from(v))).collect();
    let (eta, g) = moment_map_in(spec, &xs)?;
    let alt = pfaffian_metric(spec, &xs, &eta)?;
    let real = |v: &Scaled<DoubleDouble>| f64::from(v.to_real());
    let scale = eta.iter().map(|v| real(v).abs()).fold(0.0, f64::max);
    if let Some((a, b, diff)) = metric_mismatch(&alt, &g, METRIC_CHECK_TOL * scale.max(1.0), real) {
        let exact_ok = spec.d() <= EXACT_CHECK_MAX_D && {
            let xr: Vec<BigRational> = x.iter().filter_map(|&v| BigRational::from_float(v)).collect();
            let (eta_r, g_r) = moment_map_in(spec, &xr)?;
            let alt_r = pfaffian_metric(spec, &xr, &eta_r)?;
            alt_r.iter().enumerate().all(|(a, row)| row.iter().enumerate().all(|(b, v)| *v == g_r[a + 2][b + 2]))
        };
        if !exact_ok {
            return Err(Error::Numeric(format!("Pfaffian metric disagrees at ({a}, {b}): {diff:e}")));
        }
    }
    Ok(MomentState {
        eta: eta.iter().map(real).collect(),
        g: g.iter().map(|r| r.iter().map(real).collect()).collect(),
    })
}
