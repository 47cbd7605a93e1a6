//! One-parameter curved families: the generalised-factorial-coefficient curve
//! and the Dirichlet-multinomial mixture over the number of blocks.
//!
//! Both estimators look for a `+ → -` sign change of the score, which is a
//! local maximum of the likelihood.

use super::full::{check_sbar, MleReport, MleStatus};
use super::moments::{moments_unchecked, to_scaled};
use crate::error::{domain, Result};
use crate::gfc::{gfc_tangent, gfc_x};
use crate::partition::ProblemSpec;
use crate::recurrence::{recurrence_z_scaled, z_table};
use crate::scalar::Weight;
use crate::scaled::Scaled;
use serde::{Deserialize, Serialize};

/// Left end of the primary bracket, a proxy for `α → -∞`.
pub const CURVED_LEFT: f64 = -50.0;
/// Right end of the GFC bracket; the model degenerates at `α = 1`.
pub const CURVED_RIGHT: f64 = 1.0 - 1e-8;
const GRID: usize = 240;
/// The bracket is widened by doubling up to this bound before giving up.
const FAR_LEFT: f64 = -1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurvedModel {
    /// `x_i = (1-α)_{i-1}/i!`, `α < 1`.
    Gfc,
    /// `x_i = (-α)_i/i!` with weights `[m]_k` over `k`, `α < 0`.
    DirichletMultinomial { m: u64 },
}

/// `(-α)_i/i!` for `i = 1..len`.
fn dm_x(alpha: f64, len: usize) -> Vec<f64> {
    let mut v = 1.0;
    (1..=len)
        .map(|i| {
            v *= (i as f64 - 1.0 - alpha) / i as f64;
            v
        })
        .collect()
}

/// `∂_α ln (-α)_i = Σ_{j=0}^{i-1} 1/(α-j)`.
fn dm_tangent(alpha: f64, len: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (0..len)
        .map(|j| {
            acc += 1.0 / (alpha - j as f64);
            acc
        })
        .collect()
}

/// `ln Σ_k [m]_k Z_{n,k} = ln((-mα)_n / n!)`.
pub fn dm_log_normalizer(n: usize, m: u64, alpha: f64) -> f64 {
    (0..n).map(|j| ((j as f64 - m as f64 * alpha) / (j + 1) as f64).ln()).sum()
}

/// `E[S_i]` under the Dirichlet-multinomial law on partitions of `n`.
pub fn dm_moments(n: usize, m: u64, alpha: f64) -> Result<Vec<f64>> {
    if n == 0 || m == 0 || !(alpha < 0.0) {
        return domain("Dirichlet-multinomial needs n >= 1, m >= 1 and alpha < 0");
    }
    let kmax = n.min(m as usize);
    let x = to_scaled(&dm_x(alpha, n))?;
    let t = z_table(&x, kmax, n - 1);
    let falling = |k: usize| (0..k).fold(Scaled::<f64>::one(), |a, j| a * Scaled::uint(m as usize - j));
    let norm = Scaled::sum((1..=kmax).map(|k| falling(k) * t.get(n, k)));
    Ok((1..=n)
        .map(|i| {
            let num = Scaled::sum((1..=kmax).map(|k| falling(k) * t.get(n - i, k - 1)));
            (x[i - 1] * num / norm).to_real()
        })
        .collect())
}

use num_traits::One;

/// Scores below this multiple of the rounding level of their terms have no reliable sign.
const SIGN_NOISE: f64 = 1e3 * f64::EPSILON;

fn signed(value: f64, magnitude: f64) -> f64 {
    if value.abs() <= SIGN_NOISE * magnitude { 0.0 } else { value }
}

fn gfc_score(spec: &ProblemSpec, sbar: &[f64], alpha: f64) -> Result<f64> {
    let x = gfc_x(alpha, spec.len());
    let eta = moments_unchecked(spec, &x)?.eta;
    let t = gfc_tangent(alpha, spec.len());
    let v = t.iter().zip(sbar.iter().zip(&eta)).map(|(t, (s, e))| t * (s - e)).sum();
    let mag = t.iter().zip(sbar.iter().zip(&eta)).map(|(t, (s, e))| t.abs() * (s.abs() + e.abs())).sum();
    Ok(signed(v, mag))
}

fn gfc_loglik(spec: &ProblemSpec, sbar: &[f64], alpha: f64) -> Result<f64> {
    let x = gfc_x(alpha, spec.len());
    let lz = recurrence_z_scaled(spec, &x)?.log();
    Ok(sbar.iter().zip(&x).map(|(s, v)| s * v.ln()).sum::<f64>() - lz)
}

fn dm_score(n: usize, m: u64, sbar: &[f64], alpha: f64) -> f64 {
    let t = dm_tangent(alpha, n);
    let mf = m as f64;
    let a: f64 = sbar.iter().zip(&t).map(|(s, v)| s * v).sum();
    let b: f64 = (0..n).map(|j| mf / (mf * alpha - j as f64)).sum();
    signed(a - b, a.abs() + b.abs())
}

fn dm_loglik(n: usize, m: u64, sbar: &[f64], alpha: f64) -> f64 {
    let x = dm_x(alpha, n);
    sbar.iter().zip(&x).map(|(s, v)| s * v.ln()).sum::<f64>() - dm_log_normalizer(n, m, alpha)
}

/// Bracketed sign change `f(lo) > 0 > f(hi)`.
type Bracket = (f64, f64);

/// Scans `(left, right)` on a grid uniform in `ln(c - α)`, then widens leftwards.
fn find_brackets(c: f64, right: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<Vec<Bracket>> {
    let (u0, u1) = ((c - CURVED_LEFT).ln(), (c - right).ln());
    let grid: Vec<f64> = (0..=GRID).map(|j| c - (u0 + (u1 - u0) * j as f64 / GRID as f64).exp()).collect();
    let vals = grid.iter().map(|&a| f(a)).collect::<Result<Vec<f64>>>()?;
    let mut out: Vec<Bracket> = (0..GRID)
        .filter(|&j| vals[j] > 0.0 && vals[j + 1] < 0.0)
        .map(|j| (grid[j], grid[j + 1]))
        .collect();
    if vals[0] < 0.0 && out.is_empty() {
        let (mut hi, mut lo) = (CURVED_LEFT, 2.0 * CURVED_LEFT);
        while lo >= FAR_LEFT {
            if f(lo)? > 0.0 {
                out.push((lo, hi));
                break;
            }
            hi = lo;
            lo *= 2.0;
        }
    }
    Ok(out)
}

/// Bisection to relative width `tol`.
fn bisect(mut b: Bracket, tol: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<(f64, usize)> {
    let mut it = 0;
    while b.1 - b.0 > tol * b.0.abs().max(b.1.abs()).max(1e-3) && it < 200 {
        let mid = 0.5 * (b.0 + b.1);
        if mid <= b.0 || mid >= b.1 {
            break;
        }
        let v = f(mid)?;
        if v > 0.0 {
            b.0 = mid;
        } else if v < 0.0 {
            b.1 = mid;
        } else {
            return Ok((mid, it + 1));
        }
        it += 1;
    }
    Ok((0.5 * (b.0 + b.1), it))
}

/// Curved-family MLE `α̂`; `tol` is the relative bracket width at termination.
///
/// For the Dirichlet-multinomial model `sbar` has length `spec.n`, indexed by
/// block size over all partitions of `n`, and `spec.k` is ignored.
pub fn mle_curved(model: CurvedModel, spec: &ProblemSpec, sbar: &[f64], tol: f64) -> Result<MleReport<f64, f64>> {
    if !(tol > 0.0) {
        return domain("tol must be positive");
    }
    let (brackets, score, loglik): (Vec<Bracket>, Box<dyn Fn(f64) -> Result<f64>>, Box<dyn Fn(f64) -> Result<f64>>) =
        match model {
            CurvedModel::Gfc => {
                if spec.is_restricted() || spec.d() < 2 || spec.k < 2 {
                    return domain("the GFC curve needs an unrestricted spec with n >= k+2 and k >= 2");
                }
                check_sbar(spec, sbar)?;
                let (s1, s2) = (*spec, sbar.to_vec());
                let f = move |a: f64| gfc_score(&s1, &s2, a);
                let b = find_brackets(1.0, CURVED_RIGHT, &f)?;
                let (s1, s2) = (*spec, sbar.to_vec());
                (b, Box::new(f), Box::new(move |a| gfc_loglik(&s1, &s2, a)))
            }
            CurvedModel::DirichletMultinomial { m } => {
                let n = spec.n;
                if m == 0 || sbar.len() != n || sbar.iter().any(|v| !(*v >= 0.0)) {
                    return domain("DM needs m >= 1 and a nonnegative sbar of length n");
                }
                let w: f64 = sbar.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
                if (w - n as f64).abs() > super::full::CONSTRAINT_TOL {
                    return domain(format!("sbar must satisfy weighted sum = {n}"));
                }
                let s2 = sbar.to_vec();
                let f = move |a: f64| Ok(dm_score(n, m, &s2, a));
                let b = find_brackets(0.0, -1e-8, &f)?;
                let s2 = sbar.to_vec();
                (b, Box::new(f), Box::new(move |a| Ok(dm_loglik(n, m, &s2, a))))
            }
        };
    let mut best: Option<(f64, f64, usize)> = None;
    let mut iterations = 0;
    for b in brackets {
        let (a, it) = bisect(b, tol, &score)?;
        iterations += it;
        let l = loglik(a)?;
        if best.is_none_or(|(_, bl, _)| l > bl) {
            best = Some((a, l, it));
        }
    }
    match best {
        None => Ok(MleReport::no_mle(iterations)),
        Some((a, _, _)) => Ok(MleReport {
            status: MleStatus::Ok,
            estimate: Some(a),
            residual: Some(score(a)?.abs()),
            iterations,
            fisher_info: Some(asymptotic_variance(model, spec, a)?),
        }),
    }
}

/// Fisher information `g_αα` of the curve at `α`; `1/(N g_αα)` is the
/// first-order asymptotic variance of `α̂`.
pub fn asymptotic_variance(model: CurvedModel, spec: &ProblemSpec, alpha: f64) -> Result<f64> {
    match model {
        CurvedModel::Gfc => {
            if !(alpha < 1.0) {
                return domain("the GFC curve needs alpha < 1");
            }
            let g = moments_unchecked(spec, &gfc_x(alpha, spec.len()))?.g;
            let t = gfc_tangent(alpha, spec.len());
            Ok((0..t.len()).map(|i| (0..t.len()).map(|j| t[i] * g[i][j] * t[j]).sum::<f64>()).sum())
        }
        CurvedModel::DirichletMultinomial { m } => {
            let n = spec.n;
            let eta = dm_moments(n, m, alpha)?;
            let mf = m as f64;
            let mut acc = 0.0;
            let mut curv = 0.0;
            for (i, e) in eta.iter().enumerate() {
                curv += 1.0 / (alpha - i as f64).powi(2);
                acc += e * curv;
            }
            Ok(acc - (0..n).map(|j| (mf / (mf * alpha - j as f64)).powi(2)).sum::<f64>())
        }
    }
}

/// Audit record for the `k = n-3` existence test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicCheck<W> {
    pub exists: bool,
    /// `(c3, c2, c1, c0)` of `f(α) = c3 α³ + c2 α² + c1 α + c0`, which has the sign of the score.
    pub coefficients: [W; 4],
}

/// GFC existence for `k = n-3`: the MLE exists iff the `α³` coefficient is negative.
pub fn mle_exists_cubic<W: Weight + PartialOrd>(spec: &ProblemSpec, sbar: &[W]) -> Result<CubicCheck<W>> {
    let (n, k) = (spec.n, spec.k);
    if spec.is_restricted() || k + 3 != n || k < 3 {
        return domain("the cubic test needs k = n-3 >= 3");
    }
    spec.check_len(sbar)?;
    let c = |v: i64| W::int(v);
    let (s3, s4, nn) = (sbar[2].clone(), sbar[3].clone(), W::uint(n));
    let n2 = nn.clone() * nn.clone();
    let lin = |a: i64, b: i64| c(a) * s3.clone() + c(b) * s4.clone();
    let c3 = -lin(1, 3) * n2.clone() + (lin(5, 15) + c(4)) * nn.clone() - c(2) * (lin(3, 9) + c(5));
    let c2 = lin(5, 13) * n2.clone() - (lin(21, 53) + c(24)) * nn.clone() + c(4) * (lin(5, 12) + c(13));
    let c1 = -lin(7, 17) * n2.clone() + (lin(19, 45) + c(44)) * nn.clone() - c(2) * (lin(3, 7) + c(35));
    let c0 = lin(3, 7) * n2 - (lin(3, 7) + c(24)) * nn + c(12);
    // The α → 1 end of the curve is the vertex (n-4, 0, 0, 1); there the root sits at α = 1.
    let endpoint = sbar[2].is_zero() && sbar[3] == W::one();
    Ok(CubicCheck { exists: c3 < W::zero() && !endpoint, coefficients: [c3, c2, c1, c0] })
}

/// Dirichlet-multinomial existence: `Σ i² s̄_i > n + n(n-1)/m`.
pub fn dm_mle_exists<W: Weight + PartialOrd>(n: usize, m: u64, sbar: &[W]) -> bool {
    let lhs = sbar.iter().enumerate().fold(W::zero(), |a, (i, s)| a + W::uint((i + 1) * (i + 1)) * s.clone());
    let nn = W::uint(n);
    lhs > nn.clone() + nn.clone() * W::int(n as i64 - 1) / W::int(m as i64)
}
