//! Full-family MLE in the torus gauge `x_1 = x_2 = 1`, `x_{i+2} = y_i`.
//!
//! The log likelihood per observation is `f(y) = Σ s̄_{i+2} ln y_i - ln Z(y)`,
//! with `∂f/∂y_i = y_i^{-1}(s̄_{i+2} - η_{i+2})`.

use super::moments::moments_unchecked;
use crate::error::{domain, Error, Result};
use crate::partition::{canonical_x, polytope_membership, Membership, ProblemSpec};
use crate::recurrence::recurrence_z_scaled;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Linear constraints on `s̄` must hold to this absolute tolerance.
pub(crate) const CONSTRAINT_TOL: f64 = 1e-8;
/// Newton falls back to a gradient step above this condition number.
const MAX_CONDITION: f64 = 1e12;
const MAX_HALVINGS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MleAlgo {
    Gradient,
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub algo: MleAlgo,
    /// Stop when `max_i |s̄_{i+2} - η_{i+2}| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial gradient step.
    pub step: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions { algo: MleAlgo::Newton, tol: 1e-10, max_iter: 100_000, step: 1e-2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MleStatus {
    Ok,
    NoMle,
}

/// Estimation outcome; a missing MLE is a result, not an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleReport<E, I> {
    pub status: MleStatus,
    pub estimate: Option<E>,
    pub residual: Option<f64>,
    pub iterations: usize,
    pub fisher_info: Option<I>,
}

impl<E, I> MleReport<E, I> {
    pub(crate) fn no_mle(iterations: usize) -> Self {
        MleReport { status: MleStatus::NoMle, estimate: None, residual: None, iterations, fisher_info: None }
    }

    pub fn exists(&self) -> bool {
        self.status == MleStatus::Ok
    }
}

pub(crate) fn check_sbar(spec: &ProblemSpec, sbar: &[f64]) -> Result<()> {
    spec.check_len(sbar)?;
    if sbar.iter().any(|v| !v.is_finite()) {
        return domain("sbar must be finite");
    }
    let k: f64 = sbar.iter().sum();
    let n: f64 = sbar.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
    if (k - spec.k as f64).abs() > CONSTRAINT_TOL || (n - spec.n as f64).abs() > CONSTRAINT_TOL {
        return domain(format!("sbar must satisfy sum = {} and weighted sum = {}", spec.k, spec.n));
    }
    Ok(())
}

struct Point {
    y: Vec<f64>,
    f: f64,
    resid: Vec<f64>,
    g: Vec<Vec<f64>>,
}

impl Point {
    fn max_resid(&self) -> f64 {
        self.resid.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn evaluate(spec: &ProblemSpec, sbar: &[f64], y: Vec<f64>) -> Result<Point> {
    let x = canonical_x(&y);
    let lz = recurrence_z_scaled(spec, &x)?.log();
    let st = moments_unchecked(spec, &x)?;
    let f = y.iter().zip(&sbar[2..]).map(|(yi, s)| s * yi.ln()).sum::<f64>() - lz;
    let resid = sbar[2..].iter().zip(&st.eta[2..]).map(|(s, e)| s - e).collect();
    let g = st.g[2..].iter().map(|r| r[2..].to_vec()).collect();
    Ok(Point { y, f, resid, g })
}

/// Near the optimum `f` moves by less than its rounding error; ties are then
/// accepted while the slope along `dir` is still nonnegative, i.e. the step
/// has not passed the line maximum.
fn improves(new: &Point, old: &Point, dir: &[f64]) -> bool {
    let noise = 1e-13 * old.f.abs().max(1.0);
    let slope: f64 = new.resid.iter().zip(&new.y).zip(dir).map(|((r, y), d)| r / y * d).sum();
    new.f > old.f + noise || (new.f >= old.f - noise && slope >= 0.0)
}

/// Candidate `y + λ Δ`, or `None` when a coordinate leaves the positive orthant.
fn shifted(y: &[f64], dir: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let v: Vec<f64> = y.iter().zip(dir).map(|(a, b)| a + lambda * b).collect();
    v.iter().all(|&t| t > 0.0 && t.is_finite()).then_some(v)
}

/// `Δy` with `H Δy = r`, `H_ij = y_j^{-1} g_{i+2,j+2}`; `None` when `H` is ill-conditioned.
fn newton_direction(p: &Point) -> Option<Vec<f64>> {
    let m = p.y.len();
    let h = DMatrix::from_fn(m, m, |i, j| p.g[i][j] / p.y[j]);
    let sv = h.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 0.0) || smax / smin > MAX_CONDITION {
        return None;
    }
    let d = h.lu().solve(&DVector::from_column_slice(&p.resid))?;
    Some(d.iter().copied().collect())
}

/// Maximum-likelihood odds `ŷ` for the full family at sufficient statistic `s̄`.
///
/// Returns `NoMle` unless `s̄` lies in the relative interior of the Newton polytope.
pub fn mle_full(spec: &ProblemSpec, sbar: &[f64], opts: &MleOptions) -> Result<MleReport<Vec<f64>, Vec<Vec<f64>>>> {
    if spec.is_restricted() || spec.d() < 2 || spec.k < 2 {
        return domain("full-family MLE needs an unrestricted spec with n >= k+2 and k >= 2");
    }
    if !(opts.tol > 0.0) || !(opts.step > 0.0) {
        return domain("tol and step must be positive");
    }
    check_sbar(spec, sbar)?;
    if polytope_membership(sbar, spec)? != Membership::Interior {
        return Ok(MleReport::no_mle(0));
    }
    let mut p = evaluate(spec, sbar, vec![1.0; spec.len() - 2])?;
    let mut eps = opts.step;
    for it in 0..opts.max_iter {
        if p.max_resid() < opts.tol {
            return Ok(MleReport {
                status: MleStatus::Ok,
                residual: Some(p.max_resid()),
                estimate: Some(p.y),
                iterations: it,
                fisher_info: Some(p.g),
            });
        }
        let newton = match opts.algo {
            MleAlgo::Newton => newton_direction(&p),
            MleAlgo::Gradient => None,
        };
        let next = match newton {
            Some(dir) => line_search(spec, sbar, &p, &dir, 1.0)?.map(|(q, _)| q),
            None => None,
        };
        p = match next {
            Some(q) => q,
            None => {
                let grad: Vec<f64> = p.resid.iter().zip(&p.y).map(|(r, y)| r / y).collect();
                match line_search(spec, sbar, &p, &grad, eps)? {
                    Some((q, used)) => {
                        eps = 2.0 * used;
                        q
                    }
                    None => {
                        return Err(Error::Numeric(format!(
                            "no ascent step found at iteration {it} (residual {:e})",
                            p.max_resid()
                        )))
                    }
                }
            }
        };
    }
    if p.max_resid() < opts.tol {
        return Ok(MleReport {
            status: MleStatus::Ok,
            residual: Some(p.max_resid()),
            estimate: Some(p.y),
            iterations: opts.max_iter,
            fisher_info: Some(p.g),
        });
    }
    Err(Error::IterationLimit { iterations: opts.max_iter, residual: p.max_resid() })
}

/// Halves `λ` until the step stays feasible and improves the likelihood.
fn line_search(spec: &ProblemSpec, sbar: &[f64], p: &Point, dir: &[f64], lambda: f64) -> Result<Option<(Point, f64)>> {
    let mut lambda = lambda;
    for _ in 0..MAX_HALVINGS {
        if let Some(y) = shifted(&p.y, dir, lambda) {
            let q = evaluate(spec, sbar, y)?;
            if improves(&q, p, dir) {
                return Ok(Some((q, lambda)));
            }
        }
        lambda /= 2.0;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::moment_map;

    fn k2_sbar(n: usize, n1: f64, n2: f64) -> Vec<f64> {
        let w = n1 / (n1 + n2);
        let nf = n as f64;
        vec![nf - 4.0 + w, 2.0 - 2.0 * w, w]
    }

    #[test]
    fn k_equals_n_minus_two_closed_form() {
        for algo in [MleAlgo::Newton, MleAlgo::Gradient] {
            for (n, n1, n2) in [(6, 1.0, 1.0), (10, 3.0, 7.0), (50, 9.0, 1.0)] {
                let spec = ProblemSpec::new(n, n - 2).unwrap();
                let opts = MleOptions { algo, tol: 1e-13, ..Default::default() };
                let r = mle_full(&spec, &k2_sbar(n, n1, n2), &opts).unwrap();
                let y = r.estimate.unwrap()[0];
                let want = n1 / n2 * (n as f64 - 3.0) / 2.0;
                assert!((y - want).abs() < 1e-8 * want, "{algo:?} n={n}: {y} vs {want}");
            }
        }
    }

    #[test]
    fn vertex_counts_have_no_mle() {
        let spec = ProblemSpec::new(8, 6).unwrap();
        for sbar in [k2_sbar(8, 0.0, 3.0), k2_sbar(8, 4.0, 0.0)] {
            let r = mle_full(&spec, &sbar, &MleOptions::default()).unwrap();
            assert_eq!(r.status, MleStatus::NoMle);
            assert!(r.estimate.is_none());
        }
    }

    #[test]
    fn fixed_point_recovery() {
        let spec = ProblemSpec::new(14, 8).unwrap();
        let y: Vec<f64> = (0..spec.len() - 2).map(|i| 0.4 + 0.3 * i as f64).collect();
        let eta = moment_map(&spec, &canonical_x(&y)).unwrap().eta;
        let r = mle_full(&spec, &eta, &MleOptions { tol: 1e-12, ..Default::default() }).unwrap();
        for (a, b) in r.estimate.unwrap().iter().zip(&y) {
            assert!((a - b).abs() < 1e-8 * b.max(1.0), "{a} vs {b}");
        }
        let json = serde_json::to_value(
            mle_full(&spec, &eta, &MleOptions { tol: 1e-9, ..Default::default() }).unwrap(),
        )
        .unwrap();
        for key in ["status", "estimate", "residual", "iterations", "fisher_info"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["status"], "ok");
    }

    #[test]
    fn constraint_violation_is_a_domain_error() {
        let spec = ProblemSpec::new(6, 4).unwrap();
        assert!(mle_full(&spec, &[2.0, 1.0, 1.0], &MleOptions::default()).unwrap_err().is_domain());
    }

    #[test]
    fn iteration_limit_reports_residual() {
        let spec = ProblemSpec::new(10, 8).unwrap();
        let opts = MleOptions { algo: MleAlgo::Gradient, max_iter: 2, ..Default::default() };
        match mle_full(&spec, &k2_sbar(10, 9.0, 1.0), &opts) {
            Err(Error::IterationLimit { iterations: 2, residual }) => assert!(residual > 0.0),
            other => panic!("{other:?}"),
        }
    }
}
