//! Holonomic gradient method: RK4 integration of `dQ/dt = Σ_i ξ^i'(t) P_i(x(t)) Q`.

use crate::error::{domain, Error, Result};
use crate::gfc::{gfc_tangent, gfc_x};
use crate::partition::ProblemSpec;
use crate::pfaffian::apply_pfaffian;
use crate::recurrence::GaussManinVector;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const DEFAULT_STEPS: usize = 500;
/// Largest tolerated max-norm growth over a single step.
pub const MAX_STEP_GROWTH: f64 = 1e3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Along the GFC curve from `α = from` to `α = to`.
    GfcAlpha { from: f64, to: f64 },
    /// Straight line in `ξ = log x` from `x = from` to `x = to`.
    LogLinear { from: Vec<f64>, to: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPath {
    pub kind: PathKind,
    pub steps: usize,
}

impl IntegrationPath {
    pub fn gfc(from: f64, to: f64, steps: usize) -> Self {
        IntegrationPath { kind: PathKind::GfcAlpha { from, to }, steps }
    }

    fn span(&self) -> (f64, f64) {
        match self.kind {
            PathKind::GfcAlpha { from, to } => (from, to),
            PathKind::LogLinear { .. } => (0.0, 1.0),
        }
    }

    fn is_trivial(&self) -> bool {
        match &self.kind {
            PathKind::GfcAlpha { from, to } => from == to,
            PathKind::LogLinear { from, to } => from == to,
        }
    }

    /// Indeterminates and tangent `dξ/dt` at parameter `t`.
    fn point<F: Real>(&self, t: F, len: usize) -> (Vec<F>, Vec<F>) {
        match &self.kind {
            PathKind::GfcAlpha { .. } => (gfc_x(t, len), gfc_tangent(t, len)),
            PathKind::LogLinear { from, to } => {
                let d: Vec<F> = from.iter().zip(to).map(|(a, b)| F::lit(b.ln() - a.ln())).collect();
                let x = from.iter().zip(&d).map(|(a, dv)| (F::lit(a.ln()) + t * *dv).exp()).collect();
                (x, d)
            }
        }
    }
}

/// One row of the per-step diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub log_z: f64,
    pub growth: f64,
}

pub fn write_diagnostics_csv<W: Write>(records: &[StepRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "step,t,log_z,growth")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.step, r.t, r.log_z, r.growth)?;
    }
    Ok(())
}

fn rhs<F: Real>(spec: &ProblemSpec, path: &IntegrationPath, t: F, q: &[F]) -> Result<Vec<F>> {
    let (n, k) = (spec.n, spec.k);
    let (x, dxi) = path.point(t, spec.len());
    let mut out = vec![F::zero(); q.len()];
    for (i, &c) in dxi.iter().enumerate() {
        if c == F::zero() {
            continue;
        }
        let pq = apply_pfaffian(n, k, i + 1, &x, q)?;
        out.iter_mut().zip(pq).for_each(|(o, v)| *o = *o + c * v);
    }
    Ok(out)
}

fn axpy<F: Real>(q: &[F], h: F, k: &[F]) -> Vec<F> {
    q.iter().zip(k).map(|(&a, &b)| a + h * b).collect()
}

fn max_norm<F: Real>(q: &[F]) -> F {
    q.iter().fold(F::zero(), |m, v| m.max(v.abs()))
}

fn check_path<F: Real>(spec: &ProblemSpec, path: &IntegrationPath, q_init: &GaussManinVector<F>) -> Result<()> {
    if spec.n < spec.k + 2 || spec.is_restricted() {
        return domain("HGM needs an unrestricted spec with n >= k+2");
    }
    if q_init.dir.len() != spec.d() {
        return domain(format!("initial vector has length {}, expected {}", q_init.dir.len(), spec.d()));
    }
    if path.steps == 0 {
        return domain("integration needs at least one step");
    }
    if let PathKind::LogLinear { from, to } = &path.kind {
        if from.len() != spec.len() || to.len() != spec.len() || from.iter().chain(to).any(|&v| v <= 0.0) {
            return domain("log-linear path needs positive endpoints of length n-k+1");
        }
    }
    Ok(())
}

/// One classical RK4 step of size `h` from `(t, q)`.
fn rk4_step<F: Real>(spec: &ProblemSpec, path: &IntegrationPath, t: F, h: F, q: &[F]) -> Result<Vec<F>> {
    let half = h / F::lit(2.0);
    let two = F::lit(2.0);
    let k1 = rhs(spec, path, t, q)?;
    let k2 = rhs(spec, path, t + half, &axpy(q, half, &k1))?;
    let k3 = rhs(spec, path, t + half, &axpy(q, half, &k2))?;
    let k4 = rhs(spec, path, t + h, &axpy(q, h, &k3))?;
    let sixth = h / F::lit(6.0);
    Ok((0..q.len()).map(|j| q[j] + sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j])).collect())
}

/// Integrates the Pfaffian system along `path` from `q_init` with fixed-step RK4.
pub fn hgm_integrate<F: Real>(
    spec: &ProblemSpec,
    path: &IntegrationPath,
    q_init: &GaussManinVector<F>,
    mut diag: impl FnMut(&StepRecord),
) -> Result<GaussManinVector<F>> {
    check_path(spec, path, q_init)?;
    let mut state = q_init.clone();
    state.normalize();
    if path.is_trivial() {
        return Ok(state);
    }
    let (t0, t1) = path.span();
    let h = (F::lit(t1) - F::lit(t0)) / F::of(path.steps);
    for step in 0..path.steps {
        let t = F::lit(t0) + h * F::of(step);
        let before = max_norm(&state.dir);
        let next = rk4_step(spec, path, t, h, &state.dir)?;
        let growth = (max_norm(&next) / before).f64();
        if !growth.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite state at step {step}")));
        }
        if growth > MAX_STEP_GROWTH {
            return Err(Error::StepSize { step, growth });
        }
        state.dir = next;
        state.normalize();
        diag(&StepRecord { step: step + 1, t: (t + h).f64(), log_z: state.log_z(), growth });
    }
    Ok(state)
}

/// Exact Gauss–Manin vector on the GFC curve at `α = -1` (ones) or `α = 1/2`.
pub fn gfc_initial<F: Real>(spec: &ProblemSpec, alpha: f64) -> Result<GaussManinVector<F>> {
    let (n, k) = (spec.n, spec.k);
    if n < k + 2 || spec.is_restricted() {
        return domain("initial values need an unrestricted spec with n >= k+2");
    }
    let lf = LnFact::<F>::new(2 * n);
    // ln Z_{m,j} at the start point
    let ln_z = |m: usize, j: usize| -> F {
        if alpha == -1.0 {
            lf.get(m - 1) - lf.get(j - 1) - lf.get(m - j) - lf.get(j)
        } else {
            lf.get(2 * m - j - 1) - F::of(2 * (m - j)) * F::LN_2() - lf.get(m) - lf.get(m - j) - lf.get(j - 1)
        }
    };
    if alpha != -1.0 && alpha != 0.5 {
        return domain(format!("no exact start value at alpha={alpha}"));
    }
    let x = gfc_x(F::lit(alpha), spec.len());
    let mut logs = vec![ln_z(n, k)];
    logs.extend((3..=spec.len()).map(|j| x[j - 1].ln() + ln_z(n - j, k - 1)));
    let m = logs.iter().fold(F::neg_infinity(), |a, &b| a.max(b));
    Ok(GaussManinVector::with_log_scale(logs.iter().map(|&l| (l - m).exp()).collect(), m.f64()))
}

struct LnFact<F>(Vec<F>);

impl<F: Real> LnFact<F> {
    fn new(max: usize) -> Self {
        let mut v = vec![F::zero(); max + 1];
        for m in 2..=max {
            v[m] = v[m - 1] + F::of(m).ln();
        }
        LnFact(v)
    }

    fn get(&self, m: usize) -> F {
        self.0[m]
    }
}

/// Starts from the exact vector at `α = -1` and integrates along the curve to `alpha`.
pub fn hgm_gfc<F: Real>(spec: &ProblemSpec, alpha: f64, steps: usize) -> Result<GaussManinVector<F>> {
    let q0 = gfc_initial::<F>(spec, -1.0)?;
    hgm_integrate(spec, &IntegrationPath::gfc(-1.0, alpha, steps), &q0, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::gauss_manin_scaled;
    use crate::DoubleDouble;

    fn spec(n: usize, k: usize) -> ProblemSpec {
        ProblemSpec::new(n, k).unwrap()
    }

    #[test]
    fn initial_values_match_recurrence() {
        for &a in &[-1.0, 0.5] {
            let s = spec(40, 31);
            let q = gfc_initial::<f64>(&s, a).unwrap();
            let r = gauss_manin_scaled(&s, &gfc_x(a, s.len())).unwrap();
            for l in 1..=s.d() {
                assert!((q.log_component(l) - r.log_component(l)).abs() < 1e-11, "a={a} l={l}");
            }
        }
    }

    #[test]
    fn half_cell_at_hundred_ninety() {
        let q = hgm_gfc::<DoubleDouble>(&spec(100, 90), 0.5, DEFAULT_STEPS).unwrap();
        assert!((q.log_z() + 300.735).abs() < 5e-3, "{}", q.log_z());
    }

    #[test]
    fn zero_length_path_is_identity() {
        let s = spec(12, 8);
        let q0 = gfc_initial::<f64>(&s, -1.0).unwrap();
        let q = hgm_integrate(&s, &IntegrationPath::gfc(-1.0, -1.0, 10), &q0, |_| {}).unwrap();
        assert_eq!(q, q0);
    }

    #[test]
    fn log_linear_path_reaches_target() {
        let s = spec(14, 9);
        let from = vec![1.0; s.len()];
        let to = vec![0.4, 1.3, 0.8, 2.0, 0.6, 1.1];
        let q0 = gauss_manin_scaled(&s, &from).unwrap();
        let path = IntegrationPath { kind: PathKind::LogLinear { from, to: to.clone() }, steps: 400 };
        let mut rows = Vec::new();
        let q = hgm_integrate(&s, &path, &q0, |r| rows.push(r.clone())).unwrap();
        let exact = gauss_manin_scaled(&s, &to).unwrap();
        assert!((q.log_z() - exact.log_z()).abs() < 1e-9, "{} {}", q.log_z(), exact.log_z());
        assert_eq!(rows.len(), 400);
        let mut csv = Vec::new();
        write_diagnostics_csv(&rows, &mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("step,t,log_z,growth\n1,"));
    }
}
