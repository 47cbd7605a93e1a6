//! `mle`: full and curved maximum likelihood, existence verdicts and projected polytope geometry.

use crate::error::CliError;
use crate::eval::json_f64;
use nalgebra::DMatrix;
use rnc_core::gfc::gfc_x;
use rnc_core::inference::{
    asymptotic_variance, dm_mle_exists, mle_curved, mle_exists_cubic, mle_full, moment_map, CurvedModel, MleOptions,
};
use rnc_core::partition::{enumerate_support, polytope_membership, Membership, ProblemSpec};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Full,
    Gfc,
    Dm(u64),
}

impl Model {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Model::Full),
            "gfc" => Ok(Model::Gfc),
            _ => match s.strip_prefix("dm:").map(str::parse) {
                Some(Ok(m)) if m > 0 => Ok(Model::Dm(m)),
                _ => Err(format!("unknown model '{s}'")),
            },
        }
    }
}

/// Points sampled on the GFC curve for `--emit-polytope`.
pub const CURVE_POINTS: usize = 200;

pub fn mle(spec: &ProblemSpec, model: Model, sbar: &[f64], opts: &MleOptions, polytope: bool) -> Result<Value, CliError> {
    let mut out = match model {
        Model::Full => {
            let r = mle_full(spec, sbar, opts)?;
            let exists = polytope_membership(sbar, spec)? == Membership::Interior;
            let variance = r.fisher_info.as_ref().map(|g| inverse(g)).transpose()?;
            json!({
                "model": "full",
                "status": r.status,
                "exists": exists,
                "estimate": r.estimate,
                "fisher_info": r.fisher_info,
                "asymptotic_variance": variance,
                "residual": r.residual.map(json_f64),
                "iterations": r.iterations,
            })
        }
        Model::Gfc | Model::Dm(_) => {
            let cm = match model {
                Model::Dm(m) => CurvedModel::DirichletMultinomial { m },
                _ => CurvedModel::Gfc,
            };
            let r = mle_curved(cm, spec, sbar, opts.tol)?;
            let (exists, rule) = match model {
                Model::Dm(m) => (dm_mle_exists(spec.n, m, sbar), "dirichlet_multinomial"),
                _ if spec.k + 3 == spec.n && spec.k >= 3 => (mle_exists_cubic(spec, sbar)?.exists, "cubic"),
                _ => (r.exists(), "numeric"),
            };
            let info = r.estimate.map(|a| asymptotic_variance(cm, spec, a)).transpose()?;
            json!({
                "model": cm,
                "status": r.status,
                "exists": exists,
                "existence_rule": rule,
                "estimate": r.estimate.map(json_f64),
                "fisher_info": r.fisher_info.map(json_f64),
                "asymptotic_variance": info.map(|g| json_f64(1.0 / g)),
                "iterations": r.iterations,
            })
        }
    };
    out["n"] = json!(spec.n);
    if !matches!(model, Model::Dm(_)) {
        out["k"] = json!(spec.k);
    }
    if polytope {
        let alpha = out["estimate"].as_f64();
        out["polytope"] = polytope_geometry(spec, sbar, model, alpha)?;
    }
    Ok(out)
}

fn inverse(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, CliError> {
    let d = g.len();
    let m = DMatrix::from_fn(d, d, |i, j| g[i][j]);
    let inv = m.try_inverse().ok_or_else(|| CliError::Numeric("Fisher information is singular".into()))?;
    Ok((0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect())
}

/// Projection onto `(s̄_3, s̄_4)`, the coordinates of the no-MLE boundary line.
fn project(v: &[f64]) -> [f64; 2] {
    [v[2], v[3]]
}

fn polytope_geometry(spec: &ProblemSpec, sbar: &[f64], model: Model, alpha: Option<f64>) -> Result<Value, CliError> {
    if model != Model::Gfc || spec.len() != 4 || spec.is_restricted() {
        return Err(CliError::domain("--emit-polytope needs the gfc model with k = n-3"));
    }
    let n = spec.n as f64;
    let points: Vec<[f64; 2]> = enumerate_support(spec)?.iter().map(|s| project(&s.as_f64())).collect();
    let vertices = convex_hull(points);
    let curve = (0..CURVE_POINTS)
        .map(|i| {
            // ln(1-α) uniform from ln(1e-3) to ln(51): α from 0.999 down to -50.
            let u = (1e-3f64).ln() + (51.0f64.ln() - (1e-3f64).ln()) * i as f64 / (CURVE_POINTS - 1) as f64;
            let a = 1.0 - u.exp();
            let eta = moment_map(spec, &gfc_x(a, spec.len()))?.eta;
            let p = project(&eta);
            Ok(json!({ "alpha": a, "s3": p[0], "s4": p[1] }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let segment = match alpha {
        Some(a) => {
            let eta = moment_map(spec, &gfc_x(a, spec.len()))?.eta;
            json!([project(sbar), project(&eta)])
        }
        None => Value::Null,
    };
    Ok(json!({
        "coordinates": ["s3", "s4"],
        "vertices": vertices,
        "curve": curve,
        "boundary_line": { "coefficients": [1.0, 3.0], "rhs": 2.0 * (2.0 * n - 5.0) / ((n - 2.0) * (n - 3.0)) },
        "projection_segment": segment,
    }))
}

/// Counter-clockwise hull by the monotone chain, starting at the lowest-leftmost point.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_a_square_with_interior_point() {
        let h = convex_hull(vec![[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0]]);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn models_parse() {
        assert_eq!(Model::parse("dm:3"), Ok(Model::Dm(3)));
        assert!(Model::parse("dm:0").is_err());
        assert!(Model::parse("curved").is_err());
    }
}
