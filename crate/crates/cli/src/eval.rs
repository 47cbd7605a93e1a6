//! `eval`: log Z by one method, with optional Gauss–Manin vector and HGM diagnostics.

use crate::error::CliError;
use crate::params::Param;
use rnc_core::asymptotics::{gaussian_approx_log_z, gfc_asymptotic_log_z, AsymptoticForm};
use rnc_core::dhgm::dhgm;
use rnc_core::hgm::{gfc_initial, hgm_integrate, write_diagnostics_csv, IntegrationPath, PathKind, StepRecord};
use rnc_core::partition::{oracle_z, special_value, ProblemSpec};
use rnc_core::recurrence::{gauss_manin_scaled, recurrence_z_scaled, GaussManinVector};
use rnc_core::{DoubleDouble, Real};
use serde_json::{json, Map, Value};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Precision {
    F64,
    Dd,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Oracle,
    Recurrence,
    Hgm,
    Dhgm,
    ExactPoint,
    Asymptotic(AsymptoticForm),
    /// Gaussian approximation with `(n, k) = γ (n/γ, k/γ)`.
    Gaussian(usize),
}

impl Method {
    pub fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "oracle" => Method::Oracle,
            "recurrence" => Method::Recurrence,
            "hgm" => Method::Hgm,
            "dhgm" => Method::Dhgm,
            "exact-point" => Method::ExactPoint,
            "asymptotic:fixed-k-pos" => Method::Asymptotic(AsymptoticForm::FixedKPos),
            "asymptotic:fixed-k-neg" => Method::Asymptotic(AsymptoticForm::FixedKNeg),
            "asymptotic:mittag-leffler" => Method::Asymptotic(AsymptoticForm::MittagLeffler),
            _ => match s.strip_prefix("asymptotic:gaussian:").map(str::parse) {
                Some(Ok(g)) => Method::Gaussian(g),
                _ => return Err(format!("unknown method '{s}'")),
            },
        })
    }

    pub fn name(&self) -> String {
        match self {
            Method::Oracle => "oracle".into(),
            Method::Recurrence => "recurrence".into(),
            Method::Hgm => "hgm".into(),
            Method::Dhgm => "dhgm".into(),
            Method::ExactPoint => "exact-point".into(),
            Method::Asymptotic(AsymptoticForm::FixedKPos) => "asymptotic:fixed-k-pos".into(),
            Method::Asymptotic(AsymptoticForm::FixedKNeg) => "asymptotic:fixed-k-neg".into(),
            Method::Asymptotic(AsymptoticForm::MittagLeffler) => "asymptotic:mittag-leffler".into(),
            Method::Gaussian(g) => format!("asymptotic:gaussian:{g}"),
        }
    }
}

pub struct EvalRequest<'a> {
    pub spec: ProblemSpec,
    pub method: Method,
    pub param: &'a Param,
    pub steps: usize,
    pub start: f64,
    pub precision: Precision,
    pub want_vector: bool,
    pub diagnostics: Option<&'a std::path::Path>,
}

/// Result of one evaluation; `vector` holds `ln` of the Gauss–Manin components.
pub struct Evaluation {
    pub log_z: f64,
    pub exact: Option<String>,
    pub vector: Option<Vec<f64>>,
    pub seconds: f64,
}

fn log_vector<F: Real>(q: &GaussManinVector<F>) -> Vec<f64> {
    (1..=q.dir.len()).map(|l| q.log_component(l)).collect()
}

fn hgm_run<F: Real>(
    req: &EvalRequest,
    x: Vec<f64>,
    records: &mut Vec<StepRecord>,
) -> Result<GaussManinVector<F>, CliError> {
    let spec = &req.spec;
    let (path, q0) = match req.param {
        Param::Gfc { alpha, .. } => (IntegrationPath::gfc(req.start, *alpha, req.steps), gfc_initial::<F>(spec, req.start)?),
        _ => (
            IntegrationPath { kind: PathKind::LogLinear { from: vec![1.0; spec.len()], to: x }, steps: req.steps },
            gfc_initial::<F>(spec, -1.0)?,
        ),
    };
    Ok(hgm_integrate(spec, &path, &q0, |r| records.push(r.clone()))?)
}

fn gfc_alpha(param: &Param, what: &str) -> Result<f64, CliError> {
    match param {
        Param::Gfc { alpha, .. } => Ok(*alpha),
        _ => Err(CliError::domain(format!("{what} needs --param gfc:<alpha>"))),
    }
}

pub fn evaluate(req: &EvalRequest) -> Result<Evaluation, CliError> {
    let spec = &req.spec;
    let len = spec.len();
    let start = Instant::now();
    let mut exact = None;
    let mut vector = None;
    let log_z = match &req.method {
        Method::Oracle => {
            let z = oracle_z(spec, &req.param.x_rational(len)?)?;
            exact = Some(z.to_string());
            rnc_core::scalar::ln_bigint(z.numer()) - rnc_core::scalar::ln_bigint(z.denom())
        }
        Method::Recurrence => match req.precision {
            Precision::F64 => scaled_log(spec, &req.param.x_f64(len)?, req.want_vector, &mut vector)?,
            Precision::Dd => scaled_log(spec, &req.param.x_dd(len)?, req.want_vector, &mut vector)?,
        },
        Method::Hgm => {
            let x = req.param.x_f64(len)?;
            let mut records = Vec::new();
            let (lz, v) = match req.precision {
                Precision::F64 => {
                    let q = hgm_run::<f64>(req, x, &mut records)?;
                    (q.log_z(), log_vector(&q))
                }
                Precision::Dd => {
                    let q = hgm_run::<DoubleDouble>(req, x, &mut records)?;
                    (q.log_z(), log_vector(&q))
                }
            };
            if let Some(path) = req.diagnostics {
                write_diagnostics_csv(&records, std::fs::File::create(path)?)?;
            }
            if req.want_vector {
                vector = Some(v);
            }
            lz
        }
        Method::Dhgm => {
            let (lz, v) = match req.precision {
                Precision::F64 => {
                    let q = dhgm(spec, &req.param.x_f64(len)?)?;
                    (q.log_z(), log_vector(&q))
                }
                Precision::Dd => {
                    let q = dhgm(spec, &req.param.x_dd(len)?)?;
                    (q.log_z(), log_vector(&q))
                }
            };
            if req.want_vector {
                vector = Some(v);
            }
            lz
        }
        Method::ExactPoint => {
            let point = req
                .param
                .special()
                .ok_or_else(|| CliError::domain("no closed form for this parameter; use ones, inv, inv-factorial or gfc:-1 / gfc:0.5"))?;
            special_value(point, spec)?.log()
        }
        Method::Asymptotic(form) => gfc_asymptotic_log_z(spec, gfc_alpha(req.param, "the asymptotic forms")?, *form)?,
        Method::Gaussian(g) => gaussian_approx_log_z(spec, &req.param.x_f64(len)?, *g)?,
    };
    if !log_z.is_finite() && log_z != f64::NEG_INFINITY {
        return Err(CliError::Numeric(format!("log Z evaluated to {log_z}")));
    }
    Ok(Evaluation { log_z, exact, vector, seconds: start.elapsed().as_secs_f64() })
}

fn scaled_log<F: Real>(
    spec: &ProblemSpec,
    x: &[F],
    want_vector: bool,
    vector: &mut Option<Vec<f64>>,
) -> Result<f64, CliError> {
    if want_vector && !spec.is_restricted() && spec.n >= spec.k + 2 {
        let q = gauss_manin_scaled(spec, x)?;
        *vector = Some(log_vector(&q));
        return Ok(q.log_z());
    }
    Ok(recurrence_z_scaled(spec, x)?.log().f64())
}

pub fn to_json(req: &EvalRequest, e: &Evaluation, with_time: bool) -> Value {
    let mut m = Map::new();
    m.insert("method".into(), json!(req.method.name()));
    m.insert("n".into(), json!(req.spec.n));
    m.insert("k".into(), json!(req.spec.k));
    m.insert("logZ".into(), json_f64(e.log_z));
    if let Some(z) = &e.exact {
        m.insert("Z".into(), json!(z));
    }
    if let Some(v) = &e.vector {
        m.insert("log_gauss_manin".into(), Value::Array(v.iter().map(|&c| json_f64(c)).collect()));
    }
    if with_time {
        m.insert("time_s".into(), json!(e.seconds));
    }
    Value::Object(m)
}

/// JSON has no infinities; `-inf` (Z = 0) is written as null.
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}
