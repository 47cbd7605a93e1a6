//! `bench` and `asymp`: CSV sweeps over `(n, k, α)` cells, computed in parallel and printed in grid order.

use crate::error::CliError;
use crate::eval::{evaluate, EvalRequest, Method, Precision};
use crate::params::Param;
use rayon::prelude::*;
use rnc_core::asymptotics::AsymptoticForm;
use rnc_core::partition::ProblemSpec;
use std::fmt::Write;

pub const BENCH_SCHEMA: &str = "# rnc bench schema 1";
pub const ASYMP_SCHEMA: &str = "# rnc asymp schema 1";

pub struct Cell {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
}

struct Row {
    method: String,
    cell: (usize, usize, f64),
    log_z: Option<f64>,
    seconds: f64,
    error: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run_cell(method: &Method, cell: &Cell, steps: usize, precision: Precision) -> Row {
    let param = Param::Gfc { alpha: cell.alpha, text: cell.alpha.to_string() };
    let out = ProblemSpec::new(cell.n, cell.k).map_err(CliError::from).and_then(|spec| {
        let req = EvalRequest {
            spec,
            method: method.clone(),
            param: &param,
            steps,
            start: -1.0,
            precision,
            want_vector: false,
            diagnostics: None,
        };
        evaluate(&req)
    });
    let (log_z, seconds, error) = match out {
        Ok(e) => (Some(e.log_z), e.seconds, String::new()),
        Err(CliError::Domain(m)) | Err(CliError::Numeric(m)) => (None, 0.0, m.replace([',', '\n'], ";")),
    };
    Row { method: method.name(), cell: (cell.n, cell.k, cell.alpha), log_z, seconds, error }
}

/// Reference values in double-double by the recurrence.
fn reference(cells: &[Cell]) -> Vec<Option<f64>> {
    cells.par_iter().map(|c| run_cell(&Method::Recurrence, c, 0, Precision::Dd).log_z).collect()
}

/// Columns `method,n,k,alpha,logZ,seconds,diff,error`; `diff` is against the double-double recurrence.
pub fn bench_csv(cells: &[Cell], methods: &[Method], steps: usize, precision: Precision, with_time: bool) -> String {
    let refs = reference(cells);
    let jobs: Vec<(usize, &Method)> = methods.iter().flat_map(|m| (0..cells.len()).map(move |c| (c, m))).collect();
    let rows: Vec<Row> = jobs.par_iter().map(|&(c, m)| run_cell(m, &cells[c], steps, precision)).collect();
    let mut out = format!("{BENCH_SCHEMA}\nmethod,n,k,alpha,logZ,seconds,diff,error\n");
    for (&(c, _), r) in jobs.iter().zip(&rows) {
        let diff = r.log_z.zip(refs[c]).map(|(a, b)| a - b);
        let secs = if with_time { r.seconds.to_string() } else { String::new() };
        let (n, k, a) = r.cell;
        writeln!(out, "{},{n},{k},{a},{},{secs},{},{}", r.method, fmt_opt(r.log_z), fmt_opt(diff), r.error).unwrap();
    }
    out
}

/// Exact, Gaussian, Mittag-Leffler and fixed-k forms with
/// `rel_err = (ln Z_method - ln Z) / |ln Z|`.
/// The Gaussian form uses base `(4, 2)` scaled by `γ = k/2`, so `n = 2k` with `k` even.
pub fn asymp_csv(cells: &[Cell]) -> String {
    let refs = reference(cells);
    let methods = |c: &Cell| {
        let fixed = if c.alpha < 0.0 { AsymptoticForm::FixedKNeg } else { AsymptoticForm::FixedKPos };
        let mut m = vec![Method::Recurrence];
        if c.n == 2 * c.k && c.k.is_multiple_of(2) {
            m.push(Method::Gaussian(c.k / 2));
        }
        m.extend([Method::Asymptotic(AsymptoticForm::MittagLeffler), Method::Asymptotic(fixed)]);
        m
    };
    let jobs: Vec<(usize, Method)> =
        cells.iter().enumerate().flat_map(|(i, c)| methods(c).into_iter().map(move |m| (i, m))).collect();
    let rows: Vec<Row> = jobs.par_iter().map(|(c, m)| run_cell(m, &cells[*c], 0, Precision::Dd)).collect();
    let mut out = format!("{ASYMP_SCHEMA}\nmethod,n,k,alpha,logZ,rel_err,error\n");
    for (&(c, _), r) in jobs.iter().zip(&rows) {
        let rel = r.log_z.zip(refs[c]).map(|(a, b)| (a - b) / b.abs());
        let name = match r.method.as_str() {
            "recurrence" => "exact",
            m if m.starts_with("asymptotic:gaussian") => "ips",
            m => m.trim_start_matches("asymptotic:"),
        };
        let (n, k, a) = r.cell;
        writeln!(out, "{name},{n},{k},{a},{},{},{}", fmt_opt(r.log_z), fmt_opt(rel), r.error).unwrap();
    }
    out
}
