//! `rnc`: evaluation, benchmarking, asymptotics, estimation and sampling for
//! partial Bell polynomials and the microcanonical Gibbs distribution.
//!
//! stdout carries data only. Errors go to stderr as JSON, with exit code 2 for
//! domain errors and 3 for numerical failures.

mod bench;
mod error;
mod eval;
mod infer;
mod params;

use clap::{Args, Parser, Subcommand};
use error::CliError;
use eval::{EvalRequest, Method, Precision};
use infer::Model;
use params::Param;
use rnc_core::inference::{AHypDistribution, MleAlgo, MleOptions};
use rnc_core::partition::{ProblemSpec, SizeIndex};
use rnc_core::sampling::{mcmc_chain, rng_from_seed, similar_test, ExactSampler, McmcOptions, SamplerKind};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "rnc", version, about = "Partial Bell polynomials: evaluation and inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// log Z_{n,k}(x) by one method.
    Eval(EvalArgs),
    /// CSV timing and accuracy grid over GFC cells.
    Bench(BenchArgs),
    /// CSV comparing asymptotic forms with the exact value.
    Asymp(AsympArgs),
    /// Maximum likelihood estimate with existence verdict and Fisher information.
    Mle(MleArgs),
    /// Draw size indices, one JSON array per line.
    Sample(SampleArgs),
    /// Similar test of an observed size index.
    Test(TestArgs),
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Smallest allowed block size.
    #[arg(long)]
    r_min: Option<usize>,
    /// Largest allowed block size.
    #[arg(long)]
    r_max: Option<usize>,
}

impl SpecArgs {
    fn spec(&self) -> Result<ProblemSpec, CliError> {
        Ok(ProblemSpec::with_bounds(self.n, self.k, self.r_min, self.r_max)?)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// oracle | recurrence | hgm | dhgm | exact-point | asymptotic:{fixed-k-pos,fixed-k-neg,mittag-leffler,gaussian:<γ>}
    #[arg(long, value_parser = Method::parse)]
    method: Method,
    /// gfc:<α> | ones | inv | inv-factorial | file:<path to JSON array>
    #[arg(long, value_parser = parse_param)]
    param: Param,
    /// RK4 steps for hgm.
    #[arg(long, default_value_t = 500)]
    steps: usize,
    /// Start of the GFC path for hgm: -1 or 0.5.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, env = "RNC_PRECISION", value_enum, default_value_t = Precision::Dd)]
    precision: Precision,
    /// Also print ln of each Gauss–Manin component.
    #[arg(long)]
    vector: bool,
    /// Write per-step hgm diagnostics as CSV.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Omit wall-clock time so the output is reproducible.
    #[arg(long)]
    no_time: bool,
}

fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| CliError::domain(format!("bad list entry '{t}'")))).collect()
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated values of n.
    #[arg(long, default_value = "100,200,400,800")]
    n: String,
    /// Comma-separated values of n-k.
    #[arg(long, default_value = "10,30")]
    d: String,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    alpha: f64,
    /// Comma-separated methods as accepted by eval.
    #[arg(long, default_value = "recurrence,hgm,dhgm")]
    methods: String,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, env = "RNC_PRECISION", value_enum, default_value_t = Precision::Dd)]
    precision: Precision,
    #[arg(long)]
    no_time: bool,
}

fn list_methods(s: &str) -> Result<Vec<Method>, CliError> {
    s.split(',').map(|t| Method::parse(t.trim()).map_err(CliError::Domain)).collect()
}

#[derive(Args)]
struct AsympArgs {
    /// Comma-separated values of n.
    #[arg(long, default_value = "40,100,200,400,800")]
    n: String,
    /// Comma-separated k for each n; defaults to n/2.
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    alpha: f64,
}

#[derive(Args)]
struct MleArgs {
    #[arg(long)]
    n: usize,
    /// Not used by dm models.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// full | gfc | dm:<m>
    #[arg(long, value_parser = Model::parse, default_value = "full")]
    model: Model,
    /// Sample mean of the size index as a JSON array.
    #[arg(long, conflicts_with = "sbar_file")]
    sbar: Option<String>,
    #[arg(long)]
    sbar_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Newton)]
    algo: AlgoArg,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Add projected polytope vertices, the GFC curve, the no-MLE line and the projection segment.
    #[arg(long)]
    emit_polytope: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgoArg {
    Newton,
    Gradient,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_parser = parse_param)]
    param: Param,
    /// Number of draws.
    #[arg(long = "M", short = 'M', default_value_t = 1000)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
}

impl DistArgs {
    fn dist(&self) -> Result<AHypDistribution, CliError> {
        let spec = self.spec.spec()?;
        let x = self.param.x_f64(spec.len())?;
        Ok(AHypDistribution::new(spec, x)?)
    }

    fn mcmc(&self) -> McmcOptions {
        McmcOptions { burn_in: self.burn_in, thin: self.thin }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long, value_enum, default_value_t = SamplerArg::Exact)]
    sampler: SamplerArg,
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum SamplerArg {
    Enumeration,
    Exact,
    Mcmc,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Observed size index as a JSON array.
    #[arg(long)]
    sobs: String,
    #[arg(long, value_enum, default_value_t = SamplerArg::Exact)]
    sampler: SamplerArg,
}

fn parse_param(s: &str) -> Result<Param, String> {
    Param::parse(s).map_err(|e| e.message().to_string())
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::domain(format!("{what}: {e}")))
}

fn print_json(v: &serde_json::Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string(v).expect("serialisable"))?;
    Ok(())
}

/// Every spec has the size index with `k-1` singletons and one block of size `n-k+1`.
fn chain_start(spec: &ProblemSpec) -> Result<SizeIndex, CliError> {
    let mut s = vec![0u64; spec.len()];
    s[0] += (spec.k - 1) as u64;
    s[spec.len() - 1] += 1;
    Ok(SizeIndex::padded(s, spec.len())?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(a) => {
            let req = EvalRequest {
                spec: a.spec.spec()?,
                method: a.method,
                param: &a.param,
                steps: a.steps,
                start: a.start,
                precision: a.precision,
                want_vector: a.vector,
                diagnostics: a.diagnostics.as_deref(),
            };
            let e = eval::evaluate(&req)?;
            print_json(&eval::to_json(&req, &e, !a.no_time))
        }
        Command::Bench(a) => {
            let (ns, ds) = (list::<usize>(&a.n)?, list::<usize>(&a.d)?);
            let cells: Vec<bench::Cell> = ds
                .iter()
                .flat_map(|&d| ns.iter().filter(move |&&n| n > d).map(move |&n| bench::Cell { n, k: n - d, alpha: a.alpha }))
                .collect();
            print!("{}", bench::bench_csv(&cells, &list_methods(&a.methods)?, a.steps, a.precision, !a.no_time));
            Ok(())
        }
        Command::Asymp(a) => {
            let ns = list::<usize>(&a.n)?;
            let ks = match &a.k {
                Some(k) => list::<usize>(k)?,
                None => ns.iter().map(|n| n / 2).collect(),
            };
            if ks.len() != ns.len() {
                return Err(CliError::domain("--k needs one entry per --n"));
            }
            let cells: Vec<bench::Cell> = ns.iter().zip(&ks).map(|(&n, &k)| bench::Cell { n, k, alpha: a.alpha }).collect();
            print!("{}", bench::asymp_csv(&cells));
            Ok(())
        }
        Command::Mle(a) => {
            let text = match (&a.sbar, &a.sbar_file) {
                (Some(s), _) => s.clone(),
                (None, Some(p)) => std::fs::read_to_string(p)?,
                (None, None) => return Err(CliError::domain("give --sbar or --sbar-file")),
            };
            let sbar: Vec<f64> = parse_json("sbar", &text)?;
            let spec = ProblemSpec::new(a.n, a.k)?;
            let algo = match a.algo {
                AlgoArg::Newton => MleAlgo::Newton,
                AlgoArg::Gradient => MleAlgo::Gradient,
            };
            let opts = MleOptions { algo, tol: a.tol, max_iter: a.max_iter, ..Default::default() };
            print_json(&infer::mle(&spec, a.model, &sbar, &opts, a.emit_polytope)?)
        }
        Command::Sample(a) => {
            let dist = a.dist.dist()?;
            let draws = match a.sampler {
                SamplerArg::Exact => {
                    let sampler = ExactSampler::new(&dist)?;
                    let mut rng = rng_from_seed(a.dist.seed);
                    (0..a.dist.m).map(|_| sampler.sample(&mut rng)).collect()
                }
                SamplerArg::Mcmc => mcmc_chain(&dist, &chain_start(&dist.spec)?, a.dist.m, &a.dist.mcmc(), a.dist.seed)?,
                SamplerArg::Enumeration => return Err(CliError::domain("sample supports the exact and mcmc samplers")),
            };
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for s in &draws {
                writeln!(out, "{}", serde_json::to_string(s).expect("serialisable"))?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Test(a) => {
            let dist = a.dist.dist()?;
            let s: Vec<u64> = parse_json("sobs", &a.sobs)?;
            let s_obs = SizeIndex::padded(s, dist.spec.len())?;
            let kind = match a.sampler {
                SamplerArg::Enumeration => SamplerKind::Enumeration,
                SamplerArg::Exact => SamplerKind::Exact,
                SamplerArg::Mcmc => SamplerKind::Mcmc,
            };
            let report = similar_test(&dist, &s_obs, a.dist.m, kind, a.dist.seed, &a.dist.mcmc())?;
            print_json(&serde_json::to_value(report).expect("serialisable"))
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::domain(first).to_json());
            std::process::exit(2);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
