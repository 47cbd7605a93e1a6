//! Similar test: the significance of `s_obs` is `P(q(S; x0) < q(s_obs; x0))`.
//! Ties contribute nothing.

use super::exact::ExactSampler;
use super::mcmc::{mcmc_chain, McmcOptions};
use super::rng_from_seed;
use crate::error::{domain, Result};
use crate::inference::AHypDistribution;
use crate::partition::SizeIndex;
use serde::{Deserialize, Serialize};

/// Log-probabilities closer than this (relative) count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Sum over the enumerated support; no Monte-Carlo error.
    Enumeration,
    Exact,
    Mcmc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// `log q(s_obs; x0)`.
    pub statistic: f64,
    pub significance: f64,
    /// `sqrt(p(1-p)/M)`; zero under enumeration.
    pub std_error: f64,
    pub sampler: SamplerKind,
    pub samples: usize,
    pub seed: u64,
}

fn less(lq: f64, obs: f64) -> bool {
    lq < obs - TIE_TOL * obs.abs().max(1.0)
}

pub fn similar_test(
    dist: &AHypDistribution,
    s_obs: &SizeIndex,
    m: usize,
    sampler: SamplerKind,
    seed: u64,
    mcmc: &McmcOptions,
) -> Result<TestReport> {
    let obs = dist.log_pmf(s_obs)?;
    if sampler != SamplerKind::Enumeration && m == 0 {
        return domain("the sample count must be positive");
    }
    let lz = dist.log_z()?;
    let (significance, samples) = match sampler {
        SamplerKind::Enumeration => {
            let p = dist
                .enumerate_pmf()?
                .into_iter()
                .filter(|(_, p)| less(p.ln(), obs))
                .map(|(_, p)| p)
                .sum::<f64>();
            (p.clamp(0.0, 1.0), 0)
        }
        SamplerKind::Exact => {
            let ex = ExactSampler::new(dist)?;
            let mut rng = rng_from_seed(seed);
            let hits = (0..m).filter(|_| less(log_q(dist, &ex.sample(&mut rng), lz), obs)).count();
            (hits as f64 / m as f64, m)
        }
        SamplerKind::Mcmc => {
            let chain = mcmc_chain(dist, s_obs, m, mcmc, seed)?;
            let hits = chain.iter().filter(|s| less(log_q(dist, s, lz), obs)).count();
            (hits as f64 / m as f64, m)
        }
    };
    let std_error = if samples == 0 { 0.0 } else { (significance * (1.0 - significance) / samples as f64).sqrt() };
    Ok(TestReport { statistic: obs, significance, std_error, sampler, samples, seed })
}

fn log_q(dist: &AHypDistribution, s: &SizeIndex, lz: f64) -> f64 {
    s.0.iter().zip(&dist.x).filter(|(&c, _)| c > 0).map(|(&c, &x)| c as f64 * x.ln()).sum::<f64>() - s.ln_factorial() - lz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::ProblemSpec;

    #[test]
    fn mode_significance_is_one_minus_mode_mass() {
        let d = AHypDistribution::new(ProblemSpec::new(9, 4).unwrap(), vec![1.0, 0.5, 0.9, 0.2, 0.6, 0.3]).unwrap();
        let pmf = d.enumerate_pmf().unwrap();
        let (mode, pmax) = pmf.iter().cloned().fold((SizeIndex(vec![]), 0.0), |a, b| if b.1 > a.1 { b } else { a });
        let tied: f64 = pmf.iter().filter(|(_, p)| (p - pmax).abs() < 1e-12 * pmax).map(|(_, p)| p).sum();
        let r = similar_test(&d, &mode, 0, SamplerKind::Enumeration, 0, &McmcOptions::default()).unwrap();
        assert!((r.significance - (1.0 - tied)).abs() < 1e-12);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn report_is_reproducible() {
        let d = AHypDistribution::new(ProblemSpec::new(10, 4).unwrap(), vec![1.0; 7]).unwrap();
        let s = SizeIndex(vec![2, 0, 0, 2, 0, 0, 0]);
        let a = similar_test(&d, &s, 2000, SamplerKind::Mcmc, 11, &McmcOptions::default()).unwrap();
        let b = similar_test(&d, &s, 2000, SamplerKind::Mcmc, 11, &McmcOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.significance));
        assert!((a.std_error - (a.significance * (1.0 - a.significance) / 2000.0).sqrt()).abs() < 1e-15);
    }
}
