//! The A-hypergeometric distribution on partitions of `n` into `k` blocks,
//! its moment map and Fisher metric, and maximum-likelihood estimation.

mod curved;
mod full;
mod moments;

pub use curved::{
    asymptotic_variance, dm_log_normalizer, dm_mle_exists, dm_moments, mle_curved, mle_exists_cubic, CubicCheck,
    CurvedModel, CURVED_LEFT, CURVED_RIGHT,
};
pub use full::{mle_full, MleAlgo, MleOptions, MleReport, MleStatus};
pub use moments::{moment_map, moment_map_in, pfaffian_metric, MomentState};

use crate::error::{domain, Result};
use crate::partition::{enumerate_support, ProblemSpec, SizeIndex};
use crate::recurrence::recurrence_z_scaled;
use serde::{Deserialize, Serialize};

/// `q(s; x) = x^s / (s! Z_{n,k}(x))` on the (possibly restricted) support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AHypDistribution {
    pub spec: ProblemSpec,
    pub x: Vec<f64>,
}

impl AHypDistribution {
    pub fn new(spec: ProblemSpec, x: Vec<f64>) -> Result<Self> {
        spec.check_len(&x)?;
        if x.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return domain("indeterminates must be finite and nonnegative");
        }
        let d = AHypDistribution { spec, x };
        if d.log_z()? == f64::NEG_INFINITY {
            return domain("Z vanishes: no support point has positive weight");
        }
        Ok(d)
    }

    pub fn log_z(&self) -> Result<f64> {
        Ok(recurrence_z_scaled(&self.spec, &self.x)?.log())
    }

    /// `Σ s_i ln x_i - ln s! - ln Z`.
    pub fn log_pmf(&self, s: &SizeIndex) -> Result<f64> {
        if !s.is_in(&self.spec) {
            return domain(format!("size index {:?} is not in the support", s.0));
        }
        Ok(self.log_weight(s) - self.log_z()?)
    }

    fn log_weight(&self, s: &SizeIndex) -> f64 {
        s.0.iter()
            .zip(&self.x)
            .filter(|(&m, _)| m > 0)
            .map(|(&m, &xi)| m as f64 * xi.ln())
            .sum::<f64>()
            - s.ln_factorial()
    }

    /// Support with probabilities, in enumeration order.
    pub fn enumerate_pmf(&self) -> Result<Vec<(SizeIndex, f64)>> {
        let lz = self.log_z()?;
        Ok(enumerate_support(&self.spec)?
            .into_iter()
            .map(|s| {
                let p = (self.log_weight(&s) - lz).exp();
                (s, p)
            })
            .collect())
    }
}
