//! Sequential cluster-size sampler.
//!
//! With `n'` items and `k'` blocks left, the next block has size `j` with
//! probability `x_j Z_{n'-j,k'-1} / (k' Z_{n',k'})`. An ordered sequence of
//! sizes then has probability `Π x_j / (k! Z)`, and the `k!/Π s_i!` orderings
//! of one size index sum to `q(s)`.

use super::rng_from_seed;
use crate::error::{Error, Result};
use crate::inference::AHypDistribution;
use crate::partition::{enumerate_support, SizeIndex};
use crate::recurrence::{shift_lower, z_table};
use crate::scaled::Scaled;
use crate::scalar::Weight;
use num_traits::Zero;
use rand::Rng;

/// Sequential probabilities must sum to one to this tolerance.
const SUM_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ExactSampler {
    len: usize,
    /// Size offset from the lower restriction.
    shift: usize,
    k: usize,
    n: usize,
    /// `cdf[k'][n'-k']` over sizes `1..=n'-k'+1` of the shifted problem.
    cdf: Vec<Vec<Vec<f64>>>,
}

impl ExactSampler {
    pub fn new(dist: &AHypDistribution) -> Result<Self> {
        let spec = &dist.spec;
        let xs: Vec<Scaled<f64>> = dist.x.iter().map(|&v| Scaled::from_real(v)).collect();
        let (s, xsh) = shift_lower(spec, &xs);
        let d = s.d();
        let t = z_table(&xsh, s.k, d);
        let mut cdf = vec![Vec::new(); s.k + 1];
        for kp in 1..=s.k {
            for dd in 0..=d {
                let np = kp + dd;
                let z = t.get(np, kp);
                let mut acc = 0.0;
                let mut row = Vec::with_capacity(dd + 1);
                for j in 1..=dd + 1 {
                    if z.is_zero() {
                        row.push(f64::NAN);
                        continue;
                    }
                    let p = (xsh[j - 1] * t.get(np - j, kp - 1) / (Scaled::uint(kp) * z)).to_real();
                    acc += p;
                    row.push(acc);
                }
                if !z.is_zero() && (acc - 1.0).abs() > SUM_TOL {
                    return Err(Error::Numeric(format!(
                        "sequential probabilities at (n'={np}, k'={kp}) sum to {acc}"
                    )));
                }
                cdf[kp].push(row);
            }
        }
        Ok(ExactSampler { len: spec.len(), shift: spec.lo() - 1, k: s.k, n: s.n, cdf })
    }

    /// Step probability of size `j` (shifted) at `(n', k')`.
    fn step_prob(&self, np: usize, kp: usize, j: usize) -> f64 {
        let row = &self.cdf[kp][np - kp];
        row[j - 1] - if j > 1 { row[j - 2] } else { 0.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SizeIndex {
        let mut s = vec![0u64; self.len];
        let (mut np, mut kp) = (self.n, self.k);
        while kp > 0 {
            let row = &self.cdf[kp][np - kp];
            let u: f64 = rng.random::<f64>() * row[row.len() - 1];
            let j = row.iter().position(|&c| c > u).unwrap_or(row.len() - 1) + 1;
            s[j + self.shift - 1] += 1;
            np -= j;
            kp -= 1;
        }
        SizeIndex(s)
    }

    /// Probability the sampler returns `s`: one ordering's telescoped product times `k!/Π s_i!`.
    pub fn probability(&self, s: &SizeIndex) -> f64 {
        let mut ln_p = 0.0;
        let (mut np, mut kp) = (self.n, self.k);
        for (i, &c) in s.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if i < self.shift {
                return 0.0;
            }
            let j = i + 1 - self.shift;
            for _ in 0..c {
                if kp == 0 || np < j + kp - 1 || j > np - kp + 1 {
                    return 0.0;
                }
                ln_p += self.step_prob(np, kp, j).ln();
                np -= j;
                kp -= 1;
            }
        }
        if kp != 0 || np != 0 {
            return 0.0;
        }
        (ln_p + libm::lgamma(self.k as f64 + 1.0) - s.ln_factorial()).exp()
    }
}

/// One exact draw.
pub fn sample_exact(dist: &AHypDistribution, seed: u64) -> Result<SizeIndex> {
    Ok(ExactSampler::new(dist)?.sample(&mut rng_from_seed(seed)))
}

/// The sampler's induced law on the enumerated support.
pub fn exact_sampler_distribution(dist: &AHypDistribution) -> Result<Vec<(SizeIndex, f64)>> {
    let sampler = ExactSampler::new(dist)?;
    Ok(enumerate_support(&dist.spec)?
        .into_iter()
        .map(|s| {
            let p = sampler.probability(&s);
            (s, p)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::ProblemSpec;
    use std::collections::HashMap;

    #[test]
    fn four_two_frequencies() {
        let d = AHypDistribution::new(ProblemSpec::new(4, 2).unwrap(), vec![1.0; 3]).unwrap();
        let sampler = ExactSampler::new(&d).unwrap();
        let mut rng = rng_from_seed(1);
        let m = 100_000;
        let hits = (0..m).filter(|_| sampler.sample(&mut rng).0 == vec![1, 0, 1]).count() as f64;
        let p = 2.0 / 3.0;
        let sigma = (p * (1.0 - p) / m as f64).sqrt();
        assert!((hits / m as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn degenerate_shapes_are_deterministic() {
        for k in 1..8usize {
            let d = AHypDistribution::new(ProblemSpec::new(k, k).unwrap(), vec![0.7]).unwrap();
            assert_eq!(sample_exact(&d, 3).unwrap().0, vec![k as u64]);
            let d = AHypDistribution::new(ProblemSpec::new(k + 1, k).unwrap(), vec![0.7, 1.9]).unwrap();
            let mut want = vec![k as u64 - 1, 1];
            if k == 1 {
                want = vec![0, 1];
            }
            assert_eq!(sample_exact(&d, 5).unwrap().0, want);
        }
    }

    #[test]
    fn induced_law_is_q_on_restricted_supports() {
        let spec = ProblemSpec::with_bounds(14, 4, Some(2), Some(6)).unwrap();
        let x: Vec<f64> = (1..=spec.len()).map(|i| 1.0 / i as f64).collect();
        let d = AHypDistribution::new(spec, x).unwrap();
        let q: HashMap<_, _> = d.enumerate_pmf().unwrap().into_iter().map(|(s, p)| (s.0, p)).collect();
        let induced = exact_sampler_distribution(&d).unwrap();
        let tv: f64 = induced.iter().map(|(s, p)| (p - q[&s.0]).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-12, "{tv}");
        let sampler = ExactSampler::new(&d).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..200 {
            assert!(sampler.sample(&mut rng).is_in(&d.spec));
        }
    }
}
