//! Metropolis-Hastings on a fiber with the moves
//! `z = e_{i1} + e_{i4} - e_{i1+1} - e_{i4-1}`, `i1 + 2 ≤ i4 ≤ n-k+1`.
//! Each move preserves `Σ s_i` and `Σ i s_i`.

use super::rng_from_seed;
use crate::error::{domain, Result};
use crate::inference::AHypDistribution;
use crate::partition::{enumerate_support, ProblemSpec, SizeIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkovMove {
    pub i1: usize,
    pub i4: usize,
}

impl MarkovMove {
    /// `(index, change)` pairs of `z`; the middle entries merge when `i4 = i1 + 2`.
    fn entries(&self) -> Vec<(usize, i64)> {
        let mut out = vec![(self.i1, 1), (self.i4, 1)];
        if self.i4 == self.i1 + 2 {
            out.push((self.i1 + 1, -2));
        } else {
            out.push((self.i1 + 1, -1));
            out.push((self.i4 - 1, -1));
        }
        out
    }

    pub fn vector(&self, len: usize) -> Vec<i64> {
        let mut z = vec![0; len];
        for (i, c) in self.entries() {
            z[i - 1] += c;
        }
        z
    }

    /// `s + ε z`, or `None` if a coordinate would go negative.
    pub fn apply(&self, s: &SizeIndex, eps: i64) -> Option<SizeIndex> {
        let mut t = s.0.clone();
        for (i, c) in self.entries() {
            let v = t[i - 1] as i64 + eps * c;
            if v < 0 {
                return None;
            }
            t[i - 1] = v as u64;
        }
        Some(SizeIndex(t))
    }
}

pub fn markov_basis(spec: &ProblemSpec) -> Vec<MarkovMove> {
    let m = spec.len();
    (1..=m).flat_map(|i1| (i1 + 2..=m).map(move |i4| MarkovMove { i1, i4 })).collect()
}

/// `q(s + ε z)/q(s)`; zero when the move leaves the orthant.
///
/// Equals `(x_{i1} x_{i4} / (x_{i1+1} x_{i4-1}))^ε` times the ratio of
/// factorials `s!/(s + ε z)!`.
pub fn mh_ratio(dist: &AHypDistribution, s: &SizeIndex, mv: &MarkovMove, eps: i64) -> f64 {
    let Some(t) = mv.apply(s, eps) else { return 0.0 };
    let x = &dist.x;
    let mut ln_r = 0.0;
    for (i, c) in mv.entries() {
        let e = eps * c;
        ln_r += e as f64 * x[i - 1].ln();
        let (a, b) = (s.0[i - 1], t.0[i - 1]);
        // ln(a!/b!)
        ln_r += if a >= b { (b + 1..=a).map(|v| (v as f64).ln()).sum::<f64>() } else { -(a + 1..=b).map(|v| (v as f64).ln()).sum::<f64>() };
    }
    ln_r.exp()
}

/// One step: uniform proposal over `(move, ε)`, accepted with `min(1, ratio)`.
pub fn mcmc_step<R: Rng + ?Sized>(s: &SizeIndex, basis: &[MarkovMove], dist: &AHypDistribution, rng: &mut R) -> SizeIndex {
    if basis.is_empty() {
        return s.clone();
    }
    let mv = basis[rng.random_range(0..basis.len())];
    let eps = if rng.random::<bool>() { 1 } else { -1 };
    let r = mh_ratio(dist, s, &mv, eps);
    if r >= 1.0 || rng.random::<f64>() < r {
        mv.apply(s, eps).unwrap_or_else(|| s.clone())
    } else {
        s.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McmcOptions {
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for McmcOptions {
    fn default() -> Self {
        McmcOptions { burn_in: 1000, thin: 1 }
    }
}

/// `m` states recorded every `thin` steps after `burn_in` steps from `start`.
pub fn mcmc_chain(
    dist: &AHypDistribution,
    start: &SizeIndex,
    m: usize,
    opts: &McmcOptions,
    seed: u64,
) -> Result<Vec<SizeIndex>> {
    if dist.spec.is_restricted() {
        return domain("the Markov basis connects unrestricted fibers only");
    }
    if !start.is_in(&dist.spec) {
        return domain("the chain must start in the support");
    }
    if opts.thin == 0 {
        return domain("thin must be at least 1");
    }
    let basis = markov_basis(&dist.spec);
    let mut rng = rng_from_seed(seed);
    let mut s = start.clone();
    for _ in 0..opts.burn_in {
        s = mcmc_step(&s, &basis, dist, &mut rng);
    }
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        for _ in 0..opts.thin {
            s = mcmc_step(&s, &basis, dist, &mut rng);
        }
        out.push(s.clone());
    }
    Ok(out)
}

/// Exact transition matrix of the chain on the enumerated fiber.
pub fn transition_matrix(dist: &AHypDistribution) -> Result<(Vec<SizeIndex>, Vec<Vec<f64>>)> {
    if dist.spec.is_restricted() {
        return domain("the Markov basis connects unrestricted fibers only");
    }
    let states = enumerate_support(&dist.spec)?;
    let index: HashMap<Vec<u64>, usize> = states.iter().enumerate().map(|(i, s)| (s.0.clone(), i)).collect();
    let basis = markov_basis(&dist.spec);
    let prop = if basis.is_empty() { 0.0 } else { 1.0 / (2 * basis.len()) as f64 };
    let mut p = vec![vec![0.0; states.len()]; states.len()];
    for (a, s) in states.iter().enumerate() {
        let mut stay = 1.0;
        for mv in &basis {
            for eps in [1, -1] {
                if let Some(t) = mv.apply(s, eps) {
                    let w = prop * mh_ratio(dist, s, mv, eps).min(1.0);
                    p[a][index[&t.0]] += w;
                    stay -= w;
                }
            }
        }
        p[a][a] += stay;
    }
    Ok((states, p))
}

/// Power iteration `π ← π P` from the uniform vector until the L1 change is below `tol`.
pub fn stationary_distribution(p: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<f64> {
    let m = p.len();
    let mut pi = vec![1.0 / m as f64; m];
    for _ in 0..max_iter {
        let mut next = vec![0.0; m];
        for (a, row) in p.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                next[b] += pi[a] * v;
            }
        }
        let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta < tol {
            break;
        }
    }
    pi
}

/// Connected components of the move graph on the fiber.
pub fn fiber_components(spec: &ProblemSpec) -> Result<usize> {
    let states = enumerate_support(spec)?;
    let index: HashMap<Vec<u64>, usize> = states.iter().enumerate().map(|(i, s)| (s.0.clone(), i)).collect();
    let basis = markov_basis(spec);
    let mut seen = vec![false; states.len()];
    let mut comps = 0;
    for root in 0..states.len() {
        if seen[root] {
            continue;
        }
        comps += 1;
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(a) = stack.pop() {
            for mv in &basis {
                for eps in [1, -1] {
                    if let Some(t) = mv.apply(&states[a], eps) {
                        let b = index[&t.0];
                        if !seen[b] {
                            seen[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
    }
    Ok(comps)
}
