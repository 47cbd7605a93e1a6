//! Supports of the rational normal curve polynomials and their geometry.

mod enumerate;
mod odds;
mod oracle;
mod polytope;
mod special;

pub use enumerate::{enumerate_support, enumerate_support_capped, partition_count, DEFAULT_CAP};
pub use odds::{canonical_x, odds_from_x, torus_act};
pub use oracle::{monomial_term, oracle_z};
pub use polytope::{affine_dimension, polytope_membership, Membership};
pub use special::{special_value, SpecialPoint};

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// Total size `n`, block count `k` and optional part-size bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
}

impl ProblemSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_bounds(n, k, None, None)
    }

    pub fn with_bounds(n: usize, k: usize, r_min: Option<usize>, r_max: Option<usize>) -> Result<Self> {
        if k == 0 || k > n {
            return domain(format!("need 1 <= k <= n, got n={n}, k={k}"));
        }
        let s = ProblemSpec { n, k, r_min, r_max };
        if s.lo() == 0 || (r_max.is_some() && s.hi() < s.lo()) {
            return domain(format!("invalid part-size bounds [{:?}, {:?}]", r_min, r_max));
        }
        Ok(s)
    }

    /// `n - k`.
    pub fn d(&self) -> usize {
        self.n - self.k
    }

    /// Number of indeterminates, `n - k + 1`.
    pub fn len(&self) -> usize {
        self.n - self.k + 1
    }

    /// Smallest admissible part.
    pub fn lo(&self) -> usize {
        self.r_min.unwrap_or(1)
    }

    /// Largest admissible part, never above `n - k + 1`.
    pub fn hi(&self) -> usize {
        self.r_max.unwrap_or(self.len()).min(self.len())
    }

    pub fn is_restricted(&self) -> bool {
        self.lo() > 1 || self.hi() < self.len()
    }

    /// Whether `b` lies in the semigroup spanned by the admissible columns.
    pub fn support_nonempty(&self) -> bool {
        self.lo() <= self.hi() && self.lo() * self.k <= self.n && self.n <= self.hi() * self.k
    }

    pub fn unrestricted(&self) -> Self {
        ProblemSpec { n: self.n, k: self.k, r_min: None, r_max: None }
    }

    pub(crate) fn check_len<T>(&self, x: &[T]) -> Result<()> {
        if x.len() != self.len() {
            return domain(format!("expected {} indeterminates, got {}", self.len(), x.len()));
        }
        Ok(())
    }
}

/// Block-size multiplicities: `s[i-1]` blocks of size `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SizeIndex(pub Vec<u64>);

impl SizeIndex {
    /// Builds from multiplicities, trimming or zero-padding to `len`.
    pub fn padded(mut s: Vec<u64>, len: usize) -> Result<Self> {
        if s.iter().skip(len).any(|&v| v != 0) {
            return domain("size index has a nonzero entry beyond n-k+1");
        }
        s.resize(len, 0);
        Ok(SizeIndex(s))
    }

    pub fn total(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &v)| (i + 1) * v as usize).sum()
    }

    pub fn blocks(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }

    pub fn is_in(&self, spec: &ProblemSpec) -> bool {
        self.0.len() == spec.len()
            && self.total() == spec.n
            && self.blocks() == spec.k
            && self.0.iter().enumerate().all(|(i, &v)| v == 0 || (spec.lo()..=spec.hi()).contains(&(i + 1)))
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }

    /// `ln Π s_i!`.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&v| libm::lgamma(v as f64 + 1.0)).sum()
    }
}
