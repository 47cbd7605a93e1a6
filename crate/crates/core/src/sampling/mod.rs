//! Exact sequential sampling, Markov-basis Metropolis-Hastings, and similar
//! tests for the A-hypergeometric distribution.

mod exact;
mod mcmc;
mod similar;

pub use exact::{exact_sampler_distribution, sample_exact, ExactSampler};
pub use mcmc::{
    fiber_components, markov_basis, mcmc_chain, mcmc_step, mh_ratio, stationary_distribution, transition_matrix,
    MarkovMove, McmcOptions,
};
pub use similar::{similar_test, SamplerKind, TestReport};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every sampler is driven by ChaCha8 seeded from a `u64`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
