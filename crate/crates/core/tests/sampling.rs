use proptest::prelude::*;
use rnc_core::inference::AHypDistribution;
use rnc_core::partition::{ProblemSpec, SizeIndex};
use rnc_core::sampling::{
    exact_sampler_distribution, fiber_components, mcmc_chain, rng_from_seed, similar_test, stationary_distribution,
    transition_matrix, ExactSampler, McmcOptions, SamplerKind,
};
use std::collections::HashMap;

#[test]
fn markov_basis_connects_every_fiber_up_to_fifteen() {
    for n in 1..=15 {
        for k in 1..=n {
            assert_eq!(fiber_components(&ProblemSpec::new(n, k).unwrap()).unwrap(), 1, "n={n} k={k}");
        }
    }
}

#[test]
fn chain_is_stationary_at_q() {
    for n in 4..=10 {
        for k in 2..=n - 2 {
            let spec = ProblemSpec::new(n, k).unwrap();
            let x: Vec<f64> = (1..=spec.len()).map(|i| 0.5 + ((i * 7) % 5) as f64 / 3.0).collect();
            let d = AHypDistribution::new(spec, x).unwrap();
            let q: HashMap<_, _> = d.enumerate_pmf().unwrap().into_iter().map(|(s, p)| (s.0, p)).collect();
            let (states, p) = transition_matrix(&d).unwrap();
            let pi = stationary_distribution(&p, 1e-15, 1_000_000);
            for (s, v) in states.iter().zip(&pi) {
                assert!((v - q[&s.0]).abs() < 1e-10, "n={n} k={k}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_sampler_law_is_q(n in 3usize..13, kf in 0.0f64..1.0, logs in prop::collection::vec(-2.0f64..2.0, 12)) {
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let spec = ProblemSpec::new(n, k).unwrap();
        let x: Vec<f64> = logs[..spec.len()].iter().map(|v| v.exp()).collect();
        let d = AHypDistribution::new(spec, x).unwrap();
        let q: HashMap<_, _> = d.enumerate_pmf().unwrap().into_iter().map(|(s, p)| (s.0, p)).collect();
        let tv: f64 = exact_sampler_distribution(&d).unwrap().iter().map(|(s, p)| (p - q[&s.0]).abs()).sum::<f64>() / 2.0;
        prop_assert!(tv < 1e-12, "{}", tv);
    }
}

fn empirical_tv(d: &AHypDistribution, draws: &[SizeIndex]) -> (f64, usize) {
    let q: HashMap<_, _> = d.enumerate_pmf().unwrap().into_iter().map(|(s, p)| (s.0, p)).collect();
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for s in draws {
        *counts.entry(s.0.clone()).or_default() += 1;
    }
    let m = draws.len() as f64;
    let tv = q.iter().map(|(s, p)| (counts.get(s).copied().unwrap_or(0) as f64 / m - p).abs()).sum::<f64>() / 2.0;
    (tv, q.len())
}

#[test]
fn empirical_tv_is_within_the_sampling_bound() {
    let m = 100_000;
    for (n, k) in [(10, 4), (12, 5), (9, 3)] {
        let spec = ProblemSpec::new(n, k).unwrap();
        let x: Vec<f64> = (1..=spec.len()).map(|i| 1.0 / i as f64).collect();
        let d = AHypDistribution::new(spec, x).unwrap();
        let sampler = ExactSampler::new(&d).unwrap();
        let mut rng = rng_from_seed(2024);
        let draws: Vec<SizeIndex> = (0..m).map(|_| sampler.sample(&mut rng)).collect();
        let (tv, support) = empirical_tv(&d, &draws);
        assert!(tv < 4.0 * (support as f64 / m as f64).sqrt(), "n={n} k={k} tv={tv}");
    }
}

#[test]
fn mcmc_chain_matches_q() {
    let spec = ProblemSpec::new(10, 4).unwrap();
    let d = AHypDistribution::new(spec, vec![1.0; 7]).unwrap();
    let start = SizeIndex(vec![2, 0, 0, 2, 0, 0, 0]);
    let chain = mcmc_chain(&d, &start, 100_000, &McmcOptions { burn_in: 1000, thin: 5 }, 7).unwrap();
    let (tv, support) = empirical_tv(&d, &chain);
    assert!(tv < 4.0 * (support as f64 / 20_000.0).sqrt(), "tv={tv}");
}

#[test]
fn monte_carlo_significance_agrees_with_enumeration() {
    let opts = McmcOptions::default();
    let cases: Vec<(ProblemSpec, Vec<f64>, SizeIndex)> = vec![
        (ProblemSpec::new(10, 4).unwrap(), vec![1.0; 7], SizeIndex(vec![2, 0, 0, 2, 0, 0, 0])),
        (ProblemSpec::new(10, 4).unwrap(), (1..=7).map(|i| 1.0 / i as f64).collect(), SizeIndex(vec![1, 1, 1, 1, 0, 0, 0])),
        (ProblemSpec::new(12, 5).unwrap(), (1..=8).map(|i| 1.0 / i as f64).collect(), SizeIndex(vec![3, 0, 0, 1, 1, 0, 0, 0])),
    ];
    for (spec, x, s) in cases {
        let d = AHypDistribution::new(spec, x).unwrap();
        let exact = similar_test(&d, &s, 0, SamplerKind::Enumeration, 0, &opts).unwrap();
        let mc = similar_test(&d, &s, 100_000, SamplerKind::Exact, 99, &opts).unwrap();
        let sigma = (exact.significance * (1.0 - exact.significance) / 100_000.0).sqrt();
        assert!((mc.significance - exact.significance).abs() < 3.0 * sigma.max(1e-9), "{mc:?} vs {exact:?}");
    }
}
