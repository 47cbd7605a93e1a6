use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rnc_core::partition::{
    enumerate_support, odds_from_x, oracle_z, partition_count, polytope_membership, torus_act, Membership, ProblemSpec,
};

fn p_count(n: usize, k: usize) -> u128 {
    let mut t = vec![vec![0u128; k + 1]; n + 1];
    t[0][0] = 1;
    for a in 1..=n {
        for b in 1..=k.min(a) {
            t[a][b] = t[a - 1][b - 1] + if a >= b { t[a - b][b] } else { 0 };
        }
    }
    t[n][k]
}

#[test]
fn enumeration_satisfies_constraints_and_counts() {
    for n in 1..=24 {
        for k in 1..=n {
            let spec = ProblemSpec::new(n, k).unwrap();
            let sup = enumerate_support(&spec).unwrap();
            assert_eq!(sup.len() as u128, p_count(n, k));
            assert_eq!(partition_count(n, k), p_count(n, k));
            for s in &sup {
                assert_eq!(s.blocks(), k);
                assert_eq!(s.total(), n);
            }
        }
    }
}

#[test]
fn oracle_at_ones_is_binomial_over_factorial() {
    for n in 1..=30usize {
        for k in 1..=n {
            let spec = ProblemSpec::new(n, k).unwrap();
            let z: BigRational = oracle_z(&spec, &vec![BigRational::from_integer(1.into()); spec.len()]).unwrap();
            let binom = (0..k - 1).fold(BigInt::from(1), |a, j| a * BigInt::from(n - 1 - j) / BigInt::from(j + 1));
            let fact = (1..=k).fold(BigInt::from(1), |a, j| a * BigInt::from(j));
            assert_eq!(z, BigRational::new(binom, fact), "n={n} k={k}");
        }
    }
}

#[test]
fn single_observations_are_never_interior() {
    for n in 4..=14 {
        for k in 2..=n - 2 {
            let spec = ProblemSpec::new(n, k).unwrap();
            for s in enumerate_support(&spec).unwrap() {
                assert_ne!(polytope_membership(&s.as_f64(), &spec).unwrap(), Membership::Interior, "{:?}", s.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn odds_are_torus_invariant(
        logs in prop::collection::vec(-3.0f64..3.0, 8),
        s1 in -2.0f64..2.0,
        s2 in -2.0f64..2.0,
    ) {
        let x: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
        let y = odds_from_x(&x).unwrap();
        let moved = odds_from_x(&torus_act(&x, s1.exp(), s2.exp())).unwrap();
        for (a, b) in y.iter().zip(&moved) {
            prop_assert!((a - b).abs() < 1e-12 * a.abs());
        }
    }
}
