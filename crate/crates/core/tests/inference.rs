use proptest::prelude::*;
use rnc_core::inference::{
    mle_curved, mle_exists_cubic, mle_full, moment_map, AHypDistribution, CurvedModel, MleAlgo, MleOptions,
};
use rnc_core::partition::{affine_dimension, canonical_x, polytope_membership, Membership, ProblemSpec};
use rnc_core::recurrence::recurrence_z_scaled;

fn spec_strategy() -> impl Strategy<Value = ProblemSpec> {
    (6usize..14).prop_flat_map(|n| (Just(n), 2usize..=n - 2)).prop_map(|(n, k)| ProblemSpec::new(n, k).unwrap())
}

fn spec_and_x() -> impl Strategy<Value = (ProblemSpec, Vec<f64>)> {
    spec_strategy().prop_flat_map(|s| {
        let len = s.len();
        (Just(s), prop::collection::vec(-2.0f64..2.0, len).prop_map(|v| v.into_iter().map(f64::exp).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moment_image_is_interior((spec, x) in spec_and_x()) {
        let st = moment_map(&spec, &x).unwrap();
        prop_assert_eq!(polytope_membership(&st.eta, &spec).unwrap(), Membership::Interior);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmf_sums_to_one((spec, x) in spec_and_x()) {
        let d = AHypDistribution::new(spec, x).unwrap();
        let total: f64 = d.enumerate_pmf().unwrap().iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eta_is_the_gradient_of_log_z((spec, x) in spec_and_x()) {
        let st = moment_map(&spec, &x).unwrap();
        let h = 1e-5;
        for i in 0..spec.len() {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[i] *= f64::exp(h);
            dn[i] *= f64::exp(-h);
            let fd = (recurrence_z_scaled(&spec, &up).unwrap().log() - recurrence_z_scaled(&spec, &dn).unwrap().log()) / (2.0 * h);
            prop_assert!((fd - st.eta[i]).abs() < 1e-6 * st.eta[i].abs().max(1.0), "i={} fd={} eta={}", i, fd, st.eta[i]);
        }
    }

    #[test]
    fn metric_rank_is_the_polytope_dimension((spec, x) in spec_and_x()) {
        let st = moment_map(&spec, &x).unwrap();
        let len = spec.len();
        let g = nalgebra::DMatrix::from_fn(len, len, |i, j| st.g[i][j]);
        prop_assert!((0..len).all(|i| (0..len).all(|j| (g[(i, j)] - g[(j, i)]).abs() < 1e-12)));
        let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let top = ev[len - 1];
        prop_assert!(ev[0].abs() < 1e-8 * top && ev[1].abs() < 1e-8 * top, "{:?}", ev);
        let rank = ev.iter().filter(|v| **v > 1e-12 * top).count();
        prop_assert_eq!(rank, affine_dimension(&spec).unwrap());
        if 2 * spec.k >= spec.n {
            prop_assert_eq!(rank, spec.n - spec.k - 1);
        }
    }

    #[test]
    fn full_mle_recovers_the_odds(y in prop::collection::vec(-1.5f64..1.5, 4), newton in any::<bool>()) {
        let spec = ProblemSpec::new(9, 4).unwrap();
        let y: Vec<f64> = y.into_iter().map(f64::exp).collect();
        let eta = moment_map(&spec, &canonical_x(&y)).unwrap().eta;
        let algo = if newton { MleAlgo::Newton } else { MleAlgo::Gradient };
        let r = mle_full(&spec, &eta, &MleOptions { algo, tol: 1e-12, ..Default::default() }).unwrap();
        for (a, b) in r.estimate.unwrap().iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-8 * b.max(1.0), "{} vs {}", a, b);
        }
    }
}

#[test]
fn moment_map_is_injective_at_small_separation() {
    let spec = ProblemSpec::new(8, 5).unwrap();
    let base = [0.8, 1.7];
    let eta0 = moment_map(&spec, &canonical_x(&base)).unwrap().eta;
    for dir in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
        let y = [base[0] + 1e-6 * dir[0], base[1] + 1e-6 * dir[1]];
        let eta = moment_map(&spec, &canonical_x(&y)).unwrap().eta;
        let dist: f64 = eta.iter().zip(&eta0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(dist > 0.0);
    }
}

/// Points of the `k = n-3` polytope: `s̄ = (k - s2 - s3 - s4, s2, s3, s4)` with `s2 = 3 - 2 s3 - 3 s4`.
fn cubic_grid(n: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for a in 0..10 {
        for b in 0..10 {
            let s4 = (b as f64 + 0.5) / 10.0;
            let s3 = (a as f64 + 0.5) / 10.0 * (3.0 - 3.0 * s4) / 2.0;
            let s2 = 3.0 - 2.0 * s3 - 3.0 * s4;
            let s1 = (n - 3) as f64 - s2 - s3 - s4;
            out.push([s1, s2, s3, s4]);
        }
    }
    out
}

#[test]
fn curved_mle_exists_iff_cubic_predicate() {
    for n in [8usize, 10, 12] {
        let spec = ProblemSpec::new(n, n - 3).unwrap();
        let grid = cubic_grid(n);
        assert_eq!(grid.len(), 100);
        let mut both = [0usize; 2];
        for s in grid {
            let want = mle_exists_cubic(&spec, &s).unwrap().exists;
            let got = mle_curved(CurvedModel::Gfc, &spec, &s, 1e-12).unwrap().exists();
            assert_eq!(got, want, "n={n} sbar={s:?}");
            both[want as usize] += 1;
        }
        assert!(both[0] > 0 && both[1] > 0, "grid must straddle the boundary: {both:?}");
    }
}

#[test]
fn single_observation_has_a_curved_mle() {
    for n in 7..16usize {
        let spec = ProblemSpec::new(n, n - 3).unwrap();
        let s = [n as f64 - 5.0, 1.0, 1.0, 0.0];
        let r = mle_curved(CurvedModel::Gfc, &spec, &s, 1e-12).unwrap();
        assert!(r.exists() && r.estimate.unwrap() < 1.0);
    }
}
