use num_rational::BigRational;
use proptest::prelude::*;
use rnc_core::dhgm::dhgm;
use rnc_core::gfc::gfc_x;
use rnc_core::hgm::hgm_gfc;
use rnc_core::partition::ProblemSpec;
use rnc_core::pfaffian::{gfc_p_tilde_inverse, invert_upper, p_tilde, theta_q};
use rnc_core::recurrence::{recurrence_z, recurrence_z_scaled};
use rnc_core::scalar::ratio;
use rnc_core::DoubleDouble;

fn spec_and_x(max_n: usize) -> impl Strategy<Value = (ProblemSpec, Vec<f64>)> {
    (5usize..=max_n)
        .prop_flat_map(|n| (Just(n), 2usize..=n - 3))
        .prop_flat_map(|(n, k)| {
            let s = ProblemSpec::new(n, k).unwrap();
            let l = s.len();
            (Just(s), prop::collection::vec(-1.5f64..1.5, l).prop_map(|v| v.into_iter().map(f64::exp).collect()))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn inverse_row_sums_are_symmetric((spec, x) in spec_and_x(16)) {
        let (n, k, d) = (spec.n, spec.k, spec.d());
        let xs: Vec<DoubleDouble> = x.iter().map(|&v| DoubleDouble::from(v)).collect();
        let inv: Vec<_> = (3..d).map(|i| invert_upper(&p_tilde(n, k, i, &xs).unwrap()).unwrap()).collect();
        let row_sum = |i: usize, j: usize| -> f64 {
            let m = &inv[i - 3];
            f64::from(m[j - 2 - 1].iter().fold(DoubleDouble::from(0.0), |a, b| a + *b))
        };
        for i in 3..d {
            for j in 3..d {
                if i + j <= d + 2 {
                    let (a, b) = (row_sum(i, j), row_sum(j, i));
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300), "i={} j={} {} {}", i, j, a, b);
                }
            }
        }
    }
}

#[test]
fn first_row_annihilators_through_theta() {
    for n in 4..=15usize {
        for k in 2..=n - 2 {
            let spec = ProblemSpec::new(n, k).unwrap();
            let x: Vec<BigRational> = (0..spec.len() as i64).map(|j| ratio((j * 5 + n as i64) % 9 + 1, j % 4 + 1)).collect();
            let z = recurrence_z(&spec, &x).unwrap();
            let mut total = ratio(0, 1);
            let mut degree = ratio(0, 1);
            for i in 1..=spec.len() {
                let t = theta_q(&spec, &x, i).unwrap()[0].clone();
                total += t.clone();
                degree += ratio(i as i64 - 1, 1) * t;
            }
            assert_eq!(total, ratio(k as i64, 1) * z.clone());
            assert_eq!(degree, ratio((n - k) as i64, 1) * z);
        }
    }
}

#[test]
fn methods_agree_on_the_gfc_curve() {
    for alpha in [-1.0, 0.1, 0.5] {
        for n in [12usize, 25, 40, 60] {
            for d in [2usize, 5, 10] {
                if d + 2 > n {
                    continue;
                }
                let spec = ProblemSpec::new(n, n - d).unwrap();
                let exact = recurrence_z_scaled(&spec, &gfc_x(DoubleDouble::from(alpha), spec.len())).unwrap().log();
                let exact = f64::from(exact);
                let h = hgm_gfc::<DoubleDouble>(&spec, alpha, 500).unwrap().log_z();
                let dh = dhgm(&spec, &gfc_x(DoubleDouble::from(alpha), spec.len())).unwrap().log_z();
                assert!((h - exact).abs() < 1e-6, "hgm n={n} d={d} a={alpha}: {h} vs {exact}");
                assert!((dh - exact).abs() < 1e-6, "dhgm n={n} d={d} a={alpha}: {dh} vs {exact}");
            }
        }
    }
}

#[test]
fn gfc_closed_form_inverse_matches_generic() {
    for n in (6..=40usize).step_by(2) {
        for d in 3..=8usize.min(n - 2) {
            let k = n - d;
            for alpha in [-2.5, 0.3] {
                let x = gfc_x(DoubleDouble::from(alpha), d + 1);
                for i in 1..d {
                    let generic = invert_upper(&p_tilde(n, k, i, &x).unwrap()).unwrap();
                    let closed = gfc_p_tilde_inverse(n, k, i, DoubleDouble::from(alpha)).unwrap();
                    for r in 0..generic.len() {
                        for c in r..generic.len() {
                            let (a, b) = (f64::from(generic[r][c]), f64::from(closed[r][c]));
                            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "n={n} i={i} ({r},{c})");
                        }
                    }
                }
            }
        }
    }
}
