//! Statistical checks of the samplers against the closed-form moments and
//! CDFs.

use ltharvest::distributions::{std_normal_cdf, std_normal_quantile, DistributionSpec};
use ltharvest::stats::{ks_distance, mean_and_se};
use ltharvest::RandomStream;
use proptest::prelude::*;

const N: usize = 1_000_000;

fn draws(spec: &DistributionSpec, seed: u64, residual: bool) -> Vec<f64> {
    let sampler = spec.sampler().unwrap();
    let mut rng = RandomStream::new(seed);
    (0..N)
        .map(|_| {
            if residual {
                sampler.sample_residual(&mut rng)
            } else {
                sampler.sample(&mut rng)
            }
        })
        .collect()
}

fn families() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::deterministic(2.0).unwrap(),
        DistributionSpec::uniform(0.0, 2.0).unwrap(),
        DistributionSpec::uniform(0.5, 1.5).unwrap(),
        DistributionSpec::exponential(2.0).unwrap(),
        DistributionSpec::gamma(2.5, 0.4).unwrap(),
        DistributionSpec::gamma(0.5, 2.0).unwrap(),
    ]
}

#[test]
fn law_of_large_numbers_examples() {
    let xs = draws(&DistributionSpec::uniform(0.0, 2.0).unwrap(), 11, false);
    let (m, _) = mean_and_se(&xs);
    assert!((m - 1.0).abs() < 0.01, "{m}");

    let xs = draws(&DistributionSpec::exponential(2.0).unwrap(), 12, false);
    let (m, _) = mean_and_se(&xs);
    assert!((m - 0.5).abs() < 0.01, "{m}");
}

#[test]
fn sample_moments_within_three_standard_errors() {
    for (i, spec) in families().into_iter().enumerate() {
        let mom = spec.moments().unwrap();
        let xs = draws(&spec, 100 + i as u64, false);
        let (m, se) = mean_and_se(&xs);
        assert!((m - mom.mean).abs() <= 3.0 * se + 1e-12, "{spec:?}: mean {m} vs {}", mom.mean);

        // Second central moment via squared deviations from the true mean.
        let sq: Vec<f64> = xs.iter().map(|x| (x - mom.mean).powi(2)).collect();
        let (v, se_v) = mean_and_se(&sq);
        assert!((v - mom.variance).abs() <= 3.0 * se_v + 1e-12, "{spec:?}: var {v}");

        let cubes: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
        let (m3, se3) = mean_and_se(&cubes);
        assert!((m3 - mom.third_moment).abs() <= 3.0 * se3 + 1e-9, "{spec:?}: m3 {m3}");
    }
}

#[test]
fn residual_mean_within_three_standard_errors() {
    for (i, spec) in families().into_iter().enumerate() {
        let target = spec.moments().unwrap().residual_mean();
        let xs = draws(&spec, 200 + i as u64, true);
        let (m, se) = mean_and_se(&xs);
        assert!((m - target).abs() <= 3.0 * se, "{spec:?}: {m} vs {target}");
    }
}

#[test]
fn residual_examples() {
    let xs = draws(&DistributionSpec::deterministic(2.0).unwrap(), 1, true);
    assert!(xs.iter().all(|&x| (0.0..=2.0).contains(&x)));
    assert!((mean_and_se(&xs).0 - 1.0).abs() < 0.01);

    let xs = draws(&DistributionSpec::uniform(0.0, 2.0).unwrap(), 2, true);
    assert!((mean_and_se(&xs).0 - 2.0 / 3.0).abs() < 0.01);

    // Memorylessness: the residual of an exponential is the exponential.
    let e = DistributionSpec::exponential(1.0).unwrap();
    let xs = draws(&e, 3, true);
    assert!(ks_distance(&xs, |x| e.cdf(x)) < 0.01);
}

#[test]
fn residual_samples_follow_residual_cdf() {
    for (i, spec) in families().into_iter().enumerate() {
        let xs = draws(&spec, 300 + i as u64, true);
        let d = ks_distance(&xs, |v| spec.residual_cdf(v));
        // 1.63 / sqrt(n) is the 1% critical value.
        assert!(d < 1.63 / (N as f64).sqrt(), "{spec:?}: KS {d}");
    }
}

#[test]
fn plain_samples_follow_cdf() {
    for (i, spec) in families().into_iter().enumerate().skip(1) {
        let xs = draws(&spec, 400 + i as u64, false);
        let d = ks_distance(&xs, |v| spec.cdf(v));
        assert!(d < 1.63 / (N as f64).sqrt(), "{spec:?}: KS {d}");
    }
}

fn continuous_family() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.0f64..3.0, 0.01f64..5.0).prop_map(|(l, w)| DistributionSpec::Uniform { low: l, high: l + w }),
        (0.05f64..20.0).prop_map(|r| DistributionSpec::Exponential { rate: r }),
        (0.2f64..30.0, 0.05f64..5.0).prop_map(|(s, sc)| DistributionSpec::Gamma { shape: s, scale: sc }),
    ]
}

proptest! {
    #[test]
    fn cdf_quantile_round_trip(spec in continuous_family()) {
        for i in 1..100 {
            let q = i as f64 / 100.0;
            let x = spec.quantile(q).unwrap();
            prop_assert!((spec.cdf(x) - q).abs() < 1e-9, "{:?} q={} x={}", spec, q, x);
        }
    }

    #[test]
    fn cdf_nondecreasing(spec in continuous_family(), xs in prop::collection::vec(-1.0f64..50.0, 2..50)) {
        let mut xs = xs;
        xs.sort_by(|a, b| a.total_cmp(b));
        for w in xs.windows(2) {
            prop_assert!(spec.cdf(w[0]) <= spec.cdf(w[1]));
        }
    }

    #[test]
    fn normal_round_trip(q in 1e-12f64..(1.0 - 1e-12)) {
        let x = std_normal_quantile(q).unwrap();
        prop_assert!((std_normal_cdf(x) - q).abs() < 1e-9);
    }
}

#[test]
fn point_mass_quantile_is_generalized_inverse() {
    // F jumps from 0 to 1 at the atom, so the inverse is the atom for every q.
    let d = DistributionSpec::deterministic(3.0).unwrap();
    for i in 1..100 {
        assert_eq!(d.quantile(i as f64 / 100.0).unwrap(), 3.0);
    }
}

#[test]
fn normal_cdf_accuracy_on_grid() {
    // Reference: 30-digit mpmath values of Phi at integer points.
    let reference = [
        (-8.0, 6.220_960_574_271_784e-16),
        (-6.0, 9.865_876_450_376_98e-10),
        (-4.0, 3.167_124_183_311_992e-5),
        (-2.0, 0.022_750_131_948_179_21),
        (0.0, 0.5),
        (2.0, 0.977_249_868_051_820_8),
        (4.0, 0.999_968_328_758_166_9),
        (6.0, 0.999_999_999_013_412_4),
        (8.0, 0.999_999_999_999_999_4),
    ];
    for (x, p) in reference {
        assert!((std_normal_cdf(x) - p).abs() < 1e-9, "x = {x}");
    }
}
