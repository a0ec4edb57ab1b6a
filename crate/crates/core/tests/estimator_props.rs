use ergoq::estimators::{
    decay_delta, empirical_tail, queue_tail_run, sample_blocks, CumulantEstimate, DecayRate,
};
use ergoq::processes::{Process, ProcessSpec};
use proptest::prelude::*;

fn process(kind: &str, seed: u64) -> Process {
    ProcessSpec::new(kind.parse().unwrap(), seed).build().unwrap()
}

fn grid() -> Vec<f64> {
    (0..=40).map(|k| f64::from(k) * 0.1).collect()
}

fn unit_kind() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| format!("iid-bernoulli:{p}")),
        (0.01f64..1.0, 0.01f64..1.0).prop_map(|(a, b)| format!("binary-markov:{a},{b}")),
        (0.05f64..0.9).prop_map(|p| format!("iid-table:0={},0.5={},1={}", 1.0 - p, p / 2.0, p / 2.0)),
        Just("odometer:64".to_string()),
        Just("odometer:16,4".to_string()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jensen_hard_bound_and_monotonicity(kind in unit_kind(), seed in any::<u64>(), n in 1usize..80, m in 1usize..400) {
        let sample = sample_blocks(&process(&kind, seed), n, m, 0.0).unwrap();
        let mut previous = f64::NEG_INFINITY;
        for theta in grid() {
            let pt = sample.lambda_hat(theta);
            if theta == 0.0 {
                prop_assert_eq!(pt.lambda_hat, 0.0);
            }
            prop_assert!(pt.lambda_hat >= pt.jensen_floor, "{} < {}", pt.lambda_hat, pt.jensen_floor);
            prop_assert!(pt.lambda_hat >= 0.0 && pt.lambda_hat <= theta);
            prop_assert!(pt.lambda_hat >= previous);
            previous = pt.lambda_hat;
        }
    }

    #[test]
    fn constant_input_gives_linear_cumulant(value in (0u32..8).prop_map(|k| f64::from(k) / 4.0), theta in 0.0f64..5.0) {
        let kind = if value == 0.0 { "iid-bernoulli:0".to_string() } else { format!("iid-table:{value}=1") };
        let sample = sample_blocks(&process(&kind, 1), 17, 50, 0.0).unwrap();
        prop_assert_eq!(sample.lambda_hat(theta).lambda_hat, theta * value);
    }

    #[test]
    fn survival_is_nonincreasing(samples in prop::collection::vec(0.0f64..20.0, 1..500), mut qs in prop::collection::vec(0.0f64..25.0, 1..40)) {
        qs.sort_by(f64::total_cmp);
        let tail = empirical_tail(&samples, &qs).unwrap();
        prop_assert!(tail.survival.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(tail.survival.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }
}

fn bernoulli_root(p: f64, s: f64) -> f64 {
    let g = |t: f64| (1.0 - p + p * t.exp()).ln() - t * s;
    let (mut lo, mut hi) = (1e-9, 8.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn decay_rate_of_closed_form_curve() {
    let thetas: Vec<f64> = (0..=300).map(|k| f64::from(k) * 0.01).collect();
    let lambdas: Vec<f64> = thetas.iter().map(|t| (0.5 + 0.5 * t.exp()).ln()).collect();
    let curve = CumulantEstimate::from_curve(&thetas, &lambdas, 0.75).unwrap();
    let d = decay_delta(&curve, 0.75).unwrap().value().unwrap();
    assert!((d - bernoulli_root(0.5, 0.75)).abs() < 1e-4);
}

/// The fitted log-survival slope of the Bernoulli queue matches the decay
/// rate read off a short-block cumulant estimate. For iid input the block
/// cumulant is exact at every block length, and a short block keeps the
/// tilted region visible to plain Monte Carlo.
#[test]
fn tail_slope_matches_decay_rate() {
    let p = process("iid-bernoulli:0.5", 77);
    let thresholds: Vec<f64> = (0..=16).map(|k| f64::from(k) * 0.25).collect();
    let report = queue_tail_run(&p, 0.75, 100_000, 2_000_000, &thresholds).unwrap();
    let fit = ergoq::estimators::fit_log_survival(&report.tail, 0.5, 200).unwrap();

    let thetas: Vec<f64> = (0..=80).map(|k| f64::from(k) * 0.05).collect();
    let curve = sample_blocks(&p, 10, 100_000, 0.75).unwrap().curve(&thetas).unwrap();
    let delta = match decay_delta(&curve, 0.75).unwrap() {
        DecayRate::Finite(d) => d,
        other => panic!("decay rate {other:?}"),
    };
    assert!((delta - bernoulli_root(0.5, 0.75)).abs() < 0.05, "delta {delta}");
    let rel = (-fit.slope - delta).abs() / delta;
    assert!(rel < 0.15, "slope {} vs delta {delta}", fit.slope);
}
