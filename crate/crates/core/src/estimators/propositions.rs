//! The two odometer experiments: a queue whose stationary tail beats every
//! exponential, and a cumulant that sits at its trivial upper bound.
//!
//! The exact branches use only closed forms and exact set measures; Monte
//! Carlo is reported next to them and never replaces them.

use serde::{Deserialize, Serialize};

use super::cumulant::sample_blocks;
use super::{invalid, EstimatorError};
use crate::exact::Exact;
use crate::exec::map_replicas;
use crate::odometer::Odometer;
use crate::processes::{replica_rng, Process, ProcessKind, ProcessSpec};

/// Offset mixed into the seed for conditional `A_i` draws, keeping them
/// independent of the uniform `ω` replicas.
const CONDITIONAL_STREAM_SALT: u64 = 0xA5A5_0000_0000_0001;

/// Level `i` of the construction: `δ_i = 1/i`, `q_i = 2 i²`, `n_i = 2^(i-1)`, `s = 3/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop1Params {
    pub i: u32,
}

impl Prop1Params {
    pub fn new(i: u32) -> Result<Self, EstimatorError> {
        if !(1..=62).contains(&i) {
            return Err(invalid(format!("level i = {i} must be in 1..=62")));
        }
        Ok(Self { i })
    }

    pub fn delta(&self) -> f64 {
        1.0 / f64::from(self.i)
    }

    pub fn q(&self) -> u64 {
        2 * u64::from(self.i) * u64::from(self.i)
    }

    pub fn n(&self) -> u64 {
        1 << (self.i - 1)
    }

    pub fn service_rate() -> Exact {
        Exact::dyadic(3, 2)
    }

    /// `n_i / 4 > q_i`, i.e. `2^(i-3) > 2 i²`.
    pub fn chain_holds(&self) -> bool {
        self.n() > 4 * self.q()
    }

    /// Window sums strictly above `(3/4) n_i + q_i` satisfy `4 sum > 3 n_i + 4 q_i`.
    pub fn exceeds_threshold(&self, window_sum: u64) -> bool {
        4 * u128::from(window_sum) > 3 * u128::from(self.n()) + 4 * u128::from(self.q())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1MonteCarlo {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllOnesCheck {
    pub samples: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub i: u32,
    pub n_i: u64,
    pub q_i: u64,
    pub delta_i: f64,
    pub s: Exact,
    /// `(3/4) n_i + q_i`.
    pub threshold: Exact,
    pub chain_holds: bool,
    #[serde(rename = "mu_A")]
    pub mu_a: Exact,
    /// `2^(-δ_i q_i) = 2^(-2i)`.
    pub target: Exact,
    /// `μ(A_i) > 2^(-2i)`.
    pub pass: bool,
    /// `μ(A_i)` lower-bounds the exceedance probability only when the chain holds.
    pub lower_bound_valid: bool,
    pub monte_carlo: Option<Prop1MonteCarlo>,
    pub all_ones: Option<AllOnesCheck>,
}

/// `m` uniform `ω` for the exceedance estimate, `conditional` draws from
/// `A_i` for the all-ones implication.
pub fn prop1_experiment(
    od: &Odometer,
    params: Prop1Params,
    m: u64,
    conditional: u64,
    seed: u64,
) -> Result<Prop1Report, EstimatorError> {
    let i = params.i;
    let mu_a = od.measure_a(i)?;
    let target = Exact::pow2_inv(2 * i);
    let n = params.n();
    let threshold = Exact::dyadic(3 * u128::from(n) + 4 * u128::from(params.q()), 2);

    let process = Process::new(ProcessSpec::new(
        ProcessKind::Odometer {
            precision: od.precision(),
            truncation: Some(od.truncation()),
        },
        seed,
    ))?;
    let (pod, counter) = process.odometer().expect("odometer backing");

    let monte_carlo = if m > 0 {
        let hits = map_replicas(m as usize, |r| -> Result<bool, EstimatorError> {
            let omega = process.odometer_origin(r as u64, n, 0)?;
            Ok(params.exceeds_threshold(pod.backward_window_sum(counter, &omega, n)?))
        })
        .into_iter()
        .try_fold(0u64, |acc, h| h.map(|h| acc + u64::from(h)))?;
        let p = hits as f64 / m as f64;
        Some(Prop1MonteCarlo {
            samples: m,
            hits,
            estimate: p,
            std_error: (p * (1.0 - p) / m as f64).sqrt(),
        })
    } else {
        None
    };

    let all_ones = if conditional > 0 {
        let failures = map_replicas(conditional as usize, |r| -> Result<bool, EstimatorError> {
            let mut rng = replica_rng(seed ^ CONDITIONAL_STREAM_SALT, r as u64);
            let omega = pod.conditional_sample_a(i, &mut rng)?;
            Ok(pod.backward_window_sum(counter, &omega, n)? != n)
        })
        .into_iter()
        .try_fold(0u64, |acc, f| f.map(|f| acc + u64::from(f)))?;
        Some(AllOnesCheck {
            samples: conditional,
            failures,
        })
    } else {
        None
    };

    Ok(Prop1Report {
        i,
        n_i: n,
        q_i: params.q(),
        delta_i: params.delta(),
        s: Prop1Params::service_rate(),
        threshold,
        chain_holds: params.chain_holds(),
        mu_a,
        target,
        pass: mu_a > target,
        lower_bound_valid: params.chain_holds(),
        monte_carlo,
        all_ones,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2MonteCarlo {
    pub samples: u64,
    pub lambda_hat: f64,
    pub std_error: f64,
    /// Fraction of sampled blocks that are all ones.
    pub full_fraction: f64,
    /// `θ + ln(full_fraction) / n_i`, the part of the sandwich the sample sees.
    pub visible_lower_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Report {
    pub i: u32,
    pub theta: f64,
    pub n_i: u64,
    #[serde(rename = "mu_A")]
    pub mu_a: Exact,
    /// `θ`, since every `Y_j <= 1`.
    pub upper_bound: f64,
    /// `θ + ln μ(A_i) / n_i = θ - (i + 2) ln 2 / 2^(i-1)`.
    pub lower_bound_from_a: f64,
    /// `max(lower_bound_from_a, 0)`: the cumulant of nonnegative input is nonnegative for `θ >= 0`.
    pub lower_bound: f64,
    pub gap: f64,
    pub monte_carlo: Option<Prop2MonteCarlo>,
    /// `lower_bound <= λ̂ <= upper_bound` when Monte Carlo ran.
    pub bracketed: Option<bool>,
}

pub fn prop2_experiment(od: &Odometer, i: u32, theta: f64, m: u64, seed: u64) -> Result<Prop2Report, EstimatorError> {
    Ok(prop2_sweep(od, i, &[theta], m, seed)?.remove(0))
}

/// [`prop2_experiment`] over several `θ`, all sharing one block sample.
pub fn prop2_sweep(od: &Odometer, i: u32, thetas: &[f64], m: u64, seed: u64) -> Result<Vec<Prop2Report>, EstimatorError> {
    if let Some(bad) = thetas.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(invalid(format!("theta = {bad} must be finite and >= 0")));
    }
    if thetas.is_empty() {
        return Err(invalid("at least one theta is required"));
    }
    let params = Prop1Params::new(i)?;
    let mu_a = od.measure_a(i)?;
    let n = params.n();

    let sample = if m > 0 {
        let process = Process::new(ProcessSpec::new(
            ProcessKind::Odometer {
                precision: od.precision(),
                truncation: Some(od.truncation()),
            },
            seed,
        ))?;
        Some(sample_blocks(&process, n as usize, m as usize, 0.0)?)
    } else {
        None
    };

    Ok(thetas
        .iter()
        .map(|&theta| {
            let lower_bound_from_a = theta + mu_a.ln() / n as f64;
            let lower_bound = lower_bound_from_a.max(0.0);
            let monte_carlo = sample.as_ref().map(|sample| {
                let pt = sample.lambda_hat(theta);
                let full = sample.full_fraction();
                Prop2MonteCarlo {
                    samples: m,
                    lambda_hat: pt.lambda_hat,
                    std_error: pt.std_error,
                    full_fraction: full,
                    visible_lower_bound: (full > 0.0).then(|| theta + full.ln() / n as f64),
                }
            });
            let bracketed = monte_carlo
                .as_ref()
                .map(|mc| lower_bound <= mc.lambda_hat && mc.lambda_hat <= theta);
            Prop2Report {
                i,
                theta,
                n_i: n,
                mu_a,
                upper_bound: theta,
                lower_bound_from_a,
                lower_bound,
                gap: theta - lower_bound,
                monte_carlo,
                bracketed,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        let p = Prop1Params::new(17).unwrap();
        assert_eq!((p.n(), p.q()), (65536, 578));
        assert!(p.chain_holds());
        assert!(!Prop1Params::new(10).unwrap().chain_holds());
        assert!(Prop1Params::new(11).unwrap().chain_holds());
        assert!(!Prop1Params::new(5).unwrap().chain_holds());
        assert!(Prop1Params::new(0).is_err());
    }

    #[test]
    fn smallest_level_with_chain() {
        let first = (1..40).find(|&i| Prop1Params::new(i).unwrap().chain_holds()).unwrap();
        assert_eq!(first, 11);
        // Direct evaluation of 2^(i-3) > 2 i² as reals.
        let direct = (1..40).find(|&i| 2f64.powi(i - 3) > 2.0 * f64::from(i * i)).unwrap();
        assert_eq!(direct, 11);
    }

    #[test]
    fn threshold_comparison_is_strict() {
        let p = Prop1Params::new(11).unwrap();
        // 768 + 242 = 1010
        assert!(!p.exceeds_threshold(1010));
        assert!(p.exceeds_threshold(1011));
    }

    #[test]
    fn prop1_level_17_exact_branch() {
        let r = prop1_experiment(&Odometer::default(), Prop1Params::new(17).unwrap(), 0, 0, 1).unwrap();
        assert_eq!(r.mu_a.to_string(), "1/524288");
        assert_eq!(r.target.to_string(), "1/17179869184");
        assert!(r.pass && r.chain_holds);
    }

    #[test]
    fn prop1_level_11_bound() {
        let r = prop1_experiment(&Odometer::default(), Prop1Params::new(11).unwrap(), 0, 0, 1).unwrap();
        assert_eq!(r.mu_a, Exact::pow2_inv(13));
        assert!(r.lower_bound_valid);
    }

    #[test]
    fn prop1_level_5_flags_chain_but_checks_all_ones() {
        let r = prop1_experiment(&Odometer::default(), Prop1Params::new(5).unwrap(), 0, 200, 3).unwrap();
        assert!(!r.chain_holds);
        assert_eq!(r.all_ones.unwrap().failures, 0);
    }

    #[test]
    fn prop1_rejects_excess_depth() {
        let od = Odometer::new(20).unwrap();
        assert!(prop1_experiment(&od, Prop1Params::new(10).unwrap(), 0, 0, 1).is_err());
    }

    #[test]
    fn prop2_level_16_lower_bound() {
        let r = prop2_experiment(&Odometer::default(), 16, 1.0, 0, 1).unwrap();
        let expected = 1.0 - 18.0 * std::f64::consts::LN_2 / 32768.0;
        assert!((r.lower_bound - expected).abs() < 1e-15);
        assert!((r.gap - 0.000380).abs() < 1e-6);
    }

    #[test]
    fn prop2_theta_zero_is_all_zero() {
        let r = prop2_experiment(&Odometer::default(), 12, 0.0, 64, 1).unwrap();
        assert_eq!(r.upper_bound, 0.0);
        assert_eq!(r.lower_bound, 0.0);
        assert_eq!(r.monte_carlo.unwrap().lambda_hat, 0.0);
        assert_eq!(r.bracketed, Some(true));
    }

    #[test]
    fn prop2_rejects_negative_theta() {
        assert!(prop2_experiment(&Odometer::default(), 12, -1.0, 0, 1).is_err());
    }
}
