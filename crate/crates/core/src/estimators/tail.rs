use serde::{Deserialize, Serialize};

use super::{invalid, EstimatorError};
use crate::lindley::queue_step;
use crate::processes::Process;

/// Empirical survival function `P̂{Q > q}` on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub thresholds: Vec<f64>,
    pub survival: Vec<f64>,
    /// Binomial standard errors `sqrt(p (1 - p) / m)`.
    pub std_errors: Vec<f64>,
    pub samples: u64,
}

fn check_thresholds(thresholds: &[f64]) -> Result<(), EstimatorError> {
    if thresholds.iter().any(|q| !q.is_finite()) {
        return Err(invalid("thresholds must be finite"));
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("thresholds must be sorted ascending"));
    }
    Ok(())
}

impl TailEstimate {
    fn from_counts(thresholds: &[f64], exceed: &[u64], m: u64) -> Self {
        let mf = m as f64;
        let survival: Vec<f64> = exceed.iter().map(|&c| c as f64 / mf).collect();
        let std_errors = survival.iter().map(|&p| (p * (1.0 - p) / mf).sqrt()).collect();
        Self {
            thresholds: thresholds.to_vec(),
            survival,
            std_errors,
            samples: m,
        }
    }
}

/// Counts how many values exceed each sorted threshold, one pass.
struct ExceedanceCounter<'a> {
    thresholds: &'a [f64],
    below: Vec<u64>,
    seen: u64,
}

impl<'a> ExceedanceCounter<'a> {
    fn new(thresholds: &'a [f64]) -> Self {
        Self {
            thresholds,
            below: vec![0; thresholds.len() + 1],
            seen: 0,
        }
    }

    fn push(&mut self, x: f64) {
        // x exceeds thresholds[..k].
        let k = self.thresholds.partition_point(|&q| q < x);
        self.below[k] += 1;
        self.seen += 1;
    }

    fn exceed_counts(&self) -> Vec<u64> {
        // exceed[t] = #{x : x > q_t} = Σ_{k > t} below[k]
        let mut out = vec![0; self.thresholds.len()];
        let mut acc = 0;
        for t in (0..self.thresholds.len()).rev() {
            acc += self.below[t + 1];
            out[t] = acc;
        }
        out
    }
}

pub fn empirical_tail(samples: &[f64], thresholds: &[f64]) -> Result<TailEstimate, EstimatorError> {
    if samples.is_empty() {
        return Err(invalid("empirical tail needs at least one sample"));
    }
    check_thresholds(thresholds)?;
    let mut counter = ExceedanceCounter::new(thresholds);
    for &x in samples {
        counter.push(x);
    }
    Ok(TailEstimate::from_counts(thresholds, &counter.exceed_counts(), counter.seen))
}

/// Least-squares line through `(q, ln P̂{Q > q})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_error: f64,
    pub points: usize,
}

/// Fit over thresholds with `min_q <= q` and at least `min_count` exceedances.
pub fn fit_log_survival(tail: &TailEstimate, min_q: f64, min_count: u64) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = tail
        .thresholds
        .iter()
        .zip(&tail.survival)
        .filter(|&(&q, &p)| q >= min_q && p > 0.0 && (p * tail.samples as f64).round() as u64 >= min_count)
        .map(|(&q, &p)| (q, p.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_std_error = if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (k - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit {
        slope,
        intercept,
        slope_std_error,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueTailReport {
    pub tail: TailEstimate,
    pub fit: Option<SlopeFit>,
    pub service_rate: f64,
    pub burn_in: u64,
    pub horizon: u64,
    /// Time-average arrival rate over the whole run.
    pub mean_arrival: f64,
    /// `mean_arrival < service_rate`.
    pub stable_by_mean: bool,
    pub max_queue: f64,
}

/// Stationary tail of the slotted queue by time averages along one
/// trajectory started empty. States `Q_n` with `burn_in < n <= horizon`
/// are counted; the binomial errors treat them as independent, which
/// understates the error for dependent input.
pub fn queue_tail_run(
    process: &Process,
    s: f64,
    burn_in: u64,
    horizon: u64,
    thresholds: &[f64],
) -> Result<QueueTailReport, EstimatorError> {
    if horizon <= burn_in {
        return Err(invalid(format!("horizon {horizon} must exceed burn-in {burn_in}")));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid(format!("service rate {s} must be positive")));
    }
    check_thresholds(thresholds)?;
    let mut stream = process.forward_stream(0)?;
    let mut counter = ExceedanceCounter::new(thresholds);
    let mut q = 0.0;
    let mut arrivals = 0.0;
    let mut max_queue = 0.0f64;
    for n in 1..=horizon {
        let y = stream.next_value()?;
        arrivals += y;
        q = queue_step(q, y, s)?;
        if n > burn_in {
            counter.push(q);
            max_queue = max_queue.max(q);
        }
    }
    let tail = TailEstimate::from_counts(thresholds, &counter.exceed_counts(), counter.seen);
    let fit = fit_log_survival(&tail, f64::NEG_INFINITY, 10);
    let mean_arrival = arrivals / horizon as f64;
    Ok(QueueTailReport {
        tail,
        fit,
        service_rate: s,
        burn_in,
        horizon,
        mean_arrival,
        stable_by_mean: mean_arrival < s,
        max_queue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::ProcessSpec;

    #[test]
    fn empirical_tail_examples() {
        let t = empirical_tail(&[1.0, 2.0, 3.0], &[0.0, 2.5, 3.0, 10.0]).unwrap();
        assert_eq!(t.survival, vec![1.0, 1.0 / 3.0, 0.0, 0.0]);
        assert_eq!(t.samples, 3);
        assert!((t.std_errors[1] - (2.0f64 / 27.0).sqrt()).abs() < 1e-15);
        assert_eq!(t.std_errors[0], 0.0);
    }

    #[test]
    fn empirical_tail_errors() {
        assert!(empirical_tail(&[], &[1.0]).is_err());
        assert!(empirical_tail(&[1.0], &[2.0, 1.0]).is_err());
        assert!(empirical_tail(&[1.0], &[f64::NAN]).is_err());
    }

    #[test]
    fn ties_do_not_exceed() {
        let t = empirical_tail(&[1.0, 1.0, 2.0], &[1.0]).unwrap();
        assert_eq!(t.survival, vec![1.0 / 3.0]);
    }

    #[test]
    fn slope_of_exact_exponential() {
        let thresholds: Vec<f64> = (0..10).map(f64::from).collect();
        let survival: Vec<f64> = thresholds.iter().map(|q| 0.5 * (-0.7 * q).exp()).collect();
        let tail = TailEstimate {
            std_errors: vec![0.0; 10],
            thresholds,
            survival,
            samples: 1 << 40,
        };
        let fit = fit_log_survival(&tail, 0.0, 1).unwrap();
        assert!((fit.slope + 0.7).abs() < 1e-12);
        assert!((fit.intercept - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_arrivals_give_empty_tail() {
        let p = ProcessSpec::new("iid-bernoulli:0".parse().unwrap(), 1).build().unwrap();
        let r = queue_tail_run(&p, 0.75, 10, 1000, &[0.0, 0.5, 1.0]).unwrap();
        assert!(r.tail.survival.iter().all(|&x| x == 0.0));
        assert!(r.stable_by_mean);
        assert!(queue_tail_run(&p, 0.75, 10, 10, &[0.0]).is_err());
    }
}
