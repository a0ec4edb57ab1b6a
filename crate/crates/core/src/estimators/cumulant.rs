use serde::{Deserialize, Serialize};

use super::{invalid, EstimatorError};
use crate::exec::map_replicas;
use crate::processes::{BlockSummary, Process};

/// `m` independent realization blocks of length `n`, drawn once and reused
/// for every `θ` so that estimates on a grid share samples.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSample {
    n: usize,
    service_rate: f64,
    blocks: Vec<BlockSummary>,
}

pub fn sample_blocks(process: &Process, n: usize, m: usize, s: f64) -> Result<BlockSample, EstimatorError> {
    if n == 0 || m == 0 {
        return Err(invalid("block length and sample count must be >= 1"));
    }
    if process.is_trace() {
        // Consecutive blocks of one file: sequential and fail-fast.
        let blocks = (0..m as u64)
            .map(|r| process.block_summary(r, n, s))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(BlockSample { n, service_rate: s, blocks });
    }
    let blocks = map_replicas(m, |r| process.block_summary(r as u64, n, s))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockSample { n, service_rate: s, blocks })
}

/// One grid point of the cumulant estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub theta: f64,
    pub lambda_hat: f64,
    /// Delta-method standard error from the sample variance of the weights.
    pub std_error: f64,
    /// `θ · (sample mean of the block means)`; `lambda_hat` never falls below it.
    pub jensen_floor: f64,
}

/// `(1/n) ln mean exp(x_i)` in log-sum-exp form, given `x_i = n · u_i`.
/// Returns the estimate and its standard error.
fn log_mean_exp(u: &[f64], n: f64) -> (f64, f64) {
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m = u.len() as f64;
    let weights: Vec<f64> = u.iter().map(|&x| (n * (x - max)).exp()).collect();
    let mean_w = weights.iter().sum::<f64>() / m;
    let estimate = max + mean_w.ln() / n;
    let se = if u.len() > 1 {
        let var = weights.iter().map(|w| (w - mean_w).powi(2)).sum::<f64>() / (m - 1.0);
        var.sqrt() / (m.sqrt() * mean_w * n)
    } else {
        f64::NAN
    };
    (estimate, se)
}

fn running_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut mean = 0.0;
    for (k, x) in values.enumerate() {
        mean += (x - mean) / (k + 1) as f64;
    }
    mean
}

impl BlockSample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn service_rate(&self) -> f64 {
        self.service_rate
    }

    pub fn blocks(&self) -> &[BlockSummary] {
        &self.blocks
    }

    /// Sample mean of `(1/n) Σ Y_k` across blocks.
    pub fn grand_mean(&self) -> f64 {
        running_mean(self.blocks.iter().map(|b| b.mean))
    }

    /// Fraction of blocks whose every value is 1 (sum equal to `n`).
    pub fn full_fraction(&self) -> f64 {
        self.blocks.iter().filter(|b| b.mean == 1.0).count() as f64 / self.m() as f64
    }

    /// `λ̂(θ) = (1/n) ln( (1/m) Σ_i exp(θ Σ_k Y_k^(i)) )`.
    pub fn lambda_hat(&self, theta: f64) -> LambdaPoint {
        if theta == 0.0 {
            return LambdaPoint {
                theta,
                lambda_hat: 0.0,
                std_error: 0.0,
                jensen_floor: 0.0,
            };
        }
        let u: Vec<f64> = self.blocks.iter().map(|b| theta * b.mean).collect();
        let (lambda_hat, std_error) = log_mean_exp(&u, self.n as f64);
        LambdaPoint {
            theta,
            lambda_hat,
            std_error,
            jensen_floor: theta * self.grand_mean(),
        }
    }

    /// `(1/v(n)) ln mean exp(θ v(n)/a(n) Σ (Y_k - s))`.
    pub fn scaled_lambda_hat(&self, theta: f64, scaling: &ScalingFunctions) -> Result<f64, EstimatorError> {
        let nf = self.n as f64;
        let a = scaling.a.eval(nf);
        let v = scaling.v.eval(nf);
        if !(a > 0.0 && v > 0.0) {
            return Err(invalid(format!("scalings must be positive at n = {}: a = {a}, v = {v}", self.n)));
        }
        if theta == 0.0 {
            return Ok(0.0);
        }
        let k = theta * v / a;
        // log_mean_exp divides by its second argument; pass v and pre-divide.
        let u: Vec<f64> = self.blocks.iter().map(|b| k * b.centered_sum / v).collect();
        Ok(log_mean_exp(&u, v).0)
    }

    pub fn curve(&self, thetas: &[f64]) -> Result<CumulantEstimate, EstimatorError> {
        CumulantEstimate::new(thetas.iter().map(|&t| self.lambda_hat(t)).collect(), self.n, self.m(), self.service_rate)
    }
}

/// `λ̂(θ)` for a single `θ` from fresh samples.
pub fn estimate_lambda(process: &Process, theta: f64, n: usize, m: usize) -> Result<f64, EstimatorError> {
    if !theta.is_finite() {
        return Err(invalid("theta must be finite"));
    }
    Ok(sample_blocks(process, n, m, 0.0)?.lambda_hat(theta).lambda_hat)
}

/// Finite-`n` estimate of the scaled cumulant `λ*(θ)`.
pub fn estimate_scaled_lambda(
    process: &Process,
    theta: f64,
    scaling: &ScalingFunctions,
    s: f64,
    n: usize,
    m: usize,
) -> Result<f64, EstimatorError> {
    sample_blocks(process, n, m, s)?.scaled_lambda_hat(theta, scaling)
}

/// `λ̂` on a `θ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantEstimate {
    pub points: Vec<LambdaPoint>,
    pub n: usize,
    pub m: usize,
    pub service_rate: f64,
    pub delta: DecayRate,
}

impl CumulantEstimate {
    pub fn new(points: Vec<LambdaPoint>, n: usize, m: usize, s: f64) -> Result<Self, EstimatorError> {
        let mut est = Self {
            points,
            n,
            m,
            service_rate: s,
            delta: DecayRate::Empty,
        };
        est.delta = decay_delta(&est, s)?;
        Ok(est)
    }

    /// Build from a known curve, e.g. a closed form.
    pub fn from_curve(thetas: &[f64], lambdas: &[f64], s: f64) -> Result<Self, EstimatorError> {
        if thetas.len() != lambdas.len() {
            return Err(invalid("theta and lambda grids differ in length"));
        }
        let points = thetas
            .iter()
            .zip(lambdas)
            .map(|(&theta, &lambda_hat)| LambdaPoint {
                theta,
                lambda_hat,
                std_error: 0.0,
                jensen_floor: f64::NAN,
            })
            .collect();
        Self::new(points, 0, 0, s)
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.theta).collect()
    }

    /// Second differences that are negative beyond `tol`: a convexity
    /// diagnostic, never an error.
    pub fn convexity_violations(&self, tol: f64) -> usize {
        self.points
            .windows(3)
            .filter(|w| {
                let (a, b, c) = (w[0], w[1], w[2]);
                let lhs = (c.lambda_hat - b.lambda_hat) / (c.theta - b.theta);
                let rhs = (b.lambda_hat - a.lambda_hat) / (b.theta - a.theta);
                lhs < rhs - tol
            })
            .count()
    }
}

/// `sup{θ > 0 : λ(θ) - θ s < 0}` on the interpolated grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum DecayRate {
    /// The set is empty on the grid.
    Empty,
    Finite(f64),
    /// Still negative at the last grid point; the value is the grid max.
    ExceedsGrid(f64),
}

impl DecayRate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            DecayRate::Finite(d) | DecayRate::ExceedsGrid(d) => Some(d),
            DecayRate::Empty => None,
        }
    }
}

pub fn decay_delta(curve: &CumulantEstimate, s: f64) -> Result<DecayRate, EstimatorError> {
    let pts = &curve.points;
    if pts.windows(2).any(|w| w[0].theta.partial_cmp(&w[1].theta) != Some(std::cmp::Ordering::Less)) {
        return Err(invalid("theta grid must be strictly increasing"));
    }
    if !pts.iter().any(|p| p.theta == 0.0) {
        return Err(invalid("theta grid must contain 0"));
    }
    let g: Vec<f64> = pts.iter().map(|p| p.lambda_hat - p.theta * s).collect();
    let Some(last_neg) = (0..pts.len()).rev().find(|&k| pts[k].theta > 0.0 && g[k] < 0.0) else {
        return Ok(DecayRate::Empty);
    };
    if last_neg + 1 == pts.len() {
        return Ok(DecayRate::ExceedsGrid(pts[last_neg].theta));
    }
    let (t0, t1) = (pts[last_neg].theta, pts[last_neg + 1].theta);
    let (g0, g1) = (g[last_neg], g[last_neg + 1]);
    let interp = |t: f64| g0 + (g1 - g0) * (t - t0) / (t1 - t0);
    let (mut lo, mut hi) = (t0, t1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if interp(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DecayRate::Finite(lo))
}

/// `c · t^α` with `c, α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coef: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn linear() -> Self {
        Self { coef: 1.0, exponent: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.exponent == 1.0 {
            self.coef * t
        } else {
            self.coef * t.powf(self.exponent)
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (y / self.coef).powf(1.0 / self.exponent)
    }
}

/// Scalings `a(n)`, `v(n)` of the scaled cumulant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFunctions {
    pub a: PowerLaw,
    pub v: PowerLaw,
}

impl ScalingFunctions {
    pub fn new(a: PowerLaw, v: PowerLaw) -> Result<Self, EstimatorError> {
        for (name, f) in [("a", a), ("v", v)] {
            if !(f.coef > 0.0 && f.exponent > 0.0 && f.coef.is_finite() && f.exponent.is_finite()) {
                return Err(invalid(format!("scaling {name} must have positive finite coefficient and exponent")));
            }
        }
        Ok(Self { a, v })
    }

    pub fn linear() -> Self {
        Self {
            a: PowerLaw::linear(),
            v: PowerLaw::linear(),
        }
    }

    /// Both functions positive and strictly increasing along `grid`.
    pub fn check_on_grid(&self, grid: &[f64]) -> Result<(), EstimatorError> {
        for f in [self.a, self.v] {
            let vals: Vec<f64> = grid.iter().map(|&t| f.eval(t)).collect();
            if vals.iter().any(|&x| x.is_nan() || x <= 0.0) || vals.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
                return Err(invalid("scaling is not positive and increasing on the grid"));
            }
        }
        Ok(())
    }

    /// `δ · v(a^{-1}(q))`, the exponent of the scaled tail approximation.
    pub fn tail_exponent(&self, delta: f64, q: f64) -> f64 {
        delta * self.v.eval(self.a.inverse(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::ProcessSpec;

    fn process(s: &str, seed: u64) -> Process {
        ProcessSpec::new(s.parse().unwrap(), seed).build().unwrap()
    }

    fn bernoulli_cgf(p: f64, theta: f64) -> f64 {
        (1.0 - p + p * theta.exp()).ln()
    }

    /// Root of `ln(1 - p + p e^θ) = s θ` for `θ > 0`, by bisection.
    fn closed_form_root(p: f64, s: f64) -> f64 {
        let f = |t: f64| bernoulli_cgf(p, t) - s * t;
        let (mut lo, mut hi) = (1e-6, 50.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    #[test]
    fn deterministic_input_gives_theta_c() {
        let p = process("iid-table:0.375=1", 2);
        let sample = sample_blocks(&p, 40, 50, 0.0).unwrap();
        for theta in [0.1, 0.5, 2.0] {
            assert_eq!(sample.lambda_hat(theta).lambda_hat, theta * 0.375);
        }
        assert_eq!(estimate_lambda(&p, 0.0, 10, 10).unwrap(), 0.0);
    }

    #[test]
    fn bernoulli_small_theta_matches_closed_form() {
        let p = process("iid-bernoulli:0.3", 5);
        let sample = sample_blocks(&p, 50, 20_000, 0.0).unwrap();
        for theta in [0.05, 0.1, 0.2] {
            let pt = sample.lambda_hat(theta);
            let truth = bernoulli_cgf(0.3, theta);
            assert!((pt.lambda_hat - truth).abs() < 3.0 * pt.std_error, "θ {theta}: {pt:?} vs {truth}");
        }
    }

    #[test]
    fn decay_delta_matches_closed_form_root() {
        let thetas: Vec<f64> = (0..=4000).map(|k| k as f64 * 1e-3).collect();
        let lambdas: Vec<f64> = thetas.iter().map(|&t| bernoulli_cgf(0.5, t)).collect();
        let est = CumulantEstimate::from_curve(&thetas, &lambdas, 0.75).unwrap();
        let root = closed_form_root(0.5, 0.75);
        let delta = est.delta.value().unwrap();
        assert!(matches!(est.delta, DecayRate::Finite(_)));
        assert!((delta - root).abs() < 1e-6, "{delta} vs {root}");
    }

    #[test]
    fn linear_cumulant_exceeds_grid() {
        let thetas = [0.0, 1.0, 2.0, 3.0];
        let lambdas: Vec<f64> = thetas.iter().map(|t| 0.5 * t).collect();
        let est = CumulantEstimate::from_curve(&thetas, &lambdas, 0.75).unwrap();
        assert_eq!(est.delta, DecayRate::ExceedsGrid(3.0));
    }

    #[test]
    fn overloaded_server_has_no_decay_rate() {
        let thetas: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let lambdas: Vec<f64> = thetas.iter().map(|&t| bernoulli_cgf(0.6, t)).collect();
        let est = CumulantEstimate::from_curve(&thetas, &lambdas, 0.5).unwrap();
        assert_eq!(est.delta, DecayRate::Empty);
    }

    #[test]
    fn decay_delta_needs_zero_and_sorted_grid() {
        let bad = CumulantEstimate {
            points: vec![],
            n: 1,
            m: 1,
            service_rate: 1.0,
            delta: DecayRate::Empty,
        };
        assert!(decay_delta(&bad, 1.0).is_err());
        assert!(CumulantEstimate::from_curve(&[0.0, 2.0, 1.0], &[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn scaled_lambda_reduces_to_centered_cumulant() {
        let p = process("iid-bernoulli:0.4", 8);
        let sample = sample_blocks(&p, 64, 4000, 0.75).unwrap();
        let lin = ScalingFunctions::linear();
        for theta in [0.0, 0.3, 1.0, 1.7] {
            let scaled = sample.scaled_lambda_hat(theta, &lin).unwrap();
            let plain = sample.lambda_hat(theta).lambda_hat - theta * 0.75;
            assert!((scaled - plain).abs() < 1e-9, "θ {theta}: {scaled} vs {plain}");
        }
    }

    #[test]
    fn scaled_lambda_vanishes_for_input_equal_to_rate() {
        let p = process("iid-table:0.75=1", 8);
        let sc = ScalingFunctions::new(
            PowerLaw { coef: 2.0, exponent: 0.7 },
            PowerLaw { coef: 0.5, exponent: 0.3 },
        )
        .unwrap();
        for theta in [0.0, 0.5, 4.0] {
            assert_eq!(estimate_scaled_lambda(&p, theta, &sc, 0.75, 100, 10).unwrap(), 0.0);
        }
    }

    #[test]
    fn scaling_validation() {
        assert!(ScalingFunctions::new(PowerLaw { coef: -1.0, exponent: 1.0 }, PowerLaw::linear()).is_err());
        let sc = ScalingFunctions::linear();
        assert!(sc.check_on_grid(&[1.0, 2.0, 4.0]).is_ok());
        assert!(sc.check_on_grid(&[0.0, 1.0]).is_err());
        let pl = PowerLaw { coef: 3.0, exponent: 0.5 };
        assert!((pl.inverse(pl.eval(7.0)) - 7.0).abs() < 1e-12);
        assert_eq!(sc.tail_exponent(2.0, 5.0), 10.0);
    }
}
