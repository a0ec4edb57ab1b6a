//! Lindley-type recursions and the Loynes backward construction.
//!
//! The generic recursion is `X_{n+1} = (X_n + Z_{n+1})^+`. The stationary
//! solution is built from a backward window `(Z_0, Z_{-1}, ...)` as the
//! supremum of its partial sums `V_n`. Both queueing specializations
//! (slotted queue length and G/G/1 waiting time) reduce to the generic step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LindleyError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("negative input where a nonnegative value is required: {0}")]
    Negative(&'static str),
    #[error("service rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("inconsistent tandem inputs: q + y - q_next = {0} < 0")]
    InconsistentOutput(f64),
}

fn finite(x: f64, what: &'static str) -> Result<f64, LindleyError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(LindleyError::NonFinite(what))
    }
}

fn nonneg(x: f64, what: &'static str) -> Result<f64, LindleyError> {
    finite(x, what)?;
    if x < 0.0 {
        Err(LindleyError::Negative(what))
    } else {
        Ok(x)
    }
}

/// `max(x + z, 0)`.
#[inline]
pub fn lindley_step(x: f64, z: f64) -> Result<f64, LindleyError> {
    nonneg(x, "state")?;
    finite(z, "increment")?;
    Ok(step_unchecked(x, z))
}

#[inline]
fn step_unchecked(x: f64, z: f64) -> f64 {
    let next = x + z;
    if next > 0.0 {
        next
    } else {
        0.0
    }
}

/// Slotted queue with constant service `s`: `max(q - s + y, 0)`.
///
/// Computed as `lindley_step(q, y - s)` so both routes round identically.
pub fn queue_step(q: f64, y: f64, s: f64) -> Result<f64, LindleyError> {
    nonneg(q, "queue length")?;
    nonneg(y, "arrivals")?;
    finite(s, "service rate")?;
    if s <= 0.0 {
        return Err(LindleyError::NonPositiveRate(s));
    }
    Ok(step_unchecked(q, y - s))
}

/// Waiting time of the next customer: `max(w - interarrival + service_prev, 0)`,
/// i.e. the generic step with `Z = S_{n-1} - T_n`.
pub fn waiting_step(w: f64, service_prev: f64, interarrival: f64) -> Result<f64, LindleyError> {
    nonneg(w, "waiting time")?;
    nonneg(service_prev, "service time")?;
    nonneg(interarrival, "interarrival time")?;
    Ok(step_unchecked(w, service_prev - interarrival))
}

/// Work leaving a constant-rate server during one slot: `q + y - q_next`.
///
/// With `q_next = queue_step(q, y, s)` this equals `min(q + y, s)`.
pub fn tandem_output(q: f64, y: f64, q_next: f64) -> Result<f64, LindleyError> {
    nonneg(q, "queue length")?;
    nonneg(y, "arrivals")?;
    nonneg(q_next, "next queue length")?;
    let out = (q + y) - q_next;
    if out < 0.0 {
        Err(LindleyError::InconsistentOutput(out))
    } else {
        Ok(out)
    }
}

/// A finite backward sample `(Z_0, Z_{-1}, ..., Z_{-N+1})`, `Z_0` first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IncrementWindow {
    values: Vec<f64>,
}

impl IncrementWindow {
    pub fn new(values: Vec<f64>) -> Result<Self, LindleyError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LindleyError::NonFinite("window increment"));
        }
        Ok(Self { values })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `values()[j]` is `Z_{-j}`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The window restricted to its first `depth` entries.
    pub fn prefix(&self, depth: usize) -> IncrementWindow {
        IncrementWindow {
            values: self.values[..depth.min(self.values.len())].to_vec(),
        }
    }

    /// Map every increment, e.g. `Y -> Y - s`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<IncrementWindow, LindleyError> {
        IncrementWindow::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// `V_0, V_1, ..., V_N` with `V_0 = 0` and `V_{n+1} = V_n + Z_{-n}`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut sums = Vec::with_capacity(self.values.len() + 1);
        let mut acc = 0.0;
        sums.push(acc);
        for &z in &self.values {
            acc += z;
            sums.push(acc);
        }
        sums
    }

    /// Increments in forward time order `Z_{-N+1}, ..., Z_0`.
    pub fn forward_order(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }
}

/// Whether a finite-depth supremum can stand in for the infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupStatus {
    Converged,
    Truncated,
}

/// Result of the backward supremum over a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoynesSup {
    pub value: f64,
    /// Smallest `n` attaining the maximum.
    pub argmax: usize,
    pub depth: usize,
    /// `V_N`, the partial sum at full depth.
    pub trailing_sum: f64,
}

impl LoynesSup {
    /// Converged when the maximizer is interior and the walk has drifted at
    /// least `slack` below the running maximum by the end of the window.
    pub fn status(&self, slack: f64) -> SupStatus {
        if self.argmax < self.depth && self.trailing_sum < self.value - slack {
            SupStatus::Converged
        } else {
            SupStatus::Truncated
        }
    }
}

/// `max_{0 <= n <= N} V_n` together with the smallest maximizing `n`.
pub fn loynes_sup(window: &IncrementWindow) -> LoynesSup {
    let mut best = 0.0;
    let mut argmax = 0;
    let mut acc = 0.0;
    for (k, &z) in window.values.iter().enumerate() {
        acc += z;
        if acc > best {
            best = acc;
            argmax = k + 1;
        }
    }
    LoynesSup {
        value: best,
        argmax,
        depth: window.len(),
        trailing_sum: acc,
    }
}

/// Running Loynes maxima `max_{n <= N} V_n` for every prefix depth `N`.
pub fn running_loynes_max(window: &IncrementWindow) -> Vec<f64> {
    let mut out = Vec::with_capacity(window.len() + 1);
    let mut best = 0.0f64;
    let mut acc = 0.0;
    out.push(best);
    for &z in &window.values {
        acc += z;
        if acc > best {
            best = acc;
        }
        out.push(best);
    }
    out
}

/// Trajectory `X_0, ..., X_T` of the generic recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueTrace {
    /// `states[n]` is `X_n`.
    pub states: Vec<f64>,
    /// `increments[n]` is `Z_{n+1}`.
    pub increments: Vec<f64>,
    pub coupling_time: Option<usize>,
}

impl QueueTrace {
    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("trace always holds X_0")
    }

    /// Re-check `X_{n+1} = (X_n + Z_{n+1})^+` on every step.
    pub fn is_consistent(&self) -> bool {
        self.states.len() == self.increments.len() + 1
            && self.states.iter().all(|&x| x >= 0.0)
            && self
                .states
                .windows(2)
                .zip(&self.increments)
                .all(|(w, &z)| w[1] == step_unchecked(w[0], z))
    }
}

/// Run the recursion from `x0` over a forward stream `Z_1, ..., Z_T`.
pub fn run_recursion<I>(x0: f64, increments: I) -> Result<QueueTrace, LindleyError>
where
    I: IntoIterator<Item = f64>,
{
    nonneg(x0, "initial state")?;
    let iter = increments.into_iter();
    let mut states = Vec::with_capacity(iter.size_hint().0 + 1);
    let mut incs = Vec::with_capacity(iter.size_hint().0);
    let mut x = x0;
    states.push(x);
    for z in iter {
        finite(z, "increment")?;
        x = step_unchecked(x, z);
        states.push(x);
        incs.push(z);
    }
    Ok(QueueTrace {
        states,
        increments: incs,
        coupling_time: None,
    })
}

/// Final state of the recursion from 0 driven by the window in forward order;
/// equals `X_{-N,0}` of the backward construction.
pub fn backward_chain_value(window: &IncrementWindow) -> f64 {
    window
        .values
        .iter()
        .rev()
        .fold(0.0, |x, &z| step_unchecked(x, z))
}

/// Run `X_n(x0)` and `X_n(0)` on the same increments and return the first
/// index at which they agree, or `None` if they stay apart through `horizon`
/// steps (or the stream ends first).
pub fn forward_couple<I>(x0: f64, increments: I, horizon: usize) -> Result<Option<usize>, LindleyError>
where
    I: IntoIterator<Item = f64>,
{
    nonneg(x0, "initial state")?;
    let mut upper = x0;
    let mut lower = 0.0;
    if upper == lower {
        return Ok(Some(0));
    }
    for (k, z) in increments.into_iter().take(horizon).enumerate() {
        finite(z, "increment")?;
        upper = step_unchecked(upper, z);
        lower = step_unchecked(lower, z);
        debug_assert!(upper >= lower);
        if upper == lower {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}

/// Same as [`forward_couple`] but keeps both trajectories.
pub fn coupled_traces(x0: f64, increments: &[f64]) -> Result<(QueueTrace, QueueTrace), LindleyError> {
    let mut upper = run_recursion(x0, increments.iter().copied())?;
    let lower = run_recursion(0.0, increments.iter().copied())?;
    upper.coupling_time = upper
        .states
        .iter()
        .zip(&lower.states)
        .position(|(a, b)| a == b);
    Ok((upper, lower))
}

/// Per-stage trajectories of servers in series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TandemStage {
    pub service_rate: f64,
    /// `queue[n]` is `Q_n`, starting empty.
    pub queue: Vec<f64>,
    /// `output[n]` is `Q_n + Y_{n+1} - Q_{n+1}`, which feeds the next stage.
    pub output: Vec<f64>,
}

/// Push `arrivals` through constant-rate servers in series; each stage's
/// per-slot output is the next stage's input.
pub fn tandem_pipeline(arrivals: &[f64], rates: &[f64]) -> Result<Vec<TandemStage>, LindleyError> {
    let mut input = arrivals.to_vec();
    let mut stages = Vec::with_capacity(rates.len());
    for &s in rates {
        let mut queue = Vec::with_capacity(input.len() + 1);
        let mut output = Vec::with_capacity(input.len());
        let mut q = 0.0;
        queue.push(q);
        for &y in &input {
            let next = queue_step(q, y, s)?;
            output.push(tandem_output(q, y, next)?);
            q = next;
            queue.push(q);
        }
        input = output.clone();
        stages.push(TandemStage {
            service_rate: s,
            queue,
            output,
        });
    }
    Ok(stages)
}

/// Waiting times `W_0 = w0, W_{n+1} = (W_n - T_{n+1} + S_n)^+`, with
/// `services[n] = S_n` and `interarrivals[n] = T_{n+1}`.
pub fn waiting_time_run(w0: f64, services: &[f64], interarrivals: &[f64]) -> Result<Vec<f64>, LindleyError> {
    let mut w = nonneg(w0, "initial waiting time")?;
    let mut out = Vec::with_capacity(services.len().min(interarrivals.len()) + 1);
    out.push(w);
    for (&s, &t) in services.iter().zip(interarrivals) {
        w = waiting_step(w, s, t)?;
        out.push(w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_examples() {
        assert_eq!(lindley_step(0.0, -1.0).unwrap(), 0.0);
        assert_eq!(lindley_step(2.0, 3.0).unwrap(), 5.0);
        assert_eq!(lindley_step(1.5, -1.5).unwrap(), 0.0);
        assert!(lindley_step(f64::NAN, 1.0).is_err());
        assert!(lindley_step(0.0, f64::INFINITY).is_err());
        assert!(lindley_step(-1.0, 1.0).is_err());
    }

    #[test]
    fn loynes_examples() {
        let s = loynes_sup(&IncrementWindow::empty());
        assert_eq!((s.value, s.argmax), (0.0, 0));

        let w = IncrementWindow::new(vec![-1.0, 2.0, -1.0]).unwrap();
        assert_eq!(w.partial_sums(), vec![0.0, -1.0, 1.0, 0.0]);
        let s = loynes_sup(&w);
        assert_eq!((s.value, s.argmax), (1.0, 2));

        let s = loynes_sup(&IncrementWindow::new(vec![-1.0, -1.0]).unwrap());
        assert_eq!((s.value, s.argmax), (0.0, 0));
    }

    #[test]
    fn loynes_ties_pick_smallest_index() {
        let w = IncrementWindow::new(vec![1.0, -1.0, 1.0]).unwrap();
        let s = loynes_sup(&w);
        assert_eq!((s.value, s.argmax), (1.0, 1));
    }

    #[test]
    fn sup_status_flags() {
        let w = IncrementWindow::new(vec![2.0, -1.0, -1.0, -1.0]).unwrap();
        let s = loynes_sup(&w);
        assert_eq!(s.status(0.5), SupStatus::Converged);
        assert_eq!(s.status(5.0), SupStatus::Truncated);
        let rising = IncrementWindow::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(loynes_sup(&rising).status(0.0), SupStatus::Truncated);
    }

    #[test]
    fn recursion_examples() {
        let t = run_recursion(0.0, [1.0, -2.0, 1.0]).unwrap();
        assert_eq!(t.states, vec![0.0, 1.0, 0.0, 1.0]);
        assert!(t.is_consistent());

        let t = run_recursion(5.0, []).unwrap();
        assert_eq!(t.states, vec![5.0]);

        let t = run_recursion(0.0, [-0.5, 0.0, -3.0]).unwrap();
        assert!(t.states[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(forward_couple(0.0, [], 10).unwrap(), Some(0));
        assert_eq!(forward_couple(1.0, [-1.0], 10).unwrap(), Some(1));
        assert_eq!(forward_couple(10.0, std::iter::repeat(1.0), 100).unwrap(), None);
    }

    #[test]
    fn coupled_traces_report_first_meeting() {
        let (up, low) = coupled_traces(2.0, &[-1.0, 0.5, -3.0, 1.0]).unwrap();
        assert_eq!(up.coupling_time, Some(3));
        assert_eq!(up.states[3..], low.states[3..]);
    }

    #[test]
    fn queue_step_examples() {
        assert_eq!(queue_step(0.0, 0.0, 0.75).unwrap(), 0.0);
        assert_eq!(queue_step(0.0, 1.0, 0.75).unwrap(), 0.25);
        assert_eq!(queue_step(0.25, 0.0, 0.75).unwrap(), 0.0);
        assert!(queue_step(0.0, -1.0, 0.75).is_err());
        assert!(queue_step(0.0, 1.0, 0.0).is_err());
        assert_eq!(
            queue_step(3.5, 1.0, 0.75).unwrap(),
            lindley_step(3.5, 1.0 - 0.75).unwrap()
        );
    }

    #[test]
    fn waiting_step_examples() {
        assert_eq!(waiting_step(0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(waiting_step(2.0, 1.0, 0.5).unwrap(), 2.5);
        assert_eq!(waiting_step(1.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(waiting_step(1.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn tandem_examples() {
        let s = 0.75;
        let q_next = queue_step(0.0, 1.0, s).unwrap();
        assert_eq!(q_next, 0.25);
        assert_eq!(tandem_output(0.0, 1.0, q_next).unwrap(), 0.75);
        assert_eq!(tandem_output(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(tandem_output(0.0, 0.5, 0.0).unwrap(), 0.5);
        assert!(tandem_output(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn tandem_pipeline_conserves_work() {
        let arrivals = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let stages = tandem_pipeline(&arrivals, &[0.75, 0.5]).unwrap();
        let first = &stages[0];
        for ((out, q), a) in first.output.iter().zip(&first.queue).zip(&arrivals) {
            assert_eq!(*out, (q + a).min(0.75));
        }
        let out_total: f64 = first.output.iter().sum();
        let in_total: f64 = arrivals.iter().sum();
        assert_eq!(in_total - out_total, first.queue[arrivals.len()]);
        assert_eq!(stages[1].queue.len(), arrivals.len() + 1);
    }

    #[test]
    fn waiting_time_run_matches_generic_recursion() {
        let services = [1.0, 2.0, 0.5, 0.0];
        let inter = [0.5, 1.0, 2.0, 1.0];
        let w = waiting_time_run(0.0, &services, &inter).unwrap();
        let z: Vec<f64> = services.iter().zip(&inter).map(|(s, t)| s - t).collect();
        assert_eq!(w, run_recursion(0.0, z).unwrap().states);
    }
}
