//! Stability and tail behaviour of queues driven by stationary ergodic input.
//!
//! * [`lindley`]: the recursion `X_{n+1} = (X_n + Z_{n+1})^+`, the Loynes
//!   backward supremum, forward coupling, and the queue-length, waiting-time
//!   and tandem specializations.
//! * [`odometer`]: the dyadic adding machine on `[0, 1)` with exact interval
//!   sets and measures.
//! * [`processes`]: iid, binary Markov, trace and odometer arrival streams.
//! * [`estimators`]: tail and cumulant estimators and the odometer experiments.
//! * [`exec`]: replica execution, parallel under the `parallel` feature.

pub mod estimators;
pub mod exact;
pub mod exec;
pub mod lindley;
pub mod odometer;
pub mod processes;

pub use exact::Exact;
