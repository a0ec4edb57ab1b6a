//! Tail probabilities, cumulant generating functions and the packaged
//! sub-exponential-tail experiments for the odometer arrival process.

mod coupling;
mod cumulant;
mod propositions;
mod tail;

pub use coupling::{coupling_study, CouplingStudy};
pub use cumulant::{
    decay_delta, estimate_lambda, estimate_scaled_lambda, sample_blocks, BlockSample, CumulantEstimate,
    DecayRate, LambdaPoint, PowerLaw, ScalingFunctions,
};
pub use propositions::{
    prop1_experiment, prop2_experiment, prop2_sweep, AllOnesCheck, Prop1MonteCarlo, Prop1Params, Prop1Report, Prop2MonteCarlo,
    Prop2Report,
};
pub use tail::{empirical_tail, fit_log_survival, queue_tail_run, QueueTailReport, SlopeFit, TailEstimate};

use thiserror::Error;

use crate::lindley::LindleyError;
use crate::odometer::OdometerError;
use crate::processes::ProcessError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("invalid estimator input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Odometer(#[from] OdometerError),
    #[error(transparent)]
    Lindley(#[from] LindleyError),
}

pub(crate) fn invalid(msg: impl Into<String>) -> EstimatorError {
    EstimatorError::Invalid(msg.into())
}
