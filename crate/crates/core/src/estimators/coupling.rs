use serde::{Deserialize, Serialize};

use super::{invalid, EstimatorError};
use crate::exec::map_replicas;
use crate::lindley::forward_couple;
use crate::processes::Process;

/// Forward coupling of `X(x0)` with `X(0)` across independent replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStudy {
    pub service_rate: f64,
    pub x0: f64,
    pub horizon: u64,
    pub replicas: u64,
    /// Ergodic mean of the arrivals over `horizon` values of replica 0.
    pub mean_arrival: f64,
    /// `mean_arrival < service_rate`; when false the replicas are not run.
    pub stable_by_mean: bool,
    /// Coupling time per replica, `None` when still apart at the horizon.
    pub coupling_times: Vec<Option<u64>>,
    pub coupled: u64,
}

impl CouplingStudy {
    pub fn skipped(&self) -> bool {
        !self.stable_by_mean
    }
}

pub fn coupling_study(
    process: &Process,
    s: f64,
    x0: f64,
    horizon: u64,
    replicas: u64,
) -> Result<CouplingStudy, EstimatorError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid(format!("service rate {s} must be positive")));
    }
    if !(x0.is_finite() && x0 >= 0.0) {
        return Err(invalid(format!("initial state {x0} must be finite and >= 0")));
    }
    if horizon == 0 {
        return Err(invalid("horizon must be >= 1"));
    }
    let mean_arrival = process.mean_estimate(horizon as usize)?;
    let stable_by_mean = mean_arrival < s;
    let coupling_times = if stable_by_mean {
        map_replicas(replicas as usize, |r| -> Result<Option<u64>, EstimatorError> {
            let mut stream = process.forward_stream(r as u64)?;
            let mut failure = None;
            let incs = std::iter::from_fn(|| match stream.next_value() {
                Ok(y) => Some(y - s),
                Err(e) => {
                    failure = Some(e);
                    None
                }
            });
            let tau = forward_couple(x0, incs, horizon as usize)?;
            match failure {
                Some(e) if tau.is_none() => Err(e.into()),
                _ => Ok(tau.map(|t| t as u64)),
            }
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let coupled = coupling_times.iter().filter(|t| t.is_some()).count() as u64;
    Ok(CouplingStudy {
        service_rate: s,
        x0,
        horizon,
        replicas,
        mean_arrival,
        stable_by_mean,
        coupling_times,
        coupled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::ProcessSpec;

    #[test]
    fn empty_input_couples_after_enough_service() {
        let p = ProcessSpec::new("iid-bernoulli:0".parse().unwrap(), 1).build().unwrap();
        let c = coupling_study(&p, 0.5, 2.0, 100, 3).unwrap();
        assert_eq!(c.coupling_times, vec![Some(4); 3]);
    }

    #[test]
    fn overloaded_input_is_flagged_and_skipped() {
        let p = ProcessSpec::new("iid-bernoulli:1".parse().unwrap(), 1).build().unwrap();
        let c = coupling_study(&p, 0.5, 2.0, 100, 3).unwrap();
        assert!(c.skipped());
        assert!(c.coupling_times.is_empty());
    }
}
