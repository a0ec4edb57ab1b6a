//! One function per subcommand. Each returns a CSV table and a JSON result
//! object; `main` attaches the config and writes both.

use ergoq::estimators::{
    coupling_study, decay_delta, prop1_experiment, prop2_sweep, queue_tail_run, sample_blocks, CumulantEstimate,
    Prop1Params, ScalingFunctions,
};
use ergoq::lindley::{loynes_sup, running_loynes_max, tandem_pipeline, waiting_time_run};
use ergoq::odometer::{max_truncation, DyadicPoint};
use ergoq::processes::{replica_rng, Process, ProcessKind, ProcessSpec};
use ergoq::Exact;
use serde_json::{json, Value};

use crate::config::{self, Command};

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Artifact {
    pub table: Table,
    pub results: Value,
}

/// 17 significant digits.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn int(x: impl Into<u128>) -> String {
    x.into().to_string()
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn build(kind: &ProcessKind, seed: u64) -> Result<Process, String> {
    ProcessSpec::new(kind.clone(), seed).build().map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn run(command: &Command, seed: u64) -> Result<Artifact, String> {
    match command {
        Command::Simulate(a) => {
            let p = build(&a.process, seed)?;
            let horizon = a.horizon.get();
            let burn_in = a.burn_in.map(|b| b.get()).unwrap_or(horizon / 10);
            let r = queue_tail_run(&p, a.s, burn_in, horizon, &a.thresholds.0).map_err(err)?;
            let mut table = Table::new(&["q", "survival", "std_error"]);
            for k in 0..r.tail.thresholds.len() {
                table.push(vec![real(r.tail.thresholds[k]), real(r.tail.survival[k]), real(r.tail.std_errors[k])]);
            }
            let results = json!({
                "service_rate": r.service_rate,
                "burn_in": r.burn_in,
                "horizon": r.horizon,
                "samples": r.tail.samples,
                "mean_arrival": r.mean_arrival,
                "stable_by_mean": r.stable_by_mean,
                "max_queue": r.max_queue,
                "fit": r.fit,
            });
            Ok(Artifact { table, results })
        }
        Command::Loynes(a) => {
            let p = build(&a.process, seed)?;
            let mut table = Table::new(&["replica", "depth", "partial_sum", "running_max"]);
            let mut sups = Vec::new();
            for r in 0..a.replicas.get() {
                let z = p
                    .backward_window(r, a.window.usize())
                    .map_err(err)?
                    .map(|y| y - a.s)
                    .map_err(err)?;
                let sums = z.partial_sums();
                let maxima = running_loynes_max(&z);
                for (depth, (v, m)) in sums.iter().zip(&maxima).enumerate() {
                    table.push(vec![int(r), int(depth as u64), real(*v), real(*m)]);
                }
                let sup = loynes_sup(&z);
                sups.push(json!({
                    "replica": r,
                    "value": sup.value,
                    "argmax": sup.argmax,
                    "depth": sup.depth,
                    "trailing_sum": sup.trailing_sum,
                    "status": sup.status(a.slack),
                }));
            }
            Ok(Artifact {
                table,
                results: json!({ "service_rate": a.s, "slack": a.slack, "sups": sups }),
            })
        }
        Command::Couple(a) => {
            let p = build(&a.process, seed)?;
            let study = coupling_study(&p, a.s, a.x0, a.horizon.get(), a.replicas.get()).map_err(err)?;
            let mut table = Table::new(&["replica", "coupling_time", "coupled"]);
            for (r, tau) in study.coupling_times.iter().enumerate() {
                table.push(vec![int(r as u64), opt(*tau, int), tau.is_some().to_string()]);
            }
            let mut taus: Vec<u64> = study.coupling_times.iter().flatten().copied().collect();
            taus.sort_unstable();
            let mean_tau = (!taus.is_empty()).then(|| taus.iter().sum::<u64>() as f64 / taus.len() as f64);
            let results = json!({
                "service_rate": study.service_rate,
                "x0": study.x0,
                "horizon": study.horizon,
                "replicas": study.replicas,
                "mean_arrival": study.mean_arrival,
                "stable_by_mean": study.stable_by_mean,
                "skipped": study.skipped(),
                "coupled": study.coupled,
                "mean_coupling_time": mean_tau,
                "median_coupling_time": taus.get(taus.len() / 2),
                "max_coupling_time": taus.last(),
            });
            Ok(Artifact { table, results })
        }
        Command::Gg1(a) => {
            let n = a.customers.usize();
            let services = build(&a.service, seed)?.forward_stream(0).map_err(err)?.take_values(n).map_err(err)?;
            let inter = build(&a.interarrival, seed)?
                .forward_stream(1)
                .map_err(err)?
                .take_values(n)
                .map_err(err)?;
            let w = waiting_time_run(a.w0, &services, &inter).map_err(err)?;
            let mut table = Table::new(&["n", "waiting_time"]);
            for (k, x) in w.iter().enumerate() {
                table.push(vec![int(k as u64), real(*x)]);
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let (ms, mt) = (mean(&services), mean(&inter));
            let results = json!({
                "customers": n,
                "mean_service": ms,
                "mean_interarrival": mt,
                "stable_by_mean": ms < mt,
                "mean_waiting_time": mean(&w[1..]),
                "max_waiting_time": w.iter().copied().fold(0.0, f64::max),
                "final_waiting_time": w[n],
            });
            Ok(Artifact { table, results })
        }
        Command::Tandem(a) => {
            let horizon = a.horizon.usize();
            let arrivals = build(&a.process, seed)?.forward_stream(0).map_err(err)?.take_values(horizon).map_err(err)?;
            let stages = tandem_pipeline(&arrivals, &[a.s1, a.s2]).map_err(err)?;
            let mut table = Table::new(&["n", "arrivals", "out1", "q1", "out2", "q2"]);
            for (k, &y) in arrivals.iter().enumerate() {
                table.push(vec![
                    int(k as u64 + 1),
                    real(y),
                    real(stages[0].output[k]),
                    real(stages[0].queue[k + 1]),
                    real(stages[1].output[k]),
                    real(stages[1].queue[k + 1]),
                ]);
            }
            let mut input = arrivals.clone();
            let mut summary = Vec::new();
            for st in &stages {
                let cum_in: f64 = input.iter().sum();
                let cum_out: f64 = st.output.iter().sum();
                let output_rule = (0..horizon).all(|k| st.output[k] == (st.queue[k] + input[k]).min(st.service_rate));
                summary.push(json!({
                    "service_rate": st.service_rate,
                    "cumulative_input": cum_in,
                    "cumulative_output": cum_out,
                    "final_queue": st.queue[horizon],
                    "conservation_exact": cum_in - cum_out == st.queue[horizon] - st.queue[0],
                    "output_rule_exact": output_rule,
                }));
                input = st.output.clone();
            }
            Ok(Artifact {
                table,
                results: json!({ "horizon": horizon, "stages": summary }),
            })
        }
        Command::Odometer(a) => {
            let od = config::odometer(a.precision, a.truncation)?;
            let start = match (&a.counter, a.value) {
                (Some(c), _) => od.point(config::parse_counter(c)?).map_err(err)?,
                (None, Some(v)) => DyadicPoint::from_value(v, od.precision()).map_err(err)?,
                (None, None) => od.sample_uniform(&mut replica_rng(seed, 0)),
            };
            let mut table = Table::new(&["k", "counter", "value", "in_c"]);
            let mut p = start;
            let mut steps = 0u64;
            loop {
                let k = if a.backward { -(steps as i64) } else { steps as i64 };
                table.push(vec![k.to_string(), p.to_hex(), real(p.value()), od.in_c(&p).to_string()]);
                if steps == a.orbit.get() {
                    break;
                }
                let next = if a.backward { p.apply_t_inv() } else { p.apply_t() };
                match next {
                    Ok(q) => p = q,
                    Err(_) => break,
                }
                steps += 1;
            }
            let levels = a.levels.unwrap_or(max_truncation(od.precision()).min(20));
            let measures: Vec<Value> = (1..=levels)
                .map(|i| -> Result<Value, String> {
                    Ok(json!({
                        "i": i,
                        "mu_A": od.measure_a(i).map_err(err)?,
                        "mu_B": od.measure_b(i).map_err(err)?,
                        "in_A": od.in_a(&start, i).map_err(err)?,
                        "in_B": od.in_b(&start, i).map_err(err)?,
                    }))
                })
                .collect::<Result<_, _>>()?;
            let mu_c = od.measure_c_truncated(od.truncation()).map_err(err)?;
            let results = json!({
                "precision": od.precision(),
                "truncation": od.truncation(),
                "point": {
                    "counter": start.to_hex(),
                    "value": start.value(),
                    "tau": start.tau().ok(),
                    "in_c": od.in_c(&start),
                },
                "steps_taken": steps,
                "mu_C_truncated": mu_c,
                "mu_C_tail_bound": Exact::pow2_inv(od.truncation() + 2),
                "levels": measures,
            });
            Ok(Artifact { table, results })
        }
        Command::Cumulant(a) => {
            let p = build(&a.process, seed)?;
            let sample = sample_blocks(&p, a.n.usize(), a.m.usize(), a.s).map_err(err)?;
            let curve = sample.curve(&a.thetas.0).map_err(err)?;
            let mut table =
                Table::new(&["theta", "lambda_hat", "std_error", "jensen_floor", "lambda_minus_theta_s"]);
            for pt in &curve.points {
                table.push(vec![
                    real(pt.theta),
                    real(pt.lambda_hat),
                    real(pt.std_error),
                    real(pt.jensen_floor),
                    real(pt.lambda_hat - pt.theta * a.s),
                ]);
            }
            let results = json!({
                "n": curve.n,
                "m": curve.m,
                "service_rate": curve.service_rate,
                "grand_mean": sample.grand_mean(),
                "delta": curve.delta,
                "convexity_violations": curve.convexity_violations(0.0),
            });
            Ok(Artifact { table, results })
        }
        Command::ScaledCumulant(a) => {
            let p = build(&a.process, seed)?;
            let scaling = ScalingFunctions::new(a.a.0, a.v.0).map_err(err)?;
            let sample = sample_blocks(&p, a.n.usize(), a.m.usize(), a.s).map_err(err)?;
            let scaled: Vec<f64> = a
                .thetas
                .0
                .iter()
                .map(|&t| sample.scaled_lambda_hat(t, &scaling))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            let curve = CumulantEstimate::from_curve(&a.thetas.0, &scaled, 0.0).map_err(err)?;
            let delta = decay_delta(&curve, 0.0).map_err(err)?;
            let mut table = Table::new(&["theta", "scaled_lambda"]);
            for (t, l) in a.thetas.0.iter().zip(&scaled) {
                table.push(vec![real(*t), real(*l)]);
            }
            let exponents: Vec<Value> = match delta.value() {
                Some(d) => a
                    .q
                    .0
                    .iter()
                    .map(|&q| json!({ "q": q, "exponent": scaling.tail_exponent(d, q) }))
                    .collect(),
                None => Vec::new(),
            };
            let results = json!({
                "n": a.n.get(),
                "m": a.m.get(),
                "service_rate": a.s,
                "scaling": scaling,
                "delta": delta,
                "tail_exponents": exponents,
            });
            Ok(Artifact { table, results })
        }
        Command::Prop1(a) => {
            let od = config::odometer(a.precision, a.truncation)?;
            let mut table = Table::new(&[
                "i",
                "n_i",
                "q_i",
                "delta_i",
                "threshold",
                "mu_A",
                "target",
                "pass",
                "chain_holds",
                "mc_samples",
                "mc_hits",
                "mc_estimate",
                "mc_std_error",
                "all_ones_samples",
                "all_ones_failures",
            ]);
            let mut reports = Vec::new();
            for &i in &a.i.0 {
                let params = Prop1Params::new(i).map_err(err)?;
                let r = prop1_experiment(&od, params, a.m.get(), a.conditional.get(), seed).map_err(err)?;
                let mc = r.monte_carlo.as_ref();
                let ones = r.all_ones.as_ref();
                table.push(vec![
                    int(r.i),
                    int(r.n_i),
                    int(r.q_i),
                    real(r.delta_i),
                    r.threshold.to_string(),
                    r.mu_a.to_string(),
                    r.target.to_string(),
                    r.pass.to_string(),
                    r.chain_holds.to_string(),
                    opt(mc, |m| int(m.samples)),
                    opt(mc, |m| int(m.hits)),
                    opt(mc, |m| real(m.estimate)),
                    opt(mc, |m| real(m.std_error)),
                    opt(ones, |o| int(o.samples)),
                    opt(ones, |o| int(o.failures)),
                ]);
                reports.push(serde_json::to_value(&r).map_err(err)?);
            }
            let results = if reports.len() == 1 {
                reports.remove(0)
            } else {
                Value::Array(reports)
            };
            Ok(Artifact { table, results })
        }
        Command::Prop2(a) => {
            let od = config::odometer(a.precision, a.truncation)?;
            let reports = prop2_sweep(&od, a.i, &a.thetas.0, a.m.get(), seed).map_err(err)?;
            let mut table = Table::new(&[
                "theta",
                "upper_bound",
                "lower_bound_from_a",
                "lower_bound",
                "gap",
                "lambda_hat",
                "std_error",
                "full_fraction",
                "bracketed",
            ]);
            for r in &reports {
                let mc = r.monte_carlo.as_ref();
                table.push(vec![
                    real(r.theta),
                    real(r.upper_bound),
                    real(r.lower_bound_from_a),
                    real(r.lower_bound),
                    real(r.gap),
                    opt(mc, |m| real(m.lambda_hat)),
                    opt(mc, |m| real(m.std_error)),
                    opt(mc, |m| real(m.full_fraction)),
                    opt(r.bracketed, |b| b.to_string()),
                ]);
            }
            let results = serde_json::to_value(&reports).map_err(err)?;
            Ok(Artifact { table, results })
        }
    }
}
