//! Experiment configuration shared by the flag parser and `--config` files.
//!
//! Every subcommand's arguments are one struct that derives both clap and
//! serde. Defaults live only in the clap attributes; a config file may omit
//! any field and gets the same default as the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, FromArgMatches, Subcommand, ValueEnum};
use ergoq::estimators::{PowerLaw, Prop1Params, ScalingFunctions};
use ergoq::odometer::{max_truncation, Odometer};
use ergoq::processes::ProcessKind;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A sample count. Accepts `1000`, `1e6` or `2^20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count(pub u64);

impl Count {
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn usize(self) -> usize {
        self.0 as usize
    }
}

fn count_from_f64(x: f64) -> Result<Count, String> {
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(Count(x as u64))
    } else {
        Err(format!("{x} is not a nonnegative integer count"))
    }
}

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(n) = s.parse::<u64>() {
            return Ok(Count(n));
        }
        if let Some(exp) = s.strip_prefix("2^") {
            let e: u32 = exp.parse().map_err(|_| format!("bad power of two '{s}'"))?;
            return 1u64.checked_shl(e).filter(|_| e < 64).map(Count).ok_or(format!("2^{e} overflows"));
        }
        let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
        count_from_f64(x)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Count(n)),
            Raw::Float(x) => count_from_f64(x).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A list of reals: `a,b,c` or the inclusive range `start:stop:step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(format!("range '{s}' must be start:stop:step"));
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
                return Err(format!("range '{s}' needs finite bounds and a positive step"));
            }
            let count = ((stop - start) / step + 1e-9).floor();
            if count < 0.0 {
                return Err(format!("range '{s}' is empty"));
            }
            if count > 1e7 {
                return Err(format!("range '{s}' has too many points"));
            }
            return Ok(Grid((0..=count as u64).map(|k| start + k as f64 * step).collect()));
        }
        s.split(',').map(num).collect::<Result<Vec<_>, _>>().map(Grid)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::List(v) => Ok(Grid(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `c,alpha` for the scaling `c · t^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PowerLawArg(pub PowerLaw);

impl FromStr for PowerLawArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, a) = s.split_once(',').ok_or(format!("scaling '{s}' must be coef,exponent"))?;
        let coef = c.trim().parse().map_err(|_| format!("bad coefficient '{c}'"))?;
        let exponent = a.trim().parse().map_err(|_| format!("bad exponent '{a}'"))?;
        Ok(PowerLawArg(PowerLaw { coef, exponent }))
    }
}

impl TryFrom<String> for PowerLawArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PowerLawArg> for String {
    fn from(p: PowerLawArg) -> String {
        format!("{},{}", p.0.coef, p.0.exponent)
    }
}

/// Levels `i` for prop1: `17`, `17,19` or the inclusive range `17:25`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Levels(pub Vec<u32>);

impl FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("'{t}' is not a level"));
        if let Some((a, b)) = s.split_once(':') {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("level range '{s}' is empty"));
            }
            return Ok(Levels((a..=b).collect()));
        }
        s.split(',').map(num).collect::<Result<Vec<_>, _>>().map(Levels)
    }
}

impl<'de> Deserialize<'de> for Levels {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(u32),
            List(Vec<u32>),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::One(i) => Ok(Levels(vec![i])),
            Raw::List(v) => Ok(Levels(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub name: String,
    pub format: OutputFormat,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: OutputConfig,
    #[serde(flatten)]
    pub command: Command,
}

/// Parse `T` from an empty argument list so that clap's defaults are the only defaults.
fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults").no_binary_name(true));
    let matches = cmd.get_matches_from(std::iter::empty::<String>());
    T::from_arg_matches(&matches).expect("every argument has a default")
}

macro_rules! clap_default_impl {
    ($($t:ty),*) => {
        $(impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        })*
    };
}

clap_default_impl!(
    SimulateArgs,
    LoynesArgs,
    CoupleArgs,
    Gg1Args,
    TandemArgs,
    OdometerArgs,
    CumulantArgs,
    ScaledCumulantArgs,
    Prop1Args,
    Prop2Args
);

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Stationary tail of the slotted queue by time averages.
    ///
    /// CSV columns: q, survival, std_error.
    Simulate(SimulateArgs),
    /// Backward Loynes supremum sweep over window depths.
    ///
    /// CSV columns: replica, depth, partial_sum, running_max.
    Loynes(LoynesArgs),
    /// Forward coupling of X(x0) with X(0) over independent replicas.
    ///
    /// CSV columns: replica, coupling_time (empty if not coupled), coupled.
    Couple(CoupleArgs),
    /// G/G/1 waiting times from service and interarrival processes.
    ///
    /// CSV columns: n, waiting_time.
    Gg1(Gg1Args),
    /// Two constant-rate servers in series.
    ///
    /// CSV columns: n, arrivals, out1, q1, out2, q2 (queues after slot n).
    Tandem(TandemArgs),
    /// Odometer orbit, membership and exact set measures.
    ///
    /// CSV columns: k, counter, value, in_c for the points T^k(p).
    Odometer(OdometerArgs),
    /// Cumulant estimate on a theta grid and the decay rate.
    ///
    /// CSV columns: theta, lambda_hat, std_error, jensen_floor, lambda_minus_theta_s.
    Cumulant(CumulantArgs),
    /// Scaled cumulant for power-law scalings a(n), v(n).
    ///
    /// CSV columns: theta, scaled_lambda.
    ScaledCumulant(ScaledCumulantArgs),
    /// Exact inequality chain for the sub-exponential odometer tail.
    ///
    /// CSV columns: i, n_i, q_i, delta_i, threshold, mu_A, target, pass, chain_holds,
    /// mc_samples, mc_hits, mc_estimate, mc_std_error, all_ones_samples, all_ones_failures.
    Prop1(Prop1Args),
    /// Cumulant sandwich for the odometer arrivals.
    ///
    /// CSV columns: theta, upper_bound, lower_bound_from_a, lower_bound, gap, lambda_hat,
    /// std_error, full_fraction, bracketed.
    Prop2(Prop2Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Loynes(_) => "loynes",
            Command::Couple(_) => "couple",
            Command::Gg1(_) => "gg1",
            Command::Tandem(_) => "tandem",
            Command::Odometer(_) => "odometer",
            Command::Cumulant(_) => "cumulant",
            Command::ScaledCumulant(_) => "scaled-cumulant",
            Command::Prop1(_) => "prop1",
            Command::Prop2(_) => "prop2",
        }
    }

    /// Processes the command reads, for the input-protection check.
    pub fn processes(&self) -> Vec<&ProcessKind> {
        match self {
            Command::Simulate(a) => vec![&a.process],
            Command::Loynes(a) => vec![&a.process],
            Command::Couple(a) => vec![&a.process],
            Command::Gg1(a) => vec![&a.service, &a.interarrival],
            Command::Tandem(a) => vec![&a.process],
            Command::Cumulant(a) => vec![&a.process],
            Command::ScaledCumulant(a) => vec![&a.process],
            Command::Odometer(_) | Command::Prop1(_) | Command::Prop2(_) => vec![],
        }
    }

    /// Check every numeric constraint the library would otherwise reject
    /// mid-run.
    pub fn validate(&self) -> Result<(), String> {
        for p in self.processes() {
            p.validate().map_err(|e| e.to_string())?;
        }
        match self {
            Command::Simulate(a) => {
                rate(a.s, "s")?;
                positive(a.horizon, "horizon")?;
                if let Some(b) = a.burn_in {
                    if b.get() >= a.horizon.get() {
                        return Err(format!("burn-in {b} must be below horizon {}", a.horizon));
                    }
                }
                sorted(&a.thresholds, "thresholds", false)
            }
            Command::Loynes(a) => {
                rate(a.s, "s")?;
                positive(a.replicas, "replicas")?;
                finite_nonneg(a.slack, "slack")
            }
            Command::Couple(a) => {
                rate(a.s, "s")?;
                finite_nonneg(a.x0, "x0")?;
                positive(a.horizon, "horizon")?;
                positive(a.replicas, "replicas")
            }
            Command::Gg1(a) => {
                finite_nonneg(a.w0, "w0")?;
                positive(a.customers, "customers")
            }
            Command::Tandem(a) => {
                rate(a.s1, "s1")?;
                rate(a.s2, "s2")?;
                positive(a.horizon, "horizon")
            }
            Command::Odometer(a) => {
                let od = odometer(a.precision, a.truncation)?;
                if a.counter.is_some() && a.value.is_some() {
                    return Err("give at most one of counter and value".into());
                }
                if let Some(c) = &a.counter {
                    parse_counter(c)?;
                }
                if let Some(v) = a.value {
                    if !(0.0..1.0).contains(&v) {
                        return Err(format!("value {v} must lie in [0, 1)"));
                    }
                }
                if let Some(l) = a.levels {
                    if l > max_truncation(od.precision()) {
                        return Err(format!(
                            "levels {l} exceeds i_max = {} at precision {}",
                            max_truncation(od.precision()),
                            od.precision()
                        ));
                    }
                }
                Ok(())
            }
            Command::Cumulant(a) => {
                rate(a.s, "s")?;
                positive(a.n, "n")?;
                positive(a.m, "m")?;
                theta_grid(&a.thetas)
            }
            Command::ScaledCumulant(a) => {
                rate(a.s, "s")?;
                positive(a.n, "n")?;
                positive(a.m, "m")?;
                theta_grid(&a.thetas)?;
                ScalingFunctions::new(a.a.0, a.v.0).map_err(|e| e.to_string())?;
                sorted(&a.q, "q", false)?;
                if a.q.0.iter().any(|&q| q <= 0.0) {
                    return Err("q values must be positive".into());
                }
                Ok(())
            }
            Command::Prop1(a) => {
                let od = odometer(a.precision, a.truncation)?;
                if a.i.0.is_empty() {
                    return Err("at least one level i is required".into());
                }
                for &i in &a.i.0 {
                    level(&od, i)?;
                }
                Ok(())
            }
            Command::Prop2(a) => {
                let od = odometer(a.precision, a.truncation)?;
                level(&od, a.i)?;
                sorted(&a.thetas, "thetas", false)?;
                if a.thetas.0.iter().any(|&t| t < 0.0) {
                    return Err("thetas must be >= 0".into());
                }
                Ok(())
            }
        }
    }
}

fn rate(s: f64, what: &str) -> Result<(), String> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(format!("{what} = {s} must be finite and positive"))
    }
}

fn finite_nonneg(x: f64, what: &str) -> Result<(), String> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(format!("{what} = {x} must be finite and >= 0"))
    }
}

fn positive(c: Count, what: &str) -> Result<(), String> {
    if c.get() > 0 {
        Ok(())
    } else {
        Err(format!("{what} must be >= 1"))
    }
}

fn sorted(g: &Grid, what: &str, strict: bool) -> Result<(), String> {
    if g.0.is_empty() {
        return Err(format!("{what} must not be empty"));
    }
    if g.0.iter().any(|x| !x.is_finite()) {
        return Err(format!("{what} must be finite"));
    }
    let bad = g.0.windows(2).any(|w| if strict { w[0] >= w[1] } else { w[0] > w[1] });
    if bad {
        return Err(format!("{what} must be sorted ascending"));
    }
    Ok(())
}

fn theta_grid(g: &Grid) -> Result<(), String> {
    sorted(g, "thetas", true)?;
    if !g.0.contains(&0.0) {
        return Err("thetas must contain 0".into());
    }
    Ok(())
}

pub fn odometer(precision: u32, truncation: Option<u32>) -> Result<Odometer, String> {
    let od = Odometer::new(precision).map_err(|e| e.to_string())?;
    match truncation {
        Some(t) => od.with_truncation(t).map_err(|e| e.to_string()),
        None => Ok(od),
    }
}

fn level(od: &Odometer, i: u32) -> Result<(), String> {
    Prop1Params::new(i).map_err(|e| e.to_string())?;
    od.measure_a(i).map(|_| ()).map_err(|e| e.to_string())
}

/// `0x`-prefixed hex or decimal.
pub fn parse_counter(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|_| format!("'{s}' is not a counter"))
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Arrival process spec.
    #[arg(long, default_value = "odometer")]
    pub process: ProcessKind,
    /// Service per slot.
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value = "1e5")]
    pub horizon: Count,
    /// Slots discarded before counting; defaults to 10% of the horizon.
    #[arg(long)]
    pub burn_in: Option<Count>,
    /// Queue thresholds q: `a,b,c` or `start:stop:step`.
    #[arg(long, default_value = "0:40:1")]
    pub thresholds: Grid,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoynesArgs {
    #[arg(long, default_value = "iid-bernoulli:0.5")]
    pub process: ProcessKind,
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s: f64,
    /// Backward window length N.
    #[arg(long, default_value = "1000")]
    pub window: Count,
    #[arg(long, default_value = "1")]
    pub replicas: Count,
    /// Drift below the maximum required to call the supremum converged.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoupleArgs {
    #[arg(long, default_value = "odometer")]
    pub process: ProcessKind,
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s: f64,
    /// Initial state of the upper chain.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value = "1e5")]
    pub horizon: Count,
    #[arg(long, default_value = "100")]
    pub replicas: Count,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gg1Args {
    /// Service time process; replica stream 0 of the seed.
    #[arg(long, default_value = "iid-table:0.5=0.5,1.5=0.5")]
    pub service: ProcessKind,
    /// Interarrival time process; replica stream 1 of the seed.
    #[arg(long, default_value = "iid-table:1=0.5,2=0.5")]
    pub interarrival: ProcessKind,
    #[arg(long, default_value = "1e5")]
    pub customers: Count,
    /// Waiting time of customer 0.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub w0: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TandemArgs {
    #[arg(long, default_value = "odometer")]
    pub process: ProcessKind,
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s1: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub s2: f64,
    #[arg(long, default_value = "1e4")]
    pub horizon: Count,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdometerArgs {
    /// Binary digits K.
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    /// Largest band i in C; defaults to floor((K - 1) / 2).
    #[arg(long)]
    pub truncation: Option<u32>,
    /// Start point as a counter (`0x..` or decimal); a uniform point if neither this nor value is given.
    #[arg(long)]
    pub counter: Option<String>,
    /// Start point as a value in [0, 1), truncated to K digits.
    #[arg(long, allow_negative_numbers = true)]
    pub value: Option<f64>,
    /// Number of T steps to list.
    #[arg(long, default_value = "16")]
    pub orbit: Count,
    /// Step with T^-1 instead of T.
    #[arg(long, default_value_t = false)]
    pub backward: bool,
    /// Levels i listed in the measure table; defaults to min(i_max, 20).
    #[arg(long)]
    pub levels: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CumulantArgs {
    #[arg(long, default_value = "iid-bernoulli:0.5")]
    pub process: ProcessKind,
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s: f64,
    /// Block length.
    #[arg(long, default_value = "100")]
    pub n: Count,
    /// Number of blocks.
    #[arg(long, default_value = "1e4")]
    pub m: Count,
    /// Strictly increasing grid containing 0.
    #[arg(long, default_value = "0:3:0.05")]
    pub thetas: Grid,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaledCumulantArgs {
    #[arg(long, default_value = "iid-bernoulli:0.5")]
    pub process: ProcessKind,
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value = "100")]
    pub n: Count,
    #[arg(long, default_value = "1e4")]
    pub m: Count,
    #[arg(long, default_value = "0:3:0.05")]
    pub thetas: Grid,
    /// Space scaling a(n) = c n^alpha as `c,alpha`.
    #[arg(long, default_value = "1,1")]
    pub a: PowerLawArg,
    /// Time scaling v(n) = c n^alpha as `c,alpha`.
    #[arg(long, default_value = "1,1")]
    pub v: PowerLawArg,
    /// Queue levels at which the tail exponent delta v(a^-1(q)) is reported.
    #[arg(long, default_value = "1:20:1")]
    pub q: Grid,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Prop1Args {
    /// Levels: `17`, `17,19` or `17:25`.
    #[arg(long, default_value = "17")]
    pub i: Levels,
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    #[arg(long)]
    pub truncation: Option<u32>,
    /// Uniform draws for the Monte Carlo exceedance estimate (0 skips it).
    #[arg(long, default_value = "0")]
    pub m: Count,
    /// Conditional draws from A_i for the all-ones check (0 skips it).
    #[arg(long, default_value = "0")]
    pub conditional: Count,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Prop2Args {
    #[arg(long, default_value_t = 16)]
    pub i: u32,
    #[arg(long, default_value = "0.5,1,2")]
    pub thetas: Grid,
    /// Blocks of length 2^(i-1) for the Monte Carlo estimate (0 skips it).
    #[arg(long, default_value = "2^22")]
    pub m: Count,
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    #[arg(long)]
    pub truncation: Option<u32>,
}
