//! The dyadic odometer `T` on `[0, 1)` and the sets `A_i`, `B_i`, `C` built
//! from its reversed-binary partitions.
//!
//! Points carry a finite precision `K`. With digit `r_l` stored as counter
//! bit `l - 1`, `I_j^i` is "low `i` counter bits equal `j`" and `T` is a
//! decrement, so every set below is a condition on counter bits:
//!
//! * `A_i` (`i >= 1`): low `2i + 1` bits in `[0, 2^(i-1))`.
//! * `B_i` (`i >= 1`): low `2i + 1` bits in `[2^(i-1), 2^i)`, i.e. bit `i - 1`
//!   set and bits `i ..= 2i` clear.
//! * `B_0`: bits 0 and 1 clear.
//! * `C`: the union of all `B_i`, truncated at `i_max`.

mod count;
mod intervals;
mod point;

pub use count::CMembershipCounter;
pub use intervals::{DyadicInterval, DyadicIntervalSet};
pub use point::{DyadicPoint, DEFAULT_PRECISION, MAX_PRECISION};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Exact;
use point::{check_precision, low_mask};

/// Sets with more components than this are refused rather than enumerated.
pub const MAX_ENUMERATED_COMPONENTS: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdometerError {
    #[error("exceptional point: {0}")]
    ExceptionalPoint(&'static str),
    #[error("orbit leaves representable window: counter {counter:#x} shifted by T^{k} at precision {precision}")]
    OrbitOutOfWindow { counter: u64, k: i64, precision: u32 },
    #[error("depth {depth} exceeds precision {precision}")]
    DepthExceedsPrecision { depth: u32, precision: u32 },
    #[error("precision must be in 1..=64, got {0}")]
    InvalidPrecision(u32),
    #[error("counter {counter:#x} does not fit in {precision} bits")]
    CounterOutOfRange { counter: u64, precision: u32 },
    #[error("interval index {index} out of range for depth {depth}")]
    IndexOutOfRange { depth: u32, index: u64 },
    #[error("value {0} is outside [0, 1)")]
    ValueOutOfRange(f64),
    #[error("truncation level {requested} exceeds the maximum {max} supported at precision {precision}")]
    TruncationTooDeep { requested: u32, max: u32, precision: u32 },
    #[error("set A_i/B_i requires i >= 1, got {0}")]
    IndexTooSmall(u32),
    #[error("set would have {0} components; refusing to enumerate")]
    TooManyComponents(u64),
    #[error("window of length {0} does not fit in the representable orbit")]
    WindowTooLong(u64),
}

/// Deepest `i` whose band `B_i` is decidable with `K` digits.
pub fn max_truncation(precision: u32) -> u32 {
    precision.saturating_sub(1) / 2
}

/// Precision `K` together with the truncation level used for membership in `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Odometer {
    precision: u32,
    truncation: u32,
}

impl Default for Odometer {
    fn default() -> Self {
        Self::new(DEFAULT_PRECISION).expect("default precision is valid")
    }
}

impl Odometer {
    pub fn new(precision: u32) -> Result<Self, OdometerError> {
        check_precision(precision)?;
        if precision < 2 {
            // B_0 needs two digits.
            return Err(OdometerError::InvalidPrecision(precision));
        }
        Ok(Self {
            precision,
            truncation: max_truncation(precision),
        })
    }

    pub fn with_truncation(self, i_max: u32) -> Result<Self, OdometerError> {
        let max = max_truncation(self.precision);
        if i_max > max {
            return Err(OdometerError::TruncationTooDeep {
                requested: i_max,
                max,
                precision: self.precision,
            });
        }
        Ok(Self {
            truncation: i_max,
            ..self
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn point(&self, counter: u64) -> Result<DyadicPoint, OdometerError> {
        DyadicPoint::from_counter(counter, self.precision)
    }

    fn check_band(&self, i: u32) -> Result<(), OdometerError> {
        let depth = 2 * i + 1;
        if depth > self.precision {
            Err(OdometerError::DepthExceedsPrecision {
                depth,
                precision: self.precision,
            })
        } else {
            Ok(())
        }
    }

    fn band(&self, i: u32, lo: u64, hi: u64) -> Result<DyadicIntervalSet, OdometerError> {
        let count = hi - lo;
        if count > MAX_ENUMERATED_COMPONENTS {
            return Err(OdometerError::TooManyComponents(count));
        }
        let depth = 2 * i + 1;
        Ok(DyadicIntervalSet::from_intervals(
            (lo..hi).map(|j| DyadicInterval::new(depth, j).expect("j < 2^i <= 2^depth")),
        ))
    }

    /// `A_i = ⋃_{0 <= j < 2^(i-1)} I_j^(2i+1)`; `A_0` is empty.
    pub fn set_a(&self, i: u32) -> Result<DyadicIntervalSet, OdometerError> {
        if i == 0 {
            return Ok(DyadicIntervalSet::empty());
        }
        self.check_band(i)?;
        self.band(i, 0, 1 << (i - 1))
    }

    /// `B_0 = [0, 1/4)`; `B_i = ⋃_{2^(i-1) <= j < 2^i} I_j^(2i+1)`.
    pub fn set_b(&self, i: u32) -> Result<DyadicIntervalSet, OdometerError> {
        if i == 0 {
            return Ok(DyadicIntervalSet::from_intervals([DyadicInterval::new(2, 0)?]));
        }
        self.check_band(i)?;
        self.band(i, 1 << (i - 1), 1 << i)
    }

    /// `B_0 ∪ ... ∪ B_{i_max}` and the mass bound `2^(-i_max-2)` on the rest of `C`.
    pub fn set_c_truncated(&self, i_max: u32) -> Result<(DyadicIntervalSet, Exact), OdometerError> {
        self.check_band(i_max)?;
        let mut set = self.set_b(0)?;
        for i in 1..=i_max {
            set = set.union(&self.set_b(i)?);
        }
        Ok((set, Exact::pow2_inv(i_max + 2)))
    }

    /// `μ(A_i)` from the count of disjoint depth-`2i+1` intervals.
    pub fn measure_a(&self, i: u32) -> Result<Exact, OdometerError> {
        if i == 0 {
            return Ok(Exact::zero());
        }
        self.check_band(i)?;
        Ok(Exact::dyadic(1u128 << (i - 1), 2 * i + 1))
    }

    pub fn measure_b(&self, i: u32) -> Result<Exact, OdometerError> {
        if i == 0 {
            return Ok(Exact::pow2_inv(2));
        }
        self.check_band(i)?;
        Ok(Exact::dyadic(1u128 << (i - 1), 2 * i + 1))
    }

    /// Exact `μ(B_0 ∪ ... ∪ B_{i_max})` by counting counters, without
    /// enumerating intervals.
    pub fn measure_c_truncated(&self, i_max: u32) -> Result<Exact, OdometerError> {
        let od = self.with_truncation(i_max)?;
        let counter = CMembershipCounter::new(od);
        let members = counter.count_below(1u128 << self.precision);
        Ok(if members == 1u128 << self.precision {
            Exact::one()
        } else {
            Exact::dyadic(members, self.precision)
        })
    }

    pub fn in_a(&self, p: &DyadicPoint, i: u32) -> Result<bool, OdometerError> {
        if i == 0 {
            return Ok(false);
        }
        self.check_band(i)?;
        Ok(p.interval_index(2 * i + 1)? < 1 << (i - 1))
    }

    pub fn in_b(&self, p: &DyadicPoint, i: u32) -> Result<bool, OdometerError> {
        if i == 0 {
            return Ok(p.interval_index(2)? == 0);
        }
        self.check_band(i)?;
        let j = p.interval_index(2 * i + 1)?;
        Ok((1 << (i - 1)..1 << i).contains(&j))
    }

    /// Membership in `B_0 ∪ ... ∪ B_{i_max}` for the configured truncation.
    pub fn in_c(&self, p: &DyadicPoint) -> bool {
        in_c_counter(p.counter(), self.truncation)
    }

    /// Uniform point with K fair digits, resampled away from 0 and all-ones.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> DyadicPoint {
        let mask = low_mask(self.precision);
        loop {
            let c = rng.random::<u64>() & mask;
            if c != 0 && c != mask {
                return DyadicPoint::from_counter(c, self.precision).expect("masked");
            }
        }
    }

    /// Uniform point whose backward window of length `back` and forward block
    /// of length `fwd` both stay inside the representable orbit.
    pub fn sample_orbit_start<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        back: u64,
        fwd: u64,
    ) -> Result<DyadicPoint, OdometerError> {
        let mask = low_mask(self.precision);
        let room = u128::from(back) + u128::from(fwd);
        if room > u128::from(mask) {
            return Err(OdometerError::WindowTooLong(back.max(fwd)));
        }
        loop {
            let p = self.sample_uniform(rng);
            let c = p.counter();
            if c >= fwd && u128::from(c) + u128::from(back) <= u128::from(mask) + 1 {
                return Ok(p);
            }
        }
    }

    /// Uniform point of `A_i`.
    pub fn conditional_sample_a<R: Rng + ?Sized>(&self, i: u32, rng: &mut R) -> Result<DyadicPoint, OdometerError> {
        if i == 0 {
            return Err(OdometerError::IndexTooSmall(0));
        }
        self.check_band(i)?;
        let depth = 2 * i + 1;
        let mask = low_mask(self.precision);
        let high_bits = self.precision - depth;
        loop {
            let j = rng.random_range(0..1u64 << (i - 1));
            let high = if high_bits == 0 {
                0
            } else {
                rng.random::<u64>() & low_mask(high_bits)
            };
            let c = j | high.checked_shl(depth).unwrap_or(0);
            if c != 0 && c != mask {
                return DyadicPoint::from_counter(c, self.precision);
            }
        }
    }

    /// `Σ_{j < n} 1_C(T^{-j} ω)`: the backward window sum starting at `ω`.
    pub fn backward_window_sum(&self, counter: &CMembershipCounter, start: &DyadicPoint, n: u64) -> Result<u64, OdometerError> {
        let c = u128::from(start.counter());
        let end = c + u128::from(n);
        if end > 1u128 << self.precision {
            return Err(OdometerError::WindowTooLong(n));
        }
        Ok((counter.count_below(end) - counter.count_below(c)) as u64)
    }

    /// `Σ_{k=1}^{n} 1_C(T^k ω)`: the forward block sum after `ω`.
    pub fn forward_block_sum(&self, counter: &CMembershipCounter, start: &DyadicPoint, n: u64) -> Result<u64, OdometerError> {
        let c = u128::from(start.counter());
        let n = u128::from(n);
        if n > c {
            return Err(OdometerError::WindowTooLong(n as u64));
        }
        Ok((counter.count_below(c) - counter.count_below(c - n)) as u64)
    }
}

/// Bit test for `B_0 ∪ ... ∪ B_{i_max}` on a raw counter.
#[inline]
pub(crate) fn in_c_counter(c: u64, i_max: u32) -> bool {
    if c & 0b11 == 0 {
        return true;
    }
    // B_i for i >= 1: bit k = i - 1 set, bits k+1 ..= 2k+2 clear.
    let mut rest = c & low_mask(i_max);
    while rest != 0 {
        let k = rest.trailing_zeros();
        let run = (c >> (k + 1)) & low_mask(k + 2);
        if run == 0 {
            return true;
        }
        rest &= rest - 1;
    }
    false
}
