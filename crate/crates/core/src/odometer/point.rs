use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::OdometerError;

pub const MAX_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION: u32 = 64;

pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A point of `[0, 1)` held as its first `K` binary digits.
///
/// Digit `r_l` (weight `2^-l`) is stored as bit `l - 1` of an unsigned
/// counter, so `r_1` is the least significant counter bit. Under this
/// layout the odometer map is a plain decrement of the counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicPoint {
    counter: u64,
    precision: u32,
}

impl DyadicPoint {
    pub fn from_counter(counter: u64, precision: u32) -> Result<Self, OdometerError> {
        check_precision(precision)?;
        if counter & !low_mask(precision) != 0 {
            return Err(OdometerError::CounterOutOfRange { counter, precision });
        }
        Ok(Self { counter, precision })
    }

    pub fn zero(precision: u32) -> Result<Self, OdometerError> {
        Self::from_counter(0, precision)
    }

    /// Digits `r_1, r_2, ...`; precision is the slice length.
    pub fn from_bits(bits: &[bool]) -> Result<Self, OdometerError> {
        Self::from_leading_bits(bits, bits.len() as u32)
    }

    /// Digits `r_1, ..., r_m` followed by zeros up to `precision`.
    pub fn from_leading_bits(bits: &[bool], precision: u32) -> Result<Self, OdometerError> {
        check_precision(precision)?;
        if bits.len() as u32 > precision {
            return Err(OdometerError::DepthExceedsPrecision {
                depth: bits.len() as u32,
                precision,
            });
        }
        let counter = bits
            .iter()
            .enumerate()
            .fold(0u64, |c, (l, &b)| c | (u64::from(b) << l));
        Ok(Self { counter, precision })
    }

    /// The first `precision` binary digits of `x` (truncation, not rounding).
    pub fn from_value(x: f64, precision: u32) -> Result<Self, OdometerError> {
        check_precision(precision)?;
        if !(0.0..1.0).contains(&x) {
            return Err(OdometerError::ValueOutOfRange(x));
        }
        let mut bits = Vec::with_capacity(precision as usize);
        let mut rest = x;
        for _ in 0..precision {
            rest *= 2.0;
            if rest >= 1.0 {
                bits.push(true);
                rest -= 1.0;
            } else {
                bits.push(false);
            }
        }
        Self::from_bits(&bits)
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Digit `r_l` for `1 <= l <= K`.
    pub fn bit(&self, l: u32) -> bool {
        assert!(l >= 1 && l <= self.precision, "digit index {l} outside 1..={}", self.precision);
        (self.counter >> (l - 1)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (1..=self.precision).map(|l| self.bit(l)).collect()
    }

    /// Exact value as a numerator over `2^64`.
    pub fn value_numer(&self) -> u64 {
        self.counter.reverse_bits()
    }

    pub fn value(&self) -> f64 {
        self.value_numer() as f64 / 18446744073709551616.0
    }

    pub fn is_zero(&self) -> bool {
        self.counter == 0
    }

    pub fn is_all_ones(&self) -> bool {
        self.counter == low_mask(self.precision)
    }

    /// Index of the first 1 digit.
    pub fn tau(&self) -> Result<u32, OdometerError> {
        if self.is_zero() {
            return Err(OdometerError::ExceptionalPoint("tau is undefined at 0"));
        }
        Ok(self.counter.trailing_zeros() + 1)
    }

    /// One step of the odometer: digits before `tau` become 1, digit `tau` becomes 0.
    pub fn apply_t(&self) -> Result<Self, OdometerError> {
        if self.is_zero() {
            return Err(OdometerError::ExceptionalPoint("T is undefined at 0"));
        }
        Ok(Self {
            counter: self.counter - 1,
            precision: self.precision,
        })
    }

    pub fn apply_t_inv(&self) -> Result<Self, OdometerError> {
        if self.is_all_ones() {
            return Err(OdometerError::ExceptionalPoint(
                "T^-1 is undefined at the all-ones expansion",
            ));
        }
        Ok(Self {
            counter: self.counter + 1,
            precision: self.precision,
        })
    }

    /// `T^k` for any signed `k`; the counter moves by `-k`.
    pub fn apply_t_pow(&self, k: i64) -> Result<Self, OdometerError> {
        let target = i128::from(self.counter) - i128::from(k);
        if target < 0 || target > i128::from(low_mask(self.precision)) {
            return Err(OdometerError::OrbitOutOfWindow {
                counter: self.counter,
                k,
                precision: self.precision,
            });
        }
        Ok(Self {
            counter: target as u64,
            precision: self.precision,
        })
    }

    /// `j` such that the point lies in `I_j^depth`: the low `depth` counter bits.
    pub fn interval_index(&self, depth: u32) -> Result<u64, OdometerError> {
        if depth > self.precision {
            return Err(OdometerError::DepthExceedsPrecision {
                depth,
                precision: self.precision,
            });
        }
        Ok(self.counter & low_mask(depth))
    }

    pub fn to_hex(&self) -> String {
        format!("{:#x}", self.counter)
    }
}

pub(crate) fn check_precision(precision: u32) -> Result<(), OdometerError> {
    if precision == 0 || precision > MAX_PRECISION {
        Err(OdometerError::InvalidPrecision(precision))
    } else {
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    counter: String,
    precision: u32,
}

impl Serialize for DyadicPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PointRepr {
            counter: self.to_hex(),
            precision: self.precision,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DyadicPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PointRepr::deserialize(deserializer)?;
        let digits = repr
            .counter
            .strip_prefix("0x")
            .or_else(|| repr.counter.strip_prefix("0X"))
            .unwrap_or(&repr.counter);
        let counter = u64::from_str_radix(digits, 16).map_err(serde::de::Error::custom)?;
        DyadicPoint::from_counter(counter, repr.precision).map_err(serde::de::Error::custom)
    }
}
