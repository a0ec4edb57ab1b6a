//! Exact dyadic rationals used for measures and bounds.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Reduced fraction `numer / denom`. Every value in this crate has a
/// power-of-two denominator no larger than `2^64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Ratio<u128>);

impl Exact {
    pub fn zero() -> Self {
        Exact(Ratio::from_integer(0))
    }

    pub fn one() -> Self {
        Exact(Ratio::from_integer(1))
    }

    /// `numer / 2^exp`.
    pub fn dyadic(numer: u128, exp: u32) -> Self {
        assert!(exp <= 126, "denominator 2^{exp} does not fit");
        Exact(Ratio::new(numer, 1u128 << exp))
    }

    /// `2^-exp`.
    pub fn pow2_inv(exp: u32) -> Self {
        Self::dyadic(1, exp)
    }

    pub fn numer(&self) -> u128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Natural log, computed from the reduced fraction.
    pub fn ln(&self) -> f64 {
        (self.numer() as f64).ln() - (self.denom() as f64).ln()
    }
}

impl std::ops::Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact(self.0 - rhs.0)
    }
}

/// Always `p/q`, including integers (`0/1`).
impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl std::str::FromStr for Exact {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, q) = s.split_once('/').ok_or_else(|| format!("expected p/q, got {s:?}"))?;
        let p: u128 = p.trim().parse().map_err(|e| format!("numerator: {e}"))?;
        let q: u128 = q.trim().parse().map_err(|e| format!("denominator: {e}"))?;
        if q == 0 {
            return Err("zero denominator".into());
        }
        Ok(Exact(Ratio::new(p, q)))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_reduced_fraction() {
        assert_eq!(Exact::dyadic(4, 5).to_string(), "1/8");
        assert_eq!(Exact::zero().to_string(), "0/1");
        assert_eq!(Exact::pow2_inv(19).to_string(), "1/524288");
    }

    #[test]
    fn parses_back() {
        let e: Exact = "3/8".parse().unwrap();
        assert_eq!(e, Exact::dyadic(3, 3));
        assert!("3".parse::<Exact>().is_err());
        assert!("1/0".parse::<Exact>().is_err());
    }

    #[test]
    fn ln_of_power_of_two() {
        let e = Exact::pow2_inv(18);
        assert!((e.ln() + 18.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }
}
