use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{low_mask, DyadicPoint, MAX_PRECISION};
use super::OdometerError;
use crate::exact::Exact;

/// Numerators of endpoints are taken over this denominator.
const SCALE: u128 = 1u128 << 64;

/// `I_j^i`: points whose first `i` digits spell `j` in reversed binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    depth: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(depth: u32, index: u64) -> Result<Self, OdometerError> {
        if depth > MAX_PRECISION {
            return Err(OdometerError::DepthExceedsPrecision {
                depth,
                precision: MAX_PRECISION,
            });
        }
        if index & !low_mask(depth) != 0 {
            return Err(OdometerError::IndexOutOfRange { depth, index });
        }
        Ok(Self { depth, index })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn measure(&self) -> Exact {
        Exact::pow2_inv(self.depth)
    }

    /// Half-open value range `[lo, hi)` as numerators over `2^64`.
    pub fn value_range(&self) -> (u128, u128) {
        let lo = u128::from(self.index.reverse_bits());
        (lo, lo + (SCALE >> self.depth))
    }

    pub fn contains(&self, p: &DyadicPoint) -> bool {
        p.precision() >= self.depth && p.counter() & low_mask(self.depth) == self.index
    }

    /// Image under `T`. For `j >= 1` this is `I_{j-1}^i`; for `j = 0` it is
    /// `I_{2^i - 1}^i` up to the exceptional point 0.
    pub fn image_under_t(&self) -> DyadicInterval {
        let index = self.index.wrapping_sub(1) & low_mask(self.depth);
        DyadicInterval {
            depth: self.depth,
            index,
        }
    }

    pub fn preimage_under_t(&self) -> DyadicInterval {
        let index = self.index.wrapping_add(1) & low_mask(self.depth);
        DyadicInterval {
            depth: self.depth,
            index,
        }
    }

    /// Smallest and largest counters of the interval at precision `K`.
    pub fn counter_bounds(&self, precision: u32) -> Result<(u64, u64), OdometerError> {
        if self.depth > precision {
            return Err(OdometerError::DepthExceedsPrecision {
                depth: self.depth,
                precision,
            });
        }
        let high = low_mask(precision) & !low_mask(self.depth);
        Ok((self.index, self.index | high))
    }
}

/// Finite union of dyadic intervals, kept as sorted, disjoint, non-adjacent
/// value ranges. Two sets are equal iff they cover the same points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DyadicIntervalSet {
    ranges: Vec<(u128, u128)>,
}

impl DyadicIntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_intervals<I: IntoIterator<Item = DyadicInterval>>(intervals: I) -> Self {
        Self::from_ranges(intervals.into_iter().map(|iv| iv.value_range()).collect())
    }

    fn from_ranges(mut ranges: Vec<(u128, u128)>) -> Self {
        ranges.sort_unstable();
        let mut merged: Vec<(u128, u128)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self { ranges: merged }
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.ranges.clone();
        all.extend_from_slice(&other.ranges);
        Self::from_ranges(all)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (mut a, mut b) = (0, 0);
        let mut out = Vec::new();
        while a < self.ranges.len() && b < other.ranges.len() {
            let (alo, ahi) = self.ranges[a];
            let (blo, bhi) = other.ranges[b];
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo < hi {
                out.push((lo, hi));
            }
            if ahi < bhi {
                a += 1;
            } else {
                b += 1;
            }
        }
        Self { ranges: out }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        let mut b = 0;
        for &(lo, hi) in &self.ranges {
            while b < other.ranges.len() && other.ranges[b].1 <= lo {
                b += 1;
            }
            match other.ranges.get(b) {
                Some(&(olo, ohi)) if olo <= lo && hi <= ohi => {}
                _ => return false,
            }
        }
        true
    }

    pub fn contains(&self, p: &DyadicPoint) -> bool {
        let v = u128::from(p.value_numer());
        let idx = self.ranges.partition_point(|&(lo, _)| lo <= v);
        idx > 0 && v < self.ranges[idx - 1].1
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Exact {
        let total: u128 = self.ranges.iter().map(|&(lo, hi)| hi - lo).sum();
        if total == SCALE {
            Exact::one()
        } else {
            Exact::dyadic(total, 64)
        }
    }

    /// Canonical decomposition into maximal dyadic intervals, in value order.
    /// Sibling intervals never both appear: they are always merged into
    /// their parent.
    pub fn components(&self) -> Vec<DyadicInterval> {
        let mut out = Vec::new();
        for &(mut lo, hi) in &self.ranges {
            while lo < hi {
                let align = if lo == 0 { 64 } else { lo.trailing_zeros().min(64) };
                let mut size_log = align;
                while (1u128 << size_log) > hi - lo {
                    size_log -= 1;
                }
                let depth = 64 - size_log;
                out.push(DyadicInterval {
                    depth,
                    index: (lo as u64).reverse_bits(),
                });
                lo += 1u128 << size_log;
            }
        }
        out
    }

    pub fn len_ranges(&self) -> usize {
        self.ranges.len()
    }
}

impl Serialize for DyadicIntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(u32, u64)> = self
            .components()
            .into_iter()
            .map(|iv| (iv.depth, iv.index))
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DyadicIntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(u32, u64)>::deserialize(deserializer)?;
        let intervals = pairs
            .into_iter()
            .map(|(d, j)| DyadicInterval::new(d, j))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(DyadicIntervalSet::from_intervals(intervals))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(d: u32, j: u64) -> DyadicInterval {
        DyadicInterval::new(d, j).unwrap()
    }

    #[test]
    fn interval_ranges() {
        // I_1^2: digits 1,0 -> [1/2, 3/4)
        let (lo, hi) = iv(2, 1).value_range();
        assert_eq!((lo, hi), (SCALE / 2, 3 * SCALE / 4));
        // I_3^2: digits 1,1 -> [3/4, 1)
        assert_eq!(iv(2, 3).value_range(), (3 * SCALE / 4, SCALE));
        assert_eq!(iv(0, 0).value_range(), (0, SCALE));
        assert!(DyadicInterval::new(2, 4).is_err());
    }

    #[test]
    fn siblings_merge_to_parent() {
        let s = DyadicIntervalSet::from_intervals([iv(3, 1), iv(3, 5)]);
        assert_eq!(s.components(), vec![iv(2, 1)]);
        assert_eq!(s.measure(), Exact::pow2_inv(2));
        let whole = DyadicIntervalSet::from_intervals([iv(1, 0), iv(1, 1)]);
        assert_eq!(whole.components(), vec![iv(0, 0)]);
        assert_eq!(whole.measure(), Exact::one());
    }

    #[test]
    fn non_siblings_stay_apart() {
        // [1/4, 1/2) and [1/2, 3/4) are adjacent but not siblings.
        let s = DyadicIntervalSet::from_intervals([iv(2, 2), iv(2, 1)]);
        assert_eq!(s.len_ranges(), 1);
        assert_eq!(s.components(), vec![iv(2, 2), iv(2, 1)]);
    }

    #[test]
    fn union_measure_does_not_double_count() {
        let a = DyadicIntervalSet::from_intervals([iv(1, 0)]);
        let b = DyadicIntervalSet::from_intervals([iv(2, 0), iv(2, 1)]);
        assert_eq!(a.union(&b).measure(), Exact::dyadic(3, 2));
        assert_eq!(a.intersection(&b).measure(), Exact::pow2_inv(2));
    }

    #[test]
    fn subset_checks() {
        let big = DyadicIntervalSet::from_intervals([iv(1, 0)]);
        let small = DyadicIntervalSet::from_intervals([iv(3, 0), iv(3, 4)]);
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(DyadicIntervalSet::empty().is_subset_of(&small));
    }

    #[test]
    fn point_membership() {
        let s = DyadicIntervalSet::from_intervals([iv(3, 1)]);
        let p = DyadicPoint::from_value(0.5625, 64).unwrap();
        assert!(s.contains(&p));
        assert!(iv(3, 1).contains(&p));
        let q = DyadicPoint::from_value(0.625, 64).unwrap();
        assert!(!s.contains(&q));
    }

    #[test]
    fn serde_pairs() {
        let s = DyadicIntervalSet::from_intervals([iv(3, 1), iv(2, 2)]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[2,2],[3,1]]");
        let back: DyadicIntervalSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
