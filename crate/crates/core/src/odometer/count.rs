use super::Odometer;

/// Counts members of `C` (as configured by an [`Odometer`]) among the
/// counters `0 .. x`, in `O(K)` per query.
///
/// Membership is scanned from the most significant bit down. The only state
/// needed is the length of the zero run sitting directly above the current
/// position: a set bit at position `k` closes band `B_{k+1}` exactly when at
/// least `k + 2` zeros sit above it, and `B_0` is decided by the run that
/// reaches the bottom. `free[pos][run]` holds the number of completions of
/// the low `pos` bits that end up in `C` from a not-yet-accepted state.
#[derive(Debug, Clone)]
pub struct CMembershipCounter {
    precision: u32,
    truncation: u32,
    free: Vec<Vec<u128>>,
}

impl CMembershipCounter {
    pub fn new(od: Odometer) -> Self {
        let k = od.precision() as usize;
        let t = od.truncation();
        // Runs longer than K never occur; one extra slot absorbs L + 1.
        let width = k + 2;
        let mut free = vec![vec![0u128; width]; k + 1];
        for (run, slot) in free[0].iter_mut().enumerate() {
            *slot = u128::from(run >= 2);
        }
        for pos in 1..=k {
            let bit = (pos - 1) as u32;
            for run in 0..width {
                let zero = free[pos - 1][(run + 1).min(width - 1)];
                let one = if bit < t && run as u32 >= bit + 2 {
                    1u128 << bit
                } else {
                    free[pos - 1][0]
                };
                free[pos][run] = zero + one;
            }
        }
        Self {
            precision: od.precision(),
            truncation: t,
            free,
        }
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// `#{c < x : c ∈ C}` for `0 <= x <= 2^K`.
    pub fn count_below(&self, x: u128) -> u128 {
        let k = self.precision;
        assert!(x <= 1u128 << k, "query {x} beyond 2^{k}");
        if x == 1u128 << k {
            return self.free[k as usize][0];
        }
        let width = self.free[0].len();
        let mut run = 0usize;
        let mut accepted = false;
        let mut acc = 0u128;
        for bit in (0..k).rev() {
            if (x >> bit) & 1 == 1 {
                acc += if accepted {
                    1u128 << bit
                } else {
                    self.free[bit as usize][(run + 1).min(width - 1)]
                };
                if !accepted && bit < self.truncation && run as u32 >= bit + 2 {
                    accepted = true;
                }
                run = 0;
            } else {
                run += 1;
            }
        }
        acc
    }
}
