use ergoq::odometer::{DyadicInterval, DyadicPoint, Odometer};
use ergoq::processes::replica_rng;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn t_is_a_bijection(c in 1u64..u64::MAX) {
        let p = DyadicPoint::from_counter(c, 64).unwrap();
        prop_assert_eq!(p.apply_t().unwrap().apply_t_inv().unwrap(), p);
        prop_assert_eq!(p.apply_t_inv().unwrap().apply_t().unwrap(), p);
    }

    #[test]
    fn counter_law(c in 1u64..=u64::MAX, k in 2u32..=64) {
        let c = c & low_bits(k);
        prop_assume!(c != 0);
        let p = DyadicPoint::from_counter(c, k).unwrap();
        prop_assert_eq!(p.apply_t().unwrap().counter(), c - 1);
    }

    #[test]
    fn t_changes_exactly_the_leading_digits(c in 1u64..=u64::MAX) {
        // T flips the first tau(p) digits: the leading zeros to ones and the first one to zero.
        let p = DyadicPoint::from_counter(c, 64).unwrap();
        let tau = p.tau().unwrap();
        let q = p.apply_t().unwrap();
        for l in 1..=64 {
            if l < tau {
                prop_assert!(!p.bit(l) && q.bit(l));
            } else if l == tau {
                prop_assert!(p.bit(l) && !q.bit(l));
            } else {
                prop_assert_eq!(p.bit(l), q.bit(l));
            }
        }
    }

    #[test]
    fn power_matches_iteration(c in 2000u64..u64::MAX - 2000, k in -1000i64..=1000) {
        let p = DyadicPoint::from_counter(c, 64).unwrap();
        let mut q = p;
        for _ in 0..k.unsigned_abs() {
            q = if k > 0 { q.apply_t().unwrap() } else { q.apply_t_inv().unwrap() };
        }
        prop_assert_eq!(p.apply_t_pow(k).unwrap(), q);
    }

    #[test]
    fn interval_image_and_preimage(depth in 0u32..=12, index in any::<u64>()) {
        let iv = DyadicInterval::new(depth, index & low_bits(depth)).unwrap();
        let image = iv.image_under_t();
        let pre = iv.preimage_under_t();
        prop_assert_eq!(image.measure(), iv.measure());
        prop_assert_eq!(pre.measure(), iv.measure());
        prop_assert_eq!(pre.image_under_t(), iv);
    }

    #[test]
    fn members_map_into_image(depth in 1u32..=12, index in 1u64..4096, high in any::<u64>()) {
        let index = index & low_bits(depth);
        prop_assume!(index >= 1);
        let iv = DyadicInterval::new(depth, index).unwrap();
        let c = (high & !low_bits(depth)) | index;
        let p = DyadicPoint::from_counter(c, 64).unwrap();
        prop_assert!(iv.contains(&p));
        prop_assert!(iv.image_under_t().contains(&p.apply_t().unwrap()));
        prop_assert_eq!(iv.image_under_t(), DyadicInterval::new(depth, index - 1).unwrap());
    }

    #[test]
    fn value_of_counter_is_recursive_halving(c in any::<u64>()) {
        // 53 digits fit an f64 mantissa, so both routes are exact.
        let p = DyadicPoint::from_counter(c & low_bits(53), 53).unwrap();
        let mut v = 0.0f64;
        for l in (1..=53).rev() {
            v = (v + f64::from(u8::from(p.bit(l)))) / 2.0;
        }
        prop_assert_eq!(p.value(), v);
    }

    #[test]
    fn membership_agrees_with_sets(c in any::<u64>(), i in 1u32..=10) {
        let od = Odometer::default();
        let p = DyadicPoint::from_counter(c, 64).unwrap();
        prop_assert_eq!(od.in_a(&p, i).unwrap(), od.set_a(i).unwrap().contains(&p));
        prop_assert_eq!(od.in_b(&p, i).unwrap(), od.set_b(i).unwrap().contains(&p));
    }
}

fn low_bits(depth: u32) -> u64 {
    if depth >= 64 {
        u64::MAX
    } else {
        (1u64 << depth) - 1
    }
}

#[test]
fn nesting_of_a_inside_truncated_c() {
    let od = Odometer::default();
    for i in 1..=16 {
        let (c, _) = od.set_c_truncated(i - 1).unwrap();
        assert!(od.set_a(i).unwrap().is_subset_of(&c), "A_{i}");
    }
}

#[test]
fn exact_measures_for_every_level_at_small_precision() {
    for k in [9u32, 21, 33] {
        let od = Odometer::new(k).unwrap();
        let i_max = (k - 1) / 2;
        for i in 1..=i_max.min(12) {
            let want = ergoq::Exact::pow2_inv(i + 2);
            assert_eq!(od.set_a(i).unwrap().measure(), want, "K = {k}, A_{i}");
            assert_eq!(od.set_b(i).unwrap().measure(), want, "K = {k}, B_{i}");
            assert_eq!(od.measure_a(i).unwrap(), want);
        }
        assert!(od.set_a(i_max + 1).is_err());
    }
}

/// Pushes uniform points through `T` and bins the images by value; under
/// measure preservation the bins are uniform.
#[test]
fn uniform_law_is_preserved_by_t() {
    const BINS: usize = 1024;
    const M: u64 = 1_000_000;
    let od = Odometer::default();
    let mut rng = replica_rng(2024, 0);
    let mut counts = vec![0u64; BINS];
    for _ in 0..M {
        let p = od.sample_uniform(&mut rng).apply_t().unwrap();
        counts[(p.value_numer() >> 54) as usize] += 1;
    }
    let expected = M as f64 / BINS as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((BINS - 1) as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

#[test]
fn exceptional_endpoints_error() {
    let zero = DyadicPoint::zero(64).unwrap();
    assert!(zero.apply_t().is_err());
    let ones = DyadicPoint::from_counter(u64::MAX, 64).unwrap();
    assert!(ones.apply_t_inv().is_err());
    let p = DyadicPoint::from_counter(5, 64).unwrap();
    assert!(p.apply_t_pow(6).is_err());
    assert_eq!(p.apply_t_pow(5).unwrap(), zero);
}
