//! Filter behavior under random operation sequences, plus the Monte Carlo
//! check of the analytic false-positive formula.

use std::collections::HashMap;
use std::collections::HashSet;

use dls::cbf::{theoretical_fpr_approx, theoretical_fpr_exact, CbfParams, CountingBloomFilter};
use dls::label_space::RangeLabel;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    /// With every delete matched to a prior add and no counter at its
    /// ceiling, the min-counter query never drops below the live
    /// multiplicity, and removing everything restores a zero filter.
    #[test]
    fn balanced_deletes_restore_zero(
        m in 64u64..512,
        k_h in 1u32..=6,
        labels in proptest::collection::vec((0u64..32, 1usize..=6), 1..24),
        order_seed in any::<u64>(),
    ) {
        // 8-bit counters: at most a few hundred adds total, no ceiling risk.
        let params = CbfParams::new(m, k_h, 8, 3, 7).unwrap();
        let mut filter = CountingBloomFilter::new(params).unwrap();
        let mut multiset = Vec::new();
        let mut live: HashMap<u64, u64> = HashMap::new();
        for (label, copies) in &labels {
            for _ in 0..*copies {
                filter.add(RangeLabel(*label));
                multiset.push(*label);
                *live.entry(*label).or_insert(0) += 1;
            }
        }
        prop_assert_eq!(filter.saturation_events(), 0);
        for (label, count) in &live {
            prop_assert!(filter.query(RangeLabel(*label)) >= *count);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        while !multiset.is_empty() {
            let at = rng.gen_range(0..multiset.len());
            let label = multiset.swap_remove(at);
            filter.delete(RangeLabel(label));
            *live.get_mut(&label).unwrap() -= 1;
            prop_assert!(filter.query(RangeLabel(label)) >= live[&label]);
        }
        prop_assert!(filter.is_empty());
        prop_assert_eq!(filter.sum_counters(), 0);
        prop_assert_eq!(filter.underflow_events(), 0);
    }

    /// Filter state is a pure function of parameters and operations.
    #[test]
    fn replay_reproduces_state(
        ops in proptest::collection::vec((any::<bool>(), 0u64..64), 0..64),
        m in 16u64..256,
        k_h in 1u32..=4,
    ) {
        let params = CbfParams::new(m, k_h, 4, 100, 200).unwrap();
        let mut a = CountingBloomFilter::new(params).unwrap();
        let mut b = CountingBloomFilter::new(params).unwrap();
        for (is_add, label) in &ops {
            for f in [&mut a, &mut b] {
                if *is_add {
                    f.add(RangeLabel(*label));
                } else {
                    f.delete(RangeLabel(*label));
                }
            }
        }
        prop_assert_eq!(a.snapshot(), b.snapshot());
    }

    /// The asymptotic formula lower-bounds the exact one everywhere.
    #[test]
    fn approx_formula_is_a_lower_bound(
        m in 1u64..=1 << 16,
        n_frac in 0.0f64..=1.0,
        k_h in 1u32..=8,
    ) {
        let n = ((m as f64 * n_frac) as u64).max(1);
        let exact = theoretical_fpr_exact(m, n, k_h).unwrap();
        let approx = theoretical_fpr_approx(m, n, k_h).unwrap();
        prop_assert!(approx <= exact + 1e-12, "m={m} n={n} k={k_h}: {approx} > {exact}");
        prop_assert!((0.0..=1.0).contains(&exact));
    }
}

/// Loads a filter with `n` distinct random labels and measures the rate at
/// which absent labels pass the query, against the analytic expectation.
fn empirical_fpr(m: u64, n: u64, k_h: u32, seed: u64) -> f64 {
    let params = CbfParams::new(m, k_h, 4, 41, 42).unwrap();
    let mut filter = CountingBloomFilter::new(params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = HashSet::new();
    while present.len() < n as usize {
        let label = rng.gen::<u64>();
        if present.insert(label) {
            filter.add(RangeLabel(label));
        }
    }
    assert_eq!(
        filter.saturation_events(),
        0,
        "load too hot for 4-bit counters"
    );
    const PROBES: u64 = 100_000;
    let mut hits = 0u64;
    let mut probed = 0u64;
    while probed < PROBES {
        let label = rng.gen::<u64>();
        if present.contains(&label) {
            continue;
        }
        probed += 1;
        hits += (filter.query(RangeLabel(label)) >= 1) as u64;
    }
    hits as f64 / PROBES as f64
}

#[test]
fn empirical_fpr_tracks_the_analytic_formula() {
    let m = 1u64 << 12;
    for k_h in [2u32, 4] {
        for load in [0.1f64, 0.25, 0.5] {
            let n = (m as f64 * load) as u64;
            let expect = theoretical_fpr_exact(m, n, k_h).unwrap();
            let got = empirical_fpr(m, n, k_h, 9000 + k_h as u64);
            let rel = (got - expect).abs() / expect;
            assert!(
                rel < 0.2,
                "m={m} n={n} k={k_h}: empirical {got:.5} vs exact {expect:.5} (rel {rel:.3})"
            );
        }
    }
}
