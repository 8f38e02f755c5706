//! Invariants of the label mapping, checked exhaustively on small grids.

use dls::label_space::{ContentSchema, DimensionSpec, EventPoint, Predicate, Subscription};
use proptest::prelude::*;

const GRID_MAX: i64 = 63;

fn grid_schema(bits_x: u8, bits_y: u8) -> ContentSchema {
    ContentSchema::new(
        vec![
            DimensionSpec::range("x", 0, GRID_MAX, bits_x).unwrap(),
            DimensionSpec::range("y", 0, GRID_MAX, bits_y).unwrap(),
        ],
        0,
    )
    .unwrap()
}

fn bound_pair() -> impl Strategy<Value = (i64, i64)> {
    (0..=GRID_MAX, 0..=GRID_MAX).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn grid_subscription() -> impl Strategy<Value = Subscription> {
    (
        proptest::option::of(bound_pair()),
        proptest::option::of(bound_pair()),
    )
        .prop_map(|(x, y)| {
            let mut predicates = Vec::new();
            if let Some((lo, hi)) = x {
                predicates.push(Predicate::range("x", lo, hi));
            }
            if let Some((lo, hi)) = y {
                predicates.push(Predicate::range("y", lo, hi));
            }
            Subscription::new(predicates)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every point that satisfies the predicate maps into the label set:
    /// the cell over-approximation can have no misses.
    #[test]
    fn mapping_has_no_false_negatives(
        bits in (1u8..=6, 1u8..=6).prop_filter("grid cap", |(a, b)| (1u64 << (a + b)) <= 4096),
        sub in grid_subscription(),
    ) {
        let schema = grid_schema(bits.0, bits.1);
        let labels = schema.subscription_to_labels(0, &sub).unwrap();
        let rect = sub.normalize(&schema).unwrap();
        for x in 0..=GRID_MAX {
            for y in 0..=GRID_MAX {
                let e = EventPoint::new(vec![x, y]);
                if rect.contains(&schema, &e) {
                    let label = schema.event_to_label(0, &e).unwrap();
                    prop_assert!(labels.contains(label), "missing cell for ({x},{y})");
                }
            }
        }
    }

    /// encode and decode are mutual inverses over all valid inputs.
    #[test]
    fn labels_round_trip(
        bits in proptest::collection::vec(1u8..=8, 1..=4),
        app_bits in 0u8..=4,
        seed in any::<u64>(),
    ) {
        prop_assume!(bits.iter().map(|&b| b as u32).sum::<u32>() + app_bits as u32 <= 60);
        let dims = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let width = 1i64 << b.max(4); // domain at least as wide as the granules
                DimensionSpec::range(format!("d{i}"), 0, width - 1, b).unwrap()
            })
            .collect();
        let schema = ContentSchema::new(dims, app_bits).unwrap();
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state
        };
        let app_id = if app_bits == 0 { 0 } else { next() % (1 << app_bits) };
        let indices: Vec<u64> = schema
            .dims()
            .iter()
            .map(|d| next() % d.granules())
            .collect();
        let label = schema.encode_label(app_id, &indices).unwrap();
        let (app_back, idx_back) = schema.decode_label(label).unwrap();
        prop_assert_eq!(app_back, app_id);
        prop_assert_eq!(idx_back, indices.clone());

        // Distinct app ids can never produce the same label.
        if app_bits > 0 {
            let other = (app_id + 1) % (1 << app_bits);
            let clash = schema.encode_label(other, &indices).unwrap();
            prop_assert_ne!(clash, label);
        }
    }

    /// Doubling every per-dimension granule count never grows the covered
    /// region: the refined cell union is a subset of the coarse one.
    #[test]
    fn refinement_never_expands_coverage(
        bits in 1u8..=5,
        sub in grid_subscription(),
    ) {
        let coarse = grid_schema(bits, bits);
        let fine = grid_schema(bits + 1, bits + 1);
        let coarse_labels = coarse.subscription_to_labels(0, &sub).unwrap();
        let fine_labels = fine.subscription_to_labels(0, &sub).unwrap();
        let mut coarse_area = 0u64;
        let mut fine_area = 0u64;
        for x in 0..=GRID_MAX {
            for y in 0..=GRID_MAX {
                let e = EventPoint::new(vec![x, y]);
                let in_coarse = coarse_labels.contains(coarse.event_to_label(0, &e).unwrap());
                let in_fine = fine_labels.contains(fine.event_to_label(0, &e).unwrap());
                coarse_area += in_coarse as u64;
                fine_area += in_fine as u64;
                prop_assert!(!in_fine || in_coarse, "({x},{y}) gained coverage on refinement");
            }
        }
        prop_assert!(fine_area <= coarse_area);
    }

    /// The label set size is the product of per-dimension index spans, and
    /// widening a predicate can only grow it.
    #[test]
    fn label_set_size_is_monotone(
        bits in (1u8..=5, 1u8..=5),
        x in bound_pair(),
        y in bound_pair(),
        widen in 0i64..=20,
    ) {
        let schema = grid_schema(bits.0, bits.1);
        let sub = Subscription::new(vec![
            Predicate::range("x", x.0, x.1),
            Predicate::range("y", y.0, y.1),
        ]);
        let labels = schema.subscription_to_labels(0, &sub).unwrap();
        let mut expect = 1u64;
        for (dim, (lo, hi)) in schema.dims().iter().zip([x, y]) {
            let lo_idx = dim.interval_index(lo).unwrap();
            let hi_idx = dim.interval_index(hi).unwrap();
            expect *= hi_idx - lo_idx + 1;
        }
        prop_assert_eq!(labels.len() as u64, expect);

        let wider = Subscription::new(vec![
            Predicate::range("x", (x.0 - widen).max(0), (x.1 + widen).min(GRID_MAX)),
            Predicate::range("y", y.0, y.1),
        ]);
        let wider_labels = schema.subscription_to_labels(0, &wider).unwrap();
        prop_assert!(wider_labels.len() >= labels.len());
    }
}
