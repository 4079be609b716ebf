//! Property tests for the algebraic invariants: linearity of the two
//! signal maps, threshold behavior, normalization, and the bit-exact
//! round trips of both file formats.

use cueball_core::ingest::{parse_idx_images, RawImageSet};
use cueball_core::model::{
    cue_response, forward, threshold_activate, BackwardWeights, ForwardWeights, Pattern,
};
use cueball_core::persistence::{load_weights, save_backward, save_forward, HEADER_LEN};
use cueball_core::imaging::{make_half_mask, Half};
use cueball_core::ModelParams;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn finite_f64() -> impl Strategy<Value = f64> {
    use proptest::num::f64::{NEGATIVE, NORMAL, POSITIVE, SUBNORMAL, ZERO};
    NORMAL | SUBNORMAL | ZERO | POSITIVE | NEGATIVE
}

proptest! {
    #[test]
    fn forward_is_linear_in_the_cue_output(
        weights in prop::collection::vec(-100.0f64..100.0, 1..32),
        x in -8.0f64..8.0,
        a in -8.0f64..8.0,
    ) {
        let pixels = weights.len();
        let w = ForwardWeights::from_data(1, pixels, 1, weights).unwrap();
        let scaled = forward(&w, 0, 0, a * x).unwrap();
        let base = forward(&w, 0, 0, x).unwrap();
        for (s, b) in scaled.iter().zip(&base) {
            prop_assert!(close(*s, a * b));
        }
    }

    #[test]
    fn forward_scaling_by_powers_of_two_is_exact(
        weights in prop::collection::vec(-100.0f64..100.0, 1..32),
        x in -8.0f64..8.0,
        exp in -6i32..6,
    ) {
        let a = 2.0f64.powi(exp);
        let pixels = weights.len();
        let w = ForwardWeights::from_data(1, pixels, 1, weights).unwrap();
        let scaled = forward(&w, 0, 0, a * x).unwrap();
        let base = forward(&w, 0, 0, x).unwrap();
        for (s, b) in scaled.iter().zip(&base) {
            prop_assert_eq!(s.to_bits(), (a * b).to_bits());
        }
    }

    #[test]
    fn cue_response_is_linear_in_the_net_output(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 6), 1..8),
        y in prop::collection::vec(-10.0f64..10.0, 6),
        y2 in prop::collection::vec(-10.0f64..10.0, 6),
        a in -4.0f64..4.0,
        b in -4.0f64..4.0,
    ) {
        let cues = rows.len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let v = BackwardWeights::from_data(1, cues, 6, data).unwrap();
        let mixed: Vec<f64> = y.iter().zip(&y2).map(|(p, q)| a * p + b * q).collect();
        let lhs = cue_response(&v, 0, &mixed).unwrap();
        let qa = cue_response(&v, 0, &y).unwrap();
        let qb = cue_response(&v, 0, &y2).unwrap();
        for i in 0..cues {
            prop_assert!(close(lhs[i], a * qa[i] + b * qb[i]));
        }
    }

    #[test]
    fn threshold_splits_exactly_at_the_boundary(
        q in prop::collection::vec(-200.0f64..200.0, 0..64),
        threshold in -50.0f64..150.0,
    ) {
        let x = threshold_activate(&q, threshold).unwrap();
        for (xi, qi) in x.iter().zip(&q) {
            prop_assert_eq!(*xi, if *qi >= threshold { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn threshold_is_idempotent_on_its_own_output(
        q in prop::collection::vec(-200.0f64..200.0, 1..64),
        threshold in 0.001f64..1.0,
    ) {
        let once = threshold_activate(&q, 50.0).unwrap();
        let twice = threshold_activate(&once, threshold).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn normalization_lands_on_the_unit_sphere(
        raw in prop::collection::vec(0.0f64..255.0, 1..256),
        bright in 1.0f64..255.0,
        at in 0usize..256,
    ) {
        let mut raw = raw;
        let at = at % raw.len();
        raw[at] = bright; // at least one nonzero pixel
        let p = Pattern::<f64>::normalized(0, 0, raw).unwrap();
        prop_assert!(p.norm_deviation() < 1e-12);
    }

    #[test]
    fn weight_files_round_trip_bit_exactly(
        groups in 1usize..3,
        cues in 1usize..4,
        pixels in 1usize..5,
        seed in prop::collection::vec(finite_f64(), 1..61),
    ) {
        let len = groups * cues * pixels;
        let data: Vec<f64> = (0..len).map(|i| seed[i % seed.len()]).collect();
        let params = ModelParams::<f64> {
            groups,
            cues_per_group: cues,
            pixels,
            ..ModelParams::default()
        };

        let w = ForwardWeights::from_data(groups, pixels, cues, data.clone()).unwrap();
        let mut bytes = Vec::new();
        let written = save_forward(&w, &params, &mut bytes).unwrap();
        prop_assert_eq!(written, HEADER_LEN + 8 * len);
        let (w2, _) = load_weights(&mut bytes.as_slice()).unwrap().into_forward().unwrap();
        for (a, b) in w2.as_slice().iter().zip(&data) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        let v = BackwardWeights::from_data(groups, cues, pixels, data.clone()).unwrap();
        let mut bytes = Vec::new();
        save_backward(&v, &params, &mut bytes).unwrap();
        let (v2, _) = load_weights(&mut bytes.as_slice()).unwrap().into_backward().unwrap();
        for (a, b) in v2.as_slice().iter().zip(&data) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn idx_encoding_round_trips(
        count in 1usize..5,
        rows in 1usize..8,
        cols in 1usize..8,
        fill in prop::collection::vec(0u8..=255, 1..32),
    ) {
        let pixels: Vec<u8> = (0..count * rows * cols).map(|i| fill[i % fill.len()]).collect();
        let set = RawImageSet::new(count, rows, cols, pixels).unwrap();
        let bytes = set.to_idx_bytes();
        let parsed = parse_idx_images(&bytes).unwrap();
        prop_assert_eq!(&parsed, &set);
        prop_assert_eq!(parsed.to_idx_bytes(), bytes);
    }

    #[test]
    fn opposing_half_masks_tile_the_image(
        rows in 1usize..30,
        cols in 1usize..30,
    ) {
        for pair in [[Half::Top, Half::Bottom], [Half::Left, Half::Right]] {
            let a = make_half_mask(rows, cols, pair[0]);
            let b = make_half_mask(rows, cols, pair[1]);
            let odd = match pair[0] {
                Half::Top => rows % 2 == 1,
                _ => cols % 2 == 1,
            };
            let overlap: usize = a
                .kept
                .iter()
                .zip(&b.kept)
                .filter(|(x, y)| **x && **y)
                .count();
            for p in 0..rows * cols {
                prop_assert!(a.kept[p] || b.kept[p]);
            }
            let expected = if odd {
                match pair[0] {
                    Half::Top => cols,
                    _ => rows,
                }
            } else {
                0
            };
            prop_assert_eq!(overlap, expected);
        }
    }
}
