//! Single-pass recall: present an image to one recall net, pick the
//! strongest cue neuron, and replay every net's stored pattern from it.
//!
//! Recall is gated by `recall_threshold`, not by the cue activation
//! threshold D: a learned pattern can win with a response well below D
//! (weak input), and D only scopes the above-threshold candidate report.

use crate::error::{Error, Result};
use crate::ingest::GroupedDataset;
use crate::learning::max_abs_difference;
use crate::model::{cue_response, forward, BackwardWeights, ForwardWeights, ModelParams};
use crate::scalar::Real;

/// Pixel visibility for partial presentation. Hidden pixels are forced to
/// zero; kept pixels pass through untouched, with no renormalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationMask {
    pub kept: Vec<bool>,
}

impl PresentationMask {
    pub fn keep_all(len: usize) -> Self {
        PresentationMask {
            kept: vec![true; len],
        }
    }

    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    /// Zeroes the hidden pixels of a probe. A fully kept mask returns the
    /// probe bit for bit.
    pub fn apply<T: Real>(&self, probe: &[T]) -> Result<Vec<T>> {
        if probe.len() != self.kept.len() {
            return Err(Error::ShapeMismatch {
                expected: self.kept.len(),
                got: probe.len(),
            });
        }
        Ok(probe
            .iter()
            .zip(&self.kept)
            .map(|(&v, &keep)| if keep { v } else { T::zero() })
            .collect())
    }
}

/// Everything one presentation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallResult<T = f64> {
    /// Net the probe was presented to.
    pub presented_group: usize,
    /// Strongest cue; ties resolve to the lowest index.
    pub winner: usize,
    pub winner_q: T,
    /// Full pre-threshold response of the presented group's cue block.
    pub q: Vec<T>,
    /// Cues whose response clears the activation threshold D, ascending.
    pub above_threshold: Vec<usize>,
    /// Whether the winner clears the recall threshold.
    pub recognized: bool,
    /// Set when the maximum response is shared by several cues, which is
    /// what an untrained weight block looks like.
    pub ambiguous: bool,
    /// One replayed image per group when recognized; `groups` empty
    /// vectors otherwise.
    pub recalled: Vec<Vec<T>>,
}

fn argmax_lowest<T: Real>(q: &[T]) -> (usize, T, bool) {
    let mut winner = 0;
    let mut best = q[0];
    let mut ambiguous = false;
    for (i, &qi) in q.iter().enumerate().skip(1) {
        if qi > best {
            winner = i;
            best = qi;
            ambiguous = false;
        } else if qi == best {
            ambiguous = true;
        }
    }
    (winner, best, ambiguous)
}

/// Presents `probe` to net `group` and, when the winning response clears
/// the recall threshold, replays the winner's stored image on every net.
pub fn recall<T: Real>(
    forward_weights: &ForwardWeights<T>,
    backward_weights: &BackwardWeights<T>,
    group: usize,
    probe: &[T],
    params: &ModelParams<T>,
) -> Result<RecallResult<T>> {
    if probe.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite { context: "probe" });
    }
    let q = cue_response(backward_weights, group, probe)?;
    let (winner, winner_q, ambiguous) = argmax_lowest(&q);
    let above_threshold: Vec<usize> = q
        .iter()
        .enumerate()
        .filter(|(_, &qi)| qi >= params.activation_threshold)
        .map(|(i, _)| i)
        .collect();
    let recognized = winner_q >= params.recall_threshold;

    let groups = forward_weights.groups();
    let recalled = if recognized {
        // The winner's output is normalized to 1 and fed back through
        // every net it is wired to.
        (0..groups)
            .map(|g| forward(forward_weights, g, winner, T::one()))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![Vec::new(); groups]
    };

    Ok(RecallResult {
        presented_group: group,
        winner,
        winner_q,
        q,
        above_threshold,
        recognized,
        ambiguous,
        recalled,
    })
}

/// Recall from a partially hidden probe. The mask zeroes hidden pixels;
/// `renormalize` optionally rescales the surviving pixels back to unit
/// norm before presentation (off by default everywhere in the pipeline).
pub fn recall_partial<T: Real>(
    forward_weights: &ForwardWeights<T>,
    backward_weights: &BackwardWeights<T>,
    group: usize,
    probe: &[T],
    mask: &PresentationMask,
    renormalize: bool,
    params: &ModelParams<T>,
) -> Result<RecallResult<T>> {
    let mut masked = mask.apply(probe)?;
    if renormalize {
        let norm = masked.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::ZeroProbe);
        }
        for v in &mut masked {
            *v = *v / norm;
        }
    }
    recall(forward_weights, backward_weights, group, &masked, params)
}

/// One row of the exhaustive self-recall audit.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallCheckRow<T = f64> {
    pub group: usize,
    pub cue: usize,
    pub pattern: usize,
    pub winner: usize,
    pub winner_correct: bool,
    pub winner_q: T,
    /// Max-abs reconstruction error per group against the stored patterns.
    pub reconstruction_error: Vec<T>,
}

/// Runs recall for every stored pattern of a trained model and tabulates
/// winner correctness and reconstruction accuracy.
pub fn recall_exhaustive_check<T: Real>(
    forward_weights: &ForwardWeights<T>,
    backward_weights: &BackwardWeights<T>,
    dataset: &GroupedDataset<T>,
    params: &ModelParams<T>,
) -> Result<Vec<RecallCheckRow<T>>> {
    let mut rows = Vec::with_capacity(dataset.group_count() * dataset.per_group());
    for group in 0..dataset.group_count() {
        for cue in 0..dataset.per_group() {
            let stored = dataset.pattern(group, cue);
            let result = recall(
                forward_weights,
                backward_weights,
                group,
                stored.values(),
                params,
            )?;
            let reconstruction_error = (0..dataset.group_count())
                .map(|g| {
                    max_abs_difference(
                        &result.recalled[g],
                        dataset.pattern(g, result.winner).values(),
                    )
                })
                .collect();
            rows.push(RecallCheckRow {
                group,
                cue,
                pattern: stored.index,
                winner: result.winner,
                winner_correct: result.winner == cue,
                winner_q: result.winner_q,
                reconstruction_error,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::{train_backward, train_forward};
    use crate::model::Pattern;
    use std::sync::Arc;

    fn tiny_params() -> ModelParams<f64> {
        ModelParams {
            groups: 2,
            cues_per_group: 3,
            pixels: 4,
            ..ModelParams::default()
        }
    }

    /// Two groups of three orthogonal-ish patterns over 4 pixels.
    fn tiny_trained() -> (
        ForwardWeights<f64>,
        BackwardWeights<f64>,
        GroupedDataset<f64>,
        ModelParams<f64>,
    ) {
        let params = tiny_params();
        let raws = [
            vec![vec![9.0, 1.0, 0.0, 0.0], vec![0.0, 9.0, 1.0, 0.0], vec![0.0, 0.0, 9.0, 1.0]],
            vec![vec![1.0, 0.0, 0.0, 9.0], vec![1.0, 9.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 9.0]],
        ];
        let groups: Vec<Vec<Pattern<f64>>> = raws
            .iter()
            .enumerate()
            .map(|(g, group)| {
                group
                    .iter()
                    .enumerate()
                    .map(|(i, raw)| Pattern::normalized(g, g * 3 + i, raw.clone()).unwrap())
                    .collect()
            })
            .collect();
        let dataset = GroupedDataset::from_patterns(groups).unwrap();
        let mut w = ForwardWeights::from_params(&params);
        let mut v = BackwardWeights::from_params(&params);
        crate::learning::train_corpus(&dataset, &mut w, &mut v, &params).unwrap();
        (w, v, dataset, params)
    }

    #[test]
    fn self_recall_wins_and_replays_every_group() {
        let (w, v, ds, params) = tiny_trained();
        for g in 0..2 {
            for i in 0..3 {
                let res = recall(&w, &v, g, ds.pattern(g, i).values(), &params).unwrap();
                assert_eq!(res.winner, i);
                assert!((res.winner_q - 100.0).abs() < 1e-9);
                assert!(res.recognized);
                assert!(!res.ambiguous);
                for g2 in 0..2 {
                    let err = max_abs_difference(&res.recalled[g2], ds.pattern(g2, i).values());
                    assert!(err < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_probe_yields_zero_response() {
        let (w, v, _, mut params) = tiny_trained();
        params.recall_threshold = 1.0;
        let res = recall(&w, &v, 0, &[0.0; 4], &params).unwrap();
        assert_eq!(res.q, vec![0.0; 3]);
        assert!(!res.recognized);
        assert!(res.recalled.iter().all(Vec::is_empty));
        assert_eq!(res.recalled.len(), 2);
    }

    #[test]
    fn positive_scaling_keeps_the_winner() {
        let (w, v, ds, params) = tiny_trained();
        let probe = ds.pattern(0, 2).values().to_vec();
        let base = recall(&w, &v, 0, &probe, &params).unwrap();
        for scale in [0.5, 2.0, 0.001953125] {
            let scaled: Vec<f64> = probe.iter().map(|p| p * scale).collect();
            let res = recall(&w, &v, 0, &scaled, &params).unwrap();
            assert_eq!(res.winner, base.winner);
        }
    }

    #[test]
    fn nan_probe_is_rejected() {
        let (w, v, _, params) = tiny_trained();
        assert!(matches!(
            recall(&w, &v, 0, &[0.0, f64::NAN, 0.0, 0.0], &params),
            Err(Error::NonFinite { context: "probe" })
        ));
    }

    #[test]
    fn untrained_weights_flag_an_ambiguous_winner() {
        let params = tiny_params();
        let w = ForwardWeights::from_params(&params);
        let v = BackwardWeights::from_params(&params);
        let res = recall(&w, &v, 0, &[0.5, 0.5, 0.5, 0.5], &params).unwrap();
        assert!(res.ambiguous);
        assert_eq!(res.winner, 0); // lowest index wins ties
    }

    #[test]
    fn identity_mask_recall_is_bit_identical() {
        let (w, v, ds, params) = tiny_trained();
        let probe = ds.pattern(1, 1).values();
        let mask = PresentationMask::keep_all(4);
        let direct = recall(&w, &v, 1, probe, &params).unwrap();
        let masked = recall_partial(&w, &v, 1, probe, &mask, false, &params).unwrap();
        assert_eq!(direct, masked);
    }

    #[test]
    fn all_hidden_mask_gives_zero_response() {
        let (w, v, ds, mut params) = tiny_trained();
        params.recall_threshold = 1.0;
        let mask = PresentationMask {
            kept: vec![false; 4],
        };
        let res = recall_partial(&w, &v, 0, ds.pattern(0, 0).values(), &mask, false, &params)
            .unwrap();
        assert_eq!(res.q, vec![0.0; 3]);
        assert!(!res.recognized);

        assert!(matches!(
            recall_partial(&w, &v, 0, ds.pattern(0, 0).values(), &mask, true, &params),
            Err(Error::ZeroProbe)
        ));
    }

    #[test]
    fn half_hidden_probe_still_finds_its_cue() {
        let (w, v, ds, params) = tiny_trained();
        // Keep the two pixels that carry pattern (0,0)'s mass.
        let mask = PresentationMask {
            kept: vec![true, true, false, false],
        };
        let res = recall_partial(&w, &v, 0, ds.pattern(0, 0).values(), &mask, false, &params)
            .unwrap();
        assert_eq!(res.winner, 0);
        assert!(res.winner_q < 100.0); // weaker input, same winner
    }

    #[test]
    fn exhaustive_check_reports_all_patterns_correct() {
        let (w, v, ds, params) = tiny_trained();
        let rows = recall_exhaustive_check(&w, &v, &ds, &params).unwrap();
        assert_eq!(rows.len(), 6);
        for row in rows {
            assert!(row.winner_correct);
            assert!((row.winner_q - 100.0).abs() < 1e-9);
            for err in row.reconstruction_error {
                assert!(err < 1e-12);
            }
        }
    }

    #[test]
    fn mask_application_errors_on_length_mismatch() {
        let mask = PresentationMask::keep_all(3);
        assert!(mask.apply(&[1.0f64, 2.0]).is_err());
    }

    #[test]
    fn concurrent_readers_share_the_tensors() {
        let (w, v, ds, params) = tiny_trained();
        let w = Arc::new(w);
        let v = Arc::new(v);
        let probes: Vec<Vec<f64>> = (0..3).map(|i| ds.pattern(0, i).values().to_vec()).collect();
        let handles: Vec<_> = probes
            .into_iter()
            .enumerate()
            .map(|(i, probe)| {
                let (w, v, params) = (Arc::clone(&w), Arc::clone(&v), params.clone());
                std::thread::spawn(move || {
                    let res = recall(&w, &v, 0, &probe, &params).unwrap();
                    assert_eq!(res.winner, i);
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }

    // keep the helper honest
    #[test]
    fn direct_training_matches_corpus_path_here_too() {
        let params = ModelParams::<f64> {
            groups: 1,
            cues_per_group: 1,
            pixels: 2,
            ..ModelParams::default()
        };
        let d = Pattern::normalized(0, 0, vec![3.0, 4.0]).unwrap();
        let mut w = ForwardWeights::from_params(&params);
        let mut v = BackwardWeights::from_params(&params);
        train_forward(&mut w, 0, 0, &d, &params).unwrap();
        let y = forward(&w, 0, 0, 1.0).unwrap();
        train_backward(&mut v, 0, 0, &y, &params).unwrap();
        let res = recall(&w, &v, 0, d.values(), &params).unwrap();
        assert_eq!(res.winner, 0);
        assert!((res.winner_q - 100.0).abs() < 1e-9);
    }
}
