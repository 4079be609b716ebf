//! Diagnostics over a trained model: cue-response profiles, the
//! closed-form cross-talk check, memory accounting and CSV emission.

use crate::error::{Error, Result};
use crate::ingest::GroupedDataset;
use crate::learning::backward_error;
use crate::model::{cue_response, dot, BackwardWeights, ModelParams};
use crate::scalar::Real;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;

/// Full cue-response census for one presented pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseProfile<T = f64> {
    pub group: usize,
    /// Global number of the presented pattern.
    pub pattern: usize,
    pub q: Vec<T>,
    pub winner: usize,
    pub winner_q: T,
    /// Cues at or above the activation threshold D, strongest first
    /// (ties by ascending index).
    pub above_threshold: Vec<(usize, T)>,
    pub max_q: T,
    pub mean_q: T,
    pub count_above: usize,
}

impl<T: Real> ResponseProfile<T> {
    /// Builds the census from a raw response vector.
    pub fn from_q(group: usize, pattern: usize, q: Vec<T>, params: &ModelParams<T>) -> Self {
        let mut winner = 0;
        let mut max_q = q[0];
        for (i, &qi) in q.iter().enumerate().skip(1) {
            if qi > max_q {
                winner = i;
                max_q = qi;
            }
        }
        let mut above_threshold: Vec<(usize, T)> = q
            .iter()
            .enumerate()
            .filter(|(_, &qi)| qi >= params.activation_threshold)
            .map(|(i, &qi)| (i, qi))
            .collect();
        above_threshold.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        let count_above = above_threshold.len();
        let mean_q = q.iter().copied().sum::<T>() / T::from_usize(q.len()).unwrap();
        ResponseProfile {
            group,
            pattern,
            q,
            winner,
            winner_q: max_q,
            above_threshold,
            max_q,
            mean_q,
            count_above,
        }
    }
}

/// Presents stored pattern `pattern` (global number, must live in `group`)
/// to its own net and returns the full response census.
pub fn response_profile<T: Real>(
    backward_weights: &BackwardWeights<T>,
    dataset: &GroupedDataset<T>,
    group: usize,
    pattern: usize,
    params: &ModelParams<T>,
) -> Result<ResponseProfile<T>> {
    let per_group = dataset.per_group();
    let index = pattern
        .checked_sub(group * per_group)
        .filter(|i| *i < per_group)
        .ok_or(Error::IndexOutOfRange {
            what: "pattern",
            got: pattern,
            limit: dataset.group_count() * per_group,
        })?;
    let probe = dataset.pattern(group, index);
    let q = cue_response(backward_weights, group, probe.values())?;
    Ok(ResponseProfile::from_q(group, pattern, q, params))
}

/// Backward error function evaluated over a whole cue-ball block rather
/// than the single cue selected by the per-pattern procedures.
pub fn ball_backward_error<T: Real>(
    backward_weights: &BackwardWeights<T>,
    group: usize,
    y: &[T],
    theta: T,
) -> Result<T> {
    let q = cue_response(backward_weights, group, y)?;
    Ok(backward_error(&q, theta))
}

/// Predicted versus measured cue response for one (stored, probe) pair.
///
/// One-shot training from unit initialization leaves the backward row at
/// `v = 1 + (theta - S) * d`, so probing a cue trained on `d` with `d'`
/// must measure exactly `S' + (theta - S) * <d, d'>`, where S and S' are
/// the pixel sums of the two patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosstalkEntry<T = f64> {
    /// Global number of the pattern whose cue is probed.
    pub stored: usize,
    /// Global number of the presented pattern.
    pub probe: usize,
    pub predicted: T,
    pub measured: T,
}

/// Samples `samples` random (stored, probe) pairs and tabulates the
/// closed-form prediction against the measured response. Sampling is
/// deterministic in `seed`.
pub fn crosstalk_matrix<T: Real>(
    backward_weights: &BackwardWeights<T>,
    dataset: &GroupedDataset<T>,
    samples: usize,
    seed: u64,
    params: &ModelParams<T>,
) -> Result<Vec<CrosstalkEntry<T>>> {
    let total = dataset.group_count() * dataset.per_group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(samples);
    for _ in 0..samples {
        let stored = rng.gen_range(0..total);
        let probe = rng.gen_range(0..total);
        entries.push(crosstalk_entry(backward_weights, dataset, stored, probe, params)?);
    }
    Ok(entries)
}

fn crosstalk_entry<T: Real>(
    backward_weights: &BackwardWeights<T>,
    dataset: &GroupedDataset<T>,
    stored: usize,
    probe: usize,
    params: &ModelParams<T>,
) -> Result<CrosstalkEntry<T>> {
    let stored_pattern = dataset.by_global(stored)?;
    let probe_pattern = dataset.by_global(probe)?;
    let group = stored_pattern.group;
    let cue = stored - group * dataset.per_group();

    let s: T = stored_pattern.values().iter().copied().sum();
    let s_probe: T = probe_pattern.values().iter().copied().sum();
    let inner = dot(stored_pattern.values(), probe_pattern.values());
    let predicted = s_probe + (params.learning_target - s) * inner;

    let measured = dot(
        backward_weights.cue_row(group, cue),
        probe_pattern.values(),
    );
    Ok(CrosstalkEntry {
        stored,
        probe,
        predicted,
        measured,
    })
}

/// Connection-weight storage accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryLedger {
    pub weights_per_tensor: u64,
    pub bytes_per_tensor: u64,
    pub tensor_count: u64,
    pub total_bytes: u64,
}

/// Exact weight counts and byte totals for both tensors at 8 bytes per
/// weight.
pub fn memory_ledger<T: Real>(params: &ModelParams<T>) -> MemoryLedger {
    let weights_per_tensor =
        params.groups as u64 * params.cues_per_group as u64 * params.pixels as u64;
    let bytes_per_tensor = weights_per_tensor * crate::persistence::BYTES_PER_WEIGHT as u64;
    MemoryLedger {
        weights_per_tensor,
        bytes_per_tensor,
        tensor_count: 2,
        total_bytes: 2 * bytes_per_tensor,
    }
}

/// Emits a profile as `index,q` CSV rows with full-precision values, so
/// that re-parsing reproduces the responses bit for bit. Returns the byte
/// count written.
pub fn export_profile_csv<T: Real, W: Write>(
    profile: &ResponseProfile<T>,
    sink: &mut W,
) -> Result<usize> {
    let mut written = 0;
    let put = |line: String, sink: &mut W, written: &mut usize| -> Result<()> {
        let bytes = line.as_bytes();
        sink.write_all(bytes).map_err(|e| Error::io(*written, e))?;
        *written += bytes.len();
        Ok(())
    };
    put("index,q\n".to_string(), sink, &mut written)?;
    for (i, qi) in profile.q.iter().enumerate() {
        // 17 significant digits: enough to reconstruct any f64 exactly.
        put(format!("{i},{qi:.16e}\n"), sink, &mut written)?;
    }
    Ok(written)
}
