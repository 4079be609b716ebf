//! Gradient-descent training of both weight tensors.
//!
//! Forward pass: the error `E = 1/2 * sum_j (d_j - y_j)^2` between the
//! presented pattern and the recall-net output is driven down by
//! `delta w_ji = eps_w * (d_j - y_j) * x_i`. With `eps_w = 1` and `x_i = 1`
//! a single step lands the weight column exactly on the pattern.
//!
//! Backward pass: the error `e = 1/2 * (theta - q_i)^2` between the learning
//! target and the cue response is driven down by
//! `delta v_ij = eps_v * (theta - q_i) * y_j`. Because stored patterns carry
//! unit L2 norm, a single step with `eps_v = 1` lands the cue response
//! exactly on theta. Rates other than 1 iterate to tolerance instead.

use crate::error::{Error, Result};
use crate::model::{
    check_unit_norm, dot, BackwardWeights, ForwardWeights, ModelParams, Pattern,
};
use crate::ingest::GroupedDataset;
use crate::scalar::Real;

/// Upper bound on update steps before training reports non-convergence.
pub const STEP_CAP: usize = 10_000;

/// Outcome of training one (group, cue) pair on one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport<T = f64> {
    pub group: usize,
    pub cue: usize,
    /// Global pattern number. Set from the trained pattern's own index by
    /// the forward pass and the corpus driver; the standalone backward pass
    /// reports the conventional slot `g * cues_per_group + i`.
    pub pattern: usize,
    /// Update steps taken by the slower of the two phases; both phases take
    /// exactly one step at the default rates.
    pub steps: usize,
    /// Final forward error E (NaN until the forward phase has run).
    pub forward_error: T,
    /// Final backward error e (NaN until the backward phase has run).
    pub backward_error: T,
    /// Cue response to its own pattern after training (NaN until the
    /// backward phase has run).
    pub post_q: T,
    /// Whether the trained cue clears the activation threshold D on its own
    /// pattern. Computed for the report only; the update rule never uses it.
    pub cue_fired: bool,
}

/// Reconstruction error of the recall net: `1/2 * sum_j (d_j - y_j)^2`.
pub fn forward_error<T: Real>(pattern: &Pattern<T>, y: &[T]) -> Result<T> {
    if y.len() != pattern.len() {
        return Err(Error::ShapeMismatch {
            expected: pattern.len(),
            got: y.len(),
        });
    }
    Ok(half_squared_distance(pattern.values(), y))
}

/// Cue error against the learning target: `1/2 * sum_i (theta - q_i)^2`.
/// The per-pattern procedures train one cue at a time and pass a single
/// response; profile analysis passes a whole ball block.
pub fn backward_error<T: Real>(q: &[T], theta: T) -> T {
    q.iter()
        .fold(T::zero(), |acc, &qi| acc + (theta - qi) * (theta - qi))
        / (T::one() + T::one())
}

fn half_squared_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        / (T::one() + T::one())
}

/// Largest absolute elementwise difference; infinity when lengths differ.
pub fn max_abs_difference<T: Real>(a: &[T], b: &[T]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// One gradient step on the forward column of cue `(group, cue)`:
/// `w_j += eps * (d_j - w_j * x) * x` for every pixel j.
///
/// At the default rate with the cue held at 1 the rule collapses to
/// `w_j = d_j`, and that form is applied verbatim: the stored column is
/// the pattern bit for bit, with no round-off from the additive form.
pub fn forward_update_step<T: Real>(
    weights: &mut ForwardWeights<T>,
    group: usize,
    cue: usize,
    target: &[T],
    x: T,
    eps: T,
) -> Result<()> {
    weights.check_indices(group, cue)?;
    if target.len() != weights.pixels() {
        return Err(Error::ShapeMismatch {
            expected: weights.pixels(),
            got: target.len(),
        });
    }
    if eps == T::one() && x == T::one() {
        for (pixel, d) in target.iter().enumerate() {
            weights.set(group, pixel, cue, *d);
        }
        return Ok(());
    }
    for (pixel, d) in target.iter().enumerate() {
        let y = weights.get(group, pixel, cue) * x;
        let w = weights.get(group, pixel, cue);
        weights.set(group, pixel, cue, w + eps * (*d - y) * x);
    }
    Ok(())
}

/// One gradient step on the backward row of cue `(group, cue)`:
/// `v_j += eps * (theta - q) * y_j` with `q` evaluated before the step.
/// Returns the pre-step response q.
pub fn backward_update_step<T: Real>(
    weights: &mut BackwardWeights<T>,
    group: usize,
    cue: usize,
    y: &[T],
    theta: T,
    eps: T,
) -> Result<T> {
    weights.check_indices(group, cue)?;
    if y.len() != weights.pixels() {
        return Err(Error::ShapeMismatch {
            expected: weights.pixels(),
            got: y.len(),
        });
    }
    let q = dot(weights.cue_row(group, cue), y);
    let row = weights.cue_row_mut(group, cue);
    for (vj, yj) in row.iter_mut().zip(y) {
        *vj = *vj + eps * (theta - q) * *yj;
    }
    Ok(q)
}

/// Trains the forward column of `(group, cue)` on a normalized pattern with
/// the cue output held at 1. Runs update steps until the forward error
/// drops below the convergence tolerance; at the default rate this takes
/// exactly one step and the column becomes the pattern itself.
pub fn train_forward<T: Real>(
    weights: &mut ForwardWeights<T>,
    group: usize,
    cue: usize,
    pattern: &Pattern<T>,
    params: &ModelParams<T>,
) -> Result<TrainingReport<T>> {
    params.validate()?;
    weights.check_indices(group, cue)?;
    if pattern.len() != weights.pixels() {
        return Err(Error::ShapeMismatch {
            expected: weights.pixels(),
            got: pattern.len(),
        });
    }
    check_unit_norm(pattern.values(), pattern.index)?;

    let x = T::one();
    let eps = params.forward_rate;
    let tolerance = T::convergence_tolerance();
    let mut steps = 0;
    let error = loop {
        forward_update_step(weights, group, cue, pattern.values(), x, eps)?;
        steps += 1;
        let y: Vec<T> = (0..weights.pixels())
            .map(|pixel| weights.get(group, pixel, cue) * x)
            .collect();
        let error = half_squared_distance(pattern.values(), &y);
        if error < tolerance {
            break error;
        }
        if !error.is_finite() || steps >= STEP_CAP {
            return Err(Error::NonConvergence {
                steps,
                error: error.to_f64().unwrap_or(f64::NAN),
            });
        }
    };

    Ok(TrainingReport {
        group,
        cue,
        pattern: pattern.index,
        steps,
        forward_error: error,
        backward_error: T::nan(),
        post_q: T::nan(),
        cue_fired: false,
    })
}

/// Trains the backward row of `(group, cue)` on the recall-net output `y`
/// (the stored pattern, replayed by the trained forward weights at x = 1).
/// Requires unit-norm `y`; that condition is what makes the one-step
/// convergence to theta exact.
pub fn train_backward<T: Real>(
    weights: &mut BackwardWeights<T>,
    group: usize,
    cue: usize,
    y: &[T],
    params: &ModelParams<T>,
) -> Result<TrainingReport<T>> {
    params.validate()?;
    weights.check_indices(group, cue)?;
    if y.len() != weights.pixels() {
        return Err(Error::ShapeMismatch {
            expected: weights.pixels(),
            got: y.len(),
        });
    }
    let slot = group * weights.cues() + cue;
    check_unit_norm(y, slot)?;

    let theta = params.learning_target;
    let eps = params.backward_rate;
    let tolerance = T::convergence_tolerance();
    let mut steps = 0;
    let (post_q, error) = loop {
        backward_update_step(weights, group, cue, y, theta, eps)?;
        steps += 1;
        let q = dot(weights.cue_row(group, cue), y);
        let error = (theta - q) * (theta - q) / (T::one() + T::one());
        if error < tolerance {
            break (q, error);
        }
        if !error.is_finite() || steps >= STEP_CAP {
            return Err(Error::NonConvergence {
                steps,
                error: error.to_f64().unwrap_or(f64::NAN),
            });
        }
    };

    Ok(TrainingReport {
        group,
        cue,
        pattern: slot,
        steps,
        forward_error: T::nan(),
        backward_error: error,
        post_q,
        cue_fired: post_q >= params.activation_threshold,
    })
}

/// Runs both training phases over a grouped dataset: pattern `p = g*N + i`
/// trains cue `(g, i)` forward, then backward on the replayed output.
/// Weight slices of distinct cues never interact, so the outcome is
/// independent of traversal order.
pub fn train_corpus<T: Real>(
    dataset: &GroupedDataset<T>,
    forward_weights: &mut ForwardWeights<T>,
    backward_weights: &mut BackwardWeights<T>,
    params: &ModelParams<T>,
) -> Result<Vec<TrainingReport<T>>> {
    params.validate()?;
    if dataset.group_count() != params.groups || dataset.per_group() != params.cues_per_group {
        return Err(Error::InvalidParams(format!(
            "dataset is {}x{} but params expect {}x{}",
            dataset.group_count(),
            dataset.per_group(),
            params.groups,
            params.cues_per_group
        )));
    }

    let mut reports = Vec::with_capacity(params.groups * params.cues_per_group);
    for group in 0..params.groups {
        for cue in 0..params.cues_per_group {
            let pattern = dataset.pattern(group, cue);
            let context = |source: Error| Error::TrainingContext {
                group,
                cue,
                pattern: pattern.index,
                source: Box::new(source),
            };

            let fwd = train_forward(forward_weights, group, cue, pattern, params)
                .map_err(context)?;
            let y = crate::model::forward(forward_weights, group, cue, T::one())?;
            let bwd = train_backward(backward_weights, group, cue, &y, params)
                .map_err(context)?;

            reports.push(TrainingReport {
                group,
                cue,
                pattern: pattern.index,
                steps: fwd.steps.max(bwd.steps),
                forward_error: fwd.forward_error,
                backward_error: bwd.backward_error,
                post_q: bwd.post_q,
                cue_fired: bwd.cue_fired,
            });
        }
    }
    Ok(reports)
}
