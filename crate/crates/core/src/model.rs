//! Model state and the two stateless signal maps.
//!
//! A cue ball holds `groups` blocks of `cues_per_group` cue neurons. Each
//! cue neuron `(g, i)` is wired to every recall neuron (one per pixel) of
//! recall net `g` through a forward weight column, and receives input from
//! the same recall neurons through a backward weight row. There are no
//! cue-to-cue or recall-to-recall connections: the two weight tensors are
//! the only coupling in the model.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Model-wide constants: layer sizes, learning targets and thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T = f64> {
    /// Value the trained cue response converges to (theta).
    pub learning_target: T,
    /// Step-function threshold of the cue neurons (D).
    pub activation_threshold: T,
    /// Learning rate for the cue-to-recall weights.
    pub forward_rate: T,
    /// Learning rate for the recall-to-cue weights.
    pub backward_rate: T,
    /// Number of recall nets (pattern groups).
    pub groups: usize,
    /// Cue neurons per group.
    pub cues_per_group: usize,
    /// Recall neurons per net, one per image pixel.
    pub pixels: usize,
    /// Threshold applied to the winning cue response at recall time.
    /// Kept separate from `activation_threshold`: recall proceeds from the
    /// strongest cue even when its response stays below D.
    pub recall_threshold: T,
}

impl<T: Real> Default for ModelParams<T> {
    fn default() -> Self {
        ModelParams {
            learning_target: lit(100.0),
            activation_threshold: lit(90.0),
            forward_rate: T::one(),
            backward_rate: T::one(),
            groups: 3,
            cues_per_group: 1000,
            pixels: 784,
            recall_threshold: T::zero(),
        }
    }
}

impl<T: Real> ModelParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_target > self.activation_threshold
            && self.activation_threshold > T::zero())
        {
            return Err(Error::InvalidParams(format!(
                "need learning target > activation threshold > 0, got {} and {}",
                self.learning_target, self.activation_threshold
            )));
        }
        if self.forward_rate <= T::zero() || self.backward_rate <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "learning rates must be positive, got {} and {}",
                self.forward_rate, self.backward_rate
            )));
        }
        if self.groups == 0 || self.cues_per_group == 0 || self.pixels == 0 {
            return Err(Error::InvalidParams(format!(
                "layer sizes must be at least 1, got {}x{}x{}",
                self.groups, self.cues_per_group, self.pixels
            )));
        }
        Ok(())
    }
}

/// One stored image: unit-L2 grayscale values plus its (group, index)
/// identity. `index` is the global pattern number across all groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<T = f64> {
    pub group: usize,
    pub index: usize,
    values: Vec<T>,
}

impl<T: Real> Pattern<T> {
    /// Builds a pattern from non-negative raw intensities, scaling them to
    /// unit L2 norm. Fails on an all-zero or negative input.
    pub fn normalized(group: usize, index: usize, raw: Vec<T>) -> Result<Self> {
        if let Some(pixel) = raw.iter().position(|v| *v < T::zero()) {
            return Err(Error::NegativeIntensity {
                pattern: index,
                pixel,
            });
        }
        let norm = raw.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::ZeroImage { index });
        }
        let values = raw.into_iter().map(|v| v / norm).collect();
        Ok(Pattern {
            group,
            index,
            values,
        })
    }

    /// Wraps explicit values without validation. Training operations check
    /// the unit-norm precondition themselves.
    pub fn from_values(group: usize, index: usize, values: Vec<T>) -> Self {
        Pattern {
            group,
            index,
            values,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Deviation of the squared L2 norm from 1.
    pub fn norm_deviation(&self) -> T {
        (self.values.iter().map(|v| *v * *v).sum::<T>() - T::one()).abs()
    }
}

/// Cue-to-recall connection weights, indexed `[group][pixel][cue]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardWeights<T = f64> {
    groups: usize,
    pixels: usize,
    cues: usize,
    data: Vec<T>,
}

/// Recall-to-cue connection weights, indexed `[group][cue][pixel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardWeights<T = f64> {
    groups: usize,
    cues: usize,
    pixels: usize,
    data: Vec<T>,
}

impl<T: Real> ForwardWeights<T> {
    /// Tensor with every connection at the pre-training value 1.0.
    pub fn ones(groups: usize, pixels: usize, cues: usize) -> Self {
        ForwardWeights {
            groups,
            pixels,
            cues,
            data: vec![T::one(); groups * pixels * cues],
        }
    }

    pub fn from_params(params: &ModelParams<T>) -> Self {
        Self::ones(params.groups, params.pixels, params.cues_per_group)
    }

    /// Rebuilds a tensor from its row-major `[group][pixel][cue]` data.
    pub fn from_data(groups: usize, pixels: usize, cues: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != groups * pixels * cues {
            return Err(Error::ShapeMismatch {
                expected: groups * pixels * cues,
                got: data.len(),
            });
        }
        Ok(ForwardWeights {
            groups,
            pixels,
            cues,
            data,
        })
    }

    pub fn groups(&self) -> usize {
        self.groups
    }
    pub fn pixels(&self) -> usize {
        self.pixels
    }
    pub fn cues(&self) -> usize {
        self.cues
    }

    /// Row-major `[group][pixel][cue]` view of the full tensor.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    fn offset(&self, group: usize, pixel: usize, cue: usize) -> usize {
        (group * self.pixels + pixel) * self.cues + cue
    }

    #[inline]
    pub fn get(&self, group: usize, pixel: usize, cue: usize) -> T {
        self.data[self.offset(group, pixel, cue)]
    }

    #[inline]
    pub fn set(&mut self, group: usize, pixel: usize, cue: usize, value: T) {
        let at = self.offset(group, pixel, cue);
        self.data[at] = value;
    }

    pub(crate) fn check_indices(&self, group: usize, cue: usize) -> Result<()> {
        if group >= self.groups {
            return Err(Error::IndexOutOfRange {
                what: "group",
                got: group,
                limit: self.groups,
            });
        }
        if cue >= self.cues {
            return Err(Error::IndexOutOfRange {
                what: "cue",
                got: cue,
                limit: self.cues,
            });
        }
        Ok(())
    }
}

impl<T: Real> BackwardWeights<T> {
    pub fn ones(groups: usize, cues: usize, pixels: usize) -> Self {
        BackwardWeights {
            groups,
            cues,
            pixels,
            data: vec![T::one(); groups * cues * pixels],
        }
    }

    pub fn from_params(params: &ModelParams<T>) -> Self {
        Self::ones(params.groups, params.cues_per_group, params.pixels)
    }

    /// Rebuilds a tensor from its row-major `[group][cue][pixel]` data.
    pub fn from_data(groups: usize, cues: usize, pixels: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != groups * cues * pixels {
            return Err(Error::ShapeMismatch {
                expected: groups * cues * pixels,
                got: data.len(),
            });
        }
        Ok(BackwardWeights {
            groups,
            cues,
            pixels,
            data,
        })
    }

    pub fn groups(&self) -> usize {
        self.groups
    }
    pub fn cues(&self) -> usize {
        self.cues
    }
    pub fn pixels(&self) -> usize {
        self.pixels
    }

    /// Row-major `[group][cue][pixel]` view of the full tensor.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Contiguous weight row of one cue neuron.
    #[inline]
    pub fn cue_row(&self, group: usize, cue: usize) -> &[T] {
        let start = (group * self.cues + cue) * self.pixels;
        &self.data[start..start + self.pixels]
    }

    #[inline]
    pub(crate) fn cue_row_mut(&mut self, group: usize, cue: usize) -> &mut [T] {
        let start = (group * self.cues + cue) * self.pixels;
        &mut self.data[start..start + self.pixels]
    }

    pub(crate) fn check_indices(&self, group: usize, cue: usize) -> Result<()> {
        if group >= self.groups {
            return Err(Error::IndexOutOfRange {
                what: "group",
                got: group,
                limit: self.groups,
            });
        }
        if cue >= self.cues {
            return Err(Error::IndexOutOfRange {
                what: "cue",
                got: cue,
                limit: self.cues,
            });
        }
        Ok(())
    }
}

/// Pre- and post-threshold outputs of one cue ball block.
#[derive(Debug, Clone, PartialEq)]
pub struct CueActivation<T = f64> {
    /// Cue responses before thresholding.
    pub q: Vec<T>,
    /// Step-function outputs, each exactly 0 or 1.
    pub x: Vec<T>,
}

impl<T: Real> CueActivation<T> {
    pub fn new(q: Vec<T>, activation_threshold: T) -> Result<Self> {
        let x = threshold_activate(&q, activation_threshold)?;
        Ok(CueActivation { q, x })
    }
}

/// Output of every recall neuron in net `group` when cue `(group, cue)`
/// emits `x`: `y_j = w[g][j][i] * x`. No summation runs across cue neurons;
/// a single cue drives the whole net.
pub fn forward<T: Real>(
    weights: &ForwardWeights<T>,
    group: usize,
    cue: usize,
    x: T,
) -> Result<Vec<T>> {
    weights.check_indices(group, cue)?;
    Ok((0..weights.pixels)
        .map(|pixel| weights.get(group, pixel, cue) * x)
        .collect())
}

/// Response of every cue neuron in `group` to recall-net output `y`:
/// `q_i = sum_j v[g][i][j] * y_j`.
pub fn cue_response<T: Real>(
    weights: &BackwardWeights<T>,
    group: usize,
    y: &[T],
) -> Result<Vec<T>> {
    if group >= weights.groups {
        return Err(Error::IndexOutOfRange {
            what: "group",
            got: group,
            limit: weights.groups,
        });
    }
    if y.len() != weights.pixels {
        return Err(Error::ShapeMismatch {
            expected: weights.pixels,
            got: y.len(),
        });
    }
    Ok((0..weights.cues)
        .map(|cue| dot(weights.cue_row(group, cue), y))
        .collect())
}

/// Cue step function applied elementwise: 1 where `q_i >= threshold`, else 0.
/// The boundary activates. NaN inputs are rejected rather than compared.
pub fn threshold_activate<T: Real>(q: &[T], threshold: T) -> Result<Vec<T>> {
    if threshold.is_nan() {
        return Err(Error::NonFinite {
            context: "activation threshold",
        });
    }
    if q.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite {
            context: "cue responses",
        });
    }
    Ok(q.iter()
        .map(|&v| if v >= threshold { T::one() } else { T::zero() })
        .collect())
}

/// Plain left-to-right dot product; evaluation order is part of the
/// determinism contract.
#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Checks the unit-norm condition `sum_j d_j^2 = 1` within the scalar's
/// training tolerance.
pub(crate) fn check_unit_norm<T: Real>(values: &[T], pattern: usize) -> Result<()> {
    let deviation = (values.iter().map(|v| *v * *v).sum::<T>() - T::one()).abs();
    if deviation > T::norm_tolerance() {
        return Err(Error::NotNormalized {
            pattern,
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
