//! IDX file decoding and pattern preparation.
//!
//! Images arrive as 8-bit pixels, are scaled to grayscale reals by 1/255,
//! and are normalized to unit L2 norm. The first `G * N` images of a file
//! are partitioned contiguously: global pattern `p` lands in group
//! `p / N` at in-group index `p % N`.

use crate::error::{Error, Result};
use crate::model::Pattern;
use crate::scalar::{lit, Real};

/// Magic number of an IDX image file (u8 pixels, 3 dimensions).
pub const IMAGE_MAGIC: u32 = 0x0000_0803;
/// Magic number of an IDX label file (u8 labels, 1 dimension).
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Decoded IDX image container: `count` images of `rows x cols` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImageSet {
    count: usize,
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl RawImageSet {
    pub fn new(count: usize, rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != count * rows * cols {
            return Err(Error::IdxLength {
                expected: count * rows * cols,
                got: pixels.len(),
            });
        }
        Ok(RawImageSet {
            count,
            rows,
            cols,
            pixels,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn pixels_per_image(&self) -> usize {
        self.rows * self.cols
    }

    /// Raw bytes of one image.
    pub fn image(&self, index: usize) -> Result<&[u8]> {
        if index >= self.count {
            return Err(Error::IndexOutOfRange {
                what: "image",
                got: index,
                limit: self.count,
            });
        }
        let size = self.pixels_per_image();
        Ok(&self.pixels[index * size..(index + 1) * size])
    }

    /// Re-encodes the set; decoding then encoding reproduces the input
    /// bit for bit.
    pub fn to_idx_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(16 + self.pixels.len());
        bytes.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(self.count as u32).to_be_bytes());
        bytes.extend_from_slice(&(self.rows as u32).to_be_bytes());
        bytes.extend_from_slice(&(self.cols as u32).to_be_bytes());
        bytes.extend_from_slice(&self.pixels);
        bytes
    }
}

fn read_be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    let end = at + 4;
    if end > bytes.len() {
        return Err(Error::IdxLength {
            expected: end,
            got: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes([
        bytes[at],
        bytes[at + 1],
        bytes[at + 2],
        bytes[at + 3],
    ]))
}

/// Decodes an IDX image file: big-endian magic 0x00000803, count, rows,
/// cols, then exactly `count * rows * cols` pixel bytes.
pub fn parse_idx_images(bytes: &[u8]) -> Result<RawImageSet> {
    let magic = read_be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::IdxFormat(format!(
            "bad image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"
        )));
    }
    let count = read_be_u32(bytes, 4)? as usize;
    let rows = read_be_u32(bytes, 8)? as usize;
    let cols = read_be_u32(bytes, 12)? as usize;
    let expected = count
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(cols))
        .ok_or_else(|| Error::IdxFormat("image dimensions overflow".into()))?;
    let payload = &bytes[16..];
    if payload.len() != expected {
        return Err(Error::IdxLength {
            expected,
            got: payload.len(),
        });
    }
    RawImageSet::new(count, rows, cols, payload.to_vec())
}

/// Decodes an IDX label file. Labels play no part in the model; they are
/// only surfaced for reporting.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_be_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(Error::IdxFormat(format!(
            "bad label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"
        )));
    }
    let count = read_be_u32(bytes, 4)? as usize;
    let payload = &bytes[8..];
    if payload.len() != count {
        return Err(Error::IdxLength {
            expected: count,
            got: payload.len(),
        });
    }
    Ok(payload.to_vec())
}

/// Converts one image to a stored pattern: pixel/255 grayscale, then unit
/// L2 normalization. All-zero images cannot be stored.
pub fn to_normalized_pattern<T: Real>(image: &[u8], group: usize, index: usize) -> Result<Pattern<T>> {
    let raw: Vec<T> = image.iter().map(|&px| lit::<T>(px as f64 / 255.0)).collect();
    Pattern::normalized(group, index, raw)
}

/// Converts one image to a presentation probe through the same grayscale
/// and normalization pipeline. Unlike stored patterns, an all-zero probe is
/// legal and passes through as zeros (it simply fails to be recognized).
pub fn to_probe<T: Real>(image: &[u8]) -> Vec<T> {
    let raw: Vec<T> = image.iter().map(|&px| lit::<T>(px as f64 / 255.0)).collect();
    let norm = raw.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if norm == T::zero() {
        return raw;
    }
    raw.into_iter().map(|v| v / norm).collect()
}

/// Normalized patterns split into `G` contiguous groups of `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDataset<T = f64> {
    groups: Vec<Vec<Pattern<T>>>,
    per_group: usize,
}

impl<T: Real> GroupedDataset<T> {
    /// Wraps pre-built groups; all groups must be the same size.
    pub fn from_patterns(groups: Vec<Vec<Pattern<T>>>) -> Result<Self> {
        let per_group = groups.first().map(Vec::len).unwrap_or(0);
        if per_group == 0 {
            return Err(Error::InvalidParams("dataset has no patterns".into()));
        }
        if let Some(odd) = groups.iter().find(|g| g.len() != per_group) {
            return Err(Error::InvalidParams(format!(
                "ragged dataset: group sizes {} and {}",
                per_group,
                odd.len()
            )));
        }
        Ok(GroupedDataset { groups, per_group })
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn per_group(&self) -> usize {
        self.per_group
    }

    pub fn pattern(&self, group: usize, index: usize) -> &Pattern<T> {
        &self.groups[group][index]
    }

    /// Looks a pattern up by its global number `p = g * N + i`.
    pub fn by_global(&self, pattern: usize) -> Result<&Pattern<T>> {
        let group = pattern / self.per_group;
        if group >= self.groups.len() {
            return Err(Error::IndexOutOfRange {
                what: "pattern",
                got: pattern,
                limit: self.groups.len() * self.per_group,
            });
        }
        Ok(&self.groups[group][pattern % self.per_group])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern<T>> {
        self.groups.iter().flatten()
    }
}

/// Normalizes and partitions the first `groups * per_group` images in file
/// order. Any all-zero image aborts the partition with its file index, so
/// the `p = g * N + i` correspondence never goes stale.
pub fn partition<T: Real>(
    raw: &RawImageSet,
    groups: usize,
    per_group: usize,
) -> Result<GroupedDataset<T>> {
    let needed = groups * per_group;
    if needed == 0 {
        return Err(Error::InvalidParams(
            "partition needs at least one group and one pattern".into(),
        ));
    }
    if raw.count() < needed {
        return Err(Error::Capacity {
            needed,
            available: raw.count(),
        });
    }

    let mut out = Vec::with_capacity(groups);
    for group in 0..groups {
        let mut members = Vec::with_capacity(per_group);
        for i in 0..per_group {
            let index = group * per_group + i;
            members.push(to_normalized_pattern(raw.image(index)?, group, index)?);
        }
        out.push(members);
    }
    GroupedDataset::from_patterns(out)
}
