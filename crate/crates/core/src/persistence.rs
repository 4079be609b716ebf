//! Weight file format.
//!
//! Layout: 8 magic bytes `CUEBALL1`, a kind byte (0 = cue-to-recall,
//! 1 = recall-to-cue), the dimensions G, N, M+1 as little-endian u32, the
//! training provenance theta and D as little-endian f64, then the tensor
//! payload in its natural row-major order as little-endian f64. The header
//! is a fixed 37 bytes and fully describes the payload; readers never
//! trust the file length alone.

use crate::error::{Error, Result};
use crate::model::{BackwardWeights, ForwardWeights, ModelParams};
use std::fmt;
use std::io::{Read, Write};

pub const WEIGHT_MAGIC: [u8; 8] = *b"CUEBALL1";
pub const HEADER_LEN: usize = 8 + 1 + 3 * 4 + 2 * 8;
pub const BYTES_PER_WEIGHT: usize = 8;

/// Which tensor a weight file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Cue-to-recall weights, payload order `[group][pixel][cue]`.
    Forward = 0,
    /// Recall-to-cue weights, payload order `[group][cue][pixel]`.
    Backward = 1,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Forward => write!(f, "forward (cue-to-recall)"),
            WeightKind::Backward => write!(f, "backward (recall-to-cue)"),
        }
    }
}

/// Self-describing weight file header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFileHeader {
    pub kind: WeightKind,
    pub groups: u32,
    pub cues: u32,
    pub pixels: u32,
    /// Learning target the tensor was trained with.
    pub theta: f64,
    /// Activation threshold the tensor was trained with.
    pub activation_threshold: f64,
}

impl WeightFileHeader {
    pub fn new(kind: WeightKind, params: &ModelParams<f64>) -> Self {
        WeightFileHeader {
            kind,
            groups: params.groups as u32,
            cues: params.cues_per_group as u32,
            pixels: params.pixels as u32,
            theta: params.learning_target,
            activation_threshold: params.activation_threshold,
        }
    }

    pub fn weight_count(&self) -> u64 {
        self.groups as u64 * self.cues as u64 * self.pixels as u64
    }

    pub fn payload_len(&self) -> u64 {
        self.weight_count() * BYTES_PER_WEIGHT as u64
    }

    fn to_bytes(self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[..8].copy_from_slice(&WEIGHT_MAGIC);
        b[8] = self.kind as u8;
        b[9..13].copy_from_slice(&self.groups.to_le_bytes());
        b[13..17].copy_from_slice(&self.cues.to_le_bytes());
        b[17..21].copy_from_slice(&self.pixels.to_le_bytes());
        b[21..29].copy_from_slice(&self.theta.to_le_bytes());
        b[29..37].copy_from_slice(&self.activation_threshold.to_le_bytes());
        b
    }

    fn from_bytes(b: &[u8; HEADER_LEN]) -> Result<Self> {
        if b[..8] != WEIGHT_MAGIC {
            return Err(Error::WeightFormat(format!(
                "bad magic {:?}, expected {:?}",
                &b[..8],
                WEIGHT_MAGIC
            )));
        }
        let kind = match b[8] {
            0 => WeightKind::Forward,
            1 => WeightKind::Backward,
            other => {
                return Err(Error::WeightFormat(format!(
                    "unknown weight kind byte {other}"
                )))
            }
        };
        let groups = u32::from_le_bytes(b[9..13].try_into().unwrap());
        let cues = u32::from_le_bytes(b[13..17].try_into().unwrap());
        let pixels = u32::from_le_bytes(b[17..21].try_into().unwrap());
        if groups == 0 || cues == 0 || pixels == 0 {
            return Err(Error::WeightFormat(format!(
                "zero dimension in header: {groups}x{cues}x{pixels}"
            )));
        }
        Ok(WeightFileHeader {
            kind,
            groups,
            cues,
            pixels,
            theta: f64::from_le_bytes(b[21..29].try_into().unwrap()),
            activation_threshold: f64::from_le_bytes(b[29..37].try_into().unwrap()),
        })
    }
}

fn write_all_counted<W: Write>(sink: &mut W, bytes: &[u8], written: &mut usize) -> Result<()> {
    sink.write_all(bytes).map_err(|e| Error::io(*written, e))?;
    *written += bytes.len();
    Ok(())
}

fn save_payload<W: Write>(data: &[f64], header: WeightFileHeader, sink: &mut W) -> Result<usize> {
    if data.len() as u64 != header.weight_count() {
        return Err(Error::ShapeMismatch {
            expected: header.weight_count() as usize,
            got: data.len(),
        });
    }
    let mut written = 0;
    write_all_counted(sink, &header.to_bytes(), &mut written)?;
    // Buffer row-sized chunks so a payload write failure still reports the
    // byte count reached.
    let row = header.pixels as usize * BYTES_PER_WEIGHT;
    let mut buf = Vec::with_capacity(row.max(BYTES_PER_WEIGHT));
    for chunk in data.chunks(header.pixels as usize) {
        buf.clear();
        for value in chunk {
            buf.extend_from_slice(&value.to_le_bytes());
        }
        write_all_counted(sink, &buf, &mut written)?;
    }
    Ok(written)
}

/// Writes the forward tensor; returns the total bytes written
/// (37-byte header plus 8 bytes per weight).
pub fn save_forward<W: Write>(
    weights: &ForwardWeights<f64>,
    params: &ModelParams<f64>,
    sink: &mut W,
) -> Result<usize> {
    check_dims(
        weights.groups(),
        weights.cues(),
        weights.pixels(),
        params,
    )?;
    let header = WeightFileHeader::new(WeightKind::Forward, params);
    save_payload(weights.as_slice(), header, sink)
}

/// Writes the backward tensor; same layout with kind byte 1.
pub fn save_backward<W: Write>(
    weights: &BackwardWeights<f64>,
    params: &ModelParams<f64>,
    sink: &mut W,
) -> Result<usize> {
    check_dims(
        weights.groups(),
        weights.cues(),
        weights.pixels(),
        params,
    )?;
    let header = WeightFileHeader::new(WeightKind::Backward, params);
    save_payload(weights.as_slice(), header, sink)
}

fn check_dims(groups: usize, cues: usize, pixels: usize, params: &ModelParams<f64>) -> Result<()> {
    if groups != params.groups || cues != params.cues_per_group || pixels != params.pixels {
        return Err(Error::InvalidParams(format!(
            "tensor is {}x{}x{} but params expect {}x{}x{}",
            groups, cues, pixels, params.groups, params.cues_per_group, params.pixels
        )));
    }
    Ok(())
}

/// A decoded weight file, not yet committed to a tensor type.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedWeights {
    pub header: WeightFileHeader,
    pub data: Vec<f64>,
}

impl LoadedWeights {
    pub fn into_forward(self) -> Result<(ForwardWeights<f64>, WeightFileHeader)> {
        if self.header.kind != WeightKind::Forward {
            return Err(Error::KindMismatch {
                expected: WeightKind::Forward,
                found: self.header.kind,
            });
        }
        let h = self.header;
        let w = ForwardWeights::from_data(
            h.groups as usize,
            h.pixels as usize,
            h.cues as usize,
            self.data,
        )?;
        Ok((w, h))
    }

    pub fn into_backward(self) -> Result<(BackwardWeights<f64>, WeightFileHeader)> {
        if self.header.kind != WeightKind::Backward {
            return Err(Error::KindMismatch {
                expected: WeightKind::Backward,
                found: self.header.kind,
            });
        }
        let h = self.header;
        let v = BackwardWeights::from_data(
            h.groups as usize,
            h.cues as usize,
            h.pixels as usize,
            self.data,
        )?;
        Ok((v, h))
    }
}

/// Reads a weight file to the end, enforcing that the payload length
/// matches the header exactly.
pub fn load_weights<R: Read>(source: &mut R) -> Result<LoadedWeights> {
    let mut header_bytes = [0u8; HEADER_LEN];
    source
        .read_exact(&mut header_bytes)
        .map_err(|e| Error::WeightCorruption(format!("header unreadable: {e}")))?;
    let header = WeightFileHeader::from_bytes(&header_bytes)?;

    let expected = header.payload_len();
    let mut payload = Vec::new();
    source
        .read_to_end(&mut payload)
        .map_err(|e| Error::io(HEADER_LEN, e))?;
    if payload.len() as u64 != expected {
        return Err(Error::WeightCorruption(format!(
            "payload is {} bytes, header promises {expected}",
            payload.len()
        )));
    }

    let data = payload
        .chunks_exact(BYTES_PER_WEIGHT)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(LoadedWeights { header, data })
}
