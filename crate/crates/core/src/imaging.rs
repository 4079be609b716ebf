//! Grayscale rendering of patterns and half-image masks for partial
//! presentation. Display rescaling never feeds back into the model.

use crate::error::{Error, Result};
use crate::recall::PresentationMask;
use crate::scalar::{lit, Real};
use std::io::Write;
use std::str::FromStr;

/// Row-major grayscale image with intensities clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T = f64> {
    rows: usize,
    cols: usize,
    intensities: Vec<T>,
}

impl<T: Real> GrayImage<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        let intensities = values
            .into_iter()
            .map(|v| v.max(T::zero()).min(T::one()))
            .collect();
        Ok(GrayImage {
            rows,
            cols,
            intensities,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn intensities(&self) -> &[T] {
        &self.intensities
    }
}

/// Renders a value vector for display: rescaled by its maximum so the
/// brightest pixel is white, with the zero vector mapping to all black.
/// Stored patterns are unit-L2 and would be nearly invisible otherwise.
pub fn pattern_to_image<T: Real>(values: &[T], rows: usize, cols: usize) -> Result<GrayImage<T>> {
    if values.len() != rows * cols {
        return Err(Error::ShapeMismatch {
            expected: rows * cols,
            got: values.len(),
        });
    }
    let max = values.iter().fold(T::zero(), |m, v| m.max(*v));
    let rescaled: Vec<T> = if max > T::zero() {
        values.iter().map(|v| *v / max).collect()
    } else {
        vec![T::zero(); values.len()]
    };
    GrayImage::new(rows, cols, rescaled)
}

/// Writes a binary PGM (P5, maxval 255): `P5\n{cols} {rows}\n255\n`
/// followed by one rounded byte per pixel. Returns the bytes written.
pub fn write_pgm<T: Real, W: Write>(image: &GrayImage<T>, sink: &mut W) -> Result<usize> {
    let header = format!("P5\n{} {}\n255\n", image.cols, image.rows);
    let mut bytes = Vec::with_capacity(header.len() + image.intensities.len());
    bytes.extend_from_slice(header.as_bytes());
    for v in &image.intensities {
        let scaled = (*v * lit::<T>(255.0)).round();
        bytes.push(scaled.to_u8().unwrap_or(255));
    }
    sink.write_all(&bytes).map_err(|e| Error::io(0, e))?;
    Ok(bytes.len())
}

/// Which half of the image a partial presentation keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Top,
    Bottom,
    Left,
    Right,
}

impl FromStr for Half {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "top" => Ok(Half::Top),
            "bottom" => Ok(Half::Bottom),
            "left" => Ok(Half::Left),
            "right" => Ok(Half::Right),
            other => Err(format!(
                "unknown half '{other}' (expected top, bottom, left or right)"
            )),
        }
    }
}

/// Mask keeping one half of a `rows x cols` image. Top/bottom keep
/// ceil(rows/2) rows, left/right keep ceil(cols/2) columns; for odd
/// dimensions the middle line belongs to both opposing halves.
pub fn make_half_mask(rows: usize, cols: usize, half: Half) -> PresentationMask {
    let half_rows = rows.div_ceil(2);
    let half_cols = cols.div_ceil(2);
    let kept = (0..rows * cols)
        .map(|p| {
            let (r, c) = (p / cols, p % cols);
            match half {
                Half::Top => r < half_rows,
                Half::Bottom => r >= rows - half_rows,
                Half::Left => c < half_cols,
                Half::Right => c >= cols - half_cols,
            }
        })
        .collect();
    PresentationMask { kept }
}
