//! Shared corpus and trained-model fixtures for the integration tests.
//!
//! The tests run against a real IDX image file when one is supplied via
//! the `CUEBALL_MNIST` environment variable (or found at
//! `data/train-images-idx3-ubyte` in the workspace root). Without one they
//! fall back to a deterministic synthetic corpus of blob images with the
//! same geometry: 28x28, 8-bit, never all-zero, mildly correlated.
#![allow(dead_code)]

use cueball_core::ingest::{parse_idx_images, partition, GroupedDataset, RawImageSet};
use cueball_core::learning::{train_corpus, TrainingReport};
use cueball_core::model::{BackwardWeights, ForwardWeights, ModelParams};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

pub const SIDE: usize = 28;
pub const CORPUS_SEED: u64 = 7;

/// Path of a real corpus file, if the environment provides one.
pub fn real_corpus_path() -> Option<PathBuf> {
    if let Ok(path) = std::env::var("CUEBALL_MNIST") {
        return Some(PathBuf::from(path));
    }
    let fallback =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/train-images-idx3-ubyte");
    fallback.exists().then_some(fallback)
}

/// Deterministic stand-in corpus of handwriting-like images: a few curvy
/// pen strokes per image, centered by mass, quantized to 8-bit. The
/// statistics that matter here track handwritten digits: sparse support,
/// ink spread across both image halves, low overlap between images.
pub fn synthetic_corpus(count: usize, seed: u64) -> RawImageSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = Vec::with_capacity(count * SIDE * SIDE);
    for _ in 0..count {
        let intensity = centered(stroke_image(&mut rng));
        for &v in &intensity {
            // ink saturates along the stroke body; background stays black
            let scaled = v.min(1.0);
            pixels.push(if scaled < 0.25 {
                0
            } else {
                (scaled * 255.0).round() as u8
            });
        }
    }
    RawImageSet::new(count, SIDE, SIDE, pixels).unwrap()
}

/// Draws 3-4 random-walk pen strokes with a soft round nib.
fn stroke_image(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut img = vec![0f64; SIDE * SIDE];
    for _ in 0..rng.gen_range(3..=4) {
        let mut r = rng.gen_range(5.0..23.0);
        let mut c = rng.gen_range(5.0..23.0);
        let mut angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let nib = rng.gen_range(0.7..1.1);
        for _ in 0..rng.gen_range(25..=45) {
            stamp(&mut img, r, c, nib);
            angle += rng.gen_range(-0.55..0.55);
            r += 1.1 * angle.sin();
            c += 1.1 * angle.cos();
            // bounce off the margins to stay on the page
            if !(3.0..=25.0).contains(&r) {
                angle = -angle;
                r = r.clamp(3.0, 25.0);
            }
            if !(3.0..=25.0).contains(&c) {
                angle = std::f64::consts::PI - angle;
                c = c.clamp(3.0, 25.0);
            }
        }
    }
    img
}

fn stamp(img: &mut [f64], r: f64, c: f64, sigma: f64) {
    let (r0, c0) = (r.round() as isize, c.round() as isize);
    for dr in -2..=2isize {
        for dc in -2..=2isize {
            let (pr, pc) = (r0 + dr, c0 + dc);
            if (0..SIDE as isize).contains(&pr) && (0..SIDE as isize).contains(&pc) {
                let d2 = (pr as f64 - r).powi(2) + (pc as f64 - c).powi(2);
                img[pr as usize * SIDE + pc as usize] +=
                    1.5 * (-d2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
}

/// Shifts the ink so its center of mass sits at the image center, the way
/// digit corpora are preprocessed.
fn centered(img: Vec<f64>) -> Vec<f64> {
    let total: f64 = img.iter().sum();
    let mut row_com = 0.0;
    let mut col_com = 0.0;
    for (p, &v) in img.iter().enumerate() {
        row_com += (p / SIDE) as f64 * v;
        col_com += (p % SIDE) as f64 * v;
    }
    let shift_r = (13.5 - row_com / total).round() as isize;
    let shift_c = (13.5 - col_com / total).round() as isize;
    let mut out = vec![0f64; SIDE * SIDE];
    for r in 0..SIDE as isize {
        for c in 0..SIDE as isize {
            let (sr, sc) = (r - shift_r, c - shift_c);
            if (0..SIDE as isize).contains(&sr) && (0..SIDE as isize).contains(&sc) {
                out[(r * SIDE as isize + c) as usize] =
                    img[(sr * SIDE as isize + sc) as usize];
            }
        }
    }
    out
}

/// The corpus every test shares: real file when present, synthetic
/// otherwise.
pub fn corpus() -> &'static RawImageSet {
    static CORPUS: OnceLock<RawImageSet> = OnceLock::new();
    CORPUS.get_or_init(|| match real_corpus_path() {
        Some(path) => {
            let bytes = std::fs::read(&path)
                .unwrap_or_else(|e| panic!("cannot read corpus file {}: {e}", path.display()));
            let set = parse_idx_images(&bytes).expect("valid IDX image file");
            assert!(set.count() >= 3000, "corpus file holds too few images");
            assert_eq!(set.pixels_per_image(), SIDE * SIDE, "expected 28x28 images");
            set
        }
        None => synthetic_corpus(3000, CORPUS_SEED),
    })
}

pub fn using_real_corpus() -> bool {
    real_corpus_path().is_some()
}

pub struct TrainedModel {
    pub params: ModelParams<f64>,
    pub dataset: GroupedDataset<f64>,
    pub forward: ForwardWeights<f64>,
    pub backward: BackwardWeights<f64>,
    pub reports: Vec<TrainingReport<f64>>,
}

/// Ingests and trains from the shared corpus at the given scale.
pub fn train_at(params: ModelParams<f64>) -> TrainedModel {
    let dataset = partition(corpus(), params.groups, params.cues_per_group)
        .expect("corpus large enough for requested scale");
    let mut forward = ForwardWeights::from_params(&params);
    let mut backward = BackwardWeights::from_params(&params);
    let reports =
        train_corpus(&dataset, &mut forward, &mut backward, &params).expect("training succeeds");
    TrainedModel {
        params,
        dataset,
        forward,
        backward,
        reports,
    }
}

/// Model trained at the full 3 x 1000 x 784 scale, built once per binary.
pub fn paper_scale_model() -> &'static TrainedModel {
    static MODEL: OnceLock<TrainedModel> = OnceLock::new();
    MODEL.get_or_init(|| train_at(ModelParams::default()))
}

pub fn desk_scale_params() -> ModelParams<f64> {
    ModelParams {
        cues_per_group: 100,
        ..ModelParams::default()
    }
}
