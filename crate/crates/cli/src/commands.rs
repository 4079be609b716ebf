//! The four subcommands. Every output file is written to a temp name and
//! renamed into place, so a failed run leaves nothing half-written.

use crate::config::RunConfig;
use crate::error::CliError;
use cueball_core::analysis::{export_profile_csv, memory_ledger, ResponseProfile};
use cueball_core::imaging::{make_half_mask, pattern_to_image, write_pgm};
use cueball_core::ingest::{parse_idx_images, parse_idx_labels, partition, to_probe, RawImageSet};
use cueball_core::learning::train_corpus;
use cueball_core::model::{
    cue_response, BackwardWeights, ForwardWeights, ModelParams,
};
use cueball_core::persistence::{
    load_weights, save_backward, save_forward, WeightFileHeader, WeightKind,
};
use cueball_core::recall::{recall, recall_partial};
use cueball_core::Error as CoreError;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const FORWARD_FILE: &str = "forward.cueball";
pub const BACKWARD_FILE: &str = "backward.cueball";

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("bad output path {}", path.display())))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let commit = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = commit {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Input(format!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

fn read_images(path: &Path) -> Result<RawImageSet, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read images {}: {e}", path.display())))?;
    Ok(parse_idx_images(&bytes)?)
}

pub fn cmd_train(config: &RunConfig) -> Result<i32, CliError> {
    let params = config.training_params();
    params.validate()?;
    let images_path = config.require_images()?;
    let weights_dir = config.weights_dir();

    let raw = read_images(images_path)?;
    if raw.pixels_per_image() != params.pixels {
        return Err(CliError::Input(format!(
            "images are {}x{} = {} pixels but the model expects {}",
            raw.rows(),
            raw.cols(),
            raw.pixels_per_image(),
            params.pixels
        )));
    }
    if let Some(labels_path) = &config.labels {
        let bytes = fs::read(labels_path).map_err(|e| {
            CliError::Input(format!("cannot read labels {}: {e}", labels_path.display()))
        })?;
        let labels = parse_idx_labels(&bytes)?;
        if labels.len() != raw.count() {
            return Err(CliError::Input(format!(
                "{} labels for {} images",
                labels.len(),
                raw.count()
            )));
        }
        println!("labels: {} entries (not used for learning)", labels.len());
    }

    let started = Instant::now();
    let dataset = partition::<f64>(&raw, params.groups, params.cues_per_group)?;
    let mut forward = ForwardWeights::from_params(&params);
    let mut backward = BackwardWeights::from_params(&params);
    let reports = train_corpus(&dataset, &mut forward, &mut backward, &params)?;
    let elapsed = started.elapsed();

    for group in 0..params.groups {
        let slice = &reports[group * params.cues_per_group..(group + 1) * params.cues_per_group];
        let min_q = slice.iter().map(|r| r.post_q).fold(f64::INFINITY, f64::min);
        let max_q = slice.iter().map(|r| r.post_q).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "group {group}: {} patterns, post-training response in [{min_q:.9}, {max_q:.9}]",
            slice.len()
        );
    }
    println!(
        "trained {} patterns in {:.3} s",
        reports.len(),
        elapsed.as_secs_f64()
    );

    fs::create_dir_all(&weights_dir).map_err(|e| {
        CliError::Input(format!("cannot create {}: {e}", weights_dir.display()))
    })?;
    let mut forward_bytes = Vec::new();
    save_forward(&forward, &params, &mut forward_bytes)?;
    let mut backward_bytes = Vec::new();
    save_backward(&backward, &params, &mut backward_bytes)?;
    for (name, bytes) in [(FORWARD_FILE, forward_bytes), (BACKWARD_FILE, backward_bytes)] {
        let path = weights_dir.join(name);
        write_atomic(&path, &bytes)?;
        println!("wrote {} ({} bytes)", path.display(), bytes.len());
    }
    Ok(0)
}

fn load_tensor_file(path: &Path) -> Result<cueball_core::persistence::LoadedWeights, CliError> {
    let mut file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
    Ok(load_weights(&mut file)?)
}

/// Cross-checks a header against any explicitly configured dimensions.
fn check_header(header: &WeightFileHeader, config: &RunConfig, name: &str) -> Result<(), CliError> {
    let mismatch = |what: &str, configured: usize, found: u32| {
        CliError::Core(CoreError::WeightCorruption(format!(
            "{name}: configured {what} = {configured} but file holds {found}"
        )))
    };
    if let Some(g) = config.groups {
        if g as u32 != header.groups {
            return Err(mismatch("groups", g, header.groups));
        }
    }
    if let Some(n) = config.cues_per_group {
        if n as u32 != header.cues {
            return Err(mismatch("cues_per_group", n, header.cues));
        }
    }
    if let Some(m) = config.pixels {
        if m as u32 != header.pixels {
            return Err(mismatch("pixels", m, header.pixels));
        }
    }
    if let Some(theta) = config.theta {
        if theta != header.theta {
            eprintln!(
                "warning: {name} was trained with theta = {}, running with {theta}",
                header.theta
            );
        }
    }
    if let Some(d) = config.activation_threshold {
        if d != header.activation_threshold {
            eprintln!(
                "warning: {name} was trained with activation threshold {}, running with {d}",
                header.activation_threshold
            );
        }
    }
    Ok(())
}

/// Model parameters for read-side commands: file provenance, overridden
/// by any explicit configuration.
fn params_from_header(header: &WeightFileHeader, config: &RunConfig) -> ModelParams<f64> {
    let defaults = ModelParams::default();
    ModelParams {
        learning_target: config.theta.unwrap_or(header.theta),
        activation_threshold: config
            .activation_threshold
            .unwrap_or(header.activation_threshold),
        forward_rate: config.forward_rate.unwrap_or(defaults.forward_rate),
        backward_rate: config.backward_rate.unwrap_or(defaults.backward_rate),
        groups: header.groups as usize,
        cues_per_group: header.cues as usize,
        pixels: header.pixels as usize,
        recall_threshold: config.recall_threshold.unwrap_or(defaults.recall_threshold),
    }
}

type LoadedModel = (ForwardWeights<f64>, BackwardWeights<f64>, ModelParams<f64>);

fn load_model(config: &RunConfig) -> Result<LoadedModel, CliError> {
    let dir = config.weights_dir();
    let (forward, fwd_header) = load_tensor_file(&dir.join(FORWARD_FILE))?.into_forward()?;
    let (backward, bwd_header) = load_tensor_file(&dir.join(BACKWARD_FILE))?.into_backward()?;
    check_header(&fwd_header, config, FORWARD_FILE)?;
    check_header(&bwd_header, config, BACKWARD_FILE)?;
    if (fwd_header.groups, fwd_header.cues, fwd_header.pixels)
        != (bwd_header.groups, bwd_header.cues, bwd_header.pixels)
    {
        return Err(CliError::Core(CoreError::WeightCorruption(format!(
            "weight files disagree: {}x{}x{} vs {}x{}x{}",
            fwd_header.groups,
            fwd_header.cues,
            fwd_header.pixels,
            bwd_header.groups,
            bwd_header.cues,
            bwd_header.pixels
        ))));
    }
    Ok((forward, backward, params_from_header(&fwd_header, config)))
}

pub fn cmd_recall(config: &RunConfig) -> Result<i32, CliError> {
    let (forward, backward, params) = load_model(config)?;
    let images_path = config.require_images()?;
    let pattern = config.require_pattern()?;
    let group = config.group.unwrap_or(0);
    let out_dir = config.out_dir();

    let raw = read_images(images_path)?;
    if raw.pixels_per_image() != params.pixels {
        return Err(CliError::Input(format!(
            "probe images have {} pixels, model expects {}",
            raw.pixels_per_image(),
            params.pixels
        )));
    }
    let probe: Vec<f64> = to_probe(raw.image(pattern)?);

    let (presented, result) = match config.mask {
        Some(half) => {
            let mask = make_half_mask(raw.rows(), raw.cols(), half);
            let presented = mask.apply(&probe)?;
            let result = recall_partial(
                &forward,
                &backward,
                group,
                &probe,
                &mask,
                config.renormalize,
                &params,
            )?;
            println!("presented pattern {pattern} to group {group} (mask: {half:?})");
            (presented, result)
        }
        None => {
            let result = recall(&forward, &backward, group, &probe, &params)?;
            println!("presented pattern {pattern} to group {group}");
            (probe, result)
        }
    };

    println!(
        "winner: cue {} with response {:.7}",
        result.winner, result.winner_q
    );
    println!(
        "cues at or above the activation threshold {}: {}",
        params.activation_threshold,
        result.above_threshold.len()
    );
    if result.ambiguous {
        println!("note: several cues share the winning response (untrained model?)");
    }
    println!(
        "recognized: {} (recall threshold {})",
        if result.recognized { "yes" } else { "no" },
        params.recall_threshold
    );

    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut outputs: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let probe_image = pattern_to_image(&presented, raw.rows(), raw.cols())?;
    let mut bytes = Vec::new();
    write_pgm(&probe_image, &mut bytes)?;
    outputs.push((out_dir.join("probe.pgm"), bytes));

    if result.recognized {
        for (g, recalled) in result.recalled.iter().enumerate() {
            let image = pattern_to_image(recalled, raw.rows(), raw.cols())?;
            let mut bytes = Vec::new();
            write_pgm(&image, &mut bytes)?;
            outputs.push((out_dir.join(format!("recalled-group{g}.pgm")), bytes));
        }
    }

    let profile = ResponseProfile::from_q(group, pattern, result.q.clone(), &params);
    let mut csv = Vec::new();
    export_profile_csv(&profile, &mut csv)?;
    outputs.push((out_dir.join("profile.csv"), csv));

    for (path, bytes) in outputs {
        write_atomic(&path, &bytes)?;
        println!("wrote {}", path.display());
    }

    Ok(if result.recognized { 0 } else { 1 })
}

pub fn cmd_inspect(config: &RunConfig) -> Result<i32, CliError> {
    let dir = config.weights_dir();
    let mut dims = None;
    for name in [FORWARD_FILE, BACKWARD_FILE] {
        let path = dir.join(name);
        let loaded = load_tensor_file(&path)?;
        let h = loaded.header;
        check_header(&h, config, name)?;
        if h.kind != expected_kind(name) {
            return Err(CliError::Core(CoreError::KindMismatch {
                expected: expected_kind(name),
                found: h.kind,
            }));
        }
        println!("{}: {}", path.display(), h.kind);
        println!(
            "  {} groups x {} cues x {} pixels, trained with theta = {}, D = {}",
            h.groups, h.cues, h.pixels, h.theta, h.activation_threshold
        );
        println!(
            "  {} weights, {} payload bytes",
            h.weight_count(),
            h.payload_len()
        );
        dims = Some((h.groups as usize, h.cues as usize, h.pixels as usize));
    }
    if let Some((groups, cues, pixels)) = dims {
        let ledger = memory_ledger(&ModelParams::<f64> {
            groups,
            cues_per_group: cues,
            pixels,
            ..ModelParams::default()
        });
        println!(
            "ledger: {} tensors x {} bytes = {} bytes",
            ledger.tensor_count, ledger.bytes_per_tensor, ledger.total_bytes
        );
    }
    Ok(0)
}

fn expected_kind(name: &str) -> WeightKind {
    if name == FORWARD_FILE {
        WeightKind::Forward
    } else {
        WeightKind::Backward
    }
}

pub fn cmd_export_profile(config: &RunConfig) -> Result<i32, CliError> {
    let dir = config.weights_dir();
    let (backward, header) = load_tensor_file(&dir.join(BACKWARD_FILE))?.into_backward()?;
    check_header(&header, config, BACKWARD_FILE)?;
    let params = params_from_header(&header, config);

    let images_path = config.require_images()?;
    let pattern = config.require_pattern()?;
    let group = config.group.unwrap_or(0);
    let out = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("profile.csv"));

    let raw = read_images(images_path)?;
    if raw.pixels_per_image() != params.pixels {
        return Err(CliError::Input(format!(
            "probe images have {} pixels, model expects {}",
            raw.pixels_per_image(),
            params.pixels
        )));
    }
    let probe: Vec<f64> = to_probe(raw.image(pattern)?);
    let q = cue_response(&backward, group, &probe)?;
    let profile = ResponseProfile::from_q(group, pattern, q, &params);

    let mut csv = Vec::new();
    let n = export_profile_csv(&profile, &mut csv)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
    }
    write_atomic(&out, &csv)?;
    println!(
        "wrote {} ({n} bytes, winner cue {} at {:.7})",
        out.display(),
        profile.winner,
        profile.winner_q
    );
    Ok(0)
}
