// SPDX-License-Identifier: Apache-2.0

//! Sampling commands: shot sampling from trained univariate and bivariate
//! models, with raw and decoded histogram outputs.

use std::path::Path;

use qhartley::model::{FeatureKind, ModelFile};
use qhartley::sample::{
    build_bivariate_sampling_circuit_variant, build_fine_sampling_circuit, build_sampling_circuit,
    decode_bitstring, normalize, postprocess_bivariate, tvd, FineVariant, SampleBatch,
};
use qhartley::statevector::BitString;
use qhartley::QuantumModel64;

use crate::config::RunConfig;
use crate::output::{fmt_f64, fnv1a64, read_file, Csv, OutDir};
use crate::CliError;

fn as_cli(e: qhartley::Error) -> CliError {
    CliError::Config(e.to_string())
}

struct LoadedModel {
    model: QuantumModel64,
    hash: u64,
}

fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let text = read_file(path)?;
    let file = ModelFile::from_json(&text).map_err(as_cli)?;
    let model = file.to_model().map_err(as_cli)?;
    Ok(LoadedModel {
        model,
        hash: fnv1a64(text.as_bytes()),
    })
}

fn batch_meta(batch: &SampleBatch, variant: FineVariant, hash: u64) -> Vec<(String, String)> {
    vec![
        ("n".into(), batch.n.to_string()),
        ("extension".into(), batch.s.to_string()),
        ("variant".into(), variant.name().to_string()),
        ("shots".into(), batch.shots.to_string()),
        ("seed".into(), batch.seed.to_string()),
        ("model_fnv1a64".into(), format!("{hash:016x}")),
    ]
}

fn write_histograms(
    dir: &OutDir,
    command: &str,
    snapshot: &str,
    batch: &SampleBatch,
    variant: FineVariant,
    hash: u64,
    domain_upper: f64,
) -> Result<(), CliError> {
    let meta = batch_meta(batch, variant, hash);

    let mut raw = Csv::new(command, snapshot, &meta);
    raw.header("bitstring,count");
    for (bits, count) in &batch.counts {
        raw.row(&[bits.to_string(), count.to_string()]);
    }
    dir.write("raw_histogram.csv", &raw.finish())?;

    let mut meta = meta;
    let oos = batch.out_of_support_mass::<f64>(domain_upper).map_err(as_cli)?;
    meta.push(("out_of_support_mass".into(), fmt_f64(oos)));
    let mut decoded = Csv::new(command, snapshot, &meta);
    decoded.header("coordinate,probability");
    for (coord, p) in batch.decoded_histogram::<f64>().map_err(as_cli)? {
        decoded.row(&[fmt_f64(coord), fmt_f64(p)]);
    }
    dir.write("decoded_histogram.csv", &decoded.finish())?;
    Ok(())
}

pub fn run_sample(
    path: &Path,
    model_path: &Path,
    out: Option<String>,
    seed: Option<u64>,
    shots: Option<u64>,
    print_tvd: bool,
) -> Result<(), CliError> {
    let mut config = RunConfig::from_path(path)?;
    if let Some(dir) = out {
        config.output_dir = Some(dir);
    }
    let mut section = config.require_sample()?.clone();
    if let Some(s) = seed {
        section.seed = s;
    }
    if let Some(s) = shots {
        section.shots = s;
    }
    config.sample = Some(section.clone());
    let snapshot = config.snapshot();

    let loaded = load_model(model_path)?;
    let model = &loaded.model;
    if model.feature_kind() != FeatureKind::Hartley {
        return Err(CliError::Config(format!(
            "sample needs a hartley model, got {}",
            model.feature_kind().name()
        )));
    }

    let n = model.n();
    let s = section.extension;
    let circuit = if s == 0 {
        build_sampling_circuit(model).map_err(as_cli)?
    } else {
        build_fine_sampling_circuit(model, s, section.variant).map_err(as_cli)?
    };
    let batch = SampleBatch::collect(&circuit, model.theta(), section.shots, section.seed, n, s)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let dir = OutDir::create(config.require_output()?)?;
    dir.write("config.snapshot.ini", &snapshot)?;
    let upper = (1u64 << n) as f64 - 1.0;
    write_histograms(&dir, "sample", &snapshot, &batch, section.variant, loaded.hash, upper)?;

    if print_tvd {
        let value = tvd_to_model_grid(model, &batch)?;
        println!("tvd = {}", fmt_f64(value));
    }
    println!(
        "sample: {} shots over {} readout qubits; artifacts in {}",
        batch.shots,
        batch.readout_len,
        dir.path("").display()
    );
    Ok(())
}

/// TVD between the empirical decoded distribution and the model's own
/// normalized distribution on the matching grid (integers for s = 0, the
/// 2^{-s}-spaced fine grid otherwise).
pub fn tvd_to_model_grid(model: &QuantumModel64, batch: &SampleBatch) -> Result<f64, CliError> {
    let bins = 1usize << batch.readout_len;
    let empirical = batch.probabilities::<f64>();
    let mut model_values = vec![0.0f64; bins];
    for (v, slot) in model_values.iter_mut().enumerate() {
        let bits = BitString::from_value(v, batch.readout_len);
        let x: f64 = decode_bitstring(&bits, batch.n, batch.s).map_err(as_cli)?;
        if x < model.domain_upper() {
            *slot = model.evaluate(&[x]).map_err(as_cli)?.max(0.0);
        }
    }
    let model_dist = normalize(&model_values);
    tvd(&empirical, &model_dist).map_err(as_cli)
}

pub fn run_sample2d(
    path: &Path,
    model_path: &Path,
    out: Option<String>,
    seed: Option<u64>,
    shots: Option<u64>,
) -> Result<(), CliError> {
    let mut config = RunConfig::from_path(path)?;
    if let Some(dir) = out {
        config.output_dir = Some(dir);
    }
    let mut section = config.require_sample()?.clone();
    if let Some(s) = seed {
        section.seed = s;
    }
    if let Some(s) = shots {
        section.shots = s;
    }
    if section.extension == 0 {
        return Err(CliError::Config(
            "sample2d needs extension >= 1 in [sample]".into(),
        ));
    }
    config.sample = Some(section.clone());
    let snapshot = config.snapshot();

    let loaded = load_model(model_path)?;
    let model = &loaded.model;
    if model.feature_kind() != FeatureKind::BivariateHartley {
        return Err(CliError::Config(format!(
            "sample2d needs a bivariate-hartley model, got {}",
            model.feature_kind().name()
        )));
    }

    let n = model.n();
    let s = section.extension;
    let circuit = build_bivariate_sampling_circuit_variant(model, s, section.variant)
        .map_err(as_cli)?;
    let batch = SampleBatch::collect(&circuit, model.theta(), section.shots, section.seed, n, s)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let dir = OutDir::create(config.require_output()?)?;
    dir.write("config.snapshot.ini", &snapshot)?;
    let meta = batch_meta(&batch, section.variant, loaded.hash);

    let mut raw = Csv::new("sample2d", &snapshot, &meta);
    raw.header("bitstring,count");
    for (bits, count) in &batch.counts {
        raw.row(&[bits.to_string(), count.to_string()]);
    }
    dir.write("raw_histogram.csv", &raw.finish())?;

    let hist = postprocess_bivariate::<f64>(&batch)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut decoded = Csv::new("sample2d", &snapshot, &meta);
    decoded.header("x,y,probability");
    for (i, &x) in hist.x_coords.iter().enumerate() {
        for (j, &y) in hist.y_coords.iter().enumerate() {
            decoded.row(&[fmt_f64(x), fmt_f64(y), fmt_f64(hist.probs[i][j])]);
        }
    }
    dir.write("decoded_histogram.csv", &decoded.finish())?;

    println!(
        "sample2d: {} shots over {} readout qubits; artifacts in {}",
        batch.shots,
        batch.readout_len,
        dir.path("").display()
    );
    Ok(())
}
