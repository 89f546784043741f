// SPDX-License-Identifier: Apache-2.0

//! Training commands: univariate distribution fitting, differential
//! equation solving and bivariate fitting. Each run writes a config
//! snapshot, a trained-model JSON, a loss trajectory CSV and a
//! grid-evaluation CSV into its output directory.

use std::path::Path;

use qhartley::model::{ModelFile, SeedLineage, TrainingMeta};
use qhartley::targets::{
    de_analytic_derivative, de_analytic_second_derivative, de_analytic_solution, TargetSpec,
};
use qhartley::train::{
    make_integer_grid, make_training_grid, train_bivariate, train_de, train_distribution,
    GridKind, TrainReport,
};
use qhartley::{Error, QuantumModel64};

use crate::config::RunConfig;
use crate::output::{fmt_f64, Csv, OutDir};
use crate::CliError;

/// Default angle-initialization half-width for differential equation runs.
/// Small-angle starts sit in a constant-function basin of the DE loss, so
/// unless the config pins `init_scale` these runs draw from the full angle
/// range.
pub const DE_INIT_SCALE: f64 = std::f64::consts::TAU;

fn as_cli(e: Error) -> CliError {
    match e {
        Error::NonFiniteLoss { .. } | Error::GradientCheckFailed { .. } => {
            CliError::Numerical(e.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

fn loaded(path: &Path, out: Option<String>, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::from_path(path)?;
    if let Some(dir) = out {
        config.output_dir = Some(dir);
    }
    if let Some(s) = seed {
        if let Some(train) = config.train.as_mut() {
            train.seed = s;
        }
        if let Some(sample) = config.sample.as_mut() {
            sample.seed = s;
        }
    }
    Ok(config)
}

fn write_loss_csv(
    dir: &OutDir,
    command: &str,
    snapshot: &str,
    report: &TrainReport<f64>,
) -> Result<(), CliError> {
    let meta = [("seed".to_string(), report.seed.to_string())];
    let mut csv = Csv::new(command, snapshot, &meta);
    csv.header("epoch,loss");
    for &(epoch, loss) in &report.trajectory {
        csv.row(&[epoch.to_string(), fmt_f64(loss)]);
    }
    dir.write("loss.csv", &csv.finish())?;
    Ok(())
}

fn write_report_json(
    dir: &OutDir,
    command: &str,
    report: &TrainReport<f64>,
    snapshot: &str,
) -> Result<(), CliError> {
    // wall-clock time is printed to stdout only; files stay byte-identical
    // across reruns
    let body = serde_json::json!({
        "command": command,
        "rng": qhartley::RNG_ALGORITHM,
        "seed": report.seed,
        "final_loss": report.final_loss,
        "epochs_run": report.epochs_run,
        "alpha": report.alpha,
        "beta": report.beta,
        "theta": report.theta,
        "config": snapshot,
    });
    let mut text = serde_json::to_string_pretty(&body)
        .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    dir.write("report.json", &text)?;
    Ok(())
}

fn finish_run(
    dir: &OutDir,
    command: &str,
    snapshot: &str,
    model: &QuantumModel64,
    report: &TrainReport<f64>,
) -> Result<(), CliError> {
    dir.write("config.snapshot.ini", snapshot)?;
    let mut file = ModelFile::from_model(
        model,
        SeedLineage::new(report.seed, report.seed),
        Some(TrainingMeta {
            final_loss: report.final_loss,
            epochs_run: report.epochs_run,
        }),
    );
    file.config = Some(snapshot.to_string());
    dir.write("model.json", &file.to_json())?;
    write_loss_csv(dir, command, snapshot, report)?;
    write_report_json(dir, command, report, snapshot)?;
    println!(
        "{command}: final loss {:.6e} after {} epochs ({:.2}s); artifacts in {}",
        report.final_loss,
        report.epochs_run,
        report.wall_clock_secs,
        dir.path("").display()
    );
    Ok(())
}

pub fn run_train(path: &Path, out: Option<String>, seed: Option<u64>) -> Result<(), CliError> {
    let config = loaded(path, out, seed)?;
    let model_cfg = config.require_model()?;
    let target = config.require_target()?.clone();
    if target.is_bivariate() || target.is_de() {
        return Err(CliError::Config(
            "train needs a univariate density target (use solve-de or train2d)".into(),
        ));
    }
    let train_cfg = config.require_train()?.to_core(0.1);
    let template = model_cfg.template()?;
    let dir = OutDir::create(config.require_output()?)?;
    let snapshot = config.snapshot();

    let (model, report) = train_distribution(&target, &template, &train_cfg).map_err(as_cli)?;
    finish_run(&dir, "train", &snapshot, &model, &report)?;

    // grid evaluation: x, model value, target value
    let grid: Vec<f64> = match train_cfg.grid {
        GridKind::IntegersAndHalves => make_training_grid(model.n()),
        GridKind::Integers => make_integer_grid(model.n()),
    };
    let mut csv = Csv::new("train", &snapshot, &[]);
    csv.header("x,p_model,p_target");
    for &x in &grid {
        csv.row(&[
            fmt_f64(x),
            fmt_f64(model.evaluate(&[x]).map_err(as_cli)?),
            fmt_f64(target.density(x).map_err(as_cli)?),
        ]);
    }
    dir.write("grid.csv", &csv.finish())?;
    Ok(())
}

pub fn run_solve_de(path: &Path, out: Option<String>, seed: Option<u64>) -> Result<(), CliError> {
    let config = loaded(path, out, seed)?;
    let model_cfg = config.require_model()?;
    let target = config.require_target()?.clone();
    let TargetSpec::De { kind, mu, sigma } = target else {
        return Err(CliError::Config(
            "solve-de needs a de1 or de2 target".into(),
        ));
    };
    let train_cfg = config.require_train()?.to_core(DE_INIT_SCALE);
    let template = model_cfg.template()?;
    let dir = OutDir::create(config.require_output()?)?;
    let snapshot = config.snapshot();

    let (model, report) = train_de(kind, mu, sigma, &template, &train_cfg).map_err(as_cli)?;
    finish_run(&dir, "solve-de", &snapshot, &model, &report)?;

    let grid: Vec<f64> = make_training_grid(model.n())
        .into_iter()
        .filter(|&x| kind == qhartley::targets::DeKind::De1 || x > 0.0)
        .collect();
    let mut csv = Csv::new("solve-de", &snapshot, &[]);
    csv.header("x,f_model,f_analytic");
    for &x in &grid {
        csv.row(&[
            fmt_f64(x),
            fmt_f64(model.evaluate(&[x]).map_err(as_cli)?),
            fmt_f64(de_analytic_solution(kind, x, mu, sigma)),
        ]);
    }
    dir.write("grid.csv", &csv.finish())?;

    let method = train_cfg.x_diff_method;
    let mut csv = Csv::new("solve-de", &snapshot, &[]);
    csv.header("x,df_model,df_analytic,d2f_model,d2f_analytic");
    for &x in &grid {
        csv.row(&[
            fmt_f64(x),
            fmt_f64(model.grad_x(x, method).map_err(as_cli)?),
            fmt_f64(de_analytic_derivative(kind, x, mu, sigma)),
            fmt_f64(model.second_derivative_x(x, method).map_err(as_cli)?),
            fmt_f64(de_analytic_second_derivative(kind, x, mu, sigma)),
        ]);
    }
    dir.write("derivatives.csv", &csv.finish())?;
    Ok(())
}

pub fn run_train2d(path: &Path, out: Option<String>, seed: Option<u64>) -> Result<(), CliError> {
    let config = loaded(path, out, seed)?;
    let model_cfg = config.require_model()?;
    let target = config.require_target()?.clone();
    if !target.is_bivariate() {
        return Err(CliError::Config("train2d needs a binormal target".into()));
    }
    let train_cfg = config.require_train()?.to_core(0.1);
    let template = model_cfg.template()?;
    if template.feature_kind() != qhartley::model::FeatureKind::BivariateHartley {
        return Err(CliError::Config(
            "train2d needs feature = bivariate-hartley in [model]".into(),
        ));
    }
    let dir = OutDir::create(config.require_output()?)?;
    let snapshot = config.snapshot();

    let (model, report) = train_bivariate(&target, &template, &train_cfg).map_err(as_cli)?;
    finish_run(&dir, "train2d", &snapshot, &model, &report)?;

    let axis: Vec<f64> = match train_cfg.grid {
        GridKind::IntegersAndHalves => make_training_grid(model.n()),
        GridKind::Integers => make_integer_grid(model.n()),
    };
    let mut csv = Csv::new("train2d", &snapshot, &[]);
    csv.header("x,y,p_model,p_target");
    for &x in &axis {
        for &y in &axis {
            csv.row(&[
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(model.evaluate(&[x, y]).map_err(as_cli)?),
                fmt_f64(target.density2(x, y).map_err(as_cli)?),
            ]);
        }
    }
    dir.write("grid.csv", &csv.finish())?;
    Ok(())
}
