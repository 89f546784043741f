// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a flat, sectioned key-value file (INI style) with a
//! JSON object as an accepted alternative. Unknown sections or keys are
//! fatal so experiment records stay trustworthy.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use qhartley::circuits::RotationScheme;
use qhartley::model::{AnsatzSpec, DiffMethod, FeatureKind};
use qhartley::sample::FineVariant;
use qhartley::targets::{DeKind, TargetSpec};
use qhartley::train::{GridKind, TrainConfig};

use crate::CliError;

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parsed model section.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub feature: FeatureKind,
    pub qubits: usize,
    pub ansatz: AnsatzSpec,
}

impl ModelConfig {
    pub fn template(&self) -> Result<qhartley::QuantumModel64, CliError> {
        qhartley::model::QuantumModel::new(self.feature, self.qubits, self.ansatz)
            .map_err(|e| bad(e.to_string()))
    }
}

/// Parsed train section.
#[derive(Clone, Debug)]
pub struct TrainSection {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss_report_stride: usize,
    pub init_scale: Option<f64>,
    pub early_stop_loss: f64,
    pub grid: GridKind,
    pub x_diff_method: DiffMethod,
}

impl TrainSection {
    /// Materializes a core training config; `default_init_scale` fills in
    /// when the file leaves `init_scale` unset.
    pub fn to_core(&self, default_init_scale: f64) -> TrainConfig<f64> {
        let mut c = TrainConfig::new(self.epochs, self.learning_rate, self.seed);
        c.loss_report_stride = self.loss_report_stride;
        c.init_scale = self.init_scale.unwrap_or(default_init_scale);
        c.early_stop_loss = self.early_stop_loss;
        c.grid = self.grid;
        c.x_diff_method = self.x_diff_method;
        c
    }
}

/// Parsed sample section.
#[derive(Clone, Debug)]
pub struct SampleSection {
    pub shots: u64,
    pub extension: usize,
    pub variant: FineVariant,
    pub seed: u64,
}

/// Parsed compare section.
#[derive(Clone, Debug)]
pub struct CompareSection {
    pub n_min: usize,
    pub n_max: usize,
    pub schemes: Vec<RotationScheme>,
    pub seeds: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// The full resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Option<ModelConfig>,
    pub target: Option<TargetSpec<f64>>,
    pub train: Option<TrainSection>,
    pub sample: Option<SampleSection>,
    pub output_dir: Option<String>,
    pub compare: Option<CompareSection>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<RunConfig, CliError> {
        let trimmed = text.trim_start();
        let sections = if trimmed.starts_with('{') {
            parse_json(text)?
        } else {
            parse_ini(text)?
        };
        Self::from_sections(sections)
    }

    fn from_sections(mut sections: Sections) -> Result<RunConfig, CliError> {
        let model = sections.remove("model").map(parse_model).transpose()?;
        let target = sections.remove("target").map(parse_target).transpose()?;
        let train = sections.remove("train").map(parse_train).transpose()?;
        let sample = sections.remove("sample").map(parse_sample).transpose()?;
        let output_dir = match sections.remove("output") {
            Some(mut kv) => {
                let dir = take(&mut kv, "dir")?;
                reject_leftovers("output", &kv)?;
                Some(dir)
            }
            None => None,
        };
        let compare = sections.remove("compare").map(parse_compare).transpose()?;
        if let Some(name) = sections.keys().next() {
            return Err(bad(format!("unknown config section `[{name}]`")));
        }
        if let Some(t) = &target {
            t.validate().map_err(|e| bad(e.to_string()))?;
        }
        Ok(RunConfig {
            model,
            target,
            train,
            sample,
            output_dir,
            compare,
        })
    }

    pub fn require_model(&self) -> Result<&ModelConfig, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| bad("config needs a [model] section"))
    }

    pub fn require_target(&self) -> Result<&TargetSpec<f64>, CliError> {
        self.target
            .as_ref()
            .ok_or_else(|| bad("config needs a [target] section"))
    }

    pub fn require_train(&self) -> Result<&TrainSection, CliError> {
        self.train
            .as_ref()
            .ok_or_else(|| bad("config needs a [train] section"))
    }

    pub fn require_sample(&self) -> Result<&SampleSection, CliError> {
        self.sample
            .as_ref()
            .ok_or_else(|| bad("config needs a [sample] section"))
    }

    pub fn require_output(&self) -> Result<&str, CliError> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| bad("config needs an [output] section with `dir` (or pass --out)"))
    }

    /// Canonical INI rendering of the resolved configuration; every output
    /// file embeds this snapshot so runs can be reproduced byte-for-byte.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.model {
            out.push_str("[model]\n");
            let _ = writeln!(out, "feature = {}", m.feature.name());
            let _ = writeln!(out, "qubits = {}", m.qubits);
            match m.ansatz.kind {
                qhartley::model::AnsatzKind::Hera => {
                    let _ = writeln!(out, "ansatz = hera");
                }
                qhartley::model::AnsatzKind::Hea(s) => {
                    let _ = writeln!(out, "ansatz = hea");
                    let _ = writeln!(out, "scheme = {}", s.name());
                }
            }
            let _ = writeln!(out, "depth = {}", m.ansatz.depth);
            out.push('\n');
        }
        if let Some(t) = &self.target {
            out.push_str("[target]\n");
            let _ = writeln!(out, "kind = {}", t.name());
            match *t {
                TargetSpec::Ou {
                    mu,
                    sigma,
                    nu,
                    x_init,
                    t,
                } => {
                    let _ = writeln!(out, "mu = {mu:?}");
                    let _ = writeln!(out, "sigma = {sigma:?}");
                    let _ = writeln!(out, "nu = {nu:?}");
                    let _ = writeln!(out, "x_init = {x_init:?}");
                    let _ = writeln!(out, "t = {t:?}");
                }
                TargetSpec::Gbm {
                    mu,
                    sigma,
                    x_init,
                    t,
                } => {
                    let _ = writeln!(out, "mu = {mu:?}");
                    let _ = writeln!(out, "sigma = {sigma:?}");
                    let _ = writeln!(out, "x_init = {x_init:?}");
                    let _ = writeln!(out, "t = {t:?}");
                }
                TargetSpec::Exponential { lambda } => {
                    let _ = writeln!(out, "lambda = {lambda:?}");
                }
                TargetSpec::Binormal {
                    mu_x,
                    mu_y,
                    sigma_x,
                    sigma_y,
                    rho,
                } => {
                    let _ = writeln!(out, "mu_x = {mu_x:?}");
                    let _ = writeln!(out, "mu_y = {mu_y:?}");
                    let _ = writeln!(out, "sigma_x = {sigma_x:?}");
                    let _ = writeln!(out, "sigma_y = {sigma_y:?}");
                    let _ = writeln!(out, "rho = {rho:?}");
                }
                TargetSpec::De { mu, sigma, .. } => {
                    let _ = writeln!(out, "mu = {mu:?}");
                    let _ = writeln!(out, "sigma = {sigma:?}");
                }
            }
            out.push('\n');
        }
        if let Some(t) = &self.train {
            out.push_str("[train]\n");
            let _ = writeln!(out, "epochs = {}", t.epochs);
            let _ = writeln!(out, "learning_rate = {:?}", t.learning_rate);
            let _ = writeln!(out, "seed = {}", t.seed);
            let _ = writeln!(out, "loss_report_stride = {}", t.loss_report_stride);
            if let Some(s) = t.init_scale {
                let _ = writeln!(out, "init_scale = {s:?}");
            }
            let _ = writeln!(out, "early_stop_loss = {:?}", t.early_stop_loss);
            let _ = writeln!(out, "grid = {}", t.grid.name());
            let _ = writeln!(out, "x_diff_method = {}", t.x_diff_method.name());
            out.push('\n');
        }
        if let Some(s) = &self.sample {
            out.push_str("[sample]\n");
            let _ = writeln!(out, "shots = {}", s.shots);
            let _ = writeln!(out, "extension = {}", s.extension);
            let _ = writeln!(out, "variant = {}", s.variant.name());
            let _ = writeln!(out, "seed = {}", s.seed);
            out.push('\n');
        }
        if let Some(c) = &self.compare {
            out.push_str("[compare]\n");
            let _ = writeln!(out, "qubit_range = {}..{}", c.n_min, c.n_max);
            let schemes: Vec<&str> = c.schemes.iter().map(|s| s.name()).collect();
            let _ = writeln!(out, "schemes = {}", schemes.join(","));
            let _ = writeln!(out, "seeds = {}", c.seeds);
            let _ = writeln!(out, "epochs = {}", c.epochs);
            let _ = writeln!(out, "learning_rate = {:?}", c.learning_rate);
            let _ = writeln!(out, "seed = {}", c.seed);
            out.push('\n');
        }
        if let Some(dir) = &self.output_dir {
            out.push_str("[output]\n");
            let _ = writeln!(out, "dir = {dir}");
        }
        out
    }
}

// --- section parsers --------------------------------------------------------

fn take(kv: &mut BTreeMap<String, String>, key: &str) -> Result<String, CliError> {
    kv.remove(key)
        .ok_or_else(|| bad(format!("missing required key `{key}`")))
}

fn take_opt(kv: &mut BTreeMap<String, String>, key: &str) -> Option<String> {
    kv.remove(key)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| bad(format!("key `{key}` has invalid value `{value}`")))
}

fn reject_leftovers(section: &str, kv: &BTreeMap<String, String>) -> Result<(), CliError> {
    if let Some(key) = kv.keys().next() {
        return Err(bad(format!("unknown key `{key}` in section [{section}]")));
    }
    Ok(())
}

fn parse_model(mut kv: BTreeMap<String, String>) -> Result<ModelConfig, CliError> {
    let feature = FeatureKind::parse(&take(&mut kv, "feature")?).map_err(|e| bad(e.to_string()))?;
    let qubits: usize = parse_num("qubits", &take(&mut kv, "qubits")?)?;
    let depth: usize = parse_num("depth", &take(&mut kv, "depth")?)?;
    let ansatz = match take(&mut kv, "ansatz")?.as_str() {
        "hera" => AnsatzSpec::hera(depth),
        "hea" => {
            let scheme = RotationScheme::parse(&take(&mut kv, "scheme")?)
                .map_err(|e| bad(e.to_string()))?;
            AnsatzSpec::hea(scheme, depth)
        }
        other => return Err(bad(format!("unknown ansatz `{other}`"))),
    };
    reject_leftovers("model", &kv)?;
    Ok(ModelConfig {
        feature,
        qubits,
        ansatz,
    })
}

fn parse_target(mut kv: BTreeMap<String, String>) -> Result<TargetSpec<f64>, CliError> {
    let kind = take(&mut kv, "kind")?;
    let mut num = |key: &str| -> Result<f64, CliError> { parse_num(key, &take(&mut kv, key)?) };
    let spec = match kind.as_str() {
        "ou" => TargetSpec::Ou {
            mu: num("mu")?,
            sigma: num("sigma")?,
            nu: num("nu")?,
            x_init: num("x_init")?,
            t: num("t")?,
        },
        "gbm" => TargetSpec::Gbm {
            mu: num("mu")?,
            sigma: num("sigma")?,
            x_init: num("x_init")?,
            t: num("t")?,
        },
        "exponential" => TargetSpec::Exponential {
            lambda: num("lambda")?,
        },
        "binormal" => TargetSpec::Binormal {
            mu_x: num("mu_x")?,
            mu_y: num("mu_y")?,
            sigma_x: num("sigma_x")?,
            sigma_y: num("sigma_y")?,
            rho: num("rho")?,
        },
        "de1" => TargetSpec::De {
            kind: DeKind::De1,
            mu: num("mu")?,
            sigma: num("sigma")?,
        },
        "de2" => TargetSpec::De {
            kind: DeKind::De2,
            mu: num("mu")?,
            sigma: num("sigma")?,
        },
        other => return Err(bad(format!("unknown target kind `{other}`"))),
    };
    reject_leftovers("target", &kv)?;
    Ok(spec)
}

fn parse_train(mut kv: BTreeMap<String, String>) -> Result<TrainSection, CliError> {
    let epochs: usize = parse_num("epochs", &take(&mut kv, "epochs")?)?;
    let learning_rate: f64 = parse_num("learning_rate", &take(&mut kv, "learning_rate")?)?;
    let seed: u64 = parse_num("seed", &take(&mut kv, "seed")?)?;
    let loss_report_stride = match take_opt(&mut kv, "loss_report_stride") {
        Some(v) => parse_num("loss_report_stride", &v)?,
        None => 100,
    };
    let init_scale = match take_opt(&mut kv, "init_scale") {
        Some(v) => Some(parse_num("init_scale", &v)?),
        None => None,
    };
    let early_stop_loss = match take_opt(&mut kv, "early_stop_loss") {
        Some(v) => parse_num("early_stop_loss", &v)?,
        None => 1e-8,
    };
    let grid = match take_opt(&mut kv, "grid") {
        Some(v) => GridKind::parse(&v).map_err(|e| bad(e.to_string()))?,
        None => GridKind::IntegersAndHalves,
    };
    let x_diff_method = match take_opt(&mut kv, "x_diff_method") {
        Some(v) => DiffMethod::parse(&v).map_err(|e| bad(e.to_string()))?,
        None => DiffMethod::CentralDifference,
    };
    reject_leftovers("train", &kv)?;
    if epochs == 0 {
        return Err(bad("epochs must be at least 1"));
    }
    if learning_rate <= 0.0 {
        return Err(bad("learning_rate must be positive"));
    }
    Ok(TrainSection {
        epochs,
        learning_rate,
        seed,
        loss_report_stride,
        init_scale,
        early_stop_loss,
        grid,
        x_diff_method,
    })
}

fn parse_sample(mut kv: BTreeMap<String, String>) -> Result<SampleSection, CliError> {
    let shots: u64 = parse_num("shots", &take(&mut kv, "shots")?)?;
    let seed: u64 = parse_num("seed", &take(&mut kv, "seed")?)?;
    let extension = match take_opt(&mut kv, "extension") {
        Some(v) => parse_num("extension", &v)?,
        None => 0,
    };
    let variant = match take_opt(&mut kv, "variant") {
        Some(v) => FineVariant::parse(&v).map_err(|e| bad(e.to_string()))?,
        None => FineVariant::BitstringNetwork,
    };
    reject_leftovers("sample", &kv)?;
    Ok(SampleSection {
        shots,
        extension,
        variant,
        seed,
    })
}

fn parse_compare(mut kv: BTreeMap<String, String>) -> Result<CompareSection, CliError> {
    let range = take(&mut kv, "qubit_range")?;
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| bad("qubit_range must look like `2..5`"))?;
    let n_min: usize = parse_num("qubit_range", lo)?;
    let n_max: usize = parse_num("qubit_range", hi)?;
    if n_min == 0 || n_max < n_min {
        return Err(bad("qubit_range must be a nonempty ascending range"));
    }
    let scheme_list = take(&mut kv, "schemes")?;
    let schemes: Vec<RotationScheme> = scheme_list
        .split(',')
        .map(|s| RotationScheme::parse(s.trim()).map_err(|e| bad(e.to_string())))
        .collect::<Result<_, _>>()?;
    if schemes.is_empty() {
        return Err(bad("schemes list is empty"));
    }
    let seeds: u64 = match take_opt(&mut kv, "seeds") {
        Some(v) => parse_num("seeds", &v)?,
        None => 3,
    };
    let epochs: usize = match take_opt(&mut kv, "epochs") {
        Some(v) => parse_num("epochs", &v)?,
        None => 3000,
    };
    let learning_rate: f64 = match take_opt(&mut kv, "learning_rate") {
        Some(v) => parse_num("learning_rate", &v)?,
        None => 0.02,
    };
    let seed: u64 = match take_opt(&mut kv, "seed") {
        Some(v) => parse_num("seed", &v)?,
        None => 1,
    };
    reject_leftovers("compare", &kv)?;
    Ok(CompareSection {
        n_min,
        n_max,
        schemes,
        seeds,
        epochs,
        learning_rate,
        seed,
    })
}

// --- file format parsers ------------------------------------------------------

fn parse_ini(text: &str) -> Result<Sections, CliError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find([';', '#']) {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return Err(bad(format!("duplicate section `[{name}]`")));
            }
            sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected `key = value`", idx + 1)))?;
        let section = current
            .as_ref()
            .ok_or_else(|| bad(format!("line {}: key outside any section", idx + 1)))?;
        let key = key.trim().to_string();
        let entry = sections.get_mut(section).expect("section exists");
        if entry.contains_key(&key) {
            return Err(bad(format!("duplicate key `{key}` in [{section}]")));
        }
        entry.insert(key, value.trim().to_string());
    }
    Ok(sections)
}

fn parse_json(text: &str) -> Result<Sections, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON config: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| bad("JSON config must be an object of sections"))?;
    let mut sections: Sections = BTreeMap::new();
    for (name, body) in obj {
        let section = body
            .as_object()
            .ok_or_else(|| bad(format!("section `{name}` must be an object")))?;
        let mut kv = BTreeMap::new();
        for (key, v) in section {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                other => {
                    return Err(bad(format!(
                        "key `{key}` in `{name}` has unsupported value {other}"
                    )))
                }
            };
            kv.insert(key.clone(), text);
        }
        sections.insert(name.clone(), kv);
    }
    Ok(sections)
}
