//! Run configuration: frozen defaults, optional JSON file, command-line
//! overrides, in increasing precedence.

use std::path::{Path, PathBuf};

use boostcolony::acar::ColonyConfig;
use boostcolony::experiments::{ClassificationSpec, IsoSpec, SiteSpec, WeakColonySpec};
use boostcolony::report::Format;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in config: {0}")]
    Syntax(#[source] serde_json::Error),
    #[error("config key `{path}`: {message}")]
    Key { path: String, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakLearnabilitySection {
    pub gammas: Vec<f64>,
    pub waves: Vec<usize>,
    pub replicates: usize,
    pub contraction_gamma: f64,
    pub contraction_waves: usize,
    pub contraction_replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TracesSection {
    pub rounds: usize,
    pub label_noise: f64,
    pub waves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginsSection {
    pub rounds: Vec<usize>,
    pub waves: Vec<usize>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub rounds: Vec<usize>,
    pub waves: Vec<usize>,
    pub replicates_boost: usize,
    pub replicates_acar: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub levels: Vec<f64>,
    pub replicates: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub classification: ClassificationSpec,
    pub sites: SiteSpec,
    /// Colony used by the traces, margins, convergence and noise studies.
    pub colony: ColonyConfig,
    pub weak_colony: WeakColonySpec,
    pub weak_learnability: WeakLearnabilitySection,
    pub traces: TracesSection,
    pub margins: MarginsSection,
    pub convergence: ConvergenceSection,
    pub noise: NoiseSection,
    pub iso_check: IsoSpec,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub out: Option<PathBuf>,
    pub gammas: Option<Vec<f64>>,
    pub waves: Option<Vec<usize>>,
    pub noise_levels: Option<Vec<f64>>,
    pub formats: Option<Vec<Format>>,
}

/// Deserializes `value`, reporting the dotted key path of any failure.
pub fn from_value(value: Value) -> Result<RunConfig, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Key {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parses a complete config document with no defaults filled in.
pub fn parse_strict(text: &str) -> Result<RunConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            ConfigError::Syntax(inner)
        } else {
            ConfigError::Key {
                path,
                message: inner.to_string(),
            }
        }
    })
}

fn default_value() -> Value {
    serde_json::from_str(DEFAULT_CONFIG).expect("embedded default config is valid JSON")
}

/// Objects merge key by key; anything else in `over` replaces `base`.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn defaults() -> RunConfig {
    from_value(default_value()).expect("embedded default config deserializes")
}

/// Defaults, overlaid with `file_text` if given.
pub fn layered(file_text: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut value = default_value();
    if let Some(text) = file_text {
        let over: Value = serde_json::from_str(text).map_err(ConfigError::Syntax)?;
        if !over.is_object() {
            return Err(ConfigError::Key {
                path: ".".into(),
                message: "config must be a JSON object".into(),
            });
        }
        merge(&mut value, over);
    }
    from_value(value)
}

pub fn read_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(f) = &o.formats {
            self.formats = f.clone();
        }
        if let Some(r) = o.replicates {
            self.weak_learnability.replicates = r;
            self.weak_learnability.contraction_replicates = r;
            self.margins.replicates = r;
            self.convergence.replicates_boost = r;
            self.convergence.replicates_acar = r;
            self.noise.replicates = r;
        }
        if let Some(g) = &o.gammas {
            self.weak_learnability.gammas = g.clone();
        }
        if let Some(w) = &o.waves {
            self.weak_learnability.waves = w.clone();
            self.margins.waves = w.clone();
            self.convergence.waves = w.clone();
            if let Some(&last) = w.last() {
                self.traces.waves = last;
            }
        }
        if let Some(l) = &o.noise_levels {
            self.noise.levels = l.clone();
        }
    }

    /// Range checks that the types alone cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: &str| {
            Err(ConfigError::Value {
                key: key.into(),
                message: message.into(),
            })
        };
        self.colony.validate().map_err(|e| ConfigError::Value {
            key: "colony".into(),
            message: e.to_string(),
        })?;
        if self.formats.is_empty() {
            return bad("formats", "need at least one output format");
        }
        let wl = &self.weak_learnability;
        if wl.gammas.is_empty() || wl.gammas.iter().any(|g| !(*g > 0.0 && *g < 0.5)) {
            return bad("weak_learnability.gammas", "each gamma must lie in (0, 0.5)");
        }
        if !(wl.contraction_gamma > 0.0 && wl.contraction_gamma < 0.5) {
            return bad("weak_learnability.contraction_gamma", "must lie in (0, 0.5)");
        }
        if wl.waves.is_empty() || wl.waves.contains(&0) {
            return bad("weak_learnability.waves", "need positive wave counts");
        }
        let counts = [
            ("weak_learnability.replicates", wl.replicates),
            ("weak_learnability.contraction_replicates", wl.contraction_replicates),
            ("weak_learnability.contraction_waves", wl.contraction_waves),
            ("traces.waves", self.traces.waves),
            ("margins.replicates", self.margins.replicates),
            ("convergence.replicates_boost", self.convergence.replicates_boost),
            ("convergence.replicates_acar", self.convergence.replicates_acar),
            ("noise.replicates", self.noise.replicates),
        ];
        for (key, v) in counts {
            if v == 0 {
                return bad(key, "must be at least 1");
            }
        }
        if self.margins.rounds.contains(&0) || self.margins.waves.contains(&0) {
            return bad("margins", "horizons must be positive");
        }
        if self.convergence.rounds.is_empty() || self.convergence.waves.is_empty() {
            return bad("convergence", "grids must be nonempty");
        }
        if self.convergence.rounds.contains(&0) || self.convergence.waves.contains(&0) {
            return bad("convergence", "horizons must be positive");
        }
        if self.noise.levels.iter().any(|l| !(0.0..0.5).contains(l)) {
            return bad("noise.levels", "levels must lie in [0, 0.5)");
        }
        if !(0.0..=0.5).contains(&self.traces.label_noise) {
            return bad("traces.label_noise", "must lie in [0, 0.5]");
        }
        Ok(())
    }
}

/// Full resolution: defaults, then the file, then flags, then validation.
pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = file.map(read_file).transpose()?;
    let mut cfg = layered(text.as_deref())?;
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}
