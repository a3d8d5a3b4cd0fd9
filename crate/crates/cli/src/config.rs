//! Run configuration (TOML) and its content digest.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use silsamp_core::{derive_sub_seed, BackendConfig, BootstrapConfig, Codebook, ConditionId, Question};

use crate::error::CliError;

fn default_survey_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 11, 3).expect("valid date")
}

fn default_max_failure_fraction() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

fn default_conditions() -> Vec<ConditionId> {
    ConditionId::ALL.to_vec()
}

/// One human survey wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub label: String,
    pub path: PathBuf,
    #[serde(default = "default_survey_date")]
    pub survey_date: NaiveDate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratifyConfig {
    /// Categorical demographic codes to stratify on.
    #[serde(default)]
    pub axes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub codebook: PathBuf,
    pub output_dir: PathBuf,
    pub waves: Vec<WaveConfig>,
    /// Master seed for sampling, the categorical mock and the bootstrap.
    #[serde(default)]
    pub seed: u64,
    /// Silicon population size; defaults to the wave's row count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<ConditionId>,
    /// Question ids; empty means every codebook question.
    #[serde(default)]
    pub questions: Vec<String>,
    /// Decoding temperatures; empty means the backend temperature alone.
    #[serde(default)]
    pub temperatures: Vec<f64>,
    #[serde(default = "default_true")]
    pub deltas: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal_prefixes: Option<Vec<String>>,
    #[serde(default = "default_max_failure_fraction")]
    pub max_failure_fraction: f64,
    pub backend: BackendConfig,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub stratify: StratifyConfig,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub conditions: Option<Vec<ConditionId>>,
    pub temperature: Option<f64>,
    pub backend: Option<silsamp_core::BackendKind>,
    pub max_in_flight: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Read a config file. Relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.codebook);
        join(&mut self.output_dir);
        for wave in &mut self.waves {
            join(&mut wave.path);
        }
        if let Some(fixture) = &mut self.backend.fixture {
            join(fixture);
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(c) = &o.conditions {
            self.conditions = c.clone();
        }
        if let Some(t) = o.temperature {
            self.temperatures = vec![t];
            self.backend.temperature = t;
        }
        if let Some(kind) = o.backend {
            self.backend.kind = kind;
        }
        if let Some(m) = o.max_in_flight {
            self.backend.max_in_flight = m;
        }
        if let Some(out) = &o.output_dir {
            self.output_dir = out.clone();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.waves.is_empty() {
            return fail("at least one wave is required".into());
        }
        let mut labels: Vec<&str> = self.waves.iter().map(|w| w.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.waves.len() {
            return fail("wave labels must be unique".into());
        }
        if let Some(bad) = self.waves.iter().find(|w| !is_safe_name(&w.label)) {
            return fail(format!("wave label `{}` must be a plain file name", bad.label));
        }
        if self.conditions.is_empty() {
            return fail("at least one condition is required".into());
        }
        if self.deltas && !self.conditions.contains(&ConditionId::Replicate) {
            return fail("deltas need the replicate condition".into());
        }
        if self.population_size == Some(0) {
            return fail("population_size must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return fail("max_failure_fraction must lie in [0, 1]".into());
        }
        for t in self.temperature_list() {
            if !(0.0..=2.0).contains(&t) {
                return fail(format!("temperature {t} outside [0, 2]"));
            }
        }
        self.backend.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.bootstrap.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Validate against a loaded codebook and return the selected questions in codebook order.
    pub fn select_questions<'a>(&self, codebook: &'a Codebook) -> Result<Vec<&'a Question>, CliError> {
        for id in &self.questions {
            if codebook.question(id).is_none() {
                return Err(CliError::Config(format!("unknown question `{id}`")));
            }
        }
        if self.questions.is_empty() {
            return Ok(codebook.questions.iter().collect());
        }
        Ok(codebook.questions.iter().filter(|q| self.questions.contains(&q.id)).collect())
    }

    pub fn check_axes(&self, codebook: &Codebook) -> Result<(), CliError> {
        for axis in &self.stratify.axes {
            match codebook.variable(axis) {
                None => return Err(CliError::Config(format!("unknown stratification axis `{axis}`"))),
                Some(v) if v.is_numeric() => {
                    return Err(CliError::Config(format!("stratification axis `{axis}` is numeric")))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Requested conditions, sorted and deduplicated.
    pub fn condition_list(&self) -> Vec<ConditionId> {
        let mut c = self.conditions.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn temperature_list(&self) -> Vec<f64> {
        if self.temperatures.is_empty() {
            vec![self.backend.temperature]
        } else {
            self.temperatures.clone()
        }
    }

    pub fn parser(&self) -> silsamp_core::AnswerParser {
        match &self.refusal_prefixes {
            Some(p) => silsamp_core::AnswerParser::new(p.clone()),
            None => silsamp_core::AnswerParser::default(),
        }
    }

    pub fn sample_seed(&self, wave: &str) -> u64 {
        derive_sub_seed(self.seed, 0, &format!("sample/{wave}"))
    }

    pub fn backend_seed(&self, wave: &str, temperature: f64) -> u64 {
        derive_sub_seed(self.seed, 0, &format!("backend/{wave}/{}", temperature_tag(temperature)))
    }

    pub fn bootstrap_seed(&self, wave: &str, temperature: f64, question: &str, condition: ConditionId) -> u64 {
        derive_sub_seed(
            self.seed,
            condition.index() as u64,
            &format!("bootstrap/{wave}/{}/{question}", temperature_tag(temperature)),
        )
    }

    /// SHA-256 over the canonical JSON form; any field change changes it.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

/// Directory-friendly temperature label, e.g. `t0.70`.
pub fn temperature_tag(t: f64) -> String {
    format!("t{t:.2}")
}

fn is_safe_name(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && !s.contains(['/', '\\'])
}
