//! TOML pipeline configuration. Relative paths resolve against the
//! directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::knowledge_base::Metric;
use crate::learner::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub kb: PathBuf,
    pub labels: PathBuf,
    pub corpus: PathBuf,
    pub qualitative_lexicon: PathBuf,
    pub unit_lexicon: PathBuf,
    pub geometry: PathBuf,
    pub topologies: PathBuf,
    /// Trained classifier; when absent the pipeline trains on `labels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
}

impl Paths {
    /// `(name, path)` for every referenced file.
    pub fn entries(&self) -> Vec<(&'static str, &Path)> {
        let mut v: Vec<(&'static str, &Path)> = vec![
            ("kb", &self.kb),
            ("labels", &self.labels),
            ("corpus", &self.corpus),
            ("qualitative_lexicon", &self.qualitative_lexicon),
            ("unit_lexicon", &self.unit_lexicon),
            ("geometry", &self.geometry),
            ("topologies", &self.topologies),
        ];
        if let Some(m) = &self.model {
            v.push(("model", m));
        }
        v
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.kb,
            &mut self.labels,
            &mut self.corpus,
            &mut self.qualitative_lexicon,
            &mut self.unit_lexicon,
            &mut self.geometry,
            &mut self.topologies,
        ] {
            fix(p);
        }
        if let Some(m) = &mut self.model {
            fix(m);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub recall_trials: usize,
    pub relative_noise: f64,
    pub dropped_attributes: usize,
    /// Schedule for the many retrainings of feature ranking.
    pub rfe_epochs: usize,
    pub rfe_hidden: Vec<usize>,
    /// Epochs for each leave-one-out retraining (layers as in training).
    pub loo_epochs: usize,
    pub plan_steps: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            recall_trials: 1000,
            relative_noise: 0.1,
            dropped_attributes: 1,
            rfe_epochs: 200,
            rfe_hidden: vec![16],
            loo_epochs: 300,
            plan_steps: 50,
        }
    }
}

fn default_metric() -> Metric {
    Metric::Jpd
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    /// Seeds training and every evaluation; overrides `training.seed`.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub training: TrainConfig,
    #[serde(default)]
    pub evaluation: EvalSettings,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut config: PipelineConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        config.paths.resolve(base);
        config.set_seed(config.seed);
        Ok(config)
    }

    /// Reads the file and checks that every referenced file exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let config = Self::load_unchecked(path)?;
        if let Some((name, p)) = config.missing_files().into_iter().next() {
            return Err(PipelineError::File {
                path: p,
                message: format!("{name} file not found"),
            });
        }
        Ok(config)
    }

    /// Reads the file without checking the referenced paths.
    pub fn load_unchecked(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::File {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn missing_files(&self) -> Vec<(&'static str, PathBuf)> {
        self.paths
            .entries()
            .into_iter()
            .filter(|(_, p)| !p.is_file())
            .map(|(n, p)| (n, p.to_path_buf()))
            .collect()
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.training.seed = seed;
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
