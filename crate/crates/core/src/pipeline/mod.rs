//! End-to-end wiring: configuration, page ingestion, the
//! description-to-plan pipeline and the evaluation harness.

mod config;
mod eval;
mod ingest;
mod run;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::hand::{HandGeometry, HandModel, TopologyTable};
use crate::knowledge_base::KnowledgeBase;
use crate::learner::{labeled_examples, read_labels, train, ClassifierModel, GraspLabel};
use crate::parser::{Lexicon, Parser};

pub use config::{EvalSettings, Paths, PipelineConfig};
pub use eval::{evaluate_all, EvalReport, GraspOutcome, GraspSection, ScoringSection, Section};
pub use ingest::{
    extract_page, ingest_pages, ExtractedValue, IngestReport, PageExtraction, SkippedPage,
};
pub use run::{label_matches, run_pipeline, run_record, PipelineRun, Retrieval, RetrievalMode};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
    #[error("{stage} stage failed: {message}")]
    Stage {
        stage: &'static str,
        message: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PipelineError {
    /// 2 for configuration and file problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::File { .. } => 2,
            _ => 1,
        }
    }

    pub fn stage(stage: &'static str, err: impl std::fmt::Display) -> Self {
        PipelineError::Stage {
            stage,
            message: err.to_string(),
        }
    }
}

fn file_error(path: &Path, err: impl std::fmt::Display) -> PipelineError {
    PipelineError::File {
        path: path.to_path_buf(),
        message: err.to_string(),
    }
}

pub fn load_kb(config: &PipelineConfig) -> Result<KnowledgeBase, PipelineError> {
    KnowledgeBase::load(&config.paths.kb).map_err(|e| file_error(&config.paths.kb, e))
}

pub fn load_parser(config: &PipelineConfig) -> Result<Parser, PipelineError> {
    let p = &config.paths;
    Lexicon::from_files(&p.qualitative_lexicon, &p.unit_lexicon)
        .map(Parser::new)
        .map_err(|e| file_error(&p.qualitative_lexicon, e))
}

pub fn load_labels(config: &PipelineConfig) -> Result<Vec<GraspLabel>, PipelineError> {
    read_labels(&config.paths.labels).map_err(|e| file_error(&config.paths.labels, e))
}

pub fn load_hand(config: &PipelineConfig) -> Result<HandModel, PipelineError> {
    let p = &config.paths;
    let geometry = HandGeometry::load(&p.geometry).map_err(|e| file_error(&p.geometry, e))?;
    let topologies =
        TopologyTable::load(&p.topologies, &geometry).map_err(|e| file_error(&p.topologies, e))?;
    HandModel::new(geometry, topologies).map_err(|e| file_error(&p.topologies, e))
}

/// Loads the configured model file, or trains one on the labels.
pub fn load_model(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
) -> Result<ClassifierModel, PipelineError> {
    match &config.paths.model {
        Some(path) => ClassifierModel::load(path).map_err(|e| file_error(path, e)),
        None => train_model(config, kb, labels),
    }
}

pub fn train_model(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
) -> Result<ClassifierModel, PipelineError> {
    let dataset = labeled_examples(kb, labels).map_err(|e| PipelineError::stage("train", e))?;
    train(&dataset, &config.training)
        .map(|o| o.model)
        .map_err(|e| PipelineError::stage("train", e))
}

/// Everything the pipeline needs, loaded and checked up front.
#[derive(Debug, Clone)]
pub struct Resources {
    pub config: PipelineConfig,
    pub kb: KnowledgeBase,
    pub parser: Parser,
    pub labels: Vec<GraspLabel>,
    pub hand: HandModel,
    pub model: ClassifierModel,
}

impl Resources {
    pub fn load(config: PipelineConfig) -> Result<Self, PipelineError> {
        if let Some((name, path)) = config.missing_files().into_iter().next() {
            return Err(file_error(&path, format!("{name} file not found")));
        }
        let kb = load_kb(&config)?;
        let parser = load_parser(&config)?;
        let labels = load_labels(&config)?;
        let hand = load_hand(&config)?;
        let model = load_model(&config, &kb, &labels)?;
        Ok(Resources {
            config,
            kb,
            parser,
            labels,
            hand,
            model,
        })
    }
}
