//! Grasp-class learning: from encoded object features to a distribution
//! over the nine extended grasp classes, plus selection and scoring.

mod classes;
mod model;
mod rfe;
mod scoring;
mod train;

use thiserror::Error;

pub use classes::{
    label_header, read_labels, write_labels, GraspClass, GraspDim, GraspDistribution, GraspLabel,
    GraspType, CLASS_COUNT,
};
pub use model::{
    cross_entropy, model_input, Activation, ClassifierModel, Layer, INPUT_WIDTH, MODEL_VERSION,
    PROBABILITY_FLOOR,
};
pub use rfe::{rank_features, FeatureRank};
pub use scoring::{feasibility_score, match_score, select_grasp};
pub use train::{leave_one_out, train, Example, TrainConfig, TrainOutcome};

use crate::knowledge_base::{EncodedFeatures, KnowledgeBase};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("unknown grasp class '{0}'")]
    UnknownClass(String),
    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("label for object {0} has no positive frequency")]
    EmptyLabel(u32),
    #[error("{path}:{line}: {message}")]
    BadLabelFile {
        path: String,
        line: usize,
        message: String,
    },
    #[error("expected width {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{labels} labels but {predictions} predictions")]
    LengthMismatch { labels: usize, predictions: usize },
    #[error("labeled object {0} is not in the knowledge base")]
    UnknownObject(u32),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("unsupported model version {0}")]
    ModelVersion(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Free-function form of [`ClassifierModel::predict`].
pub fn predict(
    model: &ClassifierModel,
    features: &EncodedFeatures,
) -> Result<GraspDistribution, LearnError> {
    model.predict(features)
}

/// Pairs each label with its object's encoded features.
pub fn labeled_examples(
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
) -> Result<Vec<Example>, LearnError> {
    labels
        .iter()
        .map(|l| {
            let idx = kb
                .records()
                .iter()
                .position(|r| r.id == l.object_id)
                .ok_or(LearnError::UnknownObject(l.object_id))?;
            Ok((kb.encoded()[idx].clone(), l.clone()))
        })
        .collect()
}
