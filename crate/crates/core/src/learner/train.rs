//! Seeded gradient-descent training on summed cross-entropy.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::knowledge_base::EncodedFeatures;

use super::classes::{GraspDistribution, GraspLabel};
use super::model::{model_input, ClassifierModel, INPUT_WIDTH};
use super::LearnError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Examples per step; 0 means the whole dataset.
    pub batch_size: usize,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 3000,
            learning_rate: 0.05,
            batch_size: 0,
            hidden: vec![32, 32],
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub model: ClassifierModel,
    /// Summed dataset cross-entropy, one entry per epoch, measured before
    /// that epoch's updates.
    pub loss_history: Vec<f64>,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }
}

/// A training example: features and the normalized label.
pub type Example = (EncodedFeatures, GraspLabel);

/// Total cross-entropy of `model` on prepared inputs.
fn dataset_loss(model: &ClassifierModel, data: &[([f64; INPUT_WIDTH], GraspDistribution)]) -> f64 {
    data.iter()
        .map(|(x, t)| {
            model
                .loss_and_gradient(x, t)
                .map(|(l, _)| l)
                .unwrap_or(f64::NAN)
        })
        .sum()
}

/// Trains a fresh model. Each step moves by `learning_rate` times the mean
/// gradient over the batch.
pub fn train(dataset: &[Example], config: &TrainConfig) -> Result<TrainOutcome, LearnError> {
    let data: Vec<([f64; INPUT_WIDTH], GraspDistribution)> = dataset
        .iter()
        .map(|(f, l)| (model_input(f), l.distribution()))
        .collect();
    train_prepared(&data, config)
}

pub(crate) fn train_prepared(
    data: &[([f64; INPUT_WIDTH], GraspDistribution)],
    config: &TrainConfig,
) -> Result<TrainOutcome, LearnError> {
    if data.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let mut model = ClassifierModel::new(&config.hidden, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let batch = match config.batch_size {
        0 => data.len(),
        n => n.min(data.len()),
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut params = model.parameters();
    for epoch in 0..config.epochs {
        if batch < data.len() {
            order.shuffle(&mut rng);
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let mut grad = vec![0.0; params.len()];
            for &i in chunk {
                let (x, t) = &data[i];
                let (loss, g) = model.loss_and_gradient(x, t)?;
                epoch_loss += loss;
                for (acc, v) in grad.iter_mut().zip(g) {
                    *acc += v;
                }
            }
            let scale = config.learning_rate / chunk.len() as f64;
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= scale * g;
            }
            model.set_parameters(&params)?;
        }
        if !epoch_loss.is_finite() {
            return Err(LearnError::NonFiniteLoss { epoch });
        }
        history.push(epoch_loss);
    }
    // a NaN produced by the last update would otherwise go unnoticed
    if !history.is_empty() && !dataset_loss(&model, data).is_finite() {
        return Err(LearnError::NonFiniteLoss {
            epoch: history.len(),
        });
    }
    Ok(TrainOutcome {
        model,
        loss_history: history,
    })
}

/// Held-out predictions: object `i` is predicted by a model trained on
/// every other example. Retrainings run on scoped threads.
pub fn leave_one_out(
    dataset: &[Example],
    config: &TrainConfig,
) -> Result<Vec<GraspDistribution>, LearnError> {
    if dataset.len() < 2 {
        return Err(LearnError::EmptyDataset);
    }
    let data: Vec<([f64; INPUT_WIDTH], GraspDistribution)> = dataset
        .iter()
        .map(|(f, l)| (model_input(f), l.distribution()))
        .collect();
    let data = &data;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..data.len())
            .map(|held| {
                s.spawn(move || {
                    let rest: Vec<_> = data
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != held)
                        .map(|(_, d)| *d)
                        .collect();
                    train_prepared(&rest, config)?
                        .model
                        .predict_input(&data[held].0)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("retraining thread panicked"))
            .collect()
    })
}
