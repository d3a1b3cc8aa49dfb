//! Recursive feature elimination by drop-attribute retraining.

use serde::{Deserialize, Serialize};

use crate::knowledge_base::{Attribute, EncodedFeatures};

use super::classes::GraspDistribution;
use super::model::{model_input, INPUT_WIDTH};
use super::train::{train_prepared, Example, TrainConfig};
use super::LearnError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRank {
    pub attribute: Attribute,
    /// Training-loss increase when the attribute was removed, measured in
    /// the round it was eliminated (the survivor: the last round).
    pub importance: f64,
}

fn strip(features: &EncodedFeatures, removed: &[Attribute]) -> EncodedFeatures {
    removed.iter().fold(features.clone(), |f, a| f.without(*a))
}

fn final_loss(
    dataset: &[Example],
    removed: &[Attribute],
    config: &TrainConfig,
) -> Result<f64, LearnError> {
    let data: Vec<([f64; INPUT_WIDTH], GraspDistribution)> = dataset
        .iter()
        .map(|(f, l)| (model_input(&strip(f, removed)), l.distribution()))
        .collect();
    let outcome = train_prepared(&data, config)?;
    Ok(outcome.final_loss().unwrap_or(f64::INFINITY))
}

/// Ranks the nine attributes, most important first.
///
/// Each round trains on the surviving attributes, retrains once per
/// survivor with that attribute removed (columns zeroed, presence bit
/// cleared), and eliminates the attribute whose removal raises the final
/// training loss least. Categorical blocks are removed whole.
pub fn rank_features(
    dataset: &[Example],
    config: &TrainConfig,
) -> Result<Vec<FeatureRank>, LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let mut active: Vec<Attribute> = Attribute::ALL.to_vec();
    let mut removed: Vec<Attribute> = Vec::new();
    let mut eliminated: Vec<FeatureRank> = Vec::new();
    while active.len() >= 2 {
        let base = final_loss(dataset, &removed, config)?;
        // retrainings are independent and individually seeded
        let losses: Vec<Result<f64, LearnError>> = std::thread::scope(|s| {
            let handles: Vec<_> = active
                .iter()
                .map(|&attr| {
                    let mut without = removed.clone();
                    without.push(attr);
                    s.spawn(move || final_loss(dataset, &without, config))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("retraining thread panicked"))
                .collect()
        });
        let mut scores = Vec::with_capacity(active.len());
        for (&attr, loss) in active.iter().zip(losses) {
            scores.push((attr, loss? - base));
        }
        let (weakest, importance) = scores
            .iter()
            .copied()
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
            .expect("at least two active attributes");
        eliminated.push(FeatureRank {
            attribute: weakest,
            importance,
        });
        active.retain(|a| *a != weakest);
        removed.push(weakest);
        if active.len() == 1 {
            let survivor = scores
                .into_iter()
                .find(|(a, _)| *a == active[0])
                .expect("survivor scored this round");
            eliminated.push(FeatureRank {
                attribute: survivor.0,
                importance: survivor.1,
            });
        }
    }
    eliminated.reverse();
    Ok(eliminated)
}
