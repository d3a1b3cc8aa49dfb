//! Grasp selection and the feasibility / match scores.

use super::classes::{GraspClass, GraspDistribution, GraspLabel};
use super::LearnError;

/// Most probable class; on ties the earliest class in canonical order.
pub fn select_grasp(distribution: &GraspDistribution) -> GraspClass {
    let mut best = GraspClass::ALL[0];
    for (class, p) in distribution.iter() {
        if p > distribution.get(best) {
            best = class;
        }
    }
    best
}

fn per_object<F>(
    labels: &[GraspLabel],
    predictions: &[GraspDistribution],
    hit: F,
) -> Result<f64, LearnError>
where
    F: Fn(&GraspLabel, GraspClass) -> bool,
{
    if labels.len() != predictions.len() {
        return Err(LearnError::LengthMismatch {
            labels: labels.len(),
            predictions: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let hits = labels
        .iter()
        .zip(predictions)
        .filter(|(l, p)| hit(l, select_grasp(p)))
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Fraction of objects whose predicted class was chosen at least once by
/// people.
pub fn feasibility_score(
    labels: &[GraspLabel],
    predictions: &[GraspDistribution],
) -> Result<f64, LearnError> {
    per_object(labels, predictions, |l, c| l.frequency(c) > 0)
}

/// Fraction of objects whose predicted class has the highest human
/// frequency. A class tied for the highest counts.
pub fn match_score(
    labels: &[GraspLabel],
    predictions: &[GraspDistribution],
) -> Result<f64, LearnError> {
    per_object(labels, predictions, |l, c| {
        l.frequency(c) == l.max_frequency()
    })
}
