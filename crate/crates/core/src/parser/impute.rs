//! Missing-dimension imputation from knowledge-base shape statistics.

use crate::knowledge_base::{Attribute, KnowledgeBase, ObjectRecord, Shape};

use super::ParseResult;

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Median of `dim[target] / dim[source]` over records of `shape` (all
/// records when the shape is unknown or has no members).
pub fn median_ratio(
    kb: &KnowledgeBase,
    shape: Option<Shape>,
    target: usize,
    source: usize,
) -> Option<f64> {
    let ratio = |r: &ObjectRecord| r.dims()[target] / r.dims()[source];
    let same: Vec<f64> = kb
        .records()
        .iter()
        .filter(|r| Some(r.shape) == shape)
        .map(ratio)
        .collect();
    if !same.is_empty() {
        return median(same);
    }
    median(kb.records().iter().map(ratio).collect())
}

/// Fills missing `a`, `b`, `c`.
///
/// A radial object whose known dimensions share one value becomes a sphere
/// of that size.
/// Otherwise each missing slot is the median ratio to the nearest known slot
/// (ties go to the larger slot) times that slot's value, clamped so that
/// `a >= b >= c` still holds. Nothing is imputed without a known dimension.
pub fn impute(partial: &ParseResult, kb: &KnowledgeBase) -> ParseResult {
    let mut result = partial.clone();
    let dims = partial.query.dims();
    let known: Vec<usize> = (0..3).filter(|&i| dims[i].is_some()).collect();
    if known.is_empty() || known.len() == 3 {
        return result;
    }
    let shape = partial.query.shape();
    let mut filled = dims;
    let d = dims[known[0]].unwrap();
    if shape == Some(Shape::Radial) && known.iter().all(|&k| dims[k] == Some(d)) {
        filled = [Some(d); 3];
    } else if kb.is_empty() {
        result
            .warnings
            .push("no knowledge base records to impute dimensions from".into());
        return result;
    } else {
        for slot in (0..3).filter(|i| dims[*i].is_none()) {
            let source = *known
                .iter()
                .min_by_key(|&&k| (k.abs_diff(slot), k))
                .expect("at least one known slot");
            let ratio = median_ratio(kb, shape, slot, source).unwrap_or(1.0);
            let mut value = ratio * dims[source].unwrap();
            // keep the ordering against known neighbours
            if let Some(upper) = (0..slot).rev().find_map(|i| dims[i]) {
                value = value.min(upper);
            }
            if let Some(lower) = (slot + 1..3).find_map(|i| dims[i]) {
                value = value.max(lower);
            }
            filled[slot] = Some(value);
        }
    }
    result.query = partial
        .query
        .clone()
        .with_dims(filled)
        .expect("imputed dimensions are positive");
    for (slot, attr) in Attribute::DIMENSIONS.into_iter().enumerate() {
        if dims[slot].is_none() {
            result.imputed.push(attr);
        }
    }
    result
}
