//! Recall harness: perturb knowledge-base records into noisy, incomplete
//! queries and count how often top-1 retrieval returns the source record.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoding::encode;
use super::metric::Metric;
use super::schema::{Attribute, FeatureQuery, ObjectRecord};
use super::{KbError, KnowledgeBase};

/// How attributes are removed from a perturbed query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DropRule {
    None,
    /// Remove exactly this many distinct attributes, chosen uniformly.
    Exactly(usize),
    /// Remove each attribute independently with this probability.
    Probability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Continuous values are scaled by `1 + u`, `u ~ U(-r, r)`.
    pub relative_noise: f64,
    pub drop: DropRule,
}

impl NoiseSpec {
    pub const EXACT: NoiseSpec = NoiseSpec {
        relative_noise: 0.0,
        drop: DropRule::None,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub metric: Metric,
    pub trials: usize,
    pub hits: usize,
    pub recall: f64,
}

fn jitter(rng: &mut ChaCha8Rng, value: f64, r: f64) -> f64 {
    if r == 0.0 {
        return value;
    }
    let scaled = value * (1.0 + rng.gen_range(-r..=r));
    // keep strictly positive
    scaled.max(value * 1e-6)
}

/// Noisy, partial copy of `record`. Draw order is fixed: four continuous
/// jitters, then the drop decisions.
pub fn perturb(record: &ObjectRecord, spec: &NoiseSpec, rng: &mut ChaCha8Rng) -> FeatureQuery {
    let r = spec.relative_noise;
    let dims = [
        Some(jitter(rng, record.a, r)),
        Some(jitter(rng, record.b, r)),
        Some(jitter(rng, record.c, r)),
    ];
    let mass = jitter(rng, record.mass, r);
    let mut query = record
        .to_query()
        .with_dims(dims)
        .and_then(|q| q.with_mass(Some(mass)))
        .expect("jittered values stay positive");
    match spec.drop {
        DropRule::None => {}
        DropRule::Exactly(n) => {
            let mut pool = Attribute::ALL.to_vec();
            for _ in 0..n.min(pool.len()) {
                let i = rng.gen_range(0..pool.len());
                query = query.without(pool.swap_remove(i));
            }
        }
        DropRule::Probability(p) => {
            for attr in Attribute::ALL {
                if rng.gen_bool(p.clamp(0.0, 1.0)) {
                    query = query.without(attr);
                }
            }
        }
    }
    query
}

/// Runs `trials` perturbed top-1 lookups. The same seed produces the same
/// queries for every metric.
pub fn evaluate_recall(
    kb: &KnowledgeBase,
    spec: &NoiseSpec,
    metric: Metric,
    trials: usize,
    seed: u64,
) -> Result<RecallReport, KbError> {
    if kb.is_empty() {
        return Err(KbError::EmptyKnowledgeBase);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let source = &kb.records()[rng.gen_range(0..kb.len())];
        let query = perturb(source, spec, &mut rng);
        let top = kb.retrieve_encoded(&encode(&query), metric, 1)?;
        if top[0].record.id == source.id {
            hits += 1;
        }
    }
    Ok(RecallReport {
        metric,
        trials,
        hits,
        recall: if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        },
    })
}
