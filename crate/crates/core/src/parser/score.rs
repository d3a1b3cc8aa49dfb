//! Parser accuracy against a labeled description corpus.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::knowledge_base::{KnowledgeBase, Material, Rigidity, Shape};

use super::{ParseError, Parser};

/// One corpus line: `{"text": ..., "truth_id": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub text: String,
    pub truth_id: u32,
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, ParseError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ParseError::Corpus {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    fn add(&mut self, truth: &str, predicted: &str) {
        let idx = |l: &str| {
            self.labels
                .iter()
                .position(|x| x == l)
                .expect("known label")
        };
        let (t, p) = (idx(truth), idx(predicted));
        self.counts[t][p] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let diag: usize = (0..self.labels.len()).map(|i| self.counts[i][i]).sum();
        match self.total() {
            0 => 0.0,
            n => diag as f64 / n as f64,
        }
    }
}

/// Coefficient of determination of predictions against truths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionScore {
    pub r2: f64,
    /// Pairs where both values exist.
    pub scored: usize,
    /// Truth values the parser did not recover.
    pub missing: usize,
}

fn r_squared(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return f64::NAN;
    }
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / pairs.len() as f64;
    let ss_tot: f64 = pairs.iter().map(|p| (p.0 - mean).powi(2)).sum();
    let ss_res: f64 = pairs.iter().map(|p| (p.0 - p.1).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        };
    }
    1.0 - ss_res / ss_tot
}

impl RegressionScore {
    fn from_pairs(pairs: &[(f64, f64)], missing: usize) -> Self {
        RegressionScore {
            r2: r_squared(pairs),
            scored: pairs.len(),
            missing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParserScore {
    pub descriptions: usize,
    pub dimensions: RegressionScore,
    pub mass: RegressionScore,
    pub material: ConfusionMatrix,
    pub shape: ConfusionMatrix,
    pub rigidity: ConfusionMatrix,
    pub warnings: usize,
}

const NONE: &str = "none";

fn labels<T: ToString>(all: &[T], extra: Option<&str>) -> Vec<String> {
    let mut v: Vec<String> = all.iter().map(|x| x.to_string()).collect();
    v.extend(extra.map(str::to_string));
    v
}

/// Parses every description (without imputation) and compares with the
/// knowledge-base record named by `truth_id`. Dimensions are pooled over
/// `a`, `b`, `c`. An absent material counts as `other`; an absent shape or
/// rigidity is its own `none` column.
pub fn score_parser(
    corpus: &[CorpusEntry],
    kb: &KnowledgeBase,
    parser: &Parser,
) -> Result<ParserScore, ParseError> {
    let mut dim_pairs = Vec::new();
    let mut dim_missing = 0;
    let mut mass_pairs = Vec::new();
    let mut mass_missing = 0;
    let mut material = ConfusionMatrix::new(labels(Material::ALL, None));
    let mut shape = ConfusionMatrix::new(labels(Shape::ALL, Some(NONE)));
    let mut rigidity = ConfusionMatrix::new(labels(Rigidity::ALL, Some(NONE)));
    let mut warnings = 0;
    for entry in corpus {
        let truth = kb
            .get(entry.truth_id)
            .ok_or(ParseError::UnknownTruth(entry.truth_id))?;
        let parsed = parser.parse(&entry.text)?;
        warnings += parsed.warnings.len();
        let q = &parsed.query;
        for (p, t) in q.dims().iter().zip(truth.dims()) {
            match p {
                Some(p) => dim_pairs.push((t, *p)),
                None => dim_missing += 1,
            }
        }
        match q.mass() {
            Some(m) => mass_pairs.push((truth.mass, m)),
            None => mass_missing += 1,
        }
        material.add(
            truth.material.as_str(),
            q.material().unwrap_or(Material::Other).as_str(),
        );
        shape.add(truth.shape.as_str(), q.shape().map_or(NONE, Shape::as_str));
        rigidity.add(
            truth.rigidity.as_str(),
            q.rigidity().map_or(NONE, Rigidity::as_str),
        );
    }
    Ok(ParserScore {
        descriptions: corpus.len(),
        dimensions: RegressionScore::from_pairs(&dim_pairs, dim_missing),
        mass: RegressionScore::from_pairs(&mass_pairs, mass_missing),
        material,
        shape,
        rigidity,
        warnings,
    })
}
