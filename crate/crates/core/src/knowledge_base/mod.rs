//! Object knowledge base: attribute records, mixed encoding, distance
//! metrics and nearest-object retrieval for incomplete queries.

mod encoding;
mod io;
mod kdtree;
mod metric;
mod recall;
mod schema;

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

pub use encoding::{
    column_attributes, columns, decode, encode, encode_record, EncodedFeatures, ENCODED_WIDTH,
};
pub use io::{read_drafts, write_csv, RecordDraft, KB_HEADER};
pub use kdtree::{Hit, KdTree};
pub use metric::{
    baseline_distance, cosine, euclidean, jpd_distance, minkowski, BaselineKind, Metric,
};
pub use recall::{evaluate_recall, perturb, DropRule, NoiseSpec, RecallReport};
pub use schema::{
    Attribute, AttributeMask, FeatureQuery, Fragility, Material, ObjectRecord, Rigidity, Shape,
    Texture,
};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("unknown {field} value '{value}'")]
    UnknownCategory { field: &'static str, value: String },
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error("invalid {field}: {reason}")]
    InvalidValue { field: &'static str, reason: String },
    #[error("knowledge base is empty")]
    EmptyKnowledgeBase,
    #[error("k must be in 1..={len}, got {k}")]
    InvalidK { k: usize, len: usize },
    #[error("duplicate record id {0}")]
    DuplicateId(u32),
    #[error("record {id} is missing {missing:?}")]
    IncompleteRecord { id: u32, missing: Vec<&'static str> },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    BadHeader {
        path: String,
        expected: String,
        found: String,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A retrieval result.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<'a> {
    pub record: &'a ObjectRecord,
    pub distance: f64,
}

/// Immutable collection of complete object records with a k-d tree index.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    records: Vec<ObjectRecord>,
    encoded: Vec<EncodedFeatures>,
    tree: KdTree,
}

impl KnowledgeBase {
    /// Validates every record and rejects duplicate ids.
    pub fn new(records: Vec<ObjectRecord>) -> Result<Self, KbError> {
        let mut seen = BTreeSet::new();
        for r in &records {
            r.validate()?;
            if !seen.insert(r.id) {
                return Err(KbError::DuplicateId(r.id));
            }
        }
        let encoded: Vec<_> = records.iter().map(encode_record).collect();
        let tree = KdTree::build(encoded.clone(), records.iter().map(|r| r.id).collect());
        Ok(KnowledgeBase {
            records,
            encoded,
            tree,
        })
    }

    /// Loads a CSV or JSON-lines file (chosen by extension). Every row must
    /// be complete.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, KbError> {
        let drafts = read_drafts(path)?;
        let records = drafts
            .into_iter()
            .map(RecordDraft::into_record)
            .collect::<Result<Vec<_>, _>>()?;
        KnowledgeBase::new(records)
    }

    pub fn records(&self) -> &[ObjectRecord] {
        &self.records
    }

    pub fn encoded(&self) -> &[EncodedFeatures] {
        &self.encoded
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&ObjectRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Record whose label equals `label` after trimming and lowercasing.
    pub fn find_label(&self, label: &str) -> Option<&ObjectRecord> {
        let needle = label.trim().to_lowercase();
        self.records
            .iter()
            .filter(|r| r.label.trim().to_lowercase() == needle)
            .min_by_key(|r| r.id)
    }

    /// Nearest `k` records to `query`, ascending by distance then id.
    pub fn retrieve(
        &self,
        query: &FeatureQuery,
        metric: Metric,
        k: usize,
    ) -> Result<Vec<Neighbor<'_>>, KbError> {
        self.retrieve_encoded(&encode(query), metric, k)
    }

    pub fn retrieve_encoded(
        &self,
        query: &EncodedFeatures,
        metric: Metric,
        k: usize,
    ) -> Result<Vec<Neighbor<'_>>, KbError> {
        if self.records.is_empty() {
            return Err(KbError::EmptyKnowledgeBase);
        }
        if k == 0 || k > self.records.len() {
            return Err(KbError::InvalidK {
                k,
                len: self.records.len(),
            });
        }
        if metric == Metric::KdTree {
            return Ok(self
                .tree
                .nearest(query, k)
                .into_iter()
                .map(|h| Neighbor {
                    record: &self.records[h.index],
                    distance: h.distance,
                })
                .collect());
        }
        let mut scored: Vec<Neighbor<'_>> = self
            .records
            .iter()
            .zip(&self.encoded)
            .map(|(record, enc)| Neighbor {
                record,
                distance: metric.distance(query, enc),
            })
            .collect();
        scored.sort_by(|x, y| {
            x.distance
                .total_cmp(&y.distance)
                .then(x.record.id.cmp(&y.record.id))
        });
        scored.truncate(k);
        Ok(scored)
    }
}

/// Free-function form of [`KnowledgeBase::retrieve`].
pub fn retrieve<'a>(
    query: &FeatureQuery,
    kb: &'a KnowledgeBase,
    metric: Metric,
    k: usize,
) -> Result<Vec<Neighbor<'a>>, KbError> {
    kb.retrieve(query, metric, k)
}
