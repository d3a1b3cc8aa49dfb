//! Description in, grasp plan out.

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError, Resources};
use crate::hand::{ContactReport, GraspPlan};
use crate::knowledge_base::{encode_record, KnowledgeBase, Metric, ObjectRecord};
use crate::learner::{select_grasp, GraspClass, GraspDistribution};
use crate::parser::{lemmatize, ParseResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMode {
    /// The description was exactly an object label.
    Label,
    /// Nearest neighbour over the parsed attributes.
    Attributes,
    /// The caller named the record directly.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieval {
    pub mode: RetrievalMode,
    pub metric: Option<Metric>,
    /// Query-to-record distance; absent for label and direct lookups.
    pub distance: Option<f64>,
    pub record: ObjectRecord,
}

/// Every intermediate of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub config: PipelineConfig,
    pub description: String,
    /// Absent when the description matched a label.
    pub parse: Option<ParseResult>,
    pub retrieval: Retrieval,
    pub distribution: GraspDistribution,
    pub class: GraspClass,
    pub plan: Option<GraspPlan>,
    pub contact: Option<ContactReport>,
    /// Why planning failed; the class and distribution still stand.
    pub plan_error: Option<String>,
}

fn lemma_key(text: &str) -> Vec<String> {
    text.split_whitespace().map(lemmatize).collect()
}

/// Record whose lowercased, lemmatized label equals the description's.
pub fn label_matches<'a>(kb: &'a KnowledgeBase, description: &str) -> Option<&'a ObjectRecord> {
    let key = lemma_key(description);
    if key.is_empty() {
        return None;
    }
    kb.records()
        .iter()
        .filter(|r| lemma_key(&r.label) == key)
        .min_by_key(|r| r.id)
}

/// Parse, impute, retrieve, then predict and plan on the retrieved record.
pub fn run_pipeline(description: &str, res: &Resources) -> Result<PipelineRun, PipelineError> {
    if let Some(record) = label_matches(&res.kb, description) {
        let retrieval = Retrieval {
            mode: RetrievalMode::Label,
            metric: None,
            distance: None,
            record: record.clone(),
        };
        return finish(description, None, retrieval, res);
    }
    let parsed = res
        .parser
        .parse_with(description, &res.kb)
        .map_err(|e| PipelineError::stage("parse", e))?;
    if parsed.query.is_empty() {
        return Err(PipelineError::stage(
            "retrieve",
            "no attributes recognized and no label matched",
        ));
    }
    let metric = res.config.metric;
    let nearest = res
        .kb
        .retrieve(&parsed.query, metric, 1)
        .map_err(|e| PipelineError::stage("retrieve", e))?;
    let hit = &nearest[0];
    let retrieval = Retrieval {
        mode: RetrievalMode::Attributes,
        metric: Some(metric),
        distance: Some(hit.distance),
        record: hit.record.clone(),
    };
    finish(description, Some(parsed), retrieval, res)
}

/// Predicts and plans for a knowledge-base record by id.
pub fn run_record(id: u32, res: &Resources) -> Result<PipelineRun, PipelineError> {
    let record = res
        .kb
        .get(id)
        .ok_or_else(|| PipelineError::Input(format!("no object with id {id}")))?;
    let retrieval = Retrieval {
        mode: RetrievalMode::Direct,
        metric: None,
        distance: None,
        record: record.clone(),
    };
    finish(&record.label.clone(), None, retrieval, res)
}

fn finish(
    description: &str,
    parse: Option<ParseResult>,
    retrieval: Retrieval,
    res: &Resources,
) -> Result<PipelineRun, PipelineError> {
    let distribution = res
        .model
        .predict(&encode_record(&retrieval.record))
        .map_err(|e| PipelineError::stage("predict", e))?;
    let class = select_grasp(&distribution);
    let steps = res.config.evaluation.plan_steps;
    let (plan, contact, plan_error) =
        match res.hand.plan_and_simulate(class, &retrieval.record, steps) {
            Ok((plan, contact)) => (Some(plan), Some(contact), None),
            Err(e) => (None, None, Some(format!("plan stage failed: {e}"))),
        };
    Ok(PipelineRun {
        config: res.config.clone(),
        description: description.to_string(),
        parse,
        retrieval,
        distribution,
        class,
        plan,
        contact,
        plan_error,
    })
}
