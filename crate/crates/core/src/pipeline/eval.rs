//! Evaluation harness. Each section needs its own fixtures; a section
//! whose inputs are missing is reported as skipped instead of aborting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    load_hand, load_kb, load_labels, load_model, load_parser, PipelineConfig, PipelineError,
};
use crate::knowledge_base::{
    evaluate_recall, DropRule, KnowledgeBase, Metric, NoiseSpec, RecallReport,
};
use crate::learner::{
    feasibility_score, labeled_examples, leave_one_out, match_score, rank_features, select_grasp,
    ClassifierModel, FeatureRank, GraspClass, GraspDistribution, GraspLabel, TrainConfig,
};
use crate::parser::{read_corpus, score_parser, ParserScore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "result", rename_all = "snake_case")]
pub enum Section<T> {
    Ok(T),
    Skipped(String),
}

impl<T> Section<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok(v) => Some(v),
            Section::Skipped(_) => None,
        }
    }

    fn from_result(r: Result<T, PipelineError>) -> Self {
        match r {
            Ok(v) => Section::Ok(v),
            Err(e) => Section::Skipped(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringSection {
    pub objects: usize,
    /// Resubstitution: the model has seen every object.
    pub feasibility: f64,
    pub match_rate: f64,
    /// Each object predicted by a model trained without it.
    pub held_out_feasibility: f64,
    pub held_out_match_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspOutcome {
    pub object_id: u32,
    pub label: String,
    pub predicted: GraspClass,
    pub modal: GraspClass,
    /// Predicted class differs from the most frequent human choice.
    pub mismatch: bool,
    pub predicted_secured: bool,
    pub modal_secured: bool,
    /// Planning failures, by class.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspSection {
    pub objects: usize,
    /// Share of objects secured with their modal human class.
    pub modal_secured_rate: f64,
    pub predicted_secured_rate: f64,
    pub mismatches: usize,
    pub outcomes: Vec<GraspOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: PipelineConfig,
    pub recall: Section<Vec<RecallReport>>,
    pub parser: Section<ParserScore>,
    pub scoring: Section<ScoringSection>,
    pub ranking: Section<Vec<FeatureRank>>,
    pub grasps: Section<GraspSection>,
}

fn recall_section(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
) -> Result<Vec<RecallReport>, PipelineError> {
    let e = &config.evaluation;
    let spec = NoiseSpec {
        relative_noise: e.relative_noise,
        drop: DropRule::Exactly(e.dropped_attributes),
    };
    Metric::comparison_set()
        .into_iter()
        .map(|m| {
            evaluate_recall(kb, &spec, m, e.recall_trials, config.seed)
                .map_err(|err| PipelineError::stage("recall", err))
        })
        .collect()
}

fn parser_section(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
) -> Result<ParserScore, PipelineError> {
    let parser = load_parser(config)?;
    let corpus = read_corpus(&config.paths.corpus).map_err(|e| PipelineError::File {
        path: config.paths.corpus.clone(),
        message: e.to_string(),
    })?;
    score_parser(&corpus, kb, &parser).map_err(|e| PipelineError::stage("parser", e))
}

fn predictions(
    model: &ClassifierModel,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
) -> Result<Vec<GraspDistribution>, PipelineError> {
    labeled_examples(kb, labels)
        .and_then(|data| data.iter().map(|(f, _)| model.predict(f)).collect())
        .map_err(|e| PipelineError::stage("predict", e))
}

fn scoring_section(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
    predicted: &[GraspDistribution],
) -> Result<ScoringSection, PipelineError> {
    let stage = |e| PipelineError::stage("scoring", e);
    let dataset = labeled_examples(kb, labels).map_err(stage)?;
    let schedule = TrainConfig {
        epochs: config.evaluation.loo_epochs,
        ..config.training.clone()
    };
    let held_out = leave_one_out(&dataset, &schedule).map_err(stage)?;
    Ok(ScoringSection {
        objects: labels.len(),
        feasibility: feasibility_score(labels, predicted).map_err(stage)?,
        match_rate: match_score(labels, predicted).map_err(stage)?,
        held_out_feasibility: feasibility_score(labels, &held_out).map_err(stage)?,
        held_out_match_rate: match_score(labels, &held_out).map_err(stage)?,
    })
}

fn ranking_section(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
) -> Result<Vec<FeatureRank>, PipelineError> {
    let stage = |e| PipelineError::stage("ranking", e);
    let dataset = labeled_examples(kb, labels).map_err(stage)?;
    let schedule = TrainConfig {
        epochs: config.evaluation.rfe_epochs,
        hidden: config.evaluation.rfe_hidden.clone(),
        ..config.training.clone()
    };
    rank_features(&dataset, &schedule).map_err(stage)
}

fn grasp_section(
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    labels: &[GraspLabel],
    predicted: &[GraspDistribution],
) -> Result<GraspSection, PipelineError> {
    let hand = load_hand(config)?;
    let steps = config.evaluation.plan_steps;
    let mut outcomes = Vec::with_capacity(labels.len());
    for (label, dist) in labels.iter().zip(predicted) {
        let record = kb.get(label.object_id).ok_or_else(|| {
            PipelineError::stage("grasps", format!("unknown object {}", label.object_id))
        })?;
        let predicted = select_grasp(dist);
        let modal = label.modal_class();
        let mut errors = Vec::new();
        let mut secured = |class: GraspClass| match hand.plan_and_simulate(class, record, steps) {
            Ok((_, report)) => report.secured,
            Err(e) => {
                errors.push(format!("{class}: {e}"));
                false
            }
        };
        let modal_secured = secured(modal);
        let predicted_secured = if predicted == modal {
            modal_secured
        } else {
            secured(predicted)
        };
        outcomes.push(GraspOutcome {
            object_id: record.id,
            label: record.label.clone(),
            predicted,
            modal,
            mismatch: predicted != modal,
            predicted_secured,
            modal_secured,
            errors,
        });
    }
    let n = outcomes.len().max(1) as f64;
    Ok(GraspSection {
        objects: outcomes.len(),
        modal_secured_rate: outcomes.iter().filter(|o| o.modal_secured).count() as f64 / n,
        predicted_secured_rate: outcomes.iter().filter(|o| o.predicted_secured).count() as f64 / n,
        mismatches: outcomes.iter().filter(|o| o.mismatch).count(),
        outcomes,
    })
}

/// Runs every section. Fails only on an unreadable config; missing or
/// broken fixtures become skipped sections (see [`EvalReport::is_complete`]).
pub fn evaluate_all(config: &PipelineConfig) -> EvalReport {
    let kb = load_kb(config);
    let labels = load_labels(config);
    let needs_kb = |r: &Result<KnowledgeBase, PipelineError>| -> Result<(), PipelineError> {
        match r {
            Ok(_) => Ok(()),
            Err(e) => Err(PipelineError::Input(format!(
                "knowledge base unavailable ({e})"
            ))),
        }
    };
    let with_labels = || -> Result<(&KnowledgeBase, &[GraspLabel]), PipelineError> {
        needs_kb(&kb)?;
        let labels = labels
            .as_ref()
            .map_err(|e| PipelineError::Input(format!("grasp labels unavailable ({e})")))?;
        Ok((kb.as_ref().expect("checked"), labels.as_slice()))
    };

    let recall = needs_kb(&kb).and_then(|_| recall_section(config, kb.as_ref().expect("checked")));
    let parser = needs_kb(&kb).and_then(|_| parser_section(config, kb.as_ref().expect("checked")));
    let predicted = with_labels().and_then(|(kb, labels)| {
        let model = load_model(config, kb, labels)?;
        predictions(&model, kb, labels)
    });
    let predicted_ok = || {
        predicted
            .as_ref()
            .map_err(|e| PipelineError::Input(format!("no predictions ({e})")))
    };
    let scoring =
        with_labels().and_then(|(kb, labels)| scoring_section(config, kb, labels, predicted_ok()?));
    let ranking = with_labels().and_then(|(kb, labels)| ranking_section(config, kb, labels));
    let grasps =
        with_labels().and_then(|(kb, labels)| grasp_section(config, kb, labels, predicted_ok()?));

    EvalReport {
        config: config.clone(),
        recall: Section::from_result(recall),
        parser: Section::from_result(parser),
        scoring: Section::from_result(scoring),
        ranking: Section::from_result(ranking),
        grasps: Section::from_result(grasps),
    }
}

fn skipped_line(out: &mut String, reason: &str) {
    let _ = writeln!(out, "  skipped: {reason}");
}

impl EvalReport {
    /// True when no section was skipped.
    pub fn is_complete(&self) -> bool {
        self.recall.ok().is_some()
            && self.parser.ok().is_some()
            && self.scoring.ok().is_some()
            && self.ranking.ok().is_some()
            && self.grasps.ok().is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {}  metric {}",
            self.config.seed, self.config.metric
        );

        let _ = writeln!(out, "\nretrieval recall (top-1)");
        match &self.recall {
            Section::Ok(rows) => {
                for r in rows {
                    let _ = writeln!(
                        out,
                        "  {:<14} {:>5}/{:<5} {:.3}",
                        r.metric.to_string(),
                        r.hits,
                        r.trials,
                        r.recall
                    );
                }
            }
            Section::Skipped(why) => skipped_line(&mut out, why),
        }

        let _ = writeln!(out, "\ndescription parser");
        match &self.parser {
            Section::Ok(s) => {
                let _ = writeln!(out, "  descriptions     {}", s.descriptions);
                let _ = writeln!(
                    out,
                    "  dimension R2     {:.4} ({} scored, {} missed)",
                    s.dimensions.r2, s.dimensions.scored, s.dimensions.missing
                );
                let _ = writeln!(
                    out,
                    "  mass R2          {:.4} ({} scored, {} missed)",
                    s.mass.r2, s.mass.scored, s.mass.missing
                );
                let _ = writeln!(out, "  material acc     {:.3}", s.material.accuracy());
                let _ = writeln!(out, "  shape acc        {:.3}", s.shape.accuracy());
                let _ = writeln!(out, "  rigidity acc     {:.3}", s.rigidity.accuracy());
            }
            Section::Skipped(why) => skipped_line(&mut out, why),
        }

        let _ = writeln!(out, "\ngrasp scoring");
        match &self.scoring {
            Section::Ok(s) => {
                let _ = writeln!(
                    out,
                    "  objects {}  F_l {:.3}  F_m {:.3}",
                    s.objects, s.feasibility, s.match_rate
                );
                let _ = writeln!(
                    out,
                    "  leave-one-out  F_l {:.3}  F_m {:.3}",
                    s.held_out_feasibility, s.held_out_match_rate
                );
            }
            Section::Skipped(why) => skipped_line(&mut out, why),
        }

        let _ = writeln!(out, "\nfeature ranking (most important first)");
        match &self.ranking {
            Section::Ok(rows) => {
                for (i, r) in rows.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  {:>2}. {:<10} {:+.4}",
                        i + 1,
                        r.attribute.name(),
                        r.importance
                    );
                }
            }
            Section::Skipped(why) => skipped_line(&mut out, why),
        }

        let _ = writeln!(out, "\nsimulated grasps");
        match &self.grasps {
            Section::Ok(g) => {
                let _ = writeln!(
                    out,
                    "  {:>4} {:<22} {:<8} {:<8} {:<9} {:<9}",
                    "id", "object", "pred", "modal", "pred ok", "modal ok"
                );
                for o in &g.outcomes {
                    let _ = writeln!(
                        out,
                        "  {:>4} {:<22} {:<8} {:<8} {:<9} {:<9}{}",
                        o.object_id,
                        o.label,
                        o.predicted.code(),
                        o.modal.code(),
                        if o.predicted_secured { "secured" } else { "-" },
                        if o.modal_secured { "secured" } else { "-" },
                        if o.mismatch { "  << mismatch" } else { "" },
                    );
                }
                let _ = writeln!(
                    out,
                    "  secured: modal {:.3}, predicted {:.3}; mismatches {}/{}",
                    g.modal_secured_rate, g.predicted_secured_rate, g.mismatches, g.objects
                );
            }
            Section::Skipped(why) => skipped_line(&mut out, why),
        }
        out
    }
}
