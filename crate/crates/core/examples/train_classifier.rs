//! Trains the grasp classifier on the labeled fixture objects and reports
//! resubstitution feasibility and match scores.
//!
//! ```bash
//! cargo run --release -p dexgrasp --example train_classifier
//! ```

use std::time::Instant;

use dexgrasp::knowledge_base::KnowledgeBase;
use dexgrasp::learner::{
    feasibility_score, labeled_examples, match_score, read_labels, select_grasp, train, TrainConfig,
};

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let kb = KnowledgeBase::load(format!("{dir}/data/kb.csv"))?;
    let labels = read_labels(format!("{dir}/data/grasp_labels.csv"))?;
    let examples = labeled_examples(&kb, &labels)?;

    let start = Instant::now();
    let outcome = train(&examples, &TrainConfig::default())?;
    let elapsed = start.elapsed();
    let h = &outcome.loss_history;
    println!(
        "{} objects, loss {:.3} -> {:.3} in {:.2?}",
        examples.len(),
        h[0],
        h[h.len() - 1],
        elapsed
    );

    let preds = examples
        .iter()
        .map(|(f, _)| outcome.model.predict(f))
        .collect::<Result<Vec<_>, _>>()?;
    for ((_, l), p) in examples.iter().zip(&preds).take(10) {
        let name = kb.get(l.object_id).map_or("?", |r| r.label.as_str());
        println!(
            "{:>4} {:<20} predicted {:<7} human modal {}",
            l.object_id,
            name,
            select_grasp(p).to_string(),
            l.modal_class()
        );
    }
    println!("F_l = {:.3}", feasibility_score(&labels, &preds)?);
    println!("F_m = {:.3}", match_score(&labels, &preds)?);
    Ok(())
}
