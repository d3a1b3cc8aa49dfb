//! Ranks the nine object attributes by how much the training loss rises
//! when each is withheld from the grasp classifier.
//!
//! ```bash
//! cargo run --release -p dexgrasp --example rank_features
//! ```

use dexgrasp::knowledge_base::KnowledgeBase;
use dexgrasp::learner::{labeled_examples, rank_features, read_labels, TrainConfig};

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let kb = KnowledgeBase::load(format!("{dir}/data/kb.csv"))?;
    let labels = read_labels(format!("{dir}/data/grasp_labels.csv"))?;
    let examples = labeled_examples(&kb, &labels)?;

    // a smaller network and shorter schedule keep the ~50 retrainings quick
    let config = TrainConfig {
        epochs: 200,
        hidden: vec![16],
        ..TrainConfig::default()
    };
    let ranking = rank_features(&examples, &config)?;
    println!("{:<5} {:<10} {:>10}", "rank", "attribute", "importance");
    for (i, r) in ranking.iter().enumerate() {
        println!(
            "{:<5} {:<10} {:>10.4}",
            i + 1,
            r.attribute.name(),
            r.importance
        );
    }
    Ok(())
}
