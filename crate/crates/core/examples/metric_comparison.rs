//! Top-1 recall of every retrieval metric on the shipped knowledge base,
//! with ±10% dimension/mass noise and one attribute dropped per query.
//!
//! ```bash
//! cargo run -p dexgrasp --example metric_comparison -- [trials] [seed]
//! ```

use dexgrasp::knowledge_base::{evaluate_recall, DropRule, KnowledgeBase, Metric, NoiseSpec};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    let kb = KnowledgeBase::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/kb.csv"))?;
    let spec = NoiseSpec {
        relative_noise: 0.1,
        drop: DropRule::Exactly(1),
    };
    println!("{} records, {trials} trials, seed {seed}", kb.len());
    for metric in Metric::comparison_set() {
        let report = evaluate_recall(&kb, &spec, metric, trials, seed)?;
        println!(
            "{:<12} {:>6.3}  ({}/{})",
            metric.to_string(),
            report.recall,
            report.hits,
            report.trials
        );
    }
    Ok(())
}
