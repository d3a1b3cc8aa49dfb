//! Scores the parser on the bundled description corpus: R² for dimensions
//! and mass, confusion matrices for material, shape and rigidity.
//!
//! ```bash
//! cargo run -p dexgrasp --example parser_accuracy
//! ```

use dexgrasp::knowledge_base::KnowledgeBase;
use dexgrasp::parser::{read_corpus, score_parser, ConfusionMatrix, Parser};

fn print_matrix(name: &str, m: &ConfusionMatrix) {
    println!("\n{name} (accuracy {:.2})", m.accuracy());
    print!("{:>12}", "");
    for l in &m.labels {
        print!("{:>11}", l);
    }
    println!();
    for (label, row) in m.labels.iter().zip(&m.counts) {
        print!("{label:>12}");
        for c in row {
            print!("{c:>11}");
        }
        println!();
    }
}

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let kb = KnowledgeBase::load(format!("{dir}/data/kb.csv"))?;
    let corpus = read_corpus(format!("{dir}/data/descriptions.jsonl"))?;
    let score = score_parser(&corpus, &kb, &Parser::default())?;

    println!(
        "{} descriptions, {} warnings",
        score.descriptions, score.warnings
    );
    let d = score.dimensions;
    let m = score.mass;
    println!(
        "dimensions R² {:.3} over {} values ({} not found)",
        d.r2, d.scored, d.missing
    );
    println!(
        "mass       R² {:.3} over {} values ({} not found)",
        m.r2, m.scored, m.missing
    );
    print_matrix("material", &score.material);
    print_matrix("shape", &score.shape);
    print_matrix("rigidity", &score.rigidity);
    Ok(())
}
