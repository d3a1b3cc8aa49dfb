//! Parses a free-text object description into a partial query, imputes
//! missing dimensions from the knowledge base and shows the nearest objects.
//!
//! ```bash
//! cargo run -p dexgrasp --example parse_description -- "a rubber ball about 6 cm across"
//! ```

use dexgrasp::knowledge_base::{KnowledgeBase, Metric};
use dexgrasp::parser::{render, Parser};

const DEFAULT: &str = "The object is about fifteen and half centimeters long, 8 centimeters \
    wide and more than one and half centimeters thick. It appears to be made of plastic.";

fn main() -> anyhow::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| DEFAULT.to_string());
    let kb = KnowledgeBase::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/kb.csv"))?;
    let parser = Parser::default();

    let tokens = dexgrasp::parser::tokenize_and_tag(&text)?;
    for chunk in parser.chunks(&tokens) {
        let tags: Vec<String> = chunk
            .tokens
            .iter()
            .map(|t| format!("{}/{}", t.lemma, t.tag))
            .collect();
        println!("{:?}: {}", chunk.kind, tags.join(" "));
    }

    let parsed = parser.parse_with(&text, &kb)?;
    println!("\n{}", serde_json::to_string_pretty(&parsed)?);
    println!("\ncanonical: {}", render(&parsed.query));

    for n in kb.retrieve(&parsed.query, Metric::Jpd, 3)? {
        println!("{:>8.3}  {}", n.distance, n.record.label);
    }
    Ok(())
}
