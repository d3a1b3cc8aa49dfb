//! Extracts knowledge-base drafts from the saved product pages in
//! `data/pages` and prints them as CSV, with every value's source text.
//!
//! ```bash
//! cargo run -p dexgrasp --example ingest_pages
//! ```

use dexgrasp::knowledge_base::write_csv;
use dexgrasp::parser::Lexicon;
use dexgrasp::pipeline::ingest_pages;

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let report = ingest_pages(format!("{dir}/data/pages"), &Lexicon::builtin(), 1000)?;
    for e in &report.extractions {
        println!("{} <- {}", e.label, e.source.display());
        for v in &e.values {
            println!(
                "    {:<9} {:<14} from \"{}\"",
                v.attribute.name(),
                v.value,
                v.snippet
            );
        }
        for n in &e.notes {
            println!("    note: {n}");
        }
    }
    for s in &report.skipped {
        println!("skipped {}: {}", s.source.display(), s.reason);
    }
    println!();
    write_csv(std::io::stdout(), &report.drafts)?;
    Ok(())
}
