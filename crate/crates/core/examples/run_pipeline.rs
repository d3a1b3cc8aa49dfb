//! The whole chain for one description: parse, retrieve, predict a grasp
//! class and plan it. Pass a description, or get the calculator default.
//!
//! ```bash
//! cargo run --release -p dexgrasp --example run_pipeline -- "tennis ball"
//! ```

use dexgrasp::parser::render;
use dexgrasp::pipeline::{run_pipeline, PipelineConfig, Resources};

const CALCULATOR: &str = "It is a calculator. It is 15.4 centimeters long, 7.9 centimeters wide \
                          and 1.5 centimeters thick. It weighs 116 grams and is made of plastic.";

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let description = std::env::args()
        .nth(1)
        .unwrap_or_else(|| CALCULATOR.to_string());
    // trains the classifier from the labels, a couple of seconds in release
    let res = Resources::load(PipelineConfig::load(format!("{dir}/data/config.toml"))?)?;
    let run = run_pipeline(&description, &res)?;

    println!("description: {description}");
    if let Some(p) = &run.parse {
        println!("parsed:      {}", render(&p.query));
    }
    println!(
        "retrieved:   #{} {} ({:?})",
        run.retrieval.record.id, run.retrieval.record.label, run.retrieval.mode
    );
    println!(
        "grasp class: {} (p = {:.3})",
        run.class,
        run.distribution.get(run.class)
    );
    match (&run.plan, &run.contact) {
        (Some(plan), Some(contact)) => println!(
            "plan:        d_o {:.2} cm, d_vf {:.3} cm, {} samples, secured {}",
            plan.d_o,
            plan.d_vf,
            plan.samples.len(),
            contact.secured
        ),
        _ => println!(
            "plan:        {}",
            run.plan_error.as_deref().unwrap_or("none")
        ),
    }
    Ok(())
}
