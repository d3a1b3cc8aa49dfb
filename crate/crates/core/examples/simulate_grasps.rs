//! Plans the most common human grasp for every labeled object and closes
//! the simulated hand on a box or sphere of the object's size.
//!
//! ```bash
//! cargo run -p dexgrasp --example simulate_grasps
//! ```

use dexgrasp::hand::HandModel;
use dexgrasp::knowledge_base::KnowledgeBase;
use dexgrasp::learner::read_labels;

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let kb = KnowledgeBase::load(format!("{dir}/data/kb.csv"))?;
    let labels = read_labels(format!("{dir}/data/grasp_labels.csv"))?;
    let hand = HandModel::builtin();

    let mut secured = 0;
    for label in &labels {
        let record = kb
            .get(label.object_id)
            .ok_or_else(|| anyhow::anyhow!("object {} missing", label.object_id))?;
        let class = label.modal_class();
        match hand.plan_and_simulate(class, record, 50) {
            Ok((plan, report)) => {
                secured += usize::from(report.secured);
                let stops: Vec<String> = report
                    .contacts
                    .iter()
                    .map(|c| match c.stop_alpha {
                        Some(a) => format!("{}@{a:.3}", c.finger),
                        None => format!("{}:-", c.finger),
                    })
                    .collect();
                println!(
                    "{:<22} {:<7} d_o {:>5.2} alpha* {:.3} {} [{}]",
                    record.label,
                    class.to_string(),
                    plan.d_o,
                    plan.alpha_star,
                    if report.secured { "secured" } else { "LOOSE" },
                    stops.join(" ")
                );
            }
            Err(e) => println!(
                "{:<22} {:<7} not planned: {e}",
                record.label,
                class.to_string()
            ),
        }
    }
    println!(
        "secured {secured}/{} ({:.2})",
        labels.len(),
        secured as f64 / labels.len() as f64
    );
    Ok(())
}
