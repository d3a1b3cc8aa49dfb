//! Plans a precision grasp across the width of the calculator, prints
//! the contact stops and writes the joint trajectory as CSV.
//!
//! ```bash
//! cargo run -p dexgrasp --example plan_grasp -- /tmp/calculator_plan.csv
//! ```

use dexgrasp::hand::{write_plan_csv, HandModel};
use dexgrasp::knowledge_base::KnowledgeBase;
use dexgrasp::learner::GraspClass;

fn main() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let kb = KnowledgeBase::load(format!("{dir}/data/kb.csv"))?;
    let record = kb
        .find_label("calculator")
        .ok_or_else(|| anyhow::anyhow!("calculator missing from the knowledge base"))?;
    let hand = HandModel::builtin();
    let closure = hand.closure(GraspClass::RpB);
    println!(
        "rp.b closure model: d_vf = {:.4} * d_o + {:.4} (R2 {:.5})",
        closure.w1, closure.w0, closure.r2
    );

    let (plan, contact) = hand.plan_and_simulate(GraspClass::RpB, record, 25)?;
    println!(
        "d_o {:.2} cm -> target d_vf {:.3} cm at alpha* {:.4}",
        plan.d_o, plan.d_vf, plan.alpha_star
    );
    for c in &contact.contacts {
        println!("  {:<7} {:?}", c.finger.name(), c.stop_alpha);
    }
    println!("secured: {}", contact.secured);

    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("calculator_plan.csv")
            .display()
            .to_string()
    });
    write_plan_csv(&plan, std::fs::File::create(&out)?)?;
    println!(
        "trajectory ({} samples) written to {out}",
        plan.samples.len()
    );
    Ok(())
}
