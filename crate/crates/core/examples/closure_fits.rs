//! Fits the linear virtual-finger model for every grasp class and prints
//! slope, offset, R² and the object sizes each class can hold.
//!
//! ```bash
//! cargo run -p dexgrasp --example closure_fits
//! ```

use dexgrasp::hand::{fit_closure_model, HandGeometry, TopologyTable};

fn main() -> anyhow::Result<()> {
    let geometry = HandGeometry::builtin();
    let table = TopologyTable::builtin();
    println!(
        "{:<7} {:>7} {:>7} {:>8} {:>14} {:>12}",
        "class", "w1", "w0", "R²", "d_o range", "alpha range"
    );
    for t in &table.topologies {
        let m = fit_closure_model(t, &geometry, 50)?;
        println!(
            "{:<7} {:>7.3} {:>7.3} {:>8.5} {:>6.2}..{:<6.2} {:>5.2}..{:<5.2}",
            m.class.to_string(),
            m.w1,
            m.w0,
            m.r2,
            m.d_o_range[0],
            m.d_o_range[1],
            m.alpha_range[0],
            m.alpha_range[1]
        );
    }
    Ok(())
}
