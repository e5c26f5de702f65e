//! Grid refinement: closure residual and finite-volume disagreement.

use pipeflow::refinement::refinement_study;
use pipeflow::{BoundaryData, FrictionSpec, GasParams, SolveOptions};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let rows = refinement_study(
        &[32, 64, 128],
        &BoundaryData::single_mode(0.01, p.period),
        &FrictionSpec::constant(0.5),
        &p,
        SolveOptions::default(),
        0.9,
    )?;
    println!("{:>5} {:>7} {:>12} {:>7} {:>12} {:>7}", "n", "sweeps", "closure", "order", "oracle", "order");
    for r in &rows {
        let o = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.3}"));
        println!(
            "{:>5} {:>7} {:>12.4e} {:>7} {:>12.4e} {:>7}",
            r.n,
            r.sweeps,
            r.closure,
            o(r.closure_order),
            r.oracle,
            o(r.oracle_order)
        );
    }
    Ok(())
}
