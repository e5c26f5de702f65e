//! An independent finite-volume solver of the conservative equations,
//! started from rest, settles onto the periodic solution.

use pipeflow::fvm::{self, ConsCells};
use pipeflow::refinement::ORACLE_SETTLE_WINDOWS;
use pipeflow::{solve_periodic, BoundaryData, FrictionSpec, GasParams, Grid, Perturbation, SolveOptions};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let bd = BoundaryData::single_mode(0.01, p.period);
    let spec = FrictionSpec::constant(0.5);

    for n in [64, 128] {
        let (phi_p, rep) = solve_periodic(&bd, &spec, &p, Grid::square(n), SolveOptions::default())?;
        let start = ConsCells::at_rest(n, &p);
        let mut cells = start.clone();
        let mut t = 0.0;
        println!("{n} cells, mass at rest {:.15}", start.mass());
        for _ in 0..(ORACLE_SETTLE_WINDOWS as usize) {
            cells = fvm::run(&cells, rep.t0_window, 0.9, &bd, &spec, &p)?;
            t += rep.t0_window;
            let nodes: Vec<Perturbation> = (0..phi_p.nx())
                .map(|k| phi_p.interpolate(t, phi_p.x(k)))
                .collect::<pipeflow::Result<_>>()?;
            let diff = fvm::compare_fields(&nodes, &cells, &p)?;
            println!(
                "  t = {t:.4}: L-inf {:.3e}  L2 {:.3e}  mass {:.15}",
                diff.linf_max(),
                diff.l2.iter().cloned().fold(0.0, f64::max),
                cells.mass()
            );
        }
    }
    Ok(())
}
