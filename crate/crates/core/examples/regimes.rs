//! Where the fixed-point iteration converges and which perturbation
//! amplitudes the upwind run survives, for the reference gas and friction.

use pipeflow::ibvp::make_compatible_perturbation;
use pipeflow::{solve_periodic, BoundaryData, FrictionSpec, GasParams, Grid, Ibvp, SolveOptions};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let spec = FrictionSpec::constant(0.5);
    let grid = Grid::square(64);

    println!("boundary amplitude eps -> fixed-point outcome (64x64)");
    for eps in [0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let bd = BoundaryData::single_mode(eps, p.period);
        match solve_periodic(&bd, &spec, &p, grid, SolveOptions::default()) {
            Ok((_, rep)) => println!(
                "  eps = {eps:<5} converged in {:2} sweeps, late kappa_hat {:.3e}, C0 {:.3e}",
                rep.iterations,
                rep.late_kappa().unwrap_or(0.0),
                rep.c0_norm
            ),
            Err(e) => println!("  eps = {eps:<5} {e}"),
        }
    }

    println!("perturbation height a -> upwind run over 4 periods (eps = 0.01, 65 nodes)");
    let bd = BoundaryData::single_mode(0.01, p.period);
    let (phi_p, _) = solve_periodic(&bd, &spec, &p, Grid::square(65), SolveOptions::default())?;
    for a in [0.01, 0.1, 0.3, 0.5, 0.7, 1.0] {
        let init = make_compatible_perturbation(&phi_p.row(0), a, &p);
        match Ibvp::new(&bd, &spec, &p).run(&init, 4.0, 1.0) {
            Ok(traj) => println!(
                "  a = {a:<4} ok, max |phi| {:.3e}, final max |phi| {:.3e}",
                traj.max_c0,
                traj.last().unwrap().sup_norm()
            ),
            Err(e) => println!("  a = {a:<4} stopped at t = {:.3}: {}", e.partial.snapshots.last().map_or(0.0, |s| s.t), e.error),
        }
    }
    Ok(())
}
