//! The upwind scheme started on the periodic solution returns to its start
//! after one period, up to a first-order discretisation error.

use pipeflow::ibvp::make_compatible_perturbation;
use pipeflow::stability::closure_residual;
use pipeflow::{solve_periodic, BoundaryData, BoundaryMode, FrictionSpec, GasParams, Grid, Ibvp, Perturbation, SolveOptions};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let bd = BoundaryData::single_mode(0.01, p.period);
    let spec = FrictionSpec::constant(0.5);

    let mut prev: Option<f64> = None;
    for n in [33, 65, 129] {
        let (phi_p, _) = solve_periodic(&bd, &spec, &p, Grid::square(n), SolveOptions::default())?;
        let r = closure_residual(&Ibvp::new(&bd, &spec, &p), &phi_p)?;
        let ratio = prev.map_or(String::new(), |q| format!("  ratio {:.3}", r / q));
        println!("n = {n:3}: closure residual {r:.4e}{ratio}");
        prev = Some(r);
    }

    // a perturbed start, with snapshots every quarter period
    let (phi_p, rep) = solve_periodic(&bd, &spec, &p, Grid::square(65), SolveOptions::default())?;
    let init = make_compatible_perturbation(&phi_p.row(0), 0.005, &p);
    let traj = Ibvp::new(&bd, &spec, &p)
        .run(&init, 3.0 * p.period, 0.25)
        .map_err(|e| e.error)?;
    println!("perturbed run: {} steps, max |phi| {:.4e}, T0 = {:.4}", traj.steps, traj.max_c0, rep.t0_window);
    for s in &traj.snapshots {
        let exact: Vec<Perturbation> = (0..s.nx())
            .map(|k| phi_p.interpolate(s.t, phi_p.x(k)))
            .collect::<pipeflow::Result<_>>()?;
        let d = s.values.iter().zip(&exact).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
        println!("  t = {:.2}: distance to the periodic solution {d:.3e}", s.t);
    }

    // dissipative reflections at both ends
    let mode = BoundaryMode::reflective(0.3, -0.3)?;
    let rest = vec![Perturbation::ZERO; 65];
    let quiet = BoundaryData::zero();
    let traj = Ibvp::new(&quiet, &spec, &p).with_mode(mode).run(&rest, 1.0, 1.0).map_err(|e| e.error)?;
    println!("reflective ends, zero data, from rest: final max |phi| {:e}", traj.last().unwrap().sup_norm());
    Ok(())
}
