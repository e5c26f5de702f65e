//! Perturbations of the periodic solution decay window by window.

use pipeflow::stability::{stability_from_solution, uniqueness_experiment, StabilityConfig};
use pipeflow::{solve_periodic, BoundaryData, FrictionSpec, GasParams, Grid};

fn main() -> pipeflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let eps = 0.01;
    let cfg = StabilityConfig::new(p, FrictionSpec::constant(0.5), BoundaryData::single_mode(eps, 1.0), Grid::square(n), eps / 2.0);
    let (phi_p, rep) = solve_periodic(&cfg.bd, &cfg.spec, &p, cfg.grid, cfg.solve)?;
    let st = stability_from_solution(&cfg, &phi_p, &rep)?;
    let un = uniqueness_experiment(&cfg, &phi_p, &rep)?;

    println!("T0 = {:.6}, closure residual {:.3e}, noise floor {:.3e}", st.t0_window, st.closure_residual, st.noise_floor);
    println!("  k   to phi_P      to the orbit   between +a, -a");
    for k in 0..st.distances.len() {
        println!(
            "  {k}   {:.3e}    {:.3e}      {:.3e}",
            st.distances[k], st.orbit_distances[k], un.distances[k]
        );
    }
    let show = |f: &Result<pipeflow::stability::DecayFit, String>| match f {
        Ok(f) => format!("{:.3e}", f.xi_hat),
        Err(e) => e.clone(),
    };
    println!("xi_hat against phi_P: {}", show(&st.fit));
    println!("xi_hat against the orbit: {}", show(&st.orbit_fit));
    println!("xi_hat between trajectories: {}", show(&un.fit));
    println!("monotone fraction {:.3}, d_K / d_0 {:.3e}, pass {}", st.monotone_fraction, st.final_ratio, st.pass);
    Ok(())
}
