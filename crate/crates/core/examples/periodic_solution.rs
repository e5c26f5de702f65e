//! The time-periodic solution driven by periodic boundary data.
//!
//! `cargo run --release --example periodic_solution -- 128` picks the grid.

use std::time::Instant;

use pipeflow::{solve_periodic, BoundaryData, FrictionSpec, GasParams, Grid, SolveOptions};

fn main() -> pipeflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    let bd = BoundaryData::single_mode(0.01, p.period);
    let start = Instant::now();
    let (field, rep) = solve_periodic(&bd, &FrictionSpec::constant(0.5), &p, Grid::square(n), SolveOptions::default())?;
    println!("{n}x{n}: {} sweeps in {:.2?}", rep.iterations, start.elapsed());
    for (l, d) in rep.sup_diffs.iter().enumerate() {
        match l {
            0 => println!("  sweep {:2}  diff {d:.3e}", l + 1),
            _ => println!("  sweep {:2}  diff {d:.3e}  kappa_hat {:.3e}", l + 1, rep.kappa_hats[l - 1]),
        }
    }
    println!(
        "C0 {:.6e}  C1 {:.6e}  nu_max {:.6}  T0 {:.6}",
        rep.c0_norm, rep.c1_norm_fd, rep.nu_max, rep.t0_window
    );

    // the solution at the inlet follows phi_2b, at the outlet phi_1b
    for t in [0.0, 0.25, 0.5, 0.75] {
        let a = field.interpolate(t, 0.0)?;
        let b = field.interpolate(t, p.length)?;
        println!(
            "t = {t:.2}: phi2(t, 0) = {:+.6e} (data {:+.6e}), phi1(t, L) = {:+.6e} (data {:+.6e})",
            a.phi2,
            bd.phi2b(t, p.period),
            b.phi1,
            bd.phi1b(t, p.period)
        );
    }
    Ok(())
}
