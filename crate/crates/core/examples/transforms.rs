//! Physical states, Riemann invariants and characteristic speeds.

use pipeflow::model::{eigenvalues, from_riemann, subsonic_check, to_riemann, PhysState};
use pipeflow::{GasParams, Perturbation};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;
    println!("baseline: c = {:.6}, m = {:.6}, n = {:.6}", p.c_bar(), p.m_bar(), p.n_bar());

    for s in [
        PhysState { rho: 1.0, u: 0.0 },
        PhysState { rho: 1.2, u: 0.3 },
        PhysState { rho: 0.5, u: -0.8 },
    ] {
        let r = to_riemann(s, &p)?;
        let back = from_riemann(r, &p)?;
        let ev = eigenvalues(r, &p)?;
        println!(
            "rho = {:.3} u = {:+.3}  ->  m = {:+.6} n = {:+.6}  ->  rho = {:.15} u = {:+.15}   lambda = ({:+.6}, {:+.6})",
            s.rho, s.u, r.m, r.n, back.rho, back.u, ev.lambda1, ev.lambda2
        );
    }

    // a perturbation is measured from the baseline invariants
    let phi = Perturbation::new(0.01, -0.02);
    let s = from_riemann(phi.to_riemann(&p), &p)?;
    println!("phi = (0.01, -0.02) is rho = {:.6}, u = {:+.6}", s.rho, s.u);

    let sub = subsonic_check([phi, Perturbation::new(0.5, 0.5), Perturbation::new(2.0, 2.0)], &p);
    println!(
        "subsonic check over 3 states: pass = {}, min -lambda1 = {:+.4}, min lambda2 = {:+.4}",
        sub.pass, sub.min_neg_lambda1, sub.min_lambda2
    );
    Ok(())
}
