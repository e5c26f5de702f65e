//! Friction coefficients and boundary data: evaluation and C1 checks.

use pipeflow::friction::{eval_beta, validate_beta};
use pipeflow::{BoundaryData, FrictionSpec, GasParams, TrigSeries, TrigTerm};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;

    let constant = FrictionSpec::constant(0.5);
    let rep = validate_beta(&constant, &p, 128)?;
    println!("constant 0.5: C1 sample {:.4}, claimed {:.4}, pass {}", rep.c1_sample, rep.c0_claimed, rep.pass);

    let series = FrictionSpec::trig_series(series_terms(), 0.7);
    let rep = validate_beta(&series, &p, 128)?;
    println!(
        "series: beta(0.25, 1) = {:.4}, |beta| <= {:.4}, |beta_t| <= {:.4}, |beta_x| <= {:.4}, periodicity residual {:e}, pass {}",
        eval_beta(&series, &p, 0.25, 1.0)?,
        rep.max_abs,
        rep.max_dt,
        rep.max_dx,
        rep.periodicity_residual,
        rep.pass
    );
    let tight = FrictionSpec::trig_series(series_terms(), 0.5);
    println!("same series with claimed bound 0.5: pass {}", validate_beta(&tight, &p, 128)?.pass);

    let bd = BoundaryData::single_mode(0.01, p.period);
    let rep = bd.validate(p.period, 4096);
    println!("single mode eps = 0.01: C1 sample {:.6}, pass {}", rep.c1_sample, rep.pass);

    let loud = BoundaryData {
        phi1b: TrigSeries::sine(0.01),
        phi2b: TrigSeries::default(),
        eps: 0.01,
    };
    let rep = loud.validate(p.period, 4096);
    println!("0.01 sin(2 pi t) against eps = 0.01: C1 sample {:.6}, pass {}", rep.c1_sample, rep.pass);
    Ok(())
}

/// `(0.4 + 0.2 x) + 0.05 sin(2 pi t)`
fn series_terms() -> Vec<TrigTerm> {
    vec![
        TrigTerm { harmonic: 0, cos: [0.4, 0.2, 0.0], sin: [0.0; 3] },
        TrigTerm { harmonic: 1, cos: [0.0; 3], sin: [0.05, 0.0, 0.0] },
    ]
}
