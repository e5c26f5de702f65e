//! Tracing characteristics through a background field and integrating the
//! friction source along them.

use std::f64::consts::TAU;

use pipeflow::tracer::{integrate_source_along, trace_characteristic, Family};
use pipeflow::{FrictionSpec, GasParams, Perturbation, PeriodicField};

fn main() -> pipeflow::Result<()> {
    let p = GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0)?;

    let rest = PeriodicField::zeros(64, 65, &p);
    for fam in [Family::First, Family::Second] {
        let path = trace_characteristic(fam, 0.5, 0.5, &rest, &p)?;
        let (a, b) = (path.start(), path.end());
        println!(
            "family {} through rest from (t, x) = ({}, {}) reaches x = {} at t = {:.12} (straight line: {:.12})",
            fam.index(),
            a.t,
            a.x,
            b.x,
            b.t,
            0.5 - 0.5 / p.c_bar()
        );
    }

    let wavy = PeriodicField::from_fn(64, 65, &p, |t, x| {
        Perturbation::new(0.05 * (TAU * t).sin(), 0.05 * (TAU * t).cos() * (1.0 - x))
    });
    let spec = FrictionSpec::constant(0.5);
    for fam in [Family::First, Family::Second] {
        let path = trace_characteristic(fam, 0.0, 0.3, &wavy, &p)?;
        let src = integrate_source_along(&path, &wavy, &spec, &p)?;
        println!(
            "family {} through a wavy field: {} samples, inflow reached at t = {:+.9}, source integral {:+.6e}",
            fam.index(),
            path.samples.len(),
            path.end().t,
            src
        );
    }
    Ok(())
}
