//! Grid refinement study: period-closure residual of the upwind scheme and
//! the disagreement with the finite-volume solver, on a ladder of grids.

use crate::boundary::BoundaryData;
use crate::error::Result;
use crate::field::PeriodicField;
use crate::fixed_point::{solve_periodic, Grid, SolveOptions, SolverReport};
use crate::friction::FrictionSpec;
use crate::fvm::{self, ConsCells};
use crate::ibvp::{node_x, Ibvp};
use crate::model::{GasParams, Perturbation};
use crate::stability::closure_residual;

/// Settling time of the finite-volume run, in windows `T0`.
pub const ORACLE_SETTLE_WINDOWS: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRow {
    /// Grid points per direction: `n x n` for the periodic solve, `n` nodes
    /// for the upwind run and `n` cells for the finite-volume run.
    pub n: usize,
    pub sweeps: usize,
    pub t0_window: f64,
    pub closure: f64,
    /// Sup-distance to the finite-volume solution after the settling time.
    pub oracle: f64,
    /// `log2` of the error ratio to the previous, coarser row.
    pub closure_order: Option<f64>,
    pub oracle_order: Option<f64>,
}

/// Observed order between two errors whose grids differ by `ratio`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

/// Closure residual of the upwind run started on `phi^(P)(0, .)`, with the
/// step picked from the CFL limit of each state.
pub fn closure_for(phi_p: &PeriodicField, bd: &BoundaryData, spec: &FrictionSpec, p: &GasParams, cfl: f64) -> Result<f64> {
    closure_residual(&Ibvp::new(bd, spec, p).with_cfl(cfl), phi_p)
}

/// Starts the finite-volume solver from rest with `n` cells, runs it for
/// `settle` and measures the sup-distance to `phi^(P)(settle, .)`.
pub fn oracle_discrepancy(
    phi_p: &PeriodicField,
    n: usize,
    settle: f64,
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
    cfl: f64,
) -> Result<fvm::FieldDiff> {
    let cells = fvm::run(&ConsCells::at_rest(n, p), settle, cfl, bd, spec, p)?;
    let nx = phi_p.nx();
    let nodes: Vec<Perturbation> = (0..nx)
        .map(|k| phi_p.interpolate(settle, node_x(k, nx, p.length)))
        .collect::<Result<_>>()?;
    fvm::compare_fields(&nodes, &cells, p)
}

/// One rung from an already solved field.
pub fn rung(
    phi_p: &PeriodicField,
    rep: &SolverReport,
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
    cfl: f64,
) -> Result<RefinementRow> {
    let n = phi_p.nx();
    let closure = closure_for(phi_p, bd, spec, p, cfl)?;
    let settle = ORACLE_SETTLE_WINDOWS * rep.t0_window;
    let oracle = oracle_discrepancy(phi_p, n, settle, bd, spec, p, cfl)?.linf_max();
    Ok(RefinementRow {
        n,
        sweeps: rep.iterations,
        t0_window: rep.t0_window,
        closure,
        oracle,
        closure_order: None,
        oracle_order: None,
    })
}

/// Fills in the observed orders between consecutive rows.
pub fn attach_orders(rows: &mut [RefinementRow]) {
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        // node spacing L / (n - 1), cell width L / n
        let node_ratio = (b.n - 1) as f64 / (a.n - 1) as f64;
        let cell_ratio = b.n as f64 / a.n as f64;
        let closure = observed_order(a.closure, b.closure, node_ratio);
        let oracle = observed_order(a.oracle, b.oracle, cell_ratio);
        rows[i].closure_order = Some(closure);
        rows[i].oracle_order = Some(oracle);
    }
}

/// Solves and measures every grid of `ladder`, coarse to fine.
pub fn refinement_study(
    ladder: &[usize],
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
    opts: SolveOptions,
    cfl: f64,
) -> Result<Vec<RefinementRow>> {
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let (phi_p, rep) = solve_periodic(bd, spec, p, Grid::square(n), opts)?;
        rows.push(rung(&phi_p, &rep, bd, spec, p, cfl)?);
    }
    attach_orders(&mut rows);
    Ok(rows)
}
