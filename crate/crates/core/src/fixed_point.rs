//! Time-periodic solution by iterating linearised boundary value problems.
//!
//! Starting from `phi^(0) = 0`, each sweep freezes the previous iterate in
//! the characteristic speeds and the source, and solves the two decoupled
//! transport problems exactly along characteristics: every grid node is
//! traced back to the inflow boundary of each family, where the periodic
//! boundary data is read off, and the source is integrated along the way.
//! Sweeps repeat until successive iterates agree in the discrete C0 norm.

use rayon::prelude::*;

use crate::boundary::BoundaryData;
use crate::error::{Error, Result};
use crate::field::PeriodicField;
use crate::friction::FrictionSpec;
use crate::model::{GasParams, Perturbation, SubsonicReport};
use crate::tracer::{source_density, ColumnTables, Family, SourceIntegral};

/// Space-time grid size for the periodic problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub nt: usize,
    pub nx: usize,
}

impl Grid {
    pub fn new(nt: usize, nx: usize) -> Self {
        Self { nt, nx }
    }

    pub fn square(n: usize) -> Self {
        Self { nt: n, nx: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// `max |phi^(l) - phi^(l-1)|` for `l = 1..=iterations`.
    pub sup_diffs: Vec<f64>,
    /// `sup_diffs[l] / sup_diffs[l - 1]` for `l >= 2`.
    pub kappa_hats: Vec<f64>,
    pub c0_norm: f64,
    pub c1_norm_fd: f64,
    pub nu_max: f64,
    /// Longest transit time `L * nu_max`.
    pub t0_window: f64,
    pub converged: bool,
    pub subsonic: Option<SubsonicReport>,
}

impl SolverReport {
    fn new() -> Self {
        Self {
            iterations: 0,
            sup_diffs: Vec::new(),
            kappa_hats: Vec::new(),
            c0_norm: 0.0,
            c1_norm_fd: 0.0,
            nu_max: f64::NAN,
            t0_window: f64::NAN,
            converged: false,
            subsonic: None,
        }
    }

    /// Ratio of the last two successive differences, if any.
    pub fn late_kappa(&self) -> Option<f64> {
        self.kappa_hats.last().copied()
    }

    fn record(&mut self, diff: f64) {
        if let Some(&last) = self.sup_diffs.last() {
            self.kappa_hats.push(diff / last);
        }
        self.sup_diffs.push(diff);
        self.iterations = self.sup_diffs.len();
    }

    fn finish(&mut self, field: &PeriodicField, p: &GasParams) {
        let sub = field.subsonic(p);
        self.c0_norm = field.sup_norm();
        self.c1_norm_fd = c1_norm_estimate(field);
        self.nu_max = sub.nu_max;
        self.t0_window = p.length * sub.nu_max;
        self.subsonic = Some(sub);
    }
}

/// One linearised solve: the frozen background `prev` supplies speeds and the
/// source, and the result is exactly `P`-periodic because every node time is
/// wrapped before it is used.
pub fn linearized_sweep(
    prev: &PeriodicField,
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
) -> Result<PeriodicField> {
    let sub = prev.subsonic(p);
    if !sub.pass {
        return Err(Error::Regime(format!(
            "background field is not subsonic (min -lambda1 = {:e}, min lambda2 = {:e})",
            sub.min_neg_lambda1, sub.min_lambda2
        )));
    }
    let (nt, nx) = (prev.nt(), prev.nx());
    let with_source = !spec.is_zero();
    let tables = ColumnTables::new(prev, p);
    let mut data = vec![Perturbation::ZERO; nt * nx];
    data.par_chunks_mut(nx)
        .enumerate()
        .try_for_each(|(j, row)| -> Result<()> {
            let t0 = prev.t(j);
            for (k, node) in row.iter_mut().enumerate() {
                let x0 = prev.x(k);
                let mut values = [0.0; 2];
                for (slot, family) in [Family::First, Family::Second].into_iter().enumerate() {
                    let mut acc = SourceIntegral::default();
                    let t_end = tables.march_from_node(family, j, k, |v| {
                        if with_source {
                            acc.push(v.x, source_density(&v, spec, p));
                        }
                    })
                    .map_err(|e| match e {
                        Error::Sonic(msg) => Error::Regime(format!(
                            "family {} trace from (t = {t0}, x = {x0}): {msg}",
                            family.index()
                        )),
                        other => other,
                    })?;
                    let boundary = match family {
                        Family::First => bd.phi1b(t_end, p.period),
                        Family::Second => bd.phi2b(t_end, p.period),
                    };
                    values[slot] = if with_source { boundary + acc.value() } else { boundary };
                }
                *node = Perturbation::new(values[0], values[1]);
            }
            Ok(())
        })?;
    Ok(PeriodicField::from_data(nt, nx, p, data))
}

/// Iterates [`linearized_sweep`] from the zero field until two successive
/// iterates differ by at most `opts.tol`.
pub fn solve_periodic(
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
    grid: Grid,
    opts: SolveOptions,
) -> Result<(PeriodicField, SolverReport)> {
    if grid.nt < 16 || grid.nx < 16 {
        return Err(Error::Precondition(format!(
            "grid must be at least 16 x 16 (got {} x {})",
            grid.nt, grid.nx
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive (got {})", opts.tol)));
    }
    let mut report = SolverReport::new();
    let mut current = PeriodicField::zeros(grid.nt, grid.nx, p);
    for _ in 0..opts.max_iter {
        let next = linearized_sweep(&current, bd, spec, p)?;
        let diff = next.sup_dist(&current);
        report.record(diff);
        current = next;
        if !diff.is_finite() {
            return Err(Error::Numeric(format!(
                "iterate difference became {diff} at sweep {}",
                report.iterations
            )));
        }
        if diff <= opts.tol {
            report.converged = true;
            break;
        }
    }
    report.finish(&current, p);
    if !report.converged {
        return Err(Error::NonConvergence(Box::new(report)));
    }
    let sub = report.subsonic.expect("finish records the subsonic scan");
    if !sub.pass {
        return Err(Error::Regime(format!(
            "converged field leaves the subsonic region (min -lambda1 = {:e}, min lambda2 = {:e})",
            sub.min_neg_lambda1, sub.min_lambda2
        )));
    }
    Ok((current, report))
}

/// Discrete C1 norm: the largest of `|phi_i|`, the central time difference
/// (periodic) and the space difference (one-sided at the pipe ends).
pub fn c1_norm_estimate(f: &PeriodicField) -> f64 {
    let (nt, nx) = (f.nt(), f.nx());
    let (ht, hx) = (f.h_t(), f.h_x());
    let mut norm: f64 = 0.0;
    for j in 0..nt {
        for k in 0..nx {
            let v = f.at(j, k);
            let dt = {
                let a = f.at(j + 1, k);
                let b = f.at(j + nt - 1, k);
                [(a.phi1 - b.phi1) / (2.0 * ht), (a.phi2 - b.phi2) / (2.0 * ht)]
            };
            let dx = {
                let (a, b, scale) = if k == 0 {
                    (f.at(j, 1), v, hx)
                } else if k + 1 == nx {
                    (v, f.at(j, k - 1), hx)
                } else {
                    (f.at(j, k + 1), f.at(j, k - 1), 2.0 * hx)
                };
                [(a.phi1 - b.phi1) / scale, (a.phi2 - b.phi2) / scale]
            };
            norm = norm
                .max(v.norm())
                .max(dt[0].abs())
                .max(dt[1].abs())
                .max(dx[0].abs())
                .max(dx[1].abs());
        }
    }
    norm
}
