//! Decay of perturbations towards the periodic orbit.
//!
//! A compatible bump is added to `phi^(P)(0, .)` and the initial-boundary
//! value problem is run for `K` windows of length `T0 = L nu_max`. The
//! sup-distance to the periodic solution at `t = k T0` is fitted to
//! `d_k ~ C xi^k`.
//!
//! Distances to `phi^(P)` cannot fall below the discretisation error of the
//! time stepper, so points under `10x` the period-closure residual are left
//! out of the fit. The report also carries the distance to the trajectory
//! started exactly on `phi^(P)(0, .)` with the same time steps. The two
//! discretisation errors cancel in that difference, so it shows the decay
//! of the discrete dynamics below the floor.

use crate::boundary::BoundaryData;
use crate::error::{Error, Result};
use crate::field::PeriodicField;
use crate::fixed_point::{solve_periodic, Grid, SolveOptions, SolverReport};
use crate::friction::FrictionSpec;
use crate::ibvp::{make_compatible_perturbation, node_x, BoundaryMode, Ibvp, IbvpState, Trajectory};
use crate::model::GasParams;

/// Relative slack per window allowed by [`monotone_fraction`].
pub const MONOTONE_SLACK: f64 = 0.05;

/// Least-squares fit of `ln d_k = ln C + k ln xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub xi_hat: f64,
    /// `d_{k+1} / d_k` over the fitted points.
    pub ratios: Vec<f64>,
    /// Window indices that entered the fit.
    pub used: Vec<usize>,
}

/// Fits the leading run of entries strictly above `floor`. Once a distance
/// has reached the floor, later values are noise even if they cross back.
pub fn fit_decay(d: &[f64], floor: f64) -> Result<DecayFit> {
    let used: Vec<usize> = (0..d.len()).take_while(|&k| d[k] > floor && d[k].is_finite()).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} of {} distances above the noise floor {floor:e} (need 3)",
            used.len(),
            d.len()
        )));
    }
    let n = used.len() as f64;
    let mean_k = used.iter().map(|&k| k as f64).sum::<f64>() / n;
    let mean_y = used.iter().map(|&k| d[k].ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &k in &used {
        let dk = k as f64 - mean_k;
        sxy += dk * (d[k].ln() - mean_y);
        sxx += dk * dk;
    }
    let ratios = used.windows(2).map(|w| d[w[1]] / d[w[0]]).collect();
    Ok(DecayFit {
        xi_hat: (sxy / sxx).exp(),
        ratios,
        used,
    })
}

/// Fraction of consecutive pairs with `d_{k+1} <= (1 + 5%) d_k`.
pub fn monotone_fraction(d: &[f64]) -> f64 {
    if d.len() < 2 {
        return 1.0;
    }
    let ok = d.windows(2).filter(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK)).count();
    ok as f64 / (d.len() - 1) as f64
}

fn snapshot_at(traj: &Trajectory, t: f64) -> Result<&IbvpState> {
    traj.at_time(t, 1e-9 * t.max(1.0)).ok_or_else(|| {
        let end = traj.last().map_or(0.0, |s| s.t);
        Error::Precondition(format!("trajectory has no snapshot at t = {t} (covers up to {end})"))
    })
}

/// `d_k = max_x max_i |phi_i(k T0, x) - phi^(P)_i(k T0, x)|`, `k = 0..=windows`.
pub fn window_distances(traj: &Trajectory, phi_p: &PeriodicField, t0: f64, windows: usize) -> Result<Vec<f64>> {
    (0..=windows)
        .map(|k| {
            let t = k as f64 * t0;
            let s = snapshot_at(traj, t)?;
            let nx = s.nx();
            let mut d: f64 = 0.0;
            for (i, v) in s.values.iter().enumerate() {
                let x = node_x(i, nx, phi_p.length());
                d = d.max(v.dist(phi_p.interpolate(t, x)?));
            }
            Ok(d)
        })
        .collect()
}

/// Window distances between two trajectories on the same grid.
pub fn trajectory_distances(a: &Trajectory, b: &Trajectory, t0: f64, windows: usize) -> Result<Vec<f64>> {
    (0..=windows)
        .map(|k| {
            let t = k as f64 * t0;
            Ok(snapshot_at(a, t)?.sup_dist(snapshot_at(b, t)?))
        })
        .collect()
}

/// Setup shared by the stability and uniqueness experiments.
#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub params: GasParams,
    pub spec: FrictionSpec,
    pub bd: BoundaryData,
    pub grid: Grid,
    pub solve: SolveOptions,
    pub cfl: f64,
    /// Height `a` of the `a sin^2(pi x / L)` bump.
    pub amplitude: f64,
    pub windows: usize,
    pub mode: BoundaryMode,
}

impl StabilityConfig {
    /// Defaults: `K = 8` windows, `cfl = 0.9`, Dirichlet boundaries.
    pub fn new(params: GasParams, spec: FrictionSpec, bd: BoundaryData, grid: Grid, amplitude: f64) -> Self {
        Self {
            params,
            spec,
            bd,
            grid,
            solve: SolveOptions::default(),
            cfl: 0.9,
            amplitude,
            windows: 8,
            mode: BoundaryMode::Dirichlet,
        }
    }

    fn problem(&self) -> Ibvp<'_> {
        Ibvp::new(&self.bd, &self.spec, &self.params)
            .with_mode(self.mode)
            .with_cfl(self.cfl)
    }

    /// Step size shared by every run of one experiment. The speeds are
    /// bounded by the largest speed of `phi^(P)` over the whole period plus the
    /// largest shift a perturbation of size `amplitude` can cause.
    fn common_dt(&self, phi_p: &PeriodicField) -> f64 {
        let g = self.params.gamma;
        let shift = (0.5 * (g + 1.0)).abs() + (0.5 * (3.0 - g)).abs();
        let lmax = phi_p.subsonic(&self.params).lambda_max + shift * self.amplitude.abs();
        self.cfl * phi_p.h_x() / lmax
    }
}

/// `max |phi(P, .) - phi^(P)(0, .)|` for the run started on `phi^(P)(0, .)`.
pub fn closure_residual(prob: &Ibvp<'_>, phi_p: &PeriodicField) -> Result<f64> {
    let init = phi_p.row(0);
    let period = phi_p.period();
    let traj = prob.run(&init, period, period).map_err(|e| e.error)?;
    let last = traj.last().expect("a successful run ends with a snapshot");
    Ok(last.sup_dist(&IbvpState::new(period, init)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub t0_window: f64,
    pub amplitude: f64,
    /// `d_k` against `phi^(P)`, `k = 0..=K`.
    pub distances: Vec<f64>,
    pub closure_residual: f64,
    /// `10 x closure_residual`.
    pub noise_floor: f64,
    /// Fit of `distances` above `noise_floor`, or why there is none.
    pub fit: std::result::Result<DecayFit, String>,
    pub monotone_fraction: f64,
    /// `d_K / d_0`.
    pub final_ratio: f64,
    /// Zero perturbation: every distance is at the floor.
    pub trivial: bool,
    pub pass: bool,
    /// Distances to the run started on `phi^(P)(0, .)` with the same steps.
    pub orbit_distances: Vec<f64>,
    pub orbit_floor: f64,
    pub orbit_fit: std::result::Result<DecayFit, String>,
    pub max_c0: f64,
    pub steps: usize,
}

impl StabilityReport {
    pub fn xi_hat(&self) -> Option<f64> {
        self.fit.as_ref().ok().map(|f| f.xi_hat)
    }
}

/// Roundoff level of differences between two runs on the same time grid.
fn roundoff_floor(phi_p: &PeriodicField) -> f64 {
    10.0 * f64::EPSILON * phi_p.sup_norm().max(f64::MIN_POSITIVE)
}

/// Solves for `phi^(P)` and runs [`stability_from_solution`].
pub fn run_stability_experiment(cfg: &StabilityConfig) -> Result<StabilityReport> {
    let (phi_p, rep) = solve_periodic(&cfg.bd, &cfg.spec, &cfg.params, cfg.grid, cfg.solve)?;
    stability_from_solution(cfg, &phi_p, &rep)
}

/// The experiment against an already converged periodic solution.
pub fn stability_from_solution(cfg: &StabilityConfig, phi_p: &PeriodicField, rep: &SolverReport) -> Result<StabilityReport> {
    let t0 = rep.t0_window;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Precondition(format!("window length must be positive (got {t0})")));
    }
    let p = &cfg.params;
    let base = phi_p.row(0);
    let init = make_compatible_perturbation(&base, cfg.amplitude, p);
    let prob = cfg.problem().with_fixed_dt(cfg.common_dt(phi_p));
    let duration = cfg.windows as f64 * t0;

    let closure = closure_residual(&prob, phi_p)?;
    let traj = prob.run(&init, duration, t0).map_err(|e| e.error)?;
    let orbit = prob.run(&base, duration, t0).map_err(|e| e.error)?;

    let distances = window_distances(&traj, phi_p, t0, cfg.windows)?;
    let noise_floor = 10.0 * closure;
    let fit = fit_decay(&distances, noise_floor).map_err(|e| e.to_string());
    let orbit_distances = trajectory_distances(&traj, &orbit, t0, cfg.windows)?;
    let orbit_floor = roundoff_floor(phi_p);
    let orbit_fit = fit_decay(&orbit_distances, orbit_floor).map_err(|e| e.to_string());

    let monotone = monotone_fraction(&distances);
    let trivial = distances.iter().all(|&d| d <= noise_floor);
    let pass = trivial || (fit.as_ref().is_ok_and(|f| f.xi_hat < 1.0) && monotone >= 0.8);
    Ok(StabilityReport {
        t0_window: t0,
        amplitude: cfg.amplitude,
        final_ratio: distances[cfg.windows] / distances[0],
        distances,
        closure_residual: closure,
        noise_floor,
        fit,
        monotone_fraction: monotone,
        trivial,
        pass,
        orbit_distances,
        orbit_floor,
        orbit_fit,
        max_c0: traj.max_c0,
        steps: traj.steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    /// Sup-distance between the two perturbed runs at `k T0`.
    pub distances: Vec<f64>,
    pub floor: f64,
    pub fit: std::result::Result<DecayFit, String>,
    pub pass: bool,
}

/// Runs the bumps `+a` and `-a` with a common step and fits the decay of
/// their separation.
pub fn uniqueness_experiment(cfg: &StabilityConfig, phi_p: &PeriodicField, rep: &SolverReport) -> Result<UniquenessReport> {
    let t0 = rep.t0_window;
    let base = phi_p.row(0);
    let up = make_compatible_perturbation(&base, cfg.amplitude, &cfg.params);
    let down = make_compatible_perturbation(&base, -cfg.amplitude, &cfg.params);
    let prob = cfg.problem().with_fixed_dt(cfg.common_dt(phi_p));
    let duration = cfg.windows as f64 * t0;
    let a = prob.run(&up, duration, t0).map_err(|e| e.error)?;
    let b = prob.run(&down, duration, t0).map_err(|e| e.error)?;
    let distances = trajectory_distances(&a, &b, t0, cfg.windows)?;
    let floor = roundoff_floor(phi_p);
    let fit = fit_decay(&distances, floor).map_err(|e| e.to_string());
    let pass = fit.as_ref().is_ok_and(|f| f.xi_hat < 1.0);
    Ok(UniquenessReport {
        distances,
        floor,
        fit,
        pass,
    })
}
