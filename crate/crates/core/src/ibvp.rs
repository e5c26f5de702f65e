//! Initial-boundary value problem for the perturbation system, advanced in
//! time with first-order upwinding on the diagonal form.
//!
//! `phi1` travels left (`lambda1 < 0`) and takes forward differences, `phi2`
//! travels right and takes backward differences. The speeds are frozen at the
//! current node for each step, and the source is added with a Heun
//! predictor-corrector. Each family needs boundary data only on its inflow
//! side: `phi2` at `x = 0` and `phi1` at `x = L`. The outgoing value at the
//! other end comes from the interior stencil.

use std::f64::consts::PI;

use crate::boundary::BoundaryData;
use crate::error::{Error, Result};
use crate::friction::FrictionSpec;
use crate::model::{signed_power, subsonic_check, GasParams, Perturbation, SpeedModel};

/// How the incoming invariants are closed at the pipe ends.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BoundaryMode {
    /// `phi2(t, 0) = phi_2b(t)`, `phi1(t, L) = phi_1b(t)`.
    #[default]
    Dirichlet,
    /// `phi2(t, 0) = phi_2b(t) + k1 phi1(t, 0)`,
    /// `phi1(t, L) = phi_1b(t) + k2 phi2(t, L)`.
    Reflective { k1: f64, k2: f64 },
}

impl BoundaryMode {
    /// Reflective closure; dissipative only for `|k1|, |k2| < 1`.
    pub fn reflective(k1: f64, k2: f64) -> Result<Self> {
        let mut bad = Vec::new();
        for (name, k) in [("K1", k1), ("K2", k2)] {
            if !(k.abs() < 1.0) {
                bad.push(format!("|{name}| < 1 required for a dissipative boundary (got {k})"));
            }
        }
        if bad.is_empty() {
            Ok(BoundaryMode::Reflective { k1, k2 })
        } else {
            Err(Error::Config(bad))
        }
    }

    fn left(&self, b: f64, phi1: f64) -> f64 {
        match *self {
            BoundaryMode::Reflective { k1, .. } if k1 != 0.0 => b + k1 * phi1,
            _ => b,
        }
    }

    fn right(&self, b: f64, phi2: f64) -> f64 {
        match *self {
            BoundaryMode::Reflective { k2, .. } if k2 != 0.0 => b + k2 * phi2,
            _ => b,
        }
    }
}

/// Solution at one instant on the nodes `x_k = k L / (nx - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IbvpState {
    pub t: f64,
    pub values: Vec<Perturbation>,
}

impl IbvpState {
    pub fn new(t: f64, values: Vec<Perturbation>) -> Self {
        Self { t, values }
    }

    pub fn nx(&self) -> usize {
        self.values.len()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    pub fn sup_dist(&self, other: &IbvpState) -> f64 {
        assert_eq!(self.nx(), other.nx(), "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max(a.dist(*b)))
    }
}

/// Node coordinate `x_k` on an `nx`-point grid over `[0, L]`.
pub fn node_x(k: usize, nx: usize, length: f64) -> f64 {
    if k + 1 == nx {
        length
    } else {
        k as f64 * length / (nx - 1) as f64
    }
}

/// Residuals of the corner compatibility conditions at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityReport {
    /// `phi1(0, L)` against its closure and `phi2(0, 0)` against its closure.
    pub order0: [f64; 2],
    /// Time derivative of the data plus transport minus source, at the same
    /// corners, with one-sided space differences of the initial data.
    pub order1: [f64; 2],
    /// Whether `order1` entered the verdict (Dirichlet mode only).
    pub order1_checked: bool,
    pub h_x: f64,
    pub pass: bool,
}

impl CompatibilityReport {
    pub fn max_order0(&self) -> f64 {
        self.order0[0].abs().max(self.order0[1].abs())
    }

    pub fn max_order1(&self) -> f64 {
        self.order1[0].abs().max(self.order1[1].abs())
    }
}

/// Checks that `init` and the boundary closure agree at the two corners.
///
/// Order 0 must hold to `1e-12`. Order 1 is tested against `10 h_x` in
/// Dirichlet mode and only reported in reflective mode.
pub fn check_compatibility(
    init: &[Perturbation],
    bd: &BoundaryData,
    mode: BoundaryMode,
    spec: &FrictionSpec,
    p: &GasParams,
) -> Result<CompatibilityReport> {
    let nx = init.len();
    if nx < 2 {
        return Err(Error::Precondition(format!("initial data needs at least 2 nodes (got {nx})")));
    }
    let h = p.length / (nx - 1) as f64;
    let speeds = SpeedModel::new(p);
    let (left, right) = (init[0], init[nx - 1]);

    let r1 = right.phi1 - mode.right(bd.phi1b(0.0, p.period), right.phi2);
    let r2 = left.phi2 - mode.left(bd.phi2b(0.0, p.period), left.phi1);

    let source = |v: Perturbation, x: f64| 0.5 * spec.value_at(0.0, x, p.period) * signed_power(v.phi1 + v.phi2, p.alpha);
    let d1 = (right.phi1 - init[nx - 2].phi1) / h;
    let d2 = (init[1].phi2 - left.phi2) / h;
    let s1 = bd.phi1b.derivative(0.0, p.period) + speeds.lambdas(right).0 * d1 - source(right, p.length);
    let s2 = bd.phi2b.derivative(0.0, p.period) + speeds.lambdas(left).1 * d2 - source(left, 0.0);

    let order1_checked = matches!(mode, BoundaryMode::Dirichlet);
    let ok0 = r1.abs() <= 1e-12 && r2.abs() <= 1e-12;
    let ok1 = s1.abs() <= 10.0 * h && s2.abs() <= 10.0 * h;
    Ok(CompatibilityReport {
        order0: [r1, r2],
        order1: [s1, s2],
        order1_checked,
        h_x: h,
        pass: ok0 && (ok1 || !order1_checked),
    })
}

/// `base + a sin^2(pi x / L)` in both components. The bump and its slope
/// vanish at the pipe ends, so the corner values are kept exactly.
pub fn make_compatible_perturbation(base: &[Perturbation], amplitude: f64, p: &GasParams) -> Vec<Perturbation> {
    let nx = base.len();
    base.iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 || k + 1 == nx || amplitude == 0.0 {
                return *v;
            }
            let s = (PI * node_x(k, nx, p.length) / p.length).sin();
            let bump = amplitude * s * s;
            Perturbation::new(v.phi1 + bump, v.phi2 + bump)
        })
        .collect()
}

/// The boundary value problem: data, closure, friction and gas.
#[derive(Debug, Clone, Copy)]
pub struct Ibvp<'a> {
    pub bd: &'a BoundaryData,
    pub mode: BoundaryMode,
    pub spec: &'a FrictionSpec,
    pub params: &'a GasParams,
    /// Courant number used for the step size, in `(0, 1]`.
    pub cfl: f64,
    /// Step size for every step of a run; `None` picks the CFL limit of the
    /// current state each step.
    pub fixed_dt: Option<f64>,
}

/// Snapshots of a run at `k * every`, plus the final time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub snapshots: Vec<IbvpState>,
    /// Largest `|phi_i|` over every time step taken.
    pub max_c0: f64,
    pub steps: usize,
}

impl Trajectory {
    /// Snapshot whose time is within `tol` of `t`.
    pub fn at_time(&self, t: f64, tol: f64) -> Option<&IbvpState> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= tol)
    }

    pub fn last(&self) -> Option<&IbvpState> {
        self.snapshots.last()
    }
}

/// A run that stopped early, with everything emitted before the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error} (run stopped after {} snapshots)", .partial.snapshots.len())]
pub struct RunError {
    pub partial: Trajectory,
    #[source]
    pub error: Error,
}

impl<'a> Ibvp<'a> {
    pub fn new(bd: &'a BoundaryData, spec: &'a FrictionSpec, params: &'a GasParams) -> Self {
        Self {
            bd,
            mode: BoundaryMode::Dirichlet,
            spec,
            params,
            cfl: 0.9,
            fixed_dt: None,
        }
    }

    pub fn with_mode(mut self, mode: BoundaryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    /// Uses the same `dt` for every step. Runs sharing `dt` share their time
    /// grid, so their difference carries no relative discretisation phase.
    pub fn with_fixed_dt(mut self, dt: f64) -> Self {
        self.fixed_dt = Some(dt);
        self
    }

    fn h_x(&self, nx: usize) -> f64 {
        self.params.length / (nx - 1) as f64
    }

    /// Largest admissible step for `s`: `cfl h_x / max |lambda_i|`.
    pub fn max_dt(&self, s: &IbvpState) -> f64 {
        let speeds = SpeedModel::new(self.params);
        let lmax = s.values.iter().fold(0.0f64, |acc, v| {
            let (l1, l2) = speeds.lambdas(*v);
            acc.max(l1.abs()).max(l2.abs())
        });
        self.cfl * self.h_x(s.nx()) / lmax
    }

    fn source(&self, v: Perturbation, t: f64, x: f64) -> f64 {
        0.5 * self.spec.value_at(t, x, self.params.period) * signed_power(v.phi1 + v.phi2, self.params.alpha)
    }

    /// Advances `s` by `dt`.
    pub fn step(&self, s: &IbvpState, dt: f64) -> Result<IbvpState> {
        let nx = s.nx();
        if nx < 3 {
            return Err(Error::Precondition(format!("need at least 3 nodes (got {nx})")));
        }
        let limit = self.max_dt(s);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, limit });
        }
        let p = self.params;
        let h = self.h_x(nx);
        let speeds = SpeedModel::new(p);
        let (t0, t1) = (s.t, s.t + dt);
        let r = dt / h;
        let with_source = !self.spec.is_zero();
        let u = &s.values;

        let mut out = Vec::with_capacity(nx);
        for k in 0..nx {
            let v = u[k];
            let (l1, l2) = speeds.lambdas(v);
            let phi1 = if k + 1 < nx { v.phi1 - r * l1 * (u[k + 1].phi1 - v.phi1) } else { v.phi1 };
            let phi2 = if k > 0 { v.phi2 - r * l2 * (v.phi2 - u[k - 1].phi2) } else { v.phi2 };
            let mut next = Perturbation::new(phi1, phi2);
            if with_source {
                let x = node_x(k, nx, p.length);
                let s0 = self.source(v, t0, x);
                let pred = Perturbation::new(phi1 + dt * s0, phi2 + dt * s0);
                let s1 = self.source(pred, t1, x);
                let inc = 0.5 * dt * (s0 + s1);
                next = Perturbation::new(phi1 + inc, phi2 + inc);
            }
            out.push(next);
        }
        out[0].phi2 = self.mode.left(self.bd.phi2b(t1, p.period), out[0].phi1);
        out[nx - 1].phi1 = self.mode.right(self.bd.phi1b(t1, p.period), out[nx - 1].phi2);

        let next = IbvpState::new(t1, out);
        self.admit(&next)?;
        Ok(next)
    }

    fn admit(&self, s: &IbvpState) -> Result<()> {
        let rep = subsonic_check(s.values.iter().copied(), self.params);
        if rep.pass {
            return Ok(());
        }
        let worst = s
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(k, v)| format!("node {k}: phi = ({:e}, {:e})", v.phi1, v.phi2))
            .unwrap_or_default();
        let detail = format!(
            "at t = {}: min -lambda1 = {:e}, min lambda2 = {:e}, sonic = {}; largest {worst}",
            s.t, rep.min_neg_lambda1, rep.min_lambda2, rep.sonic
        );
        if s.values.iter().all(|v| v.phi1.is_finite() && v.phi2.is_finite()) {
            Err(Error::Regime(detail))
        } else {
            Err(Error::Numeric(detail))
        }
    }

    /// Integrates from `init` at `t = 0` to `duration`, recording snapshots at
    /// every multiple of `every` and at `duration`. A snapshot time that falls
    /// inside a step is interpolated linearly between its two ends.
    ///
    /// Dirichlet runs require compatible data; reflective runs require order-0
    /// compatibility only.
    pub fn run(&self, init: &[Perturbation], duration: f64, every: f64) -> std::result::Result<Trajectory, RunError> {
        let mut traj = Trajectory::default();
        let fail = |traj: Trajectory, error| Err(RunError { partial: traj, error });
        if !(duration > 0.0) || !(every > 0.0) {
            return fail(
                traj,
                Error::Precondition(format!(
                    "duration and snapshot spacing must be positive (got {duration}, {every})"
                )),
            );
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return fail(traj, Error::Precondition(format!("cfl must lie in (0, 1] (got {})", self.cfl)));
        }
        let compat = match check_compatibility(init, self.bd, self.mode, self.spec, self.params) {
            Ok(c) => c,
            Err(e) => return fail(traj, e),
        };
        if !compat.pass {
            return fail(
                traj,
                Error::Precondition(format!(
                    "initial data incompatible with the boundary data: order-0 {:e}, order-1 {:e} (limit {:e})",
                    compat.max_order0(),
                    compat.max_order1(),
                    10.0 * compat.h_x
                )),
            );
        }

        let mut times: Vec<f64> = Vec::new();
        let mut i = 0usize;
        loop {
            let t = i as f64 * every;
            if t > duration * (1.0 + 1e-12) {
                break;
            }
            times.push(t.min(duration));
            i += 1;
        }
        if (times.last().copied().unwrap_or(-1.0) - duration).abs() > 1e-12 * duration {
            times.push(duration);
        }

        let mut state = IbvpState::new(0.0, init.to_vec());
        if let Err(e) = self.admit(&state) {
            return fail(traj, e);
        }
        traj.max_c0 = state.sup_norm();
        let mut pending = times.into_iter().peekable();
        if pending.peek() == Some(&0.0) {
            traj.snapshots.push(state.clone());
            pending.next();
        }
        while let Some(&target) = pending.peek() {
            let dt = self.fixed_dt.unwrap_or_else(|| self.max_dt(&state));
            let next = match self.step(&state, dt) {
                Ok(n) => n,
                Err(e) => return fail(traj, e),
            };
            traj.steps += 1;
            traj.max_c0 = traj.max_c0.max(next.sup_norm());
            let mut due = Some(target);
            while let Some(tau) = due {
                if tau > next.t {
                    break;
                }
                traj.snapshots.push(lerp_state(&state, &next, tau));
                pending.next();
                due = pending.peek().copied();
            }
            state = next;
        }
        Ok(traj)
    }
}

/// Linear interpolation in time between two consecutive states.
fn lerp_state(a: &IbvpState, b: &IbvpState, t: f64) -> IbvpState {
    let w = (t - a.t) / (b.t - a.t);
    if w >= 1.0 {
        return IbvpState::new(t, b.values.clone());
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| Perturbation::new(u.phi1 + w * (v.phi1 - u.phi1), u.phi2 + w * (v.phi2 - u.phi2)))
        .collect();
    IbvpState::new(t, values)
}
