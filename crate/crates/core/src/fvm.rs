//! Finite-volume reference solver on the conservative form
//!
//! ```text
//! rho_t + (rho u)_x = 0
//! (rho u)_t + (rho u^2 + rho^gamma)_x = beta rho |u|^alpha u
//! ```
//!
//! with the Rusanov (local Lax-Friedrichs) flux. It shares only [`GasParams`],
//! [`FrictionSpec`] and [`BoundaryData`] with the characteristic solvers. The
//! invariant transforms used for ghost cells and comparisons are written
//! out again here, so a slip in one path shows up against the other.

use crate::boundary::BoundaryData;
use crate::error::{Error, Result};
use crate::friction::FrictionSpec;
use crate::model::{GasParams, Perturbation};

/// Cell averages of `rho` and `rho u` on `n` equal cells over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsCells {
    pub t: f64,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub length: f64,
}

impl ConsCells {
    pub fn uniform(n: usize, rho: f64, u: f64, length: f64) -> Self {
        Self {
            t: 0.0,
            rho: vec![rho; n],
            mom: vec![rho * u; n],
            length,
        }
    }

    /// The quiescent state `(rho_bar, 0)`.
    pub fn at_rest(n: usize, p: &GasParams) -> Self {
        Self::uniform(n, p.rho_bar, 0.0, p.length)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.length / self.len() as f64
    }

    /// Centre of cell `i`.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    pub fn velocity(&self, i: usize) -> f64 {
        self.mom[i] / self.rho[i]
    }

    /// `h * sum rho`.
    pub fn mass(&self) -> f64 {
        self.h() * self.rho.iter().sum::<f64>()
    }
}

fn sound_speed(rho: f64, gamma: f64) -> f64 {
    (gamma * rho.powf(gamma - 1.0)).sqrt()
}

/// `(rho, u) -> (m, n)` with `w = 2c / (gamma - 1)`: `m = (u - w) / 2`,
/// `n = (u + w) / 2`.
fn invariants(rho: f64, u: f64, gamma: f64) -> (f64, f64) {
    let w = 2.0 * sound_speed(rho, gamma) / (gamma - 1.0);
    (0.5 * (u - w), 0.5 * (u + w))
}

/// Inverse of [`invariants`]: `u = m + n`, `c = (gamma - 1)(n - m) / 2`,
/// `rho = (c^2 / gamma)^(1 / (gamma - 1))`.
fn primitives(m: f64, n: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(n > m) {
        return Err(Error::Regime(format!("ghost state with n <= m (m = {m}, n = {n})")));
    }
    let c = 0.5 * (gamma - 1.0) * (n - m);
    Ok(((c * c / gamma).powf(1.0 / (gamma - 1.0)), m + n))
}

/// Physical flux `(rho u, rho u^2 + rho^gamma)`.
pub fn conservative_flux(rho: f64, u: f64, p: &GasParams) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("density must be positive (got {rho})")));
    }
    Ok((rho * u, rho * u * u + rho.powf(p.gamma)))
}

fn rusanov(l: (f64, f64), r: (f64, f64), p: &GasParams) -> Result<(f64, f64)> {
    let (ul, ur) = (l.1 / l.0, r.1 / r.0);
    let fl = conservative_flux(l.0, ul, p)?;
    let fr = conservative_flux(r.0, ur, p)?;
    let a = (ul.abs() + sound_speed(l.0, p.gamma)).max(ur.abs() + sound_speed(r.0, p.gamma));
    Ok((
        0.5 * (fl.0 + fr.0) - 0.5 * a * (r.0 - l.0),
        0.5 * (fl.1 + fr.1) - 0.5 * a * (r.1 - l.1),
    ))
}

/// Ghost states at time `t`: incoming invariant from the data, outgoing one
/// copied from the adjacent interior cell.
fn ghosts(c: &ConsCells, t: f64, bd: &BoundaryData, p: &GasParams) -> Result<[(f64, f64); 2]> {
    let g = p.gamma;
    let w_bar = 2.0 * sound_speed(p.rho_bar, g) / (g - 1.0);
    let (m_bar, n_bar) = (-0.5 * w_bar, 0.5 * w_bar);

    let ghost = |i: usize, m: f64, n: f64, (m_in, n_in): (f64, f64)| -> Result<(f64, f64)> {
        // no jump across the wall: the ghost is the interior cell itself
        if (m, n) == (m_in, n_in) {
            return Ok((c.rho[i], c.mom[i]));
        }
        let (r, u) = primitives(m_in, n_in, g)?;
        Ok((r, r * u))
    };
    let (m0, n0) = invariants(c.rho[0], c.velocity(0), g);
    let left = ghost(0, m0, n0, (m0, n_bar + bd.phi2b(t, p.period)))?;
    let last = c.len() - 1;
    let (m1, n1) = invariants(c.rho[last], c.velocity(last), g);
    let right = ghost(last, m1, n1, (m_bar + bd.phi1b(t, p.period), n1))?;
    Ok([left, right])
}

/// Numerical fluxes at the `n + 1` cell interfaces, boundaries included.
pub fn interface_fluxes(c: &ConsCells, bd: &BoundaryData, p: &GasParams) -> Result<Vec<(f64, f64)>> {
    let n = c.len();
    let [left, right] = ghosts(c, c.t, bd, p)?;
    let state = |i: usize| (c.rho[i], c.mom[i]);
    let mut f = Vec::with_capacity(n + 1);
    f.push(rusanov(left, state(0), p)?);
    for i in 1..n {
        f.push(rusanov(state(i - 1), state(i), p)?);
    }
    f.push(rusanov(state(n - 1), right, p)?);
    Ok(f)
}

/// `cfl * h / max(|u| + c)` over the cells.
pub fn max_dt(c: &ConsCells, p: &GasParams, cfl: f64) -> f64 {
    let smax = (0..c.len()).fold(0.0f64, |acc, i| acc.max(c.velocity(i).abs() + sound_speed(c.rho[i], p.gamma)));
    cfl * c.h() / smax
}

/// One forward-Euler step: conservative update plus the friction source on
/// the momentum equation.
pub fn rusanov_step(c: &ConsCells, dt: f64, bd: &BoundaryData, spec: &FrictionSpec, p: &GasParams) -> Result<ConsCells> {
    let n = c.len();
    if n < 2 {
        return Err(Error::Precondition(format!("need at least 2 cells (got {n})")));
    }
    let limit = max_dt(c, p, 1.0);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let f = interface_fluxes(c, bd, p)?;
    let r = dt / c.h();
    let mut next = c.clone();
    next.t = c.t + dt;
    for i in 0..n {
        next.rho[i] = c.rho[i] - r * (f[i + 1].0 - f[i].0);
        let u = c.velocity(i);
        let beta = spec.value_at(c.t, c.x(i), p.period);
        let source = if u == 0.0 { 0.0 } else { beta * c.rho[i] * u.abs().powf(p.alpha) * u };
        next.mom[i] = c.mom[i] - r * (f[i + 1].1 - f[i].1) + dt * source;
        if !(next.rho[i] > 0.0) || !next.mom[i].is_finite() {
            return Err(Error::Regime(format!(
                "cell {i} at t = {}: rho = {}, rho u = {}",
                next.t, next.rho[i], next.mom[i]
            )));
        }
    }
    Ok(next)
}

/// Advances to `c.t + duration` with steps at `cfl` times the limit, the
/// last step shortened to land on the end time.
pub fn run(
    c: &ConsCells,
    duration: f64,
    cfl: f64,
    bd: &BoundaryData,
    spec: &FrictionSpec,
    p: &GasParams,
) -> Result<ConsCells> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Precondition(format!("cfl must lie in (0, 1] (got {cfl})")));
    }
    let end = c.t + duration;
    let mut state = c.clone();
    while state.t < end {
        let dt = max_dt(&state, p, cfl).min(end - state.t);
        state = rusanov_step(&state, dt, bd, spec, p)?;
        if end - state.t < 1e-14 * end.max(1.0) {
            state.t = end;
        }
    }
    Ok(state)
}

/// Per-component discrepancies `[phi1, phi2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDiff {
    pub linf: [f64; 2],
    /// Root mean square over the cells, weighted by `h`.
    pub l2: [f64; 2],
}

impl FieldDiff {
    pub fn linf_max(&self) -> f64 {
        self.linf[0].max(self.linf[1])
    }
}

/// Compares nodal perturbation values on `x_k = k L / (nx - 1)` with the
/// cells, after interpolating the nodes linearly to the cell centres and
/// converting the cells to perturbations of the invariants.
pub fn compare_fields(a: &[Perturbation], b: &ConsCells, p: &GasParams) -> Result<FieldDiff> {
    let nx = a.len();
    if nx < 2 {
        return Err(Error::Precondition(format!("need at least 2 nodes (got {nx})")));
    }
    let g = p.gamma;
    let w_bar = 2.0 * sound_speed(p.rho_bar, g) / (g - 1.0);
    let (m_bar, n_bar) = (-0.5 * w_bar, 0.5 * w_bar);
    let scale = (nx - 1) as f64 / b.length;

    let mut linf = [0.0f64; 2];
    let mut sq = [0.0f64; 2];
    for i in 0..b.len() {
        if !(b.rho[i] > 0.0) {
            return Err(Error::Domain(format!("cell {i} has rho = {}", b.rho[i])));
        }
        let s = b.x(i) * scale;
        let k = (s.floor() as usize).min(nx - 2);
        let w = s - k as f64;
        let node = [
            a[k].phi1 + w * (a[k + 1].phi1 - a[k].phi1),
            a[k].phi2 + w * (a[k + 1].phi2 - a[k].phi2),
        ];
        let (m, n) = invariants(b.rho[i], b.velocity(i), g);
        let cell = [m - m_bar, n - n_bar];
        for c in 0..2 {
            let d = (node[c] - cell[c]).abs();
            linf[c] = linf[c].max(d);
            sq[c] += d * d * b.h();
        }
    }
    Ok(FieldDiff {
        linf,
        l2: [(sq[0] / b.length).sqrt(), (sq[1] / b.length).sqrt()],
    })
}
