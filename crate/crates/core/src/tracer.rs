//! Characteristic curves `t = t_i(x; t0, x0)` of the linearised problem.
//!
//! With `x` as the evolution variable each family satisfies
//! `dt/dx = nu_i(phi + phi_bar)` through a frozen background field. Family 1
//! (speed `lambda1 < 0`) is traced forward to its inflow boundary `x = L`,
//! family 2 (`lambda2 > 0`) backward to `x = 0`. Steps are one grid spacing
//! with the classical fourth-order Runge-Kutta rule.

use crate::error::{Error, Result};
use crate::field::PeriodicField;
use crate::friction::FrictionSpec;
use crate::model::{signed_power, GasParams, Perturbation, SpeedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `lambda1 = u - c < 0`; data enters at `x = L`.
    First,
    /// `lambda2 = u + c > 0`; data enters at `x = 0`.
    Second,
}

impl Family {
    pub fn index(self) -> usize {
        match self {
            Family::First => 1,
            Family::Second => 2,
        }
    }

    /// The boundary where this family's data is prescribed.
    pub fn inflow_x(self, length: f64) -> f64 {
        match self {
            Family::First => length,
            Family::Second => 0.0,
        }
    }

    /// Reciprocal speed of this family at `phi`.
    #[inline]
    pub fn nu(self, phi: Perturbation, speeds: &SpeedModel) -> Result<f64> {
        let (l1, l2) = speeds.lambdas(phi);
        match self {
            Family::First if l1 < 0.0 => Ok(1.0 / l1),
            Family::Second if l2 > 0.0 => Ok(1.0 / l2),
            Family::First => Err(Error::Sonic(format!(
                "lambda1 = {l1} >= 0 at phi = ({}, {})",
                phi.phi1, phi.phi2
            ))),
            Family::Second => Err(Error::Sonic(format!(
                "lambda2 = {l2} <= 0 at phi = ({}, {})",
                phi.phi1, phi.phi2
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub x: f64,
    pub t: f64,
}

/// Samples of one characteristic from its start point to the inflow boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPath {
    pub family: Family,
    pub samples: Vec<PathSample>,
}

impl CharPath {
    pub fn start(&self) -> PathSample {
        self.samples[0]
    }

    pub fn end(&self) -> PathSample {
        *self.samples.last().expect("paths are never empty")
    }
}

/// State of the tracer at one sample point, handed to the visitor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Visit {
    pub x: f64,
    pub t: f64,
    pub phi: Perturbation,
    pub nu: f64,
}

/// Marches from `(t0, x0)` to the family's inflow boundary and calls `visit`
/// at every sample (including both ends). Returns the terminal time.
pub(crate) fn march(
    family: Family,
    t0: f64,
    x0: f64,
    field: &PeriodicField,
    p: &GasParams,
    mut visit: impl FnMut(Visit),
) -> Result<f64> {
    let length = field.length();
    let target = family.inflow_x(length);
    let span = target - x0;
    let steps = (span.abs() / field.h_x() - 1e-9).ceil().max(0.0) as usize;

    let speeds = SpeedModel::new(p);
    // Reciprocal speed of this family; a wrong-signed speed yields NaN or a
    // value of the wrong sign, which `check` turns into an error.
    let nu_at = |t: f64, x: f64| -> (Perturbation, f64) {
        let phi = field.sample(t, x);
        let (l1, l2) = speeds.lambdas(phi);
        let lambda = match family {
            Family::First => l1,
            Family::Second => l2,
        };
        (phi, 1.0 / lambda)
    };
    let sign = match family {
        Family::First => -1.0,
        Family::Second => 1.0,
    };
    let check = |t: f64, x: f64, nus: &[f64]| -> Result<()> {
        if nus.iter().all(|&nu| nu * sign > 0.0 && nu.is_finite()) {
            Ok(())
        } else {
            // re-evaluate for the diagnostic
            family.nu(field.sample(t, x), &speeds).map(|_| ()).and(Err(Error::Sonic(format!(
                "family {} lost its direction near (t = {t}, x = {x})",
                family.index()
            ))))
        }
    };

    let (phi, mut nu) = nu_at(t0, x0);
    check(t0, x0, &[nu])?;
    visit(Visit { x: x0, t: t0, phi, nu });
    if steps == 0 {
        return Ok(t0);
    }
    let h = span / steps as f64;
    let mut t = t0;
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        let x_half = x + 0.5 * h;
        let x_next = if i + 1 == steps { target } else { x0 + (i + 1) as f64 * h };
        let k1 = nu;
        let k2 = nu_at(t + 0.5 * h * k1, x_half).1;
        let k3 = nu_at(t + 0.5 * h * k2, x_half).1;
        let k4 = nu_at(t + h * k3, x_next).1;
        t += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !t.is_finite() {
            return Err(Error::Numeric(format!(
                "characteristic time became {t} near x = {x_next}"
            )));
        }
        let (phi, nu_next) = nu_at(t, x_next);
        nu = nu_next;
        check(t, x_next, &[k2, k3, k4, nu])?;
        visit(Visit {
            x: x_next,
            t,
            phi,
            nu,
        });
    }
    Ok(t)
}

/// Column-major tables for marching from grid nodes.
///
/// A trace that starts on a node and steps by exactly one cell only ever
/// samples node columns and cell-midpoint columns. The speeds are linear in
/// `phi`, so bilinear interpolation of `phi` followed by `lambda` equals
/// interpolation in time of the tabulated `lambda` on those columns.
pub(crate) struct ColumnTables<'a> {
    field: &'a PeriodicField,
    nt: usize,
    t_scale: f64,
    /// `lambda1` then `lambda2` at nodes, `[family][k * nt + j]`.
    node: [Vec<f64>; 2],
    /// Same at midpoints between columns `k` and `k + 1`.
    mid: [Vec<f64>; 2],
    /// `phi` at nodes, column-major.
    phi: Vec<Perturbation>,
}

impl<'a> ColumnTables<'a> {
    pub fn new(field: &'a PeriodicField, p: &GasParams) -> Self {
        let (nt, nx) = (field.nt(), field.nx());
        let speeds = SpeedModel::new(p);
        let mut node = [vec![0.0; nt * nx], vec![0.0; nt * nx]];
        let mut mid = [vec![0.0; nt * (nx - 1)], vec![0.0; nt * (nx - 1)]];
        let mut phi = vec![Perturbation::ZERO; nt * nx];
        for k in 0..nx {
            for j in 0..nt {
                let v = field.at(j, k);
                let (l1, l2) = speeds.lambdas(v);
                node[0][k * nt + j] = l1;
                node[1][k * nt + j] = l2;
                phi[k * nt + j] = v;
                if k + 1 < nx {
                    let w = field.at(j, k + 1);
                    let half = Perturbation::new(0.5 * (v.phi1 + w.phi1), 0.5 * (v.phi2 + w.phi2));
                    let (m1, m2) = speeds.lambdas(half);
                    mid[0][k * nt + j] = m1;
                    mid[1][k * nt + j] = m2;
                }
            }
        }
        Self {
            field,
            nt,
            t_scale: nt as f64 / field.period(),
            node,
            mid,
            phi,
        }
    }

    #[inline(always)]
    fn time_index(&self, t: f64) -> (usize, usize, f64) {
        let (mut j, w) = crate::field::split_snapped(t * self.t_scale);
        let n = self.nt as i64;
        if !(0..n).contains(&j) {
            j = j.rem_euclid(n);
        }
        let j0 = j as usize;
        let j1 = if j0 + 1 == self.nt { 0 } else { j0 + 1 };
        (j0, j1, w)
    }

    #[inline(always)]
    fn column(&self, table: &[f64], col: usize, t: f64) -> f64 {
        let (j0, j1, w) = self.time_index(t);
        let base = col * self.nt;
        let a = table[base + j0];
        if w == 0.0 {
            a
        } else {
            a + w * (table[base + j1] - a)
        }
    }

    #[inline(always)]
    fn phi_at(&self, col: usize, t: f64) -> Perturbation {
        let (j0, j1, w) = self.time_index(t);
        let base = col * self.nt;
        let a = self.phi[base + j0];
        if w == 0.0 {
            a
        } else {
            let b = self.phi[base + j1];
            Perturbation::new(a.phi1 + w * (b.phi1 - a.phi1), a.phi2 + w * (b.phi2 - a.phi2))
        }
    }

    /// Same contract as [`march`], starting from node `(j, k)`.
    pub fn march_from_node(
        &self,
        family: Family,
        j: usize,
        k: usize,
        mut visit: impl FnMut(Visit),
    ) -> Result<f64> {
        let f = self.field;
        let nx = f.nx();
        let (slot, sign, steps) = match family {
            Family::First => (0, -1.0, nx - 1 - k),
            Family::Second => (1, 1.0, k),
        };
        let node = &self.node[slot];
        let mid = &self.mid[slot];
        let bad = |t: f64, x: f64| {
            Error::Sonic(format!(
                "family {} lost its direction near (t = {t}, x = {x})",
                family.index()
            ))
        };

        let mut t = f.t(j);
        let mut col = k;
        let mut nu = 1.0 / node[col * self.nt + j];
        if !(nu * sign > 0.0 && nu.is_finite()) {
            return Err(bad(t, f.x(col)));
        }
        visit(Visit {
            x: f.x(col),
            t,
            phi: self.phi[col * self.nt + j],
            nu,
        });
        let h = match family {
            Family::First => f.h_x(),
            Family::Second => -f.h_x(),
        };
        for _ in 0..steps {
            let (next, mid_col) = match family {
                Family::First => (col + 1, col),
                Family::Second => (col - 1, col - 1),
            };
            let k1 = nu;
            let k2 = 1.0 / self.column(mid, mid_col, t + 0.5 * h * k1);
            let k3 = 1.0 / self.column(mid, mid_col, t + 0.5 * h * k2);
            let k4 = 1.0 / self.column(node, next, t + h * k3);
            t += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            nu = 1.0 / self.column(node, next, t);
            col = next;
            let ok = [k2, k3, k4, nu].iter().all(|&v| v * sign > 0.0 && v.is_finite());
            if !ok || !t.is_finite() {
                return Err(bad(t, f.x(col)));
            }
            visit(Visit {
                x: f.x(col),
                t,
                phi: self.phi_at(col, t),
                nu,
            });
        }
        Ok(t)
    }
}

pub fn trace_characteristic(
    family: Family,
    t0: f64,
    x0: f64,
    field: &PeriodicField,
    p: &GasParams,
) -> Result<CharPath> {
    if !(0.0..=field.length()).contains(&x0) {
        return Err(Error::Domain(format!(
            "start x0 = {x0} outside the pipe [0, {}]",
            field.length()
        )));
    }
    let mut samples = Vec::with_capacity(field.nx());
    march(family, t0, x0, field, p, |v| samples.push(PathSample { x: v.x, t: v.t }))?;
    Ok(CharPath { family, samples })
}

/// Integrand `beta / 2 * nu * |s|^alpha s` of the source along a path.
#[inline]
pub(crate) fn source_density(v: &Visit, spec: &FrictionSpec, p: &GasParams) -> f64 {
    let s = v.phi.phi1 + v.phi.phi2;
    if s == 0.0 {
        return 0.0;
    }
    0.5 * spec.value_at(v.t, v.x, p.period) * v.nu * signed_power(s, p.alpha)
}

/// Trapezoidal accumulator for the source integral measured from the inflow
/// boundary to the start point (`int_L^x0` for family 1, `int_0^x0` for
/// family 2).
#[derive(Debug, Default)]
pub(crate) struct SourceIntegral {
    prev: Option<(f64, f64)>,
    sum: f64,
}

impl SourceIntegral {
    #[inline]
    pub fn push(&mut self, x: f64, g: f64) {
        if let Some((xp, gp)) = self.prev {
            self.sum += 0.5 * (gp + g) * (x - xp);
        }
        self.prev = Some((x, g));
    }

    /// The samples run from `x0` towards the boundary, so the integral from
    /// the boundary back to `x0` is the negated sum.
    pub fn value(&self) -> f64 {
        -self.sum
    }
}

pub fn integrate_source_along(
    path: &CharPath,
    field: &PeriodicField,
    spec: &FrictionSpec,
    p: &GasParams,
) -> Result<f64> {
    let mut acc = SourceIntegral::default();
    let speeds = SpeedModel::new(p);
    for s in &path.samples {
        let phi = field.interpolate(s.t, s.x)?;
        let nu = path.family.nu(phi, &speeds)?;
        let g = source_density(&Visit { x: s.x, t: s.t, phi, nu }, spec, p);
        acc.push(s.x, g);
    }
    Ok(acc.value())
}
