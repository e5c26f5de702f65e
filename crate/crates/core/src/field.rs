//! Perturbation field on a space-time grid that is periodic in time.

use crate::error::{Error, Result};
use crate::model::{GasParams, Perturbation, SubsonicReport};

/// Grid fractions this close to an integer snap onto the node.
const SNAP: f64 = 1e-10;

/// Values of `phi` on `t_j = j P / nt` (j mod nt) by `x_k = k L / (nx - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    nt: usize,
    nx: usize,
    period: f64,
    length: f64,
    t_scale: f64,
    x_scale: f64,
    data: Vec<Perturbation>,
}

/// Splits a grid coordinate into cell index and weight, snapping weights
/// within `SNAP` of 0 or 1 onto the node.
#[inline(always)]
pub(crate) fn split_snapped(s: f64) -> (i64, f64) {
    let mut i = s as i64;
    if (i as f64) > s {
        i -= 1;
    }
    let w = s - i as f64;
    if w < SNAP {
        (i, 0.0)
    } else if w > 1.0 - SNAP {
        (i + 1, 0.0)
    } else {
        (i, w)
    }
}

impl PeriodicField {
    pub fn zeros(nt: usize, nx: usize, p: &GasParams) -> Self {
        Self::from_data(nt, nx, p, vec![Perturbation::ZERO; nt * nx])
    }

    pub fn from_fn(nt: usize, nx: usize, p: &GasParams, mut f: impl FnMut(f64, f64) -> Perturbation) -> Self {
        let mut field = Self::zeros(nt, nx, p);
        for j in 0..nt {
            for k in 0..nx {
                let v = f(field.t(j), field.x(k));
                field.data[j * nx + k] = v;
            }
        }
        field
    }

    pub(crate) fn from_data(nt: usize, nx: usize, p: &GasParams, data: Vec<Perturbation>) -> Self {
        assert!(nt >= 1 && nx >= 2, "grid needs nt >= 1 and nx >= 2");
        assert_eq!(data.len(), nt * nx);
        Self {
            nt,
            nx,
            period: p.period,
            length: p.length,
            t_scale: nt as f64 / p.period,
            x_scale: (nx - 1) as f64 / p.length,
            data,
        }
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h_t(&self) -> f64 {
        self.period / self.nt as f64
    }

    pub fn h_x(&self) -> f64 {
        self.length / (self.nx - 1) as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.period / self.nt as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        if k + 1 == self.nx {
            self.length
        } else {
            k as f64 * self.length / (self.nx - 1) as f64
        }
    }

    /// Node value; the time index wraps.
    #[inline]
    pub fn at(&self, j: usize, k: usize) -> Perturbation {
        self.data[(j % self.nt) * self.nx + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: Perturbation) {
        let idx = (j % self.nt) * self.nx + k;
        self.data[idx] = v;
    }

    pub fn values(&self) -> &[Perturbation] {
        &self.data
    }

    /// Time slice `j` as a vector over the x nodes.
    pub fn row(&self, j: usize) -> Vec<Perturbation> {
        let j = j % self.nt;
        self.data[j * self.nx..(j + 1) * self.nx].to_vec()
    }

    pub fn subsonic(&self, p: &GasParams) -> SubsonicReport {
        crate::model::subsonic_check(self.data.iter().copied(), p)
    }

    /// `max |phi_i|` over all nodes.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    /// `max |self - other|` over all nodes; grids must match.
    pub fn sup_dist(&self, other: &PeriodicField) -> f64 {
        assert_eq!((self.nt, self.nx), (other.nt, other.nx), "grid mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max(a.dist(*b)))
    }

    /// Bilinear interpolation, periodic in `t`; `x` must lie in `[0, L]`.
    pub fn interpolate(&self, t: f64, x: f64) -> Result<Perturbation> {
        let tol = SNAP * self.length;
        if !(x >= -tol && x <= self.length + tol) {
            return Err(Error::Domain(format!(
                "x = {x} outside the pipe [0, {}]",
                self.length
            )));
        }
        if !t.is_finite() {
            return Err(Error::Numeric(format!("non-finite time {t}")));
        }
        Ok(self.sample(t, x))
    }

    /// Unchecked interpolation; `x` is clamped into `[0, L]`.
    #[inline(always)]
    pub(crate) fn sample(&self, t: f64, x: f64) -> Perturbation {
        let nt = self.nt;
        let (mut j, wt) = split_snapped(t * self.t_scale);
        let n = nt as i64;
        if !(0..n).contains(&j) {
            j = if (-n..0).contains(&j) { j + n } else if (n..2 * n).contains(&j) { j - n } else { j.rem_euclid(n) };
        }
        let j0 = j as usize;
        let j1 = if j0 + 1 == nt { 0 } else { j0 + 1 };

        let cells = self.nx - 1;
        let (k, mut wx) = split_snapped((x * self.x_scale).clamp(0.0, cells as f64));
        let mut k0 = k as usize;
        if k0 >= cells {
            k0 = cells - 1;
            wx = 1.0;
        }

        let row0 = j0 * self.nx + k0;
        let row1 = j1 * self.nx + k0;
        let (a, b) = match &self.data[row0..row0 + 2] {
            [a, b] => (*a, *b),
            _ => unreachable!(),
        };
        let (c, d) = match &self.data[row1..row1 + 2] {
            [c, d] => (*c, *d),
            _ => unreachable!(),
        };
        let lerp = |u: f64, v: f64, w: f64| {
            if w == 0.0 {
                u
            } else if w == 1.0 {
                v
            } else {
                u + w * (v - u)
            }
        };
        let p0 = Perturbation::new(lerp(a.phi1, b.phi1, wx), lerp(a.phi2, b.phi2, wx));
        let p1 = Perturbation::new(lerp(c.phi1, d.phi1, wx), lerp(c.phi2, d.phi2, wx));
        Perturbation::new(lerp(p0.phi1, p1.phi1, wt), lerp(p0.phi2, p1.phi2, wt))
    }
}
