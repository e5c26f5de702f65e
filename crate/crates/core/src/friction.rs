//! Friction coefficient `beta(t, x)`: P-periodic in time, C1 bounded.
//!
//! Two families are supported: a constant, and a truncated trigonometric
//! series in `t` whose coefficients are polynomials of degree at most two in
//! `x`:
//!
//! ```text
//! beta(t, x) = sum_j sum_k (a_jk cos(2 pi j t / P) + b_jk sin(2 pi j t / P)) x^k
//! ```

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::GasParams;

/// One harmonic of the series; `cos[k]` and `sin[k]` multiply `x^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub harmonic: u32,
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrictionKind {
    Constant(f64),
    TrigSeries(Vec<TrigTerm>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrictionSpec {
    pub kind: FrictionKind,
    /// Claimed bound on `max(|beta|, |d_t beta|, |d_x beta|)`.
    pub c0_claimed: f64,
}

impl FrictionSpec {
    pub fn constant(value: f64) -> Self {
        Self {
            kind: FrictionKind::Constant(value),
            c0_claimed: value.abs(),
        }
    }

    pub fn trig_series(terms: Vec<TrigTerm>, c0_claimed: f64) -> Self {
        Self {
            kind: FrictionKind::TrigSeries(terms),
            c0_claimed,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FrictionKind::Constant(b) => *b == 0.0,
            FrictionKind::TrigSeries(terms) => terms
                .iter()
                .all(|t| t.cos == [0.0; 3] && (t.harmonic == 0 || t.sin == [0.0; 3])),
        }
    }

    /// Evaluates without the domain check on `x`.
    #[inline]
    pub fn value_at(&self, t: f64, x: f64, period: f64) -> f64 {
        match &self.kind {
            FrictionKind::Constant(b) => *b,
            FrictionKind::TrigSeries(terms) => {
                let tau = t.rem_euclid(period);
                let mut acc = 0.0;
                for term in terms {
                    let poly_c = term.cos[0] + x * (term.cos[1] + x * term.cos[2]);
                    if term.harmonic == 0 {
                        acc += poly_c;
                        continue;
                    }
                    let poly_s = term.sin[0] + x * (term.sin[1] + x * term.sin[2]);
                    let (s, c) = (TAU * term.harmonic as f64 * tau / period).sin_cos();
                    acc += poly_c * c + poly_s * s;
                }
                acc
            }
        }
    }
}

pub fn eval_beta(spec: &FrictionSpec, p: &GasParams, t: f64, x: f64) -> Result<f64> {
    if !(0.0..=p.length).contains(&x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the pipe [0, {}]",
            p.length
        )));
    }
    let v = spec.value_at(t, x, p.period);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("beta({t}, {x}) is not finite")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionReport {
    pub max_abs: f64,
    pub max_dt: f64,
    pub max_dx: f64,
    /// `max |beta(t + P, x) - beta(t, x)|` over the sample grid.
    pub periodicity_residual: f64,
    /// `max(max_abs, max_dt, max_dx)`.
    pub c1_sample: f64,
    pub c0_claimed: f64,
    pub pass: bool,
}

/// Samples `beta` on an `n_samples x n_samples` grid over `[0, P) x [0, L]`
/// with central differences of step `P / 4096` (and `L / 4096` in `x`).
pub fn validate_beta(spec: &FrictionSpec, p: &GasParams, n_samples: usize) -> Result<FrictionReport> {
    if n_samples < 16 {
        return Err(Error::Precondition(format!(
            "need at least 16 samples per axis (got {n_samples})"
        )));
    }
    let (period, length) = (p.period, p.length);
    let ht = period / 4096.0;
    let hx = length / 4096.0;
    let beta = |t: f64, x: f64| spec.value_at(t, x, period);
    let mut rep = FrictionReport {
        max_abs: 0.0,
        max_dt: 0.0,
        max_dx: 0.0,
        periodicity_residual: 0.0,
        c1_sample: 0.0,
        c0_claimed: spec.c0_claimed,
        pass: false,
    };
    for i in 0..n_samples {
        let t = i as f64 * period / n_samples as f64;
        for k in 0..n_samples {
            let x = k as f64 * length / (n_samples - 1) as f64;
            let b = beta(t, x);
            rep.max_abs = rep.max_abs.max(b.abs());
            rep.max_dt = rep
                .max_dt
                .max(((beta(t + ht, x) - beta(t - ht, x)) / (2.0 * ht)).abs());
            let dx = if k == 0 {
                (beta(t, x + hx) - b) / hx
            } else if k == n_samples - 1 {
                (b - beta(t, x - hx)) / hx
            } else {
                (beta(t, x + hx) - beta(t, x - hx)) / (2.0 * hx)
            };
            rep.max_dx = rep.max_dx.max(dx.abs());
            rep.periodicity_residual = rep.periodicity_residual.max((beta(t + period, x) - b).abs());
        }
    }
    rep.c1_sample = rep.max_abs.max(rep.max_dt).max(rep.max_dx);
    rep.pass = rep.periodicity_residual <= 1e-12 && rep.c1_sample <= spec.c0_claimed;
    Ok(rep)
}
