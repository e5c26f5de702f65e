//! Gas parameters, Riemann invariants and characteristic speeds.
//!
//! The pressure law is `p = rho^gamma`. With sound speed
//! `c = sqrt(gamma) * rho^((gamma - 1) / 2)` the Riemann invariants are
//!
//! ```text
//! m = (u - 2c / (gamma - 1)) / 2,    n = (u + 2c / (gamma - 1)) / 2
//! ```
//!
//! and the system becomes diagonal with speeds
//! `lambda1 = (gamma + 1) m / 2 + (3 - gamma) n / 2 = u - c` and
//! `lambda2 = (3 - gamma) m / 2 + (gamma + 1) n / 2 = u + c`.
//!
//! The solvers work with the perturbation `phi = (m - m_bar, n - n_bar)` about
//! the quiescent state `(rho_bar, 0)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// Adiabatic exponent, > 1.
    pub gamma: f64,
    /// Friction exponent, > 0.
    pub alpha: f64,
    /// Baseline density, > 0.
    pub rho_bar: f64,
    /// Pipe length.
    pub length: f64,
    /// Time period of the boundary data and friction.
    pub period: f64,
}

impl GasParams {
    pub fn new(gamma: f64, alpha: f64, rho_bar: f64, length: f64, period: f64) -> Result<Self> {
        let p = Self {
            gamma,
            alpha,
            rho_bar,
            length,
            period,
        };
        let violations = p.violations();
        if violations.is_empty() {
            Ok(p)
        } else {
            Err(Error::Config(violations))
        }
    }

    /// Every violated range constraint, in field order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            out.push(format!("gamma must exceed 1 (got {})", self.gamma));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            out.push(format!("alpha must be positive (got {})", self.alpha));
        }
        if !(self.rho_bar > 0.0) || !self.rho_bar.is_finite() {
            out.push(format!("rho_bar must be positive (got {})", self.rho_bar));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            out.push(format!("L must be positive (got {})", self.length));
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            out.push(format!("P must be positive (got {})", self.period));
        }
        out
    }

    /// Sound speed of the baseline state.
    pub fn c_bar(&self) -> f64 {
        self.gamma.sqrt() * self.rho_bar.powf(0.5 * (self.gamma - 1.0))
    }

    pub fn m_bar(&self) -> f64 {
        -self.c_bar() / (self.gamma - 1.0)
    }

    pub fn n_bar(&self) -> f64 {
        self.c_bar() / (self.gamma - 1.0)
    }

    pub fn baseline(&self) -> RiemannState {
        RiemannState {
            m: self.m_bar(),
            n: self.n_bar(),
        }
    }
}

/// Physical state: density and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysState {
    pub rho: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannState {
    pub m: f64,
    pub n: f64,
}

/// Deviation of `(m, n)` from the baseline invariants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    pub phi1: f64,
    pub phi2: f64,
}

impl Perturbation {
    pub const ZERO: Perturbation = Perturbation { phi1: 0.0, phi2: 0.0 };

    pub fn new(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    pub fn to_riemann(self, p: &GasParams) -> RiemannState {
        RiemannState {
            m: self.phi1 + p.m_bar(),
            n: self.phi2 + p.n_bar(),
        }
    }

    pub fn from_riemann(r: RiemannState, p: &GasParams) -> Self {
        Self {
            phi1: r.m - p.m_bar(),
            phi2: r.n - p.n_bar(),
        }
    }

    /// Component-wise max-abs distance.
    pub fn dist(self, other: Perturbation) -> f64 {
        (self.phi1 - other.phi1)
            .abs()
            .max((self.phi2 - other.phi2).abs())
    }

    pub fn norm(self) -> f64 {
        self.phi1.abs().max(self.phi2.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSpeeds {
    pub lambda1: f64,
    pub lambda2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

pub fn to_riemann(s: PhysState, p: &GasParams) -> Result<RiemannState> {
    if !(s.rho > 0.0) {
        return Err(Error::Domain(format!(
            "density must be positive (got {})",
            s.rho
        )));
    }
    let c = p.gamma.sqrt() * s.rho.powf(0.5 * (p.gamma - 1.0));
    let w = c / (p.gamma - 1.0);
    Ok(RiemannState {
        m: 0.5 * s.u - w,
        n: 0.5 * s.u + w,
    })
}

pub fn from_riemann(r: RiemannState, p: &GasParams) -> Result<PhysState> {
    if !(r.n > r.m) {
        return Err(Error::Domain(format!(
            "invariants must satisfy n > m (got m = {}, n = {}): vacuum or non-physical state",
            r.m, r.n
        )));
    }
    let u = r.m + r.n;
    let c = 0.5 * (p.gamma - 1.0) * (r.n - r.m);
    let rho = (c * c / p.gamma).powf(1.0 / (p.gamma - 1.0));
    Ok(PhysState { rho, u })
}

/// Characteristic speeds `(lambda1, lambda2)` as linear forms in `(m, n)`.
#[inline]
pub fn lambdas(r: RiemannState, p: &GasParams) -> (f64, f64) {
    let a = 0.5 * (p.gamma + 1.0);
    let b = 0.5 * (3.0 - p.gamma);
    (a * r.m + b * r.n, b * r.m + a * r.n)
}

/// Speeds of a perturbation about the baseline.
#[inline]
pub fn perturbation_lambdas(phi: Perturbation, p: &GasParams) -> (f64, f64) {
    lambdas(phi.to_riemann(p), p)
}

/// Precomputed linear form of the speeds about the baseline:
/// `lambda1 = -c_bar + a phi1 + b phi2`, `lambda2 = c_bar + b phi1 + a phi2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedModel {
    a: f64,
    b: f64,
    c_bar: f64,
}

impl SpeedModel {
    pub fn new(p: &GasParams) -> Self {
        Self {
            a: 0.5 * (p.gamma + 1.0),
            b: 0.5 * (3.0 - p.gamma),
            c_bar: p.c_bar(),
        }
    }

    #[inline]
    pub fn lambdas(&self, phi: Perturbation) -> (f64, f64) {
        (
            -self.c_bar + self.a * phi.phi1 + self.b * phi.phi2,
            self.c_bar + self.b * phi.phi1 + self.a * phi.phi2,
        )
    }
}

pub fn eigenvalues(r: RiemannState, p: &GasParams) -> Result<EigenSpeeds> {
    let (lambda1, lambda2) = lambdas(r, p);
    if !(r.n > r.m) {
        return Err(Error::Sonic(format!(
            "c = 0 at m = {}, n = {}: both families collapse to speed {}",
            r.m, r.n, lambda1
        )));
    }
    if lambda1 == 0.0 || lambda2 == 0.0 {
        return Err(Error::Sonic(format!(
            "vanishing speed (lambda1 = {lambda1}, lambda2 = {lambda2}) at m = {}, n = {}",
            r.m, r.n
        )));
    }
    Ok(EigenSpeeds {
        lambda1,
        lambda2,
        nu1: 1.0 / lambda1,
        nu2: 1.0 / lambda2,
    })
}

/// `|s|^alpha * s` evaluated as `sign(s) |s|^(alpha + 1)`; exactly zero at `s = 0`.
#[inline]
pub fn signed_power(s: f64, alpha: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if alpha == 1.0 {
        s * s.abs()
    } else {
        s.signum() * s.abs().powf(alpha + 1.0)
    }
}

/// Right-hand side `beta / 2 * |phi1 + phi2|^alpha (phi1 + phi2)` shared by both
/// invariant equations.
#[inline]
pub fn source_term(phi1: f64, phi2: f64, beta: f64, p: &GasParams) -> f64 {
    0.5 * beta * signed_power(phi1 + phi2, p.alpha)
}

/// Outcome of scanning a set of states for strict subsonicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsonicReport {
    /// `min(-lambda1)` over all nodes.
    pub min_neg_lambda1: f64,
    /// `min(lambda2)` over all nodes.
    pub min_lambda2: f64,
    /// `max |1 / lambda_i|`; infinite when a speed vanishes.
    pub nu_max: f64,
    /// `max |lambda_i|`, used for CFL limits.
    pub lambda_max: f64,
    /// Some node had `n <= m` (c = 0).
    pub sonic: bool,
    pub nodes: usize,
    pub pass: bool,
}

pub fn subsonic_check<I>(states: I, p: &GasParams) -> SubsonicReport
where
    I: IntoIterator<Item = Perturbation>,
{
    let mut min_neg_lambda1 = f64::INFINITY;
    let mut min_lambda2 = f64::INFINITY;
    let mut nu_max: f64 = 0.0;
    let mut lambda_max: f64 = 0.0;
    let mut sonic = false;
    let mut finite = true;
    let mut nodes = 0;
    let (m_bar, n_bar) = (p.m_bar(), p.n_bar());
    let speeds = SpeedModel::new(p);
    for phi in states {
        nodes += 1;
        if !(phi.phi1.is_finite() && phi.phi2.is_finite()) {
            finite = false;
            continue;
        }
        if !(phi.phi2 + n_bar > phi.phi1 + m_bar) {
            sonic = true;
        }
        let (l1, l2) = speeds.lambdas(phi);
        min_neg_lambda1 = min_neg_lambda1.min(-l1);
        min_lambda2 = min_lambda2.min(l2);
        lambda_max = lambda_max.max(l1.abs()).max(l2.abs());
        nu_max = nu_max.max(1.0 / l1.abs()).max(1.0 / l2.abs());
    }
    let pass = finite && !sonic && nodes > 0 && min_neg_lambda1 > 0.0 && min_lambda2 > 0.0;
    SubsonicReport {
        min_neg_lambda1,
        min_lambda2,
        nu_max,
        lambda_max,
        sonic,
        nodes,
        pass,
    }
}
