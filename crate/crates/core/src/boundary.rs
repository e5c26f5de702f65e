//! Periodic boundary data `phi_1b(t)` (imposed at `x = L`) and `phi_2b(t)`
//! (imposed at `x = 0`), stored as truncated Fourier series.

use std::f64::consts::TAU;

/// `mean + sum_j cos[j-1] cos(2 pi j t / P) + sin[j-1] sin(2 pi j t / P)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigSeries {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn constant(mean: f64) -> Self {
        Self {
            mean,
            ..Self::default()
        }
    }

    pub fn sine(amplitude: f64) -> Self {
        Self {
            sin: vec![amplitude],
            ..Self::default()
        }
    }

    pub fn cosine(amplitude: f64) -> Self {
        Self {
            cos: vec![amplitude],
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64, period: f64) -> f64 {
        let w = TAU * t.rem_euclid(period) / period;
        let mut acc = self.mean;
        for (j, a) in self.cos.iter().enumerate() {
            acc += a * ((j + 1) as f64 * w).cos();
        }
        for (j, b) in self.sin.iter().enumerate() {
            acc += b * ((j + 1) as f64 * w).sin();
        }
        acc
    }

    pub fn derivative(&self, t: f64, period: f64) -> f64 {
        let w = TAU * t.rem_euclid(period) / period;
        let omega = TAU / period;
        let mut acc = 0.0;
        for (j, a) in self.cos.iter().enumerate() {
            let k = (j + 1) as f64;
            acc -= a * k * omega * (k * w).sin();
        }
        for (j, b) in self.sin.iter().enumerate() {
            let k = (j + 1) as f64;
            acc += b * k * omega * (k * w).cos();
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    /// Perturbation of `m` imposed at `x = L`.
    pub phi1b: TrigSeries,
    /// Perturbation of `n` imposed at `x = 0`.
    pub phi2b: TrigSeries,
    /// Claimed C1 amplitude of both series.
    pub eps: f64,
}

impl BoundaryData {
    pub fn zero() -> Self {
        Self {
            phi1b: TrigSeries::default(),
            phi2b: TrigSeries::default(),
            eps: 0.0,
        }
    }

    /// `phi_1b = A sin(wt)`, `phi_2b = A cos(wt)` with `w = 2 pi / P` and `A`
    /// chosen so that the C1 norm `max(A, A w)` equals `eps`.
    pub fn single_mode(eps: f64, period: f64) -> Self {
        let amplitude = eps / (TAU / period).max(1.0);
        Self {
            phi1b: TrigSeries::sine(amplitude),
            phi2b: TrigSeries::cosine(amplitude),
            eps,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi1b.is_zero() && self.phi2b.is_zero()
    }

    #[inline]
    pub fn phi1b(&self, t: f64, period: f64) -> f64 {
        self.phi1b.eval(t, period)
    }

    #[inline]
    pub fn phi2b(&self, t: f64, period: f64) -> f64 {
        self.phi2b.eval(t, period)
    }

    /// Samples both series on `n` points per period and checks periodicity and
    /// the C1 bound `eps`.
    pub fn validate(&self, period: f64, n: usize) -> BoundaryReport {
        let mut c1: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for s in [&self.phi1b, &self.phi2b] {
            for i in 0..n {
                let t = i as f64 * period / n as f64;
                let v = s.eval(t, period);
                c1 = c1.max(v.abs()).max(s.derivative(t, period).abs());
                residual = residual.max((s.eval(t + period, period) - v).abs());
            }
        }
        BoundaryReport {
            c1_sample: c1,
            periodicity_residual: residual,
            eps: self.eps,
            pass: residual <= 1e-12 && c1 <= self.eps * (1.0 + 1e-12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    pub c1_sample: f64,
    pub periodicity_residual: f64,
    pub eps: f64,
    pub pass: bool,
}
