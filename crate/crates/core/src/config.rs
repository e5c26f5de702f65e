//! Line-oriented `section.key = value` configuration.
//!
//! `#` starts a comment, blank lines are ignored and every key is optional.
//! Parsing reports every problem in the file at once, not just the first one.
//!
//! | key                      | default        | meaning                                    |
//! |--------------------------|----------------|--------------------------------------------|
//! | `gas.gamma`              | 2              | adiabatic exponent, > 1                    |
//! | `gas.alpha`              | 1              | friction exponent, > 0                     |
//! | `gas.rho_bar`            | 1              | baseline density, > 0                      |
//! | `gas.L`                  | 1              | pipe length, > 0                           |
//! | `gas.P`                  | 1              | period, > 0                                |
//! | `friction.kind`          | `constant`     | `constant` or `trig_series`                |
//! | `friction.value`         | 0.5            | constant coefficient                       |
//! | `friction.c0`            | `abs(value)`   | claimed C1 bound (required for series)     |
//! | `friction.cos_<j>`       |                | `a0, a1, a2`: `(a0 + a1 x + a2 x^2) cos(2 pi j t / P)` |
//! | `friction.sin_<j>`       |                | same with `sin`, `j >= 1`                   |
//! | `boundary.eps`           | 0.01           | C1 amplitude of the boundary data          |
//! | `boundary.phi1_mean`     |                | series for `phi_1b`; when no `phi1_*`/`phi2_*` key is given the data is `A sin`, `A cos` with C1 norm `eps` |
//! | `boundary.phi1_cos`      |                | comma list, harmonic `j` at position `j`   |
//! | `boundary.phi1_sin`      |                |                                            |
//! | `boundary.phi2_mean/cos/sin` |            | the same for `phi_2b`                      |
//! | `grid.nt`, `grid.nx`     | 256            | periodic grid, >= 16                       |
//! | `grid.cfl`               | 0.9            | Courant number, in `(0, 0.95]`             |
//! | `grid.ladder`            | `64, 128, 256` | grids of the refinement study              |
//! | `solver.tol`             | 1e-10          | fixed-point tolerance, > 0                 |
//! | `solver.max_iter`        | 100            | sweep cap, >= 1                            |
//! | `stability.windows`      | 8              | number of windows `K`, >= 1                |
//! | `stability.amplitude`    | `eps / 2`      | bump height `a`                            |
//! | `stability.mode`         | `dirichlet`    | `dirichlet` or `reflective`                |
//! | `stability.K1`, `.K2`    | 0              | reflection coefficients, `abs < 1`         |
//! | `ibvp.duration`          | `P`            | run length, > 0                            |
//! | `ibvp.init`              | `periodic`     | `periodic` (bumped periodic trace) or `rest` |
//! | `output.dir`             | `out`          | output directory                           |
//! | `output.snapshot_every`  | `P / 8`        | snapshot spacing, > 0                      |

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::fixed_point::{Grid, SolveOptions};
use crate::friction::{FrictionSpec, TrigTerm};
use crate::ibvp::BoundaryMode;
use crate::model::GasParams;

/// Initial data of the `ibvp` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IbvpInit {
    /// `phi^(P)(0, .)` plus the stability bump.
    Periodic,
    /// The quiescent state.
    Rest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub gas: GasParams,
    pub friction: FrictionSpec,
    pub boundary: BoundaryData,
    pub grid: Grid,
    pub cfl: f64,
    pub ladder: Vec<usize>,
    pub solver: SolveOptions,
    pub windows: usize,
    pub amplitude: f64,
    pub mode: BoundaryMode,
    pub ibvp_duration: f64,
    pub ibvp_init: IbvpInit,
    pub out_dir: PathBuf,
    pub snapshot_every: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        parse_config("").expect("the default table is valid")
    }
}

const SCALAR_KEYS: &[&str] = &[
    "gas.gamma",
    "gas.alpha",
    "gas.rho_bar",
    "gas.L",
    "gas.P",
    "friction.kind",
    "friction.value",
    "friction.c0",
    "boundary.eps",
    "boundary.phi1_mean",
    "boundary.phi1_cos",
    "boundary.phi1_sin",
    "boundary.phi2_mean",
    "boundary.phi2_cos",
    "boundary.phi2_sin",
    "grid.nt",
    "grid.nx",
    "grid.cfl",
    "grid.ladder",
    "solver.tol",
    "solver.max_iter",
    "stability.windows",
    "stability.amplitude",
    "stability.mode",
    "stability.K1",
    "stability.K2",
    "ibvp.duration",
    "ibvp.init",
    "output.dir",
    "output.snapshot_every",
];

/// `friction.cos_<j>` / `friction.sin_<j>` -> `(is_cos, j)`.
fn friction_term_key(key: &str) -> Option<(bool, usize)> {
    let rest = key.strip_prefix("friction.")?;
    let (is_cos, j) = if let Some(j) = rest.strip_prefix("cos_") {
        (true, j)
    } else {
        (false, rest.strip_prefix("sin_")?)
    };
    j.parse().ok().map(|j| (is_cos, j))
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    errors: Vec<String>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, String)> {
        self.map.get(key).cloned()
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            None => default,
            Some((line, v)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => {
                    self.errors.push(format!("line {line}: {key}: `{v}` is not a finite number"));
                    default
                }
            },
        }
    }

    fn count(&mut self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            None => default,
            Some((line, v)) => v.parse::<usize>().unwrap_or_else(|_| {
                self.errors.push(format!("line {line}: {key}: `{v}` is not a non-negative integer"));
                default
            }),
        }
    }

    fn list(&mut self, key: &str) -> Vec<f64> {
        let Some((line, v)) = self.raw(key) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => self.errors.push(format!("line {line}: {key}: `{item}` is not a finite number")),
            }
        }
        out
    }

    fn word<'a>(&mut self, key: &str, default: &'a str, allowed: &[&'a str]) -> &'a str {
        match self.raw(key) {
            None => default,
            Some((line, v)) => match allowed.iter().find(|a| **a == v.as_str()) {
                Some(a) => a,
                None => {
                    self.errors
                        .push(format!("line {line}: {key}: `{v}` is not one of {}", allowed.join(", ")));
                    default
                }
            },
        }
    }
}

fn split_lines(text: &str) -> Entries {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(format!("line {line}: expected `section.key = value`, got `{content}`"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !SCALAR_KEYS.contains(&key) && friction_term_key(key).is_none() {
            errors.push(format!("line {line}: unknown key `{key}`"));
            continue;
        }
        if let Some((first, _)) = map.insert(key.to_string(), (line, value.to_string())) {
            errors.push(format!("line {line}: `{key}` already set on line {first}"));
        }
    }
    Entries { map, errors }
}

/// Parses and validates `text`; on failure every violation is listed.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut e = split_lines(text);

    let gas = GasParams {
        gamma: e.float("gas.gamma", 2.0),
        alpha: e.float("gas.alpha", 1.0),
        rho_bar: e.float("gas.rho_bar", 1.0),
        length: e.float("gas.L", 1.0),
        period: e.float("gas.P", 1.0),
    };
    e.errors.extend(gas.violations());

    let friction = parse_friction(&mut e);
    let boundary = parse_boundary(&mut e, gas.period);

    let grid = Grid::new(e.count("grid.nt", 256), e.count("grid.nx", 256));
    for (name, n) in [("grid.nt", grid.nt), ("grid.nx", grid.nx)] {
        if n < 16 {
            e.errors.push(format!("{name} must be at least 16 (got {n})"));
        }
    }
    let cfl = e.float("grid.cfl", 0.9);
    if !(cfl > 0.0 && cfl <= 0.95) {
        e.errors.push(format!("grid.cfl must lie in (0, 0.95] (got {cfl})"));
    }
    let ladder = if e.has("grid.ladder") {
        let values = e.list("grid.ladder");
        let ladder: Vec<usize> = values.iter().map(|&v| v as usize).collect();
        if ladder.len() < 2 || values.iter().any(|&v| v.fract() != 0.0 || v < 16.0) {
            e.errors.push(format!("grid.ladder needs at least two integer grids >= 16 (got {values:?})"));
        } else if ladder.windows(2).any(|w| w[1] <= w[0]) {
            e.errors.push(format!("grid.ladder must increase (got {ladder:?})"));
        }
        ladder
    } else {
        vec![64, 128, 256]
    };

    let solver = SolveOptions {
        tol: e.float("solver.tol", 1e-10),
        max_iter: e.count("solver.max_iter", 100),
    };
    if !(solver.tol > 0.0) {
        e.errors.push(format!("solver.tol must be positive (got {})", solver.tol));
    }
    if solver.max_iter == 0 {
        e.errors.push("solver.max_iter must be at least 1".to_string());
    }

    let windows = e.count("stability.windows", 8);
    if windows == 0 {
        e.errors.push("stability.windows must be at least 1".to_string());
    }
    let amplitude = e.float("stability.amplitude", 0.5 * boundary.eps);
    let k1 = e.float("stability.K1", 0.0);
    let k2 = e.float("stability.K2", 0.0);
    let mode = match e.word("stability.mode", "dirichlet", &["dirichlet", "reflective"]) {
        "reflective" => match BoundaryMode::reflective(k1, k2) {
            Ok(m) => m,
            Err(Error::Config(v)) => {
                e.errors.extend(v.into_iter().map(|m| format!("stability.{m}")));
                BoundaryMode::Dirichlet
            }
            Err(other) => {
                e.errors.push(other.to_string());
                BoundaryMode::Dirichlet
            }
        },
        _ => {
            for (name, k) in [("K1", k1), ("K2", k2)] {
                if !(k.abs() < 1.0) {
                    e.errors.push(format!("stability.{name}: |{name}| < 1 required (got {k})"));
                }
            }
            BoundaryMode::Dirichlet
        }
    };

    let ibvp_duration = e.float("ibvp.duration", gas.period);
    if !(ibvp_duration > 0.0) {
        e.errors.push(format!("ibvp.duration must be positive (got {ibvp_duration})"));
    }
    let ibvp_init = match e.word("ibvp.init", "periodic", &["periodic", "rest"]) {
        "rest" => IbvpInit::Rest,
        _ => IbvpInit::Periodic,
    };
    let out_dir = PathBuf::from(e.raw("output.dir").map_or_else(|| "out".to_string(), |(_, v)| v));
    let snapshot_every = e.float("output.snapshot_every", gas.period / 8.0);
    if !(snapshot_every > 0.0) {
        e.errors.push(format!("output.snapshot_every must be positive (got {snapshot_every})"));
    }

    if !e.errors.is_empty() {
        return Err(Error::Config(e.errors));
    }
    Ok(SimulationConfig {
        gas,
        friction,
        boundary,
        grid,
        cfl,
        ladder,
        solver,
        windows,
        amplitude,
        mode,
        ibvp_duration,
        ibvp_init,
        out_dir,
        snapshot_every,
    })
}

fn parse_friction(e: &mut Entries) -> FrictionSpec {
    let kind = e.word("friction.kind", "constant", &["constant", "trig_series"]);
    let term_keys: Vec<(String, bool, usize)> = e
        .map
        .keys()
        .filter_map(|k| friction_term_key(k).map(|(c, j)| (k.clone(), c, j)))
        .collect();
    if kind == "constant" {
        for (k, _, _) in &term_keys {
            e.errors.push(format!("{k} needs friction.kind = trig_series"));
        }
        let value = e.float("friction.value", 0.5);
        let c0 = e.float("friction.c0", value.abs());
        let mut spec = FrictionSpec::constant(value);
        spec.c0_claimed = c0;
        return spec;
    }

    if e.has("friction.value") {
        e.errors.push("friction.value applies to friction.kind = constant only".to_string());
    }
    let mut terms: BTreeMap<usize, TrigTerm> = BTreeMap::new();
    for (key, is_cos, j) in term_keys {
        let values = e.list(&key);
        if values.len() != 3 {
            e.errors.push(format!("{key} needs three coefficients for 1, x, x^2 (got {})", values.len()));
            continue;
        }
        if !is_cos && j == 0 {
            e.errors.push(format!("{key}: sine terms start at harmonic 1"));
            continue;
        }
        let term = terms.entry(j).or_insert(TrigTerm {
            harmonic: j as u32,
            cos: [0.0; 3],
            sin: [0.0; 3],
        });
        let coeffs = [values[0], values[1], values[2]];
        if is_cos {
            term.cos = coeffs;
        } else {
            term.sin = coeffs;
        }
    }
    if terms.is_empty() {
        e.errors.push("friction.kind = trig_series needs at least one friction.cos_<j> or friction.sin_<j>".to_string());
    }
    if !e.has("friction.c0") {
        e.errors.push("friction.c0 (claimed C1 bound) is required for trig_series".to_string());
    }
    let c0 = e.float("friction.c0", 0.0);
    FrictionSpec::trig_series(terms.into_values().collect(), c0)
}

fn parse_boundary(e: &mut Entries, period: f64) -> BoundaryData {
    let eps = e.float("boundary.eps", 0.01);
    if !(eps >= 0.0) {
        e.errors.push(format!("boundary.eps must be non-negative (got {eps})"));
    }
    let series_keys = [
        "boundary.phi1_mean",
        "boundary.phi1_cos",
        "boundary.phi1_sin",
        "boundary.phi2_mean",
        "boundary.phi2_cos",
        "boundary.phi2_sin",
    ];
    if !series_keys.iter().any(|k| e.has(k)) {
        return BoundaryData::single_mode(eps, period);
    }
    let mut series = |prefix: &str| TrigSeries {
        mean: e.float(&format!("boundary.{prefix}_mean"), 0.0),
        cos: e.list(&format!("boundary.{prefix}_cos")),
        sin: e.list(&format!("boundary.{prefix}_sin")),
    };
    let phi1b = series("phi1");
    let phi2b = series("phi2");
    BoundaryData { phi1b, phi2b, eps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_a_minimal_file() {
        let c = parse_config("gas.gamma = 2\ngas.alpha = 1  # friction exponent\n\n").unwrap();
        assert_eq!(c.gas, GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(c.friction, FrictionSpec::constant(0.5));
        assert_eq!(c.boundary, BoundaryData::single_mode(0.01, 1.0));
        assert_eq!(c.grid, Grid::square(256));
        assert_eq!(c.cfl, 0.9);
        assert_eq!(c.solver, SolveOptions::default());
        assert_eq!((c.windows, c.amplitude), (8, 0.005));
        assert_eq!(c.mode, BoundaryMode::Dirichlet);
        assert_eq!(c.ladder, vec![64, 128, 256]);
        assert_eq!(c.snapshot_every, 0.125);
    }

    #[test]
    fn gamma_bound() {
        let v = violations("gas.gamma = 1.0");
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("gamma must exceed 1"), "{v:?}");
    }

    #[test]
    fn reflection_bound() {
        let v = violations("stability.mode = reflective\nstability.K1 = 1.5");
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("|K1| < 1"), "{v:?}");
        let v = violations("stability.K1 = 1.5");
        assert!(v[0].contains("|K1| < 1"), "{v:?}");
    }

    #[test]
    fn every_violation_is_listed() {
        let v = violations("gas.gamma = 0.5\nbogus.key = 3\ngrid.nt = 8\ngrid.cfl = 1.0\ngas.P = abc\nno equals sign");
        assert_eq!(v.len(), 6, "{v:?}");
        assert!(v.iter().any(|m| m.contains("unknown key `bogus.key`")));
        assert!(v.iter().any(|m| m.contains("grid.nt must be at least 16")));
        assert!(v.iter().any(|m| m.contains("grid.cfl")));
        assert!(v.iter().any(|m| m.contains("`abc` is not a finite number")));
    }

    #[test]
    fn duplicate_keys_rejected() {
        let v = violations("gas.gamma = 2\ngas.gamma = 3");
        assert!(v[0].contains("already set on line 1"));
    }

    #[test]
    fn scientific_notation_and_series() {
        let c = parse_config(
            "solver.tol = 1e-12\nboundary.eps = 2.5E-2\nboundary.phi1_sin = 0.001, 0.0005\nboundary.phi2_mean = -1e-3",
        )
        .unwrap();
        assert_eq!(c.solver.tol, 1e-12);
        assert_eq!(c.boundary.eps, 0.025);
        assert_eq!(c.boundary.phi1b.sin, vec![0.001, 0.0005]);
        assert_eq!(c.boundary.phi2b.mean, -1e-3);
        assert!(c.boundary.phi2b.cos.is_empty());
    }

    #[test]
    fn friction_series() {
        let c = parse_config(
            "friction.kind = trig_series\nfriction.cos_0 = 0.3, 0, 0\nfriction.cos_1 = 0, 0.1, 0\nfriction.c0 = 1.0",
        )
        .unwrap();
        assert!((c.friction.value_at(0.0, 1.0, 1.0) - 0.4).abs() < 1e-15);
        assert_eq!(c.friction.c0_claimed, 1.0);

        let v = violations("friction.kind = trig_series\nfriction.cos_1 = 0, 0.1");
        assert_eq!(v.len(), 3, "{v:?}");
        let v = violations("friction.cos_1 = 1, 0, 0");
        assert!(v[0].contains("needs friction.kind = trig_series"));
    }
}
