use std::f64::consts::{PI, TAU};

use pipeflow::boundary::{BoundaryData, TrigSeries};
use pipeflow::field::PeriodicField;
use pipeflow::fixed_point::Grid;
use pipeflow::friction::{validate_beta, FrictionSpec, TrigTerm};
use pipeflow::ibvp::{make_compatible_perturbation, BoundaryMode, Ibvp, IbvpState};
use pipeflow::model::{
    eigenvalues, from_riemann, lambdas, source_term, to_riemann, GasParams, Perturbation, PhysState, SpeedModel,
};
use pipeflow::stability::{fit_decay, monotone_fraction, run_stability_experiment, StabilityConfig};
use pipeflow::tracer::{trace_characteristic, Family};
use proptest::prelude::*;

fn unit() -> GasParams {
    GasParams::new(2.0, 1.0, 1.0, 1.0, 1.0).unwrap()
}

/// `(gamma, rho_bar, rho, u / c)` with `|u| < c`.
fn subsonic_state() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (1.01f64..4.0, 0.1f64..10.0, 1e-3f64..50.0, -0.999f64..0.999)
}

fn sound_speed(gamma: f64, rho: f64) -> f64 {
    gamma.sqrt() * rho.powf(0.5 * (gamma - 1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn riemann_round_trip((gamma, rho_bar, rho, mach) in subsonic_state()) {
        let p = GasParams::new(gamma, 1.0, rho_bar, 1.0, 1.0).unwrap();
        let c = sound_speed(gamma, rho);
        let s = PhysState { rho, u: mach * c };
        let back = from_riemann(to_riemann(s, &p).unwrap(), &p).unwrap();
        prop_assert!(((back.rho - s.rho) / s.rho).abs() <= 1e-12);
        prop_assert!(((back.u - s.u) / c).abs() <= 1e-12);
    }

    #[test]
    fn eigenvalues_are_u_minus_plus_c((gamma, rho_bar, rho, mach) in subsonic_state()) {
        let p = GasParams::new(gamma, 1.0, rho_bar, 1.0, 1.0).unwrap();
        let c = sound_speed(gamma, rho);
        let u = mach * c;
        let ev = eigenvalues(to_riemann(PhysState { rho, u }, &p).unwrap(), &p).unwrap();
        prop_assert!(((ev.lambda1 - (u - c)) / c).abs() <= 1e-12);
        prop_assert!(((ev.lambda2 - (u + c)) / c).abs() <= 1e-12);
        prop_assert!(ev.lambda1 < 0.0 && ev.lambda2 > 0.0);
        prop_assert!(ev.nu1 < 0.0 && ev.nu2 > 0.0);
    }

    #[test]
    fn speed_model_is_the_invariant_form(gamma in 1.01f64..4.0, phi1 in -0.1f64..0.1, phi2 in -0.1f64..0.1) {
        let p = GasParams::new(gamma, 1.0, 1.0, 1.0, 1.0).unwrap();
        let phi = Perturbation::new(phi1, phi2);
        let (a1, a2) = SpeedModel::new(&p).lambdas(phi);
        let (b1, b2) = lambdas(phi.to_riemann(&p), &p);
        prop_assert!((a1 - b1).abs() <= 1e-13 && (a2 - b2).abs() <= 1e-13);
    }

    #[test]
    fn source_is_odd(phi1 in -1.0f64..1.0, phi2 in -1.0f64..1.0, beta in -2.0f64..2.0, alpha in 0.1f64..3.0) {
        let p = GasParams::new(2.0, alpha, 1.0, 1.0, 1.0).unwrap();
        prop_assert_eq!(source_term(phi1, phi2, beta, &p), -source_term(-phi1, -phi2, beta, &p));
    }

    #[test]
    fn friction_series_is_exactly_periodic(
        c0 in -1.0f64..1.0,
        c1 in prop::array::uniform3(-0.5f64..0.5),
        s1 in prop::array::uniform3(-0.5f64..0.5),
        harmonic in 1u32..4,
    ) {
        let spec = FrictionSpec::trig_series(
            vec![
                TrigTerm { harmonic: 0, cos: [c0, 0.0, 0.0], sin: [0.0; 3] },
                TrigTerm { harmonic, cos: c1, sin: s1 },
            ],
            100.0,
        );
        let rep = validate_beta(&spec, &unit(), 64).unwrap();
        prop_assert_eq!(rep.periodicity_residual, 0.0);
    }

    #[test]
    fn interpolation_wraps_in_time(t in 0.0f64..1.0, x in 0.0f64..1.0, shift in -3i32..4) {
        let p = unit();
        let f = PeriodicField::from_fn(24, 17, &p, |t, x| {
            Perturbation::new(1e-2 * (TAU * t).sin() * (1.0 + x), 1e-2 * (TAU * t).cos() - x * 1e-3)
        });
        let a = f.interpolate(t, x).unwrap();
        let b = f.interpolate(t + shift as f64, x).unwrap();
        prop_assert!(a.dist(b) <= 1e-15);
    }

    #[test]
    fn reflective_k0_is_dirichlet(values in prop::collection::vec((-1e-2f64..1e-2, -1e-2f64..1e-2), 5..40), t in 0.0f64..1.0) {
        let p = unit();
        let bd = BoundaryData::single_mode(0.01, 1.0);
        let spec = FrictionSpec::constant(0.5);
        let s = IbvpState::new(t, values.iter().map(|&(a, b)| Perturbation::new(a, b)).collect());
        let d = Ibvp::new(&bd, &spec, &p);
        let r = Ibvp::new(&bd, &spec, &p).with_mode(BoundaryMode::reflective(0.0, 0.0).unwrap());
        let dt = d.max_dt(&s);
        let (a, b) = (d.step(&s, dt).unwrap(), r.step(&s, dt).unwrap());
        for (u, v) in a.values.iter().zip(&b.values) {
            prop_assert_eq!(u.phi1.to_bits(), v.phi1.to_bits());
            prop_assert_eq!(u.phi2.to_bits(), v.phi2.to_bits());
        }
    }

    #[test]
    fn bump_keeps_the_corners(values in prop::collection::vec((-1e-2f64..1e-2, -1e-2f64..1e-2), 3..40), a in -1e-2f64..1e-2) {
        let base: Vec<Perturbation> = values.iter().map(|&(x, y)| Perturbation::new(x, y)).collect();
        let out = make_compatible_perturbation(&base, a, &unit());
        prop_assert_eq!(out[0], base[0]);
        prop_assert_eq!(out[out.len() - 1], base[base.len() - 1]);
        for (o, b) in out.iter().zip(&base) {
            // one rounding of the sum on top of the bump height
            prop_assert!(o.dist(*b) <= a.abs() + f64::EPSILON * 1e-2);
        }
    }

    #[test]
    fn geometric_sequences_are_fitted(d0 in 1e-6f64..1.0, xi in 1e-3f64..0.99, len in 3usize..9) {
        let d: Vec<f64> = (0..len).map(|k| d0 * xi.powi(k as i32)).collect();
        let fit = fit_decay(&d, 0.0).unwrap();
        prop_assert!(fit.xi_hat > 0.0);
        prop_assert!((fit.xi_hat - xi).abs() <= 1e-9 * xi);
        prop_assert_eq!(monotone_fraction(&d), 1.0);
    }

    #[test]
    fn monotone_fraction_is_a_fraction(d in prop::collection::vec(0.0f64..1.0, 2..20)) {
        let m = monotone_fraction(&d);
        prop_assert!((0.0..=1.0).contains(&m));
    }

    #[test]
    fn trace_is_equivariant_under_period_shift(t0 in 0.0f64..1.0, x0 in 0.0f64..1.0, second in any::<bool>()) {
        let p = unit();
        let f = smooth_field(32, 33, &p);
        let fam = if second { Family::Second } else { Family::First };
        let a = trace_characteristic(fam, t0, x0, &f, &p).unwrap();
        let b = trace_characteristic(fam, t0 + p.period, x0, &f, &p).unwrap();
        prop_assert_eq!(a.samples.len(), b.samples.len());
        for (u, v) in a.samples.iter().zip(&b.samples) {
            prop_assert_eq!(u.x, v.x);
            prop_assert!((v.t - u.t - p.period).abs() <= 1e-12);
        }
    }
}

fn smooth_field(nt: usize, nx: usize, p: &GasParams) -> PeriodicField {
    PeriodicField::from_fn(nt, nx, p, |t, x| {
        Perturbation::new(
            0.05 * (TAU * t).sin() * (PI * x).cos(),
            0.04 * (TAU * t + 1.0).cos() * (1.0 + x * x),
        )
    })
}

#[test]
fn scaled_baseline_has_nu_max_at_most_one() {
    let p = unit();
    let nu_max = 1.0 / p.c_bar();
    assert!(nu_max <= 1.0);
    assert!((nu_max - 1.0 / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn path_slopes_follow_the_background() {
    let p = unit();
    let speeds = SpeedModel::new(&p);
    let f = smooth_field(64, 65, &p);
    for fam in [Family::First, Family::Second] {
        for &(t0, x0) in &[(0.1, 0.5), (0.77, 0.0), (0.3, 1.0), (0.9, 0.25)] {
            let path = trace_characteristic(fam, t0, x0, &f, &p).unwrap();
            for w in path.samples.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a.x == b.x {
                    continue;
                }
                let mid = f.interpolate(0.5 * (a.t + b.t), 0.5 * (a.x + b.x)).unwrap();
                let nu = fam.nu(mid, &speeds).unwrap();
                let slope = (b.t - a.t) / (b.x - a.x);
                assert!((slope - nu).abs() <= 10.0 * f.h_x().powi(2), "{fam:?} slope {slope} nu {nu}");
            }
        }
    }
}

#[test]
fn terminal_time_converges_at_second_order() {
    let p = unit();
    let reference = smooth_field(2048, 2049, &p);
    let end = |f: &PeriodicField, fam| trace_characteristic(fam, 0.3, 0.4, f, &p).unwrap().end().t;
    for fam in [Family::First, Family::Second] {
        let exact = end(&reference, fam);
        let errs: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&n| (end(&smooth_field(n, n + 1, &p), fam) - exact).abs())
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "{fam:?}: errors {errs:?}");
        }
    }
}

#[test]
fn zero_state_survives_many_steps() {
    let p = unit();
    let bd = BoundaryData::zero();
    let spec = FrictionSpec::constant(0.8);
    let prob = Ibvp::new(&bd, &spec, &p);
    let mut s = IbvpState::new(0.0, vec![Perturbation::ZERO; 9]);
    for _ in 0..100_000 {
        s = prob.step(&s, prob.max_dt(&s)).unwrap();
    }
    assert!(s.sup_norm() <= 1e-13);
}

#[test]
fn single_family_pulse_stays_in_its_family() {
    let p = unit();
    // sin^2 pulse for phi_2 entering at x = 0, nothing on phi_1
    let bd = BoundaryData {
        phi1b: TrigSeries::default(),
        phi2b: TrigSeries {
            mean: 5e-3,
            cos: vec![-5e-3],
            sin: vec![],
        },
        eps: 0.01 * PI,
    };
    let spec = FrictionSpec::constant(0.0);
    let traj = Ibvp::new(&bd, &spec, &p)
        .run(&vec![Perturbation::ZERO; 65], 1.0, 0.05)
        .unwrap();
    let mut reached = 0.0f64;
    for s in &traj.snapshots {
        for v in &s.values {
            assert!(v.phi1.abs() <= 1e-13);
            reached = reached.max(v.phi2.abs());
        }
    }
    assert!(reached > 5e-3);
}

/// Decay rate of the perturbation towards the upwind orbit started on the
/// periodic solution with the same steps.
fn orbit_rate(eps: f64) -> f64 {
    let cfg = StabilityConfig::new(
        unit(),
        FrictionSpec::constant(0.5),
        BoundaryData::single_mode(eps, 1.0),
        Grid::square(64),
        eps / 2.0,
    );
    let rep = run_stability_experiment(&cfg).unwrap();
    assert!(rep.distances.iter().all(|&d| d >= 0.0));
    rep.orbit_fit.unwrap().xi_hat
}

#[test]
fn decay_rate_shrinks_with_eps() {
    let rates: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&e| orbit_rate(e)).collect();
    for w in rates.windows(2) {
        assert!(w[1] > 0.0 && w[1] <= 1.1 * w[0], "{rates:?}");
    }
}
