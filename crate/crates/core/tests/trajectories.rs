mod common;

use superladder_core::dynamics::*;
use superladder_core::integrals::{build_integrals, build_pair, pair_exponents};
use superladder_core::{PhasePoint, Sign, SystemSpec};

const TAU: f64 = std::f64::consts::TAU;

fn fig1_monitored(tol: f64) -> Trajectory {
    let spec = common::fig1();
    let set = build_integrals(&spec, &common::fitted(&spec), (3, 1)).unwrap();
    let mut tr = integrate(&spec, &common::fig1_init(), 20.0, tol, DEFAULT_SAMPLES).unwrap();
    for (name, z) in [("K", &set.k), ("X1", &set.x1), ("X2", &set.x2)] {
        tr.monitor(name, z).unwrap();
    }
    tr
}

#[test]
fn harmonic_period_is_exact() {
    let d = Dynamics::new(vec![AxisDynamics::harmonic(1.0)]).unwrap();
    let init = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
    let tr = integrate_at(&d, &init, &uniform_times(TAU, 1000), 1e-10).unwrap();
    let end = tr.final_state();
    assert!((end.x()[0] - 1.0).abs() < 1e-8 && end.p()[0].abs() < 1e-8);
    let mut dp = [0.0];
    d.force(&[1.0], &mut dp);
    assert_eq!(dp[0], -1.0);
}

#[test]
fn equilibrium_is_a_fixed_point() {
    // b = 0, eps = +1: minimum at x = 0 where the force vanishes
    let spec = common::spec(2.0, &[1], &[0.0]);
    let (dx, dp) = hamilton_rhs(&spec, &PhasePoint::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
    assert_eq!((dx[0], dp[0]), (0.0, 0.0));
}

#[test]
fn trajectory_shape() {
    let tr = fig1_monitored(1e-10);
    assert_eq!(tr.times.len(), DEFAULT_SAMPLES);
    assert_eq!(tr.states.len(), tr.times.len());
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*tr.times.last().unwrap(), 20.0);
    assert!(tr.monitors.iter().all(|(_, v)| v.len() == tr.times.len()));
}

#[test]
fn fig1_conserves_its_integrals() {
    let tr = fig1_monitored(1e-10);
    assert!(tr.energy_drift() <= 1e-8, "{}", tr.energy_drift());
    for (name, d) in tr.monitor_drifts() {
        assert!(d <= 1e-6, "{name}: {d}");
    }
}

#[test]
fn fig2_conserves_its_integrals() {
    let spec = common::fig2();
    let set = build_integrals(&spec, &common::fitted(&spec), (4, 3)).unwrap();
    let mut tr = integrate(&spec, &common::fig1_init(), 20.0, 1e-10, DEFAULT_SAMPLES).unwrap();
    for (name, z) in [("K", &set.k), ("X1", &set.x1), ("X2", &set.x2)] {
        tr.monitor(name, z).unwrap();
    }
    assert!(tr.energy_drift() <= 1e-8);
    for (name, d) in tr.monitor_drifts() {
        assert!(d <= 1e-6, "{name}: {d}");
    }
}

#[test]
fn three_axis_presets_conserve_pair_integrals() {
    for spec in [common::fig3(), common::fig4()] {
        let ladders = common::fitted(&spec);
        let mut tr = integrate(&spec, &common::fig3_init(), 20.0, 1e-10, DEFAULT_SAMPLES).unwrap();
        for pair in [(0, 1), (1, 2), (0, 2)] {
            let s = build_pair(&spec, &ladders, pair, pair_exponents(&spec, pair)).unwrap();
            tr.monitor(s.k.name().to_string(), &s.k).unwrap();
        }
        assert!(tr.energy_drift() <= 1e-8);
        for (name, d) in tr.monitor_drifts() {
            assert!(d <= 1e-6, "{name}: {d}");
        }
    }
}

#[test]
fn time_reversal_returns_to_start() {
    let spec = common::fig1();
    let tol = 1e-11;
    let init = common::fig1_init();
    let fwd = integrate(&spec, &init, 5.0, tol, 2).unwrap();
    let end = fwd.final_state();
    let back_init = PhasePoint::new(end.x().to_vec(), end.p().iter().map(|v| -v).collect()).unwrap();
    let back = integrate(&spec, &back_init, 5.0, tol, 2).unwrap();
    let fin = back.final_state();
    let d: f64 = fin.x().iter().zip(init.x()).chain(fin.p().iter().map(|v| -v).collect::<Vec<_>>().iter().zip(init.p()))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    // budget: one local tolerance per accepted step, both legs
    let budget = tol * (fwd.stats.accepted + back.stats.accepted) as f64;
    assert!(d <= 10.0 * budget, "{d} vs {budget}");
}

#[test]
fn fig1_closes_at_the_predicted_period() {
    let spec = common::fig1();
    assert!((predict_period(&spec) - 2.0 * TAU / 3.0).abs() < 1e-15);
    let c = closure_test(&spec, &common::fig1_init(), 1e-11, DEFAULT_CLOSURE_EPS).unwrap();
    assert!(c.closed, "{c:?}");
    assert!(c.best_distance <= c.return_distance);
}

#[test]
fn half_period_is_not_a_return() {
    // the ladder frequency k w is twice the orbital frequency
    let spec = common::fig1();
    let c = closure_at(&Dynamics::from_spec(&spec), &common::fig1_init(), TAU / 3.0, 1e-11, DEFAULT_CLOSURE_EPS).unwrap();
    assert!(!c.closed && c.return_distance > 1.0);
}

#[test]
fn closure_converges_with_tolerance() {
    let spec = common::fig1();
    let d: Vec<f64> = [1e-8, 5e-9, 2.5e-9, 1.25e-9]
        .iter()
        .map(|tol| closure_test(&spec, &common::fig1_init(), *tol, 1e-4).unwrap().return_distance)
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn incommensurate_control_does_not_close() {
    let spec = common::fig1();
    let d = Dynamics::from_spec(&spec).with_frequency(1, 3.0 * spec.omega * 2f64.sqrt()).unwrap();
    let c = closure_at(&d, &common::fig1_init(), predict_period(&spec), 1e-11, DEFAULT_CLOSURE_EPS).unwrap();
    assert!(!c.closed && c.best_distance > 1e-2);
}

#[test]
fn every_preset_closes() {
    for (spec, init) in [
        (common::fig2(), common::fig1_init()),
        (common::fig3(), common::fig3_init()),
        (common::fig4(), common::fig3_init()),
    ] {
        let c = closure_test(&spec, &init, 1e-11, DEFAULT_CLOSURE_EPS).unwrap();
        assert!(c.closed, "{c:?}");
    }
}

#[test]
fn period_examples() {
    assert!((predict_period(&common::fig2()) - 2.0 * TAU / 3.0).abs() < 1e-15);
    let even = common::spec(1.0, &[2, 2], &[1.0, 1.0]);
    assert!((predict_period(&even) - TAU).abs() < 1e-15);
    let mixed = SystemSpec::new(1.0, vec![superladder_core::AxisParams::new(2, 0.0, Sign::Minus).unwrap()]).unwrap();
    assert!((predict_period(&mixed) - TAU).abs() < 1e-15);
}

#[test]
fn energy_drift_tracks_tolerance() {
    let spec = common::fig1();
    let drifts: Vec<f64> = [1e-8, 1e-10, 1e-12]
        .iter()
        .map(|tol| integrate(&spec, &common::fig1_init(), 20.0, *tol, DEFAULT_SAMPLES).unwrap().energy_drift())
        .collect();
    for (d, tol) in drifts.iter().zip([1e-8, 1e-10, 1e-12]) {
        assert!(*d <= 100.0 * tol, "{d} at {tol}");
    }
    assert!(drifts[1] < drifts[0] && drifts[2] < drifts[1]);
}

#[test]
fn leapfrog_fallback_is_second_order() {
    let spec = common::fig1();
    let d = Dynamics::from_spec(&spec);
    let init = common::fig1_init();
    let t = 1.0;
    let reference = integrate(&spec, &init, t, 1e-13, 2).unwrap();
    let exact = reference.final_state();
    let err = |steps: usize| {
        let z = leapfrog_solve(&d, &init, t / steps as f64, steps).unwrap();
        z.x().iter().zip(exact.x()).chain(z.p().iter().zip(exact.p())).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let ratio = err(2000) / err(4000);
    assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
}

#[test]
fn invalid_inputs_are_errors() {
    let spec = common::fig1();
    let one_d = PhasePoint::new(vec![1.0], vec![1.0]).unwrap();
    assert!(integrate(&spec, &one_d, 1.0, 1e-8, 10).is_err());
    assert!(integrate(&spec, &common::fig1_init(), 1.0, 0.0, 10).is_err());
    assert!(integrate(&spec, &common::fig1_init(), -1.0, 1e-8, 10).is_err());
    assert!(hamilton_rhs(&spec, &one_d).is_err());
    assert!(Dynamics::from_spec(&spec).with_frequency(5, 1.0).is_err());
}
