use std::f64::consts::PI;

use rollsim_core::integrator::EventKind;
use rollsim_core::model::Geometry;
use rollsim_core::scenarios::{
    offset_metric, run_case1, run_case4, run_forward_locomotion, run_scenario, run_sweep, simulate,
    stability_boundaries, step_response, Direction, ScenarioSpec, StabilityClass, SweepParam, BUILTIN_NAMES,
};
use rollsim_core::{Error, RobotParams};

/// Brute-force step metrics of `1 - e^-t cos(10 t)` on a very fine grid.
fn damped_oscillation_reference() -> (f64, f64) {
    let n = 2_000_000;
    let t_end = 20.0;
    let mut peak = 0.0f64;
    let mut last_out = 0.0;
    for k in 0..=n {
        let t = t_end * k as f64 / n as f64;
        let dev = -(-t).exp() * (10.0 * t).cos();
        peak = peak.max(dev);
        if dev.abs() > 0.05 {
            last_out = t;
        }
    }
    (peak, last_out)
}

#[test]
fn settling_metrics_match_closed_form_signal() {
    let t: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.01).collect();
    let y: Vec<f64> = t.iter().map(|t| 1.0 - (-t).exp() * (10.0 * t).cos()).collect();
    // The sampled signal starts at 0 and ends at 1 - O(e^-20).
    let m = step_response(&t, &y, 0.05);
    let (peak, settle) = damped_oscillation_reference();
    // Closed-form peak: t* = (pi - atan(0.1)) / 10.
    let t_star = (PI - 0.1f64.atan()) / 10.0;
    let closed = (-t_star).exp() * (10.0 * t_star).cos().abs();
    assert!((peak - closed).abs() < 1e-9);
    assert!((m.overshoot - closed).abs() < 2e-3, "{} vs {closed}", m.overshoot);
    assert!((m.settling_time - settle).abs() < 5e-3, "{} vs {settle}", m.settling_time);
    assert!(m.settled);
}

#[test]
fn non_settling_signal_is_flagged() {
    let t: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.01).collect();
    let y: Vec<f64> = t.iter().map(|t| t + (5.0 * t).sin()).collect();
    assert!(!step_response(&t, &y, 0.05).settled);
}

#[test]
fn builtins_resolve_and_round_trip() {
    let p = RobotParams::default();
    for name in BUILTIN_NAMES {
        let spec = ScenarioSpec::builtin(name, &p).unwrap();
        let text = spec.to_toml_string().unwrap();
        let back = ScenarioSpec::from_toml_str(&text).unwrap();
        assert_eq!(back.name, spec.name);
        assert_eq!(back.x0, spec.x0);
        assert_eq!(back.sweep, spec.sweep);
        assert_eq!(back.torque, spec.torque);
    }
    assert!(matches!(ScenarioSpec::builtin("case9", &p), Err(Error::UnknownScenario(_))));
}

#[test]
fn forward_uses_reference_torque() {
    let spec = ScenarioSpec::builtin("forward", &RobotParams::default()).unwrap();
    assert_eq!(spec.torque, -0.075);
    assert!(spec.controller.enabled);
}

#[test]
fn case1_bottom_start_stays_put() {
    let r = run_case1(&RobotParams::default(), &[-PI]).unwrap();
    assert!(r[0].1.final_theta.abs() < 1e-6);
}

#[test]
fn case1_upper_quadrant_drifts_backward() {
    let r = run_case1(&RobotParams::default(), &[-2.0 * PI / 3.0, -3.0 * PI / 4.0, -5.0 * PI / 6.0]).unwrap();
    for (g0, m) in r {
        assert_eq!(Direction::of(m.final_theta), Direction::Backward, "gamma0 = {g0}");
    }
}

#[test]
fn case2_zero_rate_matches_case1() {
    let p = RobotParams::default();
    let c1 = simulate(&ScenarioSpec::builtin("case1", &p).unwrap().at(SweepParam::Gamma0, -3.0 * PI / 4.0).unwrap())
        .unwrap();
    let c2 = simulate(&ScenarioSpec::builtin("case2", &p).unwrap().at(SweepParam::ThetaDot0, 0.0).unwrap()).unwrap();
    assert_eq!(c1.samples, c2.samples);
}

#[test]
fn case2_sphere_follows_initial_rate() {
    let spec = ScenarioSpec::builtin("case2", &RobotParams::default()).unwrap();
    let report = run_sweep(&spec, Some(&[PI / 2.0, PI])).unwrap();
    for row in &report.rows {
        assert!(row.metrics.final_theta > 0.0, "{}", row.value);
    }
    assert!(report.rate_slope.is_some());
}

#[test]
fn offset_of_identical_runs_is_zero_and_range_checked() {
    let spec = ScenarioSpec::builtin("baseline", &RobotParams::default()).unwrap();
    let a = simulate(&spec).unwrap();
    assert_eq!(offset_metric(&a, &a, spec.t_end).unwrap(), 0.0);
    assert!(matches!(offset_metric(&a, &a, spec.t_end + 1.0), Err(Error::Range { .. })));
}

#[test]
fn case4_gb_run_never_swings_back() {
    let r = run_case4(&RobotParams::default()).unwrap();
    assert!(r.gb_min_theta_dot >= -0.05, "{}", r.gb_min_theta_dot);
}

#[test]
fn case4_offset_vanishes_for_circular_gb() {
    let base = RobotParams::default();
    let g = Geometry { semi_minor: base.geometry.semi_major, ..base.geometry };
    let r = run_case4(&base.with_geometry(g).unwrap()).unwrap();
    assert_eq!(r.offset, 0.0);
}

#[test]
fn baseline_has_no_jumps_and_mirrors_under_negated_torque() {
    let p = RobotParams::default();
    let spec = ScenarioSpec::builtin("baseline", &p).unwrap();
    let a = simulate(&spec).unwrap();
    assert_eq!(a.events_of(EventKind::GbExit).count(), 0);
    assert_eq!(a.events.len(), 0);
    let mirrored = ScenarioSpec { x0: -spec.x0, torque: -spec.torque, ..spec.clone() };
    let b = simulate(&mirrored).unwrap();
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        let (xa, xb) = (sa.state.to_array(), sb.state.to_array());
        for i in 0..4 {
            assert!((xa[i] + xb[i]).abs() <= 1e-9 * xa[i].abs().max(1.0));
        }
    }
}

#[test]
fn baseline_without_torque_is_case1() {
    let p = RobotParams::default();
    let spec = ScenarioSpec { torque: 0.0, t_end: 15.0, ..ScenarioSpec::builtin("baseline", &p).unwrap() };
    let case1 = ScenarioSpec::builtin("case1", &p).unwrap().at(SweepParam::Gamma0, -PI / 2.0).unwrap();
    assert_eq!(simulate(&spec).unwrap().samples, simulate(&case1).unwrap().samples);
}

#[test]
fn forward_run_logs_gb_passes() {
    let r = run_forward_locomotion(&RobotParams::default()).unwrap();
    assert!(r.metrics.gb_entries > 0);
    assert!(!r.metrics.jump_events.is_empty());
    let exits = r.forward.events_of(EventKind::GbExit).count();
    assert_eq!(exits, r.metrics.jump_events.len());
    for e in &r.forward.events {
        assert!(e.t >= 0.0 && e.t <= 10.0);
    }
    assert!(r.metrics.offset_vs_baseline.is_some());
}

#[test]
fn reruns_are_bit_identical() {
    let spec = ScenarioSpec::builtin("forward", &RobotParams::default()).unwrap();
    let (a, b) = (run_scenario(&spec).unwrap(), run_scenario(&spec).unwrap());
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.metrics, b.metrics);
}

#[test]
fn samples_are_evenly_spaced() {
    let traj = simulate(&ScenarioSpec::builtin("forward", &RobotParams::default()).unwrap()).unwrap();
    assert_eq!(traj.samples.len(), 1001);
    for (k, s) in traj.samples.iter().enumerate() {
        assert!((s.t - k as f64 * 0.01).abs() < 1e-12);
    }
}

#[test]
fn sweep_rows_follow_grid_order() {
    let spec = ScenarioSpec::builtin("mass-sweep", &RobotParams::default()).unwrap();
    let grid = [0.3, 0.1, 0.2];
    let r = run_sweep(&spec, Some(&grid)).unwrap();
    let values: Vec<f64> = r.rows.iter().map(|row| row.value).collect();
    assert_eq!(values, grid);
    assert!(matches!(run_sweep(&spec, Some(&[])), Err(Error::EmptyGrid)));
}

#[test]
fn boundaries_bracket_the_settled_run() {
    use StabilityClass::{Abnormal as X, SettledUnderdamped as S};
    let rows = [(0.06, X), (0.1, S), (0.2, S), (0.3, S), (0.4, X)];
    let b = stability_boundaries(&rows, 0.25);
    assert_eq!(b.lower, Some(0.08));
    assert_eq!(b.upper, Some(0.35));
}
