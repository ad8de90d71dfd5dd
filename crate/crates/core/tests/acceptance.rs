//! Acceptance report: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rollsim_core::controller::{
    gate_port_config, gb_crossing_condition, gb_entry_condition, ControllerConfig, CycleLabel, Gate, Port,
};
use rollsim_core::dynamics::{forward_dynamics, total_energy, DynamicsBackend, PathMode, State};
use rollsim_core::hydraulics::{actuation_feasible, core_torque, transmitted_force, HydraulicParams};
use rollsim_core::integrator::{integrate, FnSystem, IntegratorConfig};
use rollsim_core::model::{derive_inertias, inertia_discrepancies, Friction, Geometry, Masses, RobotParams};
use rollsim_core::oracle::{backend_diff_report, relative_error, LagrangianOracle};
use rollsim_core::scenarios::{
    mass_ratio_sweep, run_case1, run_case3, run_case4, run_forward_locomotion, simulate, ScenarioSpec,
};

const ORACLE_TOL: f64 = 1e-6;
const ORACLE_STATES: usize = 1000;
const ENERGY_DRIFT: f64 = 1e-6;
const ENERGY_SLACK: f64 = 1e-9;
const STILL_TOL: f64 = 1e-6;
const CASE3_TARGET: f64 = 2.0 * PI;
const CASE3_REL: f64 = 0.20;
const CASE4_OFFSET: f64 = 4.82;
const CASE4_REL: f64 = 0.25;
const CASE4_MIN_RATE: f64 = -0.05;
const MASS_LOWER: (f64, f64) = (0.08, 0.12);
const MASS_UPPER: (f64, f64) = (0.28, 0.35);
const MASS_OVERSHOOT: f64 = 0.05;
const MASS_SETTLING: f64 = 5.2;
const MASS_REL: f64 = 0.30;
const FORWARD_OFFSET: f64 = 7.713;
const FORWARD_REL: f64 = 0.25;
const FIRST_JUMP_GAMMA: f64 = -6.23;
const FIRST_JUMP_REL: f64 = 0.15;
const MONOTONE_TOL: f64 = 1e-3;
const BASELINE_SWINGS: usize = 3;
const STRICT_SAMPLES: usize = 100_000;
const HYDRAULIC_REL: f64 = 1e-10;
const RK4_SLOPE: f64 = 4.0;
const RK4_SLOPE_TOL: f64 = 0.2;
const ADAPTIVE_FACTOR: f64 = 10.0;

type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

fn sig4(x: f64) -> f64 {
    let mag = 10f64.powf(x.abs().log10().floor() - 3.0);
    (x / mag).round() * mag
}

fn random_states(n: usize, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut a = || rng.gen_range(-2.0 * PI..2.0 * PI);
            State::new(a(), a(), a(), a())
        })
        .collect()
}

fn c1_inertias() -> Outcome {
    let geometry = Geometry { radius: 0.145, semi_minor: 0.045, semi_major: 0.131, core_radius: 0.02 };
    let masses = Masses { shell: 1.0, core: 0.25, turner_increment: 0.01, turner_core: 0.26 };
    let i = derive_inertias(&geometry, &masses);
    let flagged = inertia_discrepancies(&i, Some(0.0140), Some(0.0402), Some(7.7440e-4));
    let is_ok = sig4(i.sphere) == sig4(0.0140);
    let gb_ok = sig4(i.core_gb) == sig4(7.7440e-4);
    let mm_logged = flagged.iter().any(|d| d.name == "I_c_MM");
    Outcome {
        pass: is_ok && gb_ok && mm_logged,
        detail: format!(
            "I_s = {:.4e} (target 1.400e-2), I_c_GB = {:.4e} (target 7.744e-4), I_c_MM = {:.4e} vs supplied 0.0402 logged: {mm_logged}",
            sig4(i.sphere),
            sig4(i.core_gb),
            i.core_mm
        ),
    }
}

fn c2_oracle() -> Outcome {
    let p = RobotParams::default();
    let states = random_states(ORACLE_STATES, 2024);
    let mut worst = 0.0f64;
    for mode in [PathMode::MomentumMaker, PathMode::GravityBreaker] {
        let oracle = LagrangianOracle::new(&p, mode);
        for (k, s) in states.iter().enumerate() {
            let tau = if k % 2 == 0 { 0.0 } else { -0.075 };
            let acc = forward_dynamics(s, &p, mode, DynamicsBackend::Derived, tau).expect("nonsingular");
            worst = worst.max(relative_error([acc.theta_ddot, acc.gamma_ddot], oracle.accelerations(s, tau)));
        }
    }
    let report = backend_diff_report(&p, PathMode::GravityBreaker, &states, 0.0).expect("report");
    Outcome {
        pass: worst <= ORACLE_TOL,
        detail: format!(
            "derived max rel err {worst:.2e} over {} states x 2 pipes; paper backend max rel err {:.2e}",
            ORACLE_STATES, report.paper.max_relative_error
        ),
    }
}

fn energy_run(params: &RobotParams, x0: State, mode: PathMode) -> Vec<f64> {
    let mut spec = ScenarioSpec::builtin("case1", params).expect("builtin");
    spec.sweep = None;
    spec.x0 = x0;
    spec.mode0 = mode;
    spec.t_end = 10.0;
    spec.integrator = spec.integrator.with_tolerance(1e-9, 1e-12);
    let traj = simulate(&spec).expect("simulation");
    traj.samples.iter().map(|s| total_energy(&s.state, params, mode)).collect()
}

fn c3_energy() -> Outcome {
    let starts = [State::new(0.0, 0.0, -3.0 * PI / 4.0, 0.0), State::new(0.0, 1.0, -PI / 2.0, -2.0)];
    let lossless = RobotParams::default()
        .with_friction(Friction { sphere: 0.0, core_mm: 0.0, core_gb: 0.0 })
        .expect("valid");
    let lossy = RobotParams::default();
    let mut drift = 0.0f64;
    let mut rise = f64::NEG_INFINITY;
    for x0 in starts {
        for mode in [PathMode::MomentumMaker, PathMode::GravityBreaker] {
            let e = energy_run(&lossless, x0, mode);
            drift = drift.max(e.iter().map(|v| ((v - e[0]) / e[0]).abs()).fold(0.0, f64::max));
            let e = energy_run(&lossy, x0, mode);
            rise = rise.max(e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
        }
    }
    Outcome {
        pass: drift <= ENERGY_DRIFT && rise <= ENERGY_SLACK,
        detail: format!("max relative drift {drift:.2e} (zeta = 0); largest per-sample rise {rise:.2e} J (zeta > 0)"),
    }
}

fn c4_case1() -> Outcome {
    let grid = [-PI / 2.0, -2.0 * PI / 3.0, -3.0 * PI / 4.0, -5.0 * PI / 6.0, -PI];
    let r = run_case1(&RobotParams::default(), &grid).expect("case 1");
    let th: Vec<f64> = r.iter().map(|(_, m)| m.final_theta).collect();
    let forward = th[0] > 0.0;
    let backward = th[1..4].iter().all(|t| *t < 0.0);
    let still = th[4].abs() < STILL_TOL;
    Outcome {
        pass: forward && backward && still,
        detail: format!(
            "final theta: -pi/2 {:+.4e}, -2pi/3 {:+.4e}, -3pi/4 {:+.4e}, -5pi/6 {:+.4e}, -pi {:+.1e}",
            th[0], th[1], th[2], th[3], th[4]
        ),
    }
}

fn c5_case3() -> Outcome {
    let grid: Vec<f64> = (0..25).map(|k| -3.0 * PI + f64::from(k) * PI / 4.0).collect();
    let r = run_case3(&RobotParams::default(), &grid).expect("case 3");
    let rev = r.reversal.expect("reversal report");
    let neg_ok = rev.negative_threshold.is_some_and(|t| within(t, CASE3_TARGET, CASE3_REL));
    let pos_ok = rev.positive_threshold.is_some_and(|t| t >= (1.0 - CASE3_REL) * CASE3_TARGET);
    Outcome {
        pass: neg_ok && pos_ok,
        detail: format!(
            "negative-branch threshold {:?} rad/s, positive-branch threshold {:?} rad/s (target 2pi = {:.3}); monotone {}/{}",
            rev.negative_threshold, rev.positive_threshold, CASE3_TARGET, rev.monotone_negative, rev.monotone_positive
        ),
    }
}

fn c6_case4() -> Outcome {
    let r = run_case4(&RobotParams::default()).expect("case 4");
    Outcome {
        pass: within(r.offset, CASE4_OFFSET, CASE4_REL) && r.gb_min_theta_dot >= CASE4_MIN_RATE,
        detail: format!(
            "offset {:.4} rad (target 4.82 +-25%), GB min theta_dot {:.3e} rad/s (>= -0.05)",
            r.offset, r.gb_min_theta_dot
        ),
    }
}

fn c7_mass_sweep() -> Outcome {
    let p = RobotParams::default();
    let grid: Vec<f64> = (1..=25).map(|k| 0.02 * f64::from(k)).collect();
    let sweep = mass_ratio_sweep(&p, &grid).expect("sweep");
    let b = sweep.boundaries.expect("boundaries");
    let nominal = mass_ratio_sweep(&p, &[0.25]).expect("nominal");
    let m = &nominal.rows[0].metrics;
    let in_range = |x: Option<f64>, (lo, hi): (f64, f64)| x.is_some_and(|v| v >= lo && v <= hi);
    let pass = in_range(b.lower, MASS_LOWER)
        && in_range(b.upper, MASS_UPPER)
        && within(m.overshoot, MASS_OVERSHOOT, MASS_REL)
        && within(m.settling_time, MASS_SETTLING, MASS_REL);
    let abnormal = sweep.rows.iter().filter(|r| r.classification == "abnormal").count();
    Outcome {
        pass,
        detail: format!(
            "boundaries lower {:?} upper {:?} ({abnormal}/{} abnormal); m*=0.25 overshoot {:.3}, settling {:.2} s",
            b.lower,
            b.upper,
            sweep.rows.len(),
            m.overshoot,
            m.settling_time
        ),
    }
}

fn c8_forward() -> Outcome {
    let r = run_forward_locomotion(&RobotParams::default()).expect("forward run");
    let offset = r.metrics.offset_vs_baseline.unwrap_or(f64::NAN);
    let first = r.metrics.jump_events.first().map(|j| j.gamma);
    let pass = within(offset, FORWARD_OFFSET, FORWARD_REL)
        && first.is_some_and(|g| within(g, FIRST_JUMP_GAMMA, FIRST_JUMP_REL))
        && r.max_backward_after_jump.is_some_and(|d| d <= MONOTONE_TOL)
        && r.baseline_sign_changes >= BASELINE_SWINGS;
    Outcome {
        pass,
        detail: format!(
            "offset {offset:.4} rad (target 7.713 +-25%), first GB exit gamma {first:?} (target -6.23 +-15%), \
             max backward step after it {:?} rad, baseline theta_dot sign changes {}",
            r.max_backward_after_jump, r.baseline_sign_changes
        ),
    }
}

fn c9_controller() -> Outcome {
    use Gate::{I, II, III};
    use Port::{IT, O, ST};
    let table = [
        ([II, II, I, II], [O, IT, ST, O]),
        ([II, I, I, II], [IT, O, ST, O]),
        ([I, II, II, I], [O, ST, IT, O]),
        ([II, I, I, II], [IT, O, ST, O]),
        ([II, I, II, II], [IT, ST, ST, O]),
        ([I, II, III, III], [ST, O, O, IT]),
        ([I, III, III, I], [ST, O, IT, O]),
        ([III, II, I, I], [O, IT, O, ST]),
    ];
    let rows_ok = CycleLabel::ALL.iter().zip(&table).all(|(c, row)| gate_port_config(*c) == *row);

    let c = ControllerConfig::default();
    let entry_fixtures = [
        (State::new(PI, 1.0, 2.0 * PI, -5.0), true),
        (State::new(PI / 2.0, 1.0, 2.0 * PI, -5.0), false),
        (State::new(PI / 2.0, 1.0, PI, -5.0), false),
        (State::new(0.1, 1.0, PI, -5.0), true),
        (State::new(PI, -1.0, 0.0, -5.0), false),
        (State::new(PI, 1.0, 0.0, 5.0), false),
        (State::new(0.0, 0.0, 0.0, 0.0), false),
    ];
    let crossing_fixtures = [(PI / 2.0, true), (0.0, false), (2.0, true), (-PI, false), (-2.0, true)];
    let entry_ok = entry_fixtures.iter().all(|(s, want)| gb_entry_condition(s, &c) == *want);
    let crossing_ok = crossing_fixtures
        .iter()
        .all(|(g, want)| gb_crossing_condition(&State::new(0.0, 0.0, *g, 0.0), &c) == *want);

    let strict = ControllerConfig { strict_paper_constraints: true, ..c };
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut branch2_fired = 0;
    for _ in 0..STRICT_SAMPLES {
        let s = State::new(
            rng.gen_range(-2.0 * PI..2.0 * PI),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-2.0 * PI..2.0 * PI),
            rng.gen_range(-10.0..10.0),
        );
        let (st, ct) = s.theta.sin_cos();
        let (sg, cg) = s.gamma.sin_cos();
        let rates = s.theta_dot >= 0.0 && s.gamma_dot <= 0.0;
        let branch1 = ct <= -0.95 && st >= -0.2 && rates && cg >= 0.9 && sg <= 0.2;
        if gb_entry_condition(&s, &strict) && !branch1 {
            branch2_fired += 1;
        }
    }
    Outcome {
        pass: rows_ok && entry_ok && crossing_ok && branch2_fired == 0,
        detail: format!(
            "table rows {rows_ok}, entry fixtures {entry_ok}, crossing fixtures {crossing_ok}, \
             strict branch 2 fired {branch2_fired}/{STRICT_SAMPLES}"
        ),
    }
}

fn c10_hydraulics() -> Outcome {
    let r_c: f64 = 0.01;
    let example = HydraulicParams {
        core_mass: 0.25,
        displaced_fluid_mass: 0.0,
        pressure_difference: 0.0,
        core_area: PI * r_c * r_c,
        actuator_force: 10.0,
        bore_diameter: 0.02,
        rod_diameter: 0.01,
        circuits: 1,
    };
    let f = transmitted_force(&example).expect("valid cylinder");
    // 8 r_c^2 F (2 D1^2 - D2^2) / (D1^2 (D1^2 - D2^2)) = 140/3 N for this cylinder.
    let exact = 140.0 / 3.0;
    let force_ok = ((f - exact) / exact).abs() <= HYDRAULIC_REL;

    let tied = HydraulicParams { core_mass: f, pressure_difference: 0.0, ..example };
    let strict_ok = !actuation_feasible(&tied, 1.0).expect("valid");
    let tau = core_torque(&RobotParams::default(), -1).expect("feasible");
    let tau_ok = tau == -0.075;
    Outcome {
        pass: force_ok && strict_ok && tau_ok,
        detail: format!("F_c_T = {f:.10} N (exact {exact:.10}), equality infeasible: {strict_ok}, default tau = {tau:e} N·m"),
    }
}

fn c11_integrator() -> Outcome {
    let err_at = |cfg: &IntegratorConfig| {
        let mut sys = FnSystem(|_t: f64, x: &[f64; 2]| [x[1], -x[0]]);
        let sol = integrate(&mut sys, [1.0, 0.0], cfg).expect("integration");
        let t = *sol.times.last().expect("samples");
        let x = sol.states.last().expect("samples");
        (x[0] - t.cos()).abs().max((x[1] + t.sin()).abs())
    };
    let mut worst_ratio = 0.0f64;
    for tol in [1e-6, 1e-8, 1e-10] {
        let cfg = IntegratorConfig { max_step: 1.0, ..IntegratorConfig::default() }
            .with_t_end(10.0)
            .with_tolerance(tol, tol);
        worst_ratio = worst_ratio.max(err_at(&cfg) / tol);
    }
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| {
            let cfg = IntegratorConfig { sample_dt: 0.1, fixed_step: Some(h), ..IntegratorConfig::default() }
                .with_t_end(10.0);
            (h.ln(), err_at(&cfg).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    Outcome {
        pass: worst_ratio <= ADAPTIVE_FACTOR && (slope - RK4_SLOPE).abs() <= RK4_SLOPE_TOL,
        detail: format!("adaptive error / tolerance <= {worst_ratio:.2}; fixed-step convergence slope {slope:.3}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "inertia reproduction", Duration::from_millis(1), c1_inertias),
        (2, "oracle equivalence", Duration::from_secs(10), c2_oracle),
        (3, "energy properties", Duration::from_secs(5), c3_energy),
        (4, "case 1 directions", Duration::from_secs(10), c4_case1),
        (5, "case 3 reversal thresholds", Duration::from_secs(60), c5_case3),
        (6, "case 4 pipe offset", Duration::from_secs(10), c6_case4),
        (7, "mass-ratio sweep", Duration::from_secs(120), c7_mass_sweep),
        (8, "forward locomotion", Duration::from_secs(30), c8_forward),
        (9, "controller tables and predicates", Duration::from_secs(5), c9_controller),
        (10, "hydraulics", Duration::from_millis(1), c10_hydraulics),
        (11, "integrator order", Duration::from_secs(10), c11_integrator),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "[{}] {id:>2} {name} ({:.3} s, budget {:.3} s{}): {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64(),
            if in_time { "" } else { ", over budget" },
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
