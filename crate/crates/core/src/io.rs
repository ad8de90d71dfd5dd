//! CSV and JSON artifacts.
//!
//! `trajectory.csv` has the columns `t, theta, theta_dot, gamma, gamma_dot, mode,
//! region, energy`. Floats are written with 17 significant digits so that
//! reading the file back reproduces the sampled values exactly.

use std::io::{Read, Write};

use serde::Serialize;

use crate::dynamics::{total_energy, State};
use crate::error::{Error, Result};
use crate::integrator::{Sample, Trajectory};
use crate::model::RobotParams;
use crate::scenarios::SweepReport;

pub const TRAJECTORY_COLUMNS: [&str; 8] = ["t", "theta", "theta_dot", "gamma", "gamma_dot", "mode", "region", "energy"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One parsed row of `trajectory.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub sample: Sample,
    pub energy: f64,
}

pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory, params: &RobotParams) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_COLUMNS)?;
    for s in &traj.samples {
        let x = s.state;
        out.write_record([
            fmt_f64(s.t),
            fmt_f64(x.theta),
            fmt_f64(x.theta_dot),
            fmt_f64(x.gamma),
            fmt_f64(x.gamma_dot),
            s.mode.as_str().to_owned(),
            s.region.as_str().to_owned(),
            fmt_f64(total_energy(&x, params, s.mode)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(r: R) -> Result<Vec<TrajectoryRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(TRAJECTORY_COLUMNS) {
        return Err(Error::Config(format!("unexpected trajectory columns: {headers:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::Config(format!("row {}: bad `{}` value `{}`", line + 1, TRAJECTORY_COLUMNS[i], &rec[i])))
        };
        rows.push(TrajectoryRow {
            sample: Sample {
                t: num(0)?,
                state: State::new(num(1)?, num(2)?, num(3)?, num(4)?),
                mode: rec[5].parse()?,
                region: rec[6].parse()?,
            },
            energy: num(7)?,
        });
    }
    Ok(rows)
}

pub fn write_json<W: Write, T: Serialize>(w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(w, value)?;
    Ok(())
}

/// One row per grid point: the swept value, headline metrics and the class.
pub fn write_sweep_csv<W: Write>(w: W, report: &SweepReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        report.parameter.as_str(),
        "final_theta",
        "overshoot",
        "settling_time",
        "settled_at",
        "min_theta_dot",
        "reversal_threshold",
        "classification",
    ])?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in &report.rows {
        let m = &r.metrics;
        out.write_record([
            fmt_f64(r.value),
            fmt_f64(m.final_theta),
            fmt_f64(m.overshoot),
            fmt_f64(m.settling_time),
            opt(m.settled_at),
            fmt_f64(m.min_theta_dot),
            opt(m.reversal_threshold),
            r.classification.clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
