//! SVG time-series plots of a run and its reference.

use std::path::Path;

use anyhow::{anyhow, Result};
use plotters::prelude::*;
use rollsim_core::dynamics::State;
use rollsim_core::integrator::Trajectory;

const SIZE: (u32, u32) = (800, 480);

struct Panel {
    file: &'static str,
    label: &'static str,
    pick: fn(&State) -> f64,
}

const PANELS: [Panel; 3] = [
    Panel { file: "theta.svg", label: "theta [rad]", pick: |s| s.theta },
    Panel { file: "theta_dot.svg", label: "theta_dot [rad/s]", pick: |s| s.theta_dot },
    Panel { file: "gamma_dot.svg", label: "gamma_dot [rad/s]", pick: |s| s.gamma_dot },
];

fn series(traj: &Trajectory, pick: fn(&State) -> f64) -> Vec<(f64, f64)> {
    traj.samples.iter().map(|s| (s.t, pick(&s.state))).collect()
}

fn draw(path: &Path, panel: &Panel, run: &Trajectory, reference: Option<&Trajectory>) -> Result<()> {
    let main = series(run, panel.pick);
    let other = reference.map(|r| series(r, panel.pick));
    let all = main.iter().chain(other.iter().flatten());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if !(hi - lo > 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let t_end = run.t_end().max(1e-9);

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow!("{e}"))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..t_end, (lo - pad)..(hi + pad))
        .map_err(|e| anyhow!("{e}"))?;
    chart
        .configure_mesh()
        .x_desc("t [s]")
        .y_desc(panel.label)
        .draw()
        .map_err(|e| anyhow!("{e}"))?;
    chart
        .draw_series(LineSeries::new(main, &BLUE))
        .map_err(|e| anyhow!("{e}"))?
        .label("run")
        .legend(|(x, y)| PathElement::new([(x, y), (x + 16, y)], BLUE));
    if let Some(other) = other {
        chart
            .draw_series(LineSeries::new(other, &RED))
            .map_err(|e| anyhow!("{e}"))?
            .label("reference")
            .legend(|(x, y)| PathElement::new([(x, y), (x + 16, y)], RED));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| anyhow!("{e}"))?;
    root.present().map_err(|e| anyhow!("{e}"))?;
    Ok(())
}

/// Writes `theta.svg`, `theta_dot.svg` and `gamma_dot.svg` into `dir`.
pub fn write_plots(dir: &Path, run: &Trajectory, reference: Option<&Trajectory>) -> Result<()> {
    for panel in &PANELS {
        draw(&dir.join(panel.file), panel, run, reference)?;
    }
    Ok(())
}
