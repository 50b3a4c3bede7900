use serde_json::json;

use qubit_feedback::{
    bloch_rhs3, integrate, AnalyticPropagator, BlochState3, ControlSchedule, ControlValue, Error, PlanarModel,
    PlanarState, Trajectory,
};

use crate::commands::base_summary;
use crate::config::Scenario;
use crate::error::CliResult;
use crate::output::{fmt, OutputSink};

/// Chains one analytic propagator per constant-control segment.
/// `Ok(None)` when some segment has repeated eigenvalues.
fn analytic_series(
    model: &PlanarModel<f64>,
    schedule: &ControlSchedule<f64>,
    traj: &Trajectory<f64, PlanarState<f64>>,
    t_end: f64,
) -> Result<Option<Vec<PlanarState<f64>>>, Error> {
    let mut props = Vec::new();
    let mut x = *traj.states.first().expect("non-empty trajectory");
    for (t0, t1, u) in schedule.segments(0.0, t_end) {
        let p = match AnalyticPropagator::build(model.affine_coeffs(u.u1), x) {
            Ok(p) => p,
            Err(Error::RepeatedEigenvalue(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        x = match p.evaluate(t1 - t0) {
            Ok(x) => x,
            Err(Error::ImaginaryResidue(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        props.push((t0, t1, p));
    }
    let mut out = Vec::with_capacity(traj.len());
    let mut k = 0;
    for t in &traj.times {
        while k + 1 < props.len() && *t > props[k].1 {
            k += 1;
        }
        match props[k].2.evaluate(t - props[k].0) {
            Ok(x) => out.push(x),
            Err(Error::ImaginaryResidue(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

pub fn run(sc: &Scenario, out: &OutputSink) -> CliResult<()> {
    let cfg = &sc.config;
    let schedule = cfg.schedule()?;
    let mut summary = base_summary("trajectory", sc);

    if sc.is_planar_run()? {
        let model = sc.planar_model().expect("planar run");
        let traj = integrate(
            |_, x: &PlanarState<f64>, u: ControlValue<f64>| model.rhs(x, u.u1),
            sc.initial_planar(),
            (0.0, cfg.t_end),
            cfg.dt,
            &schedule,
        )?;
        let analytic = analytic_series(&model, &schedule, &traj, cfg.t_end)?;
        let mut header = vec!["t", "u", "x2", "x3"];
        let mut footer = Vec::new();
        let mut max_dev = None;
        if let Some(a) = &analytic {
            header.extend(["x2_analytic", "x3_analytic"]);
            let d = traj.states.iter().zip(a).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max);
            footer.push(("max_deviation", fmt(d)));
            max_dev = Some(d);
        }
        let rows: Vec<Vec<String>> = (0..traj.len())
            .map(|k| {
                let x = traj.states[k];
                let mut r = vec![fmt(traj.times[k]), fmt(traj.controls[k].u1), fmt(x.x2), fmt(x.x3)];
                if let Some(a) = &analytic {
                    r.extend([fmt(a[k].x2), fmt(a[k].x3)]);
                }
                r
            })
            .collect();
        out.write_csv("trajectory.csv", &header, &rows, &footer)?;

        let segments: Vec<_> = schedule
            .segments(0.0, cfg.t_end)
            .iter()
            .map(|(t0, t1, u)| {
                let fp = model.fixed_point(u.u1).map(|p| [p.x2, p.x3]);
                json!({ "start": t0, "end": t1, "u": u.u1, "fixed_point": fp })
            })
            .collect();
        let last = traj.last_state().expect("non-empty");
        summary.insert(
            "results".into(),
            json!({
                "dimension": 2,
                "samples": traj.len(),
                "final_state": [last.x2, last.x3],
                "segments": segments,
                "analytic": analytic.is_some(),
            }),
        );
        if let Some(d) = max_dev {
            summary.insert("max_deviation".into(), json!(d));
        }
    } else {
        let raw = sc.feedback.raw();
        let traj = integrate(
            |_, x: &BlochState3<f64>, u| bloch_rhs3(x, u, &sc.params, &raw),
            sc.initial_bloch(),
            (0.0, cfg.t_end),
            cfg.dt,
            &schedule,
        )?;
        let rows: Vec<Vec<String>> = (0..traj.len())
            .map(|k| {
                let (x, u) = (traj.states[k], traj.controls[k]);
                vec![fmt(traj.times[k]), fmt(u.u1), fmt(u.u2), fmt(x.x1), fmt(x.x2), fmt(x.x3)]
            })
            .collect();
        out.write_csv("trajectory.csv", &["t", "u1", "u2", "x1", "x2", "x3"], &rows, &[])?;
        let last = traj.last_state().expect("non-empty");
        summary.insert(
            "results".into(),
            json!({ "dimension": 3, "samples": traj.len(), "final_state": [last.x1, last.x2, last.x3] }),
        );
    }
    out.write_summary(summary)
}
