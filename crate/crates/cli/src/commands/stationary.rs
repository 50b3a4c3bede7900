use serde_json::json;

use qubit_feedback::{no_feedback_x3_bound, reachable_sweep, ControlValue};

use crate::commands::base_summary;
use crate::config::Scenario;
use crate::error::CliResult;
use crate::output::{fmt, OutputSink};

pub fn run(sc: &Scenario, out: &OutputSink) -> CliResult<()> {
    let cfg = &sc.config.stationary;
    let grid: Vec<_> = cfg
        .u1
        .points()
        .into_iter()
        .flat_map(|u1| cfg.u2.points().into_iter().map(move |u2| ControlValue::new(u1, u2)))
        .collect();
    let raw = sc.feedback.raw();
    let sweep = reachable_sweep(&grid, &sc.params, &raw);

    let rows: Vec<Vec<String>> = sweep
        .results
        .iter()
        .map(|(u, r)| {
            let s = r.state;
            vec![fmt(u.u1), fmt(u.u2), fmt(s.x1), fmt(s.x2), fmt(s.x3), fmt(r.purity), fmt(r.residual)]
        })
        .collect();
    out.write_csv("stationary.csv", &["u1", "u2", "x1", "x2", "x3", "purity", "residual"], &rows, &[])?;

    let max_residual = sweep.results.iter().map(|(_, r)| r.residual).fold(0.0, f64::max);
    let best = sweep
        .results
        .iter()
        .max_by(|a, b| a.1.purity.total_cmp(&b.1.purity))
        .map(|(u, r)| json!({ "u": [u.u1, u.u2], "purity": r.purity, "state": [r.state.x1, r.state.x2, r.state.x3] }));
    let mut results = json!({
        "points": sweep.results.len(),
        "degenerate": sweep.degenerate.iter().map(|u| [u.u1, u.u2]).collect::<Vec<_>>(),
        "max_residual": max_residual,
        "max_purity": best,
    });
    if raw.f1() == 0.0 && raw.f2() == 0.0 && raw.g() == 1.0 {
        let holds = sweep
            .results
            .iter()
            .all(|(u, r)| r.state.x3 * r.state.x3 <= no_feedback_x3_bound(*u, &sc.params) * (1.0 + 1e-12));
        results["x3_bound_holds"] = json!(holds);
    }
    let mut summary = base_summary("stationary", sc);
    summary.insert("results".into(), results);
    out.write_summary(summary)
}
