use serde_json::json;

use qubit_feedback::{locus_extract, GridSpec, Locus, LocusGrid, LocusPoint};

use crate::commands::base_summary;
use crate::config::Scenario;
use crate::error::{config_err, CliError, CliResult};
use crate::output::{fmt, OutputSink};

/// Largest distance from a point to the nearest mirror image `(-x2, x3)`
/// in the same set.
fn mirror_mismatch(points: &[LocusPoint<f64>]) -> f64 {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| (p.x2 + q.x2).hypot(p.x3 - q.x3))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn run(sc: &Scenario, out: &OutputSink) -> CliResult<()> {
    let cfg = &sc.config.locus;
    let model = sc
        .planar_model()
        .ok_or_else(|| CliError::Config("locus needs planar feedback (f1 = 0)".into()))?;
    let spec = GridSpec::new(cfg.x2_range, cfg.x3_range, cfg.n, cfg.n).map_err(config_err)?;

    let ga = LocusGrid::evaluate(Locus::A, spec, &model);
    let gb = LocusGrid::evaluate(Locus::B, spec, &model);
    let mut rows = Vec::with_capacity(spec.n2 * spec.n3);
    for j in 0..spec.n3 {
        for i in 0..spec.n2 {
            rows.push(vec![fmt(spec.x2_at(i)), fmt(spec.x3_at(j)), fmt(ga.at(i, j)), fmt(gb.at(i, j))]);
        }
    }
    out.write_csv("locus_grid.csv", &["x2", "x3", "delta_a", "delta_b"], &rows, &[])?;

    let mut results = serde_json::Map::new();
    for which in [Locus::A, Locus::B] {
        let pts = locus_extract(which, spec, &model)?;
        let rows: Vec<Vec<String>> = pts.iter().map(|p| vec![fmt(p.x2), fmt(p.x3), fmt(p.value)]).collect();
        let name = format!("locus_{}.csv", which.label().to_lowercase());
        out.write_csv(&name, &["x2", "x3", "value"], &rows, &[])?;
        let max_abs = pts.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
        results.insert(
            format!("c_{}", which.label().to_lowercase()),
            json!({ "points": pts.len(), "max_abs_value": max_abs, "mirror_mismatch": mirror_mismatch(&pts) }),
        );
    }
    let mut summary = base_summary("locus", sc);
    summary.insert("results".into(), results.into());
    out.write_summary(summary)
}
