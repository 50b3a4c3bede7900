use serde_json::json;

use qubit_feedback::{
    candidate_mismatch, phi_theta_consistency, simulate_arc_with_adjoint, AdjointState, AngleBranch, BangArc, Interval,
};

use crate::commands::base_summary;
use crate::config::{AdjointInit, Scenario};
use crate::error::{CliError, CliResult};
use crate::output::{fmt, OutputSink};

struct Branch {
    u: f64,
    p0: AdjointState<f64>,
    arc: BangArc<f64>,
    candidates: Vec<Interval<f64>>,
    phi_zeros: Vec<f64>,
}

fn one(sc: &Scenario, u: f64, branch: AngleBranch) -> CliResult<Branch> {
    let model = sc
        .planar_model()
        .ok_or_else(|| CliError::Config("switching needs planar feedback (f1 = 0)".into()))?;
    let x0 = sc.initial_planar();
    let p0 = match sc.config.switching.adjoint {
        AdjointInit::Perpendicular => model.perpendicular_adjoint(&x0, u)?,
        AdjointInit::Given([a, b]) => AdjointState::new(a, b)?,
    };
    let arc = simulate_arc_with_adjoint(&model, x0, p0, u, sc.config.t_end, sc.config.dt, branch)?;
    let candidates = arc.switch_candidates();
    let phi_zeros = arc.phi_zeros();
    Ok(Branch { u, p0, arc, candidates, phi_zeros })
}

fn intervals(c: &[Interval<f64>]) -> Vec<[f64; 2]> {
    c.iter().map(|i| [i.start, i.end]).collect()
}

pub fn run(sc: &Scenario, out: &OutputSink) -> CliResult<()> {
    let branch: AngleBranch = sc.config.switching.branch.into();
    // the two controls are independent; results are joined in fixed order
    let (plus, minus) = std::thread::scope(|s| {
        let h = s.spawn(|| one(sc, -1.0, branch));
        let plus = one(sc, 1.0, branch);
        (plus, h.join().expect("switching worker panicked"))
    });
    let (plus, minus) = (plus?, minus?);

    let (dp, dm) = (plus.arc.diagnostics(), minus.arc.diagnostics());
    let rows: Vec<Vec<String>> = (0..dp.len())
        .map(|k| {
            let (a, b) = (&dp[k], &dm[k]);
            vec![
                fmt(plus.arc.times()[k]),
                fmt(a.theta),
                fmt(a.theta_dot),
                a.sgn_theta.to_string(),
                fmt(a.phi),
                fmt(b.theta),
                fmt(b.theta_dot),
                b.sgn_theta.to_string(),
                fmt(b.phi),
            ]
        })
        .collect();
    out.write_csv(
        "switching.csv",
        &[
            "t",
            "theta_plus",
            "theta_dot_plus",
            "sgn_theta_plus",
            "phi_plus",
            "theta_minus",
            "theta_dot_minus",
            "sgn_theta_minus",
            "phi_minus",
        ],
        &rows,
        &[],
    )?;

    let mut cand_rows = Vec::new();
    for b in [&plus, &minus] {
        for i in &b.candidates {
            cand_rows.push(vec![fmt(b.u), fmt(i.start), fmt(i.end)]);
        }
    }
    out.write_csv("candidates.csv", &["u", "start", "end"], &cand_rows, &[])?;

    let per = |b: &Branch| {
        let (n, inside) = phi_theta_consistency(&b.phi_zeros, &b.candidates, 1e-6);
        json!({
            "u": b.u,
            "p0": [b.p0.p2, b.p0.p3],
            "phi_zeros": b.phi_zeros,
            "phi_zeros_in_windows": inside,
            "phi_zeros_total": n,
        })
    };
    let branch_name = match branch {
        AngleBranch::Principal => "principal",
        AngleBranch::Unwrapped => "unwrapped",
    };
    let adjoint = match sc.config.switching.adjoint {
        AdjointInit::Perpendicular => "perpendicular to v(0), sign phi(0) = u",
        AdjointInit::Given(_) => "given",
    };
    let mut summary = base_summary("switching", sc);
    summary.insert(
        "results".into(),
        json!({
            "initial_state": [sc.initial_planar().x2, sc.initial_planar().x3],
            "angle_branch": branch_name,
            "adjoint_init": adjoint,
            "plus": per(&plus),
            "minus": per(&minus),
            "candidate_mismatch": candidate_mismatch(&plus.candidates, &minus.candidates),
        }),
    );
    summary.insert(
        "candidates".into(),
        json!({ "plus": intervals(&plus.candidates), "minus": intervals(&minus.candidates) }),
    );
    out.write_summary(summary)
}
