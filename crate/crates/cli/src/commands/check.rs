//! Built-in invariant suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qubit_feedback::{
    bloch_components, bloch_rhs3, bloch_to_matrix, candidate_mismatch, compare_k_readings, density_rhs, integrate,
    locus_extract, phi_theta_consistency, simulate_arc, singular_arc, stationary_no_feedback, stationary_with_feedback,
    AnalyticPropagator, AngleBranch, BlochState3, CMat2, ControlSchedule, ControlValue, FeedbackSpec, GridSpec, Locus,
    PlanarModel, PlanarState, RawFeedbackParams, SystemParams,
};

use crate::commands::base_summary;
use crate::config::Scenario;
use crate::error::{CliError, CliResult};
use crate::output::{fmt, OutputSink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported but not part of the verdict.
    Info,
    Skipped,
}

impl Status {
    fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub status: Status,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn bound(name: &'static str, value: f64, tolerance: f64, detail: String) -> Outcome {
    let status = if value <= tolerance { Status::Pass } else { Status::Fail };
    Outcome { name, status, value, tolerance, detail }
}

fn skipped(name: &'static str, why: &str) -> Outcome {
    Outcome { name, status: Status::Skipped, value: f64::NAN, tolerance: f64::NAN, detail: why.into() }
}

fn random_feedback(rng: &mut ChaCha8Rng) -> FeedbackSpec<f64> {
    if rng.gen_bool(0.5) {
        return FeedbackSpec::from_beta(rng.gen_range(0.0..std::f64::consts::PI));
    }
    loop {
        let v: [f64; 4] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-2 {
            let a = Complex64::new(v[0] / n, v[1] / n);
            let b = Complex64::new(v[2] / n, v[3] / n);
            return FeedbackSpec::new(CMat2::new(a, -b.conj(), b, a.conj())).expect("SU(2)");
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams<f64> {
    SystemParams::new(rng.gen_range(1e-3..=1.0), rng.gen_range(1e-3..=1.0)).expect("valid rates")
}

fn random_ball(rng: &mut ChaCha8Rng) -> BlochState3<f64> {
    loop {
        let x = BlochState3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if x.norm_sqr() <= 1.0 {
            return x;
        }
    }
}

fn density_equivalence(rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (x, p, fb) = (random_ball(rng), random_params(rng), random_feedback(rng));
        let u = ControlValue::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let via_rho = bloch_components(&density_rhs(&bloch_to_matrix(&x), u, &p, &fb).expect("hermitian input"));
        worst = worst.max(via_rho.max_abs_diff(&bloch_rhs3(&x, u, &p, &fb.raw())));
    }
    bound("density_equivalence", worst, 1e-12, format!("{n} random draws"))
}

fn stationary_checks(rng: &mut ChaCha8Rng, n: usize) -> Vec<Outcome> {
    let (mut residual, mut reduction): (f64, f64) = (0.0, 0.0);
    let mut degenerate = 0;
    for _ in 0..n {
        let (p, fb) = (random_params(rng), random_feedback(rng));
        let u = ControlValue::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        match stationary_with_feedback(u, &p, &fb.raw()) {
            Ok(r) => residual = residual.max(r.residual),
            Err(_) => degenerate += 1,
        }
        let a = stationary_no_feedback(u, &p).expect("positive rates");
        let b = stationary_with_feedback(u, &p, &RawFeedbackParams::identity()).expect("identity feedback");
        reduction = reduction.max(a.state.max_abs_diff(&b.state));
    }
    vec![
        bound("stationary_residual", residual, 1e-10, format!("{n} draws, {degenerate} degenerate")),
        bound("stationary_reduction", reduction, 1e-12, "identity feedback vs no feedback".into()),
    ]
}

fn analytic_vs_numeric(model: &PlanarModel<f64>, x0: PlanarState<f64>, t_end: f64, dt: f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for u in [1.0, -1.0] {
        let prop = AnalyticPropagator::build(model.affine_coeffs(u), x0).map_err(|e| e.to_string())?;
        let traj = integrate(
            |_, x: &PlanarState<f64>, c: ControlValue<f64>| model.rhs(x, c.u1),
            x0,
            (0.0, t_end),
            dt,
            &ControlSchedule::constant(ControlValue::real(u)),
        )
        .map_err(|e| e.to_string())?;
        for (t, x) in traj.times.iter().zip(&traj.states) {
            worst = worst.max(prop.evaluate(*t).map_err(|e| e.to_string())?.max_abs_diff(x));
        }
    }
    Ok(worst)
}

fn determinant_checks(model: &PlanarModel<f64>) -> Vec<Outcome> {
    let (mut da, mut db): (f64, f64) = (0.0, 0.0);
    let h = 1e-5;
    for i in 0..50 {
        for j in 0..50 {
            let x = PlanarState::new(-1.0 + 2.0 * i as f64 / 49.0, -1.0 + 2.0 * j as f64 / 49.0);
            let f = model.drift(&x);
            let g = PlanarModel::control(&x);
            da = da.max((model.delta_a(&x) - f.det(&g)).abs());
            // [F, G] = DF·G - DG·F by central differences
            let dir = |v: &PlanarState<f64>, field: &dyn Fn(&PlanarState<f64>) -> PlanarState<f64>| {
                (field(&(x + *v * h)) - field(&(x - *v * h))) * (0.5 / h)
            };
            let bracket = dir(&g, &|y| model.drift(y)) - dir(&f, &PlanarModel::control);
            db = db.max((model.delta_b(&x) - g.det(&bracket)).abs());
        }
    }
    vec![
        bound("delta_a_closed_form", da, 1e-12, "50x50 grid over [-1,1]^2".into()),
        bound("delta_b_closed_form", db, 1e-6, "finite-difference bracket, 50x50 grid".into()),
    ]
}

fn c_b_lines(params: SystemParams<f64>) -> CliResult<Outcome> {
    let m = PlanarModel::without_feedback(params);
    let line = (params.gamma_down() - params.gamma_up()) / params.total();
    let pts = locus_extract(Locus::B, GridSpec::square(-1.0, 1.0, 51)?, &m)?;
    let off = pts.iter().map(|p| p.x2.abs().min((p.x3 - line).abs())).fold(0.0, f64::max);
    Ok(bound("c_b_lines_no_feedback", off, 1e-8, format!("{} points, line x3 = {line}", pts.len())))
}

fn mirror_checks(params: SystemParams<f64>, dt: f64) -> CliResult<Vec<Outcome>> {
    let m = PlanarModel::without_feedback(params);
    let x0 = PlanarState::new(0.3, 0.5);
    let run = |x: PlanarState<f64>, u: f64| {
        integrate(
            |_, y: &PlanarState<f64>, c: ControlValue<f64>| m.rhs(y, c.u1),
            x,
            (0.0, 10.0),
            dt,
            &ControlSchedule::constant(ControlValue::real(u)),
        )
    };
    let (a, b) = (run(x0, 1.0)?, run(x0.mirrored(), -1.0)?);
    let traj = a.states.iter().zip(&b.states).map(|(p, q)| p.mirrored().max_abs_diff(q)).fold(0.0, f64::max);
    let ca = simulate_arc(&m, x0, 1.0, 10.0, dt, AngleBranch::Principal)?.switch_candidates();
    let cb = simulate_arc(&m, x0.mirrored(), -1.0, 10.0, dt, AngleBranch::Principal)?.switch_candidates();
    Ok(vec![
        bound("mirror_trajectories", traj, 1e-9, "no feedback, (x2,u) -> (-x2,-u)".into()),
        bound("mirror_candidates", candidate_mismatch(&ca, &cb), 1e-6, "no feedback".into()),
    ])
}

fn singular_arcs(model: &PlanarModel<f64>, dt: f64) -> CliResult<Outcome> {
    let pts = locus_extract(Locus::B, GridSpec::square(-1.0, 1.0, 41)?, model)?;
    let (mut worst, mut arcs, mut full): (f64, usize, usize) = (0.0, 0, 0);
    for p in pts.iter().filter(|p| p.x2 * p.x2 + p.x3 * p.x3 < 1.0 && p.value.abs() < 1e-10) {
        let Ok(arc) = singular_arc(model, PlanarState::new(p.x2, p.x3), 5.0, dt) else { continue };
        arcs += 1;
        full += usize::from(arc.exit_time.is_none());
        worst = arc.trajectory.states.iter().fold(worst, |w, x| w.max(model.delta_b(x).abs()));
    }
    if arcs == 0 {
        return Ok(skipped("singular_arc_invariance", "no C_B start with a defined singular control"));
    }
    Ok(bound(
        "singular_arc_invariance",
        worst,
        1e-8,
        format!("{arcs} arcs, {full} admissible on all of [0,5], others cut where |u| > 1"),
    ))
}

fn velocity_and_angle(model: &PlanarModel<f64>, x0: PlanarState<f64>, dt: f64) -> CliResult<Vec<Outcome>> {
    let (mut dv, mut jump): (f64, f64) = (0.0, 0.0);
    for u in [1.0, -1.0] {
        let arc = simulate_arc(model, x0, u, 10.0, dt, AngleBranch::Unwrapped)?;
        let st = &arc.trajectory.states;
        for k in 2..st.len().saturating_sub(2) {
            let fd = |c: fn(&PlanarState<f64>) -> f64| {
                (-c(&st[k + 2].x) + 8.0 * c(&st[k + 1].x) - 8.0 * c(&st[k - 1].x) + c(&st[k - 2].x)) / (12.0 * dt)
            };
            dv = dv.max((st[k].v.v2 - fd(|x| x.x2)).abs()).max((st[k].v.v3 - fd(|x| x.x3)).abs());
        }
        jump = arc.diagnostics().windows(2).fold(jump, |j, w| j.max((w[1].theta - w[0].theta).abs()));
    }
    let continuity = Outcome {
        name: "theta_continuity",
        status: if jump < std::f64::consts::PI { Status::Pass } else { Status::Fail },
        value: jump,
        tolerance: std::f64::consts::PI,
        detail: "largest step of theta between samples".into(),
    };
    Ok(vec![bound("velocity_is_derivative", dv, 1e-6, "fourth-order differences".into()), continuity])
}

fn k_readings(model: &PlanarModel<f64>) -> Outcome {
    let pts: Vec<_> = (0..10)
        .flat_map(|i| (0..10).map(move |j| PlanarState::new(-0.9 + 0.2 * i as f64, -0.85 + 0.19 * j as f64)))
        .collect();
    let reports = compare_k_readings(model, &pts);
    let agreeing: Vec<_> = reports.iter().filter(|r| r.agrees(1e-8)).map(|r| r.reading.label()).collect();
    let detail = reports
        .iter()
        .map(|r| format!("{}: {} points, max rel dev {}", r.reading.label(), r.compared, fmt(r.max_rel_dev)))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        name: "k_ratio_reading",
        status: if agreeing.is_empty() { Status::Fail } else { Status::Pass },
        value: reports.iter().map(|r| r.max_rel_dev).fold(f64::INFINITY, f64::min),
        tolerance: 1e-8,
        detail: format!("agreeing: [{}]; {detail}", agreeing.join(", ")),
    }
}

fn phi_theta(model: &PlanarModel<f64>, x0: PlanarState<f64>, dt: f64) -> CliResult<Vec<Outcome>> {
    let mut out = Vec::new();
    for (name, branch) in [
        ("phi_theta_consistency", AngleBranch::Unwrapped),
        ("phi_theta_consistency_principal", AngleBranch::Principal),
    ] {
        let (mut total, mut inside) = (0, 0);
        for u in [1.0, -1.0] {
            let arc = simulate_arc(model, x0, u, 10.0, dt, branch)?;
            let (n, k) = phi_theta_consistency(&arc.phi_zeros(), &arc.switch_candidates(), 1e-6);
            total += n;
            inside += k;
        }
        let status = match branch {
            AngleBranch::Unwrapped if inside == total => Status::Pass,
            AngleBranch::Unwrapped => Status::Fail,
            AngleBranch::Principal => Status::Info,
        };
        out.push(Outcome {
            name,
            status,
            value: (total - inside) as f64,
            tolerance: 0.0,
            detail: format!("{inside} of {total} phi zeros inside sgn_theta = 0 windows"),
        });
    }
    Ok(out)
}

pub fn outcomes(sc: &Scenario, seed: u64) -> CliResult<Vec<Outcome>> {
    let n = sc.config.check.samples;
    let dt = sc.config.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![density_equivalence(&mut rng, n)];
    out.extend(stationary_checks(&mut rng, n));

    let planar_names = [
        "analytic_vs_numeric",
        "delta_a_closed_form",
        "delta_b_closed_form",
        "singular_arc_invariance",
        "velocity_is_derivative",
        "theta_continuity",
        "k_ratio_reading",
        "phi_theta_consistency",
    ];
    match sc.planar_model() {
        Some(model) => {
            let x0 = sc.initial_planar();
            out.push(match analytic_vs_numeric(&model, x0, sc.config.t_end, dt) {
                Ok(d) => bound("analytic_vs_numeric", d, 1e-8, "u = +1 and u = -1".into()),
                Err(e) => Outcome {
                    name: "analytic_vs_numeric",
                    status: Status::Fail,
                    value: f64::NAN,
                    tolerance: 1e-8,
                    detail: e,
                },
            });
            let plain = PlanarModel::without_feedback(sc.params);
            match analytic_vs_numeric(&plain, x0, sc.config.t_end, dt) {
                Ok(d) => out.push(bound("analytic_vs_numeric_no_feedback", d, 1e-8, "u = +1 and u = -1".into())),
                Err(e) => out.push(skipped("analytic_vs_numeric_no_feedback", &e)),
            }
            out.extend(determinant_checks(&model));
            out.push(singular_arcs(&model, dt)?);
            out.extend(velocity_and_angle(&model, x0, dt)?);
            out.push(k_readings(&model));
            out.extend(phi_theta(&model, x0, dt)?);
        }
        None => out.extend(planar_names.iter().map(|n| skipped(n, "feedback has f1 != 0"))),
    }
    out.push(c_b_lines(sc.params)?);
    out.extend(mirror_checks(sc.params, dt)?);
    Ok(out)
}

pub fn run(sc: &Scenario, out: &OutputSink, seed: u64) -> CliResult<()> {
    let results = outcomes(sc, seed)?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|o| vec![o.name.to_string(), o.status.label().to_string(), fmt(o.value), fmt(o.tolerance), o.detail.clone()])
        .collect();
    out.write_csv("check.csv", &["invariant", "status", "value", "tolerance", "detail"], &rows, &[])?;
    for o in &results {
        println!("{:<34} {:<7} {}", o.name, o.status.label(), o.detail);
    }
    let failed = results.iter().filter(|o| o.status == Status::Fail).count();
    let mut summary = base_summary("check", sc);
    summary.insert(
        "results".into(),
        json!({
            "seed": seed,
            "failed": failed,
            "invariants": results
                .iter()
                .map(|o| json!({ "name": o.name, "status": o.status.label(), "value": o.value, "detail": o.detail }))
                .collect::<Vec<_>>(),
        }),
    );
    out.write_summary(summary)?;
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}
