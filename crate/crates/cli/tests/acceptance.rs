//! Acceptance gate: eight criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubit_feedback::*;

type Verdict = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sample_model(beta: Option<f64>) -> PlanarModel<f64> {
    let p = SystemParams::new(0.4, 0.3).unwrap();
    match beta {
        Some(b) => PlanarModel::new(p, &FeedbackSpec::from_beta(b).raw()).unwrap(),
        None => PlanarModel::without_feedback(p),
    }
}

fn random_su2(rng: &mut ChaCha8Rng) -> FeedbackSpec<f64> {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-2 {
            let a = Complex64::new(v[0] / n, v[1] / n);
            let b = Complex64::new(v[2] / n, v[3] / n);
            return FeedbackSpec::new(CMat2::new(a, -b.conj(), b, a.conj())).unwrap();
        }
    }
}

fn rate(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]
    1.0 - rng.gen_range(0.0..1.0)
}

/// Master equation with every product written out; basis (e, g).
fn reference_bloch_rhs(x: &BlochState3<f64>, u: Complex64, gd: f64, gu: f64, uf: &CMat2<f64>) -> BlochState3<f64> {
    type M = [[Complex64; 2]; 2];
    let z = Complex64::new(0.0, 0.0);
    let mul = |a: &M, b: &M| -> M {
        let mut c = [[z; 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                c[r][s] = a[r][0] * b[0][s] + a[r][1] * b[1][s];
            }
        }
        c
    };
    let dag = |a: &M| -> M { [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]] };
    let c = Complex64::new(x.x1, x.x2) / 2.0;
    let rho: M = [[Complex64::new((1.0 - x.x3) / 2.0, 0.0), c], [c.conj(), Complex64::new((1.0 + x.x3) / 2.0, 0.0)]];
    let h: M = [[z, u], [u.conj(), z]];
    let sm: M = [[z, z], [Complex64::new(1.0, 0.0), z]];
    let sp = dag(&sm);
    let jd = mul(&mul(&mul(&uf.m, &sm), &rho), &mul(&sp, &dag(&uf.m)));
    let ju = mul(&mul(&sp, &rho), &sm);
    let (pd, pu) = (mul(&sp, &sm), mul(&sm, &sp));
    let (hr, rh) = (mul(&h, &rho), mul(&rho, &h));
    let (pdr, rpd, pur, rpu) = (mul(&pd, &rho), mul(&rho, &pd), mul(&pu, &rho), mul(&rho, &pu));
    let mut d = [[z; 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            d[r][s] = -Complex64::i() * (hr[r][s] - rh[r][s])
                + gd * (jd[r][s] - (pdr[r][s] + rpd[r][s]) / 2.0)
                + gu * (ju[r][s] - (pur[r][s] + rpu[r][s]) / 2.0);
        }
    }
    BlochState3::new(2.0 * d[0][1].re, 2.0 * d[0][1].im, (d[1][1] - d[0][0]).re)
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut dev, mut dev_ref): (f64, f64) = (0.0, 0.0);
    for k in 0..1000 {
        let x = loop {
            let x = BlochState3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x.norm_sqr() <= 1.0 {
                break x;
            }
        };
        let u = ControlValue::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = SystemParams::new(rate(&mut rng), rate(&mut rng)).unwrap();
        let fb = if k % 2 == 0 { FeedbackSpec::from_beta(rng.gen_range(0.0..2.0 * PI)) } else { random_su2(&mut rng) };
        let bloch = bloch_rhs3(&x, u, &p, &fb.raw());
        let via_rho = bloch_components(&density_rhs(&bloch_to_matrix(&x), u, &p, &fb).unwrap());
        dev = dev.max(via_rho.max_abs_diff(&bloch));
        let r = reference_bloch_rhs(&x, Complex64::new(u.u1, u.u2), p.gamma_down(), p.gamma_up(), fb.unitary());
        dev_ref = dev_ref.max(r.max_abs_diff(&bloch));
    }
    let worst = dev.max(dev_ref);
    check(worst < 1e-12, format!("density vs Bloch {dev:.2e}, explicit reference vs Bloch {dev_ref:.2e} (tol 1e-12)"))
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut r1, mut r2, mut red): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..1000 {
        let p = SystemParams::new(rate(&mut rng), rate(&mut rng)).unwrap();
        let u = ControlValue::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let fb = if k % 2 == 0 { FeedbackSpec::from_beta(rng.gen_range(0.0..2.0 * PI)) } else { random_su2(&mut rng) };
        let a = stationary_no_feedback(u, &p).map_err(|e| e.to_string())?;
        let b = stationary_with_feedback(u, &p, &fb.raw()).map_err(|e| e.to_string())?;
        // residuals recomputed here rather than trusted from the result
        r1 = r1.max(bloch_rhs3(&a.state, u, &p, &RawFeedbackParams::identity()).norm());
        r2 = r2.max(bloch_rhs3(&b.state, u, &p, &fb.raw()).norm());
        let c = stationary_with_feedback(u, &p, &RawFeedbackParams::identity()).map_err(|e| e.to_string())?;
        red = red.max(c.state.max_abs_diff(&a.state));
    }
    let n = 20;
    let axis = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let mut bound_ok = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let u = ControlValue::new(axis(i, -2.0, 2.0), axis(j, -2.0, 2.0));
                let p = SystemParams::new(1.0, axis(k, 0.0, 1.0)).unwrap();
                let x3 = stationary_no_feedback(u, &p).unwrap().state.x3;
                let s = p.total() * p.total();
                bound_ok &= x3 * x3 <= s / (s + 16.0 * u.abs_sqr()) * (1.0 + 1e-12);
            }
        }
    }
    check(
        r1 < 1e-10 && r2 < 1e-10 && red < 1e-12 && bound_ok,
        format!(
            "residuals {r1:.2e} / {r2:.2e} (tol 1e-10), reduction {red:.2e} (tol 1e-12), purity bound on 20^3 grid: {bound_ok}"
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut worst: f64 = 0.0;
    for beta in [Some(0.2 * PI), None] {
        let m = sample_model(beta);
        for x0 in [PlanarState::new(0.0, 1.0), PlanarState::new(0.5, -0.5)] {
            for u in [1.0, -1.0] {
                let prop = AnalyticPropagator::build(m.affine_coeffs(u), x0).map_err(|e| e.to_string())?;
                let traj = integrate(
                    |_, x: &PlanarState<f64>, c: ControlValue<f64>| m.rhs(x, c.u1),
                    x0,
                    (0.0, 10.0),
                    1e-3,
                    &ControlSchedule::constant(ControlValue::real(u)),
                )
                .map_err(|e| e.to_string())?;
                for (t, x) in traj.times.iter().zip(&traj.states) {
                    worst = worst.max(prop.evaluate(*t).map_err(|e| e.to_string())?.max_abs_diff(x));
                }
            }
        }
    }
    check(worst < 1e-8, format!("max |analytic - RK4| = {worst:.2e} over t in [0,10], dt 1e-3 (tol 1e-8)"))
}

fn criterion_4() -> Verdict {
    let (mut da, mut db): (f64, f64) = (0.0, 0.0);
    let h = 1e-5;
    for beta in [Some(0.2 * PI), None] {
        let m = sample_model(beta);
        for i in 0..50 {
            for j in 0..50 {
                let x = PlanarState::new(-1.0 + 2.0 * i as f64 / 49.0, -1.0 + 2.0 * j as f64 / 49.0);
                let f = m.drift(&x);
                let g = PlanarModel::control(&x);
                da = da.max((m.delta_a(&x) - f.det(&g)).abs());
                // [F, G] = DF·G - DG·F, directional derivatives by central differences
                let df_g = (m.drift(&(x + g * h)) - m.drift(&(x - g * h))) * (0.5 / h);
                let dg_f = (PlanarModel::control(&(x + f * h)) - PlanarModel::control(&(x - f * h))) * (0.5 / h);
                db = db.max((m.delta_b(&x) - g.det(&(df_g - dg_f))).abs());
            }
        }
    }
    let m = PlanarModel::without_feedback(SystemParams::<f64>::new(0.6, 0.3).unwrap());
    let pts = locus_extract(Locus::B, GridSpec::square(-1.0, 1.0, 50).unwrap(), &m).map_err(|e| e.to_string())?;
    let off = pts.iter().map(|p| p.x2.abs().min((p.x3 - 1.0 / 3.0).abs())).fold(0.0, f64::max);
    let both = pts.iter().any(|p| p.x2.abs() < 1e-8) && pts.iter().any(|p| (p.x3 - 1.0 / 3.0).abs() < 1e-8);
    check(
        da < 1e-12 && db < 1e-6 && off < 1e-8 && both,
        format!(
            "Δ_A {da:.2e} (tol 1e-12), Δ_B {db:.2e} (tol 1e-6), C_B lines x2=0 and x3=1/3 within {off:.2e} (tol 1e-8)"
        ),
    )
}

struct SymmetryDefects {
    delta_a: f64,
    delta_b: f64,
    trajectory: f64,
    candidates: f64,
}

fn symmetry_defects(beta: Option<f64>) -> std::result::Result<SymmetryDefects, String> {
    let m = sample_model(beta);
    let (mut a, mut b): (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        for j in 0..50 {
            let x = PlanarState::new(-1.0 + 2.0 * i as f64 / 49.0, -1.0 + 2.0 * j as f64 / 49.0);
            a = a.max((m.delta_a(&x) - m.delta_a(&x.mirrored())).abs());
            b = b.max((m.delta_b(&x) + m.delta_b(&x.mirrored())).abs());
        }
    }
    let mut traj: f64 = 0.0;
    let mut cand: f64 = 0.0;
    for x0 in [PlanarState::new(0.0, 1.0), PlanarState::new(0.3, 0.5)] {
        let run = |x: PlanarState<f64>, u: f64| {
            integrate(
                |_, y: &PlanarState<f64>, c: ControlValue<f64>| m.rhs(y, c.u1),
                x,
                (0.0, 10.0),
                1e-3,
                &ControlSchedule::constant(ControlValue::real(u)),
            )
            .map_err(|e| e.to_string())
        };
        let (p, q) = (run(x0, 1.0)?, run(x0.mirrored(), -1.0)?);
        traj = p.states.iter().zip(&q.states).fold(traj, |d, (s, r)| d.max(s.mirrored().max_abs_diff(r)));
        let arc = |x: PlanarState<f64>, u: f64| {
            simulate_arc(&m, x, u, 10.0, 1e-3, AngleBranch::Principal).map(|a| a.switch_candidates())
        };
        let ca = arc(x0, 1.0).map_err(|e| e.to_string())?;
        let cb = arc(x0.mirrored(), -1.0).map_err(|e| e.to_string())?;
        if ca.is_empty() || cb.is_empty() {
            return Err("empty candidate set".into());
        }
        cand = cand.max(candidate_mismatch(&ca, &cb));
    }
    Ok(SymmetryDefects { delta_a: a, delta_b: b, trajectory: traj, candidates: cand })
}

fn criterion_5() -> Verdict {
    let plain = symmetry_defects(None)?;
    let fed = symmetry_defects(Some(0.2 * PI))?;
    let holds = plain.delta_a == 0.0 && plain.delta_b == 0.0 && plain.trajectory < 1e-9 && plain.candidates < 1e-6;
    let broken = fed.delta_a > 1e-3 && fed.delta_b > 1e-3 && fed.trajectory > 1e-3 && fed.candidates > 1e-3;
    check(
        holds && broken,
        format!(
            "no feedback: Δ_A/Δ_B parity {:.1e}/{:.1e}, mirror {:.1e}, candidates {:.1e}; β=0.2π: {:.2e}/{:.2e}, {:.2e}, {:.2e}",
            plain.delta_a,
            plain.delta_b,
            plain.trajectory,
            plain.candidates,
            fed.delta_a,
            fed.delta_b,
            fed.trajectory,
            fed.candidates
        ),
    )
}

fn run_qfb(args: &[&str], config: Option<&Path>, out: &Path) -> std::result::Result<std::process::Output, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qfb"));
    cmd.args(args).arg("--out").arg(out).arg("--no-metadata");
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().map_err(|e| e.to_string())
}

const BETA_CONFIG: &str = r#"{
  "params": { "rates": { "gamma_down": 0.4, "gamma_up": 0.3 } },
  "feedback": { "beta": 0.6283185307179586 },
  "control": { "constant": [1.0, 0.0] },
  "initial_state": [0.0, 1.0],
  "t_end": 10.0,
  "dt": 0.001,
  "locus": { "x2_range": [-1.0, 1.0], "x3_range": [-1.0, 1.0], "n": 61 },
  "check": { "samples": 200 }
}"#;

fn criterion_6() -> Verdict {
    let mut worst: f64 = 0.0;
    let (mut arcs, mut full) = (0, 0);
    for beta in [Some(0.2 * PI), None] {
        let m = sample_model(beta);
        let pts = locus_extract(Locus::B, GridSpec::square(-1.0, 1.0, 41).unwrap(), &m).map_err(|e| e.to_string())?;
        for p in pts.iter().filter(|p| p.x2 * p.x2 + p.x3 * p.x3 < 1.0 && p.value.abs() < 1e-10) {
            let Ok(arc) = singular_arc(&m, PlanarState::new(p.x2, p.x3), 5.0, 1e-3) else { continue };
            arcs += 1;
            if arc.exit_time.is_none() {
                full += 1;
            }
            worst = arc.trajectory.states.iter().fold(worst, |w, x| w.max(m.delta_b(x).abs()));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("beta.json");
    std::fs::write(&cfg, BETA_CONFIG).map_err(|e| e.to_string())?;
    let out = run_qfb(&["check"], Some(&cfg), &dir.path().join("check"))?;
    let table = qubit_feedback_cli::read_table(&dir.path().join("check/check.csv")).map_err(|e| e.to_string())?;
    let col = |n: &str| table.column(n).ok_or(format!("no column {n}"));
    let (name, status, detail) = (col("invariant")?, col("status")?, col("detail")?);
    let row = table.rows.iter().find(|r| r[name] == "k_ratio_reading").ok_or("no k_ratio_reading row")?;
    let agreeing = row[detail].split(';').next().unwrap_or("").to_string();
    check(
        worst < 1e-8 && full > 0 && row[status] == "pass" && out.status.success(),
        format!(
            "max |Δ_B| {worst:.2e} on {arcs} singular arcs ({full} admissible on all of [0,5]) (tol 1e-8); check reports {agreeing}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let dt = 1e-3;
    let (mut dv, mut jump): (f64, f64) = (0.0, 0.0);
    let mut sets = Vec::new();
    for beta in [Some(0.2 * PI), None] {
        let m = sample_model(beta);
        for u in [1.0, -1.0] {
            let arc = simulate_arc(&m, PlanarState::new(0.0, 1.0), u, 10.0, dt, AngleBranch::Principal)
                .map_err(|e| e.to_string())?;
            let st = &arc.trajectory.states;
            for k in 2..st.len() - 2 {
                let fd = |c: fn(&PlanarState<f64>) -> f64| {
                    (-c(&st[k + 2].x) + 8.0 * c(&st[k + 1].x) - 8.0 * c(&st[k - 1].x) + c(&st[k - 2].x)) / (12.0 * dt)
                };
                dv = dv.max((st[k].v.v2 - fd(|x| x.x2)).abs()).max((st[k].v.v3 - fd(|x| x.x3)).abs());
            }
            jump = arc.diagnostics().windows(2).fold(jump, |j, w| j.max((w[1].theta - w[0].theta).abs()));
            if beta.is_some() {
                sets.push(arc.switch_candidates());
            }
        }
    }
    let nonempty = sets.iter().all(|s| !s.is_empty());
    // the emitted series must not depend on the run
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("beta.json");
    std::fs::write(&cfg, BETA_CONFIG).map_err(|e| e.to_string())?;
    run_qfb(&["switching"], Some(&cfg), &dir.path().join("a"))?;
    run_qfb(&["switching"], Some(&cfg), &dir.path().join("b"))?;
    let read = |d: &str| std::fs::read(dir.path().join(d).join("candidates.csv")).map_err(|e| e.to_string());
    let (a, b) = (read("a")?, read("b")?);
    let same = !a.is_empty() && a == b;
    check(
        dv < 1e-6 && jump < PI && nonempty && same,
        format!(
            "|v - dx/dt| {dv:.2e} (tol 1e-6), max θ step {jump:.2e} (< π), {} / {} windows for u=+1/-1, emitted identically: {same}",
            sets[0].len(),
            sets[1].len()
        ),
    )
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

fn criterion_8() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("beta.json");
    std::fs::write(&cfg, BETA_CONFIG).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for sub in ["stationary", "trajectory", "locus", "switching", "check"] {
        let a = dir.path().join(format!("{sub}-1"));
        let b = dir.path().join(format!("{sub}-2"));
        let ra = run_qfb(&[sub], Some(&cfg), &a)?;
        let rb = run_qfb(&[sub], Some(&cfg), &b)?;
        if !ra.status.success() || !rb.status.success() {
            return Err(format!("{sub} exited with {:?} / {:?}", ra.status.code(), rb.status.code()));
        }
        let (fa, fb) = (files_in(&a), files_in(&b));
        if fa.is_empty() || fa != fb {
            return Err(format!("{sub}: outputs differ"));
        }
        compared += fa.len();
    }
    Ok(format!("5 subcommands run twice with --no-metadata, {compared} files byte-identical"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", criterion_1),
        ("stationary closed forms", criterion_2),
        ("analytic vs numeric propagation", criterion_3),
        ("determinant closed forms", criterion_4),
        ("symmetry and its breaking", criterion_5),
        ("singular arcs", criterion_6),
        ("velocity and angle machinery", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("acceptance {} PASS {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("acceptance {} FAIL {name}: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
