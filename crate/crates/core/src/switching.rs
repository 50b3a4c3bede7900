//! Maximum-principle machinery for the time-optimal planar problem with
//! `|u| ≤ 1`: adjoint flow, switching function `Φ = p·G`, singular control,
//! the rotation angle `θ` of the velocity `v = ẋ`, and bang-bang simulation.

use std::cell::Cell;

use crate::dynamics::integrate::{step_times, validate_span};
use crate::dynamics::{
    integrate, rk4_step, ControlSchedule, ControlValue, Diagnostics, Phase, PlanarModel, PlanarState, Trajectory,
};
use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Costate `(p2, p3)`; never the zero vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointState<T> {
    pub p2: T,
    pub p3: T,
}

impl<T: Real> AdjointState<T> {
    pub fn new(p2: T, p3: T) -> Result<Self> {
        let n = (p2 * p2 + p3 * p3).sqrt();
        if !(n >= T::tol(1e-12)) {
            return Err(Error::TrivialAdjoint(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { p2, p3 })
    }

    pub fn dot(&self, w: &PlanarState<T>) -> T {
        self.p2 * w.x2 + self.p3 * w.x3
    }
}

impl<T: Real> Phase<T> for AdjointState<T> {
    #[inline]
    fn axpy(self, h: T, d: Self) -> Self {
        Self { p2: self.p2 + h * d.p2, p3: self.p3 + h * d.p3 }
    }
    #[inline]
    fn norm(self) -> T {
        (self.p2 * self.p2 + self.p3 * self.p3).sqrt()
    }
}

/// Velocity `v = (ẋ2, ẋ3)` transported by the linearised flow.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VelocityVector<T> {
    pub v2: T,
    pub v3: T,
}

impl<T: Real> VelocityVector<T> {
    pub fn new(v2: T, v3: T) -> Self {
        Self { v2, v3 }
    }

    pub fn angle(&self) -> T {
        self.v3.atan2(self.v2)
    }
}

impl<T: Real> Phase<T> for VelocityVector<T> {
    #[inline]
    fn axpy(self, h: T, d: Self) -> Self {
        Self::new(self.v2 + h * d.v2, self.v3 + h * d.v3)
    }
    #[inline]
    fn norm(self) -> T {
        (self.v2 * self.v2 + self.v3 * self.v3).sqrt()
    }
}

/// `Φ = p·G(x) = -2 p2 x3 + 2 p3 x2`.
pub fn switching_phi<T: Real>(p: &AdjointState<T>, x: &PlanarState<T>) -> T {
    -T::two() * p.p2 * x.x3 + T::two() * p.p3 * x.x2
}

/// Coefficients of the rational singular-control law, transcribed as
/// published (`kp*` are the primed denominator coefficients).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCoefficients<T> {
    pub k33: T,
    pub k23: T,
    pub k22: T,
    pub k3: T,
    pub k2: T,
    pub kp33: T,
    pub kp23: T,
    pub kp22: T,
    pub kp3: T,
    pub kp2: T,
}

/// How the leading `K33`/`K'33` terms of the published ratio are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KReading {
    /// `K33 x3`, as printed.
    Linear,
    /// `K33 x3²`.
    Quadratic,
    /// `K33 x3²` and `K'2 = 2Γf2` in place of the printed `2γf2`.
    QuadraticCorrected,
}

impl KReading {
    pub const ALL: [KReading; 3] = [KReading::Linear, KReading::Quadratic, KReading::QuadraticCorrected];

    pub fn label(&self) -> &'static str {
        match self {
            KReading::Linear => "x3",
            KReading::Quadratic => "x3^2",
            KReading::QuadraticCorrected => "x3^2+corrected_Kp2",
        }
    }
}

impl<T: Real> KCoefficients<T> {
    /// `u = N / D` under the given reading; `None` where `|D| < 1e-12`.
    pub fn ratio(&self, x: &PlanarState<T>, reading: KReading, model: &PlanarModel<T>) -> Option<T> {
        let (x2, x3) = (x.x2, x.x3);
        let lead = match reading {
            KReading::Linear => x3,
            KReading::Quadratic | KReading::QuadraticCorrected => x3 * x3,
        };
        let kp2 = match reading {
            KReading::QuadraticCorrected => T::two() * model.feedback_drive(),
            _ => self.kp2,
        };
        let num = self.k33 * lead + self.k23 * x2 * x3 + self.k22 * x2 * x2 + self.k3 * x3 + self.k2 * x2;
        let den = self.kp33 * lead + self.kp23 * x2 * x3 + self.kp22 * x2 * x2 + self.kp3 * x3 + kp2 * x2;
        (den.abs() >= T::tol(1e-12)).then(|| num / den)
    }
}

impl<T: Real> PlanarModel<T> {
    /// `ṗ2 = (Γ+γ)/2 p2 - 2u p3`, `ṗ3 = 2u p2 + Γf2 p2 + (γ+Γg) p3`.
    pub fn adjoint_rhs(&self, p: &AdjointState<T>, u: T) -> AdjointState<T> {
        let two = T::two();
        AdjointState {
            p2: self.coherence_rate() * p.p2 - two * u * p.p3,
            p3: two * u * p.p2 + self.feedback_drive() * p.p2 + self.population_rate() * p.p3,
        }
    }

    /// `v̇2 = -(2u + Γf2) v3 - (Γ+γ)/2 v2`, `v̇3 = 2u v2 - (γ+Γg) v3`.
    pub fn velocity_rhs(&self, v: &VelocityVector<T>, u: T) -> VelocityVector<T> {
        let two = T::two();
        VelocityVector::new(
            -(two * u + self.feedback_drive()) * v.v3 - self.coherence_rate() * v.v2,
            two * u * v.v2 - self.population_rate() * v.v3,
        )
    }

    /// `v(0) = F(x0) + u G(x0)`.
    pub fn initial_velocity(&self, x0: &PlanarState<T>, u: T) -> VelocityVector<T> {
        let r = self.rhs(x0, u);
        VelocityVector::new(r.x2, r.x3)
    }

    /// `θ̇ = (v2 v̇3 - v3 v̇2) / |v|²`.
    pub fn theta_dot(&self, v: &VelocityVector<T>, u: T) -> T {
        let d = self.velocity_rhs(v, u);
        (v.v2 * d.v3 - v.v3 * d.v2) / (v.v2 * v.v2 + v.v3 * v.v3)
    }

    /// The control keeping `Δ_B` constant along the flow:
    /// `u = -(∇Δ_B·F) / (∇Δ_B·G)`.
    pub fn singular_control(&self, x: &PlanarState<T>) -> Result<T> {
        let grad = self.delta_b_gradient(x);
        let along_g = grad.dot(&Self::control(x));
        if !(along_g.abs() >= T::tol(1e-12)) {
            return Err(Error::SingularControlUndefined(along_g.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(-grad.dot(&self.drift(x)) / along_g)
    }

    pub fn k_coefficients(&self) -> KCoefficients<T> {
        let p = self.params();
        let (gd, gu) = (p.gamma_down(), p.gamma_up());
        let g = self.g();
        let gf = self.feedback_drive();
        let two = T::two();
        let half = T::half();
        let three_halves = T::lit(1.5);
        let mixed = self.mixed_rate();
        let offset = self.population_offset();
        KCoefficients {
            k33: -(gd + gu) * gf,
            k23: mixed * (gd * half + three_halves * gu + gd * g) + two * gf * gf,
            k22: (gd + gu) * gf,
            k3: (gd - gu) * gf,
            k2: offset * (-gd * half + three_halves * gu + two * gd * g) - two * gf * gf,
            kp33: -two * mixed,
            kp23: -T::lit(8.0) * gf,
            kp22: two * mixed,
            kp3: -two * offset,
            kp2: two * gu * self.f2(),
        }
    }

    /// Costate perpendicular to `v(0)`, unit length, oriented so that
    /// `sign Φ(0) = sign u`. With it the Hamiltonian `p·ẋ` vanishes.
    pub fn perpendicular_adjoint(&self, x0: &PlanarState<T>, u: T) -> Result<AdjointState<T>> {
        let v = self.initial_velocity(x0, u);
        let n = v.norm();
        if !(n >= T::tol(1e-12)) {
            return Err(Error::TrivialAdjoint(n.to_f64().unwrap_or(f64::NAN)));
        }
        let p = AdjointState::new(-v.v3 / n, v.v2 / n)?;
        let phi = switching_phi(&p, x0);
        if phi.sign0() != 0 && phi.sign0() != u.sign0() {
            Ok(AdjointState { p2: -p.p2, p3: -p.p3 })
        } else {
            Ok(p)
        }
    }
}

/// Continuous rotation angle of `v(t)` relative to `v(t0)`. Successive
/// increments are taken in `(-π, π]`.
pub fn theta_of<T: Real>(vs: &[VelocityVector<T>]) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(vs.len());
    let mut prev_angle = T::zero();
    let mut theta = T::zero();
    for (k, v) in vs.iter().enumerate() {
        let n = v.norm();
        if !(n >= T::tol(1e-12)) {
            return Err(Error::AngleUndefined(n.to_f64().unwrap_or(f64::NAN), k));
        }
        let a = v.angle();
        if k > 0 {
            theta += wrap_angle(a - prev_angle);
        }
        prev_angle = a;
        out.push(theta);
    }
    Ok(out)
}

/// `sgn(θ) - sgn(θ̇)` with `sgn(0) = 0`. Zero marks times where switching
/// to the opposite control is allowed.
pub fn sgn_theta<T: Real>(theta: T, theta_dot: T) -> i8 {
    theta.sign0() - theta_dot.sign0()
}

/// Which angle enters `sgn_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleBranch {
    /// The continuous angle itself.
    Unwrapped,
    /// The angle reduced to `(-π, π]`.
    #[default]
    Principal,
}

impl AngleBranch {
    pub fn apply<T: Real>(&self, theta: T) -> T {
        match self {
            AngleBranch::Unwrapped => theta,
            AngleBranch::Principal => wrap_angle(theta),
        }
    }
}

/// State, velocity and costate integrated together along a constant-control
/// arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcState<T> {
    pub x: PlanarState<T>,
    pub v: VelocityVector<T>,
    pub p: AdjointState<T>,
}

impl<T: Real> Phase<T> for ArcState<T> {
    #[inline]
    fn axpy(self, h: T, d: Self) -> Self {
        Self { x: self.x.axpy(h, d.x), v: self.v.axpy(h, d.v), p: self.p.axpy(h, d.p) }
    }
    #[inline]
    fn norm(self) -> T {
        let (a, b, c) = (self.x.norm(), self.v.norm(), self.p.norm());
        (a * a + b * b + c * c).sqrt()
    }
}

/// Half-open allowed-switching window `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> Interval<T> {
    pub fn contains(&self, t: T, tol: T) -> bool {
        t >= self.start - tol && t <= self.end + tol
    }
}

/// A constant-control arc with its switching diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BangArc<T> {
    pub u: T,
    pub branch: AngleBranch,
    pub trajectory: Trajectory<T, ArcState<T>>,
    model: PlanarModel<T>,
}

/// Integrates a constant-control arc from `x0` with the perpendicular
/// costate initialisation.
pub fn simulate_arc<T: Real>(
    model: &PlanarModel<T>,
    x0: PlanarState<T>,
    u: T,
    t_end: T,
    dt: T,
    branch: AngleBranch,
) -> Result<BangArc<T>> {
    let p0 = model.perpendicular_adjoint(&x0, u)?;
    simulate_arc_with_adjoint(model, x0, p0, u, t_end, dt, branch)
}

pub fn simulate_arc_with_adjoint<T: Real>(
    model: &PlanarModel<T>,
    x0: PlanarState<T>,
    p0: AdjointState<T>,
    u: T,
    t_end: T,
    dt: T,
    branch: AngleBranch,
) -> Result<BangArc<T>> {
    let s0 = ArcState { x: x0, v: model.initial_velocity(&x0, u), p: p0 };
    let mut trajectory = integrate(
        |_, s: &ArcState<T>, _| arc_rhs(model, s, u),
        s0,
        (T::zero(), t_end),
        dt,
        &ControlSchedule::constant(ControlValue::real(u)),
    )?;
    let vs: Vec<_> = trajectory.states.iter().map(|s| s.v).collect();
    let thetas = theta_of(&vs)?;
    let diagnostics = trajectory
        .states
        .iter()
        .zip(thetas)
        .map(|(s, theta)| {
            let theta_dot = model.theta_dot(&s.v, u);
            Diagnostics {
                phi: switching_phi(&s.p, &s.x),
                theta,
                theta_dot,
                sgn_theta: sgn_theta(branch.apply(theta), theta_dot),
            }
        })
        .collect();
    trajectory.diagnostics = Some(diagnostics);
    Ok(BangArc { u, branch, trajectory, model: *model })
}

fn arc_rhs<T: Real>(model: &PlanarModel<T>, s: &ArcState<T>, u: T) -> ArcState<T> {
    ArcState {
        x: model.rhs(&s.x, u),
        v: model.velocity_rhs(&s.v, u),
        p: model.adjoint_rhs(&s.p, u),
    }
}

impl<T: Real> BangArc<T> {
    pub fn diagnostics(&self) -> &[Diagnostics<T>] {
        self.trajectory.diagnostics.as_deref().unwrap_or(&[])
    }

    pub fn times(&self) -> &[T] {
        &self.trajectory.times
    }

    /// State at `t_k + tau` for `0 ≤ tau ≤ t_{k+1} - t_k`, by one RK4 step
    /// from sample `k`.
    fn state_between(&self, k: usize, tau: T) -> ArcState<T> {
        let s = self.trajectory.states[k];
        if tau == T::zero() {
            return s;
        }
        let mut f = |_: T, st: &ArcState<T>| arc_rhs(&self.model, st, self.u);
        rk4_step(&mut f, self.trajectory.times[k], s, tau)
    }

    fn theta_between(&self, k: usize, st: &ArcState<T>) -> T {
        let base = self.trajectory.states[k].v.angle();
        self.diagnostics()[k].theta + wrap_angle(st.v.angle() - base)
    }

    fn allowed_between(&self, k: usize, tau: T) -> bool {
        let st = self.state_between(k, tau);
        let theta = self.theta_between(k, &st);
        sgn_theta(self.branch.apply(theta), self.model.theta_dot(&st.v, self.u)) == 0
    }

    fn refine<P: Fn(T) -> bool>(&self, k: usize, pred: P) -> T {
        let h = self.trajectory.times[k + 1] - self.trajectory.times[k];
        let left = pred(T::zero());
        let (mut lo, mut hi) = (T::zero(), h);
        for _ in 0..200 {
            let mid = (lo + hi) * T::half();
            if !(mid > lo && mid < hi) {
                break;
            }
            if pred(mid) == left {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.trajectory.times[k] + (lo + hi) * T::half()
    }

    /// Maximal windows where `sgn_θ = 0`, boundaries refined by bisection.
    pub fn switch_candidates(&self) -> Vec<Interval<T>> {
        let times = &self.trajectory.times;
        let diag = self.diagnostics();
        let mut out = Vec::new();
        let mut open: Option<T> = (diag.first().is_some_and(|d| d.sgn_theta == 0)).then(|| times[0]);
        for k in 0..diag.len().saturating_sub(1) {
            let a = diag[k].sgn_theta == 0;
            let b = diag[k + 1].sgn_theta == 0;
            if a == b {
                continue;
            }
            let t = self.refine(k, |tau| self.allowed_between(k, tau));
            if b {
                open = Some(t);
            } else if let Some(start) = open.take() {
                out.push(Interval { start, end: t });
            }
        }
        if let (Some(start), Some(end)) = (open, times.last()) {
            out.push(Interval { start, end: *end });
        }
        out
    }

    /// Sign changes of `Φ(t)`, refined by bisection.
    pub fn phi_zeros(&self) -> Vec<T> {
        let diag = self.diagnostics();
        let mut out = Vec::new();
        for k in 0..diag.len().saturating_sub(1) {
            let a = diag[k].phi;
            let b = diag[k + 1].phi;
            if a == T::zero() {
                out.push(self.trajectory.times[k]);
            } else if a * b < T::zero() {
                out.push(self.refine(k, |tau| {
                    let st = self.state_between(k, tau);
                    switching_phi(&st.p, &st.x) > T::zero()
                }));
            }
        }
        out
    }
}

/// Largest distance from any boundary in one candidate set to the nearest
/// boundary of the other; infinite when exactly one set is empty.
pub fn candidate_mismatch<T: Real>(a: &[Interval<T>], b: &[Interval<T>]) -> T {
    let ends = |s: &[Interval<T>]| s.iter().flat_map(|i| [i.start, i.end]).collect::<Vec<_>>();
    let (ea, eb) = (ends(a), ends(b));
    if ea.is_empty() && eb.is_empty() {
        return T::zero();
    }
    if ea.is_empty() || eb.is_empty() {
        return T::infinity();
    }
    let directed = |from: &[T], to: &[T]| {
        from.iter()
            .map(|t| to.iter().fold(T::infinity(), |m, s| m.min((*t - *s).abs())))
            .fold(T::zero(), |m, d| m.max(d))
    };
    directed(&ea, &eb).max(directed(&eb, &ea))
}

/// Counts refined `Φ` zeros lying in (or within `tol` of) a candidate window.
pub fn phi_theta_consistency<T: Real>(zeros: &[T], windows: &[Interval<T>], tol: T) -> (usize, usize) {
    let inside = zeros.iter().filter(|t| windows.iter().any(|w| w.contains(**t, tol))).count();
    (zeros.len(), inside)
}

/// State and costate for extremal tracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateCostate<T> {
    pub x: PlanarState<T>,
    pub p: AdjointState<T>,
}

impl<T: Real> Phase<T> for StateCostate<T> {
    fn axpy(self, h: T, d: Self) -> Self {
        Self { x: self.x.axpy(h, d.x), p: self.p.axpy(h, d.p) }
    }
    fn norm(self) -> T {
        let (a, b) = (self.x.norm(), self.p.norm());
        (a * a + b * b).sqrt()
    }
}

/// A bang-bang extremal following `u = sgn Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremal<T> {
    pub trajectory: Trajectory<T, StateCostate<T>>,
    pub switch_times: Vec<T>,
}

/// Follows the maximum-principle control `u = sgn Φ(t)` from `(x0, p0)`,
/// switching at refined zeros of `Φ`.
pub fn follow_extremal<T: Real>(
    model: &PlanarModel<T>,
    x0: PlanarState<T>,
    p0: AdjointState<T>,
    t_end: T,
    dt: T,
) -> Result<Extremal<T>> {
    validate_span((T::zero(), t_end), dt)?;
    let rhs = |s: &StateCostate<T>, u: T| StateCostate { x: model.rhs(&s.x, u), p: model.adjoint_rhs(&s.p, u) };
    let phi = |s: &StateCostate<T>| switching_phi(&s.p, &s.x);
    let mut s = StateCostate { x: x0, p: p0 };
    let mut u = if phi(&s) < T::zero() { -T::one() } else { T::one() };
    let mut t = T::zero();
    let mut traj = Trajectory::with_capacity((t_end / dt).to_usize().unwrap_or(0) + 2);
    traj.push(t, s, ControlValue::real(u));
    let mut switch_times = Vec::new();

    while t < t_end {
        let h = dt.min(t_end - t);
        let mut f = |_: T, st: &StateCostate<T>| rhs(st, u);
        let next = rk4_step(&mut f, t, s, h);
        if phi(&next) * u < T::zero() {
            // Φ changed sign inside the step: locate the zero and switch there
            let (mut lo, mut hi) = (T::zero(), h);
            for _ in 0..200 {
                let mid = (lo + hi) * T::half();
                if !(mid > lo && mid < hi) {
                    break;
                }
                if phi(&rk4_step(&mut f, t, s, mid)) * u > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let tau = (lo + hi) * T::half();
            if tau > T::zero() {
                s = rk4_step(&mut f, t, s, tau);
                t += tau;
            }
            u = -u;
            switch_times.push(t);
            if let Some(last) = traj.times.last() {
                if *last < t {
                    traj.push(t, s, ControlValue::real(u));
                    continue;
                }
            }
            if let Some(c) = traj.controls.last_mut() {
                *c = ControlValue::real(u);
            }
            continue;
        }
        s = next;
        t = if h < dt { t_end } else { t + h };
        traj.push(t, s, ControlValue::real(u));
    }
    Ok(Extremal { trajectory: traj, switch_times })
}

/// A singular arc followed with the unclamped law `u = singular_control(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularArc<T> {
    pub trajectory: Trajectory<T, PlanarState<T>>,
    /// First sample time with `|u| > 1`; the arc is cut there.
    pub exit_time: Option<T>,
}

/// Integrates the singular feedback law from `x0` until `t_end` or until the
/// control leaves `[-1, 1]`, whichever comes first.
pub fn singular_arc<T: Real>(model: &PlanarModel<T>, x0: PlanarState<T>, t_end: T, dt: T) -> Result<SingularArc<T>> {
    validate_span((T::zero(), t_end), dt)?;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let mut f = |_: T, x: &PlanarState<T>| match model.singular_control(x) {
        Ok(u) => model.rhs(x, u),
        Err(e) => {
            failure.set(Some(e));
            PlanarState::default()
        }
    };
    let mut traj = Trajectory::with_capacity((t_end / dt).to_usize().unwrap_or(0) + 2);
    let u0 = model.singular_control(&x0)?;
    traj.push(T::zero(), x0, ControlValue::real(u0));
    if u0.abs() > T::one() {
        return Ok(SingularArc { trajectory: traj, exit_time: Some(T::zero()) });
    }
    let mut x = x0;
    let mut t = T::zero();
    for t_next in step_times(T::zero(), t_end, dt) {
        x = rk4_step(&mut f, t, x, t_next - t);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let u = model.singular_control(&x)?;
        t = t_next;
        traj.push(t, x, ControlValue::real(u));
        if u.abs() > T::one() {
            return Ok(SingularArc { trajectory: traj, exit_time: Some(t) });
        }
    }
    Ok(SingularArc { trajectory: traj, exit_time: None })
}

/// Agreement of one reading of the published K-ratio with
/// `singular_control` over a point sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KReadingReport<T> {
    pub reading: KReading,
    /// Points where both the ratio and the singular control are defined.
    pub compared: usize,
    /// Largest `|u_K - u| / max(1, |u|)`.
    pub max_rel_dev: T,
}

impl<T: Real> KReadingReport<T> {
    pub fn agrees(&self, tol: T) -> bool {
        self.compared > 0 && self.max_rel_dev <= tol
    }
}

pub fn compare_k_readings<T: Real>(model: &PlanarModel<T>, points: &[PlanarState<T>]) -> Vec<KReadingReport<T>> {
    let k = model.k_coefficients();
    KReading::ALL
        .iter()
        .map(|&reading| {
            let mut compared = 0;
            let mut max_rel_dev = T::zero();
            for x in points {
                let (Some(uk), Ok(u)) = (k.ratio(x, reading, model), model.singular_control(x)) else {
                    continue;
                };
                compared += 1;
                max_rel_dev = max_rel_dev.max((uk - u).abs() / T::one().max(u.abs()));
            }
            KReadingReport { reading, compared, max_rel_dev }
        })
        .collect()
}

/// Control law of one segment of a bang-bang/singular schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcControl {
    Plus,
    Minus,
    Singular,
}

/// Result of [`bang_bang_simulate`]: the trajectory and the sample times at
/// which a singular control had to be clamped to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BangBangRun<T> {
    pub trajectory: Trajectory<T, PlanarState<T>>,
    pub clamp_events: Vec<T>,
}

/// Piecewise simulation of `(duration, control)` segments. Singular
/// segments evaluate `u = clamp(singular_control(x))` at every RK4 stage.
pub fn bang_bang_simulate<T: Real>(
    x0: PlanarState<T>,
    schedule: &[(T, ArcControl)],
    model: &PlanarModel<T>,
    dt: T,
) -> Result<BangBangRun<T>> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    if schedule.iter().any(|(d, _)| !(*d > T::zero())) {
        return Err(Error::InvalidParameter("segment durations must be positive".into()));
    }
    let mut run = BangBangRun { trajectory: Trajectory::with_capacity(0), clamp_events: Vec::new() };
    let mut t = T::zero();
    let mut x = x0;
    for (duration, control) in schedule {
        let t1 = t + *duration;
        let seg = match control {
            ArcControl::Plus | ArcControl::Minus => {
                let u = if *control == ArcControl::Plus { T::one() } else { -T::one() };
                integrate(
                    |_, s: &PlanarState<T>, c: ControlValue<T>| model.rhs(s, c.u1),
                    x,
                    (t, t1),
                    dt,
                    &ControlSchedule::constant(ControlValue::real(u)),
                )?
            }
            ArcControl::Singular => singular_segment(model, x, (t, t1), dt, &mut run.clamp_events)?,
        };
        x = *seg.last_state().expect("segment has samples");
        t = t1;
        run.trajectory.extend_from(seg);
    }
    Ok(run)
}

fn clamp_unit<T: Real>(u: T) -> (T, bool) {
    if u > T::one() {
        (T::one(), true)
    } else if u < -T::one() {
        (-T::one(), true)
    } else {
        (u, false)
    }
}

fn singular_segment<T: Real>(
    model: &PlanarModel<T>,
    x0: PlanarState<T>,
    span: (T, T),
    dt: T,
    clamp_events: &mut Vec<T>,
) -> Result<Trajectory<T, PlanarState<T>>> {
    validate_span(span, dt)?;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let clamped = Cell::new(false);
    let mut f = |_: T, x: &PlanarState<T>| match model.singular_control(x) {
        Ok(u) => {
            let (u, c) = clamp_unit(u);
            if c {
                clamped.set(true);
            }
            model.rhs(x, u)
        }
        Err(e) => {
            failure.set(Some(e));
            PlanarState::default()
        }
    };
    let control_at = |x: &PlanarState<T>| -> Result<(T, bool)> { Ok(clamp_unit(model.singular_control(x)?)) };

    let (t0, t1) = span;
    let mut traj = Trajectory::with_capacity(((t1 - t0) / dt).to_usize().unwrap_or(0) + 2);
    let (u0, c0) = control_at(&x0)?;
    if c0 {
        clamp_events.push(t0);
    }
    traj.push(t0, x0, ControlValue::real(u0));
    let mut x = x0;
    let mut t = t0;
    for t_next in step_times(t0, t1, dt) {
        clamped.set(false);
        x = rk4_step(&mut f, t, x, t_next - t);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let (u, c) = control_at(&x)?;
        if c || clamped.get() {
            clamp_events.push(t_next);
        }
        t = t_next;
        traj.push(t, x, ControlValue::real(u));
    }
    Ok(traj)
}
