//! Classic fixed-step RK4 with piecewise-constant controls.

use super::state::{ControlValue, Phase};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-sample switching diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics<T> {
    pub phi: T,
    pub theta: T,
    pub theta_dot: T,
    pub sgn_theta: i8,
}

/// Time-stamped states and the controls applied from each sample onward.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, S> {
    pub times: Vec<T>,
    pub states: Vec<S>,
    pub controls: Vec<ControlValue<T>>,
    pub diagnostics: Option<Vec<Diagnostics<T>>>,
}

impl<T: Real, S: Copy> Trajectory<T, S> {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            controls: Vec::with_capacity(n),
            diagnostics: None,
        }
    }

    pub fn push(&mut self, t: T, x: S, u: ControlValue<T>) {
        self.times.push(t);
        self.states.push(x);
        self.controls.push(u);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&S> {
        self.states.last()
    }

    /// Times strictly increasing and all per-sample lists of equal length.
    pub fn is_consistent(&self) -> bool {
        let n = self.times.len();
        self.states.len() == n
            && self.controls.len() == n
            && self.diagnostics.as_ref().is_none_or(|d| d.len() == n)
            && self.times.windows(2).all(|w| w[0] < w[1])
    }

    /// Appends `other`, dropping its first sample when it repeats our last time.
    pub fn extend_from(&mut self, other: Trajectory<T, S>) {
        let skip = match (self.times.last(), other.times.first()) {
            (Some(a), Some(b)) if *a >= *b => 1,
            _ => 0,
        };
        self.times.extend(other.times.into_iter().skip(skip));
        self.states.extend(other.states.into_iter().skip(skip));
        self.controls.extend(other.controls.into_iter().skip(skip));
    }
}

/// Piecewise-constant control `u(t)`, right-continuous at switching times.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule<T> {
    initial: ControlValue<T>,
    switches: Vec<(T, ControlValue<T>)>,
}

impl<T: Real> ControlSchedule<T> {
    pub fn constant(u: ControlValue<T>) -> Self {
        Self { initial: u, switches: Vec::new() }
    }

    /// `initial` until the first switching time, then each listed value.
    pub fn piecewise(initial: ControlValue<T>, switches: Vec<(T, ControlValue<T>)>) -> Result<Self> {
        if switches.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidTimeSpan("switching times must increase strictly".into()));
        }
        if switches.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) || !initial.is_finite() {
            return Err(Error::InvalidParameter("non-finite control schedule entry".into()));
        }
        Ok(Self { initial, switches })
    }

    /// Consecutive `(duration, u)` segments starting at `t0`.
    pub fn from_segments(t0: T, segments: &[(T, ControlValue<T>)]) -> Result<Self> {
        let Some(((d0, u0), rest)) = segments.split_first() else {
            return Err(Error::InvalidParameter("empty control schedule".into()));
        };
        if segments.iter().any(|(d, _)| !(*d > T::zero())) {
            return Err(Error::InvalidParameter("segment durations must be positive".into()));
        }
        let mut t = t0 + *d0;
        let mut switches = Vec::with_capacity(rest.len());
        for (d, u) in rest {
            switches.push((t, *u));
            t += *d;
        }
        Self::piecewise(*u0, switches)
    }

    pub fn value_at(&self, t: T) -> ControlValue<T> {
        self.switches
            .iter()
            .take_while(|(ts, _)| *ts <= t)
            .last()
            .map_or(self.initial, |(_, u)| *u)
    }

    /// Maximal constant-control pieces of `[t0, t1]`.
    pub fn segments(&self, t0: T, t1: T) -> Vec<(T, T, ControlValue<T>)> {
        let mut out = Vec::new();
        let mut start = t0;
        let mut u = self.value_at(t0);
        for (ts, us) in &self.switches {
            if *ts <= t0 {
                continue;
            }
            if *ts >= t1 {
                break;
            }
            out.push((start, *ts, u));
            start = *ts;
            u = *us;
        }
        out.push((start, t1, u));
        out
    }

    pub fn switching_times(&self) -> impl Iterator<Item = T> + '_ {
        self.switches.iter().map(|(t, _)| *t)
    }
}

/// One classic RK4 step of size `h` for `ẋ = f(t, x)`.
#[inline]
pub fn rk4_step<T, S, F>(f: &mut F, t: T, x: S, h: T) -> S
where
    T: Real,
    S: Phase<T>,
    F: FnMut(T, &S) -> S,
{
    let half = h * T::half();
    let k1 = f(t, &x);
    let k2 = f(t + half, &x.axpy(half, k1));
    let k3 = f(t + half, &x.axpy(half, k2));
    let k4 = f(t + h, &x.axpy(h, k3));
    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);
    x.axpy(sixth, k1).axpy(third, k2).axpy(third, k3).axpy(sixth, k4)
}

pub(crate) fn validate_span<T: Real>(t_span: (T, T), dt: T) -> Result<()> {
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidTimeSpan(format!("need t1 > t0, got ({t0}, {t1})")));
    }
    if !dt.is_finite() || dt <= T::zero() {
        return Err(Error::InvalidTimeSpan(format!("dt must be positive, got {dt}")));
    }
    if dt < T::lit(1e-12) {
        return Err(Error::StepUnderflow(dt.to_f64().unwrap_or(0.0)));
    }
    Ok(())
}

/// Sample times `a + k dt` on `(a, b]`, ending exactly at `b`. A remainder
/// shorter than `1e-9 dt` is absorbed by the final step.
pub(crate) fn step_times<T: Real>(a: T, b: T, dt: T) -> impl Iterator<Item = T> {
    let span = b - a;
    let full = (span / dt).floor();
    let rem = span - full * dt;
    let mut n = full.to_usize().unwrap_or(0);
    if rem > dt * T::lit(1e-9) || n == 0 {
        n += 1;
    }
    (1..=n).map(move |k| if k == n { b } else { a + T::from_usize(k).unwrap() * dt })
}

/// Integrates `ẋ = rhs(t, x, u(t))` over `t_span` with step `dt`, landing
/// exactly on every switching time of `schedule` and on `t_span.1`.
pub fn integrate<T, S, F>(
    mut rhs: F,
    x0: S,
    t_span: (T, T),
    dt: T,
    schedule: &ControlSchedule<T>,
) -> Result<Trajectory<T, S>>
where
    T: Real,
    S: Phase<T>,
    F: FnMut(T, &S, ControlValue<T>) -> S,
{
    validate_span(t_span, dt)?;
    let (t0, t1) = t_span;
    let est = ((t1 - t0) / dt).to_usize().unwrap_or(0) + 2;
    let mut traj = Trajectory::with_capacity(est);
    let mut x = x0;
    let mut t = t0;
    let segments = schedule.segments(t0, t1);
    traj.push(t, x, segments[0].2);
    for (a, b, u) in segments {
        // the control recorded at a switch sample is the one applied after it
        if let Some(last) = traj.controls.last_mut() {
            *last = u;
        }
        let mut f = |tt: T, s: &S| rhs(tt, s, u);
        for t_next in step_times(a, b, dt) {
            x = rk4_step(&mut f, t, x, t_next - t);
            t = t_next;
            traj.push(t, x, u);
        }
    }
    Ok(traj)
}
