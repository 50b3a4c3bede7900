//! Closed-form stationary states with and without jump feedback.

use rayon::prelude::*;

use crate::dynamics::{bloch_rhs3, BlochState3, ControlValue, Phase, RawFeedbackParams, SystemParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A stationary Bloch vector with its purity `|x|²` and the residual
/// `|ẋ|` of the Bloch equations evaluated there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryResult<T> {
    pub state: BlochState3<T>,
    pub purity: T,
    pub residual: T,
}

impl<T: Real> StationaryResult<T> {
    fn evaluate(state: BlochState3<T>, u: ControlValue<T>, p: &SystemParams<T>, fb: &RawFeedbackParams<T>) -> Self {
        Self {
            state,
            purity: state.norm_sqr(),
            residual: bloch_rhs3(&state, u, p, fb).norm(),
        }
    }
}

/// Stationary state without feedback:
/// `x3 = (Γ² - γ²) / (8|u|² + (Γ+γ)²)`, `x1 = 4 u2 x3 / (Γ+γ)`,
/// `x2 = -4 u1 x3 / (Γ+γ)`.
pub fn stationary_no_feedback<T: Real>(u: ControlValue<T>, p: &SystemParams<T>) -> Result<StationaryResult<T>> {
    let gd = p.gamma_down();
    let gu = p.gamma_up();
    let sum = p.total();
    if !(sum > T::zero()) {
        return Err(Error::InvalidParameter("Γ + γ must be positive".into()));
    }
    let four = T::lit(4.0);
    let x3 = (gd * gd - gu * gu) / (T::lit(8.0) * u.abs_sqr() + sum * sum);
    let x1 = four * u.u2 * x3 / sum;
    let x2 = -four * u.u1 * x3 / sum;
    Ok(StationaryResult::evaluate(
        BlochState3::new(x1, x2, x3),
        u,
        p,
        &RawFeedbackParams::identity(),
    ))
}

/// Upper bound on `x3²` for the feedback-free stationary state:
/// `(Γ+γ)² / ((Γ+γ)² + 16|u|²)`.
pub fn no_feedback_x3_bound<T: Real>(u: ControlValue<T>, p: &SystemParams<T>) -> T {
    let s2 = p.total() * p.total();
    s2 / (s2 + T::lit(16.0) * u.abs_sqr())
}

/// Stationary state with feedback scalars `(f1, f2, g)`.
pub fn stationary_with_feedback<T: Real>(
    u: ControlValue<T>,
    p: &SystemParams<T>,
    fb: &RawFeedbackParams<T>,
) -> Result<StationaryResult<T>> {
    let gd = p.gamma_down();
    let gu = p.gamma_up();
    let sum = p.total();
    let (f1, f2, g) = (fb.f1(), fb.f2(), fb.g());
    let (u1, u2) = (u.u1, u.u2);
    let two = T::two();
    let four = T::lit(4.0);

    let numerator = four * gd * (-u1 * f2 + u2 * f1) + sum * (gu - gd * g);
    let denominator = four * u1 * (-two * u1 - gd * f2) - four * u2 * (two * u2 - gd * f1) - sum * (gu + gd * g);
    if !(denominator.abs() > T::tol(1e-12)) {
        return Err(Error::DegenerateStationary(denominator.to_f64().unwrap_or(f64::NAN)));
    }
    let x3 = numerator / denominator;
    let x1 = ((four * u2 - two * gd * f1) * x3 + two * gd * f1) / sum;
    let x2 = ((-four * u1 - two * gd * f2) * x3 + two * gd * f2) / sum;
    Ok(StationaryResult::evaluate(BlochState3::new(x1, x2, x3), u, p, fb))
}

/// Stationary states over a grid of controls. Points where the closed form
/// degenerates are listed separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep<T> {
    pub results: Vec<(ControlValue<T>, StationaryResult<T>)>,
    pub degenerate: Vec<ControlValue<T>>,
}

pub fn reachable_sweep<T: Real>(grid: &[ControlValue<T>], p: &SystemParams<T>, fb: &RawFeedbackParams<T>) -> Sweep<T> {
    let evaluated: Vec<_> = grid
        .par_iter()
        .map(|u| (*u, stationary_with_feedback(*u, p, fb)))
        .collect();
    let mut sweep = Sweep { results: Vec::new(), degenerate: Vec::new() };
    for (u, r) in evaluated {
        match r {
            Ok(r) => sweep.results.push((u, r)),
            Err(_) => sweep.degenerate.push(u),
        }
    }
    sweep
}

/// Horizon `50 / min(Γ+γ, γ+Γg)` after which relaxation transients are
/// negligible.
pub fn relaxation_horizon<T: Real>(p: &SystemParams<T>, fb: &RawFeedbackParams<T>) -> T {
    let slow = p.total().min(p.gamma_up() + p.gamma_down() * fb.g());
    T::lit(50.0) / slow
}
