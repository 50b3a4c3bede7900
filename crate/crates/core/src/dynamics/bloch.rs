//! Bloch-vector form of the feedback master equation.

use super::params::{RawFeedbackParams, SystemParams};
use super::state::{BlochState3, ControlValue, PlanarState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Full three-component Bloch equations with complex control and feedback
/// scalars `(f1, f2, g)`.
pub fn bloch_rhs3<T: Real>(
    x: &BlochState3<T>,
    u: ControlValue<T>,
    params: &SystemParams<T>,
    fb: &RawFeedbackParams<T>,
) -> BlochState3<T> {
    let two = T::two();
    let gd = params.gamma_down();
    let gu = params.gamma_up();
    let coh_rate = params.total() * T::half();
    let jump = T::one() - x.x3;
    BlochState3::new(
        two * u.u2 * x.x3 - coh_rate * x.x1 + gd * fb.f1() * jump,
        -two * u.u1 * x.x3 - coh_rate * x.x2 + gd * fb.f2() * jump,
        two * u.u1 * x.x2 - two * u.u2 * x.x1 - x.x3 * (gu + gd * fb.g()) - (gu - gd * fb.g()),
    )
}

/// The reduced `(x2, x3)` system obtained for real control and `f1 = 0`,
/// written as `ẋ = F(x) + u G(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarModel<T> {
    params: SystemParams<T>,
    f2: T,
    g: T,
}

impl<T: Real> PlanarModel<T> {
    /// Rejects feedback with `f1 ≠ 0`, which couples `x1` back in.
    pub fn new(params: SystemParams<T>, fb: &RawFeedbackParams<T>) -> Result<Self> {
        if fb.f1().abs() > T::tol(1e-12) {
            return Err(Error::NotPlanar(fb.f1().to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { params, f2: fb.f2(), g: fb.g() })
    }

    pub fn without_feedback(params: SystemParams<T>) -> Self {
        Self { params, f2: T::zero(), g: T::one() }
    }

    #[inline]
    pub fn params(&self) -> &SystemParams<T> {
        &self.params
    }
    #[inline]
    pub fn f2(&self) -> T {
        self.f2
    }
    #[inline]
    pub fn g(&self) -> T {
        self.g
    }

    pub fn feedback(&self) -> RawFeedbackParams<T> {
        RawFeedbackParams::new(T::zero(), self.f2, self.g).expect("validated on construction")
    }

    /// `(Γ + γ)/2`, decay rate of the coherence `x2`.
    #[inline]
    pub fn coherence_rate(&self) -> T {
        self.params.total() * T::half()
    }

    /// `γ + Γg`, decay rate of the population difference `x3`.
    #[inline]
    pub fn population_rate(&self) -> T {
        self.params.gamma_up() + self.params.gamma_down() * self.g
    }

    /// `γ - Γg`.
    #[inline]
    pub fn population_offset(&self) -> T {
        self.params.gamma_up() - self.params.gamma_down() * self.g
    }

    /// `Γ f2`.
    #[inline]
    pub fn feedback_drive(&self) -> T {
        self.params.gamma_down() * self.f2
    }

    /// Drift field `F`.
    pub fn drift(&self, x: &PlanarState<T>) -> PlanarState<T> {
        let gf = self.feedback_drive();
        PlanarState::new(
            -self.coherence_rate() * x.x2 + gf - gf * x.x3,
            -self.population_rate() * x.x3 - self.population_offset(),
        )
    }

    /// Control field `G = (-2 x3, 2 x2)`.
    pub fn control(x: &PlanarState<T>) -> PlanarState<T> {
        PlanarState::new(-T::two() * x.x3, T::two() * x.x2)
    }

    /// `F(x) + u G(x)`.
    pub fn rhs(&self, x: &PlanarState<T>, u: T) -> PlanarState<T> {
        let f = self.drift(x);
        let g = Self::control(x);
        PlanarState::new(f.x2 + u * g.x2, f.x3 + u * g.x3)
    }

    /// Jacobian of `F + uG`, row-major in `(x2, x3)`. Constant in `x`.
    pub fn jacobian(&self, u: T) -> [[T; 2]; 2] {
        let two = T::two();
        [
            [-self.coherence_rate(), -two * u - self.feedback_drive()],
            [two * u, -self.population_rate()],
        ]
    }

    /// Zero of `F + uG`, when the linear part is invertible.
    pub fn fixed_point(&self, u: T) -> Option<PlanarState<T>> {
        let j = self.jacobian(u);
        let c = self.drift(&PlanarState::new(T::zero(), T::zero()));
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < T::tol(1e-14) {
            return None;
        }
        // solve J x = -c
        let x2 = (-c.x2 * j[1][1] + c.x3 * j[0][1]) / det;
        let x3 = (-c.x3 * j[0][0] + c.x2 * j[1][0]) / det;
        Some(PlanarState::new(x2, x3))
    }
}

/// Planar right-hand side taking raw feedback scalars; errors when
/// `f1 ≠ 0`.
pub fn bloch_rhs2<T: Real>(
    x: &PlanarState<T>,
    u: T,
    params: &SystemParams<T>,
    fb: &RawFeedbackParams<T>,
) -> Result<PlanarState<T>> {
    Ok(PlanarModel::new(*params, fb)?.rhs(x, u))
}
