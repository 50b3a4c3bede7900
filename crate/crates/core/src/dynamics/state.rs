use std::ops::{Add, Mul, Sub};

use crate::scalar::Real;

/// Vector-space operations needed by the fixed-step integrator.
pub trait Phase<T: Real>: Copy {
    /// `self + h * d`.
    fn axpy(self, h: T, d: Self) -> Self;
    /// Euclidean norm.
    fn norm(self) -> T;
}

/// Bloch coordinates `x1 = 2 Re ρ_eg`, `x2 = 2 Im ρ_eg`, `x3 = ρ_gg - ρ_ee`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochState3<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T: Real> BlochState3<T> {
    pub fn new(x1: T, x2: T, x3: T) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn norm_sqr(&self) -> T {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    /// Inside the Bloch ball up to `1e-9`.
    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= T::one() + T::tol(1e-9)
    }

    pub fn planar(&self) -> PlanarState<T> {
        PlanarState::new(self.x2, self.x3)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.x1 - other.x1)
            .abs()
            .max((self.x2 - other.x2).abs())
            .max((self.x3 - other.x3).abs())
    }
}

impl<T: Real> Phase<T> for BlochState3<T> {
    #[inline]
    fn axpy(self, h: T, d: Self) -> Self {
        Self::new(self.x1 + h * d.x1, self.x2 + h * d.x2, self.x3 + h * d.x3)
    }
    #[inline]
    fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }
}

/// The `(x2, x3)` half-plane state of the reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarState<T> {
    pub x2: T,
    pub x3: T,
}

impl<T: Real> PlanarState<T> {
    pub fn new(x2: T, x3: T) -> Self {
        Self { x2, x3 }
    }

    pub fn norm_sqr(&self) -> T {
        self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= T::one() + T::tol(1e-9)
    }

    /// Reflection `x2 -> -x2`.
    pub fn mirrored(&self) -> Self {
        Self::new(-self.x2, self.x3)
    }

    /// `Det(self, other) = self.x2 * other.x3 - self.x3 * other.x2`.
    pub fn det(&self, other: &Self) -> T {
        self.x2 * other.x3 - self.x3 * other.x2
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x2 * other.x2 + self.x3 * other.x3
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.x2 - other.x2).abs().max((self.x3 - other.x3).abs())
    }
}

impl<T: Real> Phase<T> for PlanarState<T> {
    #[inline]
    fn axpy(self, h: T, d: Self) -> Self {
        Self::new(self.x2 + h * d.x2, self.x3 + h * d.x3)
    }
    #[inline]
    fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }
}

impl<T: Real> Add for PlanarState<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x2 + rhs.x2, self.x3 + rhs.x3)
    }
}

impl<T: Real> Sub for PlanarState<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

impl<T: Real> Mul<T> for PlanarState<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x2 * s, self.x3 * s)
    }
}

/// Complex control amplitude `u = u1 + i u2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlValue<T> {
    pub u1: T,
    pub u2: T,
}

impl<T: Real> ControlValue<T> {
    pub fn new(u1: T, u2: T) -> Self {
        Self { u1, u2 }
    }

    /// Real control, as used by the planar time-optimal problem.
    pub fn real(u: T) -> Self {
        Self { u1: u, u2: T::zero() }
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn abs_sqr(&self) -> T {
        self.u1 * self.u1 + self.u2 * self.u2
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.u1, -self.u2)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}
