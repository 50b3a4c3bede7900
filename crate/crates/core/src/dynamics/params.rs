use num_complex::Complex;

use super::cmat::CMat2;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dissipation rates of the Lindblad channel: `Γ` (downward, `σ⁻`) and
/// `γ` (upward, `σ⁺`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    gamma_down: T,
    gamma_up: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(gamma_down: T, gamma_up: T) -> Result<Self> {
        if !(gamma_down.is_finite() && gamma_up.is_finite()) {
            return Err(Error::InvalidParameter("rates must be finite".into()));
        }
        if gamma_down < T::zero() || gamma_up < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "rates must be non-negative (Γ = {gamma_down}, γ = {gamma_up})"
            )));
        }
        if gamma_down + gamma_up <= T::zero() {
            return Err(Error::InvalidParameter("Γ + γ must be positive".into()));
        }
        Ok(Self { gamma_down, gamma_up })
    }

    /// Rates of a thermal bath with mean occupation `n_bar` and spontaneous
    /// emission rate `kappa`: `Γ = (n̄ + 1)κ`, `γ = n̄κ`.
    pub fn from_bath(n_bar: T, kappa: T) -> Result<Self> {
        if !(n_bar >= T::zero()) || !n_bar.is_finite() {
            return Err(Error::InvalidParameter(format!("n_bar must be >= 0, got {n_bar}")));
        }
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
        }
        Self::new((n_bar + T::one()) * kappa, n_bar * kappa)
    }

    /// `Γ`.
    #[inline]
    pub fn gamma_down(&self) -> T {
        self.gamma_down
    }

    /// `γ`.
    #[inline]
    pub fn gamma_up(&self) -> T {
        self.gamma_up
    }

    /// `Γ + γ`.
    #[inline]
    pub fn total(&self) -> T {
        self.gamma_down + self.gamma_up
    }
}

/// Scalars through which the feedback unitary enters the Bloch equations:
/// `f = f1 + i f2 = U_eg conj(U_gg)` and `g = |U_gg|²`.
///
/// No unitarity relation between `f` and `g` is enforced, so parameter sets
/// that are not realised by any unitary can still be explored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawFeedbackParams<T> {
    f1: T,
    f2: T,
    g: T,
}

impl<T: Real> RawFeedbackParams<T> {
    pub fn new(f1: T, f2: T, g: T) -> Result<Self> {
        if !(f1.is_finite() && f2.is_finite() && g.is_finite()) {
            return Err(Error::InvalidParameter("feedback scalars must be finite".into()));
        }
        if g < T::zero() || g > T::one() {
            return Err(Error::InvalidParameter(format!("g must lie in [0, 1], got {g}")));
        }
        Ok(Self { f1, f2, g })
    }

    /// `U_F = I`: `f = 0`, `g = 1`.
    pub fn identity() -> Self {
        Self { f1: T::zero(), f2: T::zero(), g: T::one() }
    }

    #[inline]
    pub fn f1(&self) -> T {
        self.f1
    }
    #[inline]
    pub fn f2(&self) -> T {
        self.f2
    }
    #[inline]
    pub fn g(&self) -> T {
        self.g
    }

    /// Whether `|f|² ≤ g(1-g)` holds, as it must for a unitary.
    pub fn is_unitary_compatible(&self) -> bool {
        self.f1 * self.f1 + self.f2 * self.f2 <= self.g * (T::one() - self.g) + T::tol(1e-12)
    }
}

/// Feedback unitary `U_F` applied after each detected emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackSpec<T> {
    unitary: CMat2<T>,
}

impl<T: Real> FeedbackSpec<T> {
    pub fn new(unitary: CMat2<T>) -> Result<Self> {
        let defect = unitary.unitarity_defect();
        if !(defect <= T::tol(1e-12)) {
            return Err(Error::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { unitary })
    }

    pub fn identity() -> Self {
        Self { unitary: CMat2::identity() }
    }

    /// `U_F = a σ_x + b σ_y + c σ_z`, rejected unless unitary.
    pub fn from_pauli(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Result<Self> {
        Self::new(
            CMat2::sigma_x().scale(a) + CMat2::sigma_y().scale(b) + CMat2::sigma_z().scale(c),
        )
    }

    /// One-parameter family `U_F = sin β σ_y + cos β σ_z`, giving `f1 = 0`,
    /// `f2 = sin β cos β`, `g = cos² β`.
    pub fn from_beta(beta: T) -> Self {
        let (s, c) = beta.sin_cos();
        Self {
            unitary: CMat2::sigma_y().scale_re(s) + CMat2::sigma_z().scale_re(c),
        }
    }

    #[inline]
    pub fn unitary(&self) -> &CMat2<T> {
        &self.unitary
    }

    /// `f = U_eg conj(U_gg)`.
    pub fn f(&self) -> Complex<T> {
        self.unitary.eg() * self.unitary.gg().conj()
    }

    /// `g = |U_gg|²`.
    pub fn g(&self) -> T {
        self.unitary.gg().norm_sqr()
    }

    pub fn raw(&self) -> RawFeedbackParams<T> {
        let f = self.f();
        RawFeedbackParams {
            f1: f.re,
            f2: f.im,
            g: self.g().min(T::one()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bath_rates() {
        let p = SystemParams::<f64>::from_bath(0.0, 1.0).unwrap();
        assert_eq!((p.gamma_down(), p.gamma_up()), (1.0, 0.0));
        let p = SystemParams::<f64>::from_bath(1.0, 0.3).unwrap();
        assert!((p.gamma_down() - 0.6).abs() < 1e-15 && (p.gamma_up() - 0.3).abs() < 1e-15);
        let p = SystemParams::<f64>::from_bath(0.5, 0.2).unwrap();
        assert!((p.gamma_down() - 0.3).abs() < 1e-15 && (p.gamma_up() - 0.1).abs() < 1e-15);
        assert!(p.gamma_down() >= p.gamma_up());
    }

    #[test]
    fn bath_rejects_bad_inputs() {
        assert!(SystemParams::from_bath(-0.1, 1.0).is_err());
        assert!(SystemParams::from_bath(0.1, 0.0).is_err());
        assert!(SystemParams::from_bath(0.1, -1.0).is_err());
        assert!(SystemParams::new(0.0, 0.0).is_err());
        assert!(SystemParams::new(-1.0, 2.0).is_err());
        assert!(SystemParams::new(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn beta_zero_is_sigma_z() {
        let fb = FeedbackSpec::<f64>::from_beta(0.0);
        assert_eq!(*fb.unitary(), CMat2::sigma_z());
        assert_eq!(fb.f(), Complex::new(0.0, 0.0));
        assert_eq!(fb.g(), 1.0);
    }

    #[test]
    fn beta_fifth_pi() {
        let fb = FeedbackSpec::<f64>::from_beta(0.2 * PI);
        let raw = fb.raw();
        assert_eq!(raw.f1(), 0.0);
        assert!((raw.f2() - 0.475528258147577).abs() < 1e-12);
        assert!((raw.g() - 0.654508497187474).abs() < 1e-12);
        assert!(raw.is_unitary_compatible());
    }

    #[test]
    fn beta_half_pi_is_sigma_y() {
        let fb = FeedbackSpec::<f64>::from_beta(0.5 * PI);
        assert!((*fb.unitary() - CMat2::sigma_y()).max_abs() < 1e-15);
        assert!(fb.g() < 1e-30);
        assert!(fb.f().norm() < 1e-16);
    }

    #[test]
    fn pauli_constructor_checks_unitarity() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert!(FeedbackSpec::from_pauli(one, zero, zero).is_ok());
        let s = Complex::new(0.6, 0.0);
        let c = Complex::new(0.8, 0.0);
        assert!(FeedbackSpec::from_pauli(zero, s, c).is_ok());
        assert!(matches!(
            FeedbackSpec::from_pauli(one, one, zero),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn identity_feedback_raw() {
        let raw = FeedbackSpec::<f64>::identity().raw();
        assert_eq!(raw, RawFeedbackParams::identity());
    }

    #[test]
    fn raw_rejects_g_out_of_range() {
        assert!(RawFeedbackParams::new(0.0, 0.1, 1.2).is_err());
        assert!(RawFeedbackParams::new(0.0, 0.1, -0.1).is_err());
        // g = cos⁴(π/5) with f2 = sin cos is admissible but not unitary
        let c = (PI / 5.0).cos();
        let s = (PI / 5.0).sin();
        let literal = RawFeedbackParams::new(0.0, c * s, c.powi(4)).unwrap();
        let g = literal.g();
        assert!((literal.f2() * literal.f2() - g * (1.0 - g)).abs() > 1e-3);
    }

    #[test]
    fn unitary_gives_f_and_g_relation() {
        // generic SU(2) element
        let a = Complex::new(0.3, 0.4);
        let b = Complex::new(-0.5, (1.0f64 - 0.25 - 0.25).sqrt());
        let u = CMat2::new(a, -b.conj(), b, a.conj());
        let fb = FeedbackSpec::new(u).unwrap();
        let f = fb.f();
        let g = fb.g();
        assert!((g + u.eg().norm_sqr() - 1.0).abs() < 1e-14);
        assert!((f.norm_sqr() - g * (1.0 - g)).abs() < 1e-14);
    }
}
