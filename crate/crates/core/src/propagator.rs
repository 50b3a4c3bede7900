//! Exact solution of the planar dynamics for a constant control.
//!
//! With `ẋ2 = A2 x2 + B2 x3 + C2` and `ẋ3 = A3 x2 + B3 x3 + C3`, the solution
//! is `x2(t) = L' + M' e^{α2 t} + N' e^{α3 t}` and
//! `x3(t) = L + M e^{α2 t} + N e^{α3 t}`. All mode arithmetic is complex, so
//! node and spiral regimes share one code path.

use num_complex::Complex;

use crate::dynamics::{PlanarModel, PlanarState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients of the affine system for one fixed control value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCoeffs<T> {
    pub a2: T,
    pub b2: T,
    pub c2: T,
    pub a3: T,
    pub b3: T,
    pub c3: T,
}

impl<T: Real> AffineCoeffs<T> {
    pub fn rhs(&self, x: &PlanarState<T>) -> PlanarState<T> {
        PlanarState::new(
            self.a2 * x.x2 + self.b2 * x.x3 + self.c2,
            self.a3 * x.x2 + self.b3 * x.x3 + self.c3,
        )
    }

    /// `A2 B3 - A3 B2`.
    pub fn determinant(&self) -> T {
        self.a2 * self.b3 - self.a3 * self.b2
    }

    pub fn trace(&self) -> T {
        self.a2 + self.b3
    }
}

impl<T: Real> PlanarModel<T> {
    /// `A2 = -(Γ+γ)/2`, `B2 = -2u - Γf2`, `C2 = Γf2`, `A3 = 2u`,
    /// `B3 = -(γ+Γg)`, `C3 = -(γ-Γg)`.
    pub fn affine_coeffs(&self, u: T) -> AffineCoeffs<T> {
        let two = T::two();
        AffineCoeffs {
            a2: -self.coherence_rate(),
            b2: -two * u - self.feedback_drive(),
            c2: self.feedback_drive(),
            a3: two * u,
            b3: -self.population_rate(),
            c3: -self.population_offset(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPropagator<T> {
    pub alpha2: Complex<T>,
    pub alpha3: Complex<T>,
    pub l: Complex<T>,
    pub m: Complex<T>,
    pub n: Complex<T>,
    pub lp: Complex<T>,
    pub mp: Complex<T>,
    pub np: Complex<T>,
    pub x0: PlanarState<T>,
    pub coeffs: AffineCoeffs<T>,
}

impl<T: Real> AnalyticPropagator<T> {
    pub fn build(coeffs: AffineCoeffs<T>, x0: PlanarState<T>) -> Result<Self> {
        let AffineCoeffs { a2, b2, c2, a3, b3, c3 } = coeffs;
        let det = coeffs.determinant();
        if !(det.abs() >= T::tol(1e-12)) {
            return Err(Error::SingularLinearPart(det.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = coeffs.trace();
        let c = |re: T| Complex::new(re, T::zero());
        let root = c(tr * tr - T::lit(4.0) * det).sqrt();
        let half = T::half();
        let alpha2 = (c(tr) + root) * half;
        let alpha3 = (c(tr) - root) * half;
        let gap = alpha2 - alpha3;
        if !(gap.norm() >= T::tol(1e-10)) {
            return Err(Error::RepeatedEigenvalue(gap.norm().to_f64().unwrap_or(f64::NAN)));
        }

        let (x20, x30) = (c(x0.x2), c(x0.x3));
        let lp = c((c3 * b2 - c2 * b3) / det);
        let mp = (lp * tr + c(b2 * x0.x3 - b3 * x0.x2 + c2) + (x20 - lp) * alpha2) / gap;
        let np = x20 - lp - mp;

        let l = c((a3 * c2 - a2 * c3) / det);
        let m = (l * tr + c(-a2 * x0.x3 + a3 * x0.x2 + c3) + (x30 - l) * alpha2) / gap;
        let n = x30 - l - m;

        Ok(Self { alpha2, alpha3, l, m, n, lp, mp, np, x0, coeffs })
    }

    fn modes(&self, t: T) -> (Complex<T>, Complex<T>) {
        let ct = Complex::new(t, T::zero());
        ((self.alpha2 * ct).exp(), (self.alpha3 * ct).exp())
    }

    /// State at time `t ≥ 0` after the start of the segment.
    pub fn evaluate(&self, t: T) -> Result<PlanarState<T>> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidTimeSpan(format!("evaluation time must be >= 0, got {t}")));
        }
        let (e2, e3) = self.modes(t);
        let x2 = self.lp + self.mp * e2 + self.np * e3;
        let x3 = self.l + self.m * e2 + self.n * e3;
        let residue = x2.im.abs().max(x3.im.abs());
        if residue > T::tol(1e-10) {
            return Err(Error::ImaginaryResidue(residue.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(PlanarState::new(x2.re, x3.re))
    }

    /// Closed-form time derivative `Σ α M e^{αt}`.
    pub fn derivative(&self, t: T) -> PlanarState<T> {
        let (e2, e3) = self.modes(t);
        PlanarState::new(
            (self.alpha2 * self.mp * e2 + self.alpha3 * self.np * e3).re,
            (self.alpha2 * self.m * e2 + self.alpha3 * self.n * e3).re,
        )
    }

    /// `(L', L)`, the equilibrium of the constant-control flow.
    pub fn fixed_point(&self) -> PlanarState<T> {
        PlanarState::new(self.lp.re, self.l.re)
    }

    /// Both eigenvalues have negative real part.
    pub fn is_stable(&self) -> bool {
        self.alpha2.re < T::zero() && self.alpha3.re < T::zero()
    }

    /// Complex-conjugate eigenvalue pair.
    pub fn is_spiral(&self) -> bool {
        self.alpha2.im != T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FeedbackSpec, SystemParams};

    fn sample_model(beta: Option<f64>) -> PlanarModel<f64> {
        let p = SystemParams::new(0.4, 0.3).unwrap();
        match beta {
            Some(b) => PlanarModel::new(p, &FeedbackSpec::from_beta(b).raw()).unwrap(),
            None => PlanarModel::without_feedback(p),
        }
    }

    #[test]
    fn coefficients_without_feedback() {
        let c = sample_model(None).affine_coeffs(1.0);
        let expected = [-0.35, -2.0, 0.0, 2.0, -0.7, 0.1];
        let got = [c.a2, c.b2, c.c2, c.a3, c.b3, c.c3];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15, "{got:?}");
        }
    }

    #[test]
    fn balanced_rates_center_at_origin() {
        let m = PlanarModel::without_feedback(SystemParams::new(0.3, 0.3).unwrap());
        let c = m.affine_coeffs(0.0);
        assert_eq!(c.c3, 0.0);
        let prop = AnalyticPropagator::build(c, PlanarState::new(0.2, 0.1)).unwrap();
        assert_eq!(prop.fixed_point(), PlanarState::new(0.0, 0.0));
    }

    #[test]
    fn spiral_regime_without_feedback() {
        let c = sample_model(None).affine_coeffs(1.0);
        let disc = c.trace() * c.trace() - 4.0 * c.determinant();
        assert!((disc - (1.1025 - 16.98)).abs() < 1e-12);
        let prop = AnalyticPropagator::build(c, PlanarState::new(0.0, 1.0)).unwrap();
        assert!(prop.is_spiral() && prop.is_stable());
    }

    #[test]
    fn equilibrium_start_has_no_modes() {
        let m = sample_model(Some(0.2 * std::f64::consts::PI));
        let c = m.affine_coeffs(-1.0);
        let fp = m.fixed_point(-1.0).unwrap();
        let prop = AnalyticPropagator::build(c, fp).unwrap();
        for z in [prop.m, prop.n, prop.mp, prop.np] {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn starts_at_initial_state() {
        let m = sample_model(Some(0.2 * std::f64::consts::PI));
        let x0 = PlanarState::new(0.3, -0.6);
        let prop = AnalyticPropagator::build(m.affine_coeffs(1.0), x0).unwrap();
        assert!(prop.evaluate(0.0).unwrap().max_abs_diff(&x0) < 1e-12);
        assert!(prop.evaluate(-1.0).is_err());
    }

    #[test]
    fn eigenvalue_identities() {
        let c = sample_model(Some(0.3)).affine_coeffs(0.7);
        let prop = AnalyticPropagator::build(c, PlanarState::new(0.1, 0.2)).unwrap();
        let sum = prop.alpha2 + prop.alpha3;
        let prod = prop.alpha2 * prop.alpha3;
        assert!((sum.re - c.trace()).abs() < 1e-12 && sum.im.abs() < 1e-12);
        assert!((prod.re - c.determinant()).abs() < 1e-12 && prod.im.abs() < 1e-12);
    }

    #[test]
    fn node_regime_is_real() {
        // no drive: decoupled real decay rates
        let c = sample_model(Some(0.3)).affine_coeffs(0.0);
        let prop = AnalyticPropagator::build(c, PlanarState::new(0.5, -0.5)).unwrap();
        assert!(!prop.is_spiral());
        let x = prop.evaluate(3.0).unwrap();
        assert!(x.x2.is_finite());
    }

    #[test]
    fn rejects_singular_and_repeated() {
        let singular = AffineCoeffs { a2: 1.0, b2: 2.0, c2: 0.0, a3: 2.0, b3: 4.0, c3: 1.0 };
        assert!(matches!(
            AnalyticPropagator::build(singular, PlanarState::default()),
            Err(Error::SingularLinearPart(_))
        ));
        let repeated = AffineCoeffs { a2: -1.0, b2: 0.0, c2: 0.0, a3: 0.0, b3: -1.0, c3: 1.0 };
        assert!(matches!(
            AnalyticPropagator::build(repeated, PlanarState::default()),
            Err(Error::RepeatedEigenvalue(_))
        ));
    }
}
