//! Matrix-level master equation. It shares no code with the Bloch-form
//! right-hand sides and serves as their oracle.

use num_complex::Complex;

use super::cmat::CMat2;
use super::params::{FeedbackSpec, SystemParams};
use super::state::{BlochState3, ControlValue};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A validated qubit density matrix in the basis `(e, g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T> {
    rho: CMat2<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Checks unit trace, hermiticity and positivity (eigenvalues ≥ -1e-9).
    pub fn new(rho: CMat2<T>) -> Result<Self> {
        let herm = rho.hermiticity_defect();
        if !(herm <= T::tol(1e-12)) {
            return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = rho.trace();
        if !((tr.re - T::one()).abs() <= T::tol(1e-12) && tr.im.abs() <= T::tol(1e-12)) {
            return Err(Error::InvalidDensity(format!("trace = {tr}")));
        }
        let (lo, _) = hermitian_eigenvalues(&rho);
        if lo < -T::tol(1e-9) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo}")));
        }
        Ok(Self { rho })
    }

    /// `ρ = ½ [[1 - x3, x1 + i x2], [x1 - i x2, 1 + x3]]`.
    pub fn from_bloch(x: &BlochState3<T>) -> Result<Self> {
        if !x.is_physical() {
            return Err(Error::InvalidDensity(format!(
                "Bloch vector outside the unit ball (|x|² = {})",
                x.norm_sqr()
            )));
        }
        Ok(Self { rho: bloch_to_matrix(x) })
    }

    pub fn to_bloch(&self) -> BlochState3<T> {
        bloch_components(&self.rho)
    }

    pub fn matrix(&self) -> &CMat2<T> {
        &self.rho
    }

    pub fn purity(&self) -> T {
        (self.rho * self.rho).trace().re
    }
}

/// Affine map from Bloch coordinates to a Hermitian unit-trace matrix; no
/// positivity check.
pub fn bloch_to_matrix<T: Real>(x: &BlochState3<T>) -> CMat2<T> {
    let h = T::half();
    let coh = Complex::new(x.x1 * h, x.x2 * h);
    CMat2::new(
        Complex::new((T::one() - x.x3) * h, T::zero()),
        coh,
        coh.conj(),
        Complex::new((T::one() + x.x3) * h, T::zero()),
    )
}

/// `x1 = 2 Re m_eg`, `x2 = 2 Im m_eg`, `x3 = m_gg - m_ee`. Linear, so it
/// also maps a derivative `dρ/dt` to the Bloch velocity.
pub fn bloch_components<T: Real>(m: &CMat2<T>) -> BlochState3<T> {
    let two = T::two();
    BlochState3::new(two * m.eg().re, two * m.eg().im, m.gg().re - m.ee().re)
}

fn hermitian_eigenvalues<T: Real>(m: &CMat2<T>) -> (T, T) {
    let a = m.ee().re;
    let d = m.gg().re;
    let b = m.eg();
    let mid = (a + d) * T::half();
    let rad = ((a - d) * (a - d) * T::lit(0.25) + b.norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// Right-hand side of the feedback master equation
///
/// ```text
/// dρ/dt = -i[H, ρ] + Γ (U σ⁻ ρ σ⁺ U† - ½{σ⁺σ⁻, ρ}) + γ (σ⁺ ρ σ⁻ - ½{σ⁻σ⁺, ρ})
/// ```
///
/// with `H = u* |g⟩⟨e| + u |e⟩⟨g|` and no internal Hamiltonian. `rho` may be
/// any Hermitian matrix (the map is linear).
pub fn density_rhs<T: Real>(
    rho: &CMat2<T>,
    u: ControlValue<T>,
    params: &SystemParams<T>,
    feedback: &FeedbackSpec<T>,
) -> Result<CMat2<T>> {
    let scale = T::one().max(rho.max_abs());
    let herm = rho.hermiticity_defect();
    if !(herm <= T::tol(1e-12) * scale) {
        return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
    }
    let uc = Complex::new(u.u1, u.u2);
    let z = Complex::new(T::zero(), T::zero());
    let h = CMat2::new(z, uc, uc.conj(), z);
    let sm = CMat2::sigma_minus();
    let sp = CMat2::sigma_plus();
    let uf = feedback.unitary();
    let minus_i = Complex::new(T::zero(), -T::one());
    let half = T::half();

    let coherent = h.commutator(rho).scale(minus_i);
    let emission = *uf * sm * *rho * sp * uf.adjoint()
        - (sp * sm).anticommutator(rho).scale_re(half);
    let absorption = sp * *rho * sm - (sm * sp).anticommutator(rho).scale_re(half);

    Ok(coherent
        + emission.scale_re(params.gamma_down())
        + absorption.scale_re(params.gamma_up()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams<f64> {
        SystemParams::new(0.6, 0.3).unwrap()
    }

    #[test]
    fn maximally_mixed_maps_to_origin() {
        let rho = DensityMatrix::new(CMat2::real_diag(0.5, 0.5)).unwrap();
        assert_eq!(rho.to_bloch(), BlochState3::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn excited_state_has_x3_minus_one() {
        let rho = DensityMatrix::new(CMat2::<f64>::real_diag(1.0, 0.0)).unwrap();
        assert_eq!(rho.to_bloch(), BlochState3::new(0.0, 0.0, -1.0));
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ground_state_pumped_upward_only() {
        let p = params();
        let rho = CMat2::real_diag(0.0, 1.0);
        let d = density_rhs(&rho, ControlValue::zero(), &p, &FeedbackSpec::identity()).unwrap();
        let expected = CMat2::real_diag(p.gamma_up(), -p.gamma_up());
        assert!((d - expected).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat2::real_diag(0.5, 0.5);
        m.m[0][1] = Complex::new(0.1, 0.0);
        let err = density_rhs(&m, ControlValue::zero(), &params(), &FeedbackSpec::identity());
        assert!(matches!(err, Err(Error::NotHermitian(_))));
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_bad_density() {
        assert!(DensityMatrix::new(CMat2::real_diag(0.7, 0.7)).is_err());
        assert!(DensityMatrix::new(CMat2::real_diag(1.2, -0.2)).is_err());
        assert!(DensityMatrix::from_bloch(&BlochState3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn trace_is_preserved() {
        let p = params();
        let fb = FeedbackSpec::from_beta(0.7);
        let x = BlochState3::new(0.2, -0.4, 0.5);
        let rho = DensityMatrix::from_bloch(&x).unwrap();
        let d = density_rhs(rho.matrix(), ControlValue::new(0.3, -0.8), &p, &fb).unwrap();
        assert!(d.trace().norm() < 1e-14);
        assert!(d.hermiticity_defect() < 1e-15);
    }
}
