//! 2x2 complex matrices in the ordered basis (e, g).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use super::state::Phase;
use crate::scalar::Real;

/// Row-major 2x2 complex matrix. Index 0 is the excited state `e`, index 1
/// the ground state `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> CMat2<T> {
    pub fn new(ee: Complex<T>, eg: Complex<T>, ge: Complex<T>, gg: Complex<T>) -> Self {
        Self { m: [[ee, eg], [ge, gg]] }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self::new(o, z, z, o)
    }

    pub fn real_diag(ee: T, gg: T) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(Complex::new(ee, T::zero()), z, z, Complex::new(gg, T::zero()))
    }

    /// `σ_x = |e⟩⟨g| + |g⟩⟨e|`.
    pub fn sigma_x() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, o, o, z)
    }

    /// `σ_y = -i|e⟩⟨g| + i|g⟩⟨e|`.
    pub fn sigma_y() -> Self {
        let i = Complex::new(T::zero(), T::one());
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, -i, i, z)
    }

    /// `σ_z = |e⟩⟨e| - |g⟩⟨g|`.
    pub fn sigma_z() -> Self {
        Self::real_diag(T::one(), -T::one())
    }

    /// Lowering operator `σ⁻ = |g⟩⟨e|`.
    pub fn sigma_minus() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, o, z)
    }

    /// Raising operator `σ⁺ = |e⟩⟨g|`.
    pub fn sigma_plus() -> Self {
        Self::sigma_minus().adjoint()
    }

    #[inline]
    pub fn ee(&self) -> Complex<T> {
        self.m[0][0]
    }
    #[inline]
    pub fn eg(&self) -> Complex<T> {
        self.m[0][1]
    }
    #[inline]
    pub fn ge(&self) -> Complex<T> {
        self.m[1][0]
    }
    #[inline]
    pub fn gg(&self) -> Complex<T> {
        self.m[1][1]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.ee().conj(), self.ge().conj(), self.eg().conj(), self.gg().conj())
    }

    pub fn trace(&self) -> Complex<T> {
        self.ee() + self.gg()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    /// `max |A A† - I|`.
    pub fn unitarity_defect(&self) -> T {
        (*self * self.adjoint() - Self::identity()).max_abs()
    }
}

impl<T: Real> Add for CMat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for CMat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][j] - rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Neg for CMat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-T::one())
    }
}

/// Lets density matrices be integrated directly; the norm is Frobenius.
impl<T: Real> Phase<T> for CMat2<T> {
    fn axpy(self, h: T, d: Self) -> Self {
        self + d.scale_re(h)
    }
    fn norm(self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
    }
}

impl<T: Real> Mul for CMat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
