//! The collinearity determinants `Δ_A = Det(F, G)` and
//! `Δ_B = Det(G, [F, G])` of the planar model, and extraction of their zero
//! sets `C_A`, `C_B` on a grid.

use rayon::prelude::*;

use crate::dynamics::{PlanarModel, PlanarState};
use crate::error::{Error, Result};
use crate::scalar::Real;

impl<T: Real> PlanarModel<T> {
    /// `Δ_A(x) = -2(γ+Γg)x3² - 2(γ-Γg)x3 - (γ+Γ)x2² - 2Γf2 x2x3 + 2Γf2 x2`.
    pub fn delta_a(&self, x: &PlanarState<T>) -> T {
        let two = T::two();
        let (x2, x3) = (x.x2, x.x3);
        let gf = self.feedback_drive();
        -two * self.population_rate() * x3 * x3 - two * self.population_offset() * x3
            - self.params().total() * x2 * x2
            - two * gf * x2 * x3
            + two * gf * x2
    }

    /// `Δ_B(x) = 4(γ-Γg)x2 + 4(γ-Γ+2Γg)x2x3 + 4Γf2 x2² - 4Γf2 x3² + 4Γf2 x3`.
    pub fn delta_b(&self, x: &PlanarState<T>) -> T {
        let four = T::lit(4.0);
        let (x2, x3) = (x.x2, x.x3);
        let gf = self.feedback_drive();
        four * self.population_offset() * x2 + four * self.mixed_rate() * x2 * x3 + four * gf * x2 * x2
            - four * gf * x3 * x3
            + four * gf * x3
    }

    /// Analytic gradient `(∂Δ_B/∂x2, ∂Δ_B/∂x3)`.
    pub fn delta_b_gradient(&self, x: &PlanarState<T>) -> PlanarState<T> {
        let four = T::lit(4.0);
        let eight = T::lit(8.0);
        let gf = self.feedback_drive();
        PlanarState::new(
            four * self.population_offset() + four * self.mixed_rate() * x.x3 + eight * gf * x.x2,
            four * self.mixed_rate() * x.x2 - eight * gf * x.x3 + four * gf,
        )
    }

    /// `γ - Γ + 2Γg`.
    #[inline]
    pub(crate) fn mixed_rate(&self) -> T {
        let p = self.params();
        p.gamma_up() - p.gamma_down() + T::two() * p.gamma_down() * self.g()
    }

    pub fn delta(&self, which: Locus, x: &PlanarState<T>) -> T {
        match which {
            Locus::A => self.delta_a(x),
            Locus::B => self.delta_b(x),
        }
    }
}

/// Which determinant / zero set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locus {
    /// `C_A = Δ_A⁻¹(0)`.
    A,
    /// `C_B = Δ_B⁻¹(0)`.
    B,
}

impl Locus {
    pub fn label(&self) -> &'static str {
        match self {
            Locus::A => "A",
            Locus::B => "B",
        }
    }
}

/// Rectangular grid of `n2 × n3` nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub x2_range: (T, T),
    pub x3_range: (T, T),
    pub n2: usize,
    pub n3: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(x2_range: (T, T), x3_range: (T, T), n2: usize, n3: usize) -> Result<Self> {
        let lim = T::lit(1.2);
        for (lo, hi) in [x2_range, x3_range] {
            if !(lo < hi && lo >= -lim && hi <= lim) {
                return Err(Error::InvalidParameter(format!(
                    "grid range ({lo}, {hi}) must be increasing and within [-1.2, 1.2]"
                )));
            }
        }
        if n2 < 2 || n3 < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 nodes per axis".into()));
        }
        Ok(Self { x2_range, x3_range, n2, n3 })
    }

    pub fn square(lo: T, hi: T, n: usize) -> Result<Self> {
        Self::new((lo, hi), (lo, hi), n, n)
    }

    pub fn x2_at(&self, i: usize) -> T {
        node(self.x2_range, self.n2, i)
    }

    pub fn x3_at(&self, j: usize) -> T {
        node(self.x3_range, self.n3, j)
    }
}

fn node<T: Real>((lo, hi): (T, T), n: usize, i: usize) -> T {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()
    }
}

/// `Δ` values on a grid, stored row-major with `x3` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct LocusGrid<T> {
    pub which: Locus,
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Real> LocusGrid<T> {
    pub fn evaluate(which: Locus, spec: GridSpec<T>, model: &PlanarModel<T>) -> Self {
        let values = (0..spec.n3)
            .into_par_iter()
            .flat_map_iter(|j| {
                let x3 = spec.x3_at(j);
                (0..spec.n2).map(move |i| model.delta(which, &PlanarState::new(spec.x2_at(i), x3)))
            })
            .collect();
        Self { which, spec, values }
    }

    #[inline]
    pub fn at(&self, i2: usize, i3: usize) -> T {
        self.values[i3 * self.spec.n2 + i2]
    }
}

/// A refined zero of `Δ_A` or `Δ_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusPoint<T> {
    pub set: Locus,
    pub x2: T,
    pub x3: T,
    pub value: T,
}

/// Zero crossings of `Δ_which` along grid edges, each refined by bisection
/// to machine precision (so `|Δ| < 1e-10`). Grid nodes where `Δ` is exactly
/// zero are reported as they are.
pub fn locus_extract<T: Real>(which: Locus, spec: GridSpec<T>, model: &PlanarModel<T>) -> Result<Vec<LocusPoint<T>>> {
    if spec.n2 < 16 || spec.n3 < 16 {
        return Err(Error::InvalidParameter("locus extraction needs at least 16 nodes per axis".into()));
    }
    let grid = LocusGrid::evaluate(which, spec, model);
    let rows: Vec<Vec<LocusPoint<T>>> = (0..spec.n3)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::new();
            let x3 = spec.x3_at(j);
            for i in 0..spec.n2 {
                let x2 = spec.x2_at(i);
                let v = grid.at(i, j);
                if v == T::zero() {
                    out.push(LocusPoint { set: which, x2, x3, value: v });
                    continue;
                }
                if i + 1 < spec.n2 {
                    let w = grid.at(i + 1, j);
                    if v * w < T::zero() {
                        let x2r = bisect(|s| model.delta(which, &PlanarState::new(s, x3)), x2, spec.x2_at(i + 1), v);
                        let p = PlanarState::new(x2r, x3);
                        out.push(LocusPoint { set: which, x2: x2r, x3, value: model.delta(which, &p) });
                    }
                }
                if j + 1 < spec.n3 {
                    let w = grid.at(i, j + 1);
                    if v * w < T::zero() {
                        let x3r = bisect(|s| model.delta(which, &PlanarState::new(x2, s)), x3, spec.x3_at(j + 1), v);
                        let p = PlanarState::new(x2, x3r);
                        out.push(LocusPoint { set: which, x2, x3: x3r, value: model.delta(which, &p) });
                    }
                }
            }
            out
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Bisection of a sign change on `[lo, hi]`, `f(lo) = f_lo`.
pub(crate) fn bisect<T: Real, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, mut f_lo: T) -> T {
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    if f(hi).abs() < f_lo.abs() {
        hi
    } else {
        lo
    }
}
