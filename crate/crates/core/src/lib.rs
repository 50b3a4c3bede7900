//! Dissipative two-level system under Lindblad dynamics with Markovian
//! jump feedback.
//!
//! - [`dynamics`]: parameters, Bloch and density-matrix right-hand sides,
//!   fixed-step RK4 integration.
//! - [`stationary`]: closed-form stationary states with and without
//!   feedback.
//! - [`locus`]: the determinants `Δ_A`, `Δ_B` and their zero sets.
//! - [`switching`]: costate flow, switching function, singular control,
//!   velocity rotation angle and bang-bang simulation.
//! - [`propagator`]: exact constant-control solution of the planar system.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

// `!(a > b)` is used on purpose: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod locus;
pub mod propagator;
pub mod scalar;
pub mod stationary;
pub mod switching;

pub use dynamics::{
    bloch_components, bloch_rhs2, bloch_rhs3, bloch_to_matrix, density_rhs, integrate, rk4_step, BlochState3, CMat2,
    ControlSchedule, ControlValue, DensityMatrix, Diagnostics, FeedbackSpec, Phase, PlanarModel, PlanarState,
    RawFeedbackParams, SystemParams, Trajectory,
};
pub use error::{Error, Result};
pub use locus::{locus_extract, GridSpec, Locus, LocusGrid, LocusPoint};
pub use propagator::{AffineCoeffs, AnalyticPropagator};
pub use scalar::{wrap_angle, Real};
pub use stationary::{
    no_feedback_x3_bound, reachable_sweep, relaxation_horizon, stationary_no_feedback, stationary_with_feedback,
    StationaryResult, Sweep,
};
pub use switching::{
    bang_bang_simulate, candidate_mismatch, compare_k_readings, follow_extremal, phi_theta_consistency, sgn_theta, simulate_arc,
    simulate_arc_with_adjoint, singular_arc, switching_phi, theta_of, AdjointState, AngleBranch, ArcControl, ArcState, BangArc,
    BangBangRun, Extremal, Interval, KCoefficients, KReading, KReadingReport, SingularArc, StateCostate, VelocityVector,
};

pub type SystemParams64 = SystemParams<f64>;
pub type FeedbackSpec64 = FeedbackSpec<f64>;
pub type RawFeedbackParams64 = RawFeedbackParams<f64>;
pub type PlanarModel64 = PlanarModel<f64>;
pub type PlanarState64 = PlanarState<f64>;
pub type BlochState64 = BlochState3<f64>;
pub type ControlValue64 = ControlValue<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type AnalyticPropagator64 = AnalyticPropagator<f64>;
pub type StationaryResult64 = StationaryResult<f64>;
pub type BangArc64 = BangArc<f64>;

pub type PlanarModel32 = PlanarModel<f32>;
pub type PlanarState32 = PlanarState<f32>;
