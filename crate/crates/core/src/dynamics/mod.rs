//! Physical types, Bloch and density-matrix right-hand sides, and the
//! fixed-step integrator.

pub mod bloch;
pub mod cmat;
pub mod density;
pub mod integrate;
pub mod params;
pub mod state;

pub use bloch::{bloch_rhs2, bloch_rhs3, PlanarModel};
pub use cmat::CMat2;
pub use density::{bloch_components, bloch_to_matrix, density_rhs, DensityMatrix};
pub use integrate::{integrate, rk4_step, ControlSchedule, Diagnostics, Trajectory};
pub use params::{FeedbackSpec, RawFeedbackParams, SystemParams};
pub use state::{BlochState3, ControlValue, Phase, PlanarState};
