use thiserror::Error;

/// Errors raised by the dynamics and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feedback operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("planar model requires f1 = 0, got f1 = {0:e}")]
    NotPlanar(f64),

    #[error("invalid time span: {0}")]
    InvalidTimeSpan(String),

    #[error("step size {0:e} below the 1e-12 floor")]
    StepUnderflow(f64),

    #[error("stationary state undefined: x3 denominator {0:e} is degenerate")]
    DegenerateStationary(f64),

    #[error("singular control undefined: grad(delta_B).G = {0:e}")]
    SingularControlUndefined(f64),

    #[error("linear part is singular: A2*B3 - A3*B2 = {0:e}")]
    SingularLinearPart(f64),

    #[error("repeated eigenvalue (|alpha2 - alpha3| = {0:e}); perturb the parameters")]
    RepeatedEigenvalue(f64),

    #[error("closed-form evaluation left an imaginary residue of {0:e}")]
    ImaginaryResidue(f64),

    #[error("rotation angle undefined: |v| = {0:e} at sample {1}")]
    AngleUndefined(f64, usize),

    #[error("adjoint vector must be nonzero (|p| = {0:e})")]
    TrivialAdjoint(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
