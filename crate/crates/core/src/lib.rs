//! Grading, index and moduli bookkeeping for Morse–Bott cascades in the
//! symplectic cohomology of divisor complements.

pub mod cascade;
pub mod fredholm;
pub mod grading;
pub mod linalg;
pub mod morse;
pub mod orientation;
pub mod pearl;
pub mod profile;
pub mod scalar;
pub mod setup;
pub mod snf;
pub mod spectrum;

pub use num_rational::BigRational;

/// Exact rational used by every bookkeeping formula.
pub type Rational = BigRational;

/// Any error raised by the library, tagged with its module.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("setup: {0}")]
    Setup(#[from] setup::SetupError),
    #[error("profile: {0}")]
    Profile(#[from] profile::ProfileError),
    #[error("spectrum: {0}")]
    Spectrum(#[from] spectrum::SpectrumError),
    #[error("fredholm: {0}")]
    Fredholm(#[from] fredholm::FredholmError),
    #[error("grading: {0}")]
    Grading(#[from] grading::GradingError),
    #[error("pearl: {0}")]
    Pearl(#[from] pearl::PearlError),
    #[error("cascade: {0}")]
    Cascade(#[from] cascade::CascadeError),
    #[error("orientation: {0}")]
    Orientation(#[from] orientation::OrientationError),
    #[error("morse: {0}")]
    Morse(#[from] morse::MorseError),
}
