use core::fmt;

/// Errors raised by the model, fitting, integration and evaluation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Velocity norm below the model threshold; the tangent is undefined.
    ZeroVelocity,
    /// `1 + κ·d_lat` vanishes: the wheel sits on the instantaneous center of rotation.
    WheelAtRotationCenter,
    /// Not enough samples to fit a cubic spline.
    TooFewSamples { needed: usize, got: usize },
    /// Timestamps are not strictly increasing; `index` is the first offending sample.
    NonMonotoneTime { index: usize },
    /// A value that must be finite is NaN or infinite.
    NonFinite { what: &'static str },
    /// Evaluation time outside the closed trajectory domain.
    OutOfDomain { t: f64, start: f64, end: f64 },
    /// Evaluation time inside a stop interval whose tangent cannot be filled.
    UnresolvableInterval { start: f64, end: f64 },
    /// Steering wheel angle maps outside (−π/2, π/2) or outside the declared steering range.
    SteeringOutOfRange { delta_swa: f64 },
    /// Integration step must be strictly positive.
    NonPositiveStep,
    /// Least-squares design matrix is rank deficient.
    DegenerateDesign,
    /// Fitted or configured steering polynomial is not strictly increasing on its range.
    NonMonotoneSteering,
    /// Value outside the image of the steering polynomial's declared range.
    OutOfRange { value: f64, min: f64, max: f64 },
    /// The reference channel is identically zero; the slope is undefined.
    /// Mean and standard deviation of the error are still reported.
    ZeroReferenceEnergy { mu: f64, sigma: f64 },
    /// Generic invalid argument.
    InvalidParameter(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroVelocity => write!(f, "velocity vanishes, tangent undefined"),
            Error::WheelAtRotationCenter => {
                write!(f, "wheel located at the instantaneous center of rotation")
            }
            Error::TooFewSamples { needed, got } => {
                write!(f, "too few samples: need at least {needed}, got {got}")
            }
            Error::NonMonotoneTime { index } => {
                write!(f, "timestamps not strictly increasing at sample {index}")
            }
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::OutOfDomain { t, start, end } => {
                write!(f, "time {t} outside trajectory domain [{start}, {end}]")
            }
            Error::UnresolvableInterval { start, end } => write!(
                f,
                "tangent undefined in stop interval [{start}, {end}] (direction changes at rest)"
            ),
            Error::SteeringOutOfRange { delta_swa } => {
                write!(
                    f,
                    "steering wheel angle {delta_swa} deg outside the steering range"
                )
            }
            Error::NonPositiveStep => write!(f, "integration step must be positive"),
            Error::DegenerateDesign => write!(f, "least-squares design is rank deficient"),
            Error::NonMonotoneSteering => {
                write!(
                    f,
                    "steering polynomial is not strictly increasing on its range"
                )
            }
            Error::OutOfRange { value, min, max } => {
                write!(f, "value {value} outside [{min}, {max}]")
            }
            Error::ZeroReferenceEnergy { mu, sigma } => write!(
                f,
                "reference channel has zero energy, slope undefined (mu = {mu}, sigma = {sigma})"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
