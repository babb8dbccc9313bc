use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass parameter m = {0} must lie in (0, 1)")]
    InvalidMass(f64),

    #[error("energy h = {h} outside the admissible range: {reason}")]
    InvalidEnergy { h: f64, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration ordering cannot be normalized to phi1 <= phi3 <= phi2")]
    BadOrdering,

    #[error("point lies outside the closed configuration triangle")]
    OutsideConfigurationSpace,

    #[error("negative radius r = {0}")]
    NegativeRadius(f64),

    #[error("shape angle |theta| = {theta} exceeds theta_star = {theta_star}")]
    ShapeOutOfRange { theta: f64, theta_star: f64 },

    #[error("singular configuration: {0}")]
    Singular(&'static str),

    #[error("radius r = {r} beyond the blow-up bound {bound}")]
    OutOfDomain { r: f64, bound: f64 },

    #[error("point outside the Hill region (gamma^2 radicand = {0})")]
    ImaginaryGamma(f64),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },

    #[error("no exit from the Wazewski set within sigma = {0}")]
    NoExit(f64),

    #[error("orbit left W through a face other than B1/B2: {0}")]
    AnomalousExit(&'static str),

    #[error("unstable branch reached nu = 0 before u = pi/2 (at u = {0})")]
    BranchCrossedNuZero(f64),

    #[error("no B2 -> B1 face change found in the r0 scan")]
    NoFaceChange,

    #[error("guard band violated: {0}")]
    GuardBand(String),

    #[error("closure error {error:e} exceeds tolerance {tol:e}")]
    ClosureFailure { error: f64, tol: f64 },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Short variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidMass(_) => "InvalidMass",
            Error::InvalidEnergy { .. } => "InvalidEnergy",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::BadOrdering => "BadOrdering",
            Error::OutsideConfigurationSpace => "OutsideConfigurationSpace",
            Error::NegativeRadius(_) => "NegativeRadius",
            Error::ShapeOutOfRange { .. } => "ShapeOutOfRange",
            Error::Singular(_) => "Singular",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::ImaginaryGamma(_) => "ImaginaryGamma",
            Error::StepFailure { .. } => "StepFailure",
            Error::NoExit(_) => "NoExit",
            Error::AnomalousExit(_) => "AnomalousExit",
            Error::BranchCrossedNuZero(_) => "BranchCrossedNuZero",
            Error::NoFaceChange => "NoFaceChange",
            Error::GuardBand(_) => "GuardBand",
            Error::ClosureFailure { .. } => "ClosureFailure",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
