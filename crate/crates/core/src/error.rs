use thiserror::Error;

/// Errors raised by the simulator. Each variant names the module that
/// detected the failure so front-ends can report it without extra context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("units: invalid material: {0}")]
    InvalidMaterial(String),

    #[error("units: cannot convert {from} to {to}")]
    Unit { from: String, to: String },

    #[error("units: unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("spectrum: insufficient resolution: {0}")]
    Resolution(String),

    #[error("spectrum: only {found} bound levels below the barrier, {requested} requested")]
    SpectrumTruncated { requested: usize, found: usize },

    #[error("{module}: {what} out of range")]
    Range { module: &'static str, what: String },

    #[error("device: invalid geometry: {0}")]
    Geometry(String),

    #[error("device: site {site} is not laterally confined (negative curvature)")]
    UnconfinedSite { site: usize },

    #[error("dynamics: step size underflow at t = {t} ns")]
    Stiffness { t: f64 },

    #[error("dynamics: inconsistent rates on site {site}: 1/T2 must be at least 1/(2 T1)")]
    RateConsistency { site: usize },

    #[error("dynamics: sweep span too short: {0}")]
    Span(String),

    #[error("dynamics: invalid state: {0}")]
    State(String),

    #[error("control: scheduling conflict: {0}")]
    Scheduling(String),

    #[error("control: {0}")]
    Circuit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(module: &'static str, what: impl Into<String>) -> Self {
        Error::Range {
            module,
            what: what.into(),
        }
    }
}
