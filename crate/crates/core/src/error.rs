use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge length must be finite and positive, got {0}")]
    NonPositiveLength(f64),

    #[error("unknown edge id {0}")]
    UnknownEdge(usize),

    #[error("vertex degree must be at least 1")]
    ZeroDegree,

    #[error("resonance at k = {k}: internal bond system is singular (condition number {condition:.3e})")]
    Resonance { k: f64, condition: f64 },

    #[error("wavenumber must be finite and positive, got {0}")]
    InvalidWavenumber(f64),

    #[error("scattering amplitudes are not unitary: residual {0:.3e}")]
    NotUnitary(f64),

    #[error("expected a 2x2 symmetric S-matrix: {0}")]
    NotTwoChannel(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("unsupported graph file version {0}")]
    UnsupportedVersion(u64),

    #[error("graph file: {0}")]
    Parse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
