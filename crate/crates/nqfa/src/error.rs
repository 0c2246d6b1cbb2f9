use thiserror::Error;

/// Errors raised while building or checking objects.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Input(String),
    /// A named axiom failed; carries the residual norm.
    #[error("axiom `{axiom}` fails with residual {residual:.3e}")]
    Axiom { axiom: String, residual: f64 },
    /// A named axiom failed at a specific pair of basis elements.
    #[error("axiom `{axiom}` fails with residual {residual:.3e} at {witness}")]
    AxiomAt { axiom: String, residual: f64, witness: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn axiom(axiom: impl Into<String>, residual: f64) -> Self {
        Error::Axiom { axiom: axiom.into(), residual }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
