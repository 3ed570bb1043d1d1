use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its valid range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("transverse coordinate v = {v} exceeds half-width {half_width}")]
    OutsideStrip { v: f64, half_width: f64 },

    #[error("degenerate tangent frame: |e_u x e_v| = {area:e}")]
    DegenerateFrame { area: f64 },

    #[error("mesh of {requested} vertices exceeds the cap of {cap}")]
    MeshTooLarge { requested: usize, cap: usize },

    #[error("non-finite value while evaluating {context}")]
    NonFinite { context: &'static str },

    #[error("frame is not orthonormal (residual {residual:e})")]
    FrameNotOrthonormal { residual: f64 },

    #[error("q0dot must be nonzero")]
    ZeroLapse,

    #[error("initial state violates constraint {constraint} (residual {residual:e})")]
    OffShell {
        constraint: &'static str,
        residual: f64,
    },

    #[error("constraint drift {drift:e} at step {step} exceeds 1e-6; reduce dtau")]
    StepTooLarge { step: usize, drift: f64 },

    #[error("requested {requested} levels but at most {max} are available")]
    TooManyLevels { requested: usize, max: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
