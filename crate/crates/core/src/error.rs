use thiserror::Error;

/// Errors raised anywhere in the tracking toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A field was queried where it is not (twice) differentiable, e.g. at the
    /// center of a radial field or outside a tabulated profile.
    #[error("field domain violation at t = {t}, r = ({x}, {y}): {reason}")]
    DomainViolation {
        t: f64,
        x: f64,
        y: f64,
        reason: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The gradient is (numerically) zero, so the isoline frame is undefined.
    #[error("critical point: |grad D| = {grad_norm:e}")]
    CriticalPoint { grad_norm: f64 },

    #[error("no isoline intersection within +/-{half_width:e} m")]
    NoIntersection { half_width: f64 },

    #[error("front speed |lambda| = {lambda} is not below robot speed {v}")]
    FrontTooFast { lambda: f64, v: f64 },

    #[error("turn rate {u} exceeds bound {u_bar}")]
    TurnRateExceeded { u: f64, u_bar: f64 },

    #[error("sampling grid contains no in-zone points")]
    EmptyGrid,

    /// Critical point met while scanning the operational zone.
    #[error("critical point inside the operational zone at t = {t}, r = ({x}, {y})")]
    CriticalPointInZone { t: f64, x: f64, y: f64 },

    #[error("desired level {d0} must lie strictly between 0 and the lower intensity bound {c_lo}")]
    NonsensicalLevel { d0: f64, c_lo: f64 },

    #[error("level {level} is outside the image of the profile")]
    LevelOutOfRange { level: f64 },

    #[error("declared bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
