use alloc::string::String;

/// Errors raised by the contour library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate polygon")]
    DegeneratePolygon,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid support grid: {0}")]
    InvalidGrid(String),
    #[error("infeasible thresholds")]
    InfeasibleThresholds,
    #[error("degenerate hull")]
    DegenerateHull,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {requested} h exceeds path horizon {horizon} h")]
    BeyondHorizon { requested: f64, horizon: f64 },
    #[error("insufficient paths: {got} given, at least {min} required")]
    InsufficientPaths { got: usize, min: usize },
    #[error("target beyond horizon")]
    TargetBeyondHorizon,
    #[error("trend drives scale non-positive at t = {t_hours} h")]
    NonPositiveScale { t_hours: f64 },
    #[error("no crossing")]
    NoCrossing,
    #[error("insufficient data: {got} rows, at least {min} required")]
    InsufficientData { got: usize, min: usize },
    #[error("moment ratio infeasible: {ratio}")]
    MomentRatioInfeasible { ratio: f64 },
    #[error("non-positive trend-adjusted values: {0}")]
    NonPositiveTrend(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("singular linear system")]
    Singular,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
