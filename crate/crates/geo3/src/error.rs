//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("point {coords:?} outside domain of chart `{chart}`: {reason}")]
    OutsideDomain {
        chart: String,
        coords: Vec<f64>,
        reason: String,
    },

    #[error("chart mismatch: expected `{expected}`, found `{found}`")]
    ChartMismatch { expected: String, found: String },

    #[error("frame not orthonormal at {coords:?}: max deviation {dev:.3e}")]
    NotOrthonormal { coords: Vec<f64>, dev: f64 },

    #[error(
        "metric not positive definite at {coords:?}: pivot {pivot:.3e} below floor {floor:.3e}"
    )]
    DegenerateMetric {
        coords: Vec<f64>,
        pivot: f64,
        floor: f64,
    },

    #[error("differential rank-deficient at {coords:?}: {detail}")]
    RankDeficient { coords: Vec<f64>, detail: String },

    #[error(
        "frame is not natural for the submersion at {coords:?}: bracket residual {residual:.3e}"
    )]
    FrameNotNatural { coords: Vec<f64>, residual: f64 },

    #[error("not a Riemannian submersion at {coords:?}: {detail} (defect {defect:.3e})")]
    NotRiemannianSubmersion {
        coords: Vec<f64>,
        detail: String,
        defect: f64,
    },

    #[error("harmonicity inconclusive: max |kappa| = {max_kappa:.3e} lies between tolerance {tol:.3e} and the non-harmonic threshold {threshold:.3e}")]
    Inconclusive {
        max_kappa: f64,
        tol: f64,
        threshold: f64,
    },

    #[error("harmonicity tolerance {tol:.3e} is below the measurement resolution {resolution:.3e}; a harmonic certificate at that precision cannot be granted")]
    UnattainableTolerance { tol: f64, resolution: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown catalog id `{0}`")]
    UnknownId(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeoError>;

impl GeoError {
    /// Usage errors are the caller's fault (bad ids, bad config, bad paths)
    /// and map to CLI exit code 2; everything else is a checked failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            GeoError::UnknownId(_)
                | GeoError::InvalidConfig(_)
                | GeoError::InvalidParameter(_)
                | GeoError::Unsupported(_)
                | GeoError::Io(_)
        )
    }
}
