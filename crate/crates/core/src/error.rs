use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Population reached the outermost momentum rungs; the ladder must be widened.
    #[error(
        "ladder overflow: edge-rung population {edge_population:.3e} exceeds {threshold:.1e} \
         (half-width {half_width}{})",
        velocity.map(|v| format!(", atom velocity {v:.6} m/s")).unwrap_or_default()
    )]
    LadderOverflow {
        edge_population: f64,
        threshold: f64,
        half_width: usize,
        velocity: Option<f64>,
    },

    #[error("invalid timing: {0}")]
    InvalidTiming(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("no peak exceeds the prominence threshold {0:.3e}")]
    NoPeaks(f64),
}

impl Error {
    /// Attach the velocity of the sample that triggered a ladder overflow.
    pub fn with_velocity(self, v: f64) -> Self {
        match self {
            Error::LadderOverflow {
                edge_population,
                threshold,
                half_width,
                ..
            } => Error::LadderOverflow {
                edge_population,
                threshold,
                half_width,
                velocity: Some(v),
            },
            other => other,
        }
    }
}
