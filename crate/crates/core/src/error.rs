use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no angle data")]
    NoAngleData,

    #[error("degenerate direction: points coincide")]
    DegenerateDirection,

    #[error("negative speed: {0}")]
    NegativeSpeed(f64),

    #[error("players coincident: pair distance {distance:.3} m below minimum {minimum:.3} m")]
    PlayersCoincident { distance: f64, minimum: f64 },

    #[error("team has no players: {0}")]
    TeamEmpty(&'static str),

    #[error("surface grids do not match")]
    GridMismatch,

    #[error("player not found: {0}")]
    PlayerNotFound(String),

    #[error("frame not found: {0}")]
    FrameNotFound(u64),

    #[error("reception not found within {window_s} s after frame {pass_frame}")]
    ReceptionNotFound { pass_frame: u64, window_s: f64 },

    #[error("event and tracking streams have no temporal overlap")]
    NoTemporalOverlap,

    #[error("empty frame span")]
    EmptySpan,

    #[error("no value surface for ball location ({col}, {row})")]
    NoValueSurfaceForBall { col: usize, row: usize },

    #[error("value ratio undefined: both pitch values are zero")]
    ValueRatioUndefined,

    #[error("too few frames: need at least {need}, got {got}")]
    TooFewFrames { need: usize, got: usize },

    #[error("smoothing window must be odd and >= 1, got {0}")]
    BadSmoothingWindow(usize),

    #[error("no frames in tracking input")]
    NoFrames,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Pipeline(String),

    #[error("bad surface file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
