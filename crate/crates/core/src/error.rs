use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("interval [{start}, {end}) out of range for a grid with {cells} cells")]
    IntervalOutOfRange {
        start: usize,
        end: usize,
        cells: usize,
    },

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("invalid parameter {name} = {value}: requires {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("non-finite value at cell {index}")]
    NonFinite { index: usize },

    #[error("weight must be strictly positive, found {value} at cell {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("grid size {cells} is not a power of two (dyadic structure required)")]
    NotPowerOfTwo { cells: usize },

    #[error("invalid dyadic interval: level {level}, index {index} on a grid with {cells} cells")]
    InvalidDyadic {
        level: u32,
        index: usize,
        cells: usize,
    },

    #[error(
        "kernel {condition} condition violated at sample x = {x}, y = {y}, z = {z}: \
         observed {observed}, declared bound {bound}"
    )]
    KernelValidation {
        condition: &'static str,
        x: f64,
        y: f64,
        z: f64,
        observed: f64,
        bound: f64,
    },

    #[error("decomposition level {lambda} lies below the root average {average}")]
    LevelTooLow { lambda: f64, average: f64 },

    #[error("unknown inequality spec id `{0}`")]
    UnknownSpec(String),

    #[error("family `{family}` does not provide the inputs required by `{spec}`")]
    ArityMismatch { family: String, spec: String },

    #[error("need at least {needed} sweep points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("csv error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
