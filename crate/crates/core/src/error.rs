use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid data length {len} does not match {width}x{height}")]
    DataLength { width: usize, height: usize, len: usize },

    #[error("extent mismatch: {left:?} vs {right:?}")]
    ExtentMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("window {x0},{y0} {w}x{h} lies outside a {width}x{height} grid")]
    InvalidWindow {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node {id} at ({x}, {y}) lies outside the {width}x{height} raster")]
    NodeOutOfRange {
        id: i64,
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("unknown node id {0}")]
    UnknownNode(i64),

    #[error("prediction holds a non-finite value at pixel ({x}, {y})")]
    NonFinite { x: usize, y: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
