use std::io;

use thiserror::Error;

use crate::geom::Cell;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell ({}, {}) is outside the {width}x{length} world", cell.x, cell.z)]
    OutOfBounds { cell: Cell, width: usize, length: usize },

    #[error("illegal placement of '{building}' at ({}, {}): {reason}", anchor.x, anchor.z)]
    IllegalPlacement {
        building: String,
        anchor: Cell,
        reason: String,
    },

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("unsupported world file version {found} (expected {expected})")]
    UnsupportedVersion { found: i64, expected: i64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no legal gate cell reachable from the {edge} edge")]
    GatePlacement { edge: &'static str },

    #[error("no path from ({}, {}) to ({}, {})", from.x, from.z, to.x, to.z)]
    Unreachable { from: Cell, to: Cell },

    #[error("build area {actual_width}x{actual_length} is smaller than world {width}x{length}")]
    DimensionMismatch {
        width: usize,
        length: usize,
        actual_width: usize,
        actual_length: usize,
    },

    #[error("network error: {0}")]
    Network(String),

    #[error("stage `{stage}` failed: {cause}")]
    Stage {
        stage: &'static str,
        #[source]
        cause: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }
}
