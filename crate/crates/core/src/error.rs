use std::io;

use thiserror::Error;

/// Errors raised while reading, writing or decoding a wrapper.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing magic line: wrapper must start with \"PFS!\"")]
    MissingMagic,

    #[error("line {line}: malformed tag line {text:?}")]
    MalformedTagLine { line: usize, text: String },

    #[error("line {line}: key {key:?} given more than once")]
    DuplicateKey { line: usize, key: String },

    #[error("duplicate interior path {path:?}")]
    DuplicatePath { path: String },

    #[error(
        "entity {entity}: payload of {needed} bytes overruns the wrapper ({available} bytes left)"
    )]
    PayloadOverrun {
        entity: usize,
        needed: u64,
        available: u64,
    },

    #[error("entity {entity}: payload is not followed by a line feed")]
    PayloadFraming { entity: usize },

    #[error("{locator}: missing required key {key:?}")]
    MissingRequiredKey { locator: String, key: &'static str },

    #[error("line {line}: bad value {value:?} for {key:?}")]
    BadEnumValue {
        line: usize,
        key: String,
        value: String,
    },

    #[error("line {line}: bad value {value:?} for {key:?}: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: &'static str,
    },

    #[error("entity {entity}: illegal name: {reason}")]
    InvalidName { entity: usize, reason: String },

    #[error("entity {entity}: remote entity carries a [DATA] block")]
    UnexpectedDataBlock { entity: usize },

    #[error("line {line}: tag line after a [DATA] block")]
    TagAfterData { line: usize },

    #[error("entity {entity}: value for {key:?} cannot be written: {reason}")]
    Unrepresentable {
        entity: String,
        key: String,
        reason: &'static str,
    },

    #[error("entity {ordinal}: payload provider returned {actual} bytes, expected {expected}")]
    PayloadLengthMismatch {
        ordinal: usize,
        expected: u64,
        actual: u64,
    },

    #[error("entity {ordinal}: payload provider failed: {source}")]
    Payload {
        ordinal: usize,
        #[source]
        source: io::Error,
    },

    #[error("entity is remote; fetch it from its remotereadhost")]
    RemoteEntity,

    #[error("decode error: {0}")]
    Decode(String),

    #[error("decoded {actual} bytes, expected {expected}")]
    LengthMismatch { expected: u64, actual: u64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
