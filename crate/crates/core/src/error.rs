use std::io;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseComboError {
    #[error("combo {0:?} must have exactly four symbols")]
    Length(String),
    #[error("unknown operator symbol {0:?}")]
    Symbol(char),
    #[error("combo {0:?} is not in the {1} alphabet")]
    Alphabet(String, &'static str),
}

/// Errors raised while reading or writing translation tables.
#[derive(Debug, Error)]
pub enum TtError {
    #[error("i/o error after {written} bytes: {source}")]
    Io {
        written: u64,
        #[source]
        source: io::Error,
    },
    #[error("malformed table at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },
    #[error("table verification failed at row {row}: {reason}")]
    Verification { row: usize, reason: String },
}

/// Errors raised while parsing grid or honest artifacts.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {found:02x?}, expected {expected:?}")]
    BadMagic { expected: &'static str, found: Vec<u8> },
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("unknown mode byte {0}")]
    Mode(u8),
    #[error("truncated {section} at byte {offset}")]
    Truncated { section: &'static str, offset: u64 },
    #[error("ordinal gap at byte {offset} in block {block}: expected {expected:?}, found {found:?}")]
    OrdinalGap { offset: u64, block: u64, expected: char, found: char },
    #[error("separator mismatch at byte {offset} in block {block}: expected {expected:#04x}, found {found:#04x}")]
    Separator { offset: u64, block: u64, expected: u8, found: u8 },
    #[error("length mismatch in {section}: header implies {expected}, found {found}")]
    Length { section: &'static str, expected: u64, found: u64 },
    #[error("grid region disagrees with the final block at row {row}")]
    Grid { row: u16 },
    #[error("bad tail section at byte {offset}")]
    Tail { offset: u64 },
}

#[derive(Debug, Error)]
pub enum CodecError {
    #[error(transparent)]
    Table(#[from] TtError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("artifact mode {artifact} does not match the supplied {supplied}")]
    ModeMismatch { artifact: crate::Mode, supplied: crate::Mode },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{0} is outside the domain")]
    Domain(&'static str),
}
