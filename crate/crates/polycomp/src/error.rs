//! Crate-wide error type.

use thiserror::Error;

/// Every failure the library can report.
///
/// All variants carry enough context to print a one-line diagnostic; none
/// wrap `io::Error`, so values are `PartialEq` and comparable in tests.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polygon ring is not closed (first point must equal last)")]
    OpenRing,
    #[error("polygon has {0} points, need at least 4 including the closing point")]
    TooFewPoints(usize),
    #[error("coordinate ({lat}, {lon}) outside supported range (0 < lat < 90, -180 < lon < 0)")]
    CoordinateOutOfRange { lat: f64, lon: f64 },
    #[error("coordinate quantizes to non-positive integer {0}")]
    NonPositiveCoordinate(i64),
    #[error("origin ({origin_x}, {origin_y}) exceeds polygon minimum ({min_x}, {min_y})")]
    OriginTooLarge {
        origin_x: u32,
        origin_y: u32,
        min_x: u32,
        min_y: u32,
    },
    #[error("value {value} does not fit a {width}-digit field in base {base}")]
    FieldOverflow {
        value: u64,
        width: usize,
        base: usize,
    },
    #[error("head value {value} is not below its factor {factor}")]
    HeadOverflow { value: u64, factor: u64 },
    #[error("scale value {s} does not fit one character of a {size}-character alphabet")]
    SOverflow { s: u64, size: usize },
    #[error("value {0} is outside the encodable range")]
    ValueOutOfRange(u64),
    #[error("unknown character '{ch}' at position {pos}")]
    UnknownCharacter { ch: char, pos: usize },
    #[error("unknown dictionary code '{0}'")]
    UnknownCode(char),
    #[error("unknown sentinel '#{0}'")]
    UnknownSentinel(char),
    #[error("unterminated frame (missing closing '#')")]
    UnterminatedFrame,
    #[error("symbol '{0}' not present in model")]
    SymbolNotInModel(String),
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("codec requires the {expected} transform, got {got}")]
    WrongTransform {
        expected: &'static str,
        got: &'static str,
    },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
