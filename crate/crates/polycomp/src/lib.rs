//! Lossless, SMS-friendly text encodings for small geographic polygons.
//!
//! The pipeline: degree coordinates are quantized to positive integers
//! ([`transforms::quantize`]), rewritten as one of two delta forms
//! ([`transforms::to_delta_min`], [`transforms::to_delta_consec`]), and
//! serialized by a family of codecs over a compact character alphabet
//! ([`alphabet::Alphabet`]):
//!
//! * text baselines: comma-separated and fixed-width fields, in decimal or
//!   in a higher base ([`codecs::text`]),
//! * variable-length per-value encoding with quotient indicator characters
//!   ([`codecs::var`]), optionally post-processed with a repeated-substring
//!   dictionary ([`rsd`]),
//! * a single big-integer accumulator packed into the full alphabet
//!   ([`codecs::big`]), and the production scheme that picks the shorter of
//!   the two per polygon ([`codecs::poly`]),
//! * entropy baselines: static arithmetic coding, Rice/Golomb, canonical
//!   Huffman, and LZW ([`entropy`]).
//!
//! [`corpus`] parses, generates, and measures polygon corpora, [`framing`]
//! embeds payloads in message text, and [`bench`] runs the whole family over
//! a corpus and reports lengths and ratios.

#![forbid(unsafe_code)]

pub mod alphabet;
pub mod bench;
pub mod codecs;
pub mod corpus;
pub mod entropy;
pub mod error;
pub mod framing;
pub mod rsd;
pub mod transforms;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
