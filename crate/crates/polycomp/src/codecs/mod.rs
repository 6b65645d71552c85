//! Codec family: identifiers, the encoded-payload wrapper, and dispatch.

pub mod big;
pub mod poly;
pub mod text;
pub mod var;

use crate::alphabet::Alphabet;
use crate::entropy::ae::{ae_decode, ae_encode};
use crate::entropy::golomb::{golomb_decode_seq, golomb_encode_seq};
use crate::entropy::huffman::{huffman_decode_seq, huffman_encode_seq, HuffmanCode};
use crate::entropy::lzw::{lzw_decode_seq, lzw_encode_seq};
use crate::entropy::model::SymbolModel;
use crate::error::Error;
use crate::rsd::RsdDictionary;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

/// Every codec in the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecKind {
    /// Decimal values joined with commas.
    Comma,
    /// Fixed-width decimal fields.
    Fixed,
    /// Alphabet-base values joined with commas.
    CommaB,
    /// Fixed-width alphabet-base fields.
    FixedB,
    /// Variable-length values with quotient indicators.
    Var,
    /// [`CodecKind::Var`] over a reduced base, post-processed with a
    /// repeated-substring dictionary.
    VarRsd,
    /// Single big-integer accumulator.
    Big,
    /// Shorter of [`CodecKind::Big`] and [`CodecKind::VarRsd`] per polygon.
    Poly,
    /// Static arithmetic coding of fixed-field digits.
    Ae,
    /// Rice (power-of-two Golomb) coding of the value sequence.
    Golomb,
    /// Canonical Huffman coding of the value sequence.
    Huffman,
    /// LZW over the comma payload.
    Lzw,
}

impl CodecKind {
    pub const ALL: [CodecKind; 12] = [
        CodecKind::Comma,
        CodecKind::Fixed,
        CodecKind::CommaB,
        CodecKind::FixedB,
        CodecKind::Var,
        CodecKind::VarRsd,
        CodecKind::Big,
        CodecKind::Poly,
        CodecKind::Ae,
        CodecKind::Golomb,
        CodecKind::Huffman,
        CodecKind::Lzw,
    ];

    pub fn cli_token(self) -> &'static str {
        match self {
            CodecKind::Comma => "comma",
            CodecKind::Fixed => "fixed",
            CodecKind::CommaB => "comma70",
            CodecKind::FixedB => "fixed70",
            CodecKind::Var => "var",
            CodecKind::VarRsd => "var-rsd",
            CodecKind::Big => "big",
            CodecKind::Poly => "poly",
            CodecKind::Ae => "ae",
            CodecKind::Golomb => "golomb",
            CodecKind::Huffman => "huffman",
            CodecKind::Lzw => "lzw",
        }
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        CodecKind::ALL
            .into_iter()
            .find(|c| c.cli_token() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown codec '{s}'")))
    }

    /// Whether the codec accepts sequences of this transform.
    pub fn supports(self, kind: TransformKind) -> bool {
        match self {
            CodecKind::Poly => kind == TransformKind::DeltaConsec,
            _ => true,
        }
    }
}

/// A compressed polygon: payload characters plus the codec and transform
/// needed to decode them.  Payloads never contain the frame sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub codec: CodecKind,
    pub transform: TransformKind,
    pub payload: String,
}

/// Everything decode and encode dispatch may need: the alphabet, the agreed
/// origin, and the per-transform dictionaries and models for the codecs that
/// use them.
#[derive(Clone, Copy)]
pub struct CodecContext<'a> {
    pub alphabet: &'a Alphabet,
    pub origin: Origin,
    pub dict_min: Option<&'a RsdDictionary>,
    pub dict_consec: Option<&'a RsdDictionary>,
    pub digit_model_min: Option<&'a SymbolModel<char>>,
    pub digit_model_consec: Option<&'a SymbolModel<char>>,
    pub huffman_min: Option<&'a HuffmanCode>,
    pub huffman_consec: Option<&'a HuffmanCode>,
    /// Fixed Rice parameter; per-polygon optimal when absent.
    pub golomb_m: Option<u64>,
}

impl<'a> CodecContext<'a> {
    /// A context with no dictionaries or models attached.
    pub fn bare(alphabet: &'a Alphabet, origin: Origin) -> Self {
        CodecContext {
            alphabet,
            origin,
            dict_min: None,
            dict_consec: None,
            digit_model_min: None,
            digit_model_consec: None,
            huffman_min: None,
            huffman_consec: None,
            golomb_m: None,
        }
    }

    fn dict(&self, kind: TransformKind, codec: CodecKind) -> Result<&'a RsdDictionary> {
        match kind {
            TransformKind::DeltaMin => self.dict_min,
            TransformKind::DeltaConsec => self.dict_consec,
        }
        .ok_or_else(|| missing(codec, kind, "dictionary"))
    }

    fn digit_model(&self, kind: TransformKind) -> Result<&'a SymbolModel<char>> {
        match kind {
            TransformKind::DeltaMin => self.digit_model_min,
            TransformKind::DeltaConsec => self.digit_model_consec,
        }
        .ok_or_else(|| missing(CodecKind::Ae, kind, "digit model"))
    }

    fn huffman(&self, kind: TransformKind) -> Result<&'a HuffmanCode> {
        match kind {
            TransformKind::DeltaMin => self.huffman_min,
            TransformKind::DeltaConsec => self.huffman_consec,
        }
        .ok_or_else(|| missing(CodecKind::Huffman, kind, "value model"))
    }

    /// Encodes a delta sequence with any codec in the family.
    pub fn encode_with(&self, codec: CodecKind, ds: &DeltaSeq) -> Result<Encoded> {
        if !codec.supports(ds.kind()) {
            return Err(Error::WrongTransform {
                expected: TransformKind::DeltaConsec.token(),
                got: ds.kind().token(),
            });
        }
        match codec {
            CodecKind::Comma => text::encode_comma(ds),
            CodecKind::Fixed => text::encode_fixed(ds),
            CodecKind::CommaB => text::encode_comma_b(ds, self.alphabet),
            CodecKind::FixedB => text::encode_fixed_b(ds, self.alphabet),
            CodecKind::Var => var::encode_var(ds, self.alphabet),
            CodecKind::VarRsd => {
                var::encode_var_rsd(ds, self.dict(ds.kind(), codec)?, self.alphabet)
            }
            CodecKind::Big => big::encode_big(
                ds,
                &big::BigParams::default_for(ds.kind()),
                self.alphabet,
            ),
            CodecKind::Poly => poly::encode_poly(
                ds,
                self.dict(ds.kind(), codec)?,
                &big::BigParams::default_for(ds.kind()),
                self.alphabet,
            ),
            CodecKind::Ae => {
                let fixed = text::encode_fixed(ds)?;
                ae_encode(
                    &fixed.payload,
                    ds.kind(),
                    self.digit_model(ds.kind())?,
                    self.alphabet,
                )
            }
            CodecKind::Golomb => golomb_encode_seq(ds, self.golomb_m, self.alphabet),
            CodecKind::Huffman => huffman_encode_seq(ds, self.huffman(ds.kind())?, self.alphabet),
            CodecKind::Lzw => {
                let comma = text::encode_comma(ds)?;
                lzw_encode_seq(&comma.payload, ds.kind(), self.alphabet)
            }
        }
    }

    /// Decodes a payload produced by [`CodecContext::encode_with`] with the
    /// same codec, transform, and context.
    pub fn decode_with(
        &self,
        codec: CodecKind,
        kind: TransformKind,
        payload: &str,
    ) -> Result<DeltaSeq> {
        if !codec.supports(kind) {
            return Err(Error::WrongTransform {
                expected: TransformKind::DeltaConsec.token(),
                got: kind.token(),
            });
        }
        match codec {
            CodecKind::Comma => text::decode_comma(payload, kind, self.origin),
            CodecKind::Fixed => text::decode_fixed(payload, kind, self.origin),
            CodecKind::CommaB => text::decode_comma_b(payload, kind, self.alphabet, self.origin),
            CodecKind::FixedB => text::decode_fixed_b(payload, kind, self.alphabet, self.origin),
            CodecKind::Var => var::decode_var(payload, kind, self.alphabet, self.origin),
            CodecKind::VarRsd => var::decode_var_rsd(
                payload,
                kind,
                self.dict(kind, codec)?,
                self.alphabet,
                self.origin,
            ),
            CodecKind::Big => big::decode_big(
                payload,
                kind,
                &big::BigParams::default_for(kind),
                self.alphabet,
                self.origin,
            ),
            CodecKind::Poly => poly::decode_poly(
                payload,
                self.dict(kind, codec)?,
                &big::BigParams::default_for(kind),
                self.alphabet,
                self.origin,
            ),
            CodecKind::Ae => {
                let fixed = ae_decode(payload, kind, self.digit_model(kind)?, self.alphabet)?;
                text::decode_fixed(&fixed, kind, self.origin)
            }
            CodecKind::Golomb => golomb_decode_seq(payload, kind, self.alphabet, self.origin),
            CodecKind::Huffman => {
                huffman_decode_seq(payload, kind, self.huffman(kind)?, self.alphabet, self.origin)
            }
            CodecKind::Lzw => {
                let comma = lzw_decode_seq(payload, self.alphabet)?;
                text::decode_comma(&comma, kind, self.origin)
            }
        }
    }
}

fn missing(codec: CodecKind, kind: TransformKind, what: &str) -> Error {
    Error::InvalidParams(format!(
        "codec {} needs a {} for the {} transform",
        codec.cli_token(),
        what,
        kind.token()
    ))
}
