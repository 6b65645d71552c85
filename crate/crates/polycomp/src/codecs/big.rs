//! Big-integer codec: the whole sequence folds into one arbitrary-precision
//! accumulator, rendered in the full alphabet base.
//!
//! Each delta pair is shifted by one and packed against a per-polygon radix
//! XX = d*S + 1, where S is derived from the largest delta; the head offsets
//! are folded in last against fixed factors.  The payload is the character
//! for S followed by the accumulator digits, so typical polygons cost about
//! two characters per point plus a small constant.

use crate::alphabet::{bignum_from_base, bignum_to_base, Alphabet, BigAccumulator};
use crate::codecs::{CodecKind, Encoded};
use crate::error::Error;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

/// Radix-construction parameters: the scale divisor for S and the head
/// folding factors.  Heads must stay below their factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigParams {
    pub d: u64,
    pub x_factor: u64,
    pub y_factor: u64,
}

impl BigParams {
    /// Defaults per transform: consecutive differences spread wider than
    /// min offsets, so they take a coarser scale divisor.
    pub fn default_for(kind: TransformKind) -> Self {
        let d = match kind {
            TransformKind::DeltaMin => 6,
            TransformKind::DeltaConsec => 9,
        };
        BigParams {
            d,
            x_factor: 3500,
            y_factor: 10000,
        }
    }
}

/// Scale index for a sequence: floor(max_delta / d) + 1, always >= 1.
pub fn scale_for(ds: &DeltaSeq, p: &BigParams) -> u64 {
    ds.max_delta() as u64 / p.d + 1
}

/// Folds deltas then heads into the accumulator.  Every shifted component
/// is strictly below XX = d*s + 1, which is what lets decoding terminate.
fn accumulate(
    deltas: &[(u32, u32)],
    head_x: u64,
    head_y: u64,
    p: &BigParams,
    s: u64,
) -> BigAccumulator {
    let xx = p.d * s + 1;
    let mut acc = BigAccumulator::zero();
    for &(dx, dy) in deltas {
        acc.mul_add(xx * xx, (dx as u64 + 1) * xx + (dy as u64 + 1));
    }
    acc.mul_add(p.x_factor, head_x);
    acc.mul_add(p.y_factor, head_y);
    acc
}

pub fn encode_big(ds: &DeltaSeq, p: &BigParams, a: &Alphabet) -> Result<Encoded> {
    let s = scale_for(ds, p);
    if s as usize >= a.len() {
        return Err(Error::SOverflow {
            s,
            size: a.len(),
        });
    }
    for (head, factor) in [(ds.head_x() as u64, p.x_factor), (ds.head_y() as u64, p.y_factor)] {
        if head >= factor {
            return Err(Error::HeadOverflow {
                value: head,
                factor,
            });
        }
    }
    let acc = accumulate(ds.deltas(), ds.head_x() as u64, ds.head_y() as u64, p, s);
    let mut payload = a.char_at(s as usize).to_string();
    payload.push_str(&bignum_to_base(&acc, a.len(), a)?);
    Ok(Encoded {
        codec: CodecKind::Big,
        transform: ds.kind(),
        payload,
    })
}

pub fn decode_big(
    payload: &str,
    kind: TransformKind,
    p: &BigParams,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
    let mut chars = payload.chars();
    let s_char = chars
        .next()
        .ok_or_else(|| Error::MalformedPayload("empty payload".into()))?;
    let s = a
        .index_of(s_char)
        .ok_or(Error::UnknownCharacter { ch: s_char, pos: 0 })? as u64;
    if s == 0 {
        return Err(Error::MalformedPayload("scale index is zero".into()));
    }
    let mut acc = bignum_from_base(chars.as_str(), a.len(), a)?;
    let head_y = acc.divmod(p.y_factor);
    let head_x = acc.divmod(p.x_factor);
    let xx = p.d * s + 1;
    let mut deltas = Vec::new();
    while !acc.is_zero() {
        let pair = acc.divmod(xx * xx);
        let dy = pair % xx;
        let dx = pair / xx;
        if dx == 0 || dy == 0 {
            return Err(Error::MalformedPayload(
                "delta pair component below its shift".into(),
            ));
        }
        deltas.push((dx as u32 - 1, dy as u32 - 1));
    }
    deltas.reverse();
    DeltaSeq::new(kind, head_x as u32, head_y as u32, deltas, origin)
}
