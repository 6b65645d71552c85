//! Text baseline codecs: comma-separated and fixed-width fields, in decimal
//! or in the alphabet's base.
//!
//! Fixed-width field layout (digits per field): head x 4, head y 5, deltas 3
//! each in decimal; head x 2, head y 3, deltas 2 each in the alphabet base.
//! A fixed payload for an n-point polygon is therefore 6n+3 decimal digits
//! in the minimum-offset form and 6n-3 in the consecutive form, and 4n+1 or
//! 4n-3 base characters.

use crate::alphabet::{base_to_int, int_to_base, int_to_base_padded, Alphabet};
use crate::codecs::{CodecKind, Encoded};
use crate::error::Error;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

const FIXED_HEAD_X: usize = 4;
const FIXED_HEAD_Y: usize = 5;
const FIXED_DELTA: usize = 3;
const FIXED_B_HEAD_X: usize = 2;
const FIXED_B_HEAD_Y: usize = 3;
const FIXED_B_DELTA: usize = 2;

/// Decimal values joined with commas: headX,headY,dx1,dy1,...
pub fn encode_comma(ds: &DeltaSeq) -> Result<Encoded> {
    let payload = ds
        .flat_values()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok(Encoded {
        codec: CodecKind::Comma,
        transform: ds.kind(),
        payload,
    })
}

pub fn decode_comma(payload: &str, kind: TransformKind, origin: Origin) -> Result<DeltaSeq> {
    let mut values = Vec::new();
    for (i, tok) in payload.split(',').enumerate() {
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::MalformedPayload(format!(
                "field {i} is not an unsigned decimal integer"
            )));
        }
        let v: u32 = tok
            .parse()
            .map_err(|_| Error::MalformedPayload(format!("field {i} overflows")))?;
        values.push(v);
    }
    seq_from_values(&values, kind, origin)
}

/// Fixed-width decimal fields, zero-padded.
pub fn encode_fixed(ds: &DeltaSeq) -> Result<Encoded> {
    let mut payload = String::new();
    push_decimal(&mut payload, ds.head_x(), FIXED_HEAD_X)?;
    push_decimal(&mut payload, ds.head_y(), FIXED_HEAD_Y)?;
    for &(dx, dy) in ds.deltas() {
        push_decimal(&mut payload, dx, FIXED_DELTA)?;
        push_decimal(&mut payload, dy, FIXED_DELTA)?;
    }
    Ok(Encoded {
        codec: CodecKind::Fixed,
        transform: ds.kind(),
        payload,
    })
}

pub fn decode_fixed(payload: &str, kind: TransformKind, origin: Origin) -> Result<DeltaSeq> {
    if let Some(pos) = payload.bytes().position(|b| !b.is_ascii_digit()) {
        return Err(Error::UnknownCharacter {
            ch: payload[pos..].chars().next().expect("position in bounds"),
            pos,
        });
    }
    let head = FIXED_HEAD_X + FIXED_HEAD_Y;
    let n = payload.len();
    if n < head || (n - head) % (2 * FIXED_DELTA) != 0 {
        return Err(Error::MalformedPayload(format!(
            "fixed payload length {n} does not split into 4+5 head digits plus 3-digit deltas"
        )));
    }
    let mut values = vec![
        payload[..FIXED_HEAD_X].parse::<u32>().expect("digits"),
        payload[FIXED_HEAD_X..head].parse::<u32>().expect("digits"),
    ];
    let mut rest = &payload[head..];
    while !rest.is_empty() {
        values.push(rest[..FIXED_DELTA].parse::<u32>().expect("digits"));
        rest = &rest[FIXED_DELTA..];
    }
    seq_from_values(&values, kind, origin)
}

/// Alphabet-base values joined with commas.
pub fn encode_comma_b(ds: &DeltaSeq, a: &Alphabet) -> Result<Encoded> {
    let base = a.len();
    let payload = ds
        .flat_values()
        .iter()
        .map(|&v| int_to_base(v as u64, base, a))
        .collect::<Result<Vec<_>>>()?
        .join(",");
    Ok(Encoded {
        codec: CodecKind::CommaB,
        transform: ds.kind(),
        payload,
    })
}

pub fn decode_comma_b(
    payload: &str,
    kind: TransformKind,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
    let base = a.len();
    let mut values = Vec::new();
    for (i, tok) in payload.split(',').enumerate() {
        if tok.is_empty() {
            return Err(Error::MalformedPayload(format!("field {i} is empty")));
        }
        let v = base_to_int(tok, base, a)?;
        let v = u32::try_from(v).map_err(|_| Error::ValueOutOfRange(v))?;
        values.push(v);
    }
    seq_from_values(&values, kind, origin)
}

/// Fixed-width alphabet-base fields, zero-padded.
pub fn encode_fixed_b(ds: &DeltaSeq, a: &Alphabet) -> Result<Encoded> {
    let base = a.len();
    let mut payload = String::new();
    payload.push_str(&int_to_base_padded(
        ds.head_x() as u64,
        base,
        FIXED_B_HEAD_X,
        a,
    )?);
    payload.push_str(&int_to_base_padded(
        ds.head_y() as u64,
        base,
        FIXED_B_HEAD_Y,
        a,
    )?);
    for &(dx, dy) in ds.deltas() {
        payload.push_str(&int_to_base_padded(dx as u64, base, FIXED_B_DELTA, a)?);
        payload.push_str(&int_to_base_padded(dy as u64, base, FIXED_B_DELTA, a)?);
    }
    Ok(Encoded {
        codec: CodecKind::FixedB,
        transform: ds.kind(),
        payload,
    })
}

pub fn decode_fixed_b(
    payload: &str,
    kind: TransformKind,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
    let base = a.len();
    let chars: Vec<char> = payload.chars().collect();
    let head = FIXED_B_HEAD_X + FIXED_B_HEAD_Y;
    let n = chars.len();
    if n < head || (n - head) % (2 * FIXED_B_DELTA) != 0 {
        return Err(Error::MalformedPayload(format!(
            "fixed base payload length {n} does not split into 2+3 head digits plus 2-digit deltas"
        )));
    }
    let field = |range: std::ops::Range<usize>| -> Result<u32> {
        let s: String = chars[range].iter().collect();
        let v = base_to_int(&s, base, a)?;
        u32::try_from(v).map_err(|_| Error::ValueOutOfRange(v))
    };
    let mut values = vec![field(0..FIXED_B_HEAD_X)?, field(FIXED_B_HEAD_X..head)?];
    let mut at = head;
    while at < n {
        values.push(field(at..at + FIXED_B_DELTA)?);
        at += FIXED_B_DELTA;
    }
    seq_from_values(&values, kind, origin)
}

fn push_decimal(out: &mut String, v: u32, width: usize) -> Result<()> {
    let s = v.to_string();
    if s.len() > width {
        return Err(Error::FieldOverflow {
            value: v as u64,
            width,
            base: 10,
        });
    }
    for _ in s.len()..width {
        out.push('0');
    }
    out.push_str(&s);
    Ok(())
}

/// Reassembles a flat value list (headX, headY, interleaved deltas) into a
/// sequence, validating shape.
pub(crate) fn seq_from_values(
    values: &[u32],
    kind: TransformKind,
    origin: Origin,
) -> Result<DeltaSeq> {
    if values.len() < 2 || (values.len() - 2) % 2 != 0 {
        return Err(Error::MalformedPayload(format!(
            "{} values do not form a head plus delta pairs",
            values.len()
        )));
    }
    let deltas = values[2..].chunks(2).map(|c| (c[0], c[1])).collect();
    DeltaSeq::new(kind, values[0], values[1], deltas, origin)
}
