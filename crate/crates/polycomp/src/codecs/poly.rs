//! Per-polygon codec choice: the big-integer payload or the dictionary
//! variable-length payload, whichever lands shorter on the wire.
//!
//! Only consecutive-difference sequences qualify.  A chosen big payload is
//! emitted verbatim; its first character encodes a scale of at least 1, so
//! the alphabet's zero character is free to prefix variable-length payloads.
//! The big branch therefore costs nothing extra and wins ties as well as
//! one-character losses.  When one branch cannot encode the sequence at all,
//! the other is used regardless of length.

use crate::alphabet::Alphabet;
use crate::codecs::big::{decode_big, encode_big, BigParams};
use crate::codecs::var::{check_dict, decode_var_rsd, encode_var_rsd, VarProfile};
use crate::codecs::{CodecKind, Encoded};
use crate::error::Error;
use crate::rsd::RsdDictionary;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

const KIND: TransformKind = TransformKind::DeltaConsec;

fn check_kind(kind: TransformKind) -> Result<()> {
    if kind != KIND {
        return Err(Error::WrongTransform {
            expected: KIND.token(),
            got: kind.token(),
        });
    }
    Ok(())
}

pub fn encode_poly(
    ds: &DeltaSeq,
    dict: &RsdDictionary,
    p: &BigParams,
    a: &Alphabet,
) -> Result<Encoded> {
    check_kind(ds.kind())?;
    check_dict(dict, KIND, VarProfile::for_transform(KIND, true))?;
    let big = encode_big(ds, p, a);
    let var = encode_var_rsd(ds, dict, a);
    let payload = match (big, var) {
        (Ok(b), Ok(v)) => {
            if b.payload.chars().count() <= v.payload.chars().count() + 1 {
                b.payload
            } else {
                prefixed(&v.payload, a)
            }
        }
        (Ok(b), Err(_)) => b.payload,
        (Err(_), Ok(v)) => prefixed(&v.payload, a),
        (Err(e), Err(_)) => return Err(e),
    };
    Ok(Encoded {
        codec: CodecKind::Poly,
        transform: KIND,
        payload,
    })
}

fn prefixed(var_payload: &str, a: &Alphabet) -> String {
    let mut out = a.char_at(0).to_string();
    out.push_str(var_payload);
    out
}

pub fn decode_poly(
    payload: &str,
    dict: &RsdDictionary,
    p: &BigParams,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
    check_dict(dict, KIND, VarProfile::for_transform(KIND, true))?;
    let mut chars = payload.chars();
    match chars.next() {
        None => Err(Error::MalformedPayload("empty payload".into())),
        Some(c) if c == a.char_at(0) => decode_var_rsd(chars.as_str(), KIND, dict, a, origin),
        Some(_) => decode_big(payload, KIND, p, a, origin),
    }
}
