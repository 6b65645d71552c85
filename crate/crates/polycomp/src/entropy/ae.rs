//! Static arithmetic coding of fixed-field digit payloads.
//!
//! A 31-bit integer range coder with underflow tracking; the digit model is
//! agreed out of band.  The wire is the point count as one character plus
//! the packed code bits, since the digit count is a fixed function of the
//! point count per transform.

use crate::alphabet::Alphabet;
use crate::codecs::{CodecKind, Encoded};
use crate::entropy::bits::{BitReader, BitString};
use crate::entropy::model::SymbolModel;
use crate::error::Error;
use crate::transforms::TransformKind;
use crate::Result;

const TOP: u64 = (1 << 31) - 1;
const HALF: u64 = 1 << 30;
const Q1: u64 = 1 << 29;
const Q3: u64 = 3 << 29;

fn emit(bits: &mut BitString, bit: bool, pending: &mut usize) {
    bits.push(bit);
    for _ in 0..*pending {
        bits.push(!bit);
    }
    *pending = 0;
}

/// Codes one interval sequence; each item is (cum_lo, cum_hi, total).
fn encode_stream<I>(intervals: I) -> BitString
where
    I: IntoIterator<Item = (u64, u64, u64)>,
{
    let mut bits = BitString::new();
    let mut low: u64 = 0;
    let mut high: u64 = TOP;
    let mut pending = 0usize;
    for (c_lo, c_hi, total) in intervals {
        let range = high - low + 1;
        high = low + range * c_hi / total - 1;
        low += range * c_lo / total;
        loop {
            if high < HALF {
                emit(&mut bits, false, &mut pending);
            } else if low >= HALF {
                emit(&mut bits, true, &mut pending);
                low -= HALF;
                high -= HALF;
            } else if low >= Q1 && high < Q3 {
                pending += 1;
                low -= Q1;
                high -= Q1;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
        }
    }
    // Two final bits pin the interval; pending bits flush with the first.
    pending += 1;
    emit(&mut bits, low >= Q1, &mut pending);
    bits
}

fn decode_stream(bits: &BitString, count: usize, model: &SymbolModel<char>) -> String {
    let mut reader = BitReader::new(bits);
    let mut next = move || reader.read().unwrap_or(false) as u64;
    let mut value = 0u64;
    for _ in 0..31 {
        value = (value << 1) | next();
    }
    let mut low: u64 = 0;
    let mut high: u64 = TOP;
    let total = model.total();
    let mut out = String::with_capacity(count);
    for _ in 0..count {
        let range = high - low + 1;
        let scaled = ((value - low + 1) * total - 1) / range;
        let (sym, c_lo, c_hi) = model.locate(scaled);
        out.push(*sym);
        high = low + range * c_hi / total - 1;
        low += range * c_lo / total;
        loop {
            if high < HALF {
                // Nothing to subtract.
            } else if low >= HALF {
                low -= HALF;
                high -= HALF;
                value -= HALF;
            } else if low >= Q1 && high < Q3 {
                low -= Q1;
                high -= Q1;
                value -= Q1;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | next();
            debug_assert!(low <= value && value <= high);
        }
    }
    out
}

/// Digit count of a fixed-field payload for an n-point polygon.
pub fn digit_count(kind: TransformKind, n_points: usize) -> usize {
    match kind {
        TransformKind::DeltaMin => 6 * n_points + 3,
        TransformKind::DeltaConsec => 6 * n_points - 3,
    }
}

fn points_from_digits(kind: TransformKind, digits: usize) -> Result<usize> {
    let n = match kind {
        TransformKind::DeltaMin if digits % 6 == 3 && digits >= 27 => (digits - 3) / 6,
        TransformKind::DeltaConsec if digits % 6 == 3 && digits >= 21 => (digits + 3) / 6,
        _ => {
            return Err(Error::MalformedPayload(format!(
                "{digits} digits do not form whole {} fields",
                kind.token()
            )))
        }
    };
    Ok(n)
}

/// Encodes a fixed-field digit payload.
pub fn ae_encode(
    fixed_payload: &str,
    kind: TransformKind,
    model: &SymbolModel<char>,
    a: &Alphabet,
) -> Result<Encoded> {
    let digits: Vec<char> = fixed_payload.chars().collect();
    let n = points_from_digits(kind, digits.len())?;
    if n >= a.len() {
        return Err(Error::ValueOutOfRange(n as u64));
    }
    let total = model.total();
    let intervals = digits
        .iter()
        .map(|d| {
            let (lo, hi) = model
                .range_of(d)
                .ok_or_else(|| Error::SymbolNotInModel(d.to_string()))?;
            Ok((lo, hi, total))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut payload = a.char_at(n).to_string();
    payload.push_str(&encode_stream(intervals).to_chars(a));
    Ok(Encoded {
        codec: CodecKind::Ae,
        transform: kind,
        payload,
    })
}

/// Decodes back to the fixed-field digit payload.
pub fn ae_decode(
    payload: &str,
    kind: TransformKind,
    model: &SymbolModel<char>,
    a: &Alphabet,
) -> Result<String> {
    let mut chars = payload.chars();
    let n_char = chars
        .next()
        .ok_or_else(|| Error::MalformedPayload("empty payload".into()))?;
    let n = a
        .index_of(n_char)
        .ok_or(Error::UnknownCharacter { ch: n_char, pos: 0 })?;
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    let count = digit_count(kind, n);
    let bits = BitString::from_chars(chars.as_str(), a)?;
    Ok(decode_stream(&bits, count, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::model::build_digit_model;
    use proptest::prelude::*;

    fn a() -> &'static Alphabet {
        Alphabet::canonical()
    }

    const FIXED_MIN: &str = "153003684000056021071050015028000";
    const FIXED_CONSEC: &str = "153003740042030058111043029";

    #[test]
    fn round_trip_worked_payloads() {
        let model = build_digit_model([FIXED_MIN, FIXED_CONSEC]).unwrap();
        for (payload, kind, n) in [
            (FIXED_MIN, TransformKind::DeltaMin, 5),
            (FIXED_CONSEC, TransformKind::DeltaConsec, 5),
        ] {
            let enc = ae_encode(payload, kind, &model, a()).unwrap();
            assert_eq!(enc.payload.chars().next(), Some(a().char_at(n)));
            let back = ae_decode(&enc.payload, kind, &model, a()).unwrap();
            assert_eq!(back, payload);
        }
    }

    #[test]
    fn code_length_tracks_information_content() {
        let model = build_digit_model([FIXED_MIN]).unwrap();
        let info: f64 = FIXED_MIN
            .chars()
            .map(|d| -model.probability_of(&d).unwrap().log2())
            .sum();
        let intervals: Vec<_> = FIXED_MIN
            .chars()
            .map(|d| {
                let (lo, hi) = model.range_of(&d).unwrap();
                (lo, hi, model.total())
            })
            .collect();
        let bits = encode_stream(intervals);
        assert!(
            (bits.len() as f64) <= info + 4.0,
            "{} bits for {:.2} bits of information",
            bits.len(),
            info
        );
    }

    #[test]
    fn skewed_model_still_codes_rare_digits() {
        // Heavy zeros with every other digit at the smoothing floor.
        let model = build_digit_model(["000000000000000000000000"]).unwrap();
        let payload = "000000000000000000000000987";
        let enc = ae_encode(payload, TransformKind::DeltaConsec, &model, a()).unwrap();
        assert_eq!(
            ae_decode(&enc.payload, TransformKind::DeltaConsec, &model, a()).unwrap(),
            payload
        );
    }

    #[test]
    fn rejects_bad_lengths_and_symbols() {
        let model = build_digit_model([FIXED_MIN]).unwrap();
        assert!(matches!(
            ae_encode("1234", TransformKind::DeltaMin, &model, a()),
            Err(Error::MalformedPayload(_))
        ));
        // 21 digits is a consecutive-difference length, not a min-offset one.
        assert!(matches!(
            ae_encode(&"0".repeat(21), TransformKind::DeltaMin, &model, a()),
            Err(Error::MalformedPayload(_))
        ));
        let mut bad = FIXED_MIN.to_string();
        bad.replace_range(0..1, "x");
        assert_eq!(
            ae_encode(&bad, TransformKind::DeltaMin, &model, a()),
            Err(Error::SymbolNotInModel("x".into()))
        );
        assert!(matches!(
            ae_decode("", TransformKind::DeltaMin, &model, a()),
            Err(Error::MalformedPayload(_))
        ));
        assert_eq!(
            ae_decode("#00", TransformKind::DeltaMin, &model, a()),
            Err(Error::UnknownCharacter { ch: '#', pos: 0 })
        );
    }

    proptest! {
        #[test]
        fn round_trip_random_digit_payloads(
            body in proptest::collection::vec(0u8..10, 0..18),
            kind_min in any::<bool>(),
        ) {
            let kind = if kind_min {
                TransformKind::DeltaMin
            } else {
                TransformKind::DeltaConsec
            };
            // Pad to a valid fixed-field length for the transform.
            let n = 4 + body.len() / 3;
            let len = digit_count(kind, n);
            let payload: String = body
                .iter()
                .map(|&d| char::from(b'0' + d))
                .cycle()
                .chain(std::iter::repeat('7'))
                .take(len)
                .collect();
            let model = build_digit_model([payload.as_str()]).unwrap();
            let enc = ae_encode(&payload, kind, &model, a()).unwrap();
            prop_assert_eq!(ae_decode(&enc.payload, kind, &model, a()).unwrap(), payload);
        }
    }
}
