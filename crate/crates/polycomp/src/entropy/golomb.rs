//! Rice coding (Golomb with power-of-two parameter) of head and delta
//! values.
//!
//! Each value becomes a unary quotient (ones, closed by a zero) and
//! log2(M) remainder bits.  The wire is the point count, the parameter
//! exponent, then the packed bits, so the decoder knows how many values to
//! read and the encoder may pick the cheapest parameter per polygon.

use crate::alphabet::Alphabet;
use crate::codecs::text::seq_from_values;
use crate::codecs::{CodecKind, Encoded};
use crate::entropy::bits::{BitReader, BitString};
use crate::error::Error;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

/// Largest parameter the one-character exponent field is scanned up to.
pub const MAX_LOG_M: u32 = 10;

pub fn rice_encode(v: u64, log_m: u32, bits: &mut BitString) {
    let q = v >> log_m;
    for _ in 0..q {
        bits.push(true);
    }
    bits.push(false);
    bits.push_uint(v, log_m as usize);
}

pub fn rice_decode(reader: &mut BitReader<'_>, log_m: u32) -> Option<u64> {
    let mut q: u64 = 0;
    while reader.read()? {
        q += 1;
    }
    let r = reader.read_uint(log_m as usize)?;
    Some((q << log_m) | r)
}

fn rice_cost(v: u64, log_m: u32) -> u64 {
    (v >> log_m) + 1 + log_m as u64
}

/// The exponent in 0..=[`MAX_LOG_M`] minimizing total bits, smallest on
/// ties.
pub fn select_rice_parameter(values: &[u64]) -> u32 {
    (0..=MAX_LOG_M)
        .min_by_key(|&log_m| {
            (
                values.iter().map(|&v| rice_cost(v, log_m)).sum::<u64>(),
                log_m,
            )
        })
        .unwrap_or(0)
}

pub fn golomb_encode_seq(ds: &DeltaSeq, m: Option<u64>, a: &Alphabet) -> Result<Encoded> {
    let values: Vec<u64> = ds.flat_values().into_iter().map(u64::from).collect();
    let log_m = match m {
        Some(m) => {
            if !m.is_power_of_two() || m.trailing_zeros() > MAX_LOG_M {
                return Err(Error::InvalidParams(format!(
                    "Rice parameter {m} is not a power of two up to {}",
                    1u64 << MAX_LOG_M
                )));
            }
            m.trailing_zeros()
        }
        None => select_rice_parameter(&values),
    };
    let n = ds.n_points();
    if n >= a.len() {
        return Err(Error::ValueOutOfRange(n as u64));
    }
    let mut bits = BitString::new();
    for v in values {
        rice_encode(v, log_m, &mut bits);
    }
    let mut payload = a.char_at(n).to_string();
    payload.push(a.char_at(log_m as usize));
    payload.push_str(&bits.to_chars(a));
    Ok(Encoded {
        codec: CodecKind::Golomb,
        transform: ds.kind(),
        payload,
    })
}

pub fn golomb_decode_seq(
    payload: &str,
    kind: TransformKind,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
    let mut chars = payload.chars();
    let mut field = |what: &str, pos: usize| {
        let ch = chars
            .next()
            .ok_or_else(|| Error::MalformedPayload(format!("missing {what}")))?;
        a.index_of(ch).ok_or(Error::UnknownCharacter { ch, pos })
    };
    let n = field("point count", 0)?;
    let log_m = field("parameter exponent", 1)? as u32;
    if log_m > MAX_LOG_M {
        return Err(Error::MalformedPayload(format!(
            "parameter exponent {log_m} exceeds {MAX_LOG_M}"
        )));
    }
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    let count = 2 + 2 * kind.pairs_for_points(n);
    let bits = BitString::from_chars(chars.as_str(), a)?;
    let mut reader = BitReader::new(&bits);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let v = rice_decode(&mut reader, log_m).ok_or_else(|| {
            Error::MalformedPayload("bit stream ends inside a value".into())
        })?;
        u32::try_from(v).map_err(|_| Error::ValueOutOfRange(v))?;
        values.push(v as u32);
    }
    seq_from_values(&values, kind, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> &'static Alphabet {
        Alphabet::canonical()
    }

    fn bit_string(bits: &BitString) -> String {
        (0..bits.len())
            .map(|i| if bits.get(i).unwrap() { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn unary_plus_remainder_goldens() {
        let mut bits = BitString::new();
        rice_encode(9, 2, &mut bits);
        assert_eq!(bit_string(&bits), "11001");
        let mut bits = BitString::new();
        rice_encode(0, 2, &mut bits);
        assert_eq!(bit_string(&bits), "000");
        let mut bits = BitString::new();
        rice_encode(7, 0, &mut bits);
        assert_eq!(bit_string(&bits), "11111110");
        let mut reader = BitReader::new(&bits);
        assert_eq!(rice_decode(&mut reader, 0), Some(7));
    }

    #[test]
    fn parameter_selection_minimizes_bits() {
        // All zeros: M = 1 costs 1 bit each, anything larger adds remainder
        // bits for nothing.
        assert_eq!(select_rice_parameter(&[0, 0, 0, 0]), 0);
        // Large uniform values push the parameter up to the cap.
        assert_eq!(select_rice_parameter(&[100_000]), 10);
        let values = [5, 9, 13, 2, 30];
        let chosen = select_rice_parameter(&values);
        let cost = |log_m: u32| values.iter().map(|&v| rice_cost(v, log_m)).sum::<u64>();
        for other in 0..=MAX_LOG_M {
            assert!(cost(chosen) <= cost(other));
            if cost(other) == cost(chosen) {
                assert!(chosen <= other);
            }
        }
    }

    #[test]
    fn sequence_round_trip_and_fixed_parameter() {
        let ds = DeltaSeq::new(
            TransformKind::DeltaMin,
            1530,
            3684,
            vec![(0, 56), (21, 71), (50, 15), (28, 0)],
            Origin::default(),
        )
        .unwrap();
        let enc = golomb_encode_seq(&ds, None, a()).unwrap();
        assert_eq!(enc.payload.chars().next(), Some('5'));
        let back = golomb_decode_seq(&enc.payload, ds.kind(), a(), Origin::default()).unwrap();
        assert_eq!(back, ds);
        let fixed = golomb_encode_seq(&ds, Some(64), a()).unwrap();
        assert_eq!(fixed.payload.chars().nth(1), Some('6'));
        let back = golomb_decode_seq(&fixed.payload, ds.kind(), a(), Origin::default()).unwrap();
        assert_eq!(back, ds);
        assert!(matches!(
            golomb_encode_seq(&ds, Some(48), a()),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            golomb_encode_seq(&ds, Some(2048), a()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn decode_rejects_malformed() {
        let kind = TransformKind::DeltaMin;
        let o = Origin::default();
        assert!(matches!(
            golomb_decode_seq("", kind, a(), o),
            Err(Error::MalformedPayload(_))
        ));
        assert!(matches!(
            golomb_decode_seq("5", kind, a(), o),
            Err(Error::MalformedPayload(_))
        ));
        // Exponent beyond the scan cap.
        assert!(matches!(
            golomb_decode_seq("5B00", kind, a(), o),
            Err(Error::MalformedPayload(_))
        ));
        // Bit stream exhausted mid-value: all-ones never closes a quotient.
        assert!(matches!(
            golomb_decode_seq("50$$$", kind, a(), o),
            Err(Error::MalformedPayload(_))
        ));
        // Point counts below a closed ring.
        assert!(golomb_decode_seq("30000000", kind, a(), o).is_err());
    }

    proptest! {
        #[test]
        fn value_round_trip(v in 0u64..100_000, log_m in 0u32..=MAX_LOG_M) {
            let mut bits = BitString::new();
            rice_encode(v, log_m, &mut bits);
            prop_assert_eq!(bits.len() as u64, rice_cost(v, log_m));
            let mut reader = BitReader::new(&bits);
            prop_assert_eq!(rice_decode(&mut reader, log_m), Some(v));
            prop_assert_eq!(reader.remaining(), 0);
        }

        #[test]
        fn sequence_round_trip(
            hx in 0u32..3500,
            hy in 0u32..10000,
            deltas in proptest::collection::vec((0u32..1000, 0u32..1000), 2..=22),
            fixed_m in proptest::option::of(0u32..=MAX_LOG_M),
        ) {
            let ds = DeltaSeq::new(
                TransformKind::DeltaConsec,
                hx,
                hy,
                deltas,
                Origin::default(),
            )
            .unwrap();
            let m = fixed_m.map(|e| 1u64 << e);
            let enc = golomb_encode_seq(&ds, m, a()).unwrap();
            let back =
                golomb_decode_seq(&enc.payload, TransformKind::DeltaConsec, a(), Origin::default())
                    .unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
