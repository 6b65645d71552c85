//! LZW over comma payloads, with an 11-symbol initial table (the ten digits
//! plus the separator).
//!
//! Code widths grow with the table: the j-th code on the wire is exactly
//! wide enough for the table as it stood when that code was emitted, a pure
//! function of j, so the stream needs no width escapes.  The wire carries
//! the code count in two characters, then the packed codes; an explicit
//! count keeps padding bits from aliasing one more code.

use std::collections::HashMap;

use crate::alphabet::Alphabet;
use crate::codecs::{CodecKind, Encoded};
use crate::entropy::bits::{BitReader, BitString};
use crate::error::Error;
use crate::transforms::TransformKind;
use crate::Result;

const SYMBOLS: &str = "0123456789,";
const TABLE_START: usize = 11;

fn symbol_id(ch: char) -> Result<u8> {
    SYMBOLS
        .chars()
        .position(|s| s == ch)
        .map(|i| i as u8)
        .ok_or_else(|| Error::SymbolNotInModel(ch.to_string()))
}

/// Width of the j-th (1-based) code: the encoder table holds 10 + j entries
/// when that code goes out.
fn width_for(j: usize) -> usize {
    let max_entries = TABLE_START + j - 1;
    (usize::BITS - (max_entries - 1).leading_zeros()) as usize
}

pub fn lzw_encode_seq(comma_payload: &str, kind: TransformKind, a: &Alphabet) -> Result<Encoded> {
    let ids = comma_payload
        .chars()
        .map(symbol_id)
        .collect::<Result<Vec<u8>>>()?;
    let mut table: HashMap<Vec<u8>, usize> = (0..TABLE_START).map(|i| (vec![i as u8], i)).collect();
    let mut codes: Vec<usize> = Vec::new();
    let mut w: Vec<u8> = Vec::new();
    for &c in &ids {
        let mut wc = w.clone();
        wc.push(c);
        if table.contains_key(&wc) {
            w = wc;
        } else {
            codes.push(table[&w]);
            table.insert(wc, TABLE_START + codes.len() - 1);
            w = vec![c];
        }
    }
    if !w.is_empty() {
        codes.push(table[&w]);
    }
    if codes.len() >= a.len() * a.len() {
        return Err(Error::ValueOutOfRange(codes.len() as u64));
    }
    let mut bits = BitString::new();
    for (i, &code) in codes.iter().enumerate() {
        bits.push_uint(code as u64, width_for(i + 1));
    }
    let mut payload = String::new();
    payload.push(a.char_at(codes.len() / a.len()));
    payload.push(a.char_at(codes.len() % a.len()));
    payload.push_str(&bits.to_chars(a));
    Ok(Encoded {
        codec: CodecKind::Lzw,
        transform: kind,
        payload,
    })
}

pub fn lzw_decode_seq(payload: &str, a: &Alphabet) -> Result<String> {
    let mut chars = payload.chars();
    let mut field = |what: &str, pos: usize| {
        let ch = chars
            .next()
            .ok_or_else(|| Error::MalformedPayload(format!("missing {what}")))?;
        a.index_of(ch).ok_or(Error::UnknownCharacter { ch, pos })
    };
    let count = field("code count", 0)? * a.len() + field("code count", 1)?;
    let bits = BitString::from_chars(chars.as_str(), a)?;
    let mut reader = BitReader::new(&bits);
    let mut table: Vec<Vec<u8>> = (0..TABLE_START).map(|i| vec![i as u8]).collect();
    let mut out: Vec<u8> = Vec::new();
    let mut w: Vec<u8> = Vec::new();
    for j in 1..=count {
        let code = reader.read_uint(width_for(j)).ok_or_else(|| {
            Error::MalformedPayload("bit stream ends inside a code".into())
        })? as usize;
        let entry = if code < table.len() {
            table[code].clone()
        } else if code == table.len() && !w.is_empty() {
            // The code the encoder defined one step ago: w plus its own
            // first symbol.
            let mut e = w.clone();
            e.push(w[0]);
            e
        } else {
            return Err(Error::MalformedPayload(format!(
                "code {code} beyond table of {}",
                table.len()
            )));
        };
        if !w.is_empty() {
            let mut grown = w;
            grown.push(entry[0]);
            table.push(grown);
        }
        out.extend_from_slice(&entry);
        w = entry;
    }
    Ok(out
        .into_iter()
        .map(|i| SYMBOLS.as_bytes()[i as usize] as char)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> &'static Alphabet {
        Alphabet::canonical()
    }

    #[test]
    fn width_schedule() {
        // Table sizes 11..16 need 4 bits, 17 onward needs 5.
        assert_eq!(width_for(1), 4);
        assert_eq!(width_for(6), 4);
        assert_eq!(width_for(7), 5);
        assert_eq!(width_for(22), 5);
        assert_eq!(width_for(23), 6);
    }

    #[test]
    fn tiny_golden() {
        let enc = lzw_encode_seq("0,0", TransformKind::DeltaMin, a()).unwrap();
        // Codes 0, 10, 0 at 4 bits each, count 3.
        assert_eq!(enc.payload, "032W");
        assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), "0,0");
    }

    #[test]
    fn repeated_symbol_defines_codes_on_the_fly() {
        let enc = lzw_encode_seq("0000", TransformKind::DeltaMin, a()).unwrap();
        assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), "0000");
        let enc = lzw_encode_seq("00000000000", TransformKind::DeltaMin, a()).unwrap();
        assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), "00000000000");
    }

    #[test]
    fn worked_payload_round_trip() {
        let payload = "1530,3684,0,56,21,71,50,15,28,0";
        let enc = lzw_encode_seq(payload, TransformKind::DeltaMin, a()).unwrap();
        assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), payload);
    }

    #[test]
    fn empty_payload() {
        let enc = lzw_encode_seq("", TransformKind::DeltaMin, a()).unwrap();
        assert_eq!(enc.payload, "00");
        assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), "");
    }

    #[test]
    fn rejects_unknown_symbols_and_codes() {
        assert_eq!(
            lzw_encode_seq("12x", TransformKind::DeltaMin, a()),
            Err(Error::SymbolNotInModel("x".into()))
        );
        assert!(matches!(
            lzw_decode_seq("0", a()),
            Err(Error::MalformedPayload(_))
        ));
        // One code promised, no bits behind it.
        assert!(matches!(
            lzw_decode_seq("01", a()),
            Err(Error::MalformedPayload(_))
        ));
        // First code can only be a single-symbol entry: 1100 reads as 12.
        assert!(matches!(
            lzw_decode_seq("01o", a()),
            Err(Error::MalformedPayload(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_random_symbol_strings(raw in "[0-9,]{0,120}") {
            let enc = lzw_encode_seq(&raw, TransformKind::DeltaConsec, a()).unwrap();
            prop_assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), raw);
        }

        #[test]
        fn round_trip_repetitive_strings(
            unit in "[0-9]{1,4}",
            reps in 1usize..40,
        ) {
            let raw = std::iter::repeat(unit.as_str())
                .take(reps)
                .collect::<Vec<_>>()
                .join(",");
            let enc = lzw_encode_seq(&raw, TransformKind::DeltaConsec, a()).unwrap();
            prop_assert_eq!(lzw_decode_seq(&enc.payload, a()).unwrap(), raw);
        }
    }
}
