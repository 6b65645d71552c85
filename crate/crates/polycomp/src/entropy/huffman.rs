//! Canonical Huffman coding of head and delta values, with an escape symbol
//! carrying unseen values as raw bits.
//!
//! The tree build is fully deterministic: leaves enter the heap in symbol
//! order and ties break toward the earliest-created node, then codes are
//! reassigned canonically by (length, symbol).  Encoder and decoder built
//! from the same counts therefore agree without shipping the tree.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::alphabet::Alphabet;
use crate::codecs::text::seq_from_values;
use crate::codecs::{CodecKind, Encoded};
use crate::entropy::bits::{BitReader, BitString};
use crate::error::Error;
use crate::transforms::{DeltaSeq, Origin, TransformKind};
use crate::Result;

/// Raw bit width of an escaped value.
pub const ESCAPE_WIDTH: usize = 17;

const MAX_CODE_LEN: u32 = 60;

/// A codeable symbol: a concrete value or the escape for values outside the
/// model.  The derived order puts every value before the escape, which is
/// also the canonical tie order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Val(u64),
    Escape,
}

/// A canonical code book over values plus the always-present escape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCode {
    encode: BTreeMap<Sym, (u32, u64)>,
    decode: BTreeMap<(u32, u64), Sym>,
}

impl HuffmanCode {
    /// Builds the book from value counts; zero counts are ignored, the
    /// escape is appended with count 1.
    pub fn from_counts(counts: &BTreeMap<u64, u64>) -> Result<Self> {
        let mut leaves: Vec<(Sym, u64)> = counts
            .iter()
            .filter(|&(_, &c)| c > 0)
            .map(|(&v, &c)| (Sym::Val(v), c))
            .collect();
        leaves.push((Sym::Escape, 1));
        let lens = code_lengths(&leaves)?;
        let mut ordered: Vec<(Sym, u32)> = leaves
            .iter()
            .map(|&(s, _)| s)
            .zip(lens)
            .collect();
        ordered.sort_by_key(|&(s, len)| (len, s));
        let mut encode = BTreeMap::new();
        let mut decode = BTreeMap::new();
        let mut code: u64 = 0;
        let mut prev_len = ordered[0].1;
        for (s, len) in ordered {
            code <<= len - prev_len;
            prev_len = len;
            encode.insert(s, (len, code));
            decode.insert((len, code), s);
            code += 1;
        }
        Ok(HuffmanCode { encode, decode })
    }

    pub fn bits_for(&self, s: Sym) -> Option<(u32, u64)> {
        self.encode.get(&s).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, u32)> + '_ {
        self.encode.iter().map(|(&s, &(len, _))| (s, len))
    }

    fn push_symbol(&self, s: Sym, bits: &mut BitString) {
        let (len, code) = self.encode[&s];
        bits.push_uint(code, len as usize);
    }

    fn read_symbol(&self, reader: &mut BitReader<'_>) -> Result<Sym> {
        let mut len = 0u32;
        let mut code = 0u64;
        loop {
            let bit = reader.read().ok_or_else(|| {
                Error::MalformedPayload("bit stream ends inside a code".into())
            })?;
            len += 1;
            code = (code << 1) | bit as u64;
            if let Some(&s) = self.decode.get(&(len, code)) {
                return Ok(s);
            }
            if len > MAX_CODE_LEN {
                return Err(Error::MalformedPayload("unassigned code".into()));
            }
        }
    }
}

/// Code lengths per leaf, in leaf order.  Heap entries carry a creation
/// sequence so equal weights merge deterministically, oldest first.
fn code_lengths(leaves: &[(Sym, u64)]) -> Result<Vec<u32>> {
    if leaves.len() == 1 {
        return Ok(vec![1]);
    }
    enum Node {
        Leaf(usize),
        Internal(usize, usize),
    }
    let mut nodes: Vec<Node> = (0..leaves.len()).map(Node::Leaf).collect();
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = leaves
        .iter()
        .enumerate()
        .map(|(i, &(_, w))| Reverse((w, i)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w1, n1)) = heap.pop().unwrap();
        let Reverse((w2, n2)) = heap.pop().unwrap();
        let id = nodes.len();
        nodes.push(Node::Internal(n1, n2));
        heap.push(Reverse((w1 + w2, id)));
    }
    let root = heap.pop().unwrap().0 .1;
    let mut lens = vec![0u32; leaves.len()];
    let mut stack = vec![(root, 0u32)];
    while let Some((id, depth)) = stack.pop() {
        match nodes[id] {
            Node::Leaf(i) => lens[i] = depth.max(1),
            Node::Internal(l, r) => {
                if depth >= MAX_CODE_LEN {
                    return Err(Error::InvalidParams(
                        "count distribution too skewed for canonical codes".into(),
                    ));
                }
                stack.push((l, depth + 1));
                stack.push((r, depth + 1));
            }
        }
    }
    Ok(lens)
}

pub fn huffman_encode_seq(ds: &DeltaSeq, code: &HuffmanCode, a: &Alphabet) -> Result<Encoded> {
    let n = ds.n_points();
    if n >= a.len() {
        return Err(Error::ValueOutOfRange(n as u64));
    }
    let mut bits = BitString::new();
    for v in ds.flat_values() {
        let v = v as u64;
        if code.bits_for(Sym::Val(v)).is_some() {
            code.push_symbol(Sym::Val(v), &mut bits);
        } else {
            if v >> ESCAPE_WIDTH != 0 {
                return Err(Error::ValueOutOfRange(v));
            }
            code.push_symbol(Sym::Escape, &mut bits);
            bits.push_uint(v, ESCAPE_WIDTH);
        }
    }
    let mut payload = a.char_at(n).to_string();
    payload.push_str(&bits.to_chars(a));
    Ok(Encoded {
        codec: CodecKind::Huffman,
        transform: ds.kind(),
        payload,
    })
}

pub fn huffman_decode_seq(
    payload: &str,
    kind: TransformKind,
    code: &HuffmanCode,
    a: &Alphabet,
    origin: Origin,
) -> Result<DeltaSeq> {
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
    let count = 2 + 2 * kind.pairs_for_points(n);
    let bits = BitString::from_chars(chars.as_str(), a)?;
    let mut reader = BitReader::new(&bits);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let v = match code.read_symbol(&mut reader)? {
            Sym::Val(v) => v,
            Sym::Escape => reader.read_uint(ESCAPE_WIDTH).ok_or_else(|| {
                Error::MalformedPayload("bit stream ends inside an escaped value".into())
            })?,
        };
        u32::try_from(v).map_err(|_| Error::ValueOutOfRange(v))?;
        values.push(v as u32);
    }
    seq_from_values(&values, kind, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::model::{build_value_counts, shannon_entropy};
    use proptest::prelude::*;

    fn a() -> &'static Alphabet {
        Alphabet::canonical()
    }

    fn counts_of(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn known_tree_shape() {
        let code = HuffmanCode::from_counts(&counts_of(&[(0, 3), (56, 1)])).unwrap();
        assert_eq!(code.bits_for(Sym::Val(0)), Some((1, 0b0)));
        assert_eq!(code.bits_for(Sym::Val(56)), Some((2, 0b10)));
        assert_eq!(code.bits_for(Sym::Escape), Some((2, 0b11)));
    }

    #[test]
    fn escape_only_book() {
        let code = HuffmanCode::from_counts(&BTreeMap::new()).unwrap();
        assert_eq!(code.bits_for(Sym::Escape), Some((1, 0)));
    }

    #[test]
    fn canonical_order_breaks_ties_by_symbol() {
        // Equal counts: the light escape pairs with the first value, pushing
        // both a level down; the remaining 2-bit codes go out in value
        // order, and canonical codes count up within each length.
        let code =
            HuffmanCode::from_counts(&counts_of(&[(7, 5), (3, 5), (9, 5), (1, 5)])).unwrap();
        assert_eq!(code.bits_for(Sym::Val(3)), Some((2, 0b00)));
        assert_eq!(code.bits_for(Sym::Val(7)), Some((2, 0b01)));
        assert_eq!(code.bits_for(Sym::Val(9)), Some((2, 0b10)));
        assert_eq!(code.bits_for(Sym::Val(1)), Some((3, 0b110)));
        assert_eq!(code.bits_for(Sym::Escape), Some((3, 0b111)));
    }

    #[test]
    fn kraft_equality() {
        let code = HuffmanCode::from_counts(&counts_of(&[(0, 7), (1, 3), (2, 3), (5, 1)])).unwrap();
        let kraft: f64 = code.symbols().map(|(_, len)| 0.5f64.powi(len as i32)).sum();
        assert!((kraft - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_length_within_one_bit_of_entropy() {
        let counts = counts_of(&[(0, 40), (1, 20), (2, 12), (3, 9), (7, 5), (21, 2), (56, 2)]);
        let code = HuffmanCode::from_counts(&counts).unwrap();
        let with_escape: Vec<u64> = counts.values().copied().chain([1]).collect();
        let total: u64 = with_escape.iter().sum();
        let h = shannon_entropy(with_escape.clone());
        let l: f64 = counts
            .iter()
            .map(|(&v, &c)| c as f64 * code.bits_for(Sym::Val(v)).unwrap().0 as f64)
            .chain([code.bits_for(Sym::Escape).unwrap().0 as f64])
            .sum::<f64>()
            / total as f64;
        assert!(h <= l + 1e-12, "H {h} > L {l}");
        assert!(l < h + 1.0, "L {l} >= H + 1 {h}");
    }

    fn seq(deltas: &[(u32, u32)]) -> DeltaSeq {
        DeltaSeq::new(
            TransformKind::DeltaMin,
            1530,
            3684,
            deltas.to_vec(),
            Origin::default(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_with_and_without_escapes() {
        let ds = seq(&[(0, 56), (21, 71), (50, 15), (28, 0)]);
        let trained = HuffmanCode::from_counts(&build_value_counts([&ds])).unwrap();
        let enc = huffman_encode_seq(&ds, &trained, a()).unwrap();
        assert_eq!(enc.payload.chars().next(), Some('5'));
        assert_eq!(
            huffman_decode_seq(&enc.payload, ds.kind(), &trained, a(), Origin::default()).unwrap(),
            ds
        );
        // A book trained elsewhere forces escapes for every value.
        let foreign = HuffmanCode::from_counts(&counts_of(&[(9999, 5)])).unwrap();
        let enc = huffman_encode_seq(&ds, &foreign, a()).unwrap();
        assert_eq!(
            huffman_decode_seq(&enc.payload, ds.kind(), &foreign, a(), Origin::default()).unwrap(),
            ds
        );
    }

    #[test]
    fn escape_width_limit() {
        let ds = DeltaSeq::new(
            TransformKind::DeltaMin,
            200_000,
            0,
            vec![(0, 0), (0, 0), (0, 0)],
            Origin::default(),
        )
        .unwrap();
        let code = HuffmanCode::from_counts(&counts_of(&[(0, 5)])).unwrap();
        assert_eq!(
            huffman_encode_seq(&ds, &code, a()),
            Err(Error::ValueOutOfRange(200_000))
        );
    }

    #[test]
    fn decode_rejects_malformed() {
        let code = HuffmanCode::from_counts(&counts_of(&[(0, 5), (1, 2)])).unwrap();
        let kind = TransformKind::DeltaMin;
        let o = Origin::default();
        assert!(matches!(
            huffman_decode_seq("", kind, &code, a(), o),
            Err(Error::MalformedPayload(_))
        ));
        assert_eq!(
            huffman_decode_seq("#0", kind, &code, a(), o),
            Err(Error::UnknownCharacter { ch: '#', pos: 0 })
        );
        assert_eq!(
            huffman_decode_seq("30", kind, &code, a(), o),
            Err(Error::TooFewPoints(3))
        );
        // Ten packed bits cannot hold ten values.
        assert!(matches!(
            huffman_decode_seq("50", kind, &code, a(), o),
            Err(Error::MalformedPayload(_))
        ));
    }

    proptest! {
        #[test]
        fn builds_are_deterministic_and_kraft_tight(
            counts in proptest::collection::btree_map(0u64..500, 1u64..1000, 1..40)
        ) {
            let c1 = HuffmanCode::from_counts(&counts).unwrap();
            let c2 = HuffmanCode::from_counts(&counts).unwrap();
            prop_assert_eq!(&c1, &c2);
            let kraft: f64 = c1.symbols().map(|(_, len)| 0.5f64.powi(len as i32)).sum();
            prop_assert!((kraft - 1.0).abs() < 1e-9);
        }

        #[test]
        fn sequence_round_trip(
            hx in 0u32..3500,
            hy in 0u32..10000,
            deltas in proptest::collection::vec((0u32..600, 0u32..600), 2..=22),
            train_on_self in any::<bool>(),
        ) {
            let ds = DeltaSeq::new(
                TransformKind::DeltaConsec,
                hx,
                hy,
                deltas,
                Origin::default(),
            )
            .unwrap();
            let code = if train_on_self {
                HuffmanCode::from_counts(&build_value_counts([&ds])).unwrap()
            } else {
                HuffmanCode::from_counts(&counts_of(&[(0, 10), (1, 5)])).unwrap()
            };
            let enc = huffman_encode_seq(&ds, &code, a()).unwrap();
            let back = huffman_decode_seq(
                &enc.payload,
                TransformKind::DeltaConsec,
                &code,
                a(),
                Origin::default(),
            )
            .unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
