//! Bit sequences and their 6-bit character packing.
//!
//! Bit-level codecs produce arbitrary bit strings; the wire carries them as
//! characters drawn from the first 64 alphabet positions, six bits per
//! character, most significant bit first, zero-padded at the end.

use crate::alphabet::Alphabet;
use crate::error::Error;
use crate::Result;

pub const BITS_PER_CHAR: usize = 6;

/// An append-only bit sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        BitString::default()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends the low `width` bits of `v`, most significant first.
    pub fn push_uint(&mut self, v: u64, width: usize) {
        for i in (0..width).rev() {
            self.bits.push((v >> i) & 1 == 1);
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    /// Packs into characters, zero-padding the final group.
    pub fn to_chars(&self, a: &Alphabet) -> String {
        let mut out = String::with_capacity(self.bits.len().div_ceil(BITS_PER_CHAR));
        for group in self.bits.chunks(BITS_PER_CHAR) {
            let mut v = 0usize;
            for i in 0..BITS_PER_CHAR {
                v <<= 1;
                v |= group.get(i).map_or(0, |&b| b as usize);
            }
            out.push(a.char_at(v));
        }
        out
    }

    /// Inverse of [`BitString::to_chars`]; the result carries up to five
    /// trailing padding zeros.
    pub fn from_chars(s: &str, a: &Alphabet) -> Result<Self> {
        let mut bits = BitString::new();
        for (pos, ch) in s.chars().enumerate() {
            match a.index_of(ch) {
                Some(v) if v < (1 << BITS_PER_CHAR) => {
                    bits.push_uint(v as u64, BITS_PER_CHAR);
                }
                _ => return Err(Error::UnknownCharacter { ch, pos }),
            }
        }
        Ok(bits)
    }
}

/// Sequential reader over a [`BitString`].
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn read(&mut self) -> Option<bool> {
        let bit = self.bits.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }

    /// Reads `width` bits MSB-first; `None` if any bit is missing, without
    /// consuming a partial group.
    pub fn read_uint(&mut self, width: usize) -> Option<u64> {
        if self.pos + width > self.bits.len() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v <<= 1;
            v |= self.read().unwrap() as u64;
        }
        Some(v)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn packing_golden() {
        let a = Alphabet::canonical();
        let mut bits = BitString::new();
        // 110010 000001 1 -> 50, 1, then 1 padded to 100000 = 32.
        bits.push_uint(0b110010, 6);
        bits.push_uint(0b000001, 6);
        bits.push(true);
        assert_eq!(bits.to_chars(a), "o1W");
        let back = BitString::from_chars("o1W", a).unwrap();
        assert_eq!(back.len(), 18);
        for (i, expected) in "110010000001100000".chars().enumerate() {
            assert_eq!(back.get(i), Some(expected == '1'), "bit {i}");
        }
    }

    #[test]
    fn rejects_characters_outside_packing_range() {
        let a = Alphabet::canonical();
        // '%' has index 64, one past the packable range.
        assert_eq!(
            BitString::from_chars("0%", a),
            Err(Error::UnknownCharacter { ch: '%', pos: 1 })
        );
        assert_eq!(
            BitString::from_chars("#", a),
            Err(Error::UnknownCharacter { ch: '#', pos: 0 })
        );
    }

    #[test]
    fn reader_stops_at_end() {
        let mut bits = BitString::new();
        bits.push_uint(0b101, 3);
        let mut r = BitReader::new(&bits);
        assert_eq!(r.read_uint(2), Some(0b10));
        assert_eq!(r.remaining(), 1);
        assert_eq!(r.read_uint(2), None);
        assert_eq!(r.read(), Some(true));
        assert_eq!(r.read(), None);
    }

    proptest! {
        #[test]
        fn chars_round_trip(raw in proptest::collection::vec(any::<bool>(), 0..200)) {
            let a = Alphabet::canonical();
            let mut bits = BitString::new();
            for &b in &raw {
                bits.push(b);
            }
            let packed = bits.to_chars(a);
            prop_assert_eq!(packed.chars().count(), raw.len().div_ceil(6));
            let back = BitString::from_chars(&packed, a).unwrap();
            prop_assert!(back.len() >= raw.len() && back.len() - raw.len() < 6);
            for (i, &b) in raw.iter().enumerate() {
                prop_assert_eq!(back.get(i), Some(b));
            }
            for i in raw.len()..back.len() {
                prop_assert_eq!(back.get(i), Some(false));
            }
        }

        #[test]
        fn uint_round_trip(v in any::<u64>(), width in 0usize..=64) {
            let mut bits = BitString::new();
            bits.push_uint(v, width);
            let mut r = BitReader::new(&bits);
            let expected = if width == 64 { v } else { v & ((1u64 << width) - 1) };
            prop_assert_eq!(r.read_uint(width), Some(expected));
        }
    }
}
