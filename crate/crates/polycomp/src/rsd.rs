//! Repeated-substring dictionary: replaces frequent 3-character substrings
//! of variable-length payloads with a marker plus a 1-character code.
//!
//! The dictionary is built once per corpus and must be shared with decoders.
//! Payloads that feed it are produced with a digit base one smaller than the
//! plain variable-length codec so the marker character stays free.

use std::collections::HashMap;

use crate::alphabet::Alphabet;
use crate::error::Error;
use crate::transforms::TransformKind;
use crate::Result;

/// Substring length for every dictionary key.
pub const KEY_LEN: usize = 3;

/// How candidate substrings are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictMode {
    /// Disjoint chunks at offsets 0, 3, 6, ...
    FixedField,
    /// Every offset.
    SlidingWindow,
}

impl DictMode {
    pub fn token(self) -> &'static str {
        match self {
            DictMode::FixedField => "fixed",
            DictMode::SlidingWindow => "sliding",
        }
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(DictMode::FixedField),
            "sliding" => Ok(DictMode::SlidingWindow),
            other => Err(Error::InvalidParams(format!(
                "unknown dictionary mode '{other}' (expected fixed or sliding)"
            ))),
        }
    }
}

/// A substitution dictionary: up to `capacity` 3-character keys, each mapped
/// to a single code character assigned by frequency rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RsdDictionary {
    mode: DictMode,
    transform: TransformKind,
    base: usize,
    marker: char,
    entries: Vec<(String, char)>,
    by_key: HashMap<String, char>,
    by_code: HashMap<char, String>,
}

impl RsdDictionary {
    pub fn mode(&self) -> DictMode {
        self.mode
    }

    pub fn transform(&self) -> TransformKind {
        self.transform
    }

    /// Digit base of the payloads this dictionary was built for.
    pub fn base(&self) -> usize {
        self.base
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    /// Entries in rank order (most frequent first).
    pub fn entries(&self) -> &[(String, char)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn code_for(&self, key: &str) -> Option<char> {
        self.by_key.get(key).copied()
    }

    fn key_for(&self, code: char) -> Option<&str> {
        self.by_code.get(&code).map(|s| s.as_str())
    }

    fn from_entries(
        mode: DictMode,
        transform: TransformKind,
        base: usize,
        marker: char,
        entries: Vec<(String, char)>,
    ) -> Result<Self> {
        let mut by_key = HashMap::with_capacity(entries.len());
        let mut by_code = HashMap::with_capacity(entries.len());
        for (key, code) in &entries {
            if key.chars().count() != KEY_LEN {
                return Err(Error::MalformedFile(format!(
                    "dictionary key '{key}' is not {KEY_LEN} characters"
                )));
            }
            if key.contains(marker) {
                return Err(Error::MalformedFile(format!(
                    "dictionary key '{key}' contains the marker character"
                )));
            }
            if by_key.insert(key.clone(), *code).is_some() {
                return Err(Error::MalformedFile(format!("duplicate key '{key}'")));
            }
            if by_code.insert(*code, key.clone()).is_some() {
                return Err(Error::MalformedFile(format!("duplicate code '{code}'")));
            }
        }
        Ok(RsdDictionary {
            mode,
            transform,
            base,
            marker,
            entries,
            by_key,
            by_code,
        })
    }
}

/// Builds a dictionary from payloads: counts 3-character substrings in the
/// chosen mode, keeps the `capacity` most frequent (ties broken by smaller
/// key), and assigns codes in alphabet order, rank 0 first.  Substrings
/// containing reserved characters are never candidates.
pub fn build_dictionary<I, S>(
    payloads: I,
    mode: DictMode,
    transform: TransformKind,
    base: usize,
    capacity: usize,
    a: &Alphabet,
) -> Result<RsdDictionary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if capacity > a.len() {
        return Err(Error::InvalidParams(format!(
            "capacity {capacity} exceeds alphabet size {}",
            a.len()
        )));
    }
    let reserved = [a.sentinel(), a.rsd_marker(), a.fallback()];
    let mut counts: HashMap<String, u64> = HashMap::new();
    for payload in payloads {
        let chars: Vec<char> = payload.as_ref().chars().collect();
        let step = match mode {
            DictMode::FixedField => KEY_LEN,
            DictMode::SlidingWindow => 1,
        };
        let mut i = 0;
        while i + KEY_LEN <= chars.len() {
            let gram = &chars[i..i + KEY_LEN];
            if !gram.iter().any(|c| reserved.contains(c)) {
                *counts.entry(gram.iter().collect()).or_insert(0) += 1;
            }
            i += step;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|(ka, ca), (kb, cb)| cb.cmp(ca).then_with(|| ka.cmp(kb)));
    ranked.truncate(capacity);
    let entries = ranked
        .into_iter()
        .enumerate()
        .map(|(rank, (key, _))| (key, a.char_at(rank)))
        .collect();
    RsdDictionary::from_entries(mode, transform, base, a.rsd_marker(), entries)
}

/// Greedy leftmost substitution: each dictionary key becomes marker+code.
/// Output is never longer than the input.
pub fn apply_rsd(payload: &str, dict: &RsdDictionary) -> String {
    let chars: Vec<char> = payload.chars().collect();
    let mut out = String::with_capacity(payload.len());
    let mut i = 0;
    while i < chars.len() {
        if i + KEY_LEN <= chars.len() {
            let gram: String = chars[i..i + KEY_LEN].iter().collect();
            if let Some(code) = dict.code_for(&gram) {
                out.push(dict.marker());
                out.push(code);
                i += KEY_LEN;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Inverse of [`apply_rsd`].
pub fn strip_rsd(payload: &str, dict: &RsdDictionary) -> Result<String> {
    let mut out = String::with_capacity(payload.len() * 2);
    let mut it = payload.chars();
    while let Some(c) = it.next() {
        if c == dict.marker() {
            let code = it.next().ok_or_else(|| {
                Error::MalformedPayload("substitution marker at end of payload".into())
            })?;
            let key = dict.key_for(code).ok_or(Error::UnknownCode(code))?;
            out.push_str(key);
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Serializes a dictionary: header `rsd <mode> <transform> <base> <count>
/// <hash>` followed by one `key<TAB>code` line per entry.  The hash is
/// FNV-1a 64 over the header fields and entries, hex encoded.
pub fn serialize_dictionary(dict: &RsdDictionary) -> String {
    let mut out = format!(
        "rsd {} {} {} {} {:016x}\n",
        dict.mode().token(),
        dict.transform().token(),
        dict.base(),
        dict.len(),
        dictionary_hash(dict),
    );
    for (key, code) in dict.entries() {
        out.push_str(key);
        out.push('\t');
        out.push(*code);
        out.push('\n');
    }
    out
}

/// Parses the [`serialize_dictionary`] format.  The hash field is optional;
/// when present it must match.
pub fn parse_dictionary(text: &str) -> Result<RsdDictionary> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("dictionary file is empty".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || fields.len() > 6 || fields[0] != "rsd" {
        return Err(Error::MalformedFile(format!(
            "expected 'rsd <mode> <transform> <base> <count> [hash]', got '{header}'"
        )));
    }
    let mode = DictMode::parse_token(fields[1])?;
    let transform = TransformKind::parse_token(fields[2])?;
    let base: usize = fields[3]
        .parse()
        .map_err(|_| Error::MalformedFile(format!("bad base '{}'", fields[3])))?;
    let count: usize = fields[4]
        .parse()
        .map_err(|_| Error::MalformedFile(format!("bad entry count '{}'", fields[4])))?;
    let mut entries = Vec::with_capacity(count);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (key, code) = line.split_once('\t').ok_or_else(|| {
            Error::MalformedFile(format!("expected 'key<TAB>code', got '{line}'"))
        })?;
        let mut code_chars = code.chars();
        let code = code_chars
            .next()
            .ok_or_else(|| Error::MalformedFile(format!("missing code for key '{key}'")))?;
        if code_chars.next().is_some() {
            return Err(Error::MalformedFile(format!(
                "code for key '{key}' is not a single character"
            )));
        }
        entries.push((key.to_string(), code));
    }
    if entries.len() != count {
        return Err(Error::MalformedFile(format!(
            "header promises {count} entries, file has {}",
            entries.len()
        )));
    }
    let dict = RsdDictionary::from_entries(
        mode,
        transform,
        base,
        crate::alphabet::RSD_MARKER,
        entries,
    )?;
    if fields.len() == 6 {
        let expected = u64::from_str_radix(fields[5], 16)
            .map_err(|_| Error::MalformedFile(format!("bad hash '{}'", fields[5])))?;
        let actual = dictionary_hash(&dict);
        if expected != actual {
            return Err(Error::MalformedFile(format!(
                "dictionary hash mismatch: header {expected:016x}, contents {actual:016x}"
            )));
        }
    }
    Ok(dict)
}

fn dictionary_hash(dict: &RsdDictionary) -> u64 {
    let mut h = Fnv1a::new();
    h.write(dict.mode().token().as_bytes());
    h.write(dict.transform().token().as_bytes());
    h.write(dict.base().to_string().as_bytes());
    for (key, code) in dict.entries() {
        h.write(key.as_bytes());
        h.write(&[1]);
        let mut buf = [0u8; 4];
        h.write(code.encode_utf8(&mut buf).as_bytes());
        h.write(&[2]);
    }
    h.finish()
}

/// FNV-1a 64-bit.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
