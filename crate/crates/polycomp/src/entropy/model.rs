//! Static frequency models shared by encoder and decoder, plus their file
//! format and entropy math.
//!
//! Model files start with `model <kind> <transform>` so a decoder can refuse
//! a model trained for the other transform.  Counts are stored verbatim;
//! rebuilding a model from its own file yields the identical coder.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::transforms::{DeltaSeq, TransformKind};
use crate::Result;

/// Cumulative-count table over an ordered symbol set.  The total stays
/// below 2^29 so 31-bit range-coder arithmetic cannot overflow or collapse
/// an interval to zero width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolModel<S> {
    symbols: Vec<S>,
    cum: Vec<u64>,
}

impl<S: Ord + Clone> SymbolModel<S> {
    pub const MAX_TOTAL: u64 = 1 << 29;

    /// Builds a model from positive counts; duplicate symbols accumulate.
    /// Counts are halved (never below 1) until the total fits the coder.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
    {
        let mut merged: BTreeMap<S, u64> = BTreeMap::new();
        for (s, c) in counts {
            if c == 0 {
                return Err(Error::InvalidParams(
                    "every model symbol needs a positive count".into(),
                ));
            }
            *merged.entry(s).or_insert(0) += c;
        }
        if merged.is_empty() {
            return Err(Error::InvalidParams("a model needs at least one symbol".into()));
        }
        while merged.values().sum::<u64>() >= Self::MAX_TOTAL {
            for c in merged.values_mut() {
                *c = (*c / 2).max(1);
            }
        }
        let mut symbols = Vec::with_capacity(merged.len());
        let mut cum = Vec::with_capacity(merged.len() + 1);
        cum.push(0);
        let mut running = 0;
        for (s, c) in merged {
            symbols.push(s);
            running += c;
            cum.push(running);
        }
        Ok(SymbolModel { symbols, cum })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn total(&self) -> u64 {
        *self.cum.last().unwrap()
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn count_of(&self, s: &S) -> Option<u64> {
        self.range_of(s).map(|(lo, hi)| hi - lo)
    }

    /// Cumulative interval [lo, hi) of a symbol.
    pub fn range_of(&self, s: &S) -> Option<(u64, u64)> {
        let i = self.symbols.binary_search(s).ok()?;
        Some((self.cum[i], self.cum[i + 1]))
    }

    /// The symbol whose interval contains `scaled`; requires
    /// `scaled < total()`.
    pub fn locate(&self, scaled: u64) -> (&S, u64, u64) {
        debug_assert!(scaled < self.total());
        let i = self.cum.partition_point(|&c| c <= scaled) - 1;
        (&self.symbols[i], self.cum[i], self.cum[i + 1])
    }

    pub fn probability_of(&self, s: &S) -> Option<f64> {
        self.count_of(s).map(|c| c as f64 / self.total() as f64)
    }
}

/// Decimal digit counts over fixed-field payloads, with one smoothing count
/// per digit so unseen digits stay codable.
pub fn digit_counts<I, P>(payloads: I) -> Result<BTreeMap<char, u64>>
where
    I: IntoIterator<Item = P>,
    P: AsRef<str>,
{
    let mut counts: BTreeMap<char, u64> = ('0'..='9').map(|d| (d, 1)).collect();
    for payload in payloads {
        for ch in payload.as_ref().chars() {
            match counts.get_mut(&ch) {
                Some(c) => *c += 1,
                None => return Err(Error::SymbolNotInModel(ch.to_string())),
            }
        }
    }
    Ok(counts)
}

/// Digit model for the arithmetic coder, smoothed as in [`digit_counts`].
pub fn build_digit_model<I, P>(payloads: I) -> Result<SymbolModel<char>>
where
    I: IntoIterator<Item = P>,
    P: AsRef<str>,
{
    SymbolModel::from_counts(digit_counts(payloads)?)
}

/// Occurrence counts of whole head and delta values, for the value-symbol
/// coder.
pub fn build_value_counts<'a, I>(seqs: I) -> BTreeMap<u64, u64>
where
    I: IntoIterator<Item = &'a DeltaSeq>,
{
    let mut counts = BTreeMap::new();
    for ds in seqs {
        for v in ds.flat_values() {
            *counts.entry(v as u64).or_insert(0) += 1;
        }
    }
    counts
}

/// Shannon entropy in bits per symbol of a count distribution; zero counts
/// contribute nothing, an empty distribution has zero entropy.
pub fn shannon_entropy<I>(counts: I) -> f64
where
    I: IntoIterator<Item = u64>,
{
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Renders a digit model as `model digit <transform>` plus `<digit> <count>`
/// lines.
pub fn serialize_digit_model(model: &SymbolModel<char>, kind: TransformKind) -> String {
    let mut out = format!("model digit {}\n", kind.token());
    for s in model.symbols() {
        out.push_str(&format!("{s} {}\n", model.count_of(s).unwrap()));
    }
    out
}

pub fn parse_digit_model(text: &str) -> Result<(SymbolModel<char>, TransformKind)> {
    let (kind, lines) = parse_model_header(text, "digit")?;
    let mut counts = Vec::new();
    for line in lines {
        let (sym, count) = split_count_line(line)?;
        let mut chars = sym.chars();
        let (Some(ch), None) = (chars.next(), chars.next()) else {
            return Err(Error::MalformedFile(format!(
                "digit symbol '{sym}' is not a single character"
            )));
        };
        counts.push((ch, count));
    }
    Ok((SymbolModel::from_counts(counts)?, kind))
}

/// Renders value counts as `model value <transform>` plus `<value> <count>`
/// lines.
pub fn serialize_value_counts(counts: &BTreeMap<u64, u64>, kind: TransformKind) -> String {
    let mut out = format!("model value {}\n", kind.token());
    for (v, c) in counts {
        out.push_str(&format!("{v} {c}\n"));
    }
    out
}

pub fn parse_value_counts(text: &str) -> Result<(BTreeMap<u64, u64>, TransformKind)> {
    let (kind, lines) = parse_model_header(text, "value")?;
    let mut counts = BTreeMap::new();
    for line in lines {
        let (sym, count) = split_count_line(line)?;
        let value: u64 = sym
            .parse()
            .map_err(|_| Error::MalformedFile(format!("bad value '{sym}'")))?;
        if counts.insert(value, count).is_some() {
            return Err(Error::MalformedFile(format!("duplicate value {value}")));
        }
    }
    Ok((counts, kind))
}

fn parse_model_header<'a>(
    text: &'a str,
    expected: &str,
) -> Result<(TransformKind, impl Iterator<Item = &'a str>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("model file is empty".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "model" || fields[1] != expected {
        return Err(Error::MalformedFile(format!(
            "expected 'model {expected} <transform>', got '{header}'"
        )));
    }
    let kind = TransformKind::parse_token(fields[2])?;
    Ok((kind, lines.filter(|l| !l.is_empty())))
}

fn split_count_line(line: &str) -> Result<(&str, u64)> {
    let (sym, count) = line
        .split_once(' ')
        .ok_or_else(|| Error::MalformedFile(format!("expected '<symbol> <count>', got '{line}'")))?;
    let count: u64 = count
        .trim()
        .parse()
        .map_err(|_| Error::MalformedFile(format!("bad count in '{line}'")))?;
    Ok((sym, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::Origin;
    use proptest::prelude::*;

    #[test]
    fn cumulative_intervals() {
        let m = SymbolModel::from_counts([('a', 2), ('b', 3), ('c', 5)]).unwrap();
        assert_eq!(m.total(), 10);
        assert_eq!(m.range_of(&'a'), Some((0, 2)));
        assert_eq!(m.range_of(&'b'), Some((2, 5)));
        assert_eq!(m.range_of(&'c'), Some((5, 10)));
        assert_eq!(m.range_of(&'d'), None);
        assert_eq!(m.locate(0), (&'a', 0, 2));
        assert_eq!(m.locate(4), (&'b', 2, 5));
        assert_eq!(m.locate(9), (&'c', 5, 10));
        assert_eq!(m.probability_of(&'b'), Some(0.3));
    }

    #[test]
    fn duplicates_accumulate_and_zero_counts_rejected() {
        let m = SymbolModel::from_counts([('a', 2), ('a', 3)]).unwrap();
        assert_eq!(m.count_of(&'a'), Some(5));
        assert!(SymbolModel::from_counts([('a', 0)]).is_err());
        assert!(SymbolModel::<char>::from_counts([]).is_err());
    }

    #[test]
    fn oversized_totals_rescale() {
        let m = SymbolModel::from_counts([('a', 3 << 29), ('b', 1)]).unwrap();
        assert!(m.total() < SymbolModel::<char>::MAX_TOTAL);
        assert!(m.count_of(&'b').unwrap() >= 1);
        assert!(m.count_of(&'a').unwrap() > m.count_of(&'b').unwrap());
    }

    #[test]
    fn digit_smoothing() {
        let counts = digit_counts(["0001"]).unwrap();
        assert_eq!(counts[&'0'], 4);
        assert_eq!(counts[&'1'], 2);
        assert_eq!(counts[&'9'], 1);
        assert_eq!(counts.values().sum::<u64>(), 14);
        assert_eq!(
            digit_counts(["12,"]),
            Err(Error::SymbolNotInModel(",".into()))
        );
    }

    #[test]
    fn value_counts_from_sequences() {
        let ds = DeltaSeq::new(
            TransformKind::DeltaMin,
            5,
            9,
            vec![(1, 2), (1, 1), (9, 2)],
            Origin::default(),
        )
        .unwrap();
        let counts = build_value_counts([&ds]);
        assert_eq!(counts[&1], 3);
        assert_eq!(counts[&2], 2);
        assert_eq!(counts[&5], 1);
        assert_eq!(counts[&9], 2);
        assert_eq!(counts.values().sum::<u64>(), 8);
    }

    #[test]
    fn entropy_closed_forms() {
        assert_eq!(shannon_entropy([1, 1, 1, 1]), 2.0);
        assert_eq!(shannon_entropy([5]), 0.0);
        assert_eq!(shannon_entropy([]), 0.0);
        // H(1/4, 3/4) = 2 - (3/4) log2 3.
        let h = shannon_entropy([1, 3]);
        assert!((h - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-12);
        assert_eq!(shannon_entropy([2, 0, 2]), 1.0);
    }

    #[test]
    fn digit_model_file_round_trip() {
        let m = build_digit_model(["00015", "3684"]).unwrap();
        let text = serialize_digit_model(&m, TransformKind::DeltaMin);
        assert!(text.starts_with("model digit delta-min\n"));
        let (back, kind) = parse_digit_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(kind, TransformKind::DeltaMin);
        assert!(parse_digit_model("model value delta\n0 1\n").is_err());
        assert!(parse_digit_model("model digit delta\nxy 1\n").is_err());
    }

    #[test]
    fn value_counts_file_round_trip() {
        let counts: BTreeMap<u64, u64> = [(0, 5), (56, 2), (1530, 1)].into_iter().collect();
        let text = serialize_value_counts(&counts, TransformKind::DeltaConsec);
        assert!(text.starts_with("model value delta\n"));
        let (back, kind) = parse_value_counts(&text).unwrap();
        assert_eq!(back, counts);
        assert_eq!(kind, TransformKind::DeltaConsec);
        assert!(parse_value_counts("model value delta\n5 1\n5 2\n").is_err());
    }

    proptest! {
        #[test]
        fn locate_agrees_with_range(counts in proptest::collection::btree_map(0u8..20, 1u64..50, 1..10)) {
            let m = SymbolModel::from_counts(counts).unwrap();
            for s in m.symbols() {
                let (lo, hi) = m.range_of(s).unwrap();
                for scaled in [lo, (lo + hi) / 2, hi - 1] {
                    let (found, flo, fhi) = m.locate(scaled);
                    prop_assert_eq!(found, s);
                    prop_assert_eq!((flo, fhi), (lo, hi));
                }
            }
        }
    }
}
