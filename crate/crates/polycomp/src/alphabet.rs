//! Output alphabet, base conversions, and the big-integer accumulator.
//!
//! All codecs draw their characters from an [`Alphabet`]: an ordered list of
//! digit characters plus reserved characters with fixed roles (frame
//! sentinel, dictionary marker, fallback marker, quotient indicators).  The
//! canonical alphabet has 70 digit characters, chosen to survive SMS and
//! URL contexts.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::Error;
use crate::Result;

/// Digit characters of the canonical alphabet, in index order: decimal
/// digits, uppercase, lowercase, then ASCII-ordered SMS-safe specials.
pub const CANONICAL_CHARS: &str =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz!$%&()*+";

/// Quotient indicator characters for quotients 1..=8, in quotient order.
pub const CANONICAL_QUOTIENTS: [char; 8] = ['+', '*', '/', '(', ')', '%', '&', '!'];

/// Frame sentinel character.
pub const SENTINEL: char = '#';
/// Dictionary-substitution marker.
pub const RSD_MARKER: char = '@';
/// Fallback marker for values too large for a quotient indicator.
pub const FALLBACK: char = '-';

/// An ordered digit alphabet plus reserved role characters.
///
/// Invariants, checked at construction: digit characters are distinct; the
/// sentinel, dictionary marker, and fallback marker are distinct from each
/// other and never appear among the digits; quotient indicators are distinct
/// from each other and from the three markers.  A quotient indicator may
/// coincide with a high digit character: codecs that use indicators shrink
/// their digit base so the two sets stay disjoint in use (see
/// [`Alphabet::validate_digit_profile`]).
#[derive(Debug, Clone)]
pub struct Alphabet {
    chars: Vec<char>,
    index: HashMap<char, usize>,
    sentinel: char,
    rsd_marker: char,
    fallback: char,
    quotients: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet from its parts, checking every invariant.
    pub fn new(
        chars: Vec<char>,
        sentinel: char,
        rsd_marker: char,
        fallback: char,
        quotients: Vec<char>,
    ) -> Result<Self> {
        if chars.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least 2 digit characters, got {}",
                chars.len()
            )));
        }
        let mut index = HashMap::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate character '{c}'")));
            }
        }
        let markers = [sentinel, rsd_marker, fallback];
        for (i, &m) in markers.iter().enumerate() {
            if index.contains_key(&m) {
                return Err(Error::InvalidAlphabet(format!(
                    "reserved character '{m}' appears among the digits"
                )));
            }
            if markers[..i].contains(&m) {
                return Err(Error::InvalidAlphabet(format!(
                    "reserved character '{m}' used for two roles"
                )));
            }
        }
        for (i, &q) in quotients.iter().enumerate() {
            if markers.contains(&q) {
                return Err(Error::InvalidAlphabet(format!(
                    "quotient indicator '{q}' collides with a marker"
                )));
            }
            if quotients[..i].contains(&q) {
                return Err(Error::InvalidAlphabet(format!(
                    "duplicate quotient indicator '{q}'"
                )));
            }
        }
        Ok(Alphabet {
            chars,
            index,
            sentinel,
            rsd_marker,
            fallback,
            quotients,
        })
    }

    /// The canonical 70-character alphabet.
    pub fn canonical() -> &'static Alphabet {
        static CANONICAL: OnceLock<Alphabet> = OnceLock::new();
        CANONICAL.get_or_init(|| {
            Alphabet::new(
                CANONICAL_CHARS.chars().collect(),
                SENTINEL,
                RSD_MARKER,
                FALLBACK,
                CANONICAL_QUOTIENTS.to_vec(),
            )
            .expect("canonical alphabet is valid")
        })
    }

    /// Number of digit characters.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    /// True when the alphabet has no digit characters (never, by invariant).
    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Digit character at `i`.  Panics if `i` is out of range; callers
    /// validate values before emission.
    pub fn char_at(&self, i: usize) -> char {
        self.chars[i]
    }

    /// Index of a digit character, if it is one.
    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn sentinel(&self) -> char {
        self.sentinel
    }

    pub fn rsd_marker(&self) -> char {
        self.rsd_marker
    }

    pub fn fallback(&self) -> char {
        self.fallback
    }

    /// Number of quotient indicators available.
    pub fn quotient_count(&self) -> usize {
        self.quotients.len()
    }

    /// Indicator character for quotient `q` (1-based).
    pub fn quotient_char(&self, q: usize) -> Option<char> {
        (q >= 1).then(|| self.quotients.get(q - 1).copied()).flatten()
    }

    /// Quotient encoded by `c`, if `c` is an indicator.
    pub fn quotient_of(&self, c: char) -> Option<usize> {
        self.quotients.iter().position(|&q| q == c).map(|i| i + 1)
    }

    /// Checks that a codec profile (digit base plus active quotient
    /// indicators) keeps digits and reserved characters disjoint.
    pub fn validate_digit_profile(&self, base: usize, q_count: usize) -> Result<()> {
        if base < 2 || base > self.len() {
            return Err(Error::InvalidParams(format!(
                "digit base {base} outside 2..={}",
                self.len()
            )));
        }
        if q_count > self.quotients.len() {
            return Err(Error::InvalidParams(format!(
                "{q_count} quotient indicators requested, alphabet has {}",
                self.quotients.len()
            )));
        }
        for &q in &self.quotients[..q_count] {
            if self.index_of(q).is_some_and(|i| i < base) {
                return Err(Error::InvalidAlphabet(format!(
                    "quotient indicator '{q}' is also a digit below base {base}"
                )));
            }
        }
        for m in [self.fallback, self.rsd_marker, self.sentinel] {
            if self.index_of(m).is_some_and(|i| i < base) {
                return Err(Error::InvalidAlphabet(format!(
                    "marker '{m}' is also a digit below base {base}"
                )));
            }
        }
        Ok(())
    }
}

/// Renders `value` in `base` using the alphabet's digit characters, most
/// significant digit first, no padding.  Zero renders as one digit.
pub fn int_to_base(value: u64, base: usize, a: &Alphabet) -> Result<String> {
    check_base(base, a)?;
    let base = base as u64;
    if value == 0 {
        return Ok(a.char_at(0).to_string());
    }
    let mut digits = Vec::new();
    let mut v = value;
    while v > 0 {
        digits.push(a.char_at((v % base) as usize));
        v /= base;
    }
    digits.reverse();
    Ok(digits.into_iter().collect())
}

/// Like [`int_to_base`] but zero-padded on the left to exactly `width`
/// digits.  Errors with [`Error::FieldOverflow`] when the value needs more.
pub fn int_to_base_padded(value: u64, base: usize, width: usize, a: &Alphabet) -> Result<String> {
    let digits = int_to_base(value, base, a)?;
    let n = digits.chars().count();
    if n > width {
        return Err(Error::FieldOverflow { value, width, base });
    }
    let mut out = String::with_capacity(width);
    for _ in n..width {
        out.push(a.char_at(0));
    }
    out.push_str(&digits);
    Ok(out)
}

/// Parses a most-significant-first digit string back to an integer.
pub fn base_to_int(s: &str, base: usize, a: &Alphabet) -> Result<u64> {
    check_base(base, a)?;
    if s.is_empty() {
        return Err(Error::MalformedPayload("empty digit string".into()));
    }
    let mut v: u64 = 0;
    for (pos, c) in s.chars().enumerate() {
        let d = a
            .index_of(c)
            .filter(|&d| d < base)
            .ok_or(Error::UnknownCharacter { ch: c, pos })?;
        v = v
            .checked_mul(base as u64)
            .and_then(|v| v.checked_add(d as u64))
            .ok_or(Error::ValueOutOfRange(u64::MAX))?;
    }
    Ok(v)
}

fn check_base(base: usize, a: &Alphabet) -> Result<()> {
    if base < 2 || base > a.len() {
        return Err(Error::InvalidParams(format!(
            "base {base} outside 2..={}",
            a.len()
        )));
    }
    Ok(())
}

/// Unsigned big integer supporting exactly the two operations the codecs
/// need: multiply-and-add by machine words, and division with remainder by a
/// machine word.  Little-endian base-2^64 limbs, no leading zero limbs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BigAccumulator {
    limbs: Vec<u64>,
}

impl BigAccumulator {
    pub fn zero() -> Self {
        BigAccumulator { limbs: Vec::new() }
    }

    pub fn from_u64(v: u64) -> Self {
        let mut acc = BigAccumulator::zero();
        if v > 0 {
            acc.limbs.push(v);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Replaces the value with `value * m + a`.  Requires `m >= 1`.
    pub fn mul_add(&mut self, m: u64, a: u64) {
        debug_assert!(m >= 1, "multiplier must be positive");
        let mut carry = a as u128;
        for limb in &mut self.limbs {
            let p = (*limb as u128) * (m as u128) + carry;
            *limb = p as u64;
            carry = p >> 64;
        }
        while carry > 0 {
            self.limbs.push(carry as u64);
            carry >>= 64;
        }
    }

    /// Divides in place by `m`, returning the remainder.  Requires `m >= 1`.
    pub fn divmod(&mut self, m: u64) -> u64 {
        debug_assert!(m >= 1, "divisor must be positive");
        let m128 = m as u128;
        let mut rem: u128 = 0;
        for limb in self.limbs.iter_mut().rev() {
            let cur = (rem << 64) | (*limb as u128);
            *limb = (cur / m128) as u64;
            rem = cur % m128;
        }
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
        rem as u64
    }

    /// The number of limbs, for size diagnostics.
    pub fn limb_count(&self) -> usize {
        self.limbs.len()
    }
}

impl fmt::Display for BigAccumulator {
    /// Decimal rendering, for diagnostics only.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut digits = Vec::new();
        let mut v = self.clone();
        if v.is_zero() {
            return write!(f, "0");
        }
        while !v.is_zero() {
            digits.push(char::from(b'0' + v.divmod(10) as u8));
        }
        digits.reverse();
        write!(f, "{}", digits.into_iter().collect::<String>())
    }
}

/// Renders an accumulator in `base`, most significant digit first.
pub fn bignum_to_base(acc: &BigAccumulator, base: usize, a: &Alphabet) -> Result<String> {
    check_base(base, a)?;
    if acc.is_zero() {
        return Ok(a.char_at(0).to_string());
    }
    let mut v = acc.clone();
    let mut digits = Vec::new();
    while !v.is_zero() {
        digits.push(a.char_at(v.divmod(base as u64) as usize));
    }
    digits.reverse();
    Ok(digits.into_iter().collect())
}

/// Parses a digit string into an accumulator.
pub fn bignum_from_base(s: &str, base: usize, a: &Alphabet) -> Result<BigAccumulator> {
    check_base(base, a)?;
    if s.is_empty() {
        return Err(Error::MalformedPayload("empty digit string".into()));
    }
    let mut acc = BigAccumulator::zero();
    for (pos, c) in s.chars().enumerate() {
        let d = a
            .index_of(c)
            .filter(|&d| d < base)
            .ok_or(Error::UnknownCharacter { ch: c, pos })?;
        acc.mul_add(base as u64, d as u64);
    }
    Ok(acc)
}

/// Parses an alphabet file: first line is the digit characters in index
/// order, following lines declare reserved roles as `reserved <role>=<char>`
/// with roles `sentinel`, `rsd`, `fallback`, and `q1`..`qN` (contiguous from
/// `q1`).
pub fn parse_alphabet(text: &str) -> Result<Alphabet> {
    let mut lines = text.lines();
    let chars: Vec<char> = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("alphabet file is empty".into()))?
        .trim_end_matches(['\r'])
        .chars()
        .collect();
    let mut sentinel = None;
    let mut rsd_marker = None;
    let mut fallback = None;
    let mut quotients: Vec<(usize, char)> = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let rest = line.strip_prefix("reserved ").ok_or_else(|| {
            Error::MalformedFile(format!("expected 'reserved <role>=<char>', got '{line}'"))
        })?;
        let (role, value) = rest.split_once('=').ok_or_else(|| {
            Error::MalformedFile(format!("expected '<role>=<char>' in '{line}'"))
        })?;
        let mut vc = value.chars();
        let c = vc.next().ok_or_else(|| {
            Error::MalformedFile(format!("missing character for role '{role}'"))
        })?;
        if vc.next().is_some() {
            return Err(Error::MalformedFile(format!(
                "role '{role}' must name a single character"
            )));
        }
        match role {
            "sentinel" => sentinel = Some(c),
            "rsd" => rsd_marker = Some(c),
            "fallback" => fallback = Some(c),
            q => {
                let n: usize = q
                    .strip_prefix('q')
                    .and_then(|n| n.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::MalformedFile(format!("unknown role '{role}'")))?;
                quotients.push((n, c));
            }
        }
    }
    quotients.sort_by_key(|&(n, _)| n);
    for (i, &(n, _)) in quotients.iter().enumerate() {
        if n != i + 1 {
            return Err(Error::MalformedFile(
                "quotient roles must be contiguous from q1".into(),
            ));
        }
    }
    Alphabet::new(
        chars,
        sentinel.ok_or_else(|| Error::MalformedFile("missing 'reserved sentinel='".into()))?,
        rsd_marker.ok_or_else(|| Error::MalformedFile("missing 'reserved rsd='".into()))?,
        fallback.ok_or_else(|| Error::MalformedFile("missing 'reserved fallback='".into()))?,
        quotients.into_iter().map(|(_, c)| c).collect(),
    )
}

/// Serializes an alphabet in the format accepted by [`parse_alphabet`].
pub fn serialize_alphabet(a: &Alphabet) -> String {
    let mut out: String = a.chars.iter().collect();
    out.push('\n');
    out.push_str(&format!("reserved sentinel={}\n", a.sentinel));
    out.push_str(&format!("reserved rsd={}\n", a.rsd_marker));
    out.push_str(&format!("reserved fallback={}\n", a.fallback));
    for (i, q) in a.quotients.iter().enumerate() {
        out.push_str(&format!("reserved q{}={}\n", i + 1, q));
    }
    out
}
