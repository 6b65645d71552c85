//! Message framing: embedding compressed polygons in free text behind a
//! sentinel character, SMS style.
//!
//! Literal sentinels in text are doubled.  A frame is the sentinel, one kind
//! letter, the fragment body, and a closing sentinel.  Three kind letters
//! fold the most common first payload characters of the adaptive polygon
//! codec into the frame itself (overhead 2); everything else rides behind a
//! kind letter plus a codec tag (overhead 4).

use crate::alphabet::Alphabet;
use crate::codecs::{CodecKind, Encoded};
use crate::error::Error;
use crate::transforms::TransformKind;
use crate::Result;

/// Character budget of one message.
pub const MESSAGE_BUDGET: usize = 90;

/// One piece of a message: literal text or an embedded compressed polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessagePart {
    Text(String),
    Polygon(Encoded),
}

/// Codec tags used after the plain frame kind, one letter per codec and
/// transform combination.
const TAGS: [(char, CodecKind, TransformKind); 23] = [
    ('a', CodecKind::Comma, TransformKind::DeltaMin),
    ('b', CodecKind::Comma, TransformKind::DeltaConsec),
    ('c', CodecKind::Fixed, TransformKind::DeltaMin),
    ('d', CodecKind::Fixed, TransformKind::DeltaConsec),
    ('e', CodecKind::CommaB, TransformKind::DeltaMin),
    ('f', CodecKind::CommaB, TransformKind::DeltaConsec),
    ('g', CodecKind::FixedB, TransformKind::DeltaMin),
    ('h', CodecKind::FixedB, TransformKind::DeltaConsec),
    ('i', CodecKind::Var, TransformKind::DeltaMin),
    ('j', CodecKind::Var, TransformKind::DeltaConsec),
    ('k', CodecKind::VarRsd, TransformKind::DeltaMin),
    ('l', CodecKind::VarRsd, TransformKind::DeltaConsec),
    ('m', CodecKind::Big, TransformKind::DeltaMin),
    ('n', CodecKind::Big, TransformKind::DeltaConsec),
    ('o', CodecKind::Poly, TransformKind::DeltaConsec),
    ('p', CodecKind::Ae, TransformKind::DeltaMin),
    ('q', CodecKind::Ae, TransformKind::DeltaConsec),
    ('r', CodecKind::Golomb, TransformKind::DeltaMin),
    ('s', CodecKind::Golomb, TransformKind::DeltaConsec),
    ('t', CodecKind::Huffman, TransformKind::DeltaMin),
    ('u', CodecKind::Huffman, TransformKind::DeltaConsec),
    ('v', CodecKind::Lzw, TransformKind::DeltaMin),
    ('w', CodecKind::Lzw, TransformKind::DeltaConsec),
];

/// The tag letter for a codec and transform.
pub fn codec_tag(codec: CodecKind, transform: TransformKind) -> Result<char> {
    TAGS.iter()
        .find(|&&(_, c, t)| c == codec && t == transform)
        .map(|&(tag, _, _)| tag)
        .ok_or_else(|| {
            Error::InvalidParams(format!(
                "no frame tag for codec {} with the {} transform",
                codec.cli_token(),
                transform.token()
            ))
        })
}

/// The codec and transform named by a tag letter.
pub fn tag_codec(tag: char) -> Result<(CodecKind, TransformKind)> {
    TAGS.iter()
        .find(|&&(t, _, _)| t == tag)
        .map(|&(_, c, t)| (c, t))
        .ok_or_else(|| Error::MalformedPayload(format!("unknown codec tag '{tag}'")))
}

/// Doubles every literal sentinel.
pub fn escape_text(text: &str, a: &Alphabet) -> String {
    let s = a.sentinel();
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        out.push(c);
        if c == s {
            out.push(s);
        }
    }
    out
}

/// Frames one compressed polygon.  Adaptive payloads whose first character
/// is one of the three most common get a dedicated frame kind that absorbs
/// that character.
pub fn frame_fragment(enc: &Encoded, a: &Alphabet) -> Result<String> {
    let s = a.sentinel();
    if enc.codec == CodecKind::Poly {
        let mut chars = enc.payload.chars();
        let first = chars
            .next()
            .ok_or_else(|| Error::MalformedPayload("empty payload".into()))?;
        let rest = chars.as_str();
        for (kind, idx) in [('q', 0), ('r', 1), ('s', 2)] {
            if first == a.char_at(idx) {
                return Ok(format!("{s}{kind}{rest}{s}"));
            }
        }
    }
    let tag = codec_tag(enc.codec, enc.transform)?;
    Ok(format!("{s}p{tag}{}{s}", enc.payload))
}

/// Frame size minus payload size.
pub fn framed_overhead(enc: &Encoded, a: &Alphabet) -> Result<usize> {
    Ok(frame_fragment(enc, a)?.chars().count() - enc.payload.chars().count())
}

fn unframe_fragment(kind: char, inner: &str, a: &Alphabet) -> Result<Encoded> {
    let poly_with = |idx: usize| Encoded {
        codec: CodecKind::Poly,
        transform: TransformKind::DeltaConsec,
        payload: format!("{}{inner}", a.char_at(idx)),
    };
    match kind {
        'q' => Ok(poly_with(0)),
        'r' => Ok(poly_with(1)),
        's' => Ok(poly_with(2)),
        'p' => {
            let mut chars = inner.chars();
            let tag = chars
                .next()
                .ok_or_else(|| Error::MalformedPayload("frame has no codec tag".into()))?;
            let (codec, transform) = tag_codec(tag)?;
            Ok(Encoded {
                codec,
                transform,
                payload: chars.as_str().to_string(),
            })
        }
        other => Err(Error::UnknownSentinel(other)),
    }
}

/// Renders message parts: text escaped, polygons framed.
pub fn frame_message(parts: &[MessagePart], a: &Alphabet) -> Result<String> {
    let mut out = String::new();
    for part in parts {
        match part {
            MessagePart::Text(t) => out.push_str(&escape_text(t, a)),
            MessagePart::Polygon(enc) => out.push_str(&frame_fragment(enc, a)?),
        }
    }
    Ok(out)
}

/// Inverse of [`frame_message`].  Text parts come back merged and non-empty,
/// so the round trip is exact for part lists already in that shape.
pub fn unframe_message(msg: &str, a: &Alphabet) -> Result<Vec<MessagePart>> {
    let s = a.sentinel();
    let mut parts = Vec::new();
    let mut text = String::new();
    let mut it = msg.chars();
    while let Some(c) = it.next() {
        if c != s {
            text.push(c);
            continue;
        }
        let Some(kind) = it.next() else {
            return Err(Error::UnterminatedFrame);
        };
        if kind == s {
            text.push(s);
            continue;
        }
        if !matches!(kind, 'p' | 'q' | 'r' | 's') {
            return Err(Error::UnknownSentinel(kind));
        }
        if !text.is_empty() {
            parts.push(MessagePart::Text(std::mem::take(&mut text)));
        }
        let mut inner = String::new();
        let mut closed = false;
        for c in it.by_ref() {
            if c == s {
                closed = true;
                break;
            }
            inner.push(c);
        }
        if !closed {
            return Err(Error::UnterminatedFrame);
        }
        parts.push(MessagePart::Polygon(unframe_fragment(kind, &inner, a)?));
    }
    if !text.is_empty() {
        parts.push(MessagePart::Text(text));
    }
    Ok(parts)
}

/// Whether a rendered message fits the budget.
pub fn fits_budget(msg: &str) -> bool {
    msg.chars().count() <= MESSAGE_BUDGET
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use proptest::prelude::*;

    fn a() -> &'static Alphabet {
        Alphabet::canonical()
    }

    fn enc(codec: CodecKind, transform: TransformKind, payload: &str) -> Encoded {
        Encoded {
            codec,
            transform,
            payload: payload.into(),
        }
    }

    #[test]
    fn tag_table_is_a_bijection() {
        let mut seen = std::collections::BTreeSet::new();
        for &(tag, codec, transform) in &TAGS {
            assert!(seen.insert(tag));
            assert_eq!(codec_tag(codec, transform).unwrap(), tag);
            assert_eq!(tag_codec(tag).unwrap(), (codec, transform));
        }
        assert_eq!(seen.len(), 23);
        assert_eq!(*seen.first().unwrap(), 'a');
        assert_eq!(*seen.last().unwrap(), 'w');
        assert!(codec_tag(CodecKind::Poly, TransformKind::DeltaMin).is_err());
        assert!(tag_codec('z').is_err());
    }

    #[test]
    fn plain_fragment_framing() {
        let e = enc(CodecKind::Var, TransformKind::DeltaMin, "Mro4aOS00I4U");
        assert_eq!(frame_fragment(&e, a()).unwrap(), "#piMro4aOS00I4U#");
        assert_eq!(framed_overhead(&e, a()).unwrap(), 4);
    }

    #[test]
    fn adaptive_fragments_fold_common_first_chars() {
        let cases = [
            ("0OXqu@1@7@6O", "#qOXqu@1@7@6O#", 2),
            ("1abc", "#rabc#", 2),
            ("2abc", "#sabc#", 2),
            ("3abc", "#po3abc#", 4),
        ];
        for (payload, framed, overhead) in cases {
            let e = enc(CodecKind::Poly, TransformKind::DeltaConsec, payload);
            assert_eq!(frame_fragment(&e, a()).unwrap(), framed);
            assert_eq!(framed_overhead(&e, a()).unwrap(), overhead);
            let parts = unframe_message(framed, a()).unwrap();
            assert_eq!(parts, vec![MessagePart::Polygon(e)]);
        }
    }

    #[test]
    fn non_adaptive_codecs_never_use_short_frames() {
        // A big payload may also start with the scale character '1'.
        let e = enc(CodecKind::Big, TransformKind::DeltaConsec, "1abc");
        assert_eq!(frame_fragment(&e, a()).unwrap(), "#pn1abc#");
    }

    #[test]
    fn text_escaping_doubles_sentinels() {
        assert_eq!(escape_text("call #7 now", a()), "call ##7 now");
        assert_eq!(escape_text("##", a()), "####");
        assert_eq!(escape_text("plain", a()), "plain");
    }

    #[test]
    fn message_round_trip() {
        let parts = vec![
            MessagePart::Text("flood zone #3 near ".into()),
            MessagePart::Polygon(enc(
                CodecKind::Poly,
                TransformKind::DeltaConsec,
                "0OXqu@1@7@6O",
            )),
            MessagePart::Text(" avoid".into()),
        ];
        let msg = frame_message(&parts, a()).unwrap();
        assert_eq!(msg, "flood zone ##3 near #qOXqu@1@7@6O# avoid");
        assert_eq!(unframe_message(&msg, a()).unwrap(), parts);
        assert!(fits_budget(&msg));
    }

    #[test]
    fn adjacent_polygons_round_trip() {
        let parts = vec![
            MessagePart::Polygon(enc(CodecKind::Var, TransformKind::DeltaMin, "Mro4aOS00I4U")),
            MessagePart::Polygon(enc(CodecKind::Big, TransformKind::DeltaConsec, "DY4b")),
        ];
        let msg = frame_message(&parts, a()).unwrap();
        assert_eq!(msg, "#piMro4aOS00I4U##pnDY4b#");
        assert_eq!(unframe_message(&msg, a()).unwrap(), parts);
    }

    #[test]
    fn empty_payload_rejected() {
        let e = enc(CodecKind::Poly, TransformKind::DeltaConsec, "");
        assert!(matches!(
            frame_fragment(&e, a()),
            Err(Error::MalformedPayload(_))
        ));
    }

    #[test]
    fn unframe_rejects_malformed_messages() {
        assert_eq!(unframe_message("text #", a()), Err(Error::UnterminatedFrame));
        assert_eq!(
            unframe_message("#qabc", a()),
            Err(Error::UnterminatedFrame)
        );
        assert_eq!(
            unframe_message("text #x0 rest#", a()),
            Err(Error::UnknownSentinel('x'))
        );
        assert!(matches!(
            unframe_message("#p#", a()),
            Err(Error::MalformedPayload(_))
        ));
        assert!(matches!(
            unframe_message("#pz00#", a()),
            Err(Error::MalformedPayload(_))
        ));
    }

    #[test]
    fn budget_boundary() {
        assert!(fits_budget(&"x".repeat(90)));
        assert!(!fits_budget(&"x".repeat(91)));
    }

    fn arb_fragment() -> impl Strategy<Value = Encoded> {
        ((0usize..TAGS.len()), "[0-9A-Za-z]{1,20}").prop_map(|(i, payload)| {
            let (_, codec, transform) = TAGS[i];
            Encoded {
                codec,
                transform,
                payload,
            }
        })
    }

    proptest! {
        #[test]
        fn fragments_round_trip_with_bounded_overhead(e in arb_fragment()) {
            let framed = frame_fragment(&e, a()).unwrap();
            let overhead = framed.chars().count() - e.payload.chars().count();
            prop_assert!(overhead == 2 || overhead == 4);
            let parts = unframe_message(&framed, a()).unwrap();
            prop_assert_eq!(parts, vec![MessagePart::Polygon(e)]);
        }

        #[test]
        fn messages_round_trip(
            pairs in proptest::collection::vec(("[ -~]{1,12}", arb_fragment()), 1..5),
            tail in "[ -~]{0,8}",
        ) {
            let mut parts = Vec::new();
            for (text, e) in pairs {
                parts.push(MessagePart::Text(text));
                parts.push(MessagePart::Polygon(e));
            }
            if !tail.is_empty() {
                parts.push(MessagePart::Text(tail));
            }
            let msg = frame_message(&parts, a()).unwrap();
            prop_assert_eq!(unframe_message(&msg, a()).unwrap(), parts);
        }
    }
}
