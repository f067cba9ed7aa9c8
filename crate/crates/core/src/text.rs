//! Text preprocessing: sentence segmentation, tokenization and sliding windows.
//!
//! Everything here is deterministic and allocation-light. A [`Document`]
//! keeps byte offsets into the original text so that every downstream
//! result (window spans, highlight spans, revision sites) can be mapped
//! back to what the student actually typed.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Abbreviations that end in a period but do not end a sentence.
/// Compared case-insensitively against the whitespace-delimited word.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "vs.", "etc.", "e.g.",
    "i.e.", "u.s.", "u.k.", "u.n.", "a.m.", "p.m.", "no.", "approx.", "dept.", "gov.", "inc.",
    "co.", "ltd.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.",
    "oct.", "nov.", "dec.",
];

/// Characters allowed to trail a terminal punctuation mark before the break,
/// e.g. the closing quote in `the author said, "yes."`.
fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '\u{2026}')
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("window size must be at least 1, got {0}")]
    WindowSize(usize),
    #[error("window stride must be at least 1, got {0}")]
    Stride(usize),
}

/// Byte range into the raw text, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// NFC, lower-cased, leading/trailing punctuation stripped.
    pub normalized: String,
    pub span: Span,
    pub sentence_index: usize,
}

impl Token {
    /// Pure-punctuation tokens normalize to the empty string and never
    /// take part in windows or matching.
    pub fn is_content(&self) -> bool {
        !self.normalized.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub span: Span,
    /// Whitespace between this sentence and the next one (or end of text).
    pub trailing: String,
    /// Range into [`Document::tokens`].
    pub token_range: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub raw_text: String,
    /// Whitespace before the first sentence.
    pub leading: String,
    pub sentences: Vec<Sentence>,
    pub tokens: Vec<Token>,
}

/// A contiguous run of content tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window<'a> {
    pub tokens: Vec<&'a Token>,
    /// Index of the first token in the document's content-token stream.
    pub start_token_index: usize,
}

impl Window<'_> {
    /// Byte span from the first token's start to the last token's end.
    pub fn span(&self) -> Span {
        match (self.tokens.first(), self.tokens.last()) {
            (Some(first), Some(last)) => Span::new(first.span.start, last.span.end),
            _ => Span::new(0, 0),
        }
    }
}

/// Normalize a single word the way tokens are normalized: NFC, lower case,
/// leading and trailing punctuation stripped. Internal hyphens, apostrophes
/// and digit separators are kept.
pub fn normalize_word(word: &str) -> String {
    let nfc: String = word.nfc().collect();
    let trimmed = nfc.trim_matches(|c: char| !c.is_alphanumeric());
    trimmed.chars().flat_map(char::to_lowercase).collect()
}

/// Split raw text into sentences and tokens.
pub fn segment(raw_text: &str) -> Document {
    let spans = sentence_spans(raw_text);
    let leading = match spans.first() {
        Some(first) => raw_text[..first.start].to_string(),
        None => raw_text.to_string(),
    };

    let mut sentences = Vec::with_capacity(spans.len());
    let mut tokens = Vec::new();
    for (idx, span) in spans.iter().enumerate() {
        let next_start = spans.get(idx + 1).map_or(raw_text.len(), |s| s.start);
        let text = &raw_text[span.start..span.end];
        let first_token = tokens.len();
        for (offset, word) in split_words(text) {
            let start = span.start + offset;
            tokens.push(Token {
                surface: word.to_string(),
                normalized: normalize_word(word),
                span: Span::new(start, start + word.len()),
                sentence_index: idx,
            });
        }
        sentences.push(Sentence {
            text: text.to_string(),
            span: *span,
            trailing: raw_text[span.end..next_start].to_string(),
            token_range: (first_token, tokens.len()),
        });
    }

    Document {
        raw_text: raw_text.to_string(),
        leading,
        sentences,
        tokens,
    }
}

fn split_words(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_whitespace().map(move |w| {
        // split_whitespace yields subslices of `text`
        let offset = w.as_ptr() as usize - text.as_ptr() as usize;
        (offset, w)
    })
}

/// Sentence boundaries: terminal punctuation (optionally followed by closing
/// quotes/brackets) then whitespace, or any line break. Spans exclude the
/// surrounding whitespace.
fn sentence_spans(raw: &str) -> Vec<Span> {
    let chars: Vec<(usize, char)> = raw.char_indices().collect();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_non_ws_end = 0usize;
    let mut i = 0;

    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' || c == '\r' {
            if let Some(s) = start.take() {
                spans.push(Span::new(s, last_non_ws_end));
            }
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if start.is_none() {
            start = Some(pos);
        }
        last_non_ws_end = pos + c.len_utf8();

        if is_terminal(c) {
            // absorb runs like "?!" or "...", then closing quotes
            let mut j = i + 1;
            while j < chars.len() && is_terminal(chars[j].1) {
                j += 1;
            }
            while j < chars.len() && is_closer(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(raw.len(), |&(p, _)| p);
            let at_break = j >= chars.len() || chars[j].1.is_whitespace();
            if at_break {
                let s = start.expect("sentence start set above");
                if !ends_with_abbreviation(&raw[s..end]) {
                    spans.push(Span::new(s, end));
                    start = None;
                }
                last_non_ws_end = end;
                i = j;
                continue;
            }
            last_non_ws_end = end;
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(s) = start {
        spans.push(Span::new(s, last_non_ws_end));
    }
    spans
}

fn ends_with_abbreviation(sentence: &str) -> bool {
    let Some(last_word) = sentence.split_whitespace().last() else {
        return false;
    };
    let word = last_word
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

impl Document {
    /// Rebuild the raw text from sentences and separators.
    pub fn reassemble(&self) -> String {
        let mut out = String::with_capacity(self.raw_text.len());
        out.push_str(&self.leading);
        for s in &self.sentences {
            out.push_str(&s.text);
            out.push_str(&s.trailing);
        }
        out
    }

    pub fn content_tokens(&self) -> Vec<&Token> {
        self.tokens.iter().filter(|t| t.is_content()).collect()
    }

    /// Number of content tokens.
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_content()).count()
    }

    pub fn sentence_tokens(&self, index: usize) -> &[Token] {
        let (a, b) = self.sentences[index].token_range;
        &self.tokens[a..b]
    }

    pub fn sentence_texts(&self) -> Vec<&str> {
        self.sentences.iter().map(|s| s.text.as_str()).collect()
    }

    /// Sliding windows over the flattened content-token stream.
    ///
    /// With `T` content tokens this yields `ceil(max(0, T - size) / stride) + 1`
    /// windows, or none when `T == 0`. When the stride does not divide
    /// `T - size`, the final window is anchored at `T - size` so that it stays
    /// full-length and inside the document.
    pub fn windows(&self, size: usize, stride: usize) -> Result<Vec<Window<'_>>, TextError> {
        if size < 1 {
            return Err(TextError::WindowSize(size));
        }
        if stride < 1 {
            return Err(TextError::Stride(stride));
        }
        let content = self.content_tokens();
        Ok(windows_over(&content, size, stride))
    }
}

pub(crate) fn windows_over<'a>(content: &[&'a Token], size: usize, stride: usize) -> Vec<Window<'a>> {
    let total = content.len();
    if total == 0 {
        return Vec::new();
    }
    if total <= size {
        return vec![Window {
            tokens: content.to_vec(),
            start_token_index: 0,
        }];
    }
    let last_start = total - size;
    let count = last_start.div_ceil(stride) + 1;
    (0..count)
        .map(|k| {
            let start = (k * stride).min(last_start);
            Window {
                tokens: content[start..start + size].to_vec(),
                start_token_index: start,
            }
        })
        .collect()
}

/// Convenience wrapper for [`Document::windows`].
pub fn windows(doc: &Document, size: usize, stride: usize) -> Result<Vec<Window<'_>>, TextError> {
    doc.windows(size, stride)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_input() {
        let doc = segment("");
        assert!(doc.sentences.is_empty());
        assert!(doc.tokens.is_empty());
        assert!(doc.windows(8, 1).unwrap().is_empty());
    }

    #[test]
    fn two_sentences() {
        let doc = segment("I agree. She said so!");
        assert_eq!(doc.sentence_texts(), vec!["I agree.", "She said so!"]);
        assert_eq!(doc.sentences[0].trailing, " ");
    }

    #[test]
    fn digit_separators_kept() {
        let doc = segment("Malaria kills 20,000 kids");
        assert_eq!(doc.sentences.len(), 1);
        let norm: Vec<_> = doc.content_tokens().iter().map(|t| t.normalized.as_str()).collect();
        assert_eq!(norm, vec!["malaria", "kills", "20,000", "kids"]);
    }

    #[test]
    fn abbreviations_do_not_split() {
        let doc = segment("Dr. Sachs visited the U.S. embassy. Then she left.");
        assert_eq!(
            doc.sentence_texts(),
            vec!["Dr. Sachs visited the U.S. embassy.", "Then she left."]
        );
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        let doc = segment("The author said, \"water is connected.\" I agree.");
        assert_eq!(
            doc.sentence_texts(),
            vec!["The author said, \"water is connected.\"", "I agree."]
        );
    }

    #[test]
    fn line_breaks_split() {
        let doc = segment("  first line\n\nsecond line  ");
        assert_eq!(doc.sentence_texts(), vec!["first line", "second line"]);
        assert_eq!(doc.leading, "  ");
        assert_eq!(doc.sentences[0].trailing, "\n\n");
        assert_eq!(doc.sentences[1].trailing, "  ");
    }

    #[test]
    fn no_split_inside_numbers() {
        let doc = segment("Each net costs $5.50 today. Wow.");
        assert_eq!(doc.sentence_texts(), vec!["Each net costs $5.50 today.", "Wow."]);
    }

    #[test]
    fn punctuation_only_tokens_are_not_content() {
        let doc = segment("Wait -- what ?");
        let tokens: Vec<_> = doc.tokens.iter().map(|t| (t.surface.as_str(), t.is_content())).collect();
        assert_eq!(
            tokens,
            vec![("Wait", true), ("--", false), ("what", true), ("?", false)]
        );
        assert_eq!(doc.word_count(), 2);
    }

    #[test]
    fn normalization_keeps_internal_marks() {
        assert_eq!(normalize_word("\"Don't"), "don't");
        assert_eq!(normalize_word("well-known,"), "well-known");
        assert_eq!(normalize_word("CAFE\u{301}"), "caf\u{e9}");
        assert_eq!(normalize_word("..."), "");
    }

    fn doc_with_tokens(n: usize) -> Document {
        let text: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        segment(&text.join(" "))
    }

    #[test]
    fn window_counts() {
        assert_eq!(doc_with_tokens(8).windows(8, 1).unwrap().len(), 1);
        let doc = doc_with_tokens(10);
        let w = doc.windows(8, 1).unwrap();
        let starts: Vec<_> = w.iter().map(|w| w.start_token_index).collect();
        assert_eq!(starts, vec![0, 1, 2]);
        assert!(w.iter().all(|w| w.tokens.len() == 8));
        let three = doc_with_tokens(3);
        let short = three.windows(8, 1).unwrap();
        assert_eq!(short.len(), 1);
        assert_eq!(short[0].tokens.len(), 3);
    }

    #[test]
    fn window_rejects_zero_parameters() {
        let doc = doc_with_tokens(3);
        assert_eq!(doc.windows(0, 1).unwrap_err(), TextError::WindowSize(0));
        assert_eq!(doc.windows(8, 0).unwrap_err(), TextError::Stride(0));
    }

    #[test]
    fn window_stride_anchors_last_window() {
        let doc = doc_with_tokens(10);
        let w = doc.windows(8, 3).unwrap();
        let starts: Vec<_> = w.iter().map(|w| w.start_token_index).collect();
        assert_eq!(starts, vec![0, 2]);
    }

    #[test]
    fn windows_cross_sentences() {
        let doc = segment("One two. Three four.");
        let w = doc.windows(3, 1).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].tokens[2].sentence_index, 1);
    }

    proptest! {
        #[test]
        fn round_trip(text in "\\PC*") {
            let doc = segment(&text);
            prop_assert_eq!(doc.reassemble(), text);
        }

        #[test]
        fn round_trip_prose(text in "([A-Za-z]{1,6}[ .!?,\"\n]{0,3}){0,40}") {
            let doc = segment(&text);
            prop_assert_eq!(doc.reassemble(), text.clone());
            let mut last_end = 0;
            for t in &doc.tokens {
                prop_assert!(t.span.start >= last_end);
                prop_assert!(t.span.end > t.span.start);
                prop_assert_eq!(&text[t.span.start..t.span.end], t.surface.as_str());
                last_end = t.span.end;
            }
            prop_assert_eq!(segment(&text), doc);
        }

        #[test]
        fn window_coverage(n in 1usize..60, size in 1usize..12, stride in 1usize..5) {
            let doc = doc_with_tokens(n);
            let w = doc.windows(size, stride).unwrap();
            let expected = if n <= size { 1 } else { (n - size).div_ceil(stride) + 1 };
            prop_assert_eq!(w.len(), expected);
            let mut covered = vec![false; n];
            for win in &w {
                prop_assert!(win.start_token_index + win.tokens.len() <= n);
                for k in 0..win.tokens.len() {
                    covered[win.start_token_index + k] = true;
                }
            }
            if stride <= size {
                prop_assert!(covered.iter().all(|&c| c));
            }
        }
    }
}
