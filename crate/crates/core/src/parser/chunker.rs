//! Regular-expression chunking over tag sequences.
//!
//! A pattern such as `<JJ.?>*<IN>*<CD.?>` is compiled to a byte regex over
//! the string `<TAG><TAG>...`; `.` inside angle brackets matches one tag
//! character.

use std::fmt;
use std::ops::Range;

use regex::Regex;

use super::tagger::{Span, TaggedToken};
use super::ParseError;

/// Default pattern for measurement phrases.
pub const QUANTITATIVE_PATTERN: &str =
    "<JJ.?>*<IN>*<CD.?><CD.?>*<CC.?>*<CD.?>*<NN.?>*<RB.?>*<JJ.?>*<IN>*<NN.?>*<JJ.?>*<NN.?>?";

/// Pattern for descriptor phrases outside measurement chunks.
pub const QUALITATIVE_PATTERN: &str = "<RB.?>*<JJ.?>*<IN>*<NN.?>*<JJ.?>*<NN.?>?";

#[derive(Debug, Clone)]
pub struct ChunkPattern {
    source: String,
    regex: Regex,
}

impl ChunkPattern {
    pub fn new(pattern: &str) -> Result<Self, ParseError> {
        let mut out = String::new();
        let mut chars = pattern
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .chars();
        while let Some(c) = chars.next() {
            match c {
                '<' => {
                    let mut body = String::new();
                    loop {
                        match chars.next() {
                            Some('>') => break,
                            Some('.') => body.push_str("[^<>]"),
                            Some(ch) if ch.is_ascii_alphanumeric() || "|?*+$,".contains(ch) => {
                                if ch == '$' || ch == ',' {
                                    body.push('\\');
                                }
                                body.push(ch)
                            }
                            Some(ch) => {
                                return Err(ParseError::Pattern(format!(
                                    "unexpected '{ch}' inside tag in '{pattern}'"
                                )))
                            }
                            None => {
                                return Err(ParseError::Pattern(format!(
                                    "unclosed '<' in '{pattern}'"
                                )))
                            }
                        }
                    }
                    if body.is_empty() {
                        return Err(ParseError::Pattern(format!("empty tag in '{pattern}'")));
                    }
                    out.push_str(&format!("(?:<(?:{body})>)"));
                }
                '*' | '+' | '?' | '(' | ')' | '|' => out.push(c),
                c if c.is_whitespace() => {}
                other => {
                    return Err(ParseError::Pattern(format!(
                        "unexpected '{other}' in '{pattern}'"
                    )))
                }
            }
        }
        let regex = Regex::new(&out).map_err(|e| ParseError::Pattern(format!("{pattern}: {e}")))?;
        Ok(ChunkPattern {
            source: pattern.to_string(),
            regex,
        })
    }

    pub fn quantitative() -> Self {
        ChunkPattern::new(QUANTITATIVE_PATTERN).expect("default pattern compiles")
    }

    pub fn qualitative() -> Self {
        ChunkPattern::new(QUALITATIVE_PATTERN).expect("default pattern compiles")
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    /// Non-empty, non-overlapping matches as token ranges.
    pub fn find(&self, tokens: &[TaggedToken]) -> Vec<Range<usize>> {
        let mut text = String::new();
        let mut starts = Vec::with_capacity(tokens.len() + 1);
        for t in tokens {
            starts.push(text.len());
            text.push('<');
            text.push_str(t.tag.as_str());
            text.push('>');
        }
        starts.push(text.len());
        self.regex
            .find_iter(&text)
            .filter(|m| !m.is_empty())
            .filter_map(|m| {
                // a match could in principle start or end mid-tag; keep
                // only ones aligned to token boundaries
                let s = starts.binary_search(&m.start()).ok()?;
                let e = starts.binary_search(&m.end()).ok()?;
                Some(s..e)
            })
            .collect()
    }
}

impl fmt::Display for ChunkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkKind {
    Quantitative,
    Qualitative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub kind: ChunkKind,
    /// Position of the chunk in the token sequence it came from.
    pub range: Range<usize>,
    pub tokens: Vec<TaggedToken>,
}

impl Chunk {
    pub fn span(&self) -> Span {
        let first = self
            .tokens
            .first()
            .map(|t| t.span)
            .unwrap_or(Span { start: 0, end: 0 });
        self.tokens.iter().fold(first, |acc, t| acc.cover(t.span))
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        let s = self.span();
        &source[s.start..s.end]
    }
}

/// Runs `quantitative`, then `qualitative` over the tokens it left
/// uncovered. Chunks are returned in token order.
pub fn chunk(
    tokens: &[TaggedToken],
    quantitative: &ChunkPattern,
    qualitative: &ChunkPattern,
) -> Vec<Chunk> {
    let make = |kind, range: Range<usize>| Chunk {
        kind,
        tokens: tokens[range.clone()].to_vec(),
        range,
    };
    let mut chunks: Vec<Chunk> = quantitative
        .find(tokens)
        .into_iter()
        .map(|r| make(ChunkKind::Quantitative, r))
        .collect();
    let mut gaps = Vec::new();
    let mut cursor = 0;
    for c in &chunks {
        gaps.push(cursor..c.range.start);
        cursor = c.range.end;
    }
    gaps.push(cursor..tokens.len());
    for gap in gaps.into_iter().filter(|g| !g.is_empty()) {
        for r in qualitative.find(&tokens[gap.clone()]) {
            chunks.push(make(
                ChunkKind::Qualitative,
                gap.start + r.start..gap.start + r.end,
            ));
        }
    }
    chunks.sort_by_key(|c| c.range.start);
    chunks
}

#[cfg(test)]
mod tests {
    use super::super::tagger::tokenize_and_tag;
    use super::*;

    fn chunk_texts(text: &str) -> Vec<(ChunkKind, String)> {
        let tokens = tokenize_and_tag(text).unwrap();
        chunk(
            &tokens,
            &ChunkPattern::quantitative(),
            &ChunkPattern::qualitative(),
        )
        .into_iter()
        .map(|c| (c.kind, c.text(text).to_string()))
        .collect()
    }

    #[test]
    fn measurement_phrase_is_one_chunk() {
        let chunks = chunk_texts("it is about ten centimeters long");
        assert_eq!(
            chunks,
            vec![(
                ChunkKind::Quantitative,
                "about ten centimeters long".to_string()
            )]
        );
    }

    #[test]
    fn three_part_list_splits_after_one_conjunction() {
        // the measurement pattern allows one run of conjunctions
        let chunks = chunk_texts("Product Dimensions: 21.5 x 7.2 x 7.2 cm");
        let quantitative: Vec<&str> = chunks
            .iter()
            .filter(|(k, _)| *k == ChunkKind::Quantitative)
            .map(|(_, t)| t.as_str())
            .collect();
        assert_eq!(quantitative, vec!["21.5 x 7.2", "7.2 cm"]);
    }

    #[test]
    fn qualitative_gap_is_chunked() {
        let chunks = chunk_texts("It weighs 116 grams. It is made of plastic");
        assert_eq!(
            chunks,
            vec![
                (ChunkKind::Quantitative, "116 grams".to_string()),
                (ChunkKind::Qualitative, "made of plastic".to_string()),
            ]
        );
    }

    #[test]
    fn custom_patterns_compile_or_fail_cleanly() {
        assert!(ChunkPattern::new("{<CD><NN.?>}").is_ok());
        assert!(ChunkPattern::new("<CD").is_err());
        assert!(ChunkPattern::new("<>").is_err());
        assert!(ChunkPattern::new("<C D>").is_err());
        let p = ChunkPattern::new("<CD><NN>").unwrap();
        let toks = tokenize_and_tag("5 cm").unwrap();
        assert_eq!(p.find(&toks), vec![0..2]);
    }
}
