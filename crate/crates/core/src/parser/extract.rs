//! Field extraction from chunks, and the inverse canonical rendering.

use std::collections::BTreeMap;

use crate::knowledge_base::{Attribute, FeatureQuery};

use super::chunker::Chunk;
use super::lexicon::{Descriptor, Lexicon, Quantity, Unit};
use super::numbers;
use super::tagger::{Span, Tag, TaggedToken};
use super::{ParseResult, Provenance};

/// Adjectives that name a measured extent rather than a shape when they
/// directly follow a unit.
const DIMENSION_ADJECTIVES: &[&str] = &["long", "wide", "thick", "tall", "high", "deep"];
const DOUBLING_NOUNS: &[&str] = &["radius"];
/// A measurement next to one of these describes a round cross-section, so
/// it fills two extents.
const ROUND_WORDS: &[&str] = &["diameter", "across", "radius", "round"];

#[derive(Debug, Clone)]
struct Measurement {
    value: f64,
    unit: Option<Unit>,
    doubled: bool,
    /// How many extents the value stands for.
    extents: usize,
    sentence: usize,
    span: Span,
    evidence: String,
}

fn is_cd(t: &TaggedToken) -> bool {
    t.tag == Tag::CD
}

fn is_word_number(t: &TaggedToken) -> bool {
    is_cd(t) && !numbers::is_digits(&t.lemma)
}

/// Token ranges of number phrases inside one chunk.
fn number_groups(tokens: &[TaggedToken]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !is_cd(&tokens[i]) {
            i += 1;
            continue;
        }
        let start = i;
        let mut j = i + 1;
        loop {
            if j < tokens.len() && is_word_number(&tokens[j]) && is_word_number(&tokens[j - 1]) {
                j += 1;
                continue;
            }
            let joins = j + 1 < tokens.len()
                && tokens[j].lemma == "and"
                && is_cd(&tokens[j + 1])
                && (numbers::is_fraction_word(&tokens[j + 1].lemma)
                    || tokens[start..j]
                        .iter()
                        .any(|t| t.lemma == "hundred" || t.lemma == "thousand"));
            if joins {
                j += 2;
                // "three quarters" after "and"
                while j < tokens.len()
                    && is_word_number(&tokens[j])
                    && is_word_number(&tokens[j - 1])
                {
                    j += 1;
                }
                continue;
            }
            break;
        }
        groups.push((start, j));
        i = j;
    }
    groups
}

fn surfaces(tokens: &[TaggedToken]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn span_of(tokens: &[TaggedToken]) -> Span {
    tokens
        .iter()
        .skip(1)
        .fold(tokens[0].span, |acc, t| acc.cover(t.span))
}

fn measurements(chunk: &Chunk, lexicon: &Lexicon, preceding: &[TaggedToken]) -> Vec<Measurement> {
    let tokens = &chunk.tokens;
    let groups = number_groups(tokens);
    let mut out = Vec::new();
    for (g, &(start, end)) in groups.iter().enumerate() {
        let lemmas: Vec<&str> = tokens[start..end]
            .iter()
            .map(|t| t.lemma.as_str())
            .collect();
        let Some(value) = numbers::parse_number(&lemmas) else {
            continue;
        };
        // first token after the group that is neither a number nor a
        // conjunction decides the unit
        let mut unit = None;
        let mut last = end;
        if let Some(k) = (end..tokens.len()).find(|&k| !matches!(tokens[k].tag, Tag::CD | Tag::CC))
        {
            if let Some(u) = lexicon.unit(&tokens[k].lemma) {
                unit = Some(u);
                if k == end {
                    last = k + 1;
                }
            }
        }
        let segment_end = groups.get(g + 1).map_or(tokens.len(), |next| next.0);
        let doubled = tokens[end..segment_end]
            .iter()
            .any(|t| DOUBLING_NOUNS.contains(&t.lemma.as_str()))
            || (g == 0
                && preceding
                    .iter()
                    .any(|t| DOUBLING_NOUNS.contains(&t.lemma.as_str())));
        let segment = &tokens[end..segment_end];
        let round = segment
            .iter()
            .any(|t| ROUND_WORDS.contains(&t.lemma.as_str()))
            || (g == 0
                && preceding
                    .iter()
                    .any(|t| ROUND_WORDS.contains(&t.lemma.as_str())));
        let every_side = segment.windows(2).any(|w| {
            matches!(w[0].lemma.as_str(), "each" | "every" | "all") && w[1].lemma == "side"
        });
        let extents = if every_side {
            3
        } else if round {
            2
        } else {
            1
        };
        out.push(Measurement {
            value,
            unit,
            doubled,
            extents,
            sentence: tokens[start].sentence,
            span: span_of(&tokens[start..last]),
            evidence: surfaces(&tokens[start..last]),
        });
    }
    out
}

/// Scales to base units, trimming binary noise such as `24 * 0.1 =
/// 2.4000000000000004` to twelve significant digits.
fn convert(value: f64, factor: f64) -> f64 {
    if factor == 1.0 {
        return value;
    }
    format!("{:.11e}", value * factor)
        .parse()
        .unwrap_or(value * factor)
}

fn format_value(attr: Attribute, value: &str) -> String {
    format!("{}={value}", attr.name())
}

/// Turns chunks into a partial query with provenance and warnings.
///
/// `all_tokens` is the full tagged sequence the chunks were cut from; it is
/// used to look just before a chunk for words such as "radius".
pub fn extract_fields(
    chunks: &[Chunk],
    all_tokens: &[TaggedToken],
    lexicon: &Lexicon,
) -> ParseResult {
    let mut warnings = Vec::new();
    let mut provenance = BTreeMap::new();

    let mut found: Vec<Measurement> = Vec::new();
    for chunk in chunks {
        let before = &all_tokens[chunk.range.start.saturating_sub(2)..chunk.range.start];
        found.extend(measurements(chunk, lexicon, before));
    }
    // unitless numbers borrow the next unit in the same sentence
    for i in 0..found.len() {
        if found[i].unit.is_none() {
            found[i].unit = found[i + 1..]
                .iter()
                .take_while(|m| m.sentence == found[i].sentence)
                .find_map(|m| m.unit);
        }
    }

    let mut lengths: Vec<(f64, Span, String)> = Vec::new();
    let mut repeats: Vec<(usize, usize)> = Vec::new();
    let mut mass: Option<(f64, Span, String)> = None;
    for m in found {
        let Some(unit) = m.unit else {
            warnings.push(format!("ignored number without unit: '{}'", m.evidence));
            continue;
        };
        let factor = if m.doubled { 2.0 } else { 1.0 };
        let value = convert(m.value, unit.factor * factor);
        if !(value > 0.0 && value.is_finite()) {
            warnings.push(format!("ignored non-positive measurement '{}'", m.evidence));
            continue;
        }
        match unit.quantity {
            Quantity::Length => {
                if m.extents > 1 {
                    repeats.push((lengths.len(), m.extents - 1));
                }
                lengths.push((value, m.span, m.evidence))
            }
            Quantity::Mass => match &mass {
                None => mass = Some((value, m.span, m.evidence)),
                Some((kept, _, _)) if *kept == value => {}
                Some((kept, _, _)) => {
                    warnings.push(format!("conflicting mass {value} g ignored, kept {kept} g"))
                }
            },
        }
    }
    // a diameter or per-side value also fills extents nobody mentioned
    let mut free = 3usize.saturating_sub(lengths.len());
    for (index, extra) in repeats {
        for _ in 0..extra.min(free) {
            lengths.push(lengths[index].clone());
            free -= 1;
        }
    }
    if lengths.len() > 3 {
        warnings.push(format!(
            "{} dimensions mentioned, kept the first three",
            lengths.len()
        ));
        lengths.truncate(3);
    }
    lengths.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut query = FeatureQuery::empty()
        .with_dimension_list(&lengths.iter().map(|l| l.0).collect::<Vec<_>>())
        .expect("at most three positive lengths");
    for ((_, span, evidence), attr) in lengths.into_iter().zip(Attribute::DIMENSIONS) {
        provenance.insert(attr, Provenance { span, evidence });
    }
    if let Some((value, span, evidence)) = mass {
        query = query.with_mass(Some(value)).expect("positive mass");
        provenance.insert(Attribute::Mass, Provenance { span, evidence });
    }

    let mut descriptors: BTreeMap<Attribute, Descriptor> = BTreeMap::new();
    for chunk in chunks {
        let tokens = &chunk.tokens;
        let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
        let mut i = 0;
        while i < tokens.len() {
            let after_unit = i > 0 && lexicon.unit(&tokens[i - 1].lemma).is_some();
            if after_unit && DIMENSION_ADJECTIVES.contains(&lemmas[i]) {
                i += 1;
                continue;
            }
            let Some((descriptor, len)) = lexicon.match_keyword(&lemmas[i..]) else {
                i += 1;
                continue;
            };
            let attr = descriptor.attribute();
            match descriptors.get(&attr) {
                None => {
                    descriptors.insert(attr, descriptor);
                    provenance.insert(
                        attr,
                        Provenance {
                            span: span_of(&tokens[i..i + len]),
                            evidence: surfaces(&tokens[i..i + len]),
                        },
                    );
                }
                Some(kept) if *kept == descriptor => {}
                Some(kept) => warnings.push(format!(
                    "conflicting {} ignored, kept {}",
                    format_value(attr, descriptor.value_str()),
                    format_value(attr, kept.value_str())
                )),
            }
            i += len;
        }
    }
    for d in descriptors.into_values() {
        query = match d {
            Descriptor::Shape(v) => query.with_shape(Some(v)),
            Descriptor::Rigidity(v) => query.with_rigidity(Some(v)),
            Descriptor::Texture(v) => query.with_texture(Some(v)),
            Descriptor::Fragility(v) => query.with_fragility(Some(v)),
            Descriptor::Material(v) => query.with_material(Some(v)),
        };
    }

    ParseResult {
        query,
        provenance,
        imputed: Vec::new(),
        warnings,
    }
}

/// Canonical English description of a query. Parsing the output gives the
/// same query back.
pub fn render(query: &FeatureQuery) -> String {
    let mut sentences = Vec::new();
    let dims: Vec<String> = query
        .dims()
        .iter()
        .zip(["long", "wide", "thick"])
        .filter_map(|(d, adj)| d.map(|v| format!("{v} centimeters {adj}")))
        .collect();
    if !dims.is_empty() {
        sentences.push(dims.join(", "));
    }
    if let Some(m) = query.mass() {
        sentences.push(format!("It weighs {m} grams"));
    }
    if let Some(mt) = query.material() {
        let name = match mt {
            crate::knowledge_base::Material::Other => "other material".to_string(),
            other => other.to_string(),
        };
        sentences.push(format!("It is made of {name}"));
    }
    let mut traits = Vec::new();
    if let Some(s) = query.shape() {
        traits.push(format!("{s} shape"));
    }
    if let Some(t) = query.texture() {
        traits.push(format!("{t} texture"));
    }
    if let Some(f) = query.fragility() {
        traits.push(format!("{f} fragility"));
    }
    if let Some(r) = query.rigidity() {
        traits.push(format!("{r} stiffness"));
    }
    if !traits.is_empty() {
        let list = match traits.split_last() {
            Some((last, head)) if !head.is_empty() => format!("{} and {last}", head.join(", ")),
            _ => traits[0].clone(),
        };
        sentences.push(format!("It has {list}"));
    }
    let mut out = sentences.join(". ");
    if !out.is_empty() {
        out.push('.');
    }
    out
}
