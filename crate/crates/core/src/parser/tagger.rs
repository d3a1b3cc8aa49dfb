//! Tokenization, lemmatization, stop-word removal and a deterministic
//! lexicon + suffix-rule part-of-speech tagger.
//!
//! Tagset (Penn Treebank codes): `CC CD IN JJ JJR JJS NN NNS RB VB VBG`, plus
//! `.` for punctuation. Nouns are tagged on their lemma, so plurals are `NN`
//! too. Unknown words are `NN`.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::numbers;
use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    CC,
    CD,
    IN,
    JJ,
    JJR,
    JJS,
    NN,
    NNS,
    RB,
    VB,
    VBG,
    #[serde(rename = ".")]
    Punct,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::CC => "CC",
            Tag::CD => "CD",
            Tag::IN => "IN",
            Tag::JJ => "JJ",
            Tag::JJR => "JJR",
            Tag::JJS => "JJS",
            Tag::NN => "NN",
            Tag::NNS => "NNS",
            Tag::RB => "RB",
            Tag::VB => "VB",
            Tag::VBG => "VBG",
            Tag::Punct => ".",
        }
    }

    pub fn is_noun(self) -> bool {
        matches!(self, Tag::NN | Tag::NNS)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Byte range into the original description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn cover(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: String,
    pub tag: Tag,
    pub span: Span,
    /// Index of the sentence the token belongs to.
    pub sentence: usize,
}

static TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\d+(?:\.\d+)?|\.\d+|[A-Za-z]+(?:['’][A-Za-z]+)?(?:-[A-Za-z]+)*|[^\sA-Za-z\d]")
        .expect("token regex")
});

const STOP_WORDS: &[&str] = &[
    "a", "an", "the", "it", "its", "is", "are", "was", "were", "be", "been", "being", "this",
    "that", "these", "those", "to", "has", "have", "had", "which", "who", "there", "here", "i",
    "you", "we", "they", "he", "she", "his", "her", "our", "your", "their", "my", "me", "can",
    "will", "would", "should", "could", "may", "might", "do", "does", "did", "so", "as", "at",
    "on", "for", "from", "or", "in", "also", "some", "any", "into", "then", "when", "while", "if",
    "but", "what", "s",
];

const CONJUNCTIONS: &[&str] = &["and", "x", "by", "plus"];
const PREPOSITIONS: &[&str] = &[
    "of", "with", "about", "than", "like", "over", "under", "across", "between", "per", "around",
    "up", "without",
];
const ADVERBS: &[&str] = &[
    "very",
    "approximately",
    "roughly",
    "nearly",
    "almost",
    "fairly",
    "quite",
    "slightly",
    "extremely",
    "somewhat",
    "pretty",
    "relatively",
    "really",
    "too",
    "just",
    "exactly",
    "precisely",
    "only",
    "approx",
    "circa",
    "mostly",
    "mainly",
    "not",
];
const ADJECTIVES: &[&str] = &[
    "long",
    "wide",
    "thick",
    "tall",
    "high",
    "deep",
    "big",
    "small",
    "large",
    "tiny",
    "huge",
    "heavy",
    "light",
    "round",
    "flat",
    "hard",
    "soft",
    "rigid",
    "squeezable",
    "floppy",
    "smooth",
    "rough",
    "fragile",
    "sturdy",
    "delicate",
    "durable",
    "thin",
    "compact",
    "medium",
    "made",
    "square",
    "slim",
    "solid",
    "stiff",
    "squishy",
    "spongy",
    "limp",
    "bumpy",
    "glossy",
    "matte",
    "coarse",
    "sleek",
    "tough",
    "robust",
    "brittle",
    "wooden",
    "short",
    "broad",
    "narrow",
    "little",
    "hollow",
    "fuzzy",
    "gritty",
    "grainy",
    "slippery",
    "other",
    "shiny",
    "sharp",
];
const COMPARATIVES: &[&str] = &[
    "more", "less", "bigger", "smaller", "larger", "longer", "wider",
];
const VERBS: &[&str] = &[
    "weigh", "appear", "measure", "look", "feel", "seem", "hold", "use", "come", "fit", "get",
    "contain", "sit", "stand", "open", "close", "grasp", "pick",
];

/// Nouns whose endings look adjectival.
const NOUNS: &[&str] = &[
    "plastic", "metal", "fabric", "ceramic", "acrylic", "crystal", "vinyl", "textile", "canvas",
    "material", "cylinder", "body", "battery", "handle", "bottle", "candle", "needle", "puzzle",
    "pencil", "toy", "key", "cup", "jelly", "ivory", "assembly", "cable", "table", "circle",
];

/// Irregular and unit lemmas checked before the plural rules.
const IRREGULAR: &[(&str, &str)] = &[
    ("feet", "foot"),
    ("inches", "inch"),
    ("centimetres", "centimeter"),
    ("centimetre", "centimeter"),
    ("centimeters", "centimeter"),
    ("millimetres", "millimeter"),
    ("millimetre", "millimeter"),
    ("millimeters", "millimeter"),
    ("metres", "meter"),
    ("metre", "meter"),
    ("meters", "meter"),
    ("grams", "gram"),
    ("grammes", "gram"),
    ("gramme", "gram"),
    ("kilograms", "kilogram"),
    ("kilos", "kilogram"),
    ("kilo", "kilogram"),
    ("pounds", "pound"),
    ("lbs", "lb"),
    ("ounces", "ounce"),
    ("ozs", "oz"),
    ("cms", "cm"),
    ("mms", "mm"),
    ("kgs", "kg"),
    ("weighs", "weigh"),
    ("weighing", "weigh"),
    ("weighed", "weigh"),
    ("measures", "measure"),
    ("measuring", "measure"),
    ("measured", "measure"),
    ("appears", "appear"),
    ("appeared", "appear"),
    ("feels", "feel"),
    ("looks", "look"),
    ("seems", "seem"),
    ("halves", "half"),
    ("quarters", "quarter"),
    ("leaves", "leaf"),
    ("knives", "knife"),
    ("glasses", "glass"),
    ("boxes", "box"),
    ("dice", "dice"),
];

/// Lowercased dictionary form of a word.
pub fn lemmatize(word: &str) -> String {
    let w = word.to_lowercase().replace('’', "'");
    let w = w.strip_suffix("'s").unwrap_or(&w).to_string();
    if let Some((_, lemma)) = IRREGULAR.iter().find(|(form, _)| *form == w) {
        return lemma.to_string();
    }
    if w.len() <= 3 || w.contains('-') {
        return w;
    }
    if let Some(stem) = w.strip_suffix("ies") {
        return format!("{stem}y");
    }
    for suffix in ["sses", "ches", "shes", "xes", "zes"] {
        if w.ends_with(suffix) {
            return w[..w.len() - 2].to_string();
        }
    }
    let keeps_s = ["ss", "us", "is", "ous", "as"]
        .iter()
        .any(|s| w.ends_with(s));
    if w.ends_with('s') && !keeps_s {
        return w[..w.len() - 1].to_string();
    }
    w
}

fn tag_word(lemma: &str) -> Tag {
    if numbers::is_number_word(lemma) || lemma.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return Tag::CD;
    }
    if CONJUNCTIONS.contains(&lemma) {
        return Tag::CC;
    }
    if PREPOSITIONS.contains(&lemma) {
        return Tag::IN;
    }
    if ADVERBS.contains(&lemma) {
        return Tag::RB;
    }
    if COMPARATIVES.contains(&lemma) {
        return Tag::JJR;
    }
    if ADJECTIVES.contains(&lemma) {
        return Tag::JJ;
    }
    if VERBS.contains(&lemma) {
        return Tag::VB;
    }
    if NOUNS.contains(&lemma) {
        return Tag::NN;
    }
    if lemma.ends_with("ly") && lemma.len() > 4 {
        return Tag::RB;
    }
    if lemma.ends_with("ing") && lemma.len() > 5 {
        return Tag::VBG;
    }
    if lemma.ends_with("est") && lemma.len() > 5 {
        return Tag::JJS;
    }
    const ADJ_SUFFIXES: &[&str] = &[
        "ed", "ous", "ful", "ic", "ical", "al", "ive", "able", "ible", "ish", "less", "ular",
        "ary", "ent", "ant", "y",
    ];
    if lemma.len() > 4 && ADJ_SUFFIXES.iter().any(|s| lemma.ends_with(s)) {
        return Tag::JJ;
    }
    Tag::NN
}

/// Tokenizes, lemmatizes, removes stop words and tags a description.
///
/// `in` directly after a number is read as the unit `inch`; every other
/// `in` is a stop word.
pub fn tokenize_and_tag(description: &str) -> Result<Vec<TaggedToken>, ParseError> {
    if description.trim().is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut out: Vec<TaggedToken> = Vec::new();
    let mut sentence = 0;
    let mut previous_numeric = false;
    for m in TOKEN.find_iter(description) {
        let surface = m.as_str();
        let span = Span {
            start: m.start(),
            end: m.end(),
        };
        let first = surface.chars().next().unwrap_or(' ');
        if !(first.is_alphanumeric() || (first == '.' && surface.len() > 1)) {
            let ends_sentence = matches!(surface, "." | "!" | "?" | ";");
            out.push(TaggedToken {
                surface: surface.to_string(),
                lemma: surface.to_string(),
                tag: Tag::Punct,
                span,
                sentence,
            });
            if ends_sentence {
                sentence += 1;
            }
            previous_numeric = false;
            continue;
        }
        let mut lemma = if first.is_ascii_digit() || first == '.' {
            surface.to_string()
        } else {
            lemmatize(surface)
        };
        if previous_numeric && (lemma == "in" || lemma == "inch") {
            lemma = "inch".to_string();
        } else if STOP_WORDS.contains(&lemma.as_str()) {
            continue;
        }
        let tag = if lemma == "inch" {
            Tag::NN
        } else {
            tag_word(&lemma)
        };
        previous_numeric = tag == Tag::CD;
        out.push(TaggedToken {
            surface: surface.to_string(),
            lemma,
            tag,
            span,
            sentence,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(String, &'static str)> {
        tokenize_and_tag(text)
            .unwrap()
            .into_iter()
            .map(|t| (t.lemma, t.tag.as_str()))
            .collect()
    }

    fn owned(v: &[(&str, &'static str)]) -> Vec<(String, &'static str)> {
        v.iter().map(|(a, b)| (a.to_string(), *b)).collect()
    }

    #[test]
    fn ten_centimeters_long() {
        assert_eq!(
            pairs("it is about ten centimeters long"),
            owned(&[
                ("about", "IN"),
                ("ten", "CD"),
                ("centimeter", "NN"),
                ("long", "JJ")
            ])
        );
    }

    #[test]
    fn made_of_plastic() {
        assert_eq!(
            pairs("made of plastic"),
            owned(&[("made", "JJ"), ("of", "IN"), ("plastic", "NN")])
        );
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(tokenize_and_tag(""), Err(ParseError::EmptyInput)));
        assert!(matches!(
            tokenize_and_tag("   \n"),
            Err(ParseError::EmptyInput)
        ));
    }

    #[test]
    fn decimals_units_and_dimension_lists() {
        assert_eq!(
            pairs("21.5x7.2 cm"),
            owned(&[("21.5", "CD"), ("x", "CC"), ("7.2", "CD"), ("cm", "NN")])
        );
        assert_eq!(
            pairs("6 in long"),
            owned(&[("6", "CD"), ("inch", "NN"), ("long", "JJ")])
        );
        assert_eq!(pairs("fits in hand")[0].0, "fit");
    }

    #[test]
    fn spans_point_into_source_and_sentences_advance() {
        let text = "A ball. It weighs 56 grams";
        let toks = tokenize_and_tag(text).unwrap();
        let gram = toks.iter().find(|t| t.lemma == "gram").unwrap();
        assert_eq!(&text[gram.span.start..gram.span.end], "grams");
        assert_eq!(gram.sentence, 1);
    }

    #[test]
    fn lemmas() {
        assert_eq!(lemmatize("Batteries"), "battery");
        assert_eq!(lemmatize("glass"), "glass");
        assert_eq!(lemmatize("boxes"), "box");
        assert_eq!(lemmatize("plastics"), "plastic");
        assert_eq!(lemmatize("Rubik's"), "rubik");
        assert_eq!(lemmatize("twenty-five"), "twenty-five");
    }
}
