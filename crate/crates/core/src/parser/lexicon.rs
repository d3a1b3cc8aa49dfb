//! Versioned keyword and unit lexicons. The default tables are compiled in;
//! custom ones load from the same text format.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::knowledge_base::{Attribute, Fragility, Material, Rigidity, Shape, Texture};

use super::ParseError;

const QUALITATIVE: &str = include_str!("../../data/lexicon/qualitative.txt");
const UNITS: &str = include_str!("../../data/lexicon/units.txt");

/// A categorical value named by a keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descriptor {
    Shape(Shape),
    Rigidity(Rigidity),
    Texture(Texture),
    Fragility(Fragility),
    Material(Material),
}

impl Descriptor {
    pub fn attribute(self) -> Attribute {
        match self {
            Descriptor::Shape(_) => Attribute::Shape,
            Descriptor::Rigidity(_) => Attribute::Rigidity,
            Descriptor::Texture(_) => Attribute::Texture,
            Descriptor::Fragility(_) => Attribute::Fragility,
            Descriptor::Material(_) => Attribute::Material,
        }
    }

    pub fn value_str(self) -> &'static str {
        match self {
            Descriptor::Shape(v) => v.as_str(),
            Descriptor::Rigidity(v) => v.as_str(),
            Descriptor::Texture(v) => v.as_str(),
            Descriptor::Fragility(v) => v.as_str(),
            Descriptor::Material(v) => v.as_str(),
        }
    }

    fn parse(field: &str, value: &str) -> Result<Self, String> {
        let err = |e: crate::knowledge_base::KbError| e.to_string();
        Ok(match field {
            "shape" => Descriptor::Shape(value.parse().map_err(err)?),
            "rigidity" | "stiffness" => Descriptor::Rigidity(value.parse().map_err(err)?),
            "texture" => Descriptor::Texture(value.parse().map_err(err)?),
            "fragility" => Descriptor::Fragility(value.parse().map_err(err)?),
            "material" => Descriptor::Material(value.parse().map_err(err)?),
            other => return Err(format!("unknown field '{other}'")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    Mass,
}

/// A unit and its factor to centimeters or grams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub quantity: Quantity,
    pub factor: f64,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    version: Option<String>,
    keywords: BTreeMap<Vec<String>, Descriptor>,
    longest_key: usize,
    units: BTreeMap<String, Unit>,
}

fn mapping_lines(text: &str) -> impl Iterator<Item = (usize, &str, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let (k, v) = line.split_once("->").unwrap_or((line, ""));
        Some((i + 1, k.trim(), v.trim()))
    })
}

fn version_of(text: &str) -> Option<String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("version:"))
        .map(|v| v.trim().to_string())
}

impl Lexicon {
    /// Built-in lexicon.
    pub fn builtin() -> Self {
        Lexicon::from_strs(QUALITATIVE, UNITS).expect("bundled lexicon is valid")
    }

    pub fn from_strs(qualitative: &str, units: &str) -> Result<Self, ParseError> {
        let bad = |line, message: String| ParseError::Lexicon { line, message };
        let mut keywords = BTreeMap::new();
        for (line, key, value) in mapping_lines(qualitative) {
            let (field, v) = value
                .split_once(':')
                .ok_or_else(|| bad(line, format!("expected `field:value`, got '{value}'")))?;
            let descriptor = Descriptor::parse(field.trim(), v.trim()).map_err(|m| bad(line, m))?;
            let words: Vec<String> = key
                .split_whitespace()
                .map(super::tagger::lemmatize)
                .collect();
            if words.is_empty() {
                return Err(bad(line, "empty keyword".into()));
            }
            keywords.insert(words, descriptor);
        }
        let mut unit_table = BTreeMap::new();
        for (line, key, value) in mapping_lines(units) {
            let (quantity, factor) = value
                .split_once(':')
                .ok_or_else(|| bad(line, format!("expected `quantity:factor`, got '{value}'")))?;
            let quantity = match quantity.trim() {
                "length" => Quantity::Length,
                "mass" => Quantity::Mass,
                other => return Err(bad(line, format!("unknown quantity '{other}'"))),
            };
            let factor: f64 = factor
                .trim()
                .parse()
                .map_err(|e| bad(line, format!("bad factor: {e}")))?;
            if !(factor > 0.0) {
                return Err(bad(line, "factor must be positive".into()));
            }
            unit_table.insert(key.to_lowercase(), Unit { quantity, factor });
        }
        Ok(Lexicon {
            version: version_of(qualitative),
            longest_key: keywords.keys().map(Vec::len).max().unwrap_or(0),
            keywords,
            units: unit_table,
        })
    }

    pub fn from_files(
        qualitative: impl AsRef<Path>,
        units: impl AsRef<Path>,
    ) -> Result<Self, ParseError> {
        Lexicon::from_strs(
            &fs::read_to_string(qualitative)?,
            &fs::read_to_string(units)?,
        )
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn unit(&self, lemma: &str) -> Option<Unit> {
        self.units.get(lemma).copied()
    }

    pub fn keyword_count(&self) -> usize {
        self.keywords.len()
    }

    /// Longest keyword starting at `lemmas[0]`: returns the descriptor and
    /// how many lemmas it spans.
    pub fn match_keyword(&self, lemmas: &[&str]) -> Option<(Descriptor, usize)> {
        (1..=self.longest_key.min(lemmas.len()))
            .rev()
            .find_map(|n| {
                let key: Vec<String> = lemmas[..n].iter().map(|s| s.to_string()).collect();
                self.keywords.get(&key).map(|d| (*d, n))
            })
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::builtin()
    }
}
