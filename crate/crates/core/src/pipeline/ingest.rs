//! Attribute extraction from saved product pages (HTML or plain text).

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::knowledge_base::{Attribute, FeatureQuery, Material, RecordDraft};
use crate::parser::{lemmatize, Descriptor, Lexicon, Quantity};

/// One extracted value and the text it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedValue {
    pub attribute: Attribute,
    pub value: String,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageExtraction {
    pub source: PathBuf,
    pub label: String,
    pub values: Vec<ExtractedValue>,
    /// Ambiguities and fallbacks worth a human look.
    pub notes: Vec<String>,
    /// Attributes left for manual completion.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPage {
    pub source: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub drafts: Vec<RecordDraft>,
    pub extractions: Vec<PageExtraction>,
    pub skipped: Vec<SkippedPage>,
}

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static pattern"))
}

fn strip_html(raw: &str) -> String {
    static BLOCKS: OnceLock<Regex> = OnceLock::new();
    static BREAKS: OnceLock<Regex> = OnceLock::new();
    static TAGS: OnceLock<Regex> = OnceLock::new();
    let text = re(
        &BLOCKS,
        r"(?is)<(script|style|head)\b.*?</(script|style|head)>",
    )
    .replace_all(raw, " ");
    let text = re(
        &BREAKS,
        r"(?i)<(br|/p|/div|/li|/tr|/h\d|/td|/th|/dd|/dt)\b[^>]*>",
    )
    .replace_all(&text, "\n");
    let text = re(&TAGS, r"<[^>]*>").replace_all(&text, " ");
    text.replace("&nbsp;", " ")
        .replace("&times;", "x")
        .replace("&#215;", "x")
        .replace('×', "x")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

fn title_of(raw: &str, text: &str, source: &Path) -> String {
    static TITLE: OnceLock<Regex> = OnceLock::new();
    static FIELD: OnceLock<Regex> = OnceLock::new();
    let found = re(&TITLE, r"(?is)<(?:title|h1)[^>]*>(.*?)</(?:title|h1)>")
        .captures(raw)
        .map(|c| c[1].to_string())
        .or_else(|| {
            re(&FIELD, r"(?im)^\s*(?:product|title|name)\s*:\s*(.+)$")
                .captures(text)
                .map(|c| c[1].to_string())
        })
        .or_else(|| {
            text.lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .map(String::from)
        });
    let title = found.unwrap_or_else(|| {
        source
            .file_stem()
            .map(|s| s.to_string_lossy().replace(['_', '-'], " "))
            .unwrap_or_default()
    });
    // drop store suffixes such as "Calculator | Shop"
    let head = title
        .split(['|', '–'])
        .next()
        .unwrap_or("")
        .split(" - ")
        .next()
        .unwrap_or("");
    head.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn unit_factor(lexicon: &Lexicon, raw: &str, quantity: Quantity) -> Option<f64> {
    let word = match raw.trim().to_lowercase().as_str() {
        "\"" | "in" | "in." => "inch".to_string(),
        "lbs" => "lb".to_string(),
        other => lemmatize(other.trim_end_matches('.')),
    };
    lexicon
        .unit(&word)
        .filter(|u| u.quantity == quantity)
        .map(|u| u.factor)
}

/// `value * factor` without binary noise in the last digits.
fn convert(value: f64, factor: f64) -> f64 {
    if factor == 1.0 {
        return value;
    }
    format!("{:.11e}", value * factor)
        .parse()
        .expect("formatted float")
}

fn snippet(text: &str, start: usize, end: usize) -> String {
    text[start..end]
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Extracts a draft from one page's text. Never fails; problems become
/// notes and missing attributes.
pub fn extract_page(raw: &str, source: &Path, lexicon: &Lexicon) -> (FeatureQuery, PageExtraction) {
    static DIMS: OnceLock<Regex> = OnceLock::new();
    static MASS: OnceLock<Regex> = OnceLock::new();
    static MATERIAL: OnceLock<Regex> = OnceLock::new();
    const NUM: &str = r"(\d+(?:\.\d+)?)";
    const LEN_UNIT: &str = r#"(cm|centimeters?|centimetres?|mm|millimeters?|millimetres?|inch(?:es)?|in\b\.?|"|meters?|metres?|m\b|feet|foot|ft)"#;
    const MASS_UNIT: &str = r"(kg|kilograms?|g|grams?|lbs?|pounds?|oz|ounces?)\b";

    let text = strip_html(raw);
    let mut extraction = PageExtraction {
        source: source.to_path_buf(),
        label: title_of(raw, &text, source),
        values: Vec::new(),
        notes: Vec::new(),
        missing: Vec::new(),
    };
    let mut query = FeatureQuery::empty();

    // "21.5 x 7.2 x 7.2 cm"; per-number units are allowed ("6 in x 3 in")
    let dims_re = re(
        &DIMS,
        &format!(
            r"(?i){NUM}\s*{LEN_UNIT}?\s*(?:[lwhd]\b\s*)?x\s*{NUM}\s*{LEN_UNIT}?\s*(?:[lwhd]\b\s*)?(?:x\s*{NUM}\s*{LEN_UNIT}?)?"
        ),
    );
    let mut dims_found = dims_re
        .captures_iter(&text)
        .filter(|c| c.get(2).is_some() || c.get(4).is_some() || c.get(6).is_some());
    if let Some(c) = dims_found.next() {
        let unit = [6, 4, 2]
            .iter()
            .find_map(|&i| c.get(i))
            .map(|m| m.as_str())
            .unwrap_or("");
        match unit_factor(lexicon, unit, Quantity::Length) {
            Some(factor) => {
                let values: Vec<f64> = [1, 3, 5]
                    .iter()
                    .filter_map(|&i| c.get(i))
                    .map(|m| convert(m.as_str().parse::<f64>().expect("digits"), factor))
                    .collect();
                let whole = c.get(0).expect("match");
                let snip = snippet(&text, whole.start(), whole.end());
                match query.clone().with_dimension_list(&values) {
                    Ok(q) => {
                        query = q;
                        for (attr, v) in Attribute::DIMENSIONS.into_iter().zip(query.dims()) {
                            if let Some(v) = v {
                                extraction.values.push(ExtractedValue {
                                    attribute: attr,
                                    value: format!("{v} cm"),
                                    snippet: snip.clone(),
                                });
                            }
                        }
                    }
                    Err(e) => extraction
                        .notes
                        .push(format!("rejected dimensions '{snip}': {e}")),
                }
            }
            None => extraction
                .notes
                .push(format!("unknown length unit '{unit}'")),
        }
        if dims_found.next().is_some() {
            extraction
                .notes
                .push("several dimension lists on the page; kept the first".into());
        }
    }

    let mass_re = re(
        &MASS,
        &format!(
            r"(?i)(?:(item\s+weight|net\s+weight|weight|weighs)\s*[:\-]?\s*)?{NUM}\s*{MASS_UNIT}"
        ),
    );
    let mut masses: Vec<_> = mass_re.captures_iter(&text).collect();
    // a labelled weight beats a bare "660 g"
    masses.sort_by_key(|c| c.get(1).is_none());
    let mass = masses
        .first()
        .and_then(|c| unit_factor(lexicon, &c[3], Quantity::Mass).map(|f| (c, f)));
    if let Some((c, factor)) = mass {
        let v = convert(c[2].parse::<f64>().expect("digits"), factor);
        let whole = c.get(0).expect("match");
        if let Ok(q) = query.clone().with_mass(Some(v)) {
            query = q;
            extraction.values.push(ExtractedValue {
                attribute: Attribute::Mass,
                value: format!("{v} g"),
                snippet: snippet(&text, whole.start(), whole.end()),
            });
            if c.get(1).is_none() {
                extraction
                    .notes
                    .push("weight taken from an unlabelled quantity".into());
            }
        }
    }

    // material keywords: the labelled field first, then the body text
    let material_re = re(&MATERIAL, r"(?im)\bmaterials?\s*[:\-]\s*([^\n;,.]+)");
    let labelled = material_re.captures(&text).map(|c| {
        let m = c.get(1).expect("group");
        (m.start(), m.end(), c.get(0).expect("match").start())
    });
    let search = |from: usize, to: usize| -> Option<(Material, usize, usize)> {
        let words: Vec<(usize, usize, String)> = Regex::new(r"[A-Za-z]+")
            .expect("static pattern")
            .find_iter(&text[from..to])
            .map(|m| (from + m.start(), from + m.end(), lemmatize(m.as_str())))
            .collect();
        let lemmas: Vec<&str> = words.iter().map(|w| w.2.as_str()).collect();
        (0..lemmas.len()).find_map(|i| match lexicon.match_keyword(&lemmas[i..]) {
            Some((Descriptor::Material(m), n)) => Some((m, words[i].0, words[i + n - 1].1)),
            _ => None,
        })
    };
    let material = match labelled {
        Some((s, e, field_start)) => search(s, e).map(|(m, _, end)| (m, field_start, end)),
        None => {
            let found = search(0, text.len());
            if found.is_some() {
                extraction
                    .notes
                    .push("material inferred from body text, not a labelled field".into());
            }
            found
        }
    };
    if let Some((m, s, e)) = material {
        query = query.with_material(Some(m));
        extraction.values.push(ExtractedValue {
            attribute: Attribute::Material,
            value: m.to_string(),
            snippet: snippet(&text, s, e),
        });
    }

    extraction.missing = Attribute::ALL
        .into_iter()
        .filter(|a| !query.is_present(*a))
        .map(|a| a.name().to_string())
        .collect();
    (query, extraction)
}

/// Reads every `.html`, `.htm` and `.txt` file in `dir` (sorted by name)
/// into record drafts numbered from `first_id`. Bad files are skipped
/// and reported, never fatal.
pub fn ingest_pages(
    dir: impl AsRef<Path>,
    lexicon: &Lexicon,
    first_id: u32,
) -> Result<IngestReport, PipelineError> {
    let dir = dir.as_ref();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::File {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();

    let mut report = IngestReport {
        drafts: Vec::new(),
        extractions: Vec::new(),
        skipped: Vec::new(),
    };
    let mut next_id = first_id;
    for path in entries {
        let skip = |reason: &str| SkippedPage {
            source: path.clone(),
            reason: reason.to_string(),
        };
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if !matches!(ext.as_str(), "html" | "htm" | "txt") {
            report.skipped.push(skip("not an HTML or text file"));
            continue;
        }
        let raw = match std::fs::read(&path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(s) => s,
                Err(_) => {
                    report.skipped.push(skip("not UTF-8 text"));
                    continue;
                }
            },
            Err(e) => {
                report.skipped.push(skip(&e.to_string()));
                continue;
            }
        };
        if raw.trim().is_empty() {
            report.skipped.push(skip("empty file"));
            continue;
        }
        let (query, extraction) = extract_page(&raw, &path, lexicon);
        if extraction.values.is_empty() {
            report.skipped.push(skip("no attributes found"));
            continue;
        }
        report.drafts.push(RecordDraft {
            id: next_id,
            label: extraction.label.clone(),
            attributes: query,
        });
        report.extractions.push(extraction);
        next_id += 1;
    }
    Ok(report)
}
