//! Knowledge-base files: CSV with header
//! `id,label,a,b,c,mass,shape,texture,fragility,material,stiffness`
//! (empty cell = missing) or JSON lines with the same field names.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::schema::{FeatureQuery, ObjectRecord};
use super::KbError;

pub const KB_HEADER: [&str; 11] = [
    "id",
    "label",
    "a",
    "b",
    "c",
    "mass",
    "shape",
    "texture",
    "fragility",
    "material",
    "stiffness",
];

/// A knowledge-base row that may still have missing attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDraft {
    pub id: u32,
    pub label: String,
    #[serde(flatten)]
    pub attributes: FeatureQuery,
}

impl RecordDraft {
    pub fn missing(&self) -> Vec<&'static str> {
        use super::schema::Attribute;
        Attribute::ALL
            .into_iter()
            .filter(|a| !self.attributes.is_present(*a))
            .map(|a| match a {
                Attribute::Rigidity => "stiffness",
                other => other.name(),
            })
            .collect()
    }

    pub fn into_record(self) -> Result<ObjectRecord, KbError> {
        let record = self.attributes.to_record(self.id, self.label.clone());
        match record {
            Some(r) => Ok(r),
            None => Err(KbError::IncompleteRecord {
                id: self.id,
                missing: self.missing(),
            }),
        }
    }
}

fn cell<T: std::str::FromStr<Err = KbError>>(text: &str) -> Result<Option<T>, KbError> {
    let t = text.trim();
    if t.is_empty() {
        Ok(None)
    } else {
        t.parse().map(Some)
    }
}

fn number(field: &'static str, text: &str) -> Result<Option<f64>, KbError> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse::<f64>()
        .map(Some)
        .map_err(|e| KbError::InvalidValue {
            field,
            reason: format!("'{t}': {e}"),
        })
}

fn parse_csv_row(row: &csv::StringRecord) -> Result<RecordDraft, KbError> {
    let get = |i: usize| row.get(i).unwrap_or("");
    let id = get(0)
        .trim()
        .parse::<u32>()
        .map_err(|e| KbError::InvalidValue {
            field: "id",
            reason: format!("'{}': {e}", get(0)),
        })?;
    let dims = [
        number("a", get(2))?,
        number("b", get(3))?,
        number("c", get(4))?,
    ];
    let present: Vec<f64> = dims.iter().flatten().copied().collect();
    if present.windows(2).any(|w| w[0] < w[1]) {
        return Err(KbError::InvalidValue {
            field: "a,b,c",
            reason: format!("record {id} violates a >= b >= c"),
        });
    }
    let attributes = FeatureQuery::empty()
        .with_dims(dims)?
        .with_mass(number("mass", get(5))?)?
        .with_shape(cell(get(6))?)
        .with_texture(cell(get(7))?)
        .with_fragility(cell(get(8))?)
        .with_material(cell(get(9))?)
        .with_rigidity(cell(get(10))?);
    Ok(RecordDraft {
        id,
        label: get(1).trim().to_string(),
        attributes,
    })
}

/// Reads a CSV (`.csv`) or JSON-lines (`.jsonl`, `.json`) file of
/// possibly incomplete rows.
pub fn read_drafts(path: impl AsRef<Path>) -> Result<Vec<RecordDraft>, KbError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let is_json = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json") | Some("ndjson")
    );
    if is_json {
        let text = fs::read_to_string(path)?;
        return text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str::<RecordDraft>(l).map_err(|e| KbError::Parse {
                    path: display.clone(),
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect();
    }

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.to_lowercase()).collect();
    if header != KB_HEADER {
        return Err(KbError::BadHeader {
            path: display,
            expected: KB_HEADER.join(","),
            found: header.join(","),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let draft = parse_csv_row(&row).map_err(|e| KbError::Parse {
            path: display.clone(),
            line: i + 2,
            message: e.to_string(),
        })?;
        out.push(draft);
    }
    Ok(out)
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes drafts in the knowledge-base CSV layout.
pub fn write_csv<W: Write>(writer: W, drafts: &[RecordDraft]) -> Result<(), KbError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(KB_HEADER)?;
    for d in drafts {
        let q = &d.attributes;
        w.write_record([
            d.id.to_string(),
            d.label.clone(),
            fmt_opt(q.a()),
            fmt_opt(q.b()),
            fmt_opt(q.c()),
            fmt_opt(q.mass()),
            fmt_opt(q.shape()),
            fmt_opt(q.texture()),
            fmt_opt(q.fragility()),
            fmt_opt(q.material()),
            fmt_opt(q.rigidity()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_base::KnowledgeBase;

    #[test]
    fn csv_with_missing_cells_reads_as_drafts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.csv");
        fs::write(
            &path,
            "id,label,a,b,c,mass,shape,texture,fragility,material,stiffness\n\
             1,calculator,15.4,7.9,1.5,116,thin,medium,medium,plastic,rigid\n\
             8,tennis ball,6.4,6.4,6.4,56,radial,rough,medium,fabric,soft\n\
             30,mystery,12,,,,,,,plastic,\n",
        )
        .unwrap();
        let drafts = read_drafts(&path).unwrap();
        assert_eq!(drafts.len(), 3);
        assert_eq!(
            drafts[2].missing(),
            vec![
                "b",
                "c",
                "mass",
                "shape",
                "stiffness",
                "texture",
                "fragility"
            ]
        );
        assert_eq!(
            drafts[1].attributes.rigidity(),
            Some(crate::knowledge_base::Rigidity::Squeezable)
        );
        assert!(KnowledgeBase::load(&path).is_err());
    }

    #[test]
    fn bad_header_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.csv");
        fs::write(&path, "id,name\n1,x\n").unwrap();
        assert!(matches!(read_drafts(&path), Err(KbError::BadHeader { .. })));
    }

    #[test]
    fn csv_and_jsonl_agree() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("kb.csv");
        let json_path = dir.path().join("kb.jsonl");
        let records = crate::knowledge_base::fixtures::reference_records();
        let drafts: Vec<RecordDraft> = records
            .iter()
            .map(|r| RecordDraft {
                id: r.id,
                label: r.label.clone(),
                attributes: r.to_query(),
            })
            .collect();
        write_csv(fs::File::create(&csv_path).unwrap(), &drafts).unwrap();
        let lines: Vec<String> = records
            .iter()
            .map(|r| serde_json::to_string(r).unwrap())
            .collect();
        fs::write(&json_path, lines.join("\n")).unwrap();
        let from_csv = KnowledgeBase::load(&csv_path).unwrap();
        let from_json = KnowledgeBase::load(&json_path).unwrap();
        assert_eq!(from_csv.records(), from_json.records());
        assert_eq!(from_csv.records(), records.as_slice());
    }
}
