//! Extended grasp classes, probability distributions over them and
//! frequency labels.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LearnError;

/// Grasp primitive: power (`w*`) or precision (`r*`) family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraspType {
    /// power, thin object held flat
    Wt,
    /// power, palm
    Wp,
    /// power, hook / wrap
    Wh,
    /// power, circular (sphere)
    Wc,
    /// precision, prismatic pinch
    Rp,
    /// precision, circular
    Rc,
}

impl GraspType {
    pub fn as_str(self) -> &'static str {
        match self {
            GraspType::Wt => "wt",
            GraspType::Wp => "wp",
            GraspType::Wh => "wh",
            GraspType::Wc => "wc",
            GraspType::Rp => "rp",
            GraspType::Rc => "rc",
        }
    }
}

/// Object dimensions the hand closes across.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraspDim {
    A,
    B,
    C,
    Ab,
    Bc,
    Ac,
    Abc,
}

impl GraspDim {
    pub fn as_str(self) -> &'static str {
        match self {
            GraspDim::A => "a",
            GraspDim::B => "b",
            GraspDim::C => "c",
            GraspDim::Ab => "ab",
            GraspDim::Bc => "bc",
            GraspDim::Ac => "ac",
            GraspDim::Abc => "abc",
        }
    }

    /// Indices into `[a, b, c]`.
    pub fn indices(self) -> &'static [usize] {
        match self {
            GraspDim::A => &[0],
            GraspDim::B => &[1],
            GraspDim::C => &[2],
            GraspDim::Ab => &[0, 1],
            GraspDim::Bc => &[1, 2],
            GraspDim::Ac => &[0, 2],
            GraspDim::Abc => &[0, 1, 2],
        }
    }
}

/// One of the nine extended grasp classes, `type.dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraspClass {
    RcAb,
    RcBc,
    RpB,
    RpC,
    WcAbc,
    WhBc,
    WhC,
    WpBc,
    WtC,
}

pub const CLASS_COUNT: usize = 9;

impl GraspClass {
    /// Canonical order; earlier classes win ties.
    pub const ALL: [GraspClass; CLASS_COUNT] = [
        GraspClass::RcAb,
        GraspClass::RcBc,
        GraspClass::RpB,
        GraspClass::RpC,
        GraspClass::WcAbc,
        GraspClass::WhBc,
        GraspClass::WhC,
        GraspClass::WpBc,
        GraspClass::WtC,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_parts(grasp_type: GraspType, dim: GraspDim) -> Option<GraspClass> {
        GraspClass::ALL
            .into_iter()
            .find(|c| c.grasp_type() == grasp_type && c.grasp_dim() == dim)
    }

    pub fn grasp_type(self) -> GraspType {
        match self {
            GraspClass::RcAb | GraspClass::RcBc => GraspType::Rc,
            GraspClass::RpB | GraspClass::RpC => GraspType::Rp,
            GraspClass::WcAbc => GraspType::Wc,
            GraspClass::WhBc | GraspClass::WhC => GraspType::Wh,
            GraspClass::WpBc => GraspType::Wp,
            GraspClass::WtC => GraspType::Wt,
        }
    }

    pub fn grasp_dim(self) -> GraspDim {
        match self {
            GraspClass::RcAb => GraspDim::Ab,
            GraspClass::RcBc | GraspClass::WhBc | GraspClass::WpBc => GraspDim::Bc,
            GraspClass::RpB => GraspDim::B,
            GraspClass::RpC | GraspClass::WhC | GraspClass::WtC => GraspDim::C,
            GraspClass::WcAbc => GraspDim::Abc,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            GraspClass::RcAb => "rc.ab",
            GraspClass::RcBc => "rc.bc",
            GraspClass::RpB => "rp.b",
            GraspClass::RpC => "rp.c",
            GraspClass::WcAbc => "wc.abc",
            GraspClass::WhBc => "wh.bc",
            GraspClass::WhC => "wh.c",
            GraspClass::WpBc => "wp.bc",
            GraspClass::WtC => "wt.c",
        }
    }
}

impl fmt::Display for GraspClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GraspClass {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        GraspClass::ALL
            .into_iter()
            .find(|c| c.code() == t)
            .ok_or_else(|| LearnError::UnknownClass(s.to_string()))
    }
}

impl Serialize for GraspClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for GraspClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Probabilities over the nine classes, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspDistribution([f64; CLASS_COUNT]);

impl GraspDistribution {
    /// Checks entries are in `[0, 1]` and sum to 1 within 1e-9.
    pub fn new(probabilities: [f64; CLASS_COUNT]) -> Result<Self, LearnError> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(LearnError::InvalidDistribution(format!(
                "{probabilities:?}"
            )));
        }
        Ok(GraspDistribution(probabilities))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: [f64; CLASS_COUNT]) -> Result<Self, LearnError> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || !(sum > 0.0) {
            return Err(LearnError::InvalidDistribution(format!("{weights:?}")));
        }
        Ok(GraspDistribution(weights.map(|w| w / sum)))
    }

    pub fn uniform() -> Self {
        GraspDistribution([1.0 / CLASS_COUNT as f64; CLASS_COUNT])
    }

    pub fn one_hot(class: GraspClass) -> Self {
        let mut p = [0.0; CLASS_COUNT];
        p[class.index()] = 1.0;
        GraspDistribution(p)
    }

    pub fn probabilities(&self) -> &[f64; CLASS_COUNT] {
        &self.0
    }

    pub fn get(&self, class: GraspClass) -> f64 {
        self.0[class.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (GraspClass, f64)> + '_ {
        GraspClass::ALL.into_iter().zip(self.0.iter().copied())
    }
}

impl Serialize for GraspDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(CLASS_COUNT))?;
        for (class, p) in self.iter() {
            map.serialize_entry(class.code(), &p)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GraspDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = GraspDistribution;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from grasp class code to probability")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut p = [0.0; CLASS_COUNT];
                while let Some((code, value)) = map.next_entry::<GraspClass, f64>()? {
                    p[code.index()] = value;
                }
                GraspDistribution::new(p).map_err(serde::de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// How often people chose each class for one object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraspLabel {
    pub object_id: u32,
    pub frequencies: [u32; CLASS_COUNT],
}

impl GraspLabel {
    pub fn new(object_id: u32, frequencies: [u32; CLASS_COUNT]) -> Result<Self, LearnError> {
        if frequencies.iter().all(|f| *f == 0) {
            return Err(LearnError::EmptyLabel(object_id));
        }
        Ok(GraspLabel {
            object_id,
            frequencies,
        })
    }

    pub fn frequency(&self, class: GraspClass) -> u32 {
        self.frequencies[class.index()]
    }

    pub fn distribution(&self) -> GraspDistribution {
        GraspDistribution::from_weights(self.frequencies.map(f64::from))
            .expect("labels have a positive frequency")
    }

    pub fn max_frequency(&self) -> u32 {
        self.frequencies.iter().copied().max().unwrap_or(0)
    }

    /// Most frequent class, canonical order breaking ties.
    pub fn modal_class(&self) -> GraspClass {
        let max = self.max_frequency();
        GraspClass::ALL
            .into_iter()
            .find(|c| self.frequency(*c) == max)
            .expect("nine classes")
    }
}

pub fn label_header() -> Vec<&'static str> {
    std::iter::once("object_id")
        .chain(GraspClass::ALL.iter().map(|c| c.code()))
        .collect()
}

/// Reads `object_id,rc.ab,...,wt.c` rows.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<GraspLabel>, LearnError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.to_lowercase()).collect();
    if header != label_header() {
        return Err(LearnError::BadLabelFile {
            path: display,
            line: 1,
            message: format!("expected header `{}`", label_header().join(",")),
        });
    }
    let mut labels = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let bad = |message: String| LearnError::BadLabelFile {
            path: display.clone(),
            line: i + 2,
            message,
        };
        let nums: Vec<u32> = row
            .iter()
            .map(|c| c.parse::<u32>().map_err(|e| bad(format!("'{c}': {e}"))))
            .collect::<Result<_, _>>()?;
        if nums.len() != CLASS_COUNT + 1 {
            return Err(bad(format!("expected {} columns", CLASS_COUNT + 1)));
        }
        let freqs: [u32; CLASS_COUNT] = nums[1..].try_into().expect("nine columns");
        labels.push(GraspLabel::new(nums[0], freqs).map_err(|e| bad(e.to_string()))?);
    }
    Ok(labels)
}

pub fn write_labels<W: Write>(writer: W, labels: &[GraspLabel]) -> Result<(), LearnError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(label_header())?;
    for l in labels {
        let mut row = vec![l.object_id.to_string()];
        row.extend(l.frequencies.iter().map(u32::to_string));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_decompose_bijectively() {
        let mut seen = std::collections::BTreeSet::new();
        for class in GraspClass::ALL {
            let code = format!(
                "{}.{}",
                class.grasp_type().as_str(),
                class.grasp_dim().as_str()
            );
            assert_eq!(code, class.code());
            assert_eq!(code.parse::<GraspClass>().unwrap(), class);
            assert_eq!(
                GraspClass::from_parts(class.grasp_type(), class.grasp_dim()),
                Some(class)
            );
            assert!(seen.insert(code));
        }
        assert_eq!(seen.len(), 9);
        assert!("rp.a".parse::<GraspClass>().is_err());
    }

    #[test]
    fn distributions_validate() {
        assert!(GraspDistribution::new([0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_ok());
        assert!(GraspDistribution::new([0.5; 9]).is_err());
        assert!(GraspDistribution::new([1.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        let u = GraspDistribution::uniform();
        assert!((u.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calculator_label_normalizes() {
        let label = GraspLabel::new(1, [0, 0, 5, 2, 0, 0, 0, 0, 2]).unwrap();
        let d = label.distribution();
        assert_eq!(d.get(GraspClass::RpB), 5.0 / 9.0);
        assert_eq!(d.get(GraspClass::WtC), 2.0 / 9.0);
        assert_eq!(label.modal_class(), GraspClass::RpB);
        assert!(GraspLabel::new(3, [0; 9]).is_err());
    }

    #[test]
    fn distribution_json_round_trip() {
        let d = GraspLabel::new(2, [0, 1, 1, 2, 0, 5, 0, 0, 0])
            .unwrap()
            .distribution();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with("{\"rc.ab\":0.0,\"rc.bc\":"));
        let back: GraspDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn label_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        let labels = vec![
            GraspLabel::new(1, [0, 0, 5, 2, 0, 0, 0, 0, 2]).unwrap(),
            GraspLabel::new(8, [1, 1, 2, 1, 4, 0, 0, 0, 0]).unwrap(),
        ];
        write_labels(fs::File::create(&path).unwrap(), &labels).unwrap();
        assert_eq!(read_labels(&path).unwrap(), labels);
        fs::write(&path, "id,a\n1,2\n").unwrap();
        assert!(matches!(
            read_labels(&path),
            Err(LearnError::BadLabelFile { .. })
        ));
    }
}
