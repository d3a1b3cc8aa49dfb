//! Distances between encoded attribute vectors.
//!
//! Every metric only looks at columns whose source attribute is present in
//! both operands; absent attributes contribute nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::encoding::EncodedFeatures;
use super::KbError;

/// Retrieval metric. `KdTree` ranks by Euclidean distance through the
/// tree index and must agree with `Euclidean` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Jpd,
    Euclidean,
    Minkowski(f64),
    Cosine,
    KdTree,
}

impl Metric {
    /// The five metrics compared by the recall harness.
    pub fn comparison_set() -> [Metric; 5] {
        [
            Metric::Euclidean,
            Metric::Minkowski(3.0),
            Metric::Cosine,
            Metric::KdTree,
            Metric::Jpd,
        ]
    }

    pub fn distance(self, x: &EncodedFeatures, y: &EncodedFeatures) -> f64 {
        match self {
            Metric::Jpd => jpd_distance(x, y),
            Metric::Euclidean | Metric::KdTree => euclidean(x, y),
            Metric::Minkowski(p) => minkowski(x, y, p),
            Metric::Cosine => cosine(x, y),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Jpd => f.write_str("jpd"),
            Metric::Euclidean => f.write_str("euclidean"),
            Metric::Minkowski(p) => write!(f, "minkowski:{p}"),
            Metric::Cosine => f.write_str("cosine"),
            Metric::KdTree => f.write_str("kd-tree"),
        }
    }
}

impl FromStr for Metric {
    type Err = KbError;

    /// Accepts `jpd`, `euclidean`, `cosine`, `kd-tree`, `minkowski`
    /// (p = 3) and `minkowski:<p>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim().to_ascii_lowercase();
        let unknown = || KbError::UnknownMetric(s.to_string());
        match text.as_str() {
            "jpd" | "joint-probability" => Ok(Metric::Jpd),
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            "kd-tree" | "kdtree" => Ok(Metric::KdTree),
            "minkowski" => Ok(Metric::Minkowski(3.0)),
            other => {
                let p = other
                    .strip_prefix("minkowski:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(unknown)?;
                if p >= 1.0 && p.is_finite() {
                    Ok(Metric::Minkowski(p))
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Joint Probability Distance: `sum_j ln(1 + |x_j - y_j|)` over shared
/// columns, in raw units. An empty intersection gives 0.
pub fn jpd_distance(x: &EncodedFeatures, y: &EncodedFeatures) -> f64 {
    x.shared_columns(y)
        .map(|j| (x.values[j] - y.values[j]).abs().ln_1p())
        .sum()
}

pub fn euclidean(x: &EncodedFeatures, y: &EncodedFeatures) -> f64 {
    squared_euclidean(x, y).sqrt()
}

pub(crate) fn squared_euclidean(x: &EncodedFeatures, y: &EncodedFeatures) -> f64 {
    x.shared_columns(y)
        .map(|j| {
            let d = x.values[j] - y.values[j];
            d * d
        })
        .sum()
}

/// Minkowski distance of order `p >= 1`.
pub fn minkowski(x: &EncodedFeatures, y: &EncodedFeatures, p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    let sum: f64 = x
        .shared_columns(y)
        .map(|j| (x.values[j] - y.values[j]).abs().powf(p))
        .sum();
    sum.powf(1.0 / p)
}

/// `1 - cos(x, y)` over shared columns; 1 when either masked vector has
/// zero norm.
pub fn cosine(x: &EncodedFeatures, y: &EncodedFeatures) -> f64 {
    let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
    for j in x.shared_columns(y) {
        dot += x.values[j] * y.values[j];
        nx += x.values[j] * x.values[j];
        ny += y.values[j] * y.values[j];
    }
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (nx.sqrt() * ny.sqrt())).clamp(0.0, 2.0)
}

/// Baseline metric selector for [`baseline_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    Euclidean,
    Minkowski(f64),
    Cosine,
}

pub fn baseline_distance(x: &EncodedFeatures, y: &EncodedFeatures, kind: BaselineKind) -> f64 {
    match kind {
        BaselineKind::Euclidean => euclidean(x, y),
        BaselineKind::Minkowski(p) => minkowski(x, y, p),
        BaselineKind::Cosine => cosine(x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_base::encoding::encode;
    use crate::knowledge_base::schema::{FeatureQuery, Material, Shape};

    fn pair(x: [f64; 2], y: [f64; 2]) -> (EncodedFeatures, EncodedFeatures) {
        let q = |v: [f64; 2]| {
            let mut e = encode(&FeatureQuery::empty());
            e.values[0] = v[0];
            e.values[1] = v[1];
            e.mask = [
                crate::knowledge_base::Attribute::A,
                crate::knowledge_base::Attribute::B,
            ]
            .into_iter()
            .collect();
            e
        };
        (q(x), q(y))
    }

    #[test]
    fn three_four_five() {
        let (x, y) = pair([3.0, 4.0], [0.0, 0.0]);
        assert_eq!(baseline_distance(&x, &y, BaselineKind::Euclidean), 5.0);
        assert_eq!(baseline_distance(&x, &x, BaselineKind::Euclidean), 0.0);
    }

    #[test]
    fn orthogonal_cosine_is_one() {
        let (x, y) = pair([1.0, 0.0], [0.0, 1.0]);
        assert_eq!(cosine(&x, &y), 1.0);
    }

    #[test]
    fn zero_norm_cosine_is_one() {
        let (x, y) = pair([0.0, 0.0], [2.0, 1.0]);
        assert_eq!(cosine(&x, &y), 1.0);
        let empty = encode(&FeatureQuery::empty());
        assert_eq!(cosine(&empty, &empty), 1.0);
    }

    #[test]
    fn minkowski_p1_is_manhattan() {
        let (x, y) = pair([3.0, 4.0], [0.0, 0.0]);
        assert!((minkowski(&x, &y, 1.0) - 7.0).abs() < 1e-12);
        let m3 = minkowski(&x, &y, 3.0);
        assert!((m3 - (27.0f64 + 64.0).cbrt()).abs() < 1e-12);
    }

    #[test]
    fn one_material_mismatch_costs_two_ln_two() {
        let x = encode(&FeatureQuery::empty().with_material(Some(Material::Plastic)));
        let y = encode(&FeatureQuery::empty().with_material(Some(Material::Wood)));
        assert!((jpd_distance(&x, &y) - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn disjoint_masks_are_zero_distance() {
        let x = encode(&FeatureQuery::empty().with_material(Some(Material::Plastic)));
        let y = encode(&FeatureQuery::empty().with_shape(Some(Shape::Thin)));
        assert_eq!(jpd_distance(&x, &y), 0.0);
        assert_eq!(euclidean(&x, &y), 0.0);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::comparison_set() {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert_eq!(
            "minkowski".parse::<Metric>().unwrap(),
            Metric::Minkowski(3.0)
        );
        assert!("minkowski:0.5".parse::<Metric>().is_err());
        assert!("hamming".parse::<Metric>().is_err());
    }
}
