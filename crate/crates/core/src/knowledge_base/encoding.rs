//! Mixed continuous / one-hot encoding of object attributes.
//!
//! Column layout (26 values):
//!
//! | columns | attribute |
//! |---------|-----------|
//! | 0..4    | a, b, c (cm), mass (g) |
//! | 4..9    | shape one-hot |
//! | 9..12   | rigidity one-hot |
//! | 12..15  | texture one-hot |
//! | 15..18  | fragility one-hot |
//! | 18..26  | material one-hot |

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::schema::{
    Attribute, AttributeMask, FeatureQuery, Fragility, Material, ObjectRecord, Rigidity, Shape,
    Texture,
};

pub const ENCODED_WIDTH: usize = 26;

/// Encoded attribute vector plus the presence mask of the source attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedFeatures {
    pub values: [f64; ENCODED_WIDTH],
    pub mask: AttributeMask,
}

/// Columns occupied by an attribute.
pub fn columns(attr: Attribute) -> Range<usize> {
    match attr {
        Attribute::A => 0..1,
        Attribute::B => 1..2,
        Attribute::C => 2..3,
        Attribute::Mass => 3..4,
        Attribute::Shape => 4..9,
        Attribute::Rigidity => 9..12,
        Attribute::Texture => 12..15,
        Attribute::Fragility => 15..18,
        Attribute::Material => 18..26,
    }
}

/// Source attribute of every column, in column order.
pub fn column_attributes() -> [Attribute; ENCODED_WIDTH] {
    let mut out = [Attribute::A; ENCODED_WIDTH];
    for attr in Attribute::ALL {
        for col in columns(attr) {
            out[col] = attr;
        }
    }
    out
}

impl EncodedFeatures {
    pub fn zeros() -> Self {
        EncodedFeatures {
            values: [0.0; ENCODED_WIDTH],
            mask: AttributeMask::EMPTY,
        }
    }

    /// Indices of the columns whose attribute is present in both encodings.
    pub fn shared_columns(&self, other: &EncodedFeatures) -> impl Iterator<Item = usize> {
        let shared = self.mask.intersect(other.mask);
        shared.iter().flat_map(columns)
    }

    /// Copy with one attribute cleared (columns zeroed, mask bit removed).
    pub fn without(&self, attr: Attribute) -> EncodedFeatures {
        let mut out = self.clone();
        for col in columns(attr) {
            out.values[col] = 0.0;
        }
        out.mask.remove(attr);
        out
    }
}

fn one_hot(values: &mut [f64; ENCODED_WIDTH], attr: Attribute, index: usize) {
    let cols = columns(attr);
    debug_assert!(index < cols.len());
    values[cols.start + index] = 1.0;
}

/// Encodes a possibly incomplete query. Absent attributes leave their
/// columns at zero and their mask bit cleared.
pub fn encode(query: &FeatureQuery) -> EncodedFeatures {
    let mut enc = EncodedFeatures::zeros();
    let continuous = [
        (Attribute::A, query.a()),
        (Attribute::B, query.b()),
        (Attribute::C, query.c()),
        (Attribute::Mass, query.mass()),
    ];
    for (attr, value) in continuous {
        if let Some(v) = value {
            enc.values[columns(attr).start] = v;
            enc.mask.insert(attr);
        }
    }
    let categorical = [
        (Attribute::Shape, query.shape().map(Shape::index)),
        (Attribute::Rigidity, query.rigidity().map(Rigidity::index)),
        (Attribute::Texture, query.texture().map(Texture::index)),
        (
            Attribute::Fragility,
            query.fragility().map(Fragility::index),
        ),
        (Attribute::Material, query.material().map(Material::index)),
    ];
    for (attr, index) in categorical {
        if let Some(i) = index {
            one_hot(&mut enc.values, attr, i);
            enc.mask.insert(attr);
        }
    }
    enc
}

pub fn encode_record(record: &ObjectRecord) -> EncodedFeatures {
    encode(&record.to_query())
}

fn decode_block<T: Copy>(enc: &EncodedFeatures, attr: Attribute, all: &[T]) -> Option<T> {
    if !enc.mask.contains(attr) {
        return None;
    }
    let cols = columns(attr);
    let block = &enc.values[cols];
    let (index, _) = block
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))?;
    all.get(index).copied()
}

/// Inverse of [`encode`]. Categorical blocks decode to their largest entry.
pub fn decode(enc: &EncodedFeatures) -> FeatureQuery {
    let value = |attr: Attribute| {
        enc.mask
            .contains(attr)
            .then(|| enc.values[columns(attr).start])
    };
    let dims = [
        value(Attribute::A),
        value(Attribute::B),
        value(Attribute::C),
    ];
    let query = FeatureQuery::empty()
        .with_dims(dims)
        .and_then(|q| q.with_mass(value(Attribute::Mass)))
        .unwrap_or_default();
    query
        .with_shape(decode_block(enc, Attribute::Shape, Shape::ALL))
        .with_rigidity(decode_block(enc, Attribute::Rigidity, Rigidity::ALL))
        .with_texture(decode_block(enc, Attribute::Texture, Texture::ALL))
        .with_fragility(decode_block(enc, Attribute::Fragility, Fragility::ALL))
        .with_material(decode_block(enc, Attribute::Material, Material::ALL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rubix_cube() -> ObjectRecord {
        ObjectRecord {
            id: 5,
            label: "mini rubix cube".into(),
            a: 3.0,
            b: 3.0,
            c: 3.0,
            mass: 12.0,
            shape: Shape::Compact,
            texture: Texture::Smooth,
            fragility: Fragility::Sturdy,
            material: Material::Plastic,
            rigidity: Rigidity::Rigid,
        }
    }

    #[test]
    fn plastic_material_block() {
        let q = FeatureQuery::empty().with_material(Some(Material::Plastic));
        let enc = encode(&q);
        assert_eq!(
            &enc.values[18..26],
            &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            enc.mask.iter().collect::<Vec<_>>(),
            vec![Attribute::Material]
        );
    }

    #[test]
    fn empty_query_encodes_to_zero() {
        let enc = encode(&FeatureQuery::empty());
        assert!(enc.values.iter().all(|v| *v == 0.0));
        assert!(enc.mask.is_empty());
    }

    #[test]
    fn table_row_continuous_part_and_full_mask() {
        let enc = encode_record(&rubix_cube());
        assert_eq!(&enc.values[..4], &[3.0, 3.0, 3.0, 12.0]);
        assert_eq!(enc.mask, AttributeMask::FULL);
        // each categorical block sums to one
        for attr in Attribute::ALL.into_iter().filter(|a| !a.is_continuous()) {
            let sum: f64 = enc.values[columns(attr)].iter().sum();
            assert_eq!(sum, 1.0, "{attr}");
        }
    }

    #[test]
    fn decode_inverts_encode_for_records() {
        let r = rubix_cube();
        assert_eq!(decode(&encode_record(&r)), r.to_query());
    }

    #[test]
    fn columns_tile_the_vector() {
        let attrs = column_attributes();
        assert_eq!(attrs[0], Attribute::A);
        assert_eq!(attrs[25], Attribute::Material);
        let total: usize = Attribute::ALL.iter().map(|a| columns(*a).len()).sum();
        assert_eq!(total, ENCODED_WIDTH);
    }
}
