//! Object attribute schema: the nine grasp-relevant attributes, their
//! categorical value sets, complete knowledge-base records and partial
//! queries parsed from descriptions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::KbError;

macro_rules! category {
    (
        $(#[$meta:meta])*
        $name:ident, $field:literal {
            $($variant:ident => $text:literal $(| $alias:literal)*),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            /// Every value in one-hot column order.
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const FIELD: &'static str = $field;

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            /// Position of this value inside its one-hot block.
            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = KbError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let text = s.trim().to_ascii_lowercase();
                match text.as_str() {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    _ => Err(KbError::UnknownCategory {
                        field: $field,
                        value: s.to_string(),
                    }),
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = String::deserialize(deserializer)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

category! {
    /// Coarse shape class used by the grasp taxonomy.
    Shape, "shape" {
        Thin => "thin",
        Compact => "compact",
        Prism => "prism",
        Long => "long",
        Radial => "radial",
    }
}

category! {
    Rigidity, "rigidity" {
        Rigid => "rigid",
        // "soft" appears in published tables for squeezable objects
        Squeezable => "squeezable" | "soft",
        Floppy => "floppy",
    }
}

category! {
    Texture, "texture" {
        Medium => "medium",
        Smooth => "smooth",
        Rough => "rough",
    }
}

category! {
    Fragility, "fragility" {
        Sturdy => "sturdy",
        Medium => "medium",
        Fragile => "fragile",
    }
}

category! {
    /// Simplified material types.
    Material, "material" {
        Fabric => "fabric",
        Glass => "glass",
        Metal => "metal",
        Paper => "paper",
        Plastic => "plastic",
        Rubber => "rubber",
        Wood => "wood",
        Other => "other",
    }
}

/// One of the nine object attributes, in mask-bit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    A,
    B,
    C,
    Mass,
    Shape,
    Rigidity,
    Texture,
    Fragility,
    Material,
}

impl Attribute {
    pub const ALL: [Attribute; 9] = [
        Attribute::A,
        Attribute::B,
        Attribute::C,
        Attribute::Mass,
        Attribute::Shape,
        Attribute::Rigidity,
        Attribute::Texture,
        Attribute::Fragility,
        Attribute::Material,
    ];

    pub const DIMENSIONS: [Attribute; 3] = [Attribute::A, Attribute::B, Attribute::C];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::A => "a",
            Attribute::B => "b",
            Attribute::C => "c",
            Attribute::Mass => "mass",
            Attribute::Shape => "shape",
            Attribute::Rigidity => "rigidity",
            Attribute::Texture => "texture",
            Attribute::Fragility => "fragility",
            Attribute::Material => "material",
        }
    }

    pub fn bit(self) -> u16 {
        1 << (self as u16)
    }

    pub fn is_continuous(self) -> bool {
        matches!(
            self,
            Attribute::A | Attribute::B | Attribute::C | Attribute::Mass
        )
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = KbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim().to_ascii_lowercase();
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == text || (text == "m" && *a == Attribute::Mass))
            .or(match text.as_str() {
                "stiffness" | "r" => Some(Attribute::Rigidity),
                "s" => Some(Attribute::Shape),
                "t" => Some(Attribute::Texture),
                "fr" => Some(Attribute::Fragility),
                "mt" => Some(Attribute::Material),
                _ => None,
            })
            .ok_or_else(|| KbError::UnknownAttribute(s.to_string()))
    }
}

/// Set of present attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AttributeMask(u16);

impl AttributeMask {
    pub const EMPTY: AttributeMask = AttributeMask(0);
    pub const FULL: AttributeMask = AttributeMask(0x1ff);

    pub fn contains(self, attr: Attribute) -> bool {
        self.0 & attr.bit() != 0
    }

    pub fn insert(&mut self, attr: Attribute) {
        self.0 |= attr.bit();
    }

    pub fn remove(&mut self, attr: Attribute) {
        self.0 &= !attr.bit();
    }

    pub fn intersect(self, other: AttributeMask) -> AttributeMask {
        AttributeMask(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn iter(self) -> impl Iterator<Item = Attribute> {
        Attribute::ALL
            .into_iter()
            .filter(move |a| self.contains(*a))
    }
}

impl FromIterator<Attribute> for AttributeMask {
    fn from_iter<I: IntoIterator<Item = Attribute>>(iter: I) -> Self {
        let mut mask = AttributeMask::EMPTY;
        for attr in iter {
            mask.insert(attr);
        }
        mask
    }
}

impl Serialize for AttributeMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(Attribute::name))
    }
}

impl<'de> Deserialize<'de> for AttributeMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        names
            .iter()
            .map(|n| n.parse::<Attribute>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A complete knowledge-base entry. Lengths in cm, mass in grams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub id: u32,
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub shape: Shape,
    pub texture: Texture,
    pub fragility: Fragility,
    pub material: Material,
    #[serde(rename = "stiffness")]
    pub rigidity: Rigidity,
}

impl ObjectRecord {
    /// Checks `a >= b >= c > 0` and `mass > 0`.
    pub fn validate(&self) -> Result<(), KbError> {
        for (field, v) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("mass", self.mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KbError::InvalidValue {
                    field,
                    reason: format!("record {} has non-positive value {v}", self.id),
                });
            }
        }
        if !(self.a >= self.b && self.b >= self.c) {
            return Err(KbError::InvalidValue {
                field: "a,b,c",
                reason: format!(
                    "record {} violates a >= b >= c ({}, {}, {})",
                    self.id, self.a, self.b, self.c
                ),
            });
        }
        Ok(())
    }

    pub fn dims(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn to_query(&self) -> FeatureQuery {
        FeatureQuery {
            dims: [Some(self.a), Some(self.b), Some(self.c)],
            mass: Some(self.mass),
            shape: Some(self.shape),
            rigidity: Some(self.rigidity),
            texture: Some(self.texture),
            fragility: Some(self.fragility),
            material: Some(self.material),
        }
    }
}

/// A possibly incomplete attribute set.
///
/// Present dimensions are kept sorted so that `a >= b >= c`; present numeric
/// values are strictly positive.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawQuery", into = "RawQuery")]
pub struct FeatureQuery {
    dims: [Option<f64>; 3],
    mass: Option<f64>,
    shape: Option<Shape>,
    rigidity: Option<Rigidity>,
    texture: Option<Texture>,
    fragility: Option<Fragility>,
    material: Option<Material>,
}

fn check_positive(field: &'static str, v: Option<f64>) -> Result<Option<f64>, KbError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(KbError::InvalidValue {
            field,
            reason: format!("expected a positive value, got {x}"),
        }),
        other => Ok(other),
    }
}

impl FeatureQuery {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sets the dimension slots. Present values are re-sorted descending
    /// into the present slots, so `[None, Some(3), Some(5)]` becomes
    /// `[None, Some(5), Some(3)]`.
    pub fn with_dims(mut self, dims: [Option<f64>; 3]) -> Result<Self, KbError> {
        for (slot, field) in dims.iter().zip(["a", "b", "c"]) {
            check_positive(field, *slot)?;
        }
        let mut present: Vec<f64> = dims.iter().flatten().copied().collect();
        present.sort_by(|x, y| y.total_cmp(x));
        let mut values = present.into_iter();
        self.dims = dims.map(|slot| slot.and_then(|_| values.next()));
        Ok(self)
    }

    /// Assigns the given values, largest first, to `a`, `b`, `c`.
    pub fn with_dimension_list(self, values: &[f64]) -> Result<Self, KbError> {
        if values.len() > 3 {
            return Err(KbError::InvalidValue {
                field: "a,b,c",
                reason: format!("at most three dimensions, got {}", values.len()),
            });
        }
        let mut dims = [None; 3];
        for (slot, v) in dims.iter_mut().zip(values) {
            *slot = Some(*v);
        }
        self.with_dims(dims)
    }

    pub fn with_mass(mut self, mass: Option<f64>) -> Result<Self, KbError> {
        self.mass = check_positive("mass", mass)?;
        Ok(self)
    }

    pub fn with_shape(mut self, v: Option<Shape>) -> Self {
        self.shape = v;
        self
    }

    pub fn with_rigidity(mut self, v: Option<Rigidity>) -> Self {
        self.rigidity = v;
        self
    }

    pub fn with_texture(mut self, v: Option<Texture>) -> Self {
        self.texture = v;
        self
    }

    pub fn with_fragility(mut self, v: Option<Fragility>) -> Self {
        self.fragility = v;
        self
    }

    pub fn with_material(mut self, v: Option<Material>) -> Self {
        self.material = v;
        self
    }

    /// Clears one attribute.
    pub fn without(mut self, attr: Attribute) -> Self {
        match attr {
            Attribute::A => self.dims[0] = None,
            Attribute::B => self.dims[1] = None,
            Attribute::C => self.dims[2] = None,
            Attribute::Mass => self.mass = None,
            Attribute::Shape => self.shape = None,
            Attribute::Rigidity => self.rigidity = None,
            Attribute::Texture => self.texture = None,
            Attribute::Fragility => self.fragility = None,
            Attribute::Material => self.material = None,
        }
        self
    }

    pub fn dims(&self) -> [Option<f64>; 3] {
        self.dims
    }

    pub fn a(&self) -> Option<f64> {
        self.dims[0]
    }

    pub fn b(&self) -> Option<f64> {
        self.dims[1]
    }

    pub fn c(&self) -> Option<f64> {
        self.dims[2]
    }

    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn shape(&self) -> Option<Shape> {
        self.shape
    }

    pub fn rigidity(&self) -> Option<Rigidity> {
        self.rigidity
    }

    pub fn texture(&self) -> Option<Texture> {
        self.texture
    }

    pub fn fragility(&self) -> Option<Fragility> {
        self.fragility
    }

    pub fn material(&self) -> Option<Material> {
        self.material
    }

    pub fn is_present(&self, attr: Attribute) -> bool {
        match attr {
            Attribute::A => self.dims[0].is_some(),
            Attribute::B => self.dims[1].is_some(),
            Attribute::C => self.dims[2].is_some(),
            Attribute::Mass => self.mass.is_some(),
            Attribute::Shape => self.shape.is_some(),
            Attribute::Rigidity => self.rigidity.is_some(),
            Attribute::Texture => self.texture.is_some(),
            Attribute::Fragility => self.fragility.is_some(),
            Attribute::Material => self.material.is_some(),
        }
    }

    pub fn presence(&self) -> AttributeMask {
        Attribute::ALL
            .into_iter()
            .filter(|a| self.is_present(*a))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.presence().is_empty()
    }

    /// Converts to a full record when every attribute is present.
    pub fn to_record(&self, id: u32, label: impl Into<String>) -> Option<ObjectRecord> {
        Some(ObjectRecord {
            id,
            label: label.into(),
            a: self.dims[0]?,
            b: self.dims[1]?,
            c: self.dims[2]?,
            mass: self.mass?,
            shape: self.shape?,
            texture: self.texture?,
            fragility: self.fragility?,
            material: self.material?,
            rigidity: self.rigidity?,
        })
    }
}

impl From<&ObjectRecord> for FeatureQuery {
    fn from(record: &ObjectRecord) -> Self {
        record.to_query()
    }
}

/// Serialized form of [`FeatureQuery`]; deserialization re-validates.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawQuery {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    texture: Option<Texture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fragility: Option<Fragility>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    material: Option<Material>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "rigidity")]
    stiffness: Option<Rigidity>,
}

impl TryFrom<RawQuery> for FeatureQuery {
    type Error = KbError;

    fn try_from(raw: RawQuery) -> Result<Self, Self::Error> {
        Ok(FeatureQuery::empty()
            .with_dims([raw.a, raw.b, raw.c])?
            .with_mass(raw.mass)?
            .with_shape(raw.shape)
            .with_texture(raw.texture)
            .with_fragility(raw.fragility)
            .with_material(raw.material)
            .with_rigidity(raw.stiffness))
    }
}

impl From<FeatureQuery> for RawQuery {
    fn from(q: FeatureQuery) -> Self {
        RawQuery {
            a: q.dims[0],
            b: q.dims[1],
            c: q.dims[2],
            mass: q.mass,
            shape: q.shape,
            texture: q.texture,
            fragility: q.fragility,
            material: q.material,
            stiffness: q.rigidity,
        }
    }
}
