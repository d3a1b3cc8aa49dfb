//! Hand geometry, joint configurations and forward kinematics.
//!
//! Frame: the palm lies in the `y`-`z` plane with `+x` pointing out of the
//! palm and `+z` toward the fingertips. Fingers are planar three-link chains
//! that flex from `+z` toward `+x`; the distal joint is coupled to the
//! middle one. The thumb is a two-link chain whose flexion plane is rotated
//! about `z` by the opposition joint.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HandError;

pub const JOINT_COUNT: usize = 10;

pub type Vec3 = [f64; 3];

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn centroid(points: &[Vec3]) -> Vec3 {
    let sum = points.iter().fold([0.0; 3], |acc, p| add(acc, *p));
    scale(sum, 1.0 / points.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Little,
}

impl Finger {
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Little,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Joint indices driven by this finger.
    pub fn joints(self) -> [usize; 2] {
        let i = self.index();
        [2 * i, 2 * i + 1]
    }

    pub fn name(self) -> &'static str {
        match self {
            Finger::Thumb => "thumb",
            Finger::Index => "index",
            Finger::Middle => "middle",
            Finger::Ring => "ring",
            Finger::Little => "little",
        }
    }
}

impl fmt::Display for Finger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThumbGeometry {
    pub base: Vec3,
    pub links: [f64; 2],
    /// Distal link angle is `(1 + coupling) * flex`.
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerGeometry {
    pub name: Finger,
    pub base: Vec3,
    pub links: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandGeometry {
    pub thumb: ThumbGeometry,
    /// Index, middle, ring, little.
    pub fingers: [FingerGeometry; 4],
    /// Distal joint angle as a multiple of the middle joint.
    pub distal_coupling: f64,
    /// Pad centre distance from the fingertip, along the palmar normal.
    pub pad_offset: f64,
    pub contact_tolerance: f64,
    /// `[min, max]` in radians per joint.
    pub servo_ranges: [[f64; 2]; JOINT_COUNT],
}

const BUILTIN_GEOMETRY: &str = include_str!("../../data/hand/geometry.json");

impl HandGeometry {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN_GEOMETRY).expect("bundled geometry is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HandError> {
        let text = std::fs::read_to_string(path)?;
        let geometry: HandGeometry = serde_json::from_str(&text)?;
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn validate(&self) -> Result<(), HandError> {
        let links = self
            .thumb
            .links
            .iter()
            .chain(self.fingers.iter().flat_map(|f| &f.links));
        if links.into_iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(HandError::Table("link lengths must be positive".into()));
        }
        for (i, f) in self.fingers.iter().enumerate() {
            if f.name != Finger::ALL[i + 1] {
                return Err(HandError::Table(format!(
                    "finger {} must be {}",
                    i + 1,
                    Finger::ALL[i + 1]
                )));
            }
        }
        if self.servo_ranges.iter().any(|[lo, hi]| !(lo <= hi)) {
            return Err(HandError::Table("servo range with min > max".into()));
        }
        Ok(())
    }
}

impl Default for HandGeometry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Ten joint angles: thumb opposition, thumb flexion, then proximal and
/// middle flexion for index, middle, ring and little.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandConfiguration {
    pub theta: [f64; JOINT_COUNT],
}

impl HandConfiguration {
    /// Validated against the servo ranges.
    pub fn new(theta: [f64; JOINT_COUNT], geometry: &HandGeometry) -> Result<Self, HandError> {
        let config = HandConfiguration { theta };
        config.check(geometry)?;
        Ok(config)
    }

    pub fn check(&self, geometry: &HandGeometry) -> Result<(), HandError> {
        // a hair of slack absorbs interpolation rounding at the limits
        const SLACK: f64 = 1e-12;
        for (joint, (&value, &[min, max])) in
            self.theta.iter().zip(&geometry.servo_ranges).enumerate()
        {
            if !(value >= min - SLACK && value <= max + SLACK) {
                return Err(HandError::JointOutOfRange {
                    joint,
                    value,
                    min,
                    max,
                });
            }
        }
        Ok(())
    }

    /// `open + alpha * (closed - open)` on the joints of `fingers`; other
    /// joints keep their `open` value.
    pub fn interpolate(
        open: &HandConfiguration,
        closed: &HandConfiguration,
        fingers: &[Finger],
        alpha: f64,
    ) -> HandConfiguration {
        let mut theta = open.theta;
        for f in fingers {
            for j in f.joints() {
                theta[j] = open.theta[j] + alpha * (closed.theta[j] - open.theta[j]);
            }
        }
        HandConfiguration { theta }
    }
}

/// Fingertip and pad positions for all five digits, indexed by [`Finger`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPose {
    pub tips: [Vec3; 5],
    pub pads: [Vec3; 5],
}

impl HandPose {
    pub fn tip(&self, finger: Finger) -> Vec3 {
        self.tips[finger.index()]
    }

    pub fn pad(&self, finger: Finger) -> Vec3 {
        self.pads[finger.index()]
    }

    fn opposing(points: &[Vec3; 5], fingers: &[Finger]) -> Vec3 {
        let pts: Vec<Vec3> = fingers
            .iter()
            .filter(|f| **f != Finger::Thumb)
            .map(|f| points[f.index()])
            .collect();
        if pts.is_empty() {
            points[Finger::Index.index()]
        } else {
            centroid(&pts)
        }
    }

    /// Virtual-finger distance: thumb tip to the centroid of the opposing
    /// fingertips in `fingers` (the index alone if none are listed).
    pub fn virtual_finger_distance(&self, fingers: &[Finger]) -> f64 {
        distance(self.tips[0], Self::opposing(&self.tips, fingers))
    }

    /// Same as [`Self::virtual_finger_distance`] but between pads: the
    /// size of an object that the pads would just touch.
    pub fn pad_distance(&self, fingers: &[Finger]) -> f64 {
        distance(self.pads[0], Self::opposing(&self.pads, fingers))
    }

    /// Thumb pad and centroid of the opposing pads.
    pub fn opposing_pads(&self, fingers: &[Finger]) -> (Vec3, Vec3) {
        (self.pads[0], Self::opposing(&self.pads, fingers))
    }
}

/// Tip and pad of one planar finger from its proximal and middle angles.
pub fn finger_chain(
    finger: &FingerGeometry,
    coupling: f64,
    prox: f64,
    mid: f64,
    pad: f64,
) -> (Vec3, Vec3) {
    let phis = [prox, prox + mid, prox + mid + coupling * mid];
    let mut p = finger.base;
    for (len, phi) in finger.links.iter().zip(phis) {
        p = add(p, [len * phi.sin(), 0.0, len * phi.cos()]);
    }
    let last = phis[2];
    let normal = [last.cos(), 0.0, -last.sin()];
    (p, add(p, scale(normal, pad)))
}

/// Tip and pad of the thumb. At zero flexion it points along `-z`; it
/// swings through the opposition direction `u` toward `+z`.
pub fn thumb_chain(thumb: &ThumbGeometry, opposition: f64, flex: f64, pad: f64) -> (Vec3, Vec3) {
    let u = [opposition.sin(), opposition.cos(), 0.0];
    let z = [0.0, 0.0, 1.0];
    let phis = [flex, flex * (1.0 + thumb.coupling)];
    let mut p = thumb.base;
    for (len, phi) in thumb.links.iter().zip(phis) {
        p = add(
            p,
            scale(sub(scale(u, phi.sin()), scale(z, phi.cos())), *len),
        );
    }
    let normal = add(scale(u, phis[1].cos()), scale(z, phis[1].sin()));
    (p, add(p, scale(normal, pad)))
}

/// Serial-chain forward kinematics for every digit.
pub fn forward_kinematics(
    config: &HandConfiguration,
    geometry: &HandGeometry,
) -> Result<HandPose, HandError> {
    config.check(geometry)?;
    Ok(pose_unchecked(config, geometry))
}

pub(crate) fn pose_unchecked(config: &HandConfiguration, geometry: &HandGeometry) -> HandPose {
    let t = &config.theta;
    let mut tips = [[0.0; 3]; 5];
    let mut pads = [[0.0; 3]; 5];
    let (tip, pad) = thumb_chain(&geometry.thumb, t[0], t[1], geometry.pad_offset);
    tips[0] = tip;
    pads[0] = pad;
    for (i, f) in geometry.fingers.iter().enumerate() {
        let (tip, pad) = finger_chain(
            f,
            geometry.distal_coupling,
            t[2 + 2 * i],
            t[3 + 2 * i],
            geometry.pad_offset,
        );
        tips[i + 1] = tip;
        pads[i + 1] = pad;
    }
    HandPose { tips, pads }
}
