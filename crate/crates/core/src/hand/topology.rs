//! Canonical grasp topologies: one open and one closed pose per class.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::{Finger, HandConfiguration, HandGeometry, JOINT_COUNT};
use super::HandError;
use crate::learner::GraspClass;

pub const TOPOLOGY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspTopology {
    pub class: GraspClass,
    /// Digits whose joints are scaled by the closure; the rest hold the
    /// open pose.
    pub participating: Vec<Finger>,
    pub open_pose: [f64; JOINT_COUNT],
    /// The fully closed canonical pose `h_k`.
    pub closed_pose: [f64; JOINT_COUNT],
    /// Closure sub-range `[lo, hi]` over which the linear model is fit.
    pub operating_range: [f64; 2],
}

impl GraspTopology {
    pub fn validate(&self, geometry: &HandGeometry) -> Result<(), HandError> {
        let class = self.class;
        let bad = |m: &str| HandError::Table(format!("{class}: {m}"));
        if !self.participating.contains(&Finger::Thumb)
            || !self.participating.iter().any(|f| *f != Finger::Thumb)
        {
            return Err(bad("needs the thumb and at least one opposing finger"));
        }
        let [lo, hi] = self.operating_range;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(bad("operating range must satisfy 0 <= lo < hi <= 1"));
        }
        HandConfiguration {
            theta: self.open_pose,
        }
        .check(geometry)?;
        HandConfiguration {
            theta: self.closed_pose,
        }
        .check(geometry)?;
        Ok(())
    }

    pub fn open(&self) -> HandConfiguration {
        HandConfiguration {
            theta: self.open_pose,
        }
    }

    pub fn closed(&self) -> HandConfiguration {
        HandConfiguration {
            theta: self.closed_pose,
        }
    }

    /// Joint configuration at closure `alpha`.
    pub fn configuration_at(&self, alpha: f64) -> HandConfiguration {
        HandConfiguration::interpolate(&self.open(), &self.closed(), &self.participating, alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyTable {
    pub version: u32,
    pub topologies: Vec<GraspTopology>,
}

const BUILTIN_TOPOLOGIES: &str = include_str!("../../data/hand/topologies.json");

impl TopologyTable {
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN_TOPOLOGIES).expect("bundled topologies are valid")
    }

    pub fn load(path: impl AsRef<Path>, geometry: &HandGeometry) -> Result<Self, HandError> {
        let text = std::fs::read_to_string(path)?;
        let table: TopologyTable = serde_json::from_str(&text)?;
        table.validate(geometry)?;
        Ok(table)
    }

    /// Every class exactly once, all poses inside the servo ranges.
    pub fn validate(&self, geometry: &HandGeometry) -> Result<(), HandError> {
        if self.version != TOPOLOGY_VERSION {
            return Err(HandError::Table(format!(
                "unsupported topology table version {}",
                self.version
            )));
        }
        for class in GraspClass::ALL {
            let n = self.topologies.iter().filter(|t| t.class == class).count();
            if n != 1 {
                return Err(HandError::Table(format!("{class} appears {n} times")));
            }
        }
        self.topologies
            .iter()
            .try_for_each(|t| t.validate(geometry))
    }

    pub fn get(&self, class: GraspClass) -> Result<&GraspTopology, HandError> {
        self.topologies
            .iter()
            .find(|t| t.class == class)
            .ok_or(HandError::NoTopology(class))
    }
}

impl Default for TopologyTable {
    fn default() -> Self {
        Self::builtin()
    }
}
