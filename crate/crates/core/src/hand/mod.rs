//! Hand model: canonical poses per grasp class, forward kinematics of a
//! ten-joint hand, the linear virtual-finger closure model, straight-line
//! grasp plans and a geometric contact check.

mod closure;
mod contact;
mod geometry;
mod plan;
mod topology;

use thiserror::Error;

pub use closure::{fit_closure_model, fit_line, ClosureModel, LineFit};
pub use contact::{simulate_contact, ContactReport, FingerContact, SimObject, CONTACT_STEP};
pub use geometry::{
    finger_chain, forward_kinematics, thumb_chain, Finger, FingerGeometry, HandConfiguration,
    HandGeometry, HandPose, ThumbGeometry, Vec3, JOINT_COUNT,
};
pub use plan::{
    grasp_dimension_size, plan_grasp, write_plan_csv, GraspFrame, GraspPlan, PlanSample,
};
pub use topology::{GraspTopology, TopologyTable, TOPOLOGY_VERSION};

use crate::learner::GraspClass;

/// Samples used when fitting closure models for planning.
pub const DEFAULT_FIT_SAMPLES: usize = 50;

#[derive(Debug, Error)]
pub enum HandError {
    #[error("joint {joint} at {value} is outside [{min}, {max}]")]
    JointOutOfRange {
        joint: usize,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{class}: object dimension outside grasp envelope ({d_o:.2} cm not in [{min:.2}, {max:.2}])")]
    Envelope {
        class: GraspClass,
        d_o: f64,
        min: f64,
        max: f64,
    },
    #[error("{class} needs dimension {dimension}")]
    MissingDimension {
        class: GraspClass,
        dimension: &'static str,
    },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("no topology for {0}")]
    NoTopology(GraspClass),
    #[error("bad hand table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Geometry, topologies and their fitted closure models, ready to plan.
#[derive(Debug, Clone)]
pub struct HandModel {
    pub geometry: HandGeometry,
    pub topologies: TopologyTable,
    pub closures: Vec<ClosureModel>,
}

impl HandModel {
    pub fn new(geometry: HandGeometry, topologies: TopologyTable) -> Result<Self, HandError> {
        geometry.validate()?;
        topologies.validate(&geometry)?;
        let closures = GraspClass::ALL
            .iter()
            .map(|c| fit_closure_model(topologies.get(*c)?, &geometry, DEFAULT_FIT_SAMPLES))
            .collect::<Result<_, _>>()?;
        Ok(HandModel {
            geometry,
            topologies,
            closures,
        })
    }

    pub fn builtin() -> Self {
        Self::new(HandGeometry::builtin(), TopologyTable::builtin())
            .expect("bundled hand tables are consistent")
    }

    pub fn closure(&self, class: GraspClass) -> &ClosureModel {
        &self.closures[class.index()]
    }

    pub fn plan(
        &self,
        class: GraspClass,
        record: &crate::knowledge_base::ObjectRecord,
        steps: usize,
    ) -> Result<GraspPlan, HandError> {
        plan_grasp(
            class,
            record,
            self.closure(class),
            self.topologies.get(class)?,
            &self.geometry,
            steps,
        )
    }

    /// Plans, then closes on the record's box or sphere.
    pub fn plan_and_simulate(
        &self,
        class: GraspClass,
        record: &crate::knowledge_base::ObjectRecord,
        steps: usize,
    ) -> Result<(GraspPlan, ContactReport), HandError> {
        let plan = self.plan(class, record, steps)?;
        let object = SimObject::for_plan(&plan, record);
        let report = simulate_contact(&plan, &object, self.topologies.get(class)?, &self.geometry);
        Ok((plan, report))
    }
}
