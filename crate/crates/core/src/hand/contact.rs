//! Geometric contact simulation against a box or sphere.

use serde::{Deserialize, Serialize};

use super::geometry::{norm, pose_unchecked, Finger, HandGeometry};
use super::plan::{GraspFrame, GraspPlan};
use super::topology::GraspTopology;
use crate::knowledge_base::{ObjectRecord, Shape};

/// Closure increment used when stepping the fingers.
pub const CONTACT_STEP: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SimObject {
    /// Full extents along the frame axes.
    Box {
        frame: GraspFrame,
        extents: [f64; 3],
    },
    Sphere {
        frame: GraspFrame,
        diameter: f64,
    },
}

impl SimObject {
    /// The record placed at the plan's grasp frame: a sphere of the grasp
    /// size for radial objects, otherwise a box with the grasp size along
    /// the thumb axis and the longer remaining extent along the finger row.
    pub fn for_plan(plan: &GraspPlan, record: &ObjectRecord) -> SimObject {
        if record.shape == Shape::Radial {
            return SimObject::Sphere {
                frame: plan.frame,
                diameter: plan.d_o,
            };
        }
        let dims = [record.a, record.b, record.c];
        let used = plan.class.grasp_dim().indices();
        let mut rest: Vec<f64> = (0..3)
            .filter(|i| !used.contains(i))
            .map(|i| dims[i])
            .collect();
        while rest.len() < 2 {
            rest.push(plan.d_o);
        }
        let (wide, narrow) = (rest[0].max(rest[1]), rest[0].min(rest[1]));
        SimObject::Box {
            frame: plan.frame,
            extents: [plan.d_o, wide, narrow],
        }
    }

    pub fn frame(&self) -> &GraspFrame {
        match self {
            SimObject::Box { frame, .. } | SimObject::Sphere { frame, .. } => frame,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SimObject::Box { extents, .. } => extents.iter().any(|e| *e <= 0.0),
            SimObject::Sphere { diameter, .. } => *diameter <= 0.0,
        }
    }

    /// Signed distance from the surface; negative inside.
    pub fn signed_distance(&self, p: [f64; 3]) -> f64 {
        let q = self.frame().local(p);
        match self {
            SimObject::Sphere { diameter, .. } => norm(q) - diameter / 2.0,
            SimObject::Box { extents, .. } => {
                let d: [f64; 3] = std::array::from_fn(|i| q[i].abs() - extents[i] / 2.0);
                let outside = norm(d.map(|v| v.max(0.0)));
                let inside = d[0].max(d[1]).max(d[2]).min(0.0);
                outside + inside
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerContact {
    pub finger: Finger,
    /// Closure at which the pad touched; `None` if it never did.
    pub stop_alpha: Option<f64>,
    /// The pad was already inside the object in the open pose.
    pub started_inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub contacts: Vec<FingerContact>,
    /// Thumb and at least one opposing finger touched.
    pub secured: bool,
}

impl ContactReport {
    pub fn stop(&self, finger: Finger) -> Option<f64> {
        self.contacts
            .iter()
            .find(|c| c.finger == finger)
            .and_then(|c| c.stop_alpha)
    }
}

/// Closes every participating digit from the open pose, past the planned
/// contact if needed, until its pad is within the contact tolerance of the
/// surface. Digits stop independently. An object with no volume is never
/// touched.
pub fn simulate_contact(
    plan: &GraspPlan,
    object: &SimObject,
    topology: &GraspTopology,
    geometry: &HandGeometry,
) -> ContactReport {
    let tol = geometry.contact_tolerance;
    let fingers = &plan.participating;
    let pad_distance = |alpha: f64, f: Finger| {
        let pose = pose_unchecked(&topology.configuration_at(alpha), geometry);
        object.signed_distance(pose.pad(f))
    };
    let mut contacts: Vec<FingerContact> = fingers
        .iter()
        .map(|&finger| FingerContact {
            finger,
            stop_alpha: None,
            started_inside: !object.is_empty() && pad_distance(0.0, finger) <= tol,
        })
        .collect();
    if !object.is_empty() {
        let steps = (1.0 / CONTACT_STEP).round() as usize;
        for k in 0..=steps {
            let alpha = k as f64 * CONTACT_STEP;
            let pose = pose_unchecked(&topology.configuration_at(alpha), geometry);
            let mut open = false;
            for c in contacts
                .iter_mut()
                .filter(|c| c.stop_alpha.is_none() && !c.started_inside)
            {
                if object.signed_distance(pose.pad(c.finger)) <= tol {
                    c.stop_alpha = Some(alpha);
                } else {
                    open = true;
                }
            }
            if !open {
                break;
            }
        }
    }
    let thumb = contacts
        .iter()
        .any(|c| c.finger == Finger::Thumb && c.stop_alpha.is_some());
    let opposing = contacts
        .iter()
        .any(|c| c.finger != Finger::Thumb && c.stop_alpha.is_some());
    ContactReport {
        contacts,
        secured: thumb && opposing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::{fit_closure_model, plan_grasp, TopologyTable};
    use crate::knowledge_base::fixtures::reference_records;
    use crate::learner::GraspClass;

    fn plan_for(
        label: &str,
        class: GraspClass,
    ) -> (GraspPlan, ObjectRecord, GraspTopology, HandGeometry) {
        let g = HandGeometry::builtin();
        let t = TopologyTable::builtin().get(class).unwrap().clone();
        let m = fit_closure_model(&t, &g, 50).unwrap();
        let r = reference_records()
            .into_iter()
            .find(|r| r.label == label)
            .unwrap();
        let p = plan_grasp(class, &r, &m, &t, &g, 20).unwrap();
        (p, r, t, g)
    }

    #[test]
    fn box_signed_distance() {
        let frame = GraspFrame {
            center: [0.0; 3],
            axes: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
        let b = SimObject::Box {
            frame,
            extents: [2.0, 4.0, 6.0],
        };
        assert_eq!(b.signed_distance([3.0, 0.0, 0.0]), 2.0);
        assert_eq!(b.signed_distance([0.0, 0.0, 0.0]), -1.0);
        assert!((b.signed_distance([2.0, 3.0, 0.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn calculator_pinch_is_secured() {
        let (p, r, t, g) = plan_for("calculator", GraspClass::RpB);
        let report = simulate_contact(&p, &SimObject::for_plan(&p, &r), &t, &g);
        assert!(report.secured, "{report:?}");
    }

    #[test]
    fn sphere_of_planned_size_stops_near_plan() {
        let (p, _, t, g) = plan_for("tennis ball", GraspClass::WcAbc);
        let sphere = SimObject::Sphere {
            frame: p.frame,
            diameter: p.d_o,
        };
        let report = simulate_contact(&p, &sphere, &t, &g);
        assert!(report.secured);
        let thumb = report.stop(Finger::Thumb).unwrap();
        assert!(
            (thumb - p.alpha_star).abs() <= 0.05,
            "{thumb} vs {}",
            p.alpha_star
        );
    }

    #[test]
    fn oversized_object_is_not_secured() {
        let (p, _, t, g) = plan_for("calculator", GraspClass::RpB);
        let huge = SimObject::Sphere {
            frame: p.frame,
            diameter: 60.0,
        };
        let report = simulate_contact(&p, &huge, &t, &g);
        assert!(!report.secured);
        assert!(report.contacts.iter().all(|c| c.stop_alpha.is_none()));
    }

    #[test]
    fn empty_object_is_never_touched() {
        let (p, _, t, g) = plan_for("calculator", GraspClass::RpB);
        let point = SimObject::Sphere {
            frame: p.frame,
            diameter: 0.0,
        };
        let report = simulate_contact(&p, &point, &t, &g);
        assert!(!report.secured);
        assert!(report
            .contacts
            .iter()
            .all(|c| c.stop_alpha.is_none() && !c.started_inside));
    }
}
