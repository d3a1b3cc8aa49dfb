//! From a grasp class and an object to a closure trajectory.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::closure::ClosureModel;
use super::geometry::{
    add, cross, dot, norm, pose_unchecked, scale, sub, Finger, HandConfiguration, HandGeometry,
    Vec3,
};
use super::topology::GraspTopology;
use super::HandError;
use crate::knowledge_base::ObjectRecord;
use crate::learner::GraspClass;

/// Size of the object along the grasp: a single dimension, or the mean of
/// two or three for circular and spherical grasps.
pub fn grasp_dimension_size(class: GraspClass, record: &ObjectRecord) -> Result<f64, HandError> {
    let dims = [record.a, record.b, record.c];
    let letters = class.grasp_dim().indices();
    let mut sum = 0.0;
    for &i in letters {
        let v = dims[i];
        if !(v.is_finite() && v > 0.0) {
            return Err(HandError::MissingDimension {
                class,
                dimension: ["a", "b", "c"][i],
            });
        }
        sum += v;
    }
    Ok(sum / letters.len() as f64)
}

/// Object-centred frame at the planned contact pose. `axes[0]` runs from
/// the thumb pad toward the opposing pads, `axes[1]` follows the finger
/// row as closely as possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspFrame {
    pub center: Vec3,
    pub axes: [Vec3; 3],
}

impl GraspFrame {
    fn from_pads(thumb: Vec3, opposing: Vec3) -> Result<Self, HandError> {
        let gap = sub(opposing, thumb);
        let len = norm(gap);
        if len < 1e-9 {
            return Err(HandError::DegenerateFit(
                "pads coincide at the contact pose".into(),
            ));
        }
        let e1 = scale(gap, 1.0 / len);
        let y = [0.0, 1.0, 0.0];
        let mut e2 = sub(y, scale(e1, dot(y, e1)));
        if norm(e2) < 1e-9 {
            e2 = [0.0, 0.0, 1.0];
            e2 = sub(e2, scale(e1, dot(e2, e1)));
        }
        let e2 = scale(e2, 1.0 / norm(e2));
        Ok(GraspFrame {
            center: scale(add(thumb, opposing), 0.5),
            axes: [e1, e2, cross(e1, e2)],
        })
    }

    /// Coordinates of `p` in this frame.
    pub fn local(&self, p: Vec3) -> Vec3 {
        let d = sub(p, self.center);
        [
            dot(d, self.axes[0]),
            dot(d, self.axes[1]),
            dot(d, self.axes[2]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSample {
    /// Normalized time in `[0, 1]`.
    pub t: f64,
    /// Per-digit completion, 1 at the contact pose; 0 for digits that hold
    /// the open pose. Indexed by [`Finger`].
    pub profile: [f64; 5],
    /// Absolute closure `t * alpha_star` applied to participating joints.
    pub alpha: f64,
    pub config: HandConfiguration,
    pub d_vf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspPlan {
    pub class: GraspClass,
    pub d_o: f64,
    /// Target virtual-finger distance from the linear model.
    pub d_vf: f64,
    pub alpha_star: f64,
    pub participating: Vec<Finger>,
    pub frame: GraspFrame,
    pub samples: Vec<PlanSample>,
}

impl GraspPlan {
    pub fn final_config(&self) -> &HandConfiguration {
        &self
            .samples
            .last()
            .expect("plans have at least two samples")
            .config
    }

    pub fn trajectory(&self) -> impl Iterator<Item = &HandConfiguration> {
        self.samples.iter().map(|s| &s.config)
    }
}

fn d_vf_at(topology: &GraspTopology, geometry: &HandGeometry, alpha: f64) -> f64 {
    pose_unchecked(&topology.configuration_at(alpha), geometry)
        .virtual_finger_distance(&topology.participating)
}

/// Plans a straight-line closure to the pose whose virtual-finger distance
/// equals `w1 * d_o + w0`.
///
/// The model is inverted on the kinematics rather than on the line itself
/// so the final pose reproduces the target distance exactly.
pub fn plan_grasp(
    class: GraspClass,
    record: &ObjectRecord,
    closure: &ClosureModel,
    topology: &GraspTopology,
    geometry: &HandGeometry,
    steps: usize,
) -> Result<GraspPlan, HandError> {
    if topology.class != class || closure.class != class {
        return Err(HandError::Table(format!(
            "plan for {class} given tables for {} and {}",
            topology.class, closure.class
        )));
    }
    if steps < 2 {
        return Err(HandError::TooFewSamples(steps));
    }
    let d_o = grasp_dimension_size(class, record)?;
    let envelope = || HandError::Envelope {
        class,
        d_o,
        min: closure.d_o_range[0],
        max: closure.d_o_range[1],
    };
    if !closure.contains(d_o) {
        return Err(envelope());
    }
    let target = closure.predict(d_o);

    // d_vf falls as the hand closes
    let [mut lo, mut hi] = closure.alpha_range;
    if d_vf_at(topology, geometry, lo) < target || d_vf_at(topology, geometry, hi) > target {
        return Err(envelope());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d_vf_at(topology, geometry, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let alpha_star = 0.5 * (lo + hi);
    if !(0.0..=1.0).contains(&alpha_star) {
        return Err(envelope());
    }

    let mut samples = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let alpha = t * alpha_star;
        let config = topology.configuration_at(alpha);
        config.check(geometry)?;
        let d_vf =
            pose_unchecked(&config, geometry).virtual_finger_distance(&topology.participating);
        let mut profile = [0.0; 5];
        for f in &topology.participating {
            profile[f.index()] = t;
        }
        samples.push(PlanSample {
            t,
            profile,
            alpha,
            config,
            d_vf,
        });
    }
    let contact = pose_unchecked(&samples[steps - 1].config, geometry);
    let (thumb, opposing) = contact.opposing_pads(&topology.participating);
    Ok(GraspPlan {
        class,
        d_o,
        d_vf: target,
        alpha_star,
        participating: topology.participating.clone(),
        frame: GraspFrame::from_pads(thumb, opposing)?,
        samples,
    })
}

/// Writes `t,theta_1..theta_10,d_vf` rows.
pub fn write_plan_csv<W: Write>(plan: &GraspPlan, writer: W) -> Result<(), HandError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((1..=10).map(|i| format!("theta_{i}")));
    header.push("d_vf".into());
    w.write_record(&header)?;
    for s in &plan.samples {
        let mut row = vec![s.t.to_string()];
        row.extend(s.config.theta.iter().map(|v| v.to_string()));
        row.push(s.d_vf.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::{fit_closure_model, forward_kinematics, TopologyTable};
    use crate::knowledge_base::fixtures::reference_records;
    use approx::assert_abs_diff_eq;

    fn record(label: &str) -> ObjectRecord {
        reference_records()
            .into_iter()
            .find(|r| r.label == label)
            .unwrap()
    }

    fn setup(class: GraspClass) -> (HandGeometry, GraspTopology, ClosureModel) {
        let g = HandGeometry::builtin();
        let t = TopologyTable::builtin().get(class).unwrap().clone();
        let m = fit_closure_model(&t, &g, 50).unwrap();
        (g, t, m)
    }

    #[test]
    fn dimension_sizes() {
        assert_eq!(
            grasp_dimension_size(GraspClass::RpB, &record("calculator")).unwrap(),
            7.9
        );
        assert_abs_diff_eq!(
            grasp_dimension_size(GraspClass::WcAbc, &record("tennis ball")).unwrap(),
            6.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            grasp_dimension_size(GraspClass::RcAb, &record("wood disk")).unwrap(),
            7.2
        );
    }

    #[test]
    fn plan_starts_open_and_ends_on_target() {
        let (g, t, m) = setup(GraspClass::RpB);
        let plan = plan_grasp(GraspClass::RpB, &record("calculator"), &m, &t, &g, 30).unwrap();
        assert_eq!(plan.samples[0].config, t.open());
        let fk = forward_kinematics(plan.final_config(), &g).unwrap();
        let d = fk.virtual_finger_distance(&t.participating);
        assert!((d - m.predict(7.9)).abs() < 0.1);
        assert_eq!(
            plan.samples.last().unwrap().profile[Finger::Index.index()],
            1.0
        );
        assert_eq!(
            plan.samples.last().unwrap().profile[Finger::Ring.index()],
            0.0
        );
    }

    #[test]
    fn tennis_ball_power_sphere() {
        let (g, t, m) = setup(GraspClass::WcAbc);
        let plan = plan_grasp(GraspClass::WcAbc, &record("tennis ball"), &m, &t, &g, 20).unwrap();
        assert_abs_diff_eq!(plan.d_vf, m.w1 * 6.4 + m.w0, epsilon = 1e-12);
        assert_abs_diff_eq!(plan.samples.last().unwrap().d_vf, plan.d_vf, epsilon = 1e-6);
    }

    #[test]
    fn trajectory_is_linear_monotone_and_in_range() {
        let (g, t, m) = setup(GraspClass::WhBc);
        let plan = plan_grasp(GraspClass::WhBc, &record("water bottle"), &m, &t, &g, 40).unwrap();
        let mut last = f64::INFINITY;
        for s in &plan.samples {
            s.config.check(&g).unwrap();
            for j in 0..10 {
                let expect = t.open_pose[j]
                    + if t.participating.iter().any(|f| f.joints().contains(&j)) {
                        s.alpha * (t.closed_pose[j] - t.open_pose[j])
                    } else {
                        0.0
                    };
                assert_abs_diff_eq!(s.config.theta[j], expect, epsilon = 1e-12);
            }
            assert!(s.d_vf <= last + 1e-12);
            last = s.d_vf;
        }
    }

    #[test]
    fn outside_envelope() {
        let (g, t, m) = setup(GraspClass::RpB);
        let mut huge = record("calculator");
        huge.b = 40.0;
        huge.a = 50.0;
        let err = plan_grasp(GraspClass::RpB, &huge, &m, &t, &g, 10).unwrap_err();
        assert!(err.to_string().contains("outside grasp envelope"), "{err}");
    }

    #[test]
    fn csv_export() {
        let (g, t, m) = setup(GraspClass::RpB);
        let plan = plan_grasp(GraspClass::RpB, &record("calculator"), &m, &t, &g, 5).unwrap();
        let mut buf = Vec::new();
        write_plan_csv(&plan, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,theta_1,theta_2,theta_3,theta_4,theta_5,theta_6,theta_7,theta_8,theta_9,theta_10,d_vf"
        );
        assert_eq!(lines.count(), 5);
    }
}
