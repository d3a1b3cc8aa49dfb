//! Linear virtual-finger model `d_vf = w1 * d_o + w0`.

use serde::{Deserialize, Serialize};

use super::geometry::{pose_unchecked, HandGeometry};
use super::topology::GraspTopology;
use super::HandError;
use crate::learner::GraspClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit, HandError> {
    if x.len() != y.len() {
        return Err(HandError::DegenerateFit(format!(
            "{} x values but {} y values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(HandError::TooFewSamples(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0).powi(2) {
        return Err(HandError::DegenerateFit("x is constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    // a perfectly flat y is explained exactly by slope 0
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LineFit {
        slope,
        intercept,
        r2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureModel {
    pub class: GraspClass,
    pub w1: f64,
    /// cm
    pub w0: f64,
    pub r2: f64,
    /// Object sizes (cm) the closure sub-range can hold.
    pub d_o_range: [f64; 2],
    pub alpha_range: [f64; 2],
}

impl ClosureModel {
    pub fn predict(&self, d_o: f64) -> f64 {
        self.w1 * d_o + self.w0
    }

    pub fn contains(&self, d_o: f64) -> bool {
        d_o >= self.d_o_range[0] && d_o <= self.d_o_range[1]
    }
}

/// Samples the closure uniformly over the topology's operating range and
/// regresses fingertip distance `d_vf` on pad distance `d_o`, the object
/// size the pads would be touching at that closure.
pub fn fit_closure_model(
    topology: &GraspTopology,
    geometry: &HandGeometry,
    samples: usize,
) -> Result<ClosureModel, HandError> {
    if samples < 2 {
        return Err(HandError::TooFewSamples(samples));
    }
    let [lo, hi] = topology.operating_range;
    let (mut d_o, mut d_vf) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    for k in 0..samples {
        let alpha = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let config = topology.configuration_at(alpha);
        config.check(geometry)?;
        let pose = pose_unchecked(&config, geometry);
        d_o.push(pose.pad_distance(&topology.participating));
        d_vf.push(pose.virtual_finger_distance(&topology.participating));
    }
    let fit = fit_line(&d_o, &d_vf)?;
    if !(fit.slope > 0.0) {
        return Err(HandError::DegenerateFit(format!(
            "{}: closure does not move the virtual fingers monotonically",
            topology.class
        )));
    }
    let min = d_o.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d_o.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ClosureModel {
        class: topology.class,
        w1: fit.slope,
        w0: fit.intercept,
        r2: fit.r2,
        d_o_range: [min, max],
        alpha_range: topology.operating_range,
    })
}
