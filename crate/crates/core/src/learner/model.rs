//! Fully-connected classifier: encoded features plus presence mask in,
//! softmax over the nine grasp classes out.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::knowledge_base::{Attribute, EncodedFeatures, ENCODED_WIDTH};

use super::classes::{GraspDistribution, CLASS_COUNT};
use super::LearnError;

/// Network input: 26 encoded values followed by the 9 presence bits.
pub const INPUT_WIDTH: usize = ENCODED_WIDTH + 9;
pub const MODEL_VERSION: u32 = 1;

/// Probabilities are clamped to this floor inside logarithms.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
}

/// Dense layer, weights row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                self.biases[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub version: u32,
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub layers: Vec<Layer>,
    pub seed: u64,
}

/// Network input for a feature vector. Continuous values are compressed
/// with `ln(1 + x)` so centimeters and grams share a scale; missing values
/// stay 0 and the mask tells the network which they are.
pub fn model_input(features: &EncodedFeatures) -> [f64; INPUT_WIDTH] {
    let mut x = [0.0; INPUT_WIDTH];
    for (i, v) in features.values.iter().enumerate() {
        x[i] = if i < 4 { v.max(0.0).ln_1p() } else { *v };
    }
    for (i, attr) in Attribute::ALL.into_iter().enumerate() {
        x[ENCODED_WIDTH + i] = if features.mask.contains(attr) {
            1.0
        } else {
            0.0
        };
    }
    x
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.into_iter().map(|v| v / sum).collect()
}

/// `-Σ t_j ln p_j` with `p_j` clamped to `[1e-12, 1]`.
pub fn cross_entropy(truth: &GraspDistribution, predicted: &GraspDistribution) -> f64 {
    truth
        .probabilities()
        .iter()
        .zip(predicted.probabilities())
        .map(|(t, p)| -t * p.clamp(PROBABILITY_FLOOR, 1.0).ln())
        .sum()
}

impl ClassifierModel {
    /// He-uniform weights and zero biases drawn from `seed`.
    pub fn new(hidden: &[usize], seed: u64) -> Self {
        let mut sizes = vec![INPUT_WIDTH];
        sizes.extend_from_slice(hidden);
        sizes.push(CLASS_COUNT);
        ClassifierModel::with_sizes(sizes, seed)
    }

    pub fn with_sizes(sizes: Vec<usize>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let mut layer = Layer::zeros(w[0], w[1]);
                let limit = (6.0 / w[0] as f64).sqrt();
                for v in &mut layer.weights {
                    *v = rng.gen_range(-limit..limit);
                }
                layer
            })
            .collect();
        ClassifierModel {
            version: MODEL_VERSION,
            sizes,
            activation: Activation::Relu,
            layers,
            seed,
        }
    }

    /// All weights and biases zero: predicts the uniform distribution.
    pub fn zeros(hidden: &[usize]) -> Self {
        let mut model = ClassifierModel::new(hidden, 0);
        for layer in &mut model.layers {
            layer.weights.fill(0.0);
        }
        model
    }

    pub fn input_width(&self) -> usize {
        self.sizes[0]
    }

    fn check_input(&self, x: &[f64]) -> Result<(), LearnError> {
        let out = *self.sizes.last().unwrap_or(&0);
        if x.len() != self.input_width() || out != CLASS_COUNT {
            return Err(LearnError::DimensionMismatch {
                expected: self.input_width(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Activations of every layer; the last entry is the softmax output.
    fn forward_all(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(acts.last().expect("input"));
            let a = if i + 1 == self.layers.len() {
                softmax(&z)
            } else {
                z.into_iter().map(|v| v.max(0.0)).collect()
            };
            acts.push(a);
        }
        acts
    }

    pub fn predict_input(&self, x: &[f64]) -> Result<GraspDistribution, LearnError> {
        self.check_input(x)?;
        let out = self.forward_all(x).pop().expect("output layer");
        let mut p = [0.0; CLASS_COUNT];
        p.copy_from_slice(&out);
        // renormalize away rounding so the sum check holds exactly enough
        let sum: f64 = p.iter().sum();
        GraspDistribution::new(p.map(|v| v / sum))
    }

    pub fn predict(&self, features: &EncodedFeatures) -> Result<GraspDistribution, LearnError> {
        self.predict_input(&model_input(features))
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Weights then biases, layer by layer.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<(), LearnError> {
        if params.len() != self.parameter_count() {
            return Err(LearnError::DimensionMismatch {
                expected: self.parameter_count(),
                found: params.len(),
            });
        }
        let mut rest = params;
        for l in &mut self.layers {
            let (w, r) = rest.split_at(l.weights.len());
            l.weights.copy_from_slice(w);
            let (b, r) = r.split_at(l.biases.len());
            l.biases.copy_from_slice(b);
            rest = r;
        }
        Ok(())
    }

    /// Cross-entropy of one example and its gradient with respect to
    /// [`parameters`](Self::parameters), by backpropagation.
    pub fn loss_and_gradient(
        &self,
        x: &[f64],
        truth: &GraspDistribution,
    ) -> Result<(f64, Vec<f64>), LearnError> {
        self.check_input(x)?;
        let acts = self.forward_all(x);
        let p = acts.last().expect("output");
        let t = truth.probabilities();
        let loss = t
            .iter()
            .zip(p)
            .map(|(t, p)| -t * p.clamp(PROBABILITY_FLOOR, 1.0).ln())
            .sum();
        let t_sum: f64 = t.iter().sum();
        // softmax + cross-entropy: dL/dz = p * Σt - t
        let mut delta: Vec<f64> = p.iter().zip(t).map(|(p, t)| p * t_sum - t).collect();

        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &acts[i];
            let mut gw = vec![0.0; layer.weights.len()];
            for o in 0..layer.outputs {
                for j in 0..layer.inputs {
                    gw[o * layer.inputs + j] = delta[o] * input[j];
                }
            }
            let gb = delta.clone();
            if i > 0 {
                let mut prev = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (j, w) in row.iter().enumerate() {
                        prev[j] += w * d;
                    }
                }
                // ReLU derivative on the previous layer's activation
                for (g, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *g = 0.0;
                    }
                }
                delta = prev;
            }
            grads.push((gw, gb));
        }
        grads.reverse();
        let flat = grads
            .into_iter()
            .flat_map(|(w, b)| w.into_iter().chain(b))
            .collect();
        Ok((loss, flat))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LearnError> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LearnError> {
        let model: ClassifierModel = serde_json::from_str(&fs::read_to_string(path)?)?;
        if model.version != MODEL_VERSION {
            return Err(LearnError::ModelVersion(model.version));
        }
        let consistent = model.layers.len() + 1 == model.sizes.len()
            && model
                .layers
                .iter()
                .zip(model.sizes.windows(2))
                .all(|(l, w)| {
                    l.inputs == w[0]
                        && l.outputs == w[1]
                        && l.weights.len() == w[0] * w[1]
                        && l.biases.len() == w[1]
                });
        if !consistent {
            return Err(LearnError::DimensionMismatch {
                expected: model.sizes.len(),
                found: model.layers.len() + 1,
            });
        }
        Ok(model)
    }
}
