//! Fully connected feed-forward network whose weights live in one flat vector.
//!
//! Hidden layers use ReLU, the two-node output layer uses the logistic
//! sigmoid. Output node 0 scores the negative class, node 1 the positive one.
//!
//! Flat layout, layer by layer: the `fan_out x fan_in` weight matrix in
//! row-major order, then the `fan_out` biases.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, POSITIVE};
use crate::error::{check_len, Error, Result};
use crate::objective::{Bounds, ObjectiveSpec};

pub const OUTPUT_SIZE: usize = 2;
/// Box bound applied to every weight and bias.
pub const WEIGHT_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub input_size: usize,
    pub hidden_sizes: Vec<usize>,
}

impl NetworkTopology {
    pub fn new(input_size: usize, hidden_sizes: Vec<usize>) -> Result<Self> {
        if input_size == 0 || hidden_sizes.contains(&0) {
            return Err(Error::config(format!(
                "layer sizes must be positive: input {input_size}, hidden {hidden_sizes:?}"
            )));
        }
        Ok(Self {
            input_size,
            hidden_sizes,
        })
    }

    /// Two hidden layers of `input` and `ceil(input / 2)` nodes.
    pub fn default_for(input_size: usize) -> Self {
        Self {
            input_size,
            hidden_sizes: vec![input_size, input_size.div_ceil(2)],
        }
    }

    /// `(fan_in, fan_out)` for every layer including the output layer.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut sizes = vec![self.input_size];
        sizes.extend(&self.hidden_sizes);
        sizes.push(OUTPUT_SIZE);
        sizes.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_shapes()
            .iter()
            .map(|(fan_in, fan_out)| fan_in * fan_out + fan_out)
            .sum()
    }

    fn widest(&self) -> usize {
        self.hidden_sizes
            .iter()
            .copied()
            .chain([self.input_size, OUTPUT_SIZE])
            .max()
            .unwrap_or(OUTPUT_SIZE)
    }
}

/// One dense layer in matrix form.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    /// Row-major `fan_out x fan_in`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Splits a flat parameter vector into layers.
pub fn unflatten(params: &[f64], topo: &NetworkTopology) -> Result<Vec<Layer>> {
    check_len(topo.parameter_count(), params.len())?;
    let mut offset = 0;
    Ok(topo
        .layer_shapes()
        .into_iter()
        .map(|(fan_in, fan_out)| {
            let w_end = offset + fan_in * fan_out;
            let b_end = w_end + fan_out;
            let layer = Layer {
                fan_in,
                fan_out,
                weights: params[offset..w_end].to_vec(),
                biases: params[w_end..b_end].to_vec(),
            };
            offset = b_end;
            layer
        })
        .collect())
}

pub fn flatten(layers: &[Layer]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
        .collect()
}

/// Logistic function kept inside the open unit interval; in `f64` it would
/// otherwise round to exactly 1 for `z` above about 37.
fn sigmoid(z: f64) -> f64 {
    (1.0 / (1.0 + (-z).exp())).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Reusable activation buffers for [`forward_into`].
#[derive(Debug, Clone)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
    shapes: Vec<(usize, usize)>,
}

impl Scratch {
    pub fn new(topo: &NetworkTopology) -> Self {
        let w = topo.widest();
        Self {
            a: vec![0.0; w],
            b: vec![0.0; w],
            shapes: topo.layer_shapes(),
        }
    }
}

/// Dot product over four interleaved partial sums, which lets the compiler
/// vectorize it.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut lanes = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            lanes[k] += x[k] * y[k];
        }
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// Forward pass without shape checks. Caller guarantees
/// `x.len() == input_size`, `params.len() == parameter_count` and that
/// `scratch` was built for `topo`.
pub fn forward_into(x: &[f64], params: &[f64], topo: &NetworkTopology, scratch: &mut Scratch) -> [f64; 2] {
    debug_assert_eq!(scratch.shapes, topo.layer_shapes());
    let last = scratch.shapes.len() - 1;
    scratch.a[..x.len()].copy_from_slice(x);
    let mut offset = 0;
    for l in 0..=last {
        let (fan_in, fan_out) = scratch.shapes[l];
        let (input, output) = (&scratch.a[..fan_in], &mut scratch.b[..fan_out]);
        let weights = &params[offset..offset + fan_in * fan_out];
        let biases = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
        for (o, (row, bias)) in output.iter_mut().zip(weights.chunks_exact(fan_in).zip(biases)) {
            let z = dot(row, input) + bias;
            *o = if l == last { sigmoid(z) } else { z.max(0.0) };
        }
        offset += fan_in * fan_out + fan_out;
        std::mem::swap(&mut scratch.a, &mut scratch.b);
    }
    [scratch.a[0], scratch.a[1]]
}

/// Output pair `(negative score, positive score)`, each strictly inside
/// `(0, 1)`.
pub fn forward(x: &[f64], params: &[f64], topo: &NetworkTopology) -> Result<[f64; 2]> {
    check_len(topo.input_size, x.len())?;
    check_len(topo.parameter_count(), params.len())?;
    Ok(forward_into(x, params, topo, &mut Scratch::new(topo)))
}

/// Predicted class index; exact ties go to the negative class.
pub fn decide(outputs: [f64; 2]) -> u8 {
    u8::from(outputs[1] > outputs[0])
}

fn check_shapes(params: &[f64], data: &Dataset, topo: &NetworkTopology) -> Result<()> {
    if data.is_empty() {
        return Err(Error::config("cannot score a network on an empty dataset"));
    }
    check_len(topo.input_size, data.n_features())?;
    check_len(topo.parameter_count(), params.len())
}

/// Root mean squared error between the outputs and one-hot targets, averaged
/// over samples and both output nodes.
pub fn rmse_loss(params: &[f64], data: &Dataset, topo: &NetworkTopology) -> Result<f64> {
    check_shapes(params, data, topo)?;
    Ok(rmse_unchecked(params, data, topo))
}

fn rmse_unchecked(params: &[f64], data: &Dataset, topo: &NetworkTopology) -> f64 {
    let mut scratch = Scratch::new(topo);
    let mut sum = 0.0;
    for (x, &label) in data.rows().zip(data.labels()) {
        let [o_neg, o_pos] = forward_into(x, params, topo, &mut scratch);
        let (t_neg, t_pos) = if label == POSITIVE { (0.0, 1.0) } else { (1.0, 0.0) };
        sum += (o_neg - t_neg).powi(2) + (o_pos - t_pos).powi(2);
    }
    (sum / (2 * data.len()) as f64).sqrt()
}

/// Predicted class index for every row.
pub fn predict(params: &[f64], data: &Dataset, topo: &NetworkTopology) -> Result<Vec<u8>> {
    check_len(topo.input_size, data.n_features())?;
    check_len(topo.parameter_count(), params.len())?;
    let mut scratch = Scratch::new(topo);
    Ok(data
        .rows()
        .map(|x| decide(forward_into(x, params, topo, &mut scratch)))
        .collect())
}

/// Fraction of rows whose predicted class matches the label.
pub fn accuracy(params: &[f64], data: &Dataset, topo: &NetworkTopology) -> Result<f64> {
    check_shapes(params, data, topo)?;
    let predictions = predict(params, data, topo)?;
    let hits = predictions
        .iter()
        .zip(data.labels())
        .filter(|(p, l)| p == l)
        .count();
    Ok(hits as f64 / data.len() as f64)
}

/// Training loss of the network as an optimization problem over its flat
/// weights, each bounded to `[-5, 5]`.
pub fn as_objective(data: Dataset, topo: NetworkTopology) -> Result<ObjectiveSpec> {
    check_shapes(&vec![0.0; topo.parameter_count()], &data, &topo)?;
    let bounds = Bounds::uniform(topo.parameter_count(), -WEIGHT_LIMIT, WEIGHT_LIMIT)?;
    let data = Arc::new(data);
    Ok(ObjectiveSpec::new(bounds, move |w: &[f64]| {
        rmse_unchecked(w, &data, &topo)
    }))
}
