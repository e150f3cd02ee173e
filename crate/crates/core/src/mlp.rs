//! Sigmoid multilayer perceptron over a flat parameter vector.
//!
//! Parameters are laid out layer by layer. Within a layer, each destination
//! neuron's incoming weights come first (destination-major), followed by
//! that layer's biases. For `[2, 3, 1]` the 13 parameters are
//! `w0[0..2], w1[0..2], w2[0..2], b[0..3]` then `w[0..3], b[0]`.

use std::fmt;

use crate::error::{Error, Result};

/// Logistic activation.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Layer widths, input first and output last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MlpTopology {
    layer_sizes: Vec<usize>,
}

impl MlpTopology {
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self> {
        if layer_sizes.len() < 3 {
            return Err(Error::Parameter(format!(
                "topology needs input, hidden and output layers, got {layer_sizes:?}"
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::Parameter(format!("layer sizes must be >= 1, got {layer_sizes:?}")));
        }
        Ok(Self { layer_sizes })
    }

    /// `[n_in, hidden..., 1]`, the binary-classifier shape.
    pub fn binary(n_in: usize, hidden: &[usize]) -> Result<Self> {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(n_in);
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        Self::new(sizes)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn max_width(&self) -> usize {
        *self.layer_sizes.iter().max().unwrap()
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::Shape { expected: self.param_count(), actual: params.len() });
        }
        Ok(())
    }

    /// Splits a flat vector into per-layer weight matrices and biases.
    pub fn decode(&self, params: &[f64]) -> Result<Vec<LayerParams>> {
        self.check_params(params)?;
        let mut offset = 0;
        Ok(self
            .layer_sizes
            .windows(2)
            .map(|w| {
                let (n_src, n_dst) = (w[0], w[1]);
                let weights = params[offset..offset + n_src * n_dst]
                    .chunks(n_src)
                    .map(<[f64]>::to_vec)
                    .collect();
                offset += n_src * n_dst;
                let biases = params[offset..offset + n_dst].to_vec();
                offset += n_dst;
                LayerParams { weights, biases }
            })
            .collect())
    }

    /// Inverse of [`decode`](Self::decode).
    pub fn encode(&self, layers: &[LayerParams]) -> Result<Vec<f64>> {
        if layers.len() != self.layer_sizes.len() - 1 {
            return Err(Error::Shape { expected: self.layer_sizes.len() - 1, actual: layers.len() });
        }
        let mut out = Vec::with_capacity(self.param_count());
        for (layer, w) in layers.iter().zip(self.layer_sizes.windows(2)) {
            if layer.weights.len() != w[1] || layer.biases.len() != w[1] {
                return Err(Error::Shape { expected: w[1], actual: layer.weights.len() });
            }
            for row in &layer.weights {
                if row.len() != w[0] {
                    return Err(Error::Shape { expected: w[0], actual: row.len() });
                }
                out.extend_from_slice(row);
            }
            out.extend_from_slice(&layer.biases);
        }
        Ok(out)
    }

    /// Network output for one input vector.
    pub fn forward(&self, params: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        self.check_params(params)?;
        if input.len() != self.n_inputs() {
            return Err(Error::Shape { expected: self.n_inputs(), actual: input.len() });
        }
        let mut scratch = Scratch::new(self);
        Ok(scratch.forward(self, params, input).to_vec())
    }

    /// Percentage of misclassified samples; output >= 0.5 predicts class 1.
    pub fn classification_error(&self, params: &[f64], data: &Dataset) -> Result<f64> {
        self.check_binary(params, data)?;
        let mut scratch = Scratch::new(self);
        let wrong = (0..data.len())
            .filter(|&p| {
                let o = scratch.forward(self, params, data.row(p))[0];
                predict_label(o) != data.label(p)
            })
            .count();
        Ok(100.0 * wrong as f64 / data.len() as f64)
    }

    /// Mean squared error over samples and outputs, and its gradient.
    pub fn mse_loss_and_gradient(&self, params: &[f64], data: &Dataset) -> Result<(f64, Vec<f64>)> {
        self.check_binary(params, data)?;
        let mut grad = vec![0.0; params.len()];
        let mut scratch = Scratch::new(self);
        let mut loss = 0.0;
        let scale = 1.0 / data.len() as f64;
        for p in 0..data.len() {
            loss += scratch.backward(self, params, data.row(p), f64::from(data.label(p)), scale, &mut grad);
        }
        Ok((loss * scale, grad))
    }

    /// Mean squared error only.
    pub fn mse_loss(&self, params: &[f64], data: &Dataset) -> Result<f64> {
        self.check_binary(params, data)?;
        let mut scratch = Scratch::new(self);
        let sum: f64 = (0..data.len())
            .map(|p| {
                let o = scratch.forward(self, params, data.row(p))[0];
                (o - f64::from(data.label(p))).powi(2)
            })
            .sum();
        Ok(sum / data.len() as f64)
    }

    fn check_binary(&self, params: &[f64], data: &Dataset) -> Result<()> {
        self.check_params(params)?;
        if self.n_outputs() != 1 {
            return Err(Error::Parameter(format!(
                "binary objectives need a single output neuron, topology has {}",
                self.n_outputs()
            )));
        }
        if data.n_features() != self.n_inputs() {
            return Err(Error::Shape { expected: self.n_inputs(), actual: data.n_features() });
        }
        Ok(())
    }
}

impl fmt::Display for MlpTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.layer_sizes.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Maps a sigmoid output to a class label; exactly 0.5 goes to class 1.
#[inline]
pub fn predict_label(output: f64) -> u8 {
    u8::from(output >= 0.5)
}

/// Weights (`weights[dst][src]`) and biases of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

/// Per-layer activation buffers reused across samples.
struct Scratch {
    activations: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Scratch {
    fn new(topology: &MlpTopology) -> Self {
        Self {
            activations: topology.layer_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            delta: Vec::with_capacity(topology.max_width()),
            delta_prev: Vec::with_capacity(topology.max_width()),
        }
    }

    fn forward(&mut self, topology: &MlpTopology, params: &[f64], input: &[f64]) -> &[f64] {
        self.activations[0].copy_from_slice(input);
        let mut offset = 0;
        for (l, w) in topology.layer_sizes.windows(2).enumerate() {
            let (n_src, n_dst) = (w[0], w[1]);
            let (head, tail) = self.activations.split_at_mut(l + 1);
            let src = &head[l];
            let dst = &mut tail[0];
            let weights = &params[offset..offset + n_src * n_dst];
            let biases = &params[offset + n_src * n_dst..offset + n_src * n_dst + n_dst];
            for (j, out) in dst.iter_mut().enumerate() {
                let row = &weights[j * n_src..(j + 1) * n_src];
                let z: f64 = row.iter().zip(src).map(|(w, a)| w * a).sum::<f64>() + biases[j];
                *out = sigmoid(z);
            }
            offset += n_src * n_dst + n_dst;
        }
        self.activations.last().unwrap()
    }

    /// Accumulates `scale * d(o - target)^2 / dparams` into `grad` and
    /// returns the unscaled squared error.
    fn backward(
        &mut self,
        topology: &MlpTopology,
        params: &[f64],
        input: &[f64],
        target: f64,
        scale: f64,
        grad: &mut [f64],
    ) -> f64 {
        let o = self.forward(topology, params, input)[0];
        let err = o - target;
        self.delta.clear();
        self.delta.push(2.0 * err * scale * o * (1.0 - o));

        let sizes = &topology.layer_sizes;
        let mut offset = params.len();
        for l in (0..sizes.len() - 1).rev() {
            let (n_src, n_dst) = (sizes[l], sizes[l + 1]);
            offset -= n_src * n_dst + n_dst;
            let w_off = offset;
            let b_off = offset + n_src * n_dst;
            let src = &self.activations[l];
            for j in 0..n_dst {
                let d = self.delta[j];
                grad[b_off + j] += d;
                let g_row = &mut grad[w_off + j * n_src..w_off + (j + 1) * n_src];
                for (g, a) in g_row.iter_mut().zip(src) {
                    *g += d * a;
                }
            }
            if l > 0 {
                self.delta_prev.clear();
                for i in 0..n_src {
                    let back: f64 = (0..n_dst)
                        .map(|j| params[w_off + j * n_src + i] * self.delta[j])
                        .sum();
                    let a = src[i];
                    self.delta_prev.push(back * a * (1.0 - a));
                }
                std::mem::swap(&mut self.delta, &mut self.delta_prev);
            }
        }
        err * err
    }
}

/// Feature rows with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    n_features: usize,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData("dataset has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::Shape { expected: rows.len(), actual: labels.len() });
        }
        let n_features = rows[0].len();
        if n_features == 0 {
            return Err(Error::InvalidInput("rows have no features".into()));
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidInput(format!(
                "label of row {i} is {}, expected 0 or 1",
                labels[i]
            )));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::Shape { expected: n_features, actual: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite feature")));
            }
            features.extend_from_slice(row);
        }
        Ok(Self { features, labels, n_features })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks(self.n_features)
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let p = self.positives();
        p > 0 && p < self.len()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self { features, labels, n_features: self.n_features }
    }

    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), actual: labels.len() });
        }
        Self::new(self.rows().map(<[f64]>::to_vec).collect(), labels)
    }

    /// Applies `f(column, value)` to every feature value.
    pub fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let n = self.n_features;
        let features = self.features.iter().enumerate().map(|(i, &v)| f(i % n, v)).collect();
        Self { features, labels: self.labels.clone(), n_features: n }
    }
}

/// Per-column z-score parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits population mean and std per column; zero-variance columns keep std 1.
    pub fn fit(data: &Dataset) -> Self {
        let n = data.len() as f64;
        let d = data.n_features();
        let mut mean = vec![0.0; d];
        for row in data.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in data.rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m).powi(2);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd < 1e-12 { 1.0 } else { sd }
            })
            .collect();
        Self { mean, std }
    }

    pub fn transform(&self, data: &Dataset) -> Dataset {
        data.map_features(|j, v| (v - self.mean[j]) / self.std[j])
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| (v - self.mean[j]) / self.std[j])
            .collect()
    }
}

/// A parameter vector and its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub params: Vec<f64>,
    pub fitness: Option<f64>,
}

impl CandidateSolution {
    pub fn unevaluated(params: Vec<f64>) -> Self {
        Self { params, fitness: None }
    }

    pub fn evaluated(params: Vec<f64>, fitness: f64) -> Self {
        Self { params, fitness: Some(fitness) }
    }

    /// Cached fitness, or `+inf` when not evaluated yet.
    pub fn fitness_or_inf(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }
}
