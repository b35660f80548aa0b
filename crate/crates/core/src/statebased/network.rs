//! Fully connected Q-network: rectifier hidden layers, identity output.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::Domain;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One affine layer. `weights` is `rows x cols`, row-major, mapping an input
/// of length `cols` to an output of length `rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.cols)
                .zip(&self.bias)
                .map(|(row, b)| row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b),
        );
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    layers: Vec<Dense>,
}

/// Parameter gradients laid out like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    /// Flattened in the same order as [`QNetwork::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }
}

impl QNetwork {
    /// All-zero network with the given layer widths, input first.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            layers: dims.windows(2).map(|w| Dense::zeros(w[1], w[0])).collect(),
        })
    }

    /// He-uniform weights, zero biases.
    pub fn random(dims: &[usize], rng: &mut RngStream) -> Result<Self> {
        let mut net = Self::zeros(dims)?;
        for layer in &mut net.layers {
            let limit = (6.0 / layer.cols as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.uniform_in(-limit, limit);
            }
        }
        Ok(net)
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Format("network has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.rows == 0
                || l.cols == 0
                || l.weights.len() != l.rows * l.cols
                || l.bias.len() != l.rows
            {
                return Err(Error::Format(format!("layer {i} has inconsistent shape")));
            }
            if l.weights.iter().chain(&l.bias).any(|v| !v.is_finite()) {
                return Err(Error::Format(format!(
                    "layer {i} has non-finite parameters"
                )));
            }
        }
        for (i, w) in layers.windows(2).enumerate() {
            if w[0].rows != w[1].cols {
                return Err(Error::Format(format!(
                    "layer {} output does not feed layer {}",
                    i,
                    i + 1
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    /// Widths `[input, hidden..., output]`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].cols)
            .chain(self.layers.iter().map(|l| l.rows))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.activations(x).pop().unwrap())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Outputs of every layer, input first. Hidden outputs are post-rectifier.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.rows);
            layer.affine(&acts[i], &mut out);
            if i < last {
                for v in &mut out {
                    *v = v.max(0.0);
                }
            }
            acts.push(out);
        }
        acts
    }

    /// Mean squared error between the chosen outputs and their targets, and
    /// its gradient with respect to every parameter. Sample `b` contributes
    /// `(q(inputs[b])[actions[b]] - targets[b])^2`.
    pub fn loss_and_gradient(
        &self,
        inputs: &[&[f64]],
        actions: &[usize],
        targets: &[f64],
    ) -> Result<(f64, Gradients)> {
        if inputs.is_empty() || inputs.len() != actions.len() || inputs.len() != targets.len() {
            return Err(Error::Dimension(
                "batch inputs, actions and targets must be non-empty and equal length".into(),
            ));
        }
        let n = inputs.len() as f64;
        let mut grads = Gradients {
            layers: self
                .layers
                .iter()
                .map(|l| Dense::zeros(l.rows, l.cols))
                .collect(),
        };
        let mut loss = 0.0;
        for ((x, &a), &y) in inputs.iter().zip(actions).zip(targets) {
            self.check_input(x)?;
            if a >= self.output_dim() {
                return Err(Error::Dimension(format!(
                    "action {a} outside {} outputs",
                    self.output_dim()
                )));
            }
            let acts = self.activations(x);
            let err = acts[acts.len() - 1][a] - y;
            loss += err * err / n;

            let mut delta = vec![0.0; self.output_dim()];
            delta[a] = 2.0 * err / n;
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = &acts[li];
                let g = &mut grads.layers[li];
                for (r, d) in delta.iter().enumerate() {
                    if *d == 0.0 {
                        continue;
                    }
                    g.bias[r] += d;
                    for (gw, xi) in g.weights[r * layer.cols..(r + 1) * layer.cols]
                        .iter_mut()
                        .zip(input)
                    {
                        *gw += d * xi;
                    }
                }
                if li == 0 {
                    break;
                }
                let mut back = vec![0.0; layer.cols];
                for (r, d) in delta.iter().enumerate() {
                    if *d == 0.0 {
                        continue;
                    }
                    for (b, w) in back
                        .iter_mut()
                        .zip(&layer.weights[r * layer.cols..(r + 1) * layer.cols])
                    {
                        *b += d * w;
                    }
                }
                // Rectifier derivative: pass-through where the unit was active.
                for (b, act) in back.iter_mut().zip(input) {
                    if *act <= 0.0 {
                        *b = 0.0;
                    }
                }
                delta = back;
            }
        }
        Ok((loss, grads))
    }

    /// Plain gradient-descent step.
    pub fn apply_gradient(&mut self, grads: &Gradients, learning_rate: f64) {
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
                *w -= learning_rate * gw;
            }
            for (b, gb) in layer.bias.iter_mut().zip(&g.bias) {
                *b -= learning_rate * gb;
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    /// All parameters, layer by layer, weights before bias.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::Dimension(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut it = params.iter().copied();
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *w = it.next().unwrap();
            }
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &QNetwork) -> bool {
        self.dims() == other.dims()
    }
}

/// Index of the largest value; lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::Dimension(format!("invalid layer widths {dims:?}")));
    }
    Ok(())
}

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub feature_dim: usize,
    pub k_ops: usize,
    pub layers: Vec<Dense>,
    pub domain: Domain,
}

impl ModelFile {
    pub fn new(net: &QNetwork, domain: Domain) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            feature_dim: net.input_dim(),
            k_ops: net.output_dim(),
            layers: net.layers.clone(),
            domain,
        }
    }

    pub fn into_network(self) -> Result<QNetwork> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "model format_version {} unsupported (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        let net = QNetwork::from_layers(self.layers)?;
        if net.input_dim() != self.feature_dim || net.output_dim() != self.k_ops {
            return Err(Error::Format(
                "feature_dim/k_ops disagree with layer shapes".into(),
            ));
        }
        Ok(net)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn save_model(net: &QNetwork, domain: Domain, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ModelFile::new(net, domain).to_json()?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(QNetwork, Domain)> {
    let text = fs::read_to_string(path)?;
    let file = ModelFile::from_json(&text)?;
    let domain = file.domain;
    Ok((file.into_network()?, domain))
}
