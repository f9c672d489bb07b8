use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::NetError;

/// Per-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative at `z`; the ReLU subgradient at 0 is taken as 0.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// One affine layer: `y = act(W x + b)` with `W` stored row-major
/// (`out_dim` rows by `in_dim` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self, NetError> {
        if weights.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(NetError::Shape(format!(
                "layer {out_dim}x{in_dim}: got {} weights, {} biases",
                weights.len(),
                bias.len()
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            bias,
            activation,
        })
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for i in 0..self.out_dim {
            let row = &self.weights[i * self.in_dim..(i + 1) * self.in_dim];
            let mut z = self.bias[i];
            for (w, v) in row.iter().zip(x) {
                z += w * v;
            }
            out.push(z);
        }
    }
}

/// A plain feed-forward network: a list of dense layers.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
}

/// Cached intermediate values of one forward pass, required by
/// [`DenseNet::backward`]. Holding the trace in the type system is what
/// enforces the "forward before backward" contract.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Input to each layer (index 0 is the network input).
    inputs: Vec<Vec<f64>>,
    /// Pre-activation values of each layer.
    pre: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

/// Parameter gradients mirroring a network's layers, plus the gradient with
/// respect to the network input.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
    pub input: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
            input: vec![0.0; net.input_dim()],
        }
    }

    /// Accumulates `scale * other` into `self` (input gradient included).
    pub fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
        for (x, y) in self.input.iter_mut().zip(&other.input) {
            *x += scale * y;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in self.weights.iter_mut().chain(self.bias.iter_mut()) {
            for x in a.iter_mut() {
                *x *= s;
            }
        }
        for x in self.input.iter_mut() {
            *x *= s;
        }
    }
}

impl DenseNet {
    pub fn new(layers: Vec<Layer>) -> Result<Self, NetError> {
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(NetError::Shape(format!(
                    "layer output {} feeds layer input {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        if layers.is_empty() {
            return Err(NetError::Shape("network has no layers".into()));
        }
        Ok(Self { layers })
    }

    /// MLP with ReLU hidden layers and an identity output layer, weights
    /// drawn uniformly with fan-in scaling, biases zero. The output layer's
    /// weights are additionally multiplied by `output_scale`.
    pub fn random_mlp(dims: &[usize], rng: &mut impl Rng, output_scale: f64) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let mut layers = Vec::new();
        for (li, pair) in dims.windows(2).enumerate() {
            let (n_in, n_out) = (pair[0], pair[1]);
            let last = li == dims.len() - 2;
            let bound = (6.0 / n_in as f64).sqrt();
            let scale = if last { output_scale } else { 1.0 };
            let weights = (0..n_in * n_out)
                .map(|_| rng.gen_range(-bound..bound) * scale)
                .collect();
            let activation = if last {
                Activation::Identity
            } else {
                Activation::Relu
            };
            layers.push(
                Layer::new(n_in, n_out, weights, vec![0.0; n_out], activation)
                    .expect("constructed shapes match"),
            );
        }
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_dim()];
        d.extend(self.layers.iter().map(|l| l.out_dim));
        d
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NetError> {
        if x.len() != self.input_dim() {
            return Err(NetError::Shape(format!(
                "input has {} entries, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Affine-plus-activation composition through all layers.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        self.check_input(x)?;
        let mut cur = x.to_vec();
        let mut z = Vec::new();
        for layer in &self.layers {
            layer.affine(&cur, &mut z);
            cur.clear();
            cur.extend(z.iter().map(|&v| layer.activation.apply(v)));
        }
        Ok(cur)
    }

    /// Forward pass that caches everything `backward` needs.
    pub fn forward_trace(&self, x: &[f64]) -> Result<ForwardTrace, NetError> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut cur = x.to_vec();
        for layer in &self.layers {
            let mut z = Vec::new();
            layer.affine(&cur, &mut z);
            inputs.push(std::mem::take(&mut cur));
            cur = z.iter().map(|&v| layer.activation.apply(v)).collect();
            pre.push(z);
        }
        Ok(ForwardTrace {
            inputs,
            pre,
            output: cur,
        })
    }

    /// Exact reverse-mode gradients of `upstream . output` with respect to
    /// every parameter and the input, given a cached forward pass.
    pub fn backward(&self, trace: &ForwardTrace, upstream: &[f64]) -> Result<Gradients, NetError> {
        if trace.inputs.len() != self.layers.len() {
            return Err(NetError::Shape(
                "forward trace does not match this network".into(),
            ));
        }
        if upstream.len() != self.output_dim() {
            return Err(NetError::Shape(format!(
                "upstream gradient has {} entries, output has {}",
                upstream.len(),
                self.output_dim()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = upstream.to_vec();
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let z = &trace.pre[li];
            let x = &trace.inputs[li];
            // dL/dz = dL/da * act'(z)
            for (d, &zv) in delta.iter_mut().zip(z) {
                *d *= layer.activation.derivative(zv);
            }
            for i in 0..layer.out_dim {
                grads.bias[li][i] += delta[i];
                let row = &mut grads.weights[li][i * layer.in_dim..(i + 1) * layer.in_dim];
                for (g, &xv) in row.iter_mut().zip(x) {
                    *g += delta[i] * xv;
                }
            }
            let mut prev = vec![0.0; layer.in_dim];
            for i in 0..layer.out_dim {
                let row = &layer.weights[i * layer.in_dim..(i + 1) * layer.in_dim];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += delta[i] * w;
                }
            }
            delta = prev;
        }
        grads.input = delta;
        Ok(grads)
    }
}

/// The two-input, one-output fixture network used across the test suite:
/// one weighted-sum + ReLU stage followed by a weighted-sum output.
pub fn toy_dnn() -> DenseNet {
    DenseNet::new(vec![
        Layer::new(2, 2, vec![3.0, 5.0, -1.0, 1.0], vec![3.0, -2.0], Activation::Relu).unwrap(),
        Layer::new(2, 1, vec![2.0, -1.0], vec![0.0], Activation::Identity).unwrap(),
    ])
    .unwrap()
}
