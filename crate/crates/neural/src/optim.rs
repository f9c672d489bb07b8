use crate::net::{DenseNet, Gradients};
use crate::NetError;

/// Adam optimizer state for one network: per-parameter first and second
/// moments, shaped exactly like the parameters they track.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_bias: Vec<Vec<f64>>,
    v_bias: Vec<Vec<f64>>,
    step: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(net: &DenseNet, learning_rate: f64) -> Self {
        Self {
            m_weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            v_weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            m_bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
            v_bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
            step: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected Adam step, descending along `grads`.
    pub fn apply(&mut self, net: &mut DenseNet, grads: &Gradients) -> Result<(), NetError> {
        if grads.weights.len() != net.layers.len() {
            return Err(NetError::Shape("gradient/network layer count mismatch".into()));
        }
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for (li, layer) in net.layers.iter_mut().enumerate() {
            if grads.weights[li].len() != layer.weights.len()
                || grads.bias[li].len() != layer.bias.len()
            {
                return Err(NetError::Shape(format!("gradient shape mismatch at layer {li}")));
            }
            Self::update_slice(
                &mut layer.weights,
                &grads.weights[li],
                &mut self.m_weights[li],
                &mut self.v_weights[li],
                self.learning_rate,
                self.beta1,
                self.beta2,
                self.epsilon,
                bc1,
                bc2,
            );
            Self::update_slice(
                &mut layer.bias,
                &grads.bias[li],
                &mut self.m_bias[li],
                &mut self.v_bias[li],
                self.learning_rate,
                self.beta1,
                self.beta2,
                self.epsilon,
                bc1,
                bc2,
            );
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn update_slice(
        params: &mut [f64],
        grads: &[f64],
        m: &mut [f64],
        v: &mut [f64],
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        bc1: f64,
        bc2: f64,
    ) {
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
