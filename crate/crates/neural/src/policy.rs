use rand::Rng;

use crate::net::DenseNet;
use crate::rng::derive_seed;
use crate::NetError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln() + max;
    logits.iter().map(|&l| l - log_sum).collect()
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax_tie_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Samples an index from a probability vector.
pub fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Entropy of a categorical distribution, in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// The actor-critic network family for one training run: the policy, the
/// reward critic, and one cost critic per active rule. All nets share the
/// observation dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyBundle {
    pub policy: DenseNet,
    pub reward_critic: DenseNet,
    /// `(rule id, critic)` pairs in active-rule order.
    pub cost_critics: Vec<(String, DenseNet)>,
}

/// Hidden sizes used for the policy and all critics.
pub const HIDDEN_DIMS: [usize; 2] = [32, 32];

impl PolicyBundle {
    /// Fresh random bundle. Each network draws from its own seed stream
    /// derived from `seed` and its name, so adding or removing cost critics
    /// never changes how the policy is initialized.
    pub fn new_random(obs_dim: usize, n_actions: usize, rule_ids: &[String], seed: u64) -> Self {
        let mlp = |out: usize, label: &str, output_scale: f64| {
            let dims = [obs_dim, HIDDEN_DIMS[0], HIDDEN_DIMS[1], out];
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, label));
            DenseNet::random_mlp(&dims, &mut rng, output_scale)
        };
        Self {
            // Small output weights keep the initial policy near uniform.
            policy: mlp(n_actions, "policy", 0.01),
            reward_critic: mlp(1, "reward_critic", 1.0),
            cost_critics: rule_ids
                .iter()
                .map(|id| (id.clone(), mlp(1, &format!("cost_critic:{id}"), 1.0)))
                .collect(),
        }
    }

    /// Action distribution for a normalized observation.
    pub fn policy_distribution(&self, obs: &[f64]) -> Result<Vec<f64>, NetError> {
        Ok(softmax(&self.policy.forward(obs)?))
    }

    /// Greedy action, ties to the lowest index.
    pub fn deterministic_action(&self, obs: &[f64]) -> Result<usize, NetError> {
        Ok(argmax_tie_lowest(&self.policy.forward(obs)?))
    }

    pub fn value(net: &DenseNet, obs: &[f64]) -> Result<f64, NetError> {
        Ok(net.forward(obs)?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_give_uniform_probabilities() {
        let p = softmax(&[0.0, 0.0, 0.0]);
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dominant_logit_takes_nearly_all_mass() {
        let p = softmax(&[10.0, 0.0, 0.0]);
        assert!(p[0] > 0.9999);
    }

    #[test]
    fn ties_resolve_to_the_lowest_index() {
        assert_eq!(argmax_tie_lowest(&[1.0, 2.0, 2.0]), 1);
        assert_eq!(argmax_tie_lowest(&[3.0, 3.0, 3.0]), 0);
    }

    #[test]
    fn softmax_normalizes_and_stays_positive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let logits: Vec<f64> = (0..3).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let p = softmax(&logits);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|v| *v >= 0.0));
            // Positive scaling preserves the argmax exactly.
            let c = rng.gen_range(0.1..10.0);
            let scaled: Vec<f64> = logits.iter().map(|l| l * c).collect();
            assert_eq!(argmax_tie_lowest(&logits), argmax_tie_lowest(&scaled));
        }
    }

    #[test]
    fn log_softmax_agrees_with_softmax() {
        let logits = [1.0, -2.0, 0.5];
        let p = softmax(&logits);
        let lp = log_softmax(&logits);
        for (a, b) in p.iter().zip(&lp) {
            assert!((a.ln() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_follows_the_distribution() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let p = [0.2, 0.5, 0.3];
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            counts[sample_index(&p, &mut rng)] += 1;
        }
        for (c, expect) in counts.iter().zip(&p) {
            assert!((*c as f64 / 1e5 - expect).abs() < 0.01);
        }
    }

    #[test]
    fn bundle_policy_init_is_independent_of_critic_set() {
        let none = PolicyBundle::new_random(9, 3, &[], 7);
        let some = PolicyBundle::new_random(9, 3, &["a".into(), "b".into()], 7);
        assert_eq!(none.policy, some.policy);
        assert_eq!(none.reward_critic, some.reward_critic);
        assert_eq!(some.cost_critics.len(), 2);
    }
}
