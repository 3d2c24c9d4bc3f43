//! Exp3 strategy selection for learning miners.
//!
//! Each learning miner owns one [`LearnerState`], picks an arm before every
//! game and is updated with its main-chain earnings afterwards. Earnings are
//! unbounded satoshi amounts, so they are normalized by the largest game
//! reward the learner has seen so far.

use rand::Rng;

use crate::amount::{Amount, Ppm};
use crate::strategies::Strategy;

pub const DEFAULT_GAMMA: Ppm = Ppm::from_const(100_000);

// weights are rescaled once their sum passes this
const WEIGHT_GUARD: f64 = 1e150;

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerState {
    arms: Vec<Strategy>,
    weights: Vec<f64>,
    gamma: f64,
    reward_scale: Amount,
}

impl LearnerState {
    /// Uniform initial weights. Panics if `arms` is empty or `gamma` is
    /// outside `(0, 1]`.
    pub fn new(arms: Vec<Strategy>, gamma: f64) -> Self {
        let k = arms.len();
        Self::with_weights(arms, vec![1.0; k], gamma)
    }

    pub fn with_weights(arms: Vec<Strategy>, weights: Vec<f64>, gamma: f64) -> Self {
        assert!(!arms.is_empty(), "learner needs at least one arm");
        assert_eq!(arms.len(), weights.len(), "one weight per arm");
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
        assert!(
            weights.iter().all(|w| w.is_finite() && *w > 0.0),
            "weights must be positive"
        );
        LearnerState {
            arms,
            weights,
            gamma,
            reward_scale: Amount::ZERO,
        }
    }

    pub fn arms(&self) -> &[Strategy] {
        &self.arms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn reward_scale(&self) -> Amount {
        self.reward_scale
    }

    /// `p_i = (1 - gamma) * w_i / sum(w) + gamma / K`.
    pub fn arm_probabilities(&self) -> Vec<f64> {
        let k = self.arms.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect()
    }

    /// Samples an arm index from [`LearnerState::arm_probabilities`].
    pub fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let probs = self.arm_probabilities();
        let draw: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if draw < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Importance-weighted Exp3 update for arm `arm` after a game that paid
    /// `game_reward`.
    pub fn update(&mut self, arm: usize, game_reward: Amount) {
        assert!(arm < self.arms.len(), "arm {arm} out of range");
        self.reward_scale = self.reward_scale.max(game_reward);
        let x = if self.reward_scale == Amount::ZERO {
            0.0
        } else {
            (game_reward.sat() as f64 / self.reward_scale.sat() as f64).clamp(0.0, 1.0)
        };
        let k = self.arms.len() as f64;
        let p = self.arm_probabilities()[arm];
        self.weights[arm] *= (self.gamma * x / (k * p)).exp();

        let total: f64 = self.weights.iter().sum();
        if total > WEIGHT_GUARD {
            for w in &mut self.weights {
                *w = (*w / total).max(f64::MIN_POSITIVE);
            }
        }
    }
}
