//! Seeded random MDPs with a certified ergodic strength.
//!
//! Instance distribution, for every `(a, x)`:
//!
//! * `R_a(x) ~ Uniform[0, r_max)`, expanded to every successor state.
//! * `support` distinct successor states are drawn uniformly without
//!   replacement and given weights from a uniform point on the simplex
//!   (i.i.d. standard exponentials normalised by their sum).
//! * `P_a(x, .) = rho * delta_target + (1 - rho) * weights`.
//!
//! `support = num_states` gives a uniform point on the full simplex;
//! `support = 1` makes every action a deterministic move that is
//! overridden by a jump to the target state with probability `rho`.
//!
//! Randomness comes from ChaCha8 keyed by `seed_from_u64(seed)`. Stream 0
//! draws the rewards in `(a, x)` ascending order; row `(a, x)` draws from its
//! own stream `1 + a * num_states + x`, so rows can be generated in any order
//! or in parallel with identical output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Mdp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub num_states: usize,
    pub num_actions: usize,
    pub discount: f64,
    pub rho: f64,
    pub r_max: f64,
    pub seed: u64,
    pub target_state: usize,
    /// Random successors per row before blending in the target state.
    pub support: usize,
}

impl GeneratorConfig {
    /// The 100-state, 6-action, `alpha = 0.995`, `rho = 0.1` benchmark family.
    pub fn benchmark(seed: u64) -> Self {
        Self {
            num_states: 100,
            num_actions: 6,
            discount: 0.995,
            rho: 0.1,
            r_max: 1.0,
            seed,
            target_state: 0,
            support: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.num_states == 0 || self.num_actions == 0 {
            return bad("need at least one state and one action".into());
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return bad(format!("discount {} outside (0, 1)", self.discount));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho {} outside (0, 1)", self.rho));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return bad(format!("r_max {} must be positive", self.r_max));
        }
        if self.target_state >= self.num_states {
            return bad(format!("target state {} out of range", self.target_state));
        }
        if self.support == 0 || self.support > self.num_states {
            return bad(format!("support {} outside [1, {}]", self.support, self.num_states));
        }
        Ok(())
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard exponential by inversion; `1 - u` lies in `(0, 1]`.
fn standard_exponential(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Transition row `(a, x)` drawn from its own substream.
fn transition_row(config: &GeneratorConfig, action: usize, state: usize) -> Vec<f64> {
    let n = config.num_states;
    let mut rng = stream_rng(config.seed, 1 + (action * n + state) as u64);
    let mut candidates: Vec<usize> = (0..n).collect();
    for i in 0..config.support {
        let j = rng.gen_range(i..n);
        candidates.swap(i, j);
    }
    let weights: Vec<f64> = (0..config.support).map(|_| standard_exponential(&mut rng)).collect();
    let total: f64 = weights.iter().sum();
    let mut row = vec![0.0; n];
    for (&y, w) in candidates[..config.support].iter().zip(&weights) {
        row[y] = (1.0 - config.rho) * (w / total);
    }
    row[config.target_state] += config.rho;
    row
}

pub fn random_mdp(config: &GeneratorConfig) -> Result<Mdp> {
    config.validate()?;
    let (n, na) = (config.num_states, config.num_actions);
    let mut reward_rng = stream_rng(config.seed, 0);
    let rewards: Vec<Vec<f64>> = (0..na)
        .map(|_| (0..n).map(|_| config.r_max * reward_rng.gen::<f64>()).collect())
        .collect();
    let transitions: Vec<Vec<Vec<f64>>> = (0..na)
        .map(|a| (0..n).map(|x| transition_row(config, a, x)).collect())
        .collect();
    Mdp::from_state_rewards(&transitions, &rewards, config.discount, config.r_max)
}
