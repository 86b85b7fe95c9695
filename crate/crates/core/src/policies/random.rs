use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Context, Policy};
use crate::envs::Environment;
use crate::runtime::ProductAction;

/// Uniform actions; takes an available ε edge with probability `epsilon_prob`.
#[derive(Clone, Debug)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
    pub epsilon_prob: f64,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            epsilon_prob: 0.1,
        }
    }
}

impl<E: Environment> Policy<E> for RandomPolicy {
    fn act(&mut self, env: &E, ctx: &Context<'_>) -> Option<ProductAction<E::Action>> {
        if !ctx.epsilon.is_empty() && self.rng.gen_bool(self.epsilon_prob) {
            let id = ctx.epsilon[self.rng.gen_range(0..ctx.epsilon.len())];
            return Some(ProductAction::Epsilon(id));
        }
        Some(ProductAction::Env(env.sample_action(&mut self.rng)))
    }
}
