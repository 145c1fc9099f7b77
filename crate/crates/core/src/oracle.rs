//! Simulated example oracle: draws labellings and labels them with the
//! protocol evaluated on the true influencer set.
//!
//! Randomness comes from `ChaCha8Rng` (`rand_chacha` 0.3, pinned in
//! `Cargo.lock`). Parallel callers construct one sampler per task with
//! `seed = master_seed + offset`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_protocol, Example, InfluencerSet, Label, Labelling, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform labellings, duplicates rejected.
    #[default]
    UniformUnique,
    UniformWithReplacement,
    /// Each agent independently agrees with probability `p_agree`.
    ProductBernoulli { p_agree: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    #[serde(default)]
    pub distribution: Distribution,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn uniform_unique(seed: u64) -> Self {
        SamplerConfig {
            distribution: Distribution::UniformUnique,
            seed,
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize, p_agree: f64) -> Labelling {
    Labelling::new(
        (0..n)
            .map(|_| {
                if rng.gen_bool(p_agree) {
                    Label::Agree
                } else {
                    Label::Disagree
                }
            })
            .collect(),
    )
}

/// Draws `m` labellings over `n` agents. Deterministic in `config.seed`.
pub fn generate_labellings(n: usize, m: usize, config: SamplerConfig) -> Result<Vec<Labelling>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.distribution {
        Distribution::UniformWithReplacement => Ok((0..m).map(|_| draw(&mut rng, n, 0.5)).collect()),
        Distribution::ProductBernoulli { p_agree } => {
            if !(p_agree > 0.0 && p_agree < 1.0) {
                return Err(Error::InvalidParameter(format!("p_agree {p_agree} not in (0, 1)")));
            }
            Ok((0..m).map(|_| draw(&mut rng, n, p_agree)).collect())
        }
        Distribution::UniformUnique => {
            let capacity_ok = n >= 64 || (m as u128) <= 1u128 << n;
            if !capacity_ok {
                return Err(Error::InfeasibleSample { m, n });
            }
            let mut seen = HashSet::with_capacity(m);
            let mut out = Vec::with_capacity(m);
            while out.len() < m {
                let l = draw(&mut rng, n, 0.5);
                if seen.insert(l.clone()) {
                    out.push(l);
                }
            }
            Ok(out)
        }
    }
}

/// Labels each labelling with the protocol's verdict on `influencers`.
pub fn oracle_examples(
    influencers: &InfluencerSet,
    protocol: Protocol,
    labellings: &[Labelling],
) -> Result<Vec<Example>> {
    labellings
        .iter()
        .map(|l| Ok(Example::new(l.clone(), apply_protocol(protocol, l, influencers)?)))
        .collect()
}
