//! Seeded synthetic classifier outputs.
//!
//! Each source is a noisy oracle: its symbolic decision is the true class
//! with the configured per-class reliability, otherwise a uniformly chosen
//! wrong class. Its score vector is the one-hot of that decision blended
//! with uniform noise, `(1 − τ)·onehot + τ·u`, then put on the 9-digit grid.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::SimConfig;
use super::dataset::{quantize_score, Dataset, Sample, SourceReport};
use crate::error::{FusionError, Result};

/// RNG stream reserved for dataset generation; trial `t` uses stream `t + 1`.
pub const SIMULATION_STREAM: u64 = 0;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn simulate(config: &SimConfig) -> Result<Dataset> {
    config.validate()?;
    let frame = config.frame()?;
    let n = frame.len();
    let priors = WeightedIndex::new(&config.priors)
        .map_err(|e| FusionError::InvalidConfig(format!("priors: {e}")))?;
    let mut rng = rng_for(config.seed, SIMULATION_STREAM);

    let samples = (0..config.n_samples)
        .map(|i| {
            let truth = priors.sample(&mut rng);
            let reports = config
                .sources
                .iter()
                .map(|source| {
                    let label = if n == 1 || rng.gen_bool(source.reliability[truth]) {
                        truth
                    } else {
                        // uniform over the n − 1 wrong classes
                        let k = rng.gen_range(0..n - 1);
                        if k >= truth {
                            k + 1
                        } else {
                            k
                        }
                    };
                    let t = source.temperature;
                    let scores = (0..n)
                        .map(|k| {
                            let peak = if k == label { 1.0 - t } else { 0.0 };
                            let noise: f64 = rng.gen();
                            quantize_score((peak + t * noise).clamp(0.0, 1.0))
                        })
                        .collect();
                    SourceReport { label, scores }
                })
                .collect();
            Sample {
                id: i.to_string(),
                truth,
                reports,
            }
        })
        .collect();

    Dataset::new(
        frame,
        config.sources.iter().map(|s| s.id.clone()).collect(),
        samples,
    )
}
