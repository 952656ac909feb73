use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RfmError};

/// Inner parameters `(k, b)` of one random feature `σ(k·x̃ + b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub k: [f64; 2],
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    UniformRandom,
    EquispacedGrid,
}

/// Draws feature vectors with every entry in `[-range, range]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSampler {
    pub range: f64,
    pub mode: SamplingMode,
    pub seed: u64,
}

/// Stream id reserved for the global patch.
pub const GLOBAL_STREAM: u32 = u32::MAX;

/// Substream key for a (patch, component) pair.
pub fn stream_id(patch: u32, component: u32) -> u64 {
    ((component as u64) << 32) | patch as u64
}

impl FeatureSampler {
    pub fn new(range: f64, mode: SamplingMode, seed: u64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(RfmError::InvalidBasis(format!("feature range {range}")));
        }
        Ok(Self { range, mode, seed })
    }

    /// Samples `count` features for a `dim`-dimensional patch from the
    /// substream `stream`. Grid mode ignores the stream and requires `count`
    /// to be a full factorial `G^(dim+1)`.
    pub fn sample(&self, dim: usize, count: usize, stream: u64) -> Result<Vec<FeatureVector>> {
        if count == 0 {
            return Err(RfmError::InvalidBasis("a patch needs at least one feature".into()));
        }
        let r = self.range;
        match self.mode {
            SamplingMode::UniformRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(stream);
                Ok((0..count)
                    .map(|_| {
                        let mut k = [0.0; 2];
                        for ki in k.iter_mut().take(dim) {
                            *ki = rng.random_range(-r..=r);
                        }
                        FeatureVector { k, b: rng.random_range(-r..=r) }
                    })
                    .collect())
            }
            SamplingMode::EquispacedGrid => {
                let levels = (count as f64).powf(1.0 / (dim + 1) as f64).round() as usize;
                if levels.pow(dim as u32 + 1) != count {
                    return Err(RfmError::InvalidBasis(format!(
                        "{count} features is not a full {}-factorial grid",
                        dim + 1
                    )));
                }
                let value = |i: usize| -r + 2.0 * r * (i + 1) as f64 / levels as f64;
                let mut out = Vec::with_capacity(count);
                if dim == 1 {
                    for i in 0..levels {
                        for l in 0..levels {
                            out.push(FeatureVector { k: [value(i), 0.0], b: value(l) });
                        }
                    }
                } else {
                    for i in 0..levels {
                        for j in 0..levels {
                            for l in 0..levels {
                                out.push(FeatureVector { k: [value(i), value(j)], b: value(l) });
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}
