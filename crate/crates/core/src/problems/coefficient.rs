use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;

/// `a(x) = exp(h(x))` with `h` a random trigonometric series over the
/// integer wavevectors `|k| ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizationCoefficient {
    /// `(k, a_k, b_k)`: `h = Σ a_k sin(2πk·x) + b_k cos(2πk·x)`.
    pub modes: Vec<([f64; 2], f64, f64)>,
}

impl HomogenizationCoefficient {
    /// Amplitudes i.i.d. uniform on `[-amplitude, amplitude]`.
    pub fn random(bound: i32, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for k1 in -bound..=bound {
            for k2 in -bound..=bound {
                if k1 * k1 + k2 * k2 <= bound * bound {
                    let a = rng.random_range(-amplitude..=amplitude);
                    let b = rng.random_range(-amplitude..=amplitude);
                    modes.push(([k1 as f64, k2 as f64], a, b));
                }
            }
        }
        Self { modes }
    }

    /// `a ≡ 1`.
    pub fn zero() -> Self {
        Self { modes: Vec::new() }
    }

    /// `(h, ∂x h, ∂y h)`.
    pub fn exponent(&self, x: &Point) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, a, b) in &self.modes {
            let (s, c) = (2.0 * PI * (k[0] * x[0] + k[1] * x[1])).sin_cos();
            let d = 2.0 * PI * (a * c - b * s);
            out[0] += a * s + b * c;
            out[1] += d * k[0];
            out[2] += d * k[1];
        }
        out
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.exponent(x)[0].exp()
    }

    /// `∇a = a ∇h`.
    pub fn gradient(&self, x: &Point) -> [f64; 2] {
        let [h, hx, hy] = self.exponent(x);
        let a = h.exp();
        [a * hx, a * hy]
    }
}
