//! Values and partial derivatives up to second order at a point.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

/// A multi-index with |α| ≤ 2 in at most two dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deriv {
    Value,
    Dx,
    Dy,
    Dxx,
    Dxy,
    Dyy,
}

impl Deriv {
    pub const ALL: [Deriv; 6] = [Deriv::Value, Deriv::Dx, Deriv::Dy, Deriv::Dxx, Deriv::Dxy, Deriv::Dyy];

    pub fn order(self) -> usize {
        match self {
            Deriv::Value => 0,
            Deriv::Dx | Deriv::Dy => 1,
            _ => 2,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Per-axis derivative orders `(α_x, α_y)`.
    pub fn orders(self) -> [usize; 2] {
        match self {
            Deriv::Value => [0, 0],
            Deriv::Dx => [1, 0],
            Deriv::Dy => [0, 1],
            Deriv::Dxx => [2, 0],
            Deriv::Dxy => [1, 1],
            Deriv::Dyy => [0, 2],
        }
    }
}

/// `[v, ∂x, ∂y, ∂xx, ∂xy, ∂yy]` of a scalar function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet(pub [f64; 6]);

impl Jet {
    pub const ZERO: Jet = Jet([0.0; 6]);

    pub fn constant(v: f64) -> Self {
        Jet([v, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn get(&self, d: Deriv) -> f64 {
        self.0[d.index()]
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// Leibniz rule for the product of two jets.
    pub fn product(&self, other: &Jet) -> Jet {
        let [a, ax, ay, axx, axy, ayy] = self.0;
        let [b, bx, by, bxx, bxy, byy] = other.0;
        Jet([
            a * b,
            ax * b + a * bx,
            ay * b + a * by,
            axx * b + 2.0 * ax * bx + a * bxx,
            axy * b + ax * by + ay * bx + a * bxy,
            ayy * b + 2.0 * ay * by + a * byy,
        ])
    }

    pub fn dot(&self, weights: &[f64; 6]) -> f64 {
        self.0.iter().zip(weights).map(|(a, b)| a * b).sum()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Jet(out)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        Jet(self.0.map(|v| v * s))
    }
}
