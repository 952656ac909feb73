//! One-dimensional partition-of-unity profiles and their tensor products.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::jet::Jet;

/// Partition-of-unity family: `A` is the sharp indicator tiling, `B` the
/// C¹ blend with sinusoidal transition zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PouKind {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

/// Value (`order = 0`) or derivative with respect to the normalized
/// coordinate of the 1D profile.
pub fn pou_eval(kind: PouKind, xt: f64, order: usize) -> f64 {
    let v = profile(kind, xt, false, false);
    match order {
        0 => v[0],
        1 => v[1],
        2 => v[2],
        _ => panic!("partition of unity derivatives are available up to order 2"),
    }
}

/// `[ψ, ψ', ψ'']` in normalized coordinates. An open side replaces the
/// profile beyond the plateau on that side by the constant 1.
pub(crate) fn profile(kind: PouKind, xt: f64, open_low: bool, open_high: bool) -> [f64; 3] {
    match kind {
        PouKind::A => {
            let inside = (open_low || xt >= -1.0) && (open_high || xt < 1.0);
            [if inside { 1.0 } else { 0.0 }, 0.0, 0.0]
        }
        PouKind::B => {
            let xt = snap_to_junction(xt);
            if xt <= -0.75 && open_low || xt >= 0.75 && open_high {
                return [1.0, 0.0, 0.0];
            }
            let s = (2.0 * PI * xt).sin();
            let c = (2.0 * PI * xt).cos();
            if (-1.25..=-0.75).contains(&xt) {
                [0.5 * (1.0 + s), PI * c, -2.0 * PI * PI * s]
            } else if (0.75..=1.25).contains(&xt) {
                [0.5 * (1.0 - s), -PI * c, 2.0 * PI * PI * s]
            } else if xt.abs() < 0.75 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 0.0, 0.0]
            }
        }
    }
}

/// Rounds normalized coordinates within a few ulps of a junction of the
/// blend onto it. A point on the junction of two neighbours is computed
/// from two different centers; without snapping one patch may see it
/// inside its transition zone and the other just outside, and the second
/// derivatives no longer cancel.
fn snap_to_junction(xt: f64) -> f64 {
    for j in [-1.25, -0.75, 0.75, 1.25] {
        if (xt - j).abs() <= 1e-12 {
            return j;
        }
    }
    xt
}

/// Tensor-product partition-of-unity jet in physical coordinates.
pub(crate) fn tensor_jet(profiles: &[[f64; 3]; 2], radius: &[f64; 2], dim: usize) -> Jet {
    let [p, q] = profiles;
    let (rx, ry) = (radius[0], radius[1]);
    if dim == 1 {
        return Jet([p[0], p[1] / rx, 0.0, p[2] / (rx * rx), 0.0, 0.0]);
    }
    Jet([
        p[0] * q[0],
        p[1] / rx * q[0],
        p[0] * q[1] / ry,
        p[2] / (rx * rx) * q[0],
        p[1] * q[1] / (rx * ry),
        p[0] * q[2] / (ry * ry),
    ])
}
