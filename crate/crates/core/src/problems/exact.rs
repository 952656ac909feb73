//! Closed-form manufactured solutions with derivatives up to second order.

use std::f64::consts::PI;
use std::fmt::Debug;

use crate::geometry::Point;
use crate::jet::Jet;

use super::ElasticityConstants;

/// A solution known in closed form, one jet per component.
pub trait ManufacturedSolution: Debug + Send + Sync {
    fn components(&self) -> usize;
    fn jet(&self, x: &Point, component: usize) -> Jet;

    fn jets(&self, x: &Point) -> Vec<Jet> {
        (0..self.components()).map(|c| self.jet(x, c)).collect()
    }

    fn value(&self, x: &Point, component: usize) -> f64 {
        self.jet(x, component).value()
    }
}

fn jet_1d(v: f64, d1: f64, d2: f64) -> Jet {
    Jet([v, d1, 0.0, d2, 0.0, 0.0])
}

/// Jet of `f(x) g(y)` from `[f, f', f'']` and `[g, g', g'']`.
fn separable(f: [f64; 3], g: [f64; 3]) -> Jet {
    Jet([f[0] * g[0], f[1] * g[0], f[0] * g[1], f[2] * g[0], f[1] * g[1], f[0] * g[2]])
}

/// Constant fields, e.g. a rigid translation.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant(pub Vec<f64>);

impl ManufacturedSolution for Constant {
    fn components(&self) -> usize {
        self.0.len()
    }

    fn jet(&self, _x: &Point, c: usize) -> Jet {
        Jet::constant(self.0[c])
    }
}

/// `u = sin(3πx + 3π/20) cos(2πx + π/10) + 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HelmholtzSmooth;

impl ManufacturedSolution for HelmholtzSmooth {
    fn components(&self) -> usize {
        1
    }

    fn jet(&self, x: &Point, _c: usize) -> Jet {
        let a = 3.0 * PI * x[0] + 3.0 * PI / 20.0;
        let b = 2.0 * PI * x[0] + PI / 10.0;
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        jet_1d(
            sa * cb + 2.0,
            3.0 * PI * ca * cb - 2.0 * PI * sa * sb,
            -13.0 * PI * PI * sa * cb - 12.0 * PI * PI * ca * sb,
        )
    }
}

/// Sum of four incommensurate modes, the highest with frequency 4.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HelmholtzMultiMode;

impl ManufacturedSolution for HelmholtzMultiMode {
    fn components(&self) -> usize {
        1
    }

    fn jet(&self, x: &Point, _c: usize) -> Jet {
        let x = x[0];
        let (r5, r3) = (5f64.sqrt(), 3f64.sqrt());
        let (s1, c1) = (4.0 * (x + 0.15)).sin_cos();
        let (s2, c2) = (r5 * (x + 0.35)).sin_cos();
        let (s3, c3) = (r3 * (x + 0.05)).sin_cos();
        let (s4, c4) = (x + 0.85).sin_cos();
        jet_1d(
            4.0 * c1 + 5.0 * s2 + 2.0 * s3 + 3.0 * s4 + 2.0,
            -16.0 * s1 + 5.0 * r5 * c2 + 2.0 * r3 * c3 + 3.0 * c4,
            -64.0 * c1 - 25.0 * s2 - 6.0 * s3 - 3.0 * s4,
        )
    }
}

/// `u = -A F(x) F(y) - B F(2x) F(2y)` with
/// `F(t) = 1.5 cos(πt + 2π/5) + 2 cos(2πt - π/5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonProduct {
    pub low: f64,
    pub high: f64,
}

impl PoissonProduct {
    pub fn low_frequency() -> Self {
        Self { low: 1.0, high: 0.0 }
    }

    /// `[F, F', F'']` at `t`.
    pub fn profile(t: f64) -> [f64; 3] {
        let (s1, c1) = (PI * t + 0.4 * PI).sin_cos();
        let (s2, c2) = (2.0 * PI * t - 0.2 * PI).sin_cos();
        [
            1.5 * c1 + 2.0 * c2,
            -1.5 * PI * s1 - 4.0 * PI * s2,
            -1.5 * PI * PI * c1 - 8.0 * PI * PI * c2,
        ]
    }

    fn doubled(t: f64) -> [f64; 3] {
        let [f, d1, d2] = Self::profile(2.0 * t);
        [f, 2.0 * d1, 4.0 * d2]
    }
}

impl ManufacturedSolution for PoissonProduct {
    fn components(&self) -> usize {
        1
    }

    fn jet(&self, x: &Point, _c: usize) -> Jet {
        let low = separable(Self::profile(x[0]), Self::profile(x[1]));
        let high = separable(Self::doubled(x[0]), Self::doubled(x[1]));
        low * (-self.low) + high * (-self.high)
    }
}

/// Cantilever under end shear: depth `d`, length `l`, load `p`, occupying
/// `[0, l] x [-d/2, d/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timoshenko {
    pub constants: ElasticityConstants,
    pub p: f64,
    pub d: f64,
    pub l: f64,
}

impl Timoshenko {
    pub fn moment_of_inertia(&self) -> f64 {
        self.d.powi(3) / 12.0
    }
}

impl ManufacturedSolution for Timoshenko {
    fn components(&self) -> usize {
        2
    }

    fn jet(&self, pt: &Point, c: usize) -> Jet {
        let [x, y] = *pt;
        let nu = self.constants.nu;
        let (d2, l) = (self.d * self.d, self.l);
        let k = self.p / (6.0 * self.constants.e * self.moment_of_inertia());
        if c == 0 {
            Jet([
                -k * y * ((6.0 * l - 3.0 * x) * x + (2.0 + nu) * (y * y - d2 / 4.0)),
                -6.0 * k * y * (l - x),
                -k * (6.0 * l * x - 3.0 * x * x + (2.0 + nu) * (3.0 * y * y - d2 / 4.0)),
                6.0 * k * y,
                -6.0 * k * (l - x),
                -6.0 * k * (2.0 + nu) * y,
            ])
        } else {
            Jet([
                k * (3.0 * nu * y * y * (l - x) + (4.0 + 5.0 * nu) * d2 * x / 4.0 + (3.0 * l - x) * x * x),
                k * (-3.0 * nu * y * y + (4.0 + 5.0 * nu) * d2 / 4.0 + 6.0 * l * x - 3.0 * x * x),
                6.0 * k * nu * y * (l - x),
                6.0 * k * (l - x),
                -6.0 * k * nu * y,
                6.0 * k * nu * (l - x),
            ])
        }
    }
}

/// Smooth displacement with a boundary layer near `y = 0`, used on the
/// holed plate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HoledPlate;

impl ManufacturedSolution for HoledPlate {
    fn components(&self) -> usize {
        2
    }

    fn jet(&self, pt: &Point, c: usize) -> Jet {
        let [x, y] = *pt;
        if c == 0 {
            let (sx, cx) = x.sin_cos();
            let (sy, cy) = y.sin_cos();
            return Jet([
                0.1 * y * ((x + 10.0) * sy + (y + 5.0) * cx),
                0.1 * (y * sy - y * (y + 5.0) * sx),
                0.1 * ((x + 10.0) * (sy + y * cy) + (2.0 * y + 5.0) * cx),
                -0.1 * y * (y + 5.0) * cx,
                0.1 * (sy + y * cy - (2.0 * y + 5.0) * sx),
                0.1 * ((x + 10.0) * (2.0 * cy - y * sy) + 2.0 * cx),
            ]);
        }
        let (s5, c5) = (5.0 * x).sin_cos();
        let g = 30.0 + 5.0 * x * s5;
        let g1 = 5.0 * s5 + 25.0 * x * c5;
        let g2 = 50.0 * c5 - 125.0 * x * s5;
        let e = (-5.0 * y).exp();
        let (h, h1, h2) = (4.0 + e, -5.0 * e, 25.0 * e);
        let m = y * h;
        let m1 = h + y * h1;
        let m2 = 2.0 * h1 + y * h2;
        Jet([
            (g * m - 100.0 * y) / 60.0,
            g1 * m / 60.0,
            (g * m1 - 100.0) / 60.0,
            g2 * m / 60.0,
            g1 * m1 / 60.0,
            g * m2 / 60.0,
        ])
    }
}

/// Polynomial Stokes solution `(u, v, p)`, divergence free, with
/// `p(0, 0) = -4/3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesPolynomial;

impl ManufacturedSolution for StokesPolynomial {
    fn components(&self) -> usize {
        3
    }

    fn jet(&self, pt: &Point, c: usize) -> Jet {
        let [x, y] = *pt;
        let (x2, y2) = (x * x, y * y);
        match c {
            0 => Jet([
                x + x2 - 2.0 * x * y + x2 * x - 3.0 * x * y2 + x2 * y,
                1.0 + 2.0 * x - 2.0 * y + 3.0 * x2 - 3.0 * y2 + 2.0 * x * y,
                -2.0 * x - 6.0 * x * y + x2,
                2.0 + 6.0 * x + 2.0 * y,
                -2.0 - 6.0 * y + 2.0 * x,
                -6.0 * x,
            ]),
            1 => Jet([
                -y - 2.0 * x * y + y2 - 3.0 * x2 * y + y2 * y - x * y2,
                -2.0 * y - 6.0 * x * y - y2,
                -1.0 - 2.0 * x + 2.0 * y - 3.0 * x2 + 3.0 * y2 - 2.0 * x * y,
                -6.0 * y,
                -2.0 - 6.0 * x - 2.0 * y,
                2.0 + 6.0 * y - 2.0 * x,
            ]),
            _ => Jet([
                x * y + x + y + x2 * x * y2 - 4.0 / 3.0,
                y + 1.0 + 3.0 * x2 * y2,
                x + 1.0 + 2.0 * x2 * x * y,
                6.0 * x * y2,
                1.0 + 6.0 * x2 * y,
                2.0 * x2 * x,
            ]),
        }
    }
}
