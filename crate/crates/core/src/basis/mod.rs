//! The random feature approximation space.
//!
//! Each solution component is expanded as
//! `u(x) = u_g(x) + Σ_n ψ_n(x) Σ_j u_nj σ(k_nj · x̃ + b_nj)` with
//! `x̃ = (x - x_n) / r_n`. The inner parameters are drawn once and never
//! trained; only the outer coefficients are solved for.

mod pou;
mod sampler;
mod spectrum;

pub use pou::{pou_eval, PouKind};
pub use sampler::{stream_id, FeatureSampler, FeatureVector, SamplingMode, GLOBAL_STREAM};
pub use spectrum::{
    dominant_max_frequency, select_feature_range, DEFAULT_FEATURE_RANGE, DEFAULT_SPECTRAL_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, RfmError};
use crate::geometry::{Domain, Point, Tiling};
use crate::jet::{Deriv, Jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sin,
    Cos,
}

impl Activation {
    /// `[σ(z), σ'(z), σ''(z)]`
    #[inline]
    pub fn eval(self, z: f64) -> [f64; 3] {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                let d = 1.0 - t * t;
                [t, d, -2.0 * t * d]
            }
            Activation::Sin => {
                let (s, c) = z.sin_cos();
                [s, c, -s]
            }
            Activation::Cos => {
                let (s, c) = z.sin_cos();
                [c, -s, -c]
            }
        }
    }
}

/// A local patch: normalization box plus its random features.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub center: Point,
    pub radius: Point,
    pub features: Vec<FeatureVector>,
    pub activation: Activation,
    /// `open[axis] = [low, high]`: the patch touches the bounding box on
    /// that side, so its partition-of-unity profile is one-sided there.
    pub open: [[bool; 2]; 2],
}

impl Patch {
    pub fn new(center: Point, radius: Point, features: Vec<FeatureVector>, activation: Activation) -> Result<Self> {
        if radius.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(RfmError::InvalidBasis(format!("patch radius {radius:?}")));
        }
        if features.is_empty() {
            return Err(RfmError::InvalidBasis("patch without features".into()));
        }
        Ok(Self { center, radius, features, activation, open: [[false; 2]; 2] })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn normalize(&self, x: &Point) -> Point {
        [
            (x[0] - self.center[0]) / self.radius[0],
            (x[1] - self.center[1]) / self.radius[1],
        ]
    }

    /// Jet of feature `j` in physical coordinates.
    #[inline]
    pub fn feature_jet(&self, j: usize, x: &Point, dim: usize) -> Jet {
        let xt = self.normalize(x);
        self.feature_jet_normalized(&self.features[j], &xt, dim)
    }

    #[inline]
    fn feature_jet_normalized(&self, f: &FeatureVector, xt: &Point, dim: usize) -> Jet {
        let (zx, zy, z) = if dim == 1 {
            (f.k[0] / self.radius[0], 0.0, f.k[0] * xt[0] + f.b)
        } else {
            (
                f.k[0] / self.radius[0],
                f.k[1] / self.radius[1],
                f.k[0] * xt[0] + f.k[1] * xt[1] + f.b,
            )
        };
        let [s, s1, s2] = self.activation.eval(z);
        Jet([s, s1 * zx, s1 * zy, s2 * zx * zx, s2 * zx * zy, s2 * zy * zy])
    }

    pub fn feature_eval(&self, j: usize, x: &Point, dim: usize, d: Deriv) -> f64 {
        self.feature_jet(j, x, dim).get(d)
    }
}

/// Selects a patch of a component basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchRef {
    Local(usize),
    Global,
}

/// Patches (and optional global patch) of one solution component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentBasis {
    pub patches: Vec<Patch>,
    pub global: Option<Patch>,
    offsets: Vec<usize>,
    len: usize,
}

impl ComponentBasis {
    fn new(patches: Vec<Patch>, global: Option<Patch>) -> Self {
        let mut offsets = Vec::with_capacity(patches.len() + 1);
        let mut acc = 0;
        for p in &patches {
            offsets.push(acc);
            acc += p.len();
        }
        offsets.push(acc);
        let len = acc + global.as_ref().map_or(0, Patch::len);
        Self { patches, global, offsets, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn patch(&self, p: PatchRef) -> Option<&Patch> {
        match p {
            PatchRef::Local(n) => self.patches.get(n),
            PatchRef::Global => self.global.as_ref(),
        }
    }

    fn offset(&self, p: PatchRef) -> usize {
        match p {
            PatchRef::Local(n) => self.offsets[n],
            PatchRef::Global => self.offsets[self.patches.len()],
        }
    }
}

/// Construction parameters for an [`RfmModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Patches per axis; the patch boxes tile the bounding box.
    pub patches: Vec<usize>,
    /// Features per local patch. With `multiscale` the same total per
    /// component is split evenly over the local patches and the global one.
    pub features_per_patch: usize,
    pub pou: PouKind,
    pub activation: Activation,
    pub sampler: FeatureSampler,
    /// Per-patch feature ranges overriding `sampler.range` (local patches
    /// in tiling order).
    pub patch_ranges: Option<Vec<f64>>,
    pub multiscale: bool,
    pub components: usize,
}

/// Random feature model: per-component local patches glued by a partition
/// of unity, plus an optional global patch.
#[derive(Debug, Clone, PartialEq)]
pub struct RfmModel {
    dim: usize,
    pou: PouKind,
    tiling: Tiling,
    components: Vec<ComponentBasis>,
}

impl RfmModel {
    pub fn build(domain: &Domain, spec: &ModelSpec) -> Result<Self> {
        let tiling = Tiling::new(domain, &spec.patches)?;
        let mp = tiling.len();
        if spec.components == 0 {
            return Err(RfmError::InvalidBasis("model needs at least one component".into()));
        }
        if spec.features_per_patch == 0 {
            return Err(RfmError::InvalidBasis("zero features per patch".into()));
        }
        if let Some(r) = &spec.patch_ranges {
            if r.len() != mp {
                return Err(RfmError::InvalidBasis(format!("{} patch ranges for {mp} patches", r.len())));
            }
        }
        let per_patch = if spec.multiscale {
            let total = spec.features_per_patch * mp;
            if !total.is_multiple_of(mp + 1) {
                return Err(RfmError::InvalidBasis(format!(
                    "{total} features cannot be split evenly over {mp} local patches and a global one"
                )));
            }
            total / (mp + 1)
        } else {
            spec.features_per_patch
        };
        let dim = domain.dim();
        let mut components = Vec::with_capacity(spec.components);
        for c in 0..spec.components {
            let mut patches = Vec::with_capacity(mp);
            for n in 0..mp {
                let sampler = match &spec.patch_ranges {
                    Some(r) => FeatureSampler::new(r[n], spec.sampler.mode, spec.sampler.seed)?,
                    None => spec.sampler,
                };
                let features = sampler.sample(dim, per_patch, stream_id(n as u32, c as u32))?;
                let mut patch = Patch::new(tiling.center(n), tiling.radius(), features, spec.activation)?;
                let cell = tiling.cell_of(n);
                for ax in 0..dim {
                    patch.open[ax] = [cell[ax] == 0, cell[ax] + 1 == tiling.counts[ax]];
                }
                patches.push(patch);
            }
            let global = if spec.multiscale {
                let mut radius = domain.half_extent();
                if dim == 1 {
                    radius[1] = 1.0;
                }
                let features = spec.sampler.sample(dim, per_patch, stream_id(GLOBAL_STREAM, c as u32))?;
                Some(Patch::new(domain.midpoint(), radius, features, spec.activation)?)
            } else {
                None
            };
            components.push(ComponentBasis::new(patches, global));
        }
        Ok(Self { dim, pou: spec.pou, tiling, components })
    }

    /// Assembles a model from explicit parts. Every component must share
    /// the tiling's patch count and the same total feature count.
    pub fn from_parts(dim: usize, pou: PouKind, tiling: Tiling, components: Vec<(Vec<Patch>, Option<Patch>)>) -> Result<Self> {
        let components: Vec<ComponentBasis> =
            components.into_iter().map(|(p, g)| ComponentBasis::new(p, g)).collect();
        if components.is_empty() {
            return Err(RfmError::InvalidBasis("model needs at least one component".into()));
        }
        let m = components[0].len();
        for cb in &components {
            if cb.patches.len() != tiling.len() || cb.len() != m {
                return Err(RfmError::InvalidBasis("inconsistent component bases".into()));
            }
        }
        Ok(Self { dim, pou, tiling, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pou(&self) -> PouKind {
        self.pou
    }

    pub fn tiling(&self) -> &Tiling {
        &self.tiling
    }

    pub fn num_patches(&self) -> usize {
        self.tiling.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &ComponentBasis {
        &self.components[c]
    }

    /// Feature count `M` of each component.
    pub fn columns_per_component(&self) -> usize {
        self.components[0].len()
    }

    /// Total column count `K · M`.
    pub fn columns(&self) -> usize {
        self.columns_per_component() * self.components.len()
    }

    pub fn has_global(&self) -> bool {
        self.components[0].global.is_some()
    }

    /// Column index: component-major, then patch, then feature, global last.
    pub fn column(&self, c: usize, p: PatchRef, j: usize) -> usize {
        c * self.columns_per_component() + self.components[c].offset(p) + j
    }

    pub fn patch(&self, c: usize, p: PatchRef) -> Option<&Patch> {
        self.components.get(c).and_then(|cb| cb.patch(p))
    }

    /// Partition-of-unity jet of local patch `n` at `x`.
    pub fn pou_jet(&self, n: usize, x: &Point) -> Jet {
        let patch = &self.components[0].patches[n];
        match self.pou {
            PouKind::A => {
                if self.tiling.owner(x) == n {
                    Jet::constant(1.0)
                } else {
                    Jet::ZERO
                }
            }
            PouKind::B => {
                let xt = patch.normalize(x);
                let mut prof = [[1.0, 0.0, 0.0]; 2];
                for ax in 0..self.dim {
                    let [lo, hi] = patch.open[ax];
                    prof[ax] = pou::profile(PouKind::B, xt[ax], lo, hi);
                }
                pou::tensor_jet(&prof, &patch.radius, self.dim)
            }
        }
    }

    /// Jet of the basis function `ψ_n φ_nj` (or `φ_gj` for the global patch).
    pub fn basis_jet(&self, c: usize, p: PatchRef, j: usize, x: &Point) -> Jet {
        let patch = self.components[c].patch(p).expect("patch index out of range");
        let phi = patch.feature_jet(j, x, self.dim);
        match p {
            PatchRef::Global => phi,
            PatchRef::Local(n) => self.pou_jet(n, x).product(&phi),
        }
    }

    pub fn basis_eval(&self, c: usize, p: PatchRef, j: usize, x: &Point, d: Deriv) -> f64 {
        self.basis_jet(c, p, j, x).get(d)
    }

    /// Calls `f(column, jet)` for every column of component `c` that does
    /// not vanish identically near `x`.
    pub fn for_each_active(&self, c: usize, x: &Point, mut f: impl FnMut(usize, Jet)) {
        let cb = &self.components[c];
        let base = c * self.columns_per_component();
        let mut visit = |patch: &Patch, offset: usize, psi: Option<Jet>| {
            let xt = patch.normalize(x);
            for (j, feat) in patch.features.iter().enumerate() {
                let phi = patch.feature_jet_normalized(feat, &xt, self.dim);
                let jet = match &psi {
                    Some(psi) => psi.product(&phi),
                    None => phi,
                };
                f(base + offset + j, jet);
            }
        };
        match self.pou {
            PouKind::A => {
                let n = self.tiling.owner(x);
                visit(&cb.patches[n], cb.offsets[n], None);
            }
            PouKind::B => {
                for (n, patch) in cb.patches.iter().enumerate() {
                    let psi = self.pou_jet(n, x);
                    if psi.0.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    visit(patch, cb.offsets[n], Some(psi));
                }
            }
        }
        if let Some(g) = &cb.global {
            visit(g, cb.offsets[cb.patches.len()], None);
        }
    }

    fn check_coefficients(&self, coefficients: &[f64], c: usize) -> Result<()> {
        if c >= self.components.len() {
            return Err(RfmError::DimensionMismatch(format!(
                "component {c} of a {}-component model",
                self.components.len()
            )));
        }
        if coefficients.len() != self.columns() {
            return Err(RfmError::DimensionMismatch(format!(
                "{} coefficients for {} columns",
                coefficients.len(),
                self.columns()
            )));
        }
        Ok(())
    }

    /// Jet of component `c` of the approximate solution.
    pub fn model_jet(&self, coefficients: &[f64], x: &Point, c: usize) -> Result<Jet> {
        self.check_coefficients(coefficients, c)?;
        let mut acc = Jet::ZERO;
        self.for_each_active(c, x, |col, jet| {
            let u = coefficients[col];
            if u != 0.0 {
                acc = acc + jet * u;
            }
        });
        Ok(acc)
    }

    pub fn model_eval(&self, coefficients: &[f64], x: &Point, c: usize, d: Deriv) -> Result<f64> {
        Ok(self.model_jet(coefficients, x, c)?.get(d))
    }
}
