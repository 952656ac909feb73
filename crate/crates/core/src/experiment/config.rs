use serde::{Deserialize, Serialize};

use crate::assembly::ResidualScale;
use crate::basis::{Activation, PouKind, SamplingMode, DEFAULT_SPECTRAL_THRESHOLD};
use crate::error::{Result, RfmError};
use crate::geometry::{Hole, Point, Segment};

/// One end-to-end run, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemConfig,
    pub domain: DomainConfig,
    pub basis: BasisConfig,
    pub collocation: CollocationConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HelmholtzSolution {
    Smooth,
    MultiMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElasticSolution {
    Timoshenko,
    HoledPlate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemConfig {
    Helmholtz {
        #[serde(default = "default_lambda")]
        lambda: f64,
        solution: HelmholtzSolution,
    },
    /// `u = -low F(x)F(y) - high F(2x)F(2y)`.
    Poisson {
        #[serde(default = "one")]
        low: f64,
        #[serde(default)]
        high: f64,
    },
    Elasticity {
        #[serde(default = "default_young")]
        e: f64,
        #[serde(default = "default_poisson_ratio")]
        nu: f64,
        solution: ElasticSolution,
        /// Beam load, depth and length for the cantilever solution.
        #[serde(default = "default_load")]
        p: f64,
        #[serde(default = "ten")]
        d: f64,
        #[serde(default = "ten")]
        l: f64,
        /// Displacement-prescribed segments; all others carry traction.
        dirichlet: Vec<Segment>,
    },
    Stokes {
        #[serde(default)]
        pin: Point,
    },
    ChannelFlow {
        #[serde(default)]
        pin: Point,
    },
    Homogenization {
        #[serde(default = "default_bound")]
        bound: i32,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        coefficient_seed: u64,
        #[serde(default = "one")]
        forcing: f64,
    },
}

impl ProblemConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemConfig::Helmholtz { .. } => "helmholtz",
            ProblemConfig::Poisson { .. } => "poisson",
            ProblemConfig::Elasticity { .. } => "elasticity",
            ProblemConfig::Stokes { .. } => "stokes",
            ProblemConfig::ChannelFlow { .. } => "channel-flow",
            ProblemConfig::Homogenization { .. } => "homogenization",
        }
    }

    pub fn components(&self) -> usize {
        match self {
            ProblemConfig::Elasticity { .. } => 2,
            ProblemConfig::Stokes { .. } | ProblemConfig::ChannelFlow { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        lower: f64,
        upper: f64,
    },
    Rectangle {
        lower: Point,
        upper: Point,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        holes: Vec<Hole>,
    },
    Disk {
        center: Point,
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    /// Patches per axis.
    pub patches: Vec<usize>,
    pub features_per_patch: usize,
    pub pou: PouKind,
    pub activation: Activation,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingMode,
    /// Feature range `R_m`; ignored when `adaptive` is set.
    #[serde(default = "one")]
    pub range: f64,
    /// Pick `R_m` from the spectrum of the forcing.
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "default_threshold")]
    pub spectral_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_ranges: Option<Vec<f64>>,
    #[serde(default)]
    pub multiscale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollocationConfig {
    /// Interior grid counts per axis over the bounding box.
    pub interior: Vec<usize>,
    #[serde(default)]
    pub boundary_per_edge: usize,
    #[serde(default)]
    pub boundary_per_hole: usize,
    /// Points per shared patch edge for the indicator partition.
    #[serde(default)]
    pub interface_per_edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default = "yes")]
    pub rescale: bool,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub residual_scale: ResidualScale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { rescale: true, c: default_c(), residual_scale: ResidualScale::Lambda, rank_tol: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Uniform grid for a field snapshot, per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Vec<usize>>,
}

fn default_lambda() -> f64 {
    4.0
}
fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn yes() -> bool {
    true
}
fn default_young() -> f64 {
    3e7
}
fn default_poisson_ratio() -> f64 {
    0.3
}
fn default_load() -> f64 {
    1000.0
}
fn default_bound() -> i32 {
    6
}
fn default_amplitude() -> f64 {
    0.3
}
fn default_sampling() -> SamplingMode {
    SamplingMode::UniformRandom
}
fn default_threshold() -> f64 {
    DEFAULT_SPECTRAL_THRESHOLD
}
fn default_c() -> f64 {
    100.0
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| RfmError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| RfmError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| RfmError::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String> {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RfmError::Config(m));
        let b = &self.basis;
        let c = &self.collocation;
        if b.patches.is_empty() || b.patches.contains(&0) {
            return bad(format!("patch counts {:?}", b.patches));
        }
        if b.features_per_patch == 0 {
            return bad("features_per_patch must be positive".into());
        }
        if c.interior.is_empty() || c.interior.contains(&0) {
            return bad(format!("interior counts {:?}", c.interior));
        }
        let dim = match self.domain {
            DomainConfig::Interval { .. } => 1,
            _ => 2,
        };
        if b.patches.len() != dim || c.interior.len() != dim {
            return bad(format!("{dim}D domain needs {dim} patch and interior counts"));
        }
        if dim == 2 && c.boundary_per_edge == 0 {
            return bad("boundary_per_edge must be positive in 2D".into());
        }
        if let DomainConfig::Rectangle { holes, .. } = &self.domain {
            if !holes.is_empty() && c.boundary_per_hole == 0 {
                return bad("boundary_per_hole must be positive when holes are present".into());
            }
        }
        let mp: usize = b.patches.iter().product();
        if b.pou == PouKind::A && mp > 1 && dim == 2 && c.interface_per_edge == 0 {
            return bad("the indicator partition needs interface_per_edge > 0".into());
        }
        if !(self.solve.c > 0.0) {
            return bad(format!("rescale constant {}", self.solve.c));
        }
        Ok(())
    }
}
