//! Error norms on refined grids, self-convergence and error spectra.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::basis::RfmModel;
use crate::error::{Result, RfmError};
use crate::geometry::{Domain, Point};
use crate::jet::Deriv;
use crate::problems::{ElasticityConstants, ManufacturedSolution};

/// Exact norms below this report the absolute instead of the relative L2 error.
pub const NORM_GUARD: f64 = 1e-14;

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub linf: f64,
    /// `‖e‖₂ / ‖u‖₂` over the grid, or `‖e‖₂` when `‖u‖₂ < NORM_GUARD`.
    pub rel_l2: f64,
}

impl ErrorNorms {
    pub fn from_samples(approx: &[f64], exact: &[f64]) -> Self {
        Self::guarded(approx, exact, NORM_GUARD)
    }

    /// Like [`ErrorNorms::from_samples`], but fields whose exact L2 norm is
    /// below `ZERO_FIELD_RATIO · scale` count as identically zero.
    pub fn from_samples_scaled(approx: &[f64], exact: &[f64], scale: f64) -> Self {
        Self::guarded(approx, exact, NORM_GUARD.max(ZERO_FIELD_RATIO * scale))
    }

    fn guarded(approx: &[f64], exact: &[f64], guard: f64) -> Self {
        let err: Vec<f64> = approx.iter().zip(exact).map(|(a, e)| a - e).collect();
        let linf = err.iter().fold(0.0, |m, e| f64::max(m, e.abs()));
        let num = pairwise_sum(&err.iter().map(|e| e * e).collect::<Vec<_>>()).sqrt();
        let den = pairwise_sum(&exact.iter().map(|e| e * e).collect::<Vec<_>>()).sqrt();
        let rel_l2 = if den < guard { num } else { num / den };
        Self { linf, rel_l2 }
    }
}

/// Relative size below which one of several related fields (the stress
/// components) is treated as exactly zero, so roundoff in its exact values
/// does not become the denominator of a relative error.
pub const ZERO_FIELD_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub grid_counts: Vec<usize>,
    pub points: usize,
    pub components: Vec<ErrorNorms>,
    /// `σ_x, σ_y, τ_xy` for elasticity runs.
    pub stresses: Option<[ErrorNorms; 3]>,
}

/// Grid with each axis count of the collocation grid doubled.
pub fn refined_grid(domain: &Domain, colloc_counts: &[usize]) -> Result<Vec<Point>> {
    let counts: Vec<usize> = colloc_counts.iter().map(|c| 2 * c).collect();
    domain.sample_interior(&counts)
}

/// Compares the model with `exact` on the refined grid.
pub fn evaluate_error(
    model: &RfmModel,
    coefficients: &[f64],
    exact: &dyn ManufacturedSolution,
    domain: &Domain,
    colloc_counts: &[usize],
    elasticity: Option<&ElasticityConstants>,
) -> Result<ErrorReport> {
    let pts = refined_grid(domain, colloc_counts)?;
    let k = model.num_components();
    if exact.components() != k {
        return Err(RfmError::DimensionMismatch("exact solution and model differ in components".into()));
    }
    let columns = |n: usize| -> Vec<Vec<f64>> { (0..n).map(|_| Vec::with_capacity(pts.len())).collect() };
    let mut approx = columns(k);
    let mut truth = columns(k);
    let mut stress = elasticity.map(|_| (columns(3), columns(3)));
    for x in &pts {
        let jets: Vec<_> = (0..k).map(|c| model.model_jet(coefficients, x, c)).collect::<Result<_>>()?;
        let exact_jets = exact.jets(x);
        for c in 0..k {
            approx[c].push(jets[c].value());
            truth[c].push(exact_jets[c].value());
        }
        if let (Some(constants), Some((sa, se))) = (elasticity, stress.as_mut()) {
            let s = constants.stress(&jets[0], &jets[1]);
            let t = constants.stress(&exact_jets[0], &exact_jets[1]);
            for i in 0..3 {
                sa[i].push(s[i]);
                se[i].push(t[i]);
            }
        }
    }
    Ok(ErrorReport {
        grid_counts: colloc_counts.iter().map(|c| 2 * c).collect(),
        points: pts.len(),
        components: (0..k).map(|c| ErrorNorms::from_samples(&approx[c], &truth[c])).collect(),
        stresses: stress.map(|(sa, se)| {
            let norm = |v: &Vec<f64>| pairwise_sum(&v.iter().map(|e| e * e).collect::<Vec<_>>()).sqrt();
            let scale = se.iter().map(norm).fold(0.0, f64::max);
            std::array::from_fn(|i| ErrorNorms::from_samples_scaled(&sa[i], &se[i], scale))
        }),
    })
}

/// A solved run identified by the problem it solves.
#[derive(Debug, Clone, Copy)]
pub struct SolvedRun<'a> {
    pub problem: &'a str,
    pub model: &'a RfmModel,
    pub coefficients: &'a [f64],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub columns: usize,
    /// `(component, derivative, norms)`.
    pub errors: Vec<(usize, Deriv, ErrorNorms)>,
}

/// Errors of each run against `reference` at `probes` for the requested
/// components and derivatives.
pub fn self_convergence(
    runs: &[SolvedRun<'_>],
    reference: &SolvedRun<'_>,
    probes: &[Point],
    fields: &[(usize, Deriv)],
) -> Result<Vec<ConvergenceRow>> {
    if runs.is_empty() {
        return Err(RfmError::Config("self-convergence needs at least one run besides the reference".into()));
    }
    if probes.is_empty() {
        return Err(RfmError::DegenerateSampling("no probe points".into()));
    }
    if let Some(r) = runs.iter().find(|r| r.problem != reference.problem) {
        return Err(RfmError::Config(format!("run of '{}' compared with '{}'", r.problem, reference.problem)));
    }
    let sample = |run: &SolvedRun<'_>, c: usize, d: Deriv| -> Result<Vec<f64>> {
        probes.iter().map(|x| run.model.model_eval(run.coefficients, x, c, d)).collect()
    };
    let mut reference_values = Vec::with_capacity(fields.len());
    for &(c, d) in fields {
        reference_values.push(sample(reference, c, d)?);
    }
    runs.iter()
        .map(|run| {
            let mut errors = Vec::with_capacity(fields.len());
            for (&(c, d), truth) in fields.iter().zip(&reference_values) {
                errors.push((c, d, ErrorNorms::from_samples(&sample(run, c, d)?, truth)));
            }
            Ok(ConvergenceRow { columns: run.model.columns(), errors })
        })
        .collect()
}

/// Radially binned energy of the 2D DFT of a grid function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierProfile {
    /// `bins[r]`: `Σ |F_k|² / (nx ny)` over wavenumbers with `round(|k|) = r`.
    pub bins: Vec<f64>,
}

impl FourierProfile {
    /// Energy in bins `0..=cutoff`.
    pub fn low_frequency_energy(&self, cutoff: usize) -> f64 {
        self.bins.iter().take(cutoff + 1).sum()
    }

    pub fn total_energy(&self) -> f64 {
        pairwise_sum(&self.bins)
    }
}

/// `values[i * ny + j]` is the sample at the `i`-th x and `j`-th y node.
pub fn fourier_error_profile(values: &[f64], nx: usize, ny: usize) -> Result<FourierProfile> {
    if nx == 0 || ny == 0 || values.len() != nx * ny {
        return Err(RfmError::DimensionMismatch(format!("{} samples on a {nx}x{ny} grid", values.len())));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fy = planner.plan_fft_forward(ny);
    for row in buf.chunks_exact_mut(ny) {
        fy.process(row);
    }
    let fx = planner.plan_fft_forward(nx);
    let mut col = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            col[i] = buf[i * ny + j];
        }
        fx.process(&mut col);
        for i in 0..nx {
            buf[i * ny + j] = col[i];
        }
    }
    let fold = |i: usize, n: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
    let kmax = ((nx / 2) as f64).hypot((ny / 2) as f64).round() as usize;
    let mut bins = vec![0.0; kmax + 1];
    let norm = (nx * ny) as f64;
    for i in 0..nx {
        for j in 0..ny {
            let r = fold(i, nx).hypot(fold(j, ny)).round() as usize;
            bins[r] += buf[i * ny + j].norm_sqr() / norm;
        }
    }
    Ok(FourierProfile { bins })
}

/// Model-minus-exact error of `component` on the full cell-centered grid
/// of the bounding box, ordered as [`fourier_error_profile`] expects.
pub fn error_grid(
    model: &RfmModel,
    coefficients: &[f64],
    exact: &dyn ManufacturedSolution,
    domain: &Domain,
    counts: [usize; 2],
    component: usize,
) -> Result<Vec<f64>> {
    domain
        .grid(&counts)?
        .iter()
        .map(|x| Ok(model.model_eval(coefficients, x, component, Deriv::Value)? - exact.value(x, component)))
        .collect()
}
