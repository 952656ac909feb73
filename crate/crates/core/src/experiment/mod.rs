//! End-to-end runs: configuration, pipeline, records and suites.

mod config;
mod suites;

pub use config::{
    BasisConfig, CollocationConfig, DomainConfig, ElasticSolution, ExperimentConfig, HelmholtzSolution,
    OutputConfig, ProblemConfig, SolveConfig,
};
pub use suites::{
    parse_suite, rescale_ablation, run_suite, run_table, suite, suite_ids, write_table, Suite, SuiteEntry, SuiteMode,
    TableRow, SUITES,
};

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::assembly::{self, WeightedSystem};
use crate::basis::{select_feature_range, FeatureSampler, ModelSpec, RfmModel};
use crate::error::{Result, RfmError};
use crate::evaluation::{self, ErrorNorms};
use crate::geometry::{BoundaryCounts, CollocationSet, Domain, Membership, Segment};
use crate::problems::{
    self, BoundaryKind, ElasticityConstants, HelmholtzMultiMode, HelmholtzSmooth, HoledPlate,
    HomogenizationCoefficient, ManufacturedSolution, PdeProblem, PoissonProduct, StokesPolynomial, Timoshenko,
};
use crate::solver::{self, LstsqReport};

/// Problem, model and collocation points of a configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub problem: PdeProblem,
    pub model: RfmModel,
    pub colloc: CollocationSet,
    /// Feature range actually used (after adaptive selection).
    pub range: f64,
    pub elasticity: Option<ElasticityConstants>,
}

/// Named error of one output field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub linf: f64,
    pub rel_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub name: String,
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub range: f64,
    pub errors: Vec<FieldError>,
    pub loss: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn error(&self, field: &str) -> Option<&FieldError> {
        self.errors.iter().find(|e| e.field == field)
    }
}

/// A finished run together with what is needed to evaluate it further.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub setup: Setup,
    pub solve: LstsqReport,
}

pub fn build_domain(cfg: &DomainConfig) -> Result<Domain> {
    match cfg {
        DomainConfig::Interval { lower, upper } => Domain::interval(*lower, *upper),
        DomainConfig::Rectangle { lower, upper, holes } => Domain::rectangle(*lower, *upper)?.with_holes(holes.clone()),
        DomainConfig::Disk { center, radius } => Domain::disk(*center, *radius),
    }
}

/// Manufactured solution of a problem configuration, if it has one.
pub fn exact_solution(cfg: &ProblemConfig) -> Result<Option<Arc<dyn ManufacturedSolution>>> {
    Ok(match cfg {
        ProblemConfig::Helmholtz { solution: HelmholtzSolution::Smooth, .. } => Some(Arc::new(HelmholtzSmooth)),
        ProblemConfig::Helmholtz { solution: HelmholtzSolution::MultiMode, .. } => Some(Arc::new(HelmholtzMultiMode)),
        ProblemConfig::Poisson { low, high } => Some(Arc::new(PoissonProduct { low: *low, high: *high })),
        ProblemConfig::Elasticity { e, nu, solution, p, d, l, .. } => {
            let constants = ElasticityConstants::new(*e, *nu)?;
            match solution {
                ElasticSolution::Timoshenko => Some(Arc::new(Timoshenko { constants, p: *p, d: *d, l: *l })),
                ElasticSolution::HoledPlate => Some(Arc::new(HoledPlate)),
            }
        }
        ProblemConfig::Stokes { .. } => Some(Arc::new(StokesPolynomial)),
        ProblemConfig::ChannelFlow { .. } | ProblemConfig::Homogenization { .. } => None,
    })
}

fn build_problem(cfg: &ProblemConfig, domain: Domain) -> Result<(PdeProblem, Option<ElasticityConstants>)> {
    let exact = exact_solution(cfg)?;
    let need = || exact.clone().expect("manufactured problem");
    Ok(match cfg {
        ProblemConfig::Helmholtz { lambda, .. } => (problems::make_helmholtz_1d(domain, *lambda, need())?, None),
        ProblemConfig::Poisson { .. } => (problems::make_poisson_2d(domain, need())?, None),
        ProblemConfig::Elasticity { e, nu, dirichlet, .. } => {
            let constants = ElasticityConstants::new(*e, *nu)?;
            let assignment: Vec<(Segment, BoundaryKind)> = domain
                .segments()
                .into_iter()
                .map(|s| (s, if dirichlet.contains(&s) { BoundaryKind::Dirichlet } else { BoundaryKind::Neumann }))
                .collect();
            if let Some(s) = dirichlet.iter().find(|s| !domain.segments().contains(s)) {
                return Err(RfmError::Config(format!("{s} is not a boundary segment of the domain")));
            }
            (problems::make_elasticity_2d(constants, domain, &assignment, need())?, Some(constants))
        }
        ProblemConfig::Stokes { pin } => (problems::make_stokes_2d(domain, need(), *pin)?, None),
        ProblemConfig::ChannelFlow { pin } => (problems::make_channel_flow(domain, *pin)?, None),
        ProblemConfig::Homogenization { bound, amplitude, coefficient_seed, forcing } => {
            let coef = HomogenizationCoefficient::random(*bound, *amplitude, *coefficient_seed);
            (problems::make_varcoef_elliptic(domain, coef, *forcing)?, None)
        }
    })
}

/// Samples per axis line for adaptive range selection.
const SPECTRAL_SAMPLES: usize = 512;

/// Largest normalized forcing frequency over axis-aligned sample lines.
fn adaptive_range(problem: &PdeProblem, radius: [f64; 2], threshold: f64) -> Result<f64> {
    let d = &problem.domain;
    let (lo, hi) = (d.lower(), d.upper());
    let mut best: f64 = 0.0;
    for ax in 0..d.dim() {
        let h = (hi[ax] - lo[ax]) / SPECTRAL_SAMPLES as f64;
        let lines: Vec<f64> = if d.dim() == 1 {
            vec![0.0]
        } else {
            let o = 1 - ax;
            crate::geometry::cell_centers(lo[o], hi[o], 8)
        };
        for &t in &lines {
            let samples: Vec<f64> = (0..SPECTRAL_SAMPLES)
                .map(|i| {
                    let mut x = [0.0; 2];
                    x[ax] = lo[ax] + (i as f64 + 0.5) * h;
                    if d.dim() == 2 {
                        x[1 - ax] = t;
                    }
                    (problem.forcing)(&x)[0]
                })
                .collect();
            if samples.iter().all(|&v| v == 0.0) {
                continue;
            }
            best = best.max(select_feature_range(&samples, h, radius[ax], threshold)?);
        }
    }
    Ok(if best > 0.0 { best } else { crate::basis::DEFAULT_FEATURE_RANGE })
}

/// Geometry, problem, basis and collocation points.
pub fn build_setup(cfg: &ExperimentConfig) -> Result<Setup> {
    cfg.validate()?;
    let domain = build_domain(&cfg.domain)?;
    let (problem, elasticity) = build_problem(&cfg.problem, domain.clone())?;
    let b = &cfg.basis;
    let tiling = crate::geometry::Tiling::new(&domain, &b.patches)?;
    let range = if b.adaptive { adaptive_range(&problem, tiling.radius(), b.spectral_threshold)? } else { b.range };
    let spec = ModelSpec {
        patches: b.patches.clone(),
        features_per_patch: b.features_per_patch,
        pou: b.pou,
        activation: b.activation,
        sampler: FeatureSampler::new(range, b.sampling, cfg.seed)?,
        patch_ranges: b.patch_ranges.clone(),
        multiscale: b.multiscale,
        components: cfg.problem.components(),
    };
    let model = RfmModel::build(&domain, &spec)?;
    let c = &cfg.collocation;
    let interface = if b.pou == crate::basis::PouKind::A && tiling.len() > 1 {
        tiling.sample_interface(&domain, c.interface_per_edge.max(1))
    } else {
        Vec::new()
    };
    let colloc = CollocationSet {
        interior: domain.sample_interior(&c.interior)?,
        boundary: domain.sample_boundary(BoundaryCounts { per_edge: c.boundary_per_edge, per_hole: c.boundary_per_hole }),
        interface,
    };
    Ok(Setup { problem, model, colloc, range, elasticity })
}

/// Assembles and, if enabled, rescales the system of a setup.
pub fn build_system(setup: &Setup, cfg: &ExperimentConfig) -> Result<WeightedSystem> {
    let sys = assembly::assemble(&setup.problem, &setup.model, &setup.colloc)?;
    if cfg.solve.rescale {
        assembly::rescale(sys, cfg.solve.c, cfg.solve.residual_scale)
    } else {
        Ok(sys)
    }
}

fn field_names(cfg: &ProblemConfig) -> Vec<&'static str> {
    match cfg {
        ProblemConfig::Elasticity { .. } => vec!["u", "v"],
        ProblemConfig::Stokes { .. } | ProblemConfig::ChannelFlow { .. } => vec!["u", "v", "p"],
        _ => vec!["u"],
    }
}

fn with_context<T>(cfg: &ExperimentConfig, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        RfmError::Config(m) => RfmError::Config(format!("{}: {m}", cfg.name)),
        other => other,
    })
}

/// Runs the full pipeline, optionally dumping the weighted system.
pub fn run_experiment_with(cfg: &ExperimentConfig, dump: Option<&Path>) -> Result<RunOutcome> {
    let start = Instant::now();
    let setup = with_context(cfg, build_setup(cfg))?;
    let sys = with_context(cfg, build_system(&setup, cfg))?;
    if let Some(path) = dump {
        sys.write_dump(path)?;
    }
    let a = sys.weighted_matrix();
    let b = sys.weighted_rhs();
    let (n, m) = (sys.rows(), sys.cols());
    let solve = solver::solve_min_norm(a.as_ref(), &b, cfg.solve.rank_tol)?;
    drop(a);
    let (_, loss) = assembly::residual(&sys, &solve.coefficients)?;
    drop(sys);
    let mut errors = Vec::new();
    if let Some(exact) = &setup.problem.exact {
        let report = evaluation::evaluate_error(
            &setup.model,
            &solve.coefficients,
            exact.as_ref(),
            &setup.problem.domain,
            &cfg.collocation.interior,
            setup.elasticity.as_ref(),
        )?;
        let push = |errors: &mut Vec<FieldError>, field: &str, e: &ErrorNorms| {
            errors.push(FieldError { field: field.into(), linf: e.linf, rel_l2: e.rel_l2 })
        };
        for (name, e) in field_names(&cfg.problem).iter().zip(&report.components) {
            push(&mut errors, name, e);
        }
        if let Some(s) = &report.stresses {
            for (name, e) in ["sigma_x", "sigma_y", "tau_xy"].iter().zip(s) {
                push(&mut errors, name, e);
            }
        }
    }
    let record = RunRecord {
        name: cfg.name.clone(),
        config_hash: cfg.hash()?,
        seed: cfg.seed,
        n,
        m,
        rank: solve.rank,
        range: setup.range,
        errors,
        loss,
        sigma_max: solve.sigma_max,
        sigma_min: solve.sigma_min_retained,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome { record, setup, solve })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    run_experiment_with(cfg, None)
}

/// Appends one CSV row per record: name, hash, seed, N, M, rank, range,
/// per-field `linf` and `rel_l2`, loss, singular values, wall time.
pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let fields: Vec<String> = records.first().map(|r| r.errors.iter().map(|e| e.field.clone()).collect()).unwrap_or_default();
    let mut header: Vec<String> = ["name", "config_hash", "seed", "N", "M", "rank", "range"].map(String::from).to_vec();
    for f in &fields {
        header.push(format!("{f}_linf"));
        header.push(format!("{f}_rel_l2"));
    }
    header.extend(["loss", "sigma_max", "sigma_min", "wall_time_s"].map(String::from));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.name.clone(),
            r.config_hash.clone(),
            r.seed.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.rank.to_string(),
            format!("{:e}", r.range),
        ];
        for e in &r.errors {
            row.push(format!("{:e}", e.linf));
            row.push(format!("{:e}", e.rel_l2));
        }
        row.extend([r.loss, r.sigma_max, r.sigma_min, r.wall_time_s].map(|v| format!("{v:e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x y value…` lines of the solution on a uniform grid, skipping
/// points outside the domain.
pub fn write_snapshot(path: &Path, setup: &Setup, coefficients: &[f64], counts: &[usize]) -> Result<()> {
    let domain = &setup.problem.domain;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let k = setup.model.num_components();
    writeln!(out, "# x y {}", (0..k).map(|c| format!("c{c}")).collect::<Vec<_>>().join(" "))?;
    for x in domain.grid(counts)? {
        if domain.contains(&x) == Membership::Exterior {
            continue;
        }
        write!(out, "{:e} {:e}", x[0], x[1])?;
        for c in 0..k {
            write!(out, " {:e}", setup.model.model_eval(coefficients, &x, c, crate::jet::Deriv::Value)?)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
