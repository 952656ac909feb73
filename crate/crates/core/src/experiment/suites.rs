//! Table suites: a base config plus a manifest of variants per suite.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::{field_names, run_experiment, ExperimentConfig, FieldError, RunOutcome, RunRecord};
use crate::error::{Result, RfmError};
use crate::evaluation::{self, ErrorNorms, SolvedRun};
use crate::geometry::Membership;
use crate::jet::Deriv;

macro_rules! suite_files {
    ($($id:literal),* $(,)?) => {
        /// `(id, base config, manifest)` of every shipped suite.
        pub const SUITES: &[(&str, &str, &str)] = &[
            $(($id,
               include_str!(concat!("../../suites/", $id, "/base.toml")),
               include_str!(concat!("../../suites/", $id, "/manifest.toml")))),*
        ];
    };
}

suite_files!(
    "helmholtz-pou",
    "poisson-pou",
    "poisson-multiscale",
    "helmholtz-adaptive",
    "poisson-adaptive",
    "timoshenko",
    "holed-plate",
    "stokes-exact",
    "homogenization-desk",
    "channel-flow",
);

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteMode {
    /// Errors against the manufactured solution.
    #[default]
    Exact,
    /// Errors against the last variant of the same seed.
    SelfConvergence,
    /// No error columns.
    Plain,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    description: String,
    #[serde(default)]
    mode: SuiteMode,
    /// Fields compared in self-convergence mode, e.g. `u`, `u_x`, `v_y`.
    #[serde(default)]
    fields: Vec<String>,
    /// Probe grid per axis in self-convergence mode.
    #[serde(default)]
    probes: Vec<usize>,
    variant: Vec<Variant>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Variant {
    label: String,
    /// Dotted-key overrides of the base config.
    #[serde(default)]
    set: Table,
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub label: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub id: String,
    pub description: String,
    pub mode: SuiteMode,
    pub fields: Vec<String>,
    pub probes: Vec<usize>,
    pub entries: Vec<SuiteEntry>,
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| RfmError::Config(format!("empty key '{key}'")))?;
    let mut t = table;
    for p in parts {
        t = t
            .entry(p)
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| RfmError::Config(format!("'{p}' in '{key}' is not a table")))?;
    }
    t.insert(last.to_string(), value);
    Ok(())
}

/// Expands a base config and manifest into concrete configs.
pub fn parse_suite(id: &str, base: &str, manifest: &str) -> Result<Suite> {
    let ctx = |e: String| RfmError::Config(format!("suite {id}: {e}"));
    let base: Table = toml::from_str(base).map_err(|e| ctx(e.to_string()))?;
    let manifest: Manifest = toml::from_str(manifest).map_err(|e| ctx(e.to_string()))?;
    if manifest.variant.is_empty() {
        return Err(ctx("no variants".into()));
    }
    let mut entries = Vec::with_capacity(manifest.variant.len());
    for v in manifest.variant {
        let mut t = base.clone();
        for (k, val) in v.set {
            set_dotted(&mut t, &k, val).map_err(|e| ctx(e.to_string()))?;
        }
        let text = toml::to_string(&t).map_err(|e| ctx(e.to_string()))?;
        let config = ExperimentConfig::from_toml(&text).map_err(|e| ctx(format!("{}: {e}", v.label)))?;
        entries.push(SuiteEntry { label: v.label, config });
    }
    if manifest.mode == SuiteMode::SelfConvergence && (manifest.fields.is_empty() || manifest.probes.is_empty()) {
        return Err(ctx("self-convergence needs fields and probes".into()));
    }
    Ok(Suite {
        id: id.to_string(),
        description: manifest.description,
        mode: manifest.mode,
        fields: manifest.fields,
        probes: manifest.probes,
        entries,
    })
}

/// Suite by id.
pub fn suite(id: &str) -> Result<Suite> {
    let (_, base, manifest) = SUITES
        .iter()
        .find(|s| s.0 == id)
        .ok_or_else(|| RfmError::Config(format!("unknown suite '{id}' (known: {})", suite_ids().join(", "))))?;
    parse_suite(id, base, manifest)
}

/// One line of a table: medians over seeds for one variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    /// `suite:variant`.
    pub suite: String,
    pub m: usize,
    pub n: usize,
    pub seed_count: usize,
    pub errors: Vec<FieldError>,
    pub rank: usize,
    pub loss: f64,
    pub wall_time_s: f64,
}

/// Upper median; NaN entries sort last.
fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

fn parse_field(name: &str, fields: &[&str]) -> Result<(usize, Deriv)> {
    let (base, d) = match name.split_once('_') {
        None => (name, Deriv::Value),
        Some((b, "x")) => (b, Deriv::Dx),
        Some((b, "y")) => (b, Deriv::Dy),
        _ => return Err(RfmError::Config(format!("field '{name}'"))),
    };
    let c = fields
        .iter()
        .position(|f| *f == base)
        .ok_or_else(|| RfmError::Config(format!("field '{name}' not among {fields:?}")))?;
    Ok((c, d))
}

/// Replaces the errors of every run of one seed by errors against the last run.
fn self_converge(suite: &Suite, runs: &mut [(RunOutcome, String)]) -> Result<()> {
    let Some((reference, _)) = runs.last() else { return Ok(()) };
    let cfg = &suite.entries[0].config;
    let names = field_names(&cfg.problem);
    let fields: Vec<(usize, Deriv)> = suite.fields.iter().map(|f| parse_field(f, &names)).collect::<Result<_>>()?;
    let domain = &reference.setup.problem.domain;
    let probes: Vec<_> = domain
        .grid(&suite.probes)?
        .into_iter()
        .filter(|x| domain.contains(x) == Membership::Interior)
        .collect();
    let problem = cfg.problem.kind();
    fn as_run<'a>(problem: &'a str, o: &'a RunOutcome) -> SolvedRun<'a> {
        SolvedRun { problem, model: &o.setup.model, coefficients: &o.solve.coefficients }
    }
    let solved: Vec<SolvedRun<'_>> = runs.iter().map(|(o, _)| as_run(problem, o)).collect();
    let rows = evaluation::self_convergence(&solved, &as_run(problem, reference), &probes, &fields)?;
    let errors: Vec<Vec<FieldError>> = rows
        .into_iter()
        .map(|row| {
            row.errors
                .iter()
                .zip(&suite.fields)
                .map(|((_, _, e), name): (&(usize, Deriv, ErrorNorms), _)| FieldError {
                    field: name.clone(),
                    linf: e.linf,
                    rel_l2: e.rel_l2,
                })
                .collect()
        })
        .collect();
    for ((o, _), e) in runs.iter_mut().zip(errors) {
        o.record.errors = e;
    }
    Ok(())
}

/// Runs every variant of a suite for every seed and reports medians.
pub fn run_suite(suite: &Suite, seeds: &[u64]) -> Result<(Vec<TableRow>, Vec<RunRecord>)> {
    if seeds.is_empty() {
        return Err(RfmError::Config("empty seed list".into()));
    }
    let mut records: Vec<Vec<RunRecord>> = vec![Vec::new(); suite.entries.len()];
    for &seed in seeds {
        let mut runs = Vec::with_capacity(suite.entries.len());
        for e in &suite.entries {
            let mut cfg = e.config.clone();
            cfg.seed = seed;
            runs.push((run_experiment(&cfg)?, e.label.clone()));
        }
        match suite.mode {
            SuiteMode::SelfConvergence => self_converge(suite, &mut runs)?,
            SuiteMode::Plain => runs.iter_mut().for_each(|(o, _)| o.record.errors.clear()),
            SuiteMode::Exact => {}
        }
        for (i, (o, _)) in runs.into_iter().enumerate() {
            records[i].push(o.record);
        }
    }
    let rows = suite
        .entries
        .iter()
        .zip(&records)
        .map(|(e, recs)| {
            let first = &recs[0];
            let errors = first
                .errors
                .iter()
                .enumerate()
                .map(|(k, f)| FieldError {
                    field: f.field.clone(),
                    linf: median(recs.iter().map(|r| r.errors[k].linf).collect()),
                    rel_l2: median(recs.iter().map(|r| r.errors[k].rel_l2).collect()),
                })
                .collect();
            let mut ranks: Vec<usize> = recs.iter().map(|r| r.rank).collect();
            ranks.sort_unstable();
            TableRow {
                suite: format!("{}:{}", suite.id, e.label),
                m: first.m,
                n: first.n,
                seed_count: recs.len(),
                errors,
                rank: ranks[ranks.len() / 2],
                loss: median(recs.iter().map(|r| r.loss).collect()),
                wall_time_s: median(recs.iter().map(|r| r.wall_time_s).collect()),
            }
        })
        .collect();
    Ok((rows, records.into_iter().flatten().collect()))
}

/// Runs a shipped suite by id.
pub fn run_table(id: &str, seeds: &[u64]) -> Result<Vec<TableRow>> {
    if seeds.is_empty() {
        return Err(RfmError::Config("empty seed list".into()));
    }
    Ok(run_suite(&suite(id)?, seeds)?.0)
}

/// Columns: suite, M, N, seed_count, `<field>_linf` and `<field>_rel_l2`
/// per field, rank, loss, wall_time_s.
pub fn write_table(path: &Path, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = ["suite", "M", "N", "seed_count"].map(String::from).to_vec();
    if let Some(r) = rows.first() {
        for e in &r.errors {
            header.push(format!("{}_linf", e.field));
            header.push(format!("{}_rel_l2", e.field));
        }
    }
    header.extend(["rank", "loss", "wall_time_s"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![r.suite.clone(), r.m.to_string(), r.n.to_string(), r.seed_count.to_string()];
        for e in &r.errors {
            row.push(format!("{:e}", e.linf));
            row.push(format!("{:e}", e.rel_l2));
        }
        row.push(r.rank.to_string());
        row.push(format!("{:e}", r.loss));
        row.push(format!("{:e}", r.wall_time_s));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// The same run with rescaling on and with unit weights.
pub fn rescale_ablation(cfg: &ExperimentConfig) -> Result<(RunRecord, RunRecord)> {
    let mut on = cfg.clone();
    on.solve.rescale = true;
    let mut off = cfg.clone();
    off.solve.rescale = false;
    Ok((run_experiment(&on)?.record, run_experiment(&off)?.record))
}
