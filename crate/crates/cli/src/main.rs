use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rfm::experiment::{self, ExperimentConfig, RunRecord};

#[derive(Parser)]
#[command(name = "rfm", version, about = "Random feature method experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Write the weighted system to this file.
        #[arg(long)]
        dump_system: Option<PathBuf>,
    },
    /// Run a shipped suite over seeds 0..k and write its table.
    Table {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run a config with and without row rescaling.
    AblateRescale {
        #[arg(long)]
        config: PathBuf,
    },
}

fn print_record(tag: &str, r: &RunRecord) {
    let errors: Vec<String> = r.errors.iter().map(|e| format!("{} {:.3e}/{:.3e}", e.field, e.linf, e.rel_l2)).collect();
    println!(
        "{tag}{}: seed {} N {} M {} rank {} loss {:.3e} time {:.2}s  [linf/rel_l2] {}",
        r.name,
        r.seed,
        r.n,
        r.m,
        r.rank,
        r.loss,
        r.wall_time_s,
        errors.join(", ")
    );
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(config: &Path, seed: Option<u64>, out: &Path, dump: Option<&Path>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = experiment::run_experiment_with(&cfg, dump)?;
    create_dir(out)?;
    let stem = format!("{}-seed{}", cfg.name, cfg.seed);
    let csv = out.join(format!("{stem}.csv"));
    experiment::write_records(&csv, std::slice::from_ref(&outcome.record))?;
    print_record("", &outcome.record);
    println!("wrote {}", csv.display());
    if let Some(counts) = &cfg.output.snapshot {
        let path = out.join(format!("{stem}-snapshot.txt"));
        experiment::write_snapshot(&path, &outcome.setup, &outcome.solve.coefficients, counts)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn table(id: &str, seeds: u64, out: &Path) -> Result<()> {
    if seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let suite = experiment::suite(id)?;
    println!("{}: {} ({} variants x {seeds} seeds)", suite.id, suite.description, suite.entries.len());
    let seed_list: Vec<u64> = (0..seeds).collect();
    let (rows, records) = experiment::run_suite(&suite, &seed_list)?;
    create_dir(out)?;
    let table = out.join(format!("{id}.csv"));
    experiment::write_table(&table, &rows)?;
    let runs = out.join(format!("{id}-runs.csv"));
    experiment::write_records(&runs, &records)?;
    for r in &rows {
        let errors: Vec<String> = r.errors.iter().map(|e| format!("{} {:.3e}", e.field, e.linf)).collect();
        println!("{:<40} M {:>5} N {:>6} rank {:>5}  {}", r.suite, r.m, r.n, r.rank, errors.join("  "));
    }
    println!("wrote {} and {}", table.display(), runs.display());
    Ok(())
}

fn ablate(config: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let (on, off) = experiment::rescale_ablation(&cfg)?;
    print_record("rescaled   ", &on);
    print_record("unit rows  ", &off);
    Ok(())
}

fn main() -> Result<()> {
    rfm::solver::configure_threads_from_env();
    match Cli::parse().command {
        Command::Run { config, seed, out, dump_system } => run(&config, seed, &out, dump_system.as_deref()),
        Command::Table { suite, seeds, out } => table(&suite, seeds, &out),
        Command::AblateRescale { config } => ablate(&config),
    }
}
