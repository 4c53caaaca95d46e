use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ldos_lab::acceptance;
use ldos_lab::cache::EigenCache;
use ldos_lab::config::{ConfigError, ExperimentConfig, System};
use ldos_lab::experiments::{
    catmap_ldos, catmap_sweep, dephasing_comparison, po_uniformity, point_seed, stadium_sweep,
    with_pool, CatmapSetup, RowStatus,
};
use ldos_lab::output::{write_csv, write_histogram, write_timing};
use ldos_lab::tolerances::{DEFAULT_SEED, PO_CAP};
use log::info;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "ldos-lab",
    version,
    about = "LDOS width experiments on perturbed cat maps and the stadium billiard"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `threads`.
    #[arg(long)]
    threads: Option<usize>,
    /// Eigensystem cache directory; overrides `cache_dir`.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Base seed; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Width of the LDOS against the semiclassical prediction over `chi_grid`.
    CatmapSweep(Common),
    /// Histogram and fitted periodized Lorentzian at one χ.
    CatmapLdos {
        #[command(flatten)]
        common: Common,
        /// Scaled strength; defaults to the first `chi_grid` entry.
        #[arg(long)]
        chi: Option<f64>,
    },
    /// Survival amplitude against the dephasing estimate and `exp(-γm)`.
    Dephasing(Common),
    /// Semiclassical widths of the deformed stadium.
    StadiumSweep(Common),
    /// Orbit-action uniformity of the unperturbed periodic orbits.
    PoUniformity(Common),
    /// Runs the acceptance suite.
    Selftest(Common),
}

/// Config plus command-line overrides.
struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    cache: Option<EigenCache>,
    seed: u64,
}

fn load(common: &Common, expected: Option<System>) -> Result<Run, ConfigError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(system) = expected {
        if cfg.system != system {
            return Err(ConfigError::Invalid(format!(
                "this command needs system {system:?}, got {:?}",
                cfg.system
            )));
        }
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if common.seed.is_some() {
        cfg.seed = common.seed.unwrap_or_default();
    }
    cfg.validate()?;
    let out = common
        .out
        .clone()
        .or(cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let cache = match common.cache.clone().or(cfg.cache_dir.clone()) {
        Some(dir) => Some(EigenCache::new(dir).map_err(|e| ConfigError::Invalid(e.to_string()))?),
        None => None,
    };
    Ok(Run {
        seed: cfg.seed,
        cfg,
        out,
        cache,
    })
}

fn setups(cfg: &ExperimentConfig) -> anyhow::Result<Vec<CatmapSetup>> {
    let base = cfg.base_spec()?;
    Ok(cfg
        .dimensions()
        .into_iter()
        .map(|n| {
            let mut s = CatmapSetup::new(n, base);
            s.knobs = cfg.quantization;
            s.bins = cfg.bins;
            s
        })
        .collect())
}

fn run_catmap_sweep(run: &Run) -> anyhow::Result<bool> {
    let mut rows = Vec::new();
    for mut setup in setups(&run.cfg)? {
        setup.fit = true;
        rows.extend(with_pool(run.cfg.threads, || {
            catmap_sweep(&setup, &run.cfg.chi_grid, run.cache.as_ref())
        })??);
    }
    let path = write_csv(&run.out, "catmap_sweep.csv", &rows)?;
    write_timing(&run.out, "catmap_sweep_timing.csv", &rows)?;
    info!("wrote {}", path.display());
    Ok(rows.iter().all(|r| r.status == RowStatus::Ok))
}

fn run_catmap_ldos(run: &Run, chi: Option<f64>) -> anyhow::Result<bool> {
    let Some(chi) = chi.or(run.cfg.chi_grid.first().copied()) else {
        bail!(ConfigError::Invalid(
            "give --chi or a nonempty chi_grid".into()
        ));
    };
    if !(chi.is_finite() && chi >= 0.0) {
        bail!(ConfigError::Invalid(
            "--chi must be finite and nonnegative".into()
        ));
    }
    let mut setup = setups(&run.cfg)?.remove(0);
    setup.fit = true;
    let report = with_pool(run.cfg.threads, || {
        catmap_ldos(&setup, chi, run.cache.as_ref())
    })??;
    write_histogram(&run.out, "catmap_ldos.csv", &report)?;
    write_csv(
        &run.out,
        "catmap_ldos_summary.csv",
        std::slice::from_ref(&report.row),
    )?;
    Ok(true)
}

fn run_dephasing(run: &Run) -> anyhow::Result<bool> {
    let setup = setups(&run.cfg)?.remove(0);
    let mut rows = Vec::new();
    for (i, &chi) in run.cfg.chi_grid.iter().enumerate() {
        let seed = point_seed(run.seed, i as u64);
        let cmp = with_pool(run.cfg.threads, || {
            dephasing_comparison(
                &setup,
                chi,
                run.cfg.steps,
                run.cfg.mc_samples,
                seed,
                run.cache.as_ref(),
            )
        })??;
        rows.extend(cmp.rows());
    }
    write_csv(&run.out, "dephasing.csv", &rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct OrbitRow {
    chi: f64,
    period: u32,
    action_fraction: f64,
}

#[derive(Serialize)]
struct OrbitSummary {
    chi: f64,
    orbits: usize,
    ks_distance: f64,
    truncated: bool,
}

fn run_po_uniformity(run: &Run) -> anyhow::Result<bool> {
    let setup = setups(&run.cfg)?.remove(0);
    let results = with_pool(run.cfg.threads, || {
        po_uniformity(&setup, &run.cfg.chi_grid, run.cfg.po_n_max, PO_CAP)
    })??;
    let mut orbits = Vec::new();
    let mut summary = Vec::new();
    for (chi, u) in &results {
        orbits.extend(u.orbits.iter().map(|&(period, action_fraction)| OrbitRow {
            chi: *chi,
            period,
            action_fraction,
        }));
        summary.push(OrbitSummary {
            chi: *chi,
            orbits: u.orbits.len(),
            ks_distance: u.ks_distance,
            truncated: u.truncated,
        });
    }
    write_csv(&run.out, "po_orbits.csv", &orbits)?;
    write_csv(&run.out, "po_summary.csv", &summary)?;
    Ok(true)
}

fn run_stadium_sweep(run: &Run) -> anyhow::Result<bool> {
    let rows = with_pool(run.cfg.threads, || stadium_sweep(&run.cfg.stadium))?;
    write_csv(&run.out, "stadium_sweep.csv", &rows)?;
    Ok(rows.iter().all(|r| r.status == RowStatus::Ok))
}

fn run_selftest(common: &Common) -> anyhow::Result<bool> {
    let cache = match &common.cache {
        Some(dir) => Some(EigenCache::new(dir)?),
        None => None,
    };
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        builder = builder.num_threads(t);
    }
    let results = builder
        .build()
        .context("thread pool")?
        .install(|| acceptance::run_all(seed, cache.as_ref()));
    for r in &results {
        println!("{r}");
    }
    Ok(results.iter().all(|r| r.passed))
}

fn dispatch(command: &Command) -> anyhow::Result<bool> {
    match command {
        Command::CatmapSweep(c) => run_catmap_sweep(&load(c, Some(System::Catmap))?),
        Command::CatmapLdos { common, chi } => {
            run_catmap_ldos(&load(common, Some(System::Catmap))?, *chi)
        }
        Command::Dephasing(c) => run_dephasing(&load(c, Some(System::Catmap))?),
        Command::StadiumSweep(c) => run_stadium_sweep(&load(c, Some(System::Stadium))?),
        Command::PoUniformity(c) => run_po_uniformity(&load(c, Some(System::Catmap))?),
        Command::Selftest(c) => run_selftest(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
