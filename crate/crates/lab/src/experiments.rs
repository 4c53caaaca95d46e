//! Sweep and experiment runners. Every runner returns rows in input order,
//! whatever the worker count.

use std::time::Instant;

use ldos_core::distributions::{
    fit_periodized_lorentzian, gamma_from_periodized_width, width_70, LorentzFit, WeightedHistogram,
};
use ldos_core::maps::{EffectivePlanck, PerturbationSpec};
use ldos_core::quantum::{
    ldos, survival_amplitude, EigenSystem, OverlapDistribution, QuantizationKnobs, QuantumError,
};
use ldos_core::rng::sample_stream;
use ldos_core::semiclassics::{
    catmap_gamma, dephasing_partial, po_action_uniformity, sigma_sc, sigma_sc_periodized_with,
    DephasingEstimate, DephasingSums, PoUniformity, PERIODIZATION_LINEAR,
};
use ldos_core::stadium::{gamma_stadium, sigma_sc_stadium};
use ldos_core::Complex64;
use log::{info, warn};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cache::{eigensystem, EigenCache};
use crate::config::StadiumConfig;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("{0}")]
    Semiclassics(#[from] ldos_core::semiclassics::SemiclassicsError),
    #[error("{0}")]
    Map(#[from] ldos_core::maps::MapError),
    #[error("{0}")]
    Distribution(#[from] ldos_core::distributions::DistributionError),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs `f` on a pool with `threads` workers (rayon's default when `None`).
pub fn with_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    Ok(builder.build()?.install(f))
}

/// Independent seed for point `index` of a sweep.
pub fn point_seed(seed: u64, index: u64) -> u64 {
    sample_stream(seed, index).random()
}

/// Shared inputs of a cat-map sweep at one dimension.
#[derive(Debug, Clone)]
pub struct CatmapSetup {
    pub n: usize,
    /// Unperturbed spec at the reference strength.
    pub base: PerturbationSpec,
    pub knobs: QuantizationKnobs,
    pub bins: usize,
    /// Fit a periodized Lorentzian to each LDOS histogram.
    pub fit: bool,
    /// Linear coefficient of the periodization correction.
    pub periodization_linear: f64,
}

impl CatmapSetup {
    pub fn new(n: usize, base: PerturbationSpec) -> Self {
        Self {
            n,
            base,
            knobs: QuantizationKnobs::default(),
            bins: ldos_core::distributions::DEFAULT_BINS,
            fit: false,
            periodization_linear: PERIODIZATION_LINEAR,
        }
    }

    pub fn delta_k(&self, chi: f64) -> f64 {
        chi / self.n as f64
    }

    pub fn perturbed(&self, chi: f64) -> PerturbationSpec {
        self.base
            .with_strength(self.base.strength() + self.delta_k(chi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed,
}

/// One χ point of a cat-map sweep. `NaN` marks values that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub chi: f64,
    pub delta_k: f64,
    pub sigma_quantum: f64,
    pub gamma: f64,
    pub sigma_sc: f64,
    pub sigma_sc_periodized: f64,
    pub fit_gamma: f64,
    pub status: RowStatus,
    #[serde(skip)]
    pub seconds: f64,
}

fn fit_histogram(
    dist: &OverlapDistribution,
    bins: usize,
    width: f64,
    fallback: f64,
) -> Result<LorentzFit, ExperimentError> {
    let hist = WeightedHistogram::from_sample(&dist.to_sample(), bins);
    let init = gamma_from_periodized_width(width)
        .filter(|g| *g > 0.0)
        .unwrap_or(fallback.max(1e-3));
    Ok(fit_periodized_lorentzian(&hist, init)?)
}

fn sweep_point(
    setup: &CatmapSetup,
    e0: &EigenSystem,
    chi: f64,
    cache: Option<&EigenCache>,
) -> Result<SweepRow, ExperimentError> {
    let planck = EffectivePlanck::new(setup.n)?;
    let dk = setup.delta_k(chi);
    let params = catmap_gamma(&setup.base, dk, &planck)?;
    let sc = sigma_sc(&params);
    let e1 = eigensystem(setup.n, &setup.perturbed(chi), &setup.knobs, cache)?;
    let dist = ldos(e0, &e1)?;
    let sigma = width_70(&dist.to_sample());
    let fit_gamma = if setup.fit {
        fit_histogram(&dist, setup.bins, sigma, params.gamma)?.gamma
    } else {
        f64::NAN
    };
    Ok(SweepRow {
        n: setup.n,
        chi,
        delta_k: dk,
        sigma_quantum: sigma,
        gamma: params.gamma,
        sigma_sc: sc,
        sigma_sc_periodized: sigma_sc_periodized_with(sc, setup.periodization_linear),
        fit_gamma,
        status: RowStatus::Ok,
        seconds: 0.0,
    })
}

/// Cat-map width sweep over `chis` at one dimension.
///
/// A point whose eigensolver or quadrature fails is kept as a `failed` row.
pub fn catmap_sweep(
    setup: &CatmapSetup,
    chis: &[f64],
    cache: Option<&EigenCache>,
) -> Result<Vec<SweepRow>, ExperimentError> {
    let e0 = eigensystem(setup.n, &setup.base, &setup.knobs, cache)?;
    Ok(chis
        .par_iter()
        .map(|&chi| {
            let start = Instant::now();
            let mut row = sweep_point(setup, &e0, chi, cache).unwrap_or_else(|e| {
                warn!("N={} chi={chi}: {e}", setup.n);
                SweepRow {
                    n: setup.n,
                    chi,
                    delta_k: setup.delta_k(chi),
                    sigma_quantum: f64::NAN,
                    gamma: f64::NAN,
                    sigma_sc: f64::NAN,
                    sigma_sc_periodized: f64::NAN,
                    fit_gamma: f64::NAN,
                    status: RowStatus::Failed,
                    seconds: 0.0,
                }
            });
            row.seconds = start.elapsed().as_secs_f64();
            info!(
                "N={} chi={chi:.4} sigma={:.5} ({:.2}s)",
                setup.n, row.sigma_quantum, row.seconds
            );
            row
        })
        .collect())
}

/// Histogram of one LDOS with its fitted periodized Lorentzian.
#[derive(Debug, Clone, PartialEq)]
pub struct LdosReport {
    pub row: SweepRow,
    pub histogram: WeightedHistogram,
    pub fit: LorentzFit,
    /// Bin-averaged density of the fitted curve.
    pub fit_density: Vec<f64>,
}

pub fn catmap_ldos(
    setup: &CatmapSetup,
    chi: f64,
    cache: Option<&EigenCache>,
) -> Result<LdosReport, ExperimentError> {
    let e0 = eigensystem(setup.n, &setup.base, &setup.knobs, cache)?;
    let e1 = eigensystem(setup.n, &setup.perturbed(chi), &setup.knobs, cache)?;
    let dist = ldos(&e0, &e1)?;
    let planck = EffectivePlanck::new(setup.n)?;
    let params = catmap_gamma(&setup.base, setup.delta_k(chi), &planck)?;
    let sigma = width_70(&dist.to_sample());
    let histogram = WeightedHistogram::from_sample(&dist.to_sample(), setup.bins);
    let fit = fit_histogram(&dist, setup.bins, sigma, params.gamma)?;
    let fit_density =
        WeightedHistogram::from_periodized_lorentzian(fit.gamma, fit.center, setup.bins).density;
    let sc = sigma_sc(&params);
    Ok(LdosReport {
        row: SweepRow {
            n: setup.n,
            chi,
            delta_k: setup.delta_k(chi),
            sigma_quantum: sigma,
            gamma: params.gamma,
            sigma_sc: sc,
            sigma_sc_periodized: sigma_sc_periodized_with(sc, setup.periodization_linear),
            fit_gamma: fit.gamma,
            status: RowStatus::Ok,
            seconds: 0.0,
        },
        histogram,
        fit,
        fit_density,
    })
}

/// Samples per work unit of the dephasing estimator. Fixed so the summation
/// order, and hence every bit of the result, does not depend on the pool size.
pub const DEPHASING_CHUNK: u64 = 4096;

/// Dephasing estimate with samples split across the current pool.
pub fn dephasing_parallel(
    m: usize,
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
    samples: u64,
    seed: u64,
) -> DephasingEstimate {
    let chunks = samples.div_ceil(DEPHASING_CHUNK);
    let parts: Vec<DephasingSums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * DEPHASING_CHUNK;
            let end = (start + DEPHASING_CHUNK).min(samples);
            dephasing_partial(m, spec, delta_k, planck, seed, start..end)
        })
        .collect();
    let mut total = DephasingSums::new(m);
    for p in &parts {
        total.merge(p);
    }
    total.finish()
}

/// Survival amplitude from the quantum LDOS next to its semiclassical estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingRow {
    pub chi: f64,
    pub m: usize,
    pub quantum_abs: f64,
    pub dephasing_re: f64,
    pub dephasing_im: f64,
    pub dephasing_abs: f64,
    pub dephasing_se: f64,
    pub exp_gamma_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingComparison {
    pub chi: f64,
    pub gamma: f64,
    pub quantum: Vec<Complex64>,
    pub dephasing: DephasingEstimate,
}

impl DephasingComparison {
    pub fn rows(&self) -> Vec<DephasingRow> {
        (0..self.quantum.len())
            .map(|m| DephasingRow {
                chi: self.chi,
                m,
                quantum_abs: self.quantum[m].norm(),
                dephasing_re: self.dephasing.mean[m].re,
                dephasing_im: self.dephasing.mean[m].im,
                dephasing_abs: self.dephasing.mean[m].norm(),
                dephasing_se: self.dephasing.std_error[m],
                exp_gamma_m: (-self.gamma * m as f64).exp(),
            })
            .collect()
    }
}

/// Compares `|Ā(m)|`, the dephasing estimate and `e^{−γm}` for `m = 0..=steps`.
pub fn dephasing_comparison(
    setup: &CatmapSetup,
    chi: f64,
    steps: usize,
    samples: u64,
    seed: u64,
    cache: Option<&EigenCache>,
) -> Result<DephasingComparison, ExperimentError> {
    let planck = EffectivePlanck::new(setup.n)?;
    let dk = setup.delta_k(chi);
    let e0 = eigensystem(setup.n, &setup.base, &setup.knobs, cache)?;
    let e1 = eigensystem(setup.n, &setup.perturbed(chi), &setup.knobs, cache)?;
    let quantum = survival_amplitude(&ldos(&e0, &e1)?, steps);
    let gamma = catmap_gamma(&setup.base, dk, &planck)?.gamma;
    let dephasing = dephasing_parallel(steps, &setup.base, dk, &planck, samples, seed);
    Ok(DephasingComparison {
        chi,
        gamma,
        quantum,
        dephasing,
    })
}

/// Orbit-action uniformity at each χ.
pub fn po_uniformity(
    setup: &CatmapSetup,
    chis: &[f64],
    n_max: u32,
    cap: usize,
) -> Result<Vec<(f64, PoUniformity)>, ExperimentError> {
    let planck = EffectivePlanck::new(setup.n)?;
    chis.par_iter()
        .map(|&chi| {
            Ok((
                chi,
                po_action_uniformity(n_max, setup.delta_k(chi), &setup.base, &planck, cap)?,
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StadiumRow {
    pub delta_x: f64,
    pub gamma: f64,
    pub sigma_sc: f64,
    pub status: RowStatus,
}

/// Semiclassical stadium widths over the deformation grid.
pub fn stadium_sweep(cfg: &StadiumConfig) -> Vec<StadiumRow> {
    cfg.delta_x_grid
        .par_iter()
        .map(|&dx| match gamma_stadium(cfg.x0, dx, cfg.p_mag, cfg.mass) {
            Ok(p) => StadiumRow {
                delta_x: dx,
                gamma: p.gamma,
                sigma_sc: sigma_sc_stadium(&p),
                status: RowStatus::Ok,
            },
            Err(e) => {
                warn!("delta_x={dx}: {e}");
                StadiumRow {
                    delta_x: dx,
                    gamma: f64::NAN,
                    sigma_sc: f64::NAN,
                    status: RowStatus::Failed,
                }
            }
        })
        .collect()
}
