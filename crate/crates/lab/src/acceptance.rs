//! Acceptance criteria. Each check returns one [`CriterionResult`], printed
//! as a tab-separated line: `A<id>  PASS|FAIL  value  tolerance  detail`.

use std::f64::consts::PI;
use std::fmt;

use ldos_core::distributions::{
    convolve_circular, gamma_from_periodized_width, periodized_lorentzian_pdf,
    periodized_width_exact, sample_wrapped_lorentzian, width_70, LorentzianParams,
    WeightedCircularSample,
};
use ldos_core::maps::{
    cat_matrix_power, fixed_point_count, periodic_points, PerturbationSpec, ShearKind, WindowMode,
};
use ldos_core::quantum::{ldos, QuantizationKnobs};
use ldos_core::rng::sample_stream;
use ldos_core::semiclassics::{
    lorentzian_width_factor, saturation_width, sigma_sc_periodized_with, PERIODIZATION_LINEAR,
};
use ldos_core::stadium::{
    collision_map, gamma_stadium, mean_bounce_time, shape_from_x, CollisionState,
};
use rand::Rng;
use rayon::prelude::*;

use crate::cache::{eigensystem, EigenCache};
use crate::config::{default_delta_x_grid, StadiumConfig};
use crate::experiments::{
    catmap_ldos, catmap_sweep, dephasing_comparison, po_uniformity, CatmapSetup, RowStatus,
    SweepRow,
};
use crate::tolerances::*;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, passed: bool, value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            id,
            passed,
            value,
            tolerance,
            detail,
        }
    }

    fn error(id: u8, tolerance: f64, err: impl fmt::Display) -> Self {
        Self::new(id, false, f64::NAN, tolerance, format!("error: {err}"))
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A{}\t{}\t{:.6e}\t{:.6e}\t{}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.value,
            self.tolerance,
            self.detail
        )
    }
}

/// Relative deviation `|a − b| / |b|`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NAN, f64::max)
}

/// Least-squares line `y = a + b x`; returns `(b, a, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy * sxy / (sxx * syy))
}

fn global_setup(n: usize) -> CatmapSetup {
    CatmapSetup::new(
        n,
        PerturbationSpec::global(ShearKind::MomentumShear, 0.0).expect("zero strength is valid"),
    )
}

fn local_setup(n: usize, beta: f64) -> CatmapSetup {
    CatmapSetup::new(
        n,
        PerturbationSpec::local(0.0, LOCAL_Q0, beta, WindowMode::Rescaled).expect("valid window"),
    )
}

fn chi_grid(range: (f64, f64), step: f64) -> Vec<f64> {
    let count = ((range.1 - range.0) / step).round() as usize;
    (0..=count).map(|i| range.0 + step * i as f64).collect()
}

/// Width estimator on uniform and wrapped-Lorentzian samples.
pub fn a1_width_calibration(seed: u64) -> CriterionResult {
    let uniform: Vec<f64> = (0..WIDTH_SAMPLES as u64)
        .into_par_iter()
        .map(|i| PI * (2.0 * sample_stream(seed, i).random::<f64>() - 1.0))
        .collect();
    let w_uniform = match WeightedCircularSample::unweighted(uniform) {
        Ok(s) => width_70(&s),
        Err(e) => return CriterionResult::error(1, LORENTZ_WIDTH_REL, e),
    };
    let uniform_dev = rel(w_uniform, saturation_width());
    let mut worst = 0.0f64;
    let mut parts = vec![format!("uniform {w_uniform:.5} (rel {uniform_dev:.2e})")];
    for (i, &g) in WIDTH_GAMMAS.iter().enumerate() {
        let sample = sample_wrapped_lorentzian(g, WIDTH_SAMPLES, seed.wrapping_add(1 + i as u64));
        let w = match WeightedCircularSample::unweighted(sample) {
            Ok(s) => width_70(&s),
            Err(e) => return CriterionResult::error(1, LORENTZ_WIDTH_REL, e),
        };
        let d = rel(w, LORENTZ_WIDTH_RATIO * g);
        worst = worst.max(d);
        parts.push(format!("gamma {g}: {:.5} gamma (rel {d:.2e})", w / g));
    }
    let passed = uniform_dev <= UNIFORM_WIDTH_REL && worst <= LORENTZ_WIDTH_REL;
    CriterionResult::new(1, passed, worst, LORENTZ_WIDTH_REL, parts.join("; "))
}

/// Convolution of two periodized Lorentzians against the summed-width closed form.
pub fn a2_lorentzian_additivity() -> CriterionResult {
    let (g1, g2) = CONVOLUTION_GAMMAS;
    let (f, g) = match (
        LorentzianParams::new(g1, 0.0),
        LorentzianParams::new(g2, 0.0),
    ) {
        (Ok(f), Ok(g)) => (f, g),
        _ => return CriterionResult::error(2, CONVOLUTION_SUP, "invalid widths"),
    };
    let grid = convolve_circular(&f, &g, 1 << 13);
    let sup = grid
        .omegas
        .iter()
        .zip(&grid.density)
        .map(|(&w, &d)| (d - periodized_lorentzian_pdf(g1 + g2, w)).abs())
        .fold(0.0, f64::max);
    CriterionResult::new(
        2,
        sup <= CONVOLUTION_SUP,
        sup,
        CONVOLUTION_SUP,
        format!("grid {} points", grid.omegas.len()),
    )
}

/// Exact 70% width of the periodized Lorentzian whose unwrapped width is `sigma`.
fn exact_periodized(sigma: f64) -> f64 {
    periodized_width_exact(sigma / lorentzian_width_factor())
}

/// Small-σ quadratic coefficient of the exact width and the periodized
/// prediction against the exact width.
pub fn a3_periodized_oracle() -> CriterionResult {
    // c(σ) = (w/σ − 1)/σ² = c0 + c1σ² + …; Richardson removes c1
    let c = |s: f64| (exact_periodized(s) / s - 1.0) / (s * s);
    let (h, h2) = (0.02, 0.04);
    let c0 = (4.0 * c(h) - c(h2)) / 3.0;
    let target = -1.0 / (PI * PI);
    let coeff_dev = rel(c0, target);
    let grid: Vec<f64> = (1..=80)
        .map(|i| PERIODIZED_SIGMA_MAX * i as f64 / 80.0)
        .collect();
    let (worst_sigma, worst) = grid
        .iter()
        .map(|&s| {
            (
                s,
                rel(
                    sigma_sc_periodized_with(s, PERIODIZATION_LINEAR),
                    exact_periodized(s),
                ),
            )
        })
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let passed = coeff_dev <= QUADRATIC_COEFF_REL && worst <= PERIODIZED_REL;
    CriterionResult::new(
        3,
        passed,
        coeff_dev,
        QUADRATIC_COEFF_REL,
        format!(
            "quadratic coefficient {c0:.5} vs {target:.5}; prediction vs exact max rel {worst:.3e} at sigma {worst_sigma:.2} (tolerance {PERIODIZED_REL})"
        ),
    )
}

/// Rows of the global cat-map sweep used by [`a4_global_agreement`].
pub fn global_agreement_rows(cache: Option<&EigenCache>) -> Result<Vec<SweepRow>, String> {
    let chis: Vec<f64> = chi_grid(GLOBAL_CHI_RANGE, GLOBAL_CHI_STEP)
        .into_iter()
        .filter(|chi| {
            PEAK_CENTERS
                .iter()
                .all(|c| (chi - c).abs() > PEAK_HALF_WIDTH)
        })
        .collect();
    catmap_sweep(&global_setup(SWEEP_N), &chis, cache).map_err(|e| e.to_string())
}

/// Median and maximum of `|σ − σ_p|/σ` over successful rows, with σ_p
/// recomputed from σ_sc at the given linear coefficient.
fn deviations(rows: &[SweepRow], linear: f64) -> Result<Vec<f64>, String> {
    rows.iter()
        .map(|r| {
            if r.status != RowStatus::Ok {
                return Err(format!("row chi={} failed", r.chi));
            }
            Ok(rel(
                sigma_sc_periodized_with(r.sigma_sc, linear),
                r.sigma_quantum,
            ))
        })
        .collect()
}

fn agreement_result(id: u8, devs: &[f64], extra: String) -> CriterionResult {
    let med = median(devs);
    let max = max_of(devs);
    let passed = !devs.is_empty() && med <= MEDIAN_REL && max <= MAX_REL;
    CriterionResult::new(
        id,
        passed,
        med,
        MEDIAN_REL,
        format!(
            "{} points; max rel {max:.3e} (tolerance {MAX_REL}){extra}",
            devs.len()
        ),
    )
}

/// Global-perturbation agreement evaluated on precomputed rows.
pub fn a4_from_rows(rows: &[SweepRow], linear: f64) -> CriterionResult {
    match deviations(rows, linear) {
        Ok(devs) => agreement_result(4, &devs, format!("; linear coefficient {linear}")),
        Err(e) => CriterionResult::error(4, MEDIAN_REL, e),
    }
}

pub fn a4_global_agreement(cache: Option<&EigenCache>) -> CriterionResult {
    match global_agreement_rows(cache) {
        Ok(rows) => a4_from_rows(&rows, PERIODIZATION_LINEAR),
        Err(e) => CriterionResult::error(4, MEDIAN_REL, e),
    }
}

/// Local-window agreement over χ below saturation. The detail also reports
/// the subset whose predicted width spans a few eigenphase spacings.
pub fn a5_local_agreement(cache: Option<&EigenCache>) -> CriterionResult {
    let chis = chi_grid(GLOBAL_CHI_RANGE, GLOBAL_CHI_STEP);
    let floor = RESOLVED_SPACINGS * 2.0 * PI / SWEEP_N as f64;
    let mut all = Vec::new();
    let mut resolved = Vec::new();
    let mut per_beta = Vec::new();
    for &beta in &LOCAL_BETAS {
        let rows = match catmap_sweep(&local_setup(SWEEP_N, beta), &chis, cache) {
            Ok(r) => r,
            Err(e) => return CriterionResult::error(5, MEDIAN_REL, e),
        };
        let devs = match deviations(&rows, PERIODIZATION_LINEAR) {
            Ok(d) => d,
            Err(e) => return CriterionResult::error(5, MEDIAN_REL, e),
        };
        let mut beta_all = Vec::new();
        for (r, d) in rows.iter().zip(devs) {
            if r.sigma_sc_periodized >= saturation_width() {
                continue;
            }
            beta_all.push(d);
            if r.sigma_sc_periodized >= floor {
                resolved.push(d);
            }
        }
        per_beta.push(format!(
            "beta {beta}: {} pts max {:.3e}",
            beta_all.len(),
            max_of(&beta_all)
        ));
        all.extend(beta_all);
    }
    agreement_result(
        5,
        &all,
        format!(
            "; {}; predicted width >= {RESOLVED_SPACINGS} spacings only: {} pts median {:.3e} max {:.3e}",
            per_beta.join(", "),
            resolved.len(),
            median(&resolved),
            max_of(&resolved)
        ),
    )
}

/// Quadratic growth of the width at weak perturbation.
pub fn a6_golden_rule(cache: Option<&EigenCache>) -> CriterionResult {
    let rows = match catmap_sweep(&global_setup(SWEEP_N), &FGR_CHIS, cache) {
        Ok(r) => r,
        Err(e) => return CriterionResult::error(6, FGR_R2, e),
    };
    let x: Vec<f64> = rows.iter().map(|r| r.chi * r.chi).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sigma_quantum).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y);
    CriterionResult::new(
        6,
        r2 >= FGR_R2 && r2.is_finite(),
        r2,
        FGR_R2,
        format!("sigma = {intercept:.3e} + {slope:.3e} chi^2"),
    )
}

/// Widths at two dimensions agree pointwise.
pub fn a7_n_collapse(cache: Option<&EigenCache>) -> CriterionResult {
    let (na, nb) = COLLAPSE_NS;
    let a = catmap_sweep(&global_setup(na), &COLLAPSE_CHIS, cache);
    let b = catmap_sweep(&global_setup(nb), &COLLAPSE_CHIS, cache);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CriterionResult::error(7, COLLAPSE_REL, e),
    };
    let devs: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| rel(x.sigma_quantum, y.sigma_quantum))
        .collect();
    let (i, worst) =
        devs.iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    CriterionResult::new(
        7,
        worst <= COLLAPSE_REL && devs.iter().all(|d| d.is_finite()),
        worst,
        COLLAPSE_REL,
        format!("worst at chi {}", COLLAPSE_CHIS[i]),
    )
}

/// Periodized-Lorentzian fit quality at strong local perturbation.
pub fn a8_lorentzian_shape(cache: Option<&EigenCache>) -> CriterionResult {
    let mut setup = local_setup(SHAPE_N, SHAPE_BETA);
    setup.fit = true;
    let report = match catmap_ldos(&setup, SHAPE_CHI, cache) {
        Ok(r) => r,
        Err(e) => return CriterionResult::error(8, SHAPE_RMS_REL, e),
    };
    let rms_rel = report.fit.rms_residual / report.histogram.peak();
    let sigma = report.row.sigma_quantum;
    let gamma_dev = match gamma_from_periodized_width(sigma) {
        Some(g) => rel(report.fit.gamma, g),
        None => f64::INFINITY,
    };
    CriterionResult::new(
        8,
        rms_rel <= SHAPE_RMS_REL && gamma_dev <= SHAPE_GAMMA_REL,
        rms_rel,
        SHAPE_RMS_REL,
        format!(
            "fit gamma {:.4}, width {sigma:.4}, gamma rel deviation {gamma_dev:.3e} (tolerance {SHAPE_GAMMA_REL})",
            report.fit.gamma
        ),
    )
}

/// Survival amplitude against `e^{−γm}` and the dephasing estimate.
pub fn a9_survival(seed: u64, cache: Option<&EigenCache>) -> CriterionResult {
    let setup = global_setup(SWEEP_N);
    let cmp = match dephasing_comparison(
        &setup,
        SURVIVAL_CHI,
        SURVIVAL_STEPS,
        SURVIVAL_SAMPLES,
        seed,
        cache,
    ) {
        Ok(c) => c,
        Err(e) => return CriterionResult::error(9, SURVIVAL_EXP_REL, e),
    };
    let rows = cmp.rows();
    let mut exp_worst = 0.0f64;
    let mut bars_ok = true;
    let mut bar_worst = 0.0f64;
    for r in rows.iter().skip(1) {
        exp_worst = exp_worst.max(rel(r.quantum_abs, r.exp_gamma_m));
        let diff = (cmp.quantum[r.m] - cmp.dephasing.mean[r.m]).norm();
        let bar = ERROR_BAR_SIGMAS * cmp.dephasing.std_error[r.m];
        bars_ok &= diff <= bar;
        bar_worst = bar_worst.max(diff / bar);
    }
    let quantum: Vec<String> = rows
        .iter()
        .skip(1)
        .map(|r| format!("{:.4}", r.quantum_abs))
        .collect();
    let expo: Vec<String> = rows
        .iter()
        .skip(1)
        .map(|r| format!("{:.4}", r.exp_gamma_m))
        .collect();
    CriterionResult::new(
        9,
        exp_worst <= SURVIVAL_EXP_REL && bars_ok,
        exp_worst,
        SURVIVAL_EXP_REL,
        format!(
            "gamma {:.4}; |A(m)| [{}] vs exp(-gamma m) [{}]; dephasing within {ERROR_BAR_SIGMAS} SE: {bars_ok} (worst {bar_worst:.2} bars)",
            cmp.gamma,
            quantum.join(", "),
            expo.join(", ")
        ),
    )
}

/// Overlap sums at random χ.
pub fn a10_bistochastic(seed: u64, cache: Option<&EigenCache>) -> CriterionResult {
    let setup = global_setup(SWEEP_N);
    let knobs = QuantizationKnobs::default();
    let e0 = match eigensystem(SWEEP_N, &setup.base, &knobs, cache) {
        Ok(e) => e,
        Err(e) => return CriterionResult::error(10, OVERLAP_SUM_ABS, e),
    };
    let chis: Vec<f64> = (0..UNITARITY_CHIS as u64)
        .map(|i| UNITARITY_CHI_MAX * (1.0 - sample_stream(seed, i).random::<f64>()))
        .collect();
    let worst: Result<Vec<f64>, String> = chis
        .par_iter()
        .map(|&chi| {
            let e1 = eigensystem(SWEEP_N, &setup.perturbed(chi), &knobs, cache)
                .map_err(|e| e.to_string())?;
            let dist = ldos(&e0, &e1).map_err(|e| e.to_string())?;
            Ok(dist
                .per_state_sums()
                .iter()
                .chain(&dist.per_perturbed_sums())
                .map(|s| (s - 1.0).abs())
                .fold(0.0, f64::max))
        })
        .collect();
    match worst {
        Ok(w) => {
            let m = max_of(&w);
            let list: Vec<String> = chis.iter().map(|c| format!("{c:.3}")).collect();
            CriterionResult::new(
                10,
                m <= OVERLAP_SUM_ABS,
                m,
                OVERLAP_SUM_ABS,
                format!("chi [{}]", list.join(", ")),
            )
        }
        Err(e) => CriterionResult::error(10, OVERLAP_SUM_ABS, e),
    }
}

/// Mean chord over independent collisions drawn from the invariant measure.
pub fn mean_free_time(cfg: &StadiumConfig, collisions: u64, seed: u64) -> Result<f64, String> {
    const CHUNK: u64 = 1 << 14;
    let shape = shape_from_x(cfg.x0).map_err(|e| e.to_string())?;
    let sums: Result<Vec<(f64, u64)>, String> = (0..collisions.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sum = 0.0;
            let mut count = 0;
            for i in c * CHUNK..((c + 1) * CHUNK).min(collisions) {
                let mut rng = sample_stream(seed, i);
                let q = shape.perimeter * rng.random::<f64>();
                let p_t = 2.0 * rng.random::<f64>() - 1.0;
                let Ok(state) = CollisionState::new(q, p_t, &shape) else {
                    continue;
                };
                let (_, chord) = collision_map(&state, &shape).map_err(|e| e.to_string())?;
                sum += chord;
                count += 1;
            }
            Ok((sum, count))
        })
        .collect();
    let (sum, count) = sums?
        .iter()
        .fold((0.0, 0u64), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(cfg.mass * sum / (count as f64 * cfg.p_mag))
}

/// Stadium: mean free time, small-deformation slope, and the `γ ≤ 2η` bound.
pub fn a11_stadium(seed: u64) -> CriterionResult {
    let cfg = StadiumConfig::default();
    let shape = match shape_from_x(cfg.x0) {
        Ok(s) => s,
        Err(e) => return CriterionResult::error(11, MEAN_FREE_TIME_REL, e),
    };
    let expected = mean_bounce_time(&shape, cfg.p_mag, cfg.mass);
    let measured = match mean_free_time(&cfg, MEAN_FREE_TIME_COLLISIONS, seed) {
        Ok(t) => t,
        Err(e) => return CriterionResult::error(11, MEAN_FREE_TIME_REL, e),
    };
    let tau_dev = rel(measured, expected);

    let (lo, hi) = STADIUM_SLOPE_RANGE;
    let dxs: Vec<f64> = (0..STADIUM_SLOPE_POINTS)
        .map(|i| lo * (hi / lo).powf(i as f64 / (STADIUM_SLOPE_POINTS - 1) as f64))
        .collect();
    let gammas: Result<Vec<f64>, String> = dxs
        .par_iter()
        .map(|&dx| {
            gamma_stadium(cfg.x0, dx, cfg.p_mag, cfg.mass)
                .map(|p| p.gamma)
                .map_err(|e| e.to_string())
        })
        .collect();
    let slope = match gammas {
        Ok(g) => {
            let lx: Vec<f64> = dxs.iter().map(|d| d.ln()).collect();
            let ly: Vec<f64> = g.iter().map(|v| v.ln()).collect();
            linear_fit(&lx, &ly).0
        }
        Err(e) => return CriterionResult::error(11, MEAN_FREE_TIME_REL, e),
    };

    let bound: Result<Vec<f64>, String> = default_delta_x_grid()
        .par_iter()
        .map(|&dx| {
            gamma_stadium(cfg.x0, dx, cfg.p_mag, cfg.mass)
                .map(|p| p.gamma / p.eta)
                .map_err(|e| e.to_string())
        })
        .collect();
    let ratio = match bound {
        Ok(r) => max_of(&r),
        Err(e) => return CriterionResult::error(11, MEAN_FREE_TIME_REL, e),
    };
    let slope_ok = (slope - STADIUM_SLOPE).abs() <= STADIUM_SLOPE_ABS;
    let passed = tau_dev <= MEAN_FREE_TIME_REL && slope_ok && ratio <= 2.0;
    CriterionResult::new(
        11,
        passed,
        tau_dev,
        MEAN_FREE_TIME_REL,
        format!(
            "mean free time {measured:.6e} vs {expected:.6e}; slope {slope:.4} (2 +- {STADIUM_SLOPE_ABS}); max gamma/eta {ratio:.4} (<= 2)"
        ),
    )
}

/// Periodic-point counts and the orbit-action KS diagnostic.
pub fn a12_periodic_orbits() -> CriterionResult {
    let det2 = match cat_matrix_power(2) {
        Ok(m) => ((m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0]).unsigned_abs() as u64,
        Err(e) => return CriterionResult::error(12, 0.0, e),
    };
    let p1 = fixed_point_count(1);
    let p2 = periodic_points(2, PO_CAP);
    let (p1, p2) = match (p1, p2) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CriterionResult::error(12, 0.0, e),
    };
    let counts_ok = p1 == 2 && p2.total == det2 && p2.points.len() as u64 == det2 && !p2.truncated;
    let ks = match po_uniformity(&global_setup(SWEEP_N), &PO_CHIS, PO_N_MAX, PO_CAP) {
        Ok(v) => v,
        Err(e) => return CriterionResult::error(12, 0.0, e),
    };
    let ks_text: Vec<String> = ks
        .iter()
        .map(|(chi, u)| {
            format!(
                "chi {chi}: KS {:.4} over {} orbits",
                u.ks_distance,
                u.orbits.len()
            )
        })
        .collect();
    let ks_ok = ks
        .iter()
        .all(|(_, u)| u.ks_distance.is_finite() && !u.orbits.is_empty());
    let mismatch = (p1 as f64 - 2.0).abs() + (p2.points.len() as f64 - det2 as f64).abs();
    CriterionResult::new(
        12,
        counts_ok && ks_ok,
        mismatch,
        0.0,
        format!(
            "period-1 {p1}, period-2 {} of |det(M^2-I)| = {det2}; {}",
            p2.points.len(),
            ks_text.join("; ")
        ),
    )
}

/// Every criterion in order.
pub fn run_all(seed: u64, cache: Option<&EigenCache>) -> Vec<CriterionResult> {
    vec![
        a1_width_calibration(seed),
        a2_lorentzian_additivity(),
        a3_periodized_oracle(),
        a4_global_agreement(cache),
        a5_local_agreement(cache),
        a6_golden_rule(cache),
        a7_n_collapse(cache),
        a8_lorentzian_shape(cache),
        a9_survival(seed, cache),
        a10_bistochastic(seed, cache),
        a11_stadium(seed),
        a12_periodic_orbits(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let r = CriterionResult::new(3, true, 0.5, 1.0, "x".into());
        assert_eq!(r.to_string(), "A3\tPASS\t5.000000e-1\t1.000000e0\tx");
    }

    #[test]
    fn fit_and_median() {
        let (b, a, r2) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((b - 2.0).abs() < 1e-12 && (a - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn chi_grid_excludes_peaks() {
        let g = chi_grid(GLOBAL_CHI_RANGE, GLOBAL_CHI_STEP);
        assert_eq!(g.len(), 29);
        assert_eq!(*g.last().unwrap(), 60.0);
    }
}
