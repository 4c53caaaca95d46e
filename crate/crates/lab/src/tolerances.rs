//! Acceptance thresholds and the desk-scale parameters they apply to.
//!
//! Every number the acceptance suite compares against lives here.

// width estimator

/// Relative error of `width_70` on the uniform circular distribution.
pub const UNIFORM_WIDTH_REL: f64 = 0.005;

/// Relative error of `width_70` against `1.9626γ` on wrapped Lorentzian samples.
pub const LORENTZ_WIDTH_REL: f64 = 0.01;

/// `2 tan(0.35π)` rounded as quoted: the 70% width of a Lorentzian over `γ`.
pub const LORENTZ_WIDTH_RATIO: f64 = 1.9626;

pub const WIDTH_SAMPLES: usize = 1_000_000;
pub const WIDTH_GAMMAS: [f64; 3] = [0.05, 0.1, 0.3];

// Lorentzian additivity

pub const CONVOLUTION_SUP: f64 = 1e-3;
pub const CONVOLUTION_GAMMAS: (f64, f64) = (0.1, 0.2);

// periodized width

/// Relative error of the small-`σ` quadratic coefficient against `−1/π²`.
pub const QUADRATIC_COEFF_REL: f64 = 0.02;
/// Relative error between the periodized prediction and the exact width.
pub const PERIODIZED_REL: f64 = 0.03;
pub const PERIODIZED_SIGMA_MAX: f64 = 0.8;

// quantum vs semiclassical widths

pub const SWEEP_N: usize = 300;
pub const MEDIAN_REL: f64 = 0.10;
pub const MAX_REL: f64 = 0.20;
pub const GLOBAL_CHI_RANGE: (f64, f64) = (4.0, 60.0);
pub const GLOBAL_CHI_STEP: f64 = 2.0;
/// Centers of the χ windows left out near the peaks of the semiclassical curve.
pub const PEAK_CENTERS: [f64; 2] = [20.0, 50.0];
pub const PEAK_HALF_WIDTH: f64 = 5.0;

pub const LOCAL_Q0: f64 = 0.01;
pub const LOCAL_BETAS: [f64; 3] = [0.2, 0.4, 0.7];
/// Predicted width, in eigenphase spacings `2π/N`, above which a local
/// comparison point is reported as resolved (diagnostic only).
pub const RESOLVED_SPACINGS: f64 = 4.0;

// Fermi golden rule

pub const FGR_R2: f64 = 0.99;
pub const FGR_CHIS: [f64; 10] = [0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0];

// N-collapse

pub const COLLAPSE_NS: (usize, usize) = (200, 400);
pub const COLLAPSE_REL: f64 = 0.05;
pub const COLLAPSE_CHIS: [f64; 10] = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0];

// strong perturbation line shape

pub const SHAPE_N: usize = 400;
pub const SHAPE_BETA: f64 = 0.7;
pub const SHAPE_CHI: f64 = 80.0;
/// Fit RMS residual as a fraction of the peak density.
pub const SHAPE_RMS_REL: f64 = 0.10;
pub const SHAPE_GAMMA_REL: f64 = 0.10;

// survival amplitude

pub const SURVIVAL_CHI: f64 = 10.0;
pub const SURVIVAL_STEPS: usize = 5;
pub const SURVIVAL_EXP_REL: f64 = 0.15;
pub const SURVIVAL_SAMPLES: u64 = 200_000;
/// Error bars are this many standard errors wide.
pub const ERROR_BAR_SIGMAS: f64 = 3.0;

// unitarity

pub const OVERLAP_SUM_ABS: f64 = 1e-10;
pub const UNITARITY_CHIS: usize = 5;
pub const UNITARITY_CHI_MAX: f64 = 60.0;

// stadium

pub const MEAN_FREE_TIME_REL: f64 = 0.01;
pub const MEAN_FREE_TIME_COLLISIONS: u64 = 1_000_000;
pub const STADIUM_SLOPE: f64 = 2.0;
pub const STADIUM_SLOPE_ABS: f64 = 0.1;
pub const STADIUM_SLOPE_RANGE: (f64, f64) = (1e-4, 1e-3);
pub const STADIUM_SLOPE_POINTS: usize = 7;

// periodic orbits

pub const PO_N_MAX: u32 = 6;
pub const PO_CHIS: [f64; 3] = [1.0, 10.0, 30.0];
pub const PO_CAP: usize = 1_000_000;

pub const DEFAULT_SEED: u64 = 20_240_601;
