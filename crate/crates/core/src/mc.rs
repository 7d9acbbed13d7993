//! Monte Carlo photon-counting experiments.
//!
//! Every shot draws from its own ChaCha8 stream keyed by `(seed, shot)`, so
//! results are bit-identical regardless of how rayon schedules the shots.
//!
//! Counts are sampled exactly. A sum of `n` independent thermal modes with
//! mean `mu` each is negative binomial and is drawn as `Poisson(Gamma(n, mu))`;
//! sums of Poisson counts are drawn as a single Poisson variate.
//!
//! SNRs reported here are amplitude SNRs (mean separation over standard
//! deviation). The argument of [`error_probability`] is their square.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::background::{RadiationBackground, VarianceModel};
use crate::detection::{error_probability, snr_sp, snr_target, SignalModel, SnrForm};
use crate::error::{require_unit_interval, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// Halfway between the two hypotheses' expected statistics.
    #[default]
    Midpoint,
    /// Likelihood-ratio threshold for Gaussian approximations of both hypotheses.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    DirectDetection,
    SpCovariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub shots: u64,
    /// `K`: trials (direct detection) or frames (covariance) per shot.
    pub trials_per_shot: u64,
    pub signal: SignalModel,
    /// Background per trial or frame.
    pub background: RadiationBackground,
    /// Signal-arm efficiency: `eta_T` for direct detection, `eta_R` for covariance.
    pub eta_signal: f64,
    /// Ancilla-arm efficiency (covariance only).
    pub eta_ancilla: f64,
    pub threshold_rule: ThresholdRule,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("mc: shots must be >= 1".into()));
        }
        if self.trials_per_shot == 0 {
            return Err(Error::Config("mc: trials_per_shot must be >= 1".into()));
        }
        require_unit_interval("eta_signal", self.eta_signal)?;
        require_unit_interval("eta_ancilla", self.eta_ancilla)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub experiment: Experiment,
    pub seed: u64,
    pub shots: u64,
    pub trials_per_shot: u64,
    pub threshold_rule: ThresholdRule,
    pub empirical_p_err: f64,
    pub p_err_std_error: f64,
    pub empirical_snr: f64,
    pub snr_std_error: f64,
    /// Amplitude SNR predicted by the sampling model.
    pub analytic_snr: f64,
    /// `error_probability(analytic_snr^2)`.
    pub analytic_p_err: f64,
    /// `(empirical_p_err - analytic_p_err) / p_err_std_error`.
    pub z_score: f64,
    /// The closed-form SNR for the same configuration (direct or single-photon formula).
    pub formula_snr: f64,
}

/// The per-shot random stream.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng)
}

/// Total count of `modes` independent thermal modes with mean `mu` each.
fn thermal_sum<R: Rng + ?Sized>(modes: f64, mu: f64, rng: &mut R) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let intensity = Gamma::new(modes, mu)
        .expect("positive shape and scale")
        .sample(rng);
    poisson(intensity, rng)
}

fn thin<R: Rng + ?Sized>(count: f64, eta: f64, rng: &mut R) -> f64 {
    if count <= 0.0 || eta <= 0.0 {
        return 0.0;
    }
    Binomial::new(count as u64, eta)
        .expect("eta in [0, 1]")
        .sample(rng) as f64
}

/// Background counts accumulated over `trials` independent trials.
pub fn sample_background_counts<R: Rng + ?Sized>(
    bg: &RadiationBackground,
    trials: u64,
    rng: &mut R,
) -> f64 {
    let n = trials as f64 * bg.mode_count() as f64;
    match bg.variance_model() {
        VarianceModel::Poisson => poisson(n * bg.occupancy(), rng),
        VarianceModel::ThermalMultimode => thermal_sum(n, bg.occupancy(), rng),
    }
}

/// Threshold where two Gaussian densities cross, taken between the means.
pub fn lr_threshold(m0: f64, v0: f64, m1: f64, v1: f64) -> f64 {
    let mid = 0.5 * (m0 + m1);
    if v0 <= 0.0 || v1 <= 0.0 || ((v1 - v0) / v0).abs() < 1e-12 {
        return mid;
    }
    // (t - m0)^2 / v0 - (t - m1)^2 / v1 = ln(v1 / v0)
    let a = 1.0 / v0 - 1.0 / v1;
    let b = -2.0 * (m0 / v0 - m1 / v1);
    let c = m0 * m0 / v0 - m1 * m1 / v1 - (v1 / v0).ln();
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return mid;
    }
    let sq = disc.sqrt();
    let (lo, hi) = (m0.min(m1), m0.max(m1));
    [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)]
        .into_iter()
        .find(|t| *t >= lo && *t <= hi)
        .unwrap_or(mid)
}

struct ShotOutcome {
    h0: f64,
    h1: f64,
    errors: u32,
}

fn mean_and_variance(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

fn p_err_summary(outcomes: &[ShotOutcome], analytic_p: f64) -> (f64, f64, f64) {
    let n = outcomes.len() as f64;
    let errors: u64 = outcomes.iter().map(|o| o.errors as u64).sum();
    let empirical = errors as f64 / (2.0 * n);
    // Null-hypothesis binomial standard error, floored at one error in 2n decisions.
    let q = analytic_p.max(1.0 / (2.0 * n));
    let se = (q * (1.0 - q) / (2.0 * n)).sqrt();
    (empirical, se, (empirical - analytic_p) / se)
}

/// Background-only vs. background-plus-signal photon counting at the target.
pub fn simulate_direct_detection(cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    let k = cfg.trials_per_shot as f64;
    let s = cfg.eta_signal * cfg.signal.total();
    let var_bg = cfg.background.variance();

    let m0 = k * cfg.background.counts();
    let v0 = k * var_bg;
    let m1 = m0 + k * s;
    let v1 = v0 + k * s;
    let threshold = match cfg.threshold_rule {
        ThresholdRule::Midpoint => 0.5 * (m0 + m1),
        ThresholdRule::Optimal => lr_threshold(m0, v0, m1, v1),
    };

    let outcomes: Vec<ShotOutcome> = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(cfg.seed, shot);
            let h0 = sample_background_counts(&cfg.background, cfg.trials_per_shot, &mut rng);
            let h1 = sample_background_counts(&cfg.background, cfg.trials_per_shot, &mut rng)
                + poisson(k * s, &mut rng);
            let errors = (h0 > threshold) as u32 + (h1 <= threshold) as u32;
            ShotOutcome { h0, h1, errors }
        })
        .collect();

    let n = outcomes.len() as f64;
    let (mean0, var0) = mean_and_variance(outcomes.iter().map(|o| o.h0));
    let (mean1, var1) = mean_and_variance(outcomes.iter().map(|o| o.h1));
    let pooled = 0.5 * (var0 + var1);
    let delta = mean1 - mean0;
    let empirical_snr = if pooled > 0.0 {
        delta / pooled.sqrt()
    } else {
        0.0
    };
    let snr_std_error = ((2.0 + 0.5 * empirical_snr * empirical_snr) / n).sqrt();

    let analytic_snr = if var_bg > 0.0 {
        k.sqrt() * s / var_bg.sqrt()
    } else if s > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let analytic_p_err = error_probability(analytic_snr * analytic_snr)?;
    let (empirical_p_err, p_err_std_error, z_score) = p_err_summary(&outcomes, analytic_p_err);
    let formula_snr = snr_target(
        k,
        cfg.eta_signal,
        &cfg.signal,
        0.0,
        var_bg,
        SnrForm::Approximate,
    )
    .unwrap_or(f64::NAN);

    Ok(McReport {
        experiment: Experiment::DirectDetection,
        seed: cfg.seed,
        shots: cfg.shots,
        trials_per_shot: cfg.trials_per_shot,
        threshold_rule: cfg.threshold_rule,
        empirical_p_err,
        p_err_std_error,
        empirical_snr,
        snr_std_error,
        analytic_snr,
        analytic_p_err,
        z_score,
        formula_snr,
    })
}

/// Second-order moments of the pair-counting model, per frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    /// `Cov(N1, N2)` with the target present.
    pub covariance: f64,
    /// `Var(N1)` with and without the target.
    pub var_signal_arm: f64,
    pub var_signal_arm_absent: f64,
    pub var_ancilla_arm: f64,
}

impl CovarianceModel {
    pub fn new(cfg: &McConfig) -> Self {
        let m = cfg.signal.modes() as f64;
        let mu = cfg.signal.mu();
        let thinned_var = |eta: f64| m * eta * mu * (1.0 + eta * mu);
        let bg = cfg.background.variance();
        Self {
            covariance: cfg.eta_signal * cfg.eta_ancilla * m * mu * (1.0 + mu),
            var_signal_arm: bg + thinned_var(cfg.eta_signal),
            var_signal_arm_absent: bg,
            var_ancilla_arm: thinned_var(cfg.eta_ancilla),
        }
    }

    /// Large-`K` variance of the sample covariance over `frames` frames.
    fn estimator_variance(&self, frames: f64, present: bool) -> f64 {
        let (v1, c) = if present {
            (self.var_signal_arm, self.covariance)
        } else {
            (self.var_signal_arm_absent, 0.0)
        };
        (v1 * self.var_ancilla_arm + c * c) / (frames - 1.0)
    }

    /// Mean over standard deviation of the sample covariance with the target present.
    pub fn snr(&self, frames: f64) -> f64 {
        let v = self.estimator_variance(frames, true);
        if v > 0.0 {
            self.covariance / v.sqrt()
        } else {
            0.0
        }
    }
}

/// Sample covariance of `frames` (signal-arm, ancilla-arm) count pairs.
fn covariance_statistic(cfg: &McConfig, target_present: bool, rng: &mut ChaCha8Rng) -> f64 {
    let eta_r = if target_present { cfg.eta_signal } else { 0.0 };
    let modes = cfg.signal.modes() as f64;
    let (mut mean1, mut mean2, mut comoment) = (0.0, 0.0, 0.0);
    for i in 0..cfg.trials_per_shot {
        let pairs = thermal_sum(modes, cfg.signal.mu(), rng);
        let n1 = thin(pairs, eta_r, rng) + sample_background_counts(&cfg.background, 1, rng);
        let n2 = thin(pairs, cfg.eta_ancilla, rng);
        let count = (i + 1) as f64;
        let d1 = n1 - mean1;
        mean1 += d1 / count;
        mean2 += (n2 - mean2) / count;
        comoment += d1 * (n2 - mean2);
    }
    comoment / (cfg.trials_per_shot as f64 - 1.0)
}

/// Covariance-based single-photon QI: correlated pair counts, independently
/// thinned on the signal and ancilla arms, with background on the signal arm.
pub fn simulate_sp_covariance(cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    if cfg.trials_per_shot < 2 {
        return Err(Error::Config(
            "mc: covariance needs trials_per_shot >= 2".into(),
        ));
    }
    let k = cfg.trials_per_shot as f64;
    let model = CovarianceModel::new(cfg);
    let threshold = match cfg.threshold_rule {
        ThresholdRule::Midpoint => 0.5 * model.covariance,
        ThresholdRule::Optimal => lr_threshold(
            0.0,
            model.estimator_variance(k, false),
            model.covariance,
            model.estimator_variance(k, true),
        ),
    };

    let outcomes: Vec<ShotOutcome> = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(cfg.seed, shot);
            let h0 = covariance_statistic(cfg, false, &mut rng);
            let h1 = covariance_statistic(cfg, true, &mut rng);
            let errors = (h0 > threshold) as u32 + (h1 <= threshold) as u32;
            ShotOutcome { h0, h1, errors }
        })
        .collect();

    let n = outcomes.len() as f64;
    let (mean1, var1) = mean_and_variance(outcomes.iter().map(|o| o.h1));
    let empirical_snr = if var1 > 0.0 { mean1 / var1.sqrt() } else { 0.0 };
    let snr_std_error = ((1.0 + 0.5 * empirical_snr * empirical_snr) / n).sqrt();

    let analytic_snr = model.snr(k);
    let analytic_p_err = error_probability(analytic_snr * analytic_snr)?;
    let (empirical_p_err, p_err_std_error, z_score) = p_err_summary(&outcomes, analytic_p_err);
    let formula_snr = snr_sp(
        k,
        cfg.eta_signal,
        cfg.eta_ancilla,
        &cfg.signal,
        cfg.background.variance(),
    )
    .unwrap_or(f64::NAN);

    Ok(McReport {
        experiment: Experiment::SpCovariance,
        seed: cfg.seed,
        shots: cfg.shots,
        trials_per_shot: cfg.trials_per_shot,
        threshold_rule: cfg.threshold_rule,
        empirical_p_err,
        p_err_std_error,
        empirical_snr,
        snr_std_error,
        analytic_snr,
        analytic_p_err,
        z_score,
        formula_snr,
    })
}

/// Minimum expected background count per shot for the Gaussian-count regime.
pub const GAUSSIAN_REGIME_MIN_COUNTS: f64 = 100.0;

/// Runs direct detection at each SNR in `snr_grid`, interpreted as the
/// argument of [`error_probability`]. The per-trial signal is chosen so the
/// squared amplitude SNR `K s^2 / delta^2 N_B` hits the requested value;
/// `cfg.signal` and `cfg.eta_signal` are overridden.
pub fn validate_erfc(snr_grid: &[f64], cfg: &McConfig) -> Result<Vec<McReport>> {
    cfg.validate()?;
    let k = cfg.trials_per_shot as f64;
    let bg_counts = k * cfg.background.counts();
    if bg_counts < GAUSSIAN_REGIME_MIN_COUNTS {
        return Err(Error::Config(format!(
            "mc: K * N_B = {bg_counts} is below {GAUSSIAN_REGIME_MIN_COUNTS}; counts are not in the Gaussian regime"
        )));
    }
    if let Some(&bad) = snr_grid.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::domain("snr", bad, "erfc validation needs SNR > 0"));
    }
    let var_bg = cfg.background.variance();
    snr_grid
        .iter()
        .enumerate()
        .map(|(i, &snr)| {
            let per_trial = (snr * var_bg / k).sqrt();
            let run = McConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                signal: SignalModel::new(per_trial, 1)?,
                eta_signal: 1.0,
                ..*cfg
            };
            simulate_direct_detection(&run)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_background(mu: f64) -> RadiationBackground {
        RadiationBackground::solar_microwave()
            .with_occupancy(mu)
            .unwrap()
            .with_variance_model(VarianceModel::Poisson)
    }

    fn direct_cfg(signal: f64) -> McConfig {
        McConfig {
            seed: 7,
            shots: 20_000,
            trials_per_shot: 100,
            signal: SignalModel::new(signal, 1).unwrap(),
            background: poisson_background(1e4),
            eta_signal: 1.0,
            eta_ancilla: 1.0,
            threshold_rule: ThresholdRule::Midpoint,
        }
    }

    #[test]
    fn no_signal_gives_coin_flip() {
        let r = simulate_direct_detection(&direct_cfg(0.0)).unwrap();
        assert_eq!(r.analytic_p_err, 0.5);
        assert!(r.z_score.abs() < 4.0, "{r:?}");
    }

    #[test]
    fn well_separated_hypotheses() {
        // amplitude SNR = sqrt(100) * 100 / 100 = 10
        let r = simulate_direct_detection(&direct_cfg(100.0)).unwrap();
        assert!((r.analytic_snr - 10.0).abs() < 1e-12);
        assert!(r.empirical_p_err < 1e-3, "{r:?}");
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let cfg = direct_cfg(20.0);
        let a = simulate_direct_detection(&cfg).unwrap();
        let b = simulate_direct_detection(&cfg).unwrap();
        assert_eq!(a, b);
        let other = simulate_direct_detection(&McConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.empirical_snr, other.empirical_snr);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = McConfig {
            shots: 2000,
            ..direct_cfg(20.0)
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate_direct_detection(&cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| simulate_direct_detection(&cfg).unwrap());
        assert_eq!(single, many);
    }

    #[test]
    fn lr_threshold_cases() {
        assert_eq!(lr_threshold(0.0, 1.0, 2.0, 1.0), 1.0);
        let t = lr_threshold(0.0, 1.0, 2.0, 1.5);
        assert!(t > 0.0 && t < 2.0);
        let pdf = |x: f64, m: f64, v: f64| (-(x - m).powi(2) / (2.0 * v)).exp() / v.sqrt();
        assert!((pdf(t, 0.0, 1.0) - pdf(t, 2.0, 1.5)).abs() < 1e-12);
    }

    #[test]
    fn optimal_rule_no_worse_than_midpoint() {
        let mid = simulate_direct_detection(&direct_cfg(20.0)).unwrap();
        let opt = simulate_direct_detection(&McConfig {
            threshold_rule: ThresholdRule::Optimal,
            ..direct_cfg(20.0)
        })
        .unwrap();
        assert!(opt.empirical_p_err <= mid.empirical_p_err + 4.0 * mid.p_err_std_error);
    }

    #[test]
    fn config_validation() {
        assert!(simulate_direct_detection(&McConfig {
            shots: 0,
            ..direct_cfg(1.0)
        })
        .is_err());
        assert!(simulate_direct_detection(&McConfig {
            trials_per_shot: 0,
            ..direct_cfg(1.0)
        })
        .is_err());
        assert!(simulate_direct_detection(&McConfig {
            eta_signal: 1.5,
            ..direct_cfg(1.0)
        })
        .is_err());
        assert!(simulate_sp_covariance(&McConfig {
            trials_per_shot: 1,
            ..direct_cfg(1.0)
        })
        .is_err());
    }

    #[test]
    fn erfc_validation_preconditions() {
        let cfg = direct_cfg(0.0);
        assert!(matches!(
            validate_erfc(&[0.0], &cfg),
            Err(Error::Domain { .. })
        ));
        assert!(validate_erfc(&[-1.0], &cfg).is_err());
        let thin = McConfig {
            background: poisson_background(0.5),
            ..cfg
        };
        assert!(matches!(
            validate_erfc(&[1.0], &thin),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn standard_errors_positive() {
        let r = simulate_direct_detection(&McConfig {
            shots: 2,
            ..direct_cfg(5.0)
        })
        .unwrap();
        assert!(r.p_err_std_error > 0.0 && r.snr_std_error > 0.0);
    }
}
