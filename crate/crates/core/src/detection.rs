//! SNR models, the SNR <-> error-probability map, trial-count inversion and
//! the measurement ratio `R_M = K_T / K_R`.
//!
//! Trial counts are real-valued throughout; a physical experiment needs
//! `ceil(K)` measurements.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Error probability at the 2-sigma (95.45 %) detection level.
pub const TWO_SIGMA_P_ERR: f64 = 0.0455;
/// Default `R_M` above which the radar is considered practically undetectable.
pub const DEFAULT_UNDETECTABLE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Direct photon counting at the target (warning receiver).
    #[serde(alias = "target")]
    TargetDirect,
    /// Single-photon QI with post-measurement covariance of counts.
    #[serde(alias = "sp")]
    QiSinglePhoton,
    /// Gaussian-state QI with phase-conjugate (homodyne-type) receiver.
    #[serde(alias = "gs")]
    QiGaussian,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::TargetDirect => "target",
            Protocol::QiSinglePhoton => "sp",
            Protocol::QiGaussian => "gs",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "target" | "target_direct" => Ok(Protocol::TargetDirect),
            "sp" | "qi_single_photon" => Ok(Protocol::QiSinglePhoton),
            "gs" | "qi_gaussian" => Ok(Protocol::QiGaussian),
            other => Err(Error::Config(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Signal beam: `mu` photons in each of `modes` modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    mu: f64,
    modes: u64,
}

impl SignalModel {
    pub fn new(mu: f64, modes: u64) -> Result<Self> {
        require_non_negative("mu", mu)?;
        if modes == 0 {
            return Err(Error::domain("modes", 0.0, "must be >= 1"));
        }
        Ok(Self { mu, modes })
    }

    /// A signal with total photon number `n_s` spread over `modes` modes.
    pub fn from_total(n_s: f64, modes: u64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::domain("modes", 0.0, "must be >= 1"));
        }
        Self::new(n_s / modes as f64, modes)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn modes(&self) -> u64 {
        self.modes
    }

    /// `<N_S> = M mu`.
    pub fn total(&self) -> f64 {
        self.modes as f64 * self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrForm {
    /// Drops the signal variance from the target-side denominator.
    #[default]
    Approximate,
    /// Keeps `delta^2 N_S + 2 delta^2 N_B` in the denominator.
    Exact,
}

/// Target-side direct-detection SNR,
/// `sqrt(K) eta_T N_S / sqrt(delta^2 N_S + 2 delta^2 N_B)`.
///
/// With [`SnrForm::Approximate`] the `delta^2 N_S` term is dropped and
/// `var_signal` is ignored.
pub fn snr_target(
    trials: f64,
    eta_t: f64,
    signal: &SignalModel,
    var_signal: f64,
    var_bg: f64,
    form: SnrForm,
) -> Result<f64> {
    require_non_negative("trials", trials)?;
    require_non_negative("eta_t", eta_t)?;
    require_non_negative("var_bg", var_bg)?;
    let denominator = match form {
        SnrForm::Approximate => 2.0 * var_bg,
        SnrForm::Exact => 2.0 * var_bg + require_non_negative("var_signal", var_signal)?,
    };
    ratio_or_singular(trials.sqrt() * eta_t * signal.total(), denominator.sqrt())
}

/// Single-photon QI covariance SNR, `sqrt(K) sqrt(eta_R eta_anc N_S) / sqrt(2 delta^2 N_B)`.
pub fn snr_sp(
    trials: f64,
    eta_r: f64,
    eta_anc: f64,
    signal: &SignalModel,
    var_bg: f64,
) -> Result<f64> {
    require_non_negative("trials", trials)?;
    require_non_negative("eta_r", eta_r)?;
    require_non_negative("eta_anc", eta_anc)?;
    require_non_negative("var_bg", var_bg)?;
    let numerator = trials.sqrt() * (eta_r * eta_anc * signal.total()).sqrt();
    ratio_or_singular(numerator, (2.0 * var_bg).sqrt())
}

/// Gaussian-state QI SNR, `K eta_R eta_anc N_S / (2 sqrt(delta^2 N_B))`.
pub fn snr_gs(
    trials: f64,
    eta_r: f64,
    eta_anc: f64,
    signal: &SignalModel,
    var_bg: f64,
) -> Result<f64> {
    require_non_negative("trials", trials)?;
    require_non_negative("eta_r", eta_r)?;
    require_non_negative("eta_anc", eta_anc)?;
    require_non_negative("var_bg", var_bg)?;
    let numerator = trials * eta_r * eta_anc * signal.total();
    ratio_or_singular(numerator, 2.0 * var_bg.sqrt())
}

fn ratio_or_singular(numerator: f64, denominator: f64) -> Result<f64> {
    if numerator == 0.0 {
        Ok(0.0)
    } else if denominator == 0.0 {
        Err(Error::Singular("zero noise variance with non-zero signal"))
    } else {
        Ok(numerator / denominator)
    }
}

/// Equal-prior discrimination error, `erfc(sqrt(snr / 8)) / 2`.
pub fn error_probability(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::domain("snr", snr, "must be >= 0"));
    }
    Ok(0.5 * libm::erfc((snr / 8.0).sqrt()))
}

/// SNR at which [`error_probability`] equals `p_err`, i.e.
/// `8 (erfc^-1(2 p_err))^2`.
pub fn required_snr(p_err: f64) -> Result<f64> {
    if !(p_err > 0.0 && p_err < 0.5) {
        return Err(Error::domain("p_err", p_err, "must lie in (0, 0.5)"));
    }
    let x = inverse_erfc_of_twice(p_err)?;
    Ok(8.0 * x * x)
}

/// Solves `erfc(x) = 2 p` for `x >= 0` by safeguarded Newton iteration.
fn inverse_erfc_of_twice(p: f64) -> Result<f64> {
    if p >= 0.25 {
        // erf(x) = 1 - 2p is computed exactly here and avoids cancellation near x = 0.
        let target = 1.0 - 2.0 * p;
        return Ok(newton_bracketed(0.0, 1.0, |x| {
            let f = libm::erf(x) - target;
            let df = std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp();
            (f, df)
        }));
    }
    let log_target = (2.0 * p).ln();
    let mut hi = 1.0;
    while libm::erfc(hi) >= 2.0 * p {
        hi *= 2.0;
        if hi > 64.0 {
            return Err(Error::domain(
                "p_err",
                p,
                "below the representable erfc range",
            ));
        }
    }
    // ln erfc is concave and smooth, so Newton converges from either side.
    Ok(newton_bracketed(0.0, hi, |x| {
        let erfc = libm::erfc(x);
        let f = erfc.ln() - log_target;
        let df = -std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp() / erfc;
        (f, df)
    }))
}

/// Root of a decreasing-or-increasing `f` on `[lo, hi]` with a sign change.
/// Falls back to bisection whenever a Newton step leaves the bracket.
fn newton_bracketed(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> (f64, f64)) -> f64 {
    let (f_lo, _) = f(lo);
    let increasing = f_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs() || hi - lo <= 1e-15 * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Everything one detector's SNR formula needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionInputs {
    pub eta_t: f64,
    pub eta_r: f64,
    pub eta_anc: f64,
    pub signal: SignalModel,
    /// Signal-count variance for the exact target form; Poisson (`eta_T N_S`) when absent.
    pub var_signal: Option<f64>,
    /// Background count variance `delta^2 N_B` at this detector.
    pub var_bg: f64,
    pub form: SnrForm,
}

impl DetectionInputs {
    pub fn new(eta_t: f64, eta_r: f64, eta_anc: f64, signal: SignalModel, var_bg: f64) -> Self {
        Self {
            eta_t,
            eta_r,
            eta_anc,
            signal,
            var_signal: None,
            var_bg,
            form: SnrForm::default(),
        }
    }

    pub fn with_form(mut self, form: SnrForm) -> Self {
        self.form = form;
        self
    }

    pub fn signal_variance(&self) -> f64 {
        self.var_signal.unwrap_or(self.eta_t * self.signal.total())
    }

    pub fn snr(&self, protocol: Protocol, trials: f64) -> Result<f64> {
        match protocol {
            Protocol::TargetDirect => snr_target(
                trials,
                self.eta_t,
                &self.signal,
                self.signal_variance(),
                self.var_bg,
                self.form,
            ),
            Protocol::QiSinglePhoton => {
                snr_sp(trials, self.eta_r, self.eta_anc, &self.signal, self.var_bg)
            }
            Protocol::QiGaussian => {
                snr_gs(trials, self.eta_r, self.eta_anc, &self.signal, self.var_bg)
            }
        }
    }

    pub fn evaluate(&self, protocol: Protocol, trials: f64) -> Result<DetectionResult> {
        let snr = self.snr(protocol, trials)?;
        Ok(DetectionResult {
            protocol,
            snr,
            p_err: error_probability(snr)?,
            trials,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub protocol: Protocol,
    pub snr: f64,
    pub p_err: f64,
    pub trials: f64,
}

/// Real-valued number of measurements `K` at which `protocol` reaches `p_err`.
///
/// Direct and single-photon SNRs grow as `sqrt(K)`, so `K = (SNR_req / SNR(1))^2`;
/// the Gaussian-state SNR is linear in `K`, so `K = SNR_req / SNR(1)`.
pub fn required_trials(protocol: Protocol, p_err: f64, inputs: &DetectionInputs) -> Result<f64> {
    let target = required_snr(p_err)?;
    let per_trial = inputs.snr(protocol, 1.0)?;
    if per_trial == 0.0 {
        return Err(Error::Infeasible(format!(
            "{protocol}: zero signal or efficiency, no finite trial count reaches p_err = {p_err}"
        )));
    }
    let k = match protocol {
        Protocol::TargetDirect | Protocol::QiSinglePhoton => (target / per_trial).powi(2),
        Protocol::QiGaussian => target / per_trial,
    };
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `R_M < 1`: the target notices the radar first.
    QrwrAdvantage,
    /// `1 <= R_M < threshold`: the radar finds the target first.
    RadarAdvantage,
    /// `R_M >= threshold`.
    PracticallyUndetectable,
}

impl Regime {
    pub fn classify(rm: f64, undetectable_threshold: f64) -> Self {
        if rm < 1.0 {
            Regime::QrwrAdvantage
        } else if rm >= undetectable_threshold {
            Regime::PracticallyUndetectable
        } else {
            Regime::RadarAdvantage
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmResult {
    pub k_target: f64,
    pub k_radar: f64,
    pub rm: f64,
    pub regime: Regime,
}

/// Inputs for comparing the target receiver with the radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmInputs {
    pub radar_protocol: Protocol,
    pub p_err: f64,
    /// Target side; only `eta_t`, the signal and its background are used.
    pub target: DetectionInputs,
    /// Radar side, evaluated with `radar_protocol`.
    pub radar: DetectionInputs,
    pub undetectable_threshold: f64,
}

impl RmInputs {
    /// Both detectors see the same background variance.
    pub fn shared(
        radar_protocol: Protocol,
        p_err: f64,
        eta_t: f64,
        eta_r: f64,
        eta_anc: f64,
        signal: SignalModel,
        var_bg: f64,
    ) -> Self {
        let inputs = DetectionInputs::new(eta_t, eta_r, eta_anc, signal, var_bg);
        Self {
            radar_protocol,
            p_err,
            target: inputs,
            radar: inputs,
            undetectable_threshold: DEFAULT_UNDETECTABLE_THRESHOLD,
        }
    }
}

pub fn rm_ratio(inputs: &RmInputs) -> Result<RmResult> {
    require_positive("undetectable_threshold", inputs.undetectable_threshold)?;
    let k_target = required_trials(Protocol::TargetDirect, inputs.p_err, &inputs.target)?;
    let k_radar = required_trials(inputs.radar_protocol, inputs.p_err, &inputs.radar)?;
    let rm = k_target / k_radar;
    Ok(RmResult {
        k_target,
        k_radar,
        rm,
        regime: Regime::classify(rm, inputs.undetectable_threshold),
    })
}

/// Rescales a shared-background `R_M` to distinct target/radar backgrounds.
///
/// Exact for the direct vs. single-photon comparison, where both trial
/// counts are proportional to their own background variance.
pub fn rm_background_correction(rm: f64, var_bg_target: f64, var_bg_radar: f64) -> Result<f64> {
    require_positive("var_bg_target", var_bg_target)?;
    require_positive("var_bg_radar", var_bg_radar)?;
    Ok(rm * var_bg_target / var_bg_radar)
}
