//! Thermal background photon field.
//!
//! Blackbody (Bose-Einstein) per-mode occupancy, total background counts
//! `N_B = M_B * mu_B`, and the count variance under either Poisson or
//! multimode-thermal statistics.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Planck constant, J s (CODATA, exact since 2019).
pub const PLANCK_H: f64 = 6.626_070_150e-34;
/// Boltzmann constant, J/K (CODATA, exact since 2019).
pub const BOLTZMANN_K: f64 = 1.380_649_000e-23;

/// Solar surface temperature used by default: 6000 degC expressed in kelvin.
pub const SOLAR_TEMPERATURE_K: f64 = 6273.0;
/// Default microwave reference frequency (X band).
pub const MICROWAVE_REFERENCE_HZ: f64 = 1.0e10;
/// Representative optical frequency (~700 nm) for microwave/optical comparisons.
pub const OPTICAL_REFERENCE_HZ: f64 = 4.3e14;

/// Statistics used for the background count variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceModel {
    /// Variance equals the mean.
    Poisson,
    /// `M_B` independent Bose-Einstein modes: variance `M_B mu_B (1 + mu_B)`.
    #[default]
    ThermalMultimode,
}

/// `h nu / k T`, the dimensionless photon energy.
fn reduced_energy(frequency_hz: f64, temperature_k: f64) -> Result<f64> {
    require_positive("frequency", frequency_hz)?;
    require_positive("temperature", temperature_k)?;
    Ok(PLANCK_H * frequency_hz / (BOLTZMANN_K * temperature_k))
}

/// Mean photon number per mode of blackbody radiation, `1 / (exp(h nu / k T) - 1)`.
///
/// Underflows to zero once `h nu / k T` exceeds ~709; use
/// [`planck_log_occupancy`] when comparing deep-Wien values.
pub fn planck_occupancy(frequency_hz: f64, temperature_k: f64) -> Result<f64> {
    let x = reduced_energy(frequency_hz, temperature_k)?;
    Ok(1.0 / x.exp_m1())
}

/// Natural log of [`planck_occupancy`], finite for every valid input.
pub fn planck_log_occupancy(frequency_hz: f64, temperature_k: f64) -> Result<f64> {
    let x = reduced_energy(frequency_hz, temperature_k)?;
    if x < 1.0 {
        Ok(-x.exp_m1().ln())
    } else {
        // ln(1 / (e^x - 1)) = -x - ln(1 - e^-x)
        Ok(-x - (-(-x).exp()).ln_1p())
    }
}

/// Background photon field seen by one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiationBackground {
    temperature_k: f64,
    frequency_hz: f64,
    mode_count: u64,
    occupancy_override: Option<f64>,
    variance_model: VarianceModel,
}

impl RadiationBackground {
    pub fn new(temperature_k: f64, frequency_hz: f64, mode_count: u64) -> Result<Self> {
        require_positive("temperature", temperature_k)?;
        require_positive("frequency", frequency_hz)?;
        if mode_count == 0 {
            return Err(Error::domain("mode_count", 0.0, "must be >= 1"));
        }
        Ok(Self {
            temperature_k,
            frequency_hz,
            mode_count,
            occupancy_override: None,
            variance_model: VarianceModel::default(),
        })
    }

    /// Single-mode solar background at the microwave reference frequency.
    pub fn solar_microwave() -> Self {
        Self::new(SOLAR_TEMPERATURE_K, MICROWAVE_REFERENCE_HZ, 1).expect("valid defaults")
    }

    /// Replaces the blackbody occupancy with a fixed per-mode mean.
    pub fn with_occupancy(mut self, mu_b: f64) -> Result<Self> {
        require_non_negative("occupancy", mu_b)?;
        self.occupancy_override = Some(mu_b);
        Ok(self)
    }

    /// Sets the occupancy so that the total count `M_B mu_B` equals `n_b`.
    pub fn with_total_counts(self, n_b: f64) -> Result<Self> {
        require_non_negative("n_b", n_b)?;
        let m = self.mode_count as f64;
        self.with_occupancy(n_b / m)
    }

    pub fn with_variance_model(mut self, model: VarianceModel) -> Self {
        self.variance_model = model;
        self
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn mode_count(&self) -> u64 {
        self.mode_count
    }

    pub fn occupancy_override(&self) -> Option<f64> {
        self.occupancy_override
    }

    pub fn variance_model(&self) -> VarianceModel {
        self.variance_model
    }

    /// Per-mode mean photon number `mu_B`.
    pub fn occupancy(&self) -> f64 {
        match self.occupancy_override {
            Some(mu) => mu,
            None => planck_occupancy(self.frequency_hz, self.temperature_k)
                .expect("validated at construction"),
        }
    }

    /// Total mean background count `N_B = M_B mu_B`.
    pub fn counts(&self) -> f64 {
        background_counts(self)
    }

    /// Background count variance `delta^2 N_B`.
    pub fn variance(&self) -> f64 {
        background_variance(self)
    }
}

impl Default for RadiationBackground {
    fn default() -> Self {
        Self::solar_microwave()
    }
}

pub fn background_counts(bg: &RadiationBackground) -> f64 {
    bg.mode_count as f64 * bg.occupancy()
}

pub fn background_variance(bg: &RadiationBackground) -> f64 {
    let mu = bg.occupancy();
    let m = bg.mode_count as f64;
    match bg.variance_model {
        VarianceModel::Poisson => m * mu,
        VarianceModel::ThermalMultimode => m * mu * (1.0 + mu),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn solar_x_band_occupancy() {
        let mu = planck_occupancy(1.0e10, 6273.0).unwrap();
        // 1/x - 1/2 + x/12 with x = h nu / k T
        let x = PLANCK_H * 1.0e10 / (BOLTZMANN_K * 6273.0);
        let series = 1.0 / x - 0.5 + x / 12.0;
        assert!(rel(mu, series) < 1e-12, "{mu} vs {series}");
        assert!(rel(mu, 1.307e4) < 1e-3, "{mu}");
    }

    #[test]
    fn occupancy_is_one_at_ln2() {
        let t = 300.0;
        let nu = std::f64::consts::LN_2 * BOLTZMANN_K * t / PLANCK_H;
        let mu = planck_occupancy(nu, t).unwrap();
        assert!((mu - 1.0).abs() < 1e-14, "{mu}");
    }

    #[test]
    fn microwave_to_optical_ratio() {
        let mw = planck_occupancy(MICROWAVE_REFERENCE_HZ, SOLAR_TEMPERATURE_K).unwrap();
        let opt = planck_occupancy(OPTICAL_REFERENCE_HZ, SOLAR_TEMPERATURE_K).unwrap();
        let ratio = mw / opt;
        assert!((1e5..1e6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(planck_occupancy(0.0, 300.0).is_err());
        assert!(planck_occupancy(1e9, -1.0).is_err());
        assert!(planck_occupancy(f64::NAN, 300.0).is_err());
        assert!(RadiationBackground::new(300.0, 1e9, 0).is_err());
        assert!(RadiationBackground::solar_microwave()
            .with_occupancy(-1.0)
            .is_err());
    }

    #[test]
    fn log_occupancy_matches_direct() {
        for &(nu, t) in &[(1e9, 3.0), (1e10, 6273.0), (4.3e14, 6273.0), (1e12, 10.0)] {
            let direct = planck_occupancy(nu, t).unwrap().ln();
            let logged = planck_log_occupancy(nu, t).unwrap();
            assert!((direct - logged).abs() < 1e-12 * direct.abs().max(1.0));
        }
        // deep Wien: occupancy underflows, log does not
        assert_eq!(planck_occupancy(1e15, 3.0).unwrap(), 0.0);
        assert!(planck_log_occupancy(1e15, 3.0).unwrap().is_finite());
    }

    #[test]
    fn counts_and_variance() {
        let bg = RadiationBackground::solar_microwave()
            .with_occupancy(1e4)
            .unwrap();
        assert_eq!(bg.counts(), 1e4);

        let bg = RadiationBackground::new(300.0, 1e9, 100)
            .unwrap()
            .with_occupancy(0.0)
            .unwrap();
        assert_eq!(bg.counts(), 0.0);
        assert_eq!(bg.variance(), 0.0);

        let bg = RadiationBackground::new(300.0, 1e9, 100)
            .unwrap()
            .with_occupancy(130.7)
            .unwrap();
        assert!(rel(bg.counts(), 1.307e4) < 1e-12);

        let poisson = RadiationBackground::new(300.0, 1e9, 1)
            .unwrap()
            .with_occupancy(100.0)
            .unwrap()
            .with_variance_model(VarianceModel::Poisson);
        assert_eq!(poisson.variance(), 100.0);

        let thermal = RadiationBackground::new(300.0, 1e9, 1)
            .unwrap()
            .with_occupancy(10.0)
            .unwrap();
        assert_eq!(thermal.variance(), 110.0);

        let thermal = RadiationBackground::new(300.0, 1e9, 100)
            .unwrap()
            .with_occupancy(100.0)
            .unwrap();
        assert!(rel(thermal.variance(), 1.01e6) < 1e-12);
    }

    #[test]
    fn total_counts_setter_divides_by_modes() {
        let bg = RadiationBackground::new(300.0, 1e9, 4)
            .unwrap()
            .with_total_counts(100.0)
            .unwrap();
        assert_eq!(bg.occupancy(), 25.0);
        assert_eq!(bg.counts(), 100.0);
    }
}
