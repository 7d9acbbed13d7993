//! Scenario configuration file (TOML).
//!
//! Every section and key is optional; missing values take the defaults
//! listed in the README. Unknown keys and duplicate keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qrwr_core::background::{
    RadiationBackground, VarianceModel, MICROWAVE_REFERENCE_HZ, SOLAR_TEMPERATURE_K,
};
use qrwr_core::detection::{
    Protocol, SignalModel, SnrForm, DEFAULT_UNDETECTABLE_THRESHOLD, TWO_SIGMA_P_ERR,
};
use qrwr_core::linkbudget::{
    Anchor, AtmosphereModel, GeometryInputs, LinkEfficiencies, Weather, DEFAULT_DETECTOR_AREA_M2,
    DEFAULT_DETECTOR_EFFICIENCY, DEFAULT_IDLER_EFFICIENCY, DEFAULT_RCS_M2,
};
use qrwr_core::mc::ThresholdRule;
use qrwr_core::sweep::{
    presets, Axis, AxisScale, OperatingPoint, OutputQuantity, Parameter, ScenarioSetup, SweepSpec,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub background: BackgroundSection,
    /// Background at the radar receiver when it differs from the target's.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radar_background: Option<BackgroundSection>,
    pub signal: SignalSection,
    pub link: LinkSection,
    pub geometry: GeometrySection,
    pub atmosphere: AtmosphereSection,
    pub detection: DetectionSection,
    pub sweep: SweepSection,
    pub scenario: ScenarioSection,
    pub mc: McSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSection {
    pub temperature_k: f64,
    pub frequency_hz: f64,
    pub modes: u64,
    /// Per-mode mean photon number; replaces the blackbody value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub occupancy: Option<f64>,
    /// Total mean count `N_B`; divided evenly over the modes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_counts: Option<f64>,
    pub variance: VarianceModel,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        Self {
            temperature_k: SOLAR_TEMPERATURE_K,
            frequency_hz: MICROWAVE_REFERENCE_HZ,
            modes: 1,
            occupancy: None,
            total_counts: None,
            variance: VarianceModel::ThermalMultimode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    pub mu: f64,
    pub modes: u64,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            mu: presets::SCENARIO_SIGNAL_MU,
            modes: presets::SCENARIO_SIGNAL_MODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub eta_det: f64,
    pub eta_idler: f64,
    /// Direct overrides of the composed efficiencies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_anc: Option<f64>,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            eta_det: DEFAULT_DETECTOR_EFFICIENCY,
            eta_idler: DEFAULT_IDLER_EFFICIENCY,
            eta_t: None,
            eta_r: None,
            eta_anc: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub range_km: f64,
    pub rcs_m2: f64,
    pub detector_area_m2: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            range_km: 25.0,
            rcs_m2: DEFAULT_RCS_M2,
            detector_area_m2: DEFAULT_DETECTOR_AREA_M2,
        }
    }
}

/// Anchors as `[range_km, transmission]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtmosphereSection {
    pub good: Vec<[f64; 2]>,
    pub bad: Vec<[f64; 2]>,
}

impl Default for AtmosphereSection {
    fn default() -> Self {
        let pairs = |w| {
            AtmosphereModel::default()
                .anchors(w)
                .iter()
                .map(|a| [a.range_km, a.transmission])
                .collect()
        };
        Self {
            good: pairs(Weather::Good),
            bad: pairs(Weather::Bad),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionSection {
    /// Radar-side protocol.
    pub protocol: Protocol,
    pub p_err: f64,
    pub undetectable_threshold: f64,
    pub form: SnrForm,
    pub weather: Weather,
    /// `K` used by `snr` and by the snr/perr sweep outputs.
    pub trials: f64,
}

impl Default for DetectionSection {
    fn default() -> Self {
        Self {
            protocol: Protocol::QiGaussian,
            p_err: TWO_SIGMA_P_ERR,
            undetectable_threshold: DEFAULT_UNDETECTABLE_THRESHOLD,
            form: SnrForm::Approximate,
            weather: Weather::Good,
            trials: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub parameter: Parameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: AxisScale,
}

impl AxisSection {
    fn axis(&self) -> Axis {
        Axis {
            parameter: self.parameter,
            min: self.min,
            max: self.max,
            points: self.points,
            scale: self.scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub x: AxisSection,
    pub y: AxisSection,
    pub output: OutputQuantity,
    /// Also trace the `R_M = 1` contour into the JSON sidecar.
    pub contour: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        let grid = presets::single_photon_grid(41);
        let section = |a: Axis| AxisSection {
            parameter: a.parameter,
            min: a.min,
            max: a.max,
            points: a.points,
            scale: a.scale,
        };
        Self {
            x: section(grid.x),
            y: section(grid.y),
            output: OutputQuantity::Rm,
            contour: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub ranges_km: Vec<f64>,
    pub weathers: Vec<Weather>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            ranges_km: presets::SCENARIO_RANGES_KM.to_vec(),
            weathers: Weather::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McExperiment {
    /// Photon counting at the target.
    Direct,
    /// Covariance of correlated pair counts at the radar.
    SpCovariance,
    /// Direct detection tuned to each value of `snr_grid`.
    Erfc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub experiment: McExperiment,
    pub seed: u64,
    pub shots: u64,
    pub trials_per_shot: u64,
    pub threshold: ThresholdRule,
    pub snr_grid: Vec<f64>,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            experiment: McExperiment::Erfc,
            seed: 2024,
            shots: 100_000,
            trials_per_shot: 100,
            threshold: ThresholdRule::Midpoint,
            snr_grid: vec![1.0, 4.0, 8.0, 16.0],
        }
    }
}

/// Engine-level errors raised while resolving a section are reported as
/// configuration errors naming that section.
fn in_section<T>(section: &str, r: qrwr_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("[{section}] {e}")))
}

impl BackgroundSection {
    pub fn resolve(&self, section: &str) -> Result<RadiationBackground, CliError> {
        let mut bg = in_section(
            section,
            RadiationBackground::new(self.temperature_k, self.frequency_hz, self.modes),
        )?
        .with_variance_model(self.variance);
        match (self.occupancy, self.total_counts) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(format!(
                    "[{section}] set at most one of `occupancy` and `total_counts`"
                )))
            }
            (Some(mu), None) => bg = in_section(section, bg.with_occupancy(mu))?,
            (None, Some(n)) => bg = in_section(section, bg.with_total_counts(n))?,
            (None, None) => {}
        }
        Ok(bg)
    }
}

/// Composed efficiencies after overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Efficiencies {
    pub eta_t: f64,
    pub eta_r: f64,
    pub eta_anc: f64,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text)
            .map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Resolves every section once so errors surface before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        self.target_background()?;
        self.radar_background()?;
        self.signal()?;
        self.atmosphere()?;
        self.efficiencies()?;
        in_section(
            "detection",
            qrwr_core::detection::required_snr(self.detection.p_err),
        )?;
        if !(self.detection.undetectable_threshold > 1.0) {
            return Err(CliError::Config(
                "[detection] undetectable_threshold must be > 1".into(),
            ));
        }
        if !(self.detection.trials >= 0.0 && self.detection.trials.is_finite()) {
            return Err(CliError::Config(
                "[detection] trials must be a finite number >= 0".into(),
            ));
        }
        in_section("sweep", self.sweep_spec()?.validate())?;
        if self.scenario.ranges_km.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config(
                "[scenario] ranges_km must be strictly increasing".into(),
            ));
        }
        if let Some(r) = self
            .scenario
            .ranges_km
            .iter()
            .find(|r| !(**r > 0.0 && r.is_finite()))
        {
            return Err(CliError::Config(format!(
                "[scenario] range {r} km must be > 0"
            )));
        }
        if self.mc.shots == 0 {
            return Err(CliError::Config("[mc] shots must be >= 1".into()));
        }
        if self.mc.trials_per_shot == 0 {
            return Err(CliError::Config("[mc] trials_per_shot must be >= 1".into()));
        }
        Ok(())
    }

    pub fn target_background(&self) -> Result<RadiationBackground, CliError> {
        self.background.resolve("background")
    }

    pub fn radar_background(&self) -> Result<RadiationBackground, CliError> {
        match &self.radar_background {
            Some(b) => b.resolve("radar_background"),
            None => self.target_background(),
        }
    }

    pub fn signal(&self) -> Result<SignalModel, CliError> {
        in_section(
            "signal",
            SignalModel::new(self.signal.mu, self.signal.modes),
        )
    }

    pub fn atmosphere(&self) -> Result<AtmosphereModel, CliError> {
        let anchors = |v: &[[f64; 2]]| v.iter().map(|p| Anchor::new(p[0], p[1])).collect();
        in_section(
            "atmosphere",
            AtmosphereModel::new(
                anchors(&self.atmosphere.good),
                anchors(&self.atmosphere.bad),
            ),
        )
    }

    pub fn geometry(&self) -> Result<GeometryInputs, CliError> {
        let g = &self.geometry;
        in_section(
            "geometry",
            GeometryInputs::new(g.range_km * 1e3, g.rcs_m2, g.detector_area_m2),
        )
    }

    /// Link factors at the configured range and weather.
    pub fn link_factors(&self) -> Result<LinkEfficiencies, CliError> {
        let geometry = self.geometry()?;
        let atmosphere = self.atmosphere()?;
        in_section(
            "link",
            LinkEfficiencies::from_geometry(
                &geometry,
                self.detection.weather,
                &atmosphere,
                self.link.eta_det,
                self.link.eta_idler,
            ),
        )
    }

    pub fn efficiencies(&self) -> Result<Efficiencies, CliError> {
        let c = self.link_factors()?.compose();
        let check = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(CliError::Config(format!(
                    "[link] {name} = {v} must lie in [0, 1]"
                )))
            }
        };
        Ok(Efficiencies {
            eta_t: check("eta_t", self.link.eta_t.unwrap_or(c.eta_t))?,
            eta_r: check("eta_r", self.link.eta_r.unwrap_or(c.eta_r))?,
            eta_anc: check("eta_anc", self.link.eta_anc.unwrap_or(c.eta_anc))?,
        })
    }

    pub fn operating_point(&self) -> Result<OperatingPoint, CliError> {
        let eta = self.efficiencies()?;
        let mut op = OperatingPoint::new(
            self.detection.protocol,
            self.signal()?,
            eta.eta_t,
            eta.eta_r,
            eta.eta_anc,
            self.target_background()?,
        );
        op.radar_background = self.radar_background()?;
        op.p_err = self.detection.p_err;
        op.form = self.detection.form;
        op.trials = self.detection.trials;
        op.undetectable_threshold = self.detection.undetectable_threshold;
        Ok(op)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        Ok(SweepSpec {
            x: self.sweep.x.axis(),
            y: self.sweep.y.axis(),
            fixed: self.operating_point()?,
            output: self.sweep.output,
        })
    }

    pub fn scenario_setup(&self) -> Result<ScenarioSetup, CliError> {
        if self.radar_background.is_some() {
            return Err(CliError::Config(
                "[radar_background] scenario lines use one shared background; remove the section"
                    .into(),
            ));
        }
        Ok(ScenarioSetup {
            geometry: self.geometry()?,
            background: self.target_background()?,
            radar_protocol: self.detection.protocol,
            atmosphere: self.atmosphere()?,
            eta_det: self.link.eta_det,
            eta_idler: self.link.eta_idler,
            signal: self.signal()?,
            p_err: self.detection.p_err,
            undetectable_threshold: self.detection.undetectable_threshold,
        })
    }

    /// SHA-256 of the canonical JSON form (sorted keys, defaults filled in).
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
