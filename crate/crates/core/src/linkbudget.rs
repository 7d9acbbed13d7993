//! Efficiency factors for the target-side receiver and the radar's signal
//! and ancilla arms.
//!
//! Naming: `eta_atm` is the one-way atmospheric transmission and `eta_anc`
//! the composed ancilla-arm efficiency. The two are distinct quantities even
//! though both are commonly written `eta_A`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, require_unit_interval, Error, Result};

/// Default target-side detector aperture: 10 cm x 10 cm.
pub const DEFAULT_DETECTOR_AREA_M2: f64 = 0.01;
/// Classical RCS of a typical jet fighter.
pub const DEFAULT_RCS_M2: f64 = 2.0;
pub const DEFAULT_DETECTOR_EFFICIENCY: f64 = 0.5;
/// Idler (ancilla photon system) efficiency before detection.
pub const DEFAULT_IDLER_EFFICIENCY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weather {
    /// Visibility label "300 m".
    Good,
    /// Visibility label "30 m".
    Bad,
}

impl Weather {
    pub const ALL: [Weather; 2] = [Weather::Good, Weather::Bad];

    pub fn as_str(&self) -> &'static str {
        match self {
            Weather::Good => "good",
            Weather::Bad => "bad",
        }
    }
}

impl std::fmt::Display for Weather {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Weather {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "good" => Ok(Weather::Good),
            "bad" => Ok(Weather::Bad),
            other => Err(Error::Config(format!("unknown weather `{other}`"))),
        }
    }
}

/// One measured point of one-way transmission versus range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub range_km: f64,
    pub transmission: f64,
}

impl Anchor {
    pub const fn new(range_km: f64, transmission: f64) -> Self {
        Self {
            range_km,
            transmission,
        }
    }
}

/// Piecewise log-linear transmission table per weather class.
///
/// Range 0 always maps to transmission 1. Between anchors `ln T` is linear in
/// range; past the last anchor `T = exp(-alpha r)` with `alpha` chosen so the
/// curve passes through that anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereModel {
    good: Vec<Anchor>,
    bad: Vec<Anchor>,
}

impl AtmosphereModel {
    pub fn new(good: Vec<Anchor>, bad: Vec<Anchor>) -> Result<Self> {
        validate_anchors(&good)?;
        validate_anchors(&bad)?;
        Ok(Self { good, bad })
    }

    pub fn anchors(&self, weather: Weather) -> &[Anchor] {
        match weather {
            Weather::Good => &self.good,
            Weather::Bad => &self.bad,
        }
    }

    /// Per-kilometre extinction used beyond the outermost anchor.
    pub fn extrapolation_coefficient(&self, weather: Weather) -> f64 {
        let last = self.anchors(weather).last().expect("validated non-empty");
        -last.transmission.ln() / last.range_km
    }

    pub fn transmission(&self, range_km: f64, weather: Weather) -> Result<f64> {
        atmosphere_attenuation(range_km, weather, self)
    }
}

impl Default for AtmosphereModel {
    fn default() -> Self {
        Self {
            good: vec![Anchor::new(25.0, 0.98), Anchor::new(200.0, 0.82)],
            bad: vec![Anchor::new(25.0, 0.50), Anchor::new(200.0, 0.004)],
        }
    }
}

fn validate_anchors(anchors: &[Anchor]) -> Result<()> {
    if anchors.is_empty() {
        return Err(Error::Config(
            "atmosphere needs at least one anchor per weather".into(),
        ));
    }
    let mut prev = Anchor::new(0.0, 1.0);
    for a in anchors {
        require_positive("anchor range_km", a.range_km)?;
        if !(a.transmission > 0.0 && a.transmission <= 1.0) {
            return Err(Error::domain(
                "anchor transmission",
                a.transmission,
                "must lie in (0, 1]",
            ));
        }
        if a.range_km <= prev.range_km {
            return Err(Error::Config(
                "anchor ranges must be strictly increasing".into(),
            ));
        }
        if a.transmission > prev.transmission {
            return Err(Error::Config(
                "anchor transmission must be non-increasing in range".into(),
            ));
        }
        prev = *a;
    }
    Ok(())
}

/// One-way atmospheric transmission at `range_km`.
pub fn atmosphere_attenuation(
    range_km: f64,
    weather: Weather,
    model: &AtmosphereModel,
) -> Result<f64> {
    require_non_negative("range_km", range_km)?;
    if range_km == 0.0 {
        return Ok(1.0);
    }
    let anchors = model.anchors(weather);
    let mut lo = Anchor::new(0.0, 1.0);
    for &hi in anchors {
        if range_km == hi.range_km {
            return Ok(hi.transmission);
        }
        if range_km < hi.range_km {
            let t = (range_km - lo.range_km) / (hi.range_km - lo.range_km);
            let log_t = (1.0 - t) * lo.transmission.ln() + t * hi.transmission.ln();
            return Ok(log_t.exp());
        }
        lo = hi;
    }
    Ok((-model.extrapolation_coefficient(weather) * range_km).exp())
}

/// Fraction of reflected photons returning to the radar, `sigma / (4 pi R^2)`,
/// clamped to 1.
pub fn geometric_return(rcs_m2: f64, range_m: f64) -> Result<f64> {
    require_positive("rcs_m2", rcs_m2)?;
    require_positive("range_m", range_m)?;
    Ok((rcs_m2 / (4.0 * PI * range_m * range_m)).min(1.0))
}

/// Fraction of the target's effective area covered by its detector, clamped to 1.
pub fn aperture_fraction(detector_area_m2: f64, rcs_m2: f64) -> Result<f64> {
    require_positive("detector_area_m2", detector_area_m2)?;
    require_positive("rcs_m2", rcs_m2)?;
    Ok((detector_area_m2 / rcs_m2).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryInputs {
    pub range_m: f64,
    pub rcs_m2: f64,
    pub detector_area_m2: f64,
}

impl GeometryInputs {
    pub fn new(range_m: f64, rcs_m2: f64, detector_area_m2: f64) -> Result<Self> {
        require_positive("range_m", range_m)?;
        require_positive("rcs_m2", rcs_m2)?;
        require_positive("detector_area_m2", detector_area_m2)?;
        Ok(Self {
            range_m,
            rcs_m2,
            detector_area_m2,
        })
    }

    pub fn at_range_km(self, range_km: f64) -> Result<Self> {
        Self::new(range_km * 1e3, self.rcs_m2, self.detector_area_m2)
    }
}

/// The raw efficiency factors, each a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEfficiencies {
    pub eta_atm: f64,
    pub eta_det: f64,
    pub eta_aperture: f64,
    pub eta_return: f64,
    pub eta_idler: f64,
}

impl LinkEfficiencies {
    pub fn new(
        eta_atm: f64,
        eta_det: f64,
        eta_aperture: f64,
        eta_return: f64,
        eta_idler: f64,
    ) -> Result<Self> {
        Ok(Self {
            eta_atm: require_unit_interval("eta_atm", eta_atm)?,
            eta_det: require_unit_interval("eta_det", eta_det)?,
            eta_aperture: require_unit_interval("eta_aperture", eta_aperture)?,
            eta_return: require_unit_interval("eta_return", eta_return)?,
            eta_idler: require_unit_interval("eta_idler", eta_idler)?,
        })
    }

    /// Factors for a target at `geometry.range_m` in the given weather.
    pub fn from_geometry(
        geometry: &GeometryInputs,
        weather: Weather,
        atmosphere: &AtmosphereModel,
        eta_det: f64,
        eta_idler: f64,
    ) -> Result<Self> {
        let eta_atm = atmosphere_attenuation(geometry.range_m / 1e3, weather, atmosphere)?;
        let eta_return = geometric_return(geometry.rcs_m2, geometry.range_m)?;
        let eta_aperture = aperture_fraction(geometry.detector_area_m2, geometry.rcs_m2)?;
        Self::new(eta_atm, eta_det, eta_aperture, eta_return, eta_idler)
    }

    /// Same factors with the detector efficiency multiplied by `scale`.
    pub fn with_scaled_detector(self, scale: f64) -> Result<Self> {
        Self::new(
            self.eta_atm,
            self.eta_det * scale,
            self.eta_aperture,
            self.eta_return,
            self.eta_idler,
        )
    }

    pub fn compose(&self) -> ComposedEfficiencies {
        compose_efficiencies(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComposedEfficiencies {
    /// Target side: one-way transmission, detection, aperture.
    pub eta_t: f64,
    /// Radar signal arm: round trip, geometric return, detection.
    pub eta_r: f64,
    /// Radar ancilla arm: idler system and detection.
    pub eta_anc: f64,
    /// `eta_r / eta_t`, evaluated as `eta_atm eta_return / eta_aperture`.
    pub ratio: f64,
}

pub fn compose_efficiencies(f: &LinkEfficiencies) -> ComposedEfficiencies {
    ComposedEfficiencies {
        eta_t: f.eta_atm * f.eta_det * f.eta_aperture,
        eta_r: f.eta_atm * f.eta_atm * f.eta_return * f.eta_det,
        eta_anc: f.eta_idler * f.eta_det,
        ratio: f.eta_atm * f.eta_return / f.eta_aperture,
    }
}
