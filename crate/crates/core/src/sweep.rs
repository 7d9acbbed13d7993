//! Two-axis parameter sweeps, `R_M = 1` contour extraction and
//! range/weather scenario lines.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::background::RadiationBackground;
use crate::detection::{
    error_probability, rm_ratio, DetectionInputs, Protocol, RmInputs, RmResult, SignalModel,
    SnrForm, DEFAULT_UNDETECTABLE_THRESHOLD, TWO_SIGMA_P_ERR,
};
use crate::error::{require_unit_interval, Error, Result};
use crate::linkbudget::{AtmosphereModel, GeometryInputs, LinkEfficiencies, Weather};

/// Quantities that can be placed on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    /// Total signal photons `<N_S>`; mode count kept.
    #[serde(rename = "n_s")]
    NSignal,
    /// Signal photons per mode.
    Mu,
    EtaT,
    EtaR,
    /// `eta_R / eta_T`; applied after `eta_t`.
    Ratio,
    EtaAnc,
    /// Total background photons `N_B` on both sides; mode count kept.
    #[serde(rename = "n_b")]
    NBackground,
    /// Background photons per mode on both sides.
    #[serde(rename = "mu_b")]
    MuBackground,
    PErr,
}

impl Parameter {
    pub const ALL: [Parameter; 9] = [
        Parameter::NSignal,
        Parameter::Mu,
        Parameter::EtaT,
        Parameter::EtaR,
        Parameter::Ratio,
        Parameter::EtaAnc,
        Parameter::NBackground,
        Parameter::MuBackground,
        Parameter::PErr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Parameter::NSignal => "n_s",
            Parameter::Mu => "mu",
            Parameter::EtaT => "eta_t",
            Parameter::EtaR => "eta_r",
            Parameter::Ratio => "ratio",
            Parameter::EtaAnc => "eta_anc",
            Parameter::NBackground => "n_b",
            Parameter::MuBackground => "mu_b",
            Parameter::PErr => "p_err",
        }
    }

    /// Pairs that set the same underlying field.
    fn conflicts_with(&self, other: Parameter) -> bool {
        use Parameter::*;
        matches!(
            (*self, other),
            (NSignal, Mu)
                | (Mu, NSignal)
                | (EtaR, Ratio)
                | (Ratio, EtaR)
                | (NBackground, MuBackground)
                | (MuBackground, NBackground)
        )
    }
}

impl std::str::FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{s}`")))
    }
}

impl std::fmt::Display for Parameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: Parameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: AxisScale,
}

impl Axis {
    pub fn log(parameter: Parameter, min: f64, max: f64, points: usize) -> Self {
        Self {
            parameter,
            min,
            max,
            points,
            scale: AxisScale::Log,
        }
    }

    pub fn linear(parameter: Parameter, min: f64, max: f64, points: usize) -> Self {
        Self {
            parameter,
            min,
            max,
            points,
            scale: AxisScale::Linear,
        }
    }

    /// Single-node axis, mainly for spot checks.
    pub fn fixed(parameter: Parameter, value: f64) -> Self {
        Self {
            parameter,
            min: value,
            max: value,
            points: 1,
            scale: AxisScale::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.parameter.name();
        if self.points == 0 {
            return Err(Error::Config(format!("axis `{name}`: points must be >= 1")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!(
                "axis `{name}`: bounds must be finite"
            )));
        }
        if self.points == 1 {
            if self.min != self.max {
                return Err(Error::Config(format!(
                    "axis `{name}`: a 1-point axis needs min == max"
                )));
            }
        } else if !(self.min < self.max) {
            return Err(Error::Config(format!("axis `{name}`: min must be < max")));
        }
        if self.scale == AxisScale::Log && self.min <= 0.0 {
            return Err(Error::Config(format!(
                "axis `{name}`: log scale needs min > 0"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n {
                    return self.max;
                }
                let t = i as f64 / n as f64;
                match self.scale {
                    AxisScale::Linear => self.min + t * (self.max - self.min),
                    AxisScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    fn coordinate_of(&self, v: f64) -> f64 {
        match self.scale {
            AxisScale::Log => v.ln(),
            AxisScale::Linear => v,
        }
    }

    fn value_at_coordinate(&self, u: f64) -> f64 {
        match self.scale {
            AxisScale::Log => u.exp(),
            AxisScale::Linear => u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputQuantity {
    #[default]
    Rm,
    /// Target SNR at `OperatingPoint::trials`.
    SnrTarget,
    /// Radar SNR at `OperatingPoint::trials`.
    SnrRadar,
    /// Radar error probability at `OperatingPoint::trials`.
    Perr,
}

impl OutputQuantity {
    pub fn name(&self) -> &'static str {
        match self {
            OutputQuantity::Rm => "rm",
            OutputQuantity::SnrTarget => "snr_target",
            OutputQuantity::SnrRadar => "snr_radar",
            OutputQuantity::Perr => "perr",
        }
    }
}

/// A fully specified comparison between the target receiver and the radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub radar_protocol: Protocol,
    pub p_err: f64,
    pub signal: SignalModel,
    pub eta_t: f64,
    pub eta_r: f64,
    pub eta_anc: f64,
    pub target_background: RadiationBackground,
    pub radar_background: RadiationBackground,
    pub form: SnrForm,
    /// Trial count for SNR and error-probability outputs.
    pub trials: f64,
    pub undetectable_threshold: f64,
}

impl OperatingPoint {
    /// Shared background on both sides, approximate target SNR, 2-sigma level.
    pub fn new(
        radar_protocol: Protocol,
        signal: SignalModel,
        eta_t: f64,
        eta_r: f64,
        eta_anc: f64,
        background: RadiationBackground,
    ) -> Self {
        Self {
            radar_protocol,
            p_err: TWO_SIGMA_P_ERR,
            signal,
            eta_t,
            eta_r,
            eta_anc,
            target_background: background,
            radar_background: background,
            form: SnrForm::Approximate,
            trials: 1.0,
            undetectable_threshold: DEFAULT_UNDETECTABLE_THRESHOLD,
        }
    }

    pub fn target_inputs(&self) -> DetectionInputs {
        DetectionInputs::new(
            self.eta_t,
            self.eta_r,
            self.eta_anc,
            self.signal,
            self.target_background.variance(),
        )
        .with_form(self.form)
    }

    pub fn radar_inputs(&self) -> DetectionInputs {
        DetectionInputs::new(
            self.eta_t,
            self.eta_r,
            self.eta_anc,
            self.signal,
            self.radar_background.variance(),
        )
        .with_form(self.form)
    }

    pub fn rm_inputs(&self) -> RmInputs {
        RmInputs {
            radar_protocol: self.radar_protocol,
            p_err: self.p_err,
            target: self.target_inputs(),
            radar: self.radar_inputs(),
            undetectable_threshold: self.undetectable_threshold,
        }
    }

    pub fn rm(&self) -> Result<RmResult> {
        rm_ratio(&self.rm_inputs())
    }

    pub fn evaluate(&self, quantity: OutputQuantity) -> Result<f64> {
        let value = match quantity {
            OutputQuantity::Rm => self.rm()?.rm,
            OutputQuantity::SnrTarget => self
                .target_inputs()
                .snr(Protocol::TargetDirect, self.trials)?,
            OutputQuantity::SnrRadar => {
                self.radar_inputs().snr(self.radar_protocol, self.trials)?
            }
            OutputQuantity::Perr => {
                error_probability(self.radar_inputs().snr(self.radar_protocol, self.trials)?)?
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Infeasible(format!(
                "{} evaluated to {value}",
                quantity.name()
            )))
        }
    }

    /// Copy with one parameter replaced. `Ratio` reads the current `eta_t`.
    pub fn with_parameter(mut self, parameter: Parameter, value: f64) -> Result<Self> {
        match parameter {
            Parameter::NSignal => {
                self.signal = SignalModel::from_total(value, self.signal.modes())?
            }
            Parameter::Mu => self.signal = SignalModel::new(value, self.signal.modes())?,
            Parameter::EtaT => self.eta_t = require_unit_interval("eta_t", value)?,
            Parameter::EtaR => self.eta_r = require_unit_interval("eta_r", value)?,
            Parameter::Ratio => self.eta_r = require_unit_interval("eta_r", value * self.eta_t)?,
            Parameter::EtaAnc => self.eta_anc = require_unit_interval("eta_anc", value)?,
            Parameter::NBackground => {
                self.target_background = self.target_background.with_total_counts(value)?;
                self.radar_background = self.radar_background.with_total_counts(value)?;
            }
            Parameter::MuBackground => {
                self.target_background = self.target_background.with_occupancy(value)?;
                self.radar_background = self.radar_background.with_occupancy(value)?;
            }
            Parameter::PErr => self.p_err = value,
        }
        Ok(self)
    }

    /// Applies both axis values; `Ratio` always goes last so it sees the final `eta_t`.
    fn at(&self, a: (Parameter, f64), b: (Parameter, f64)) -> Result<Self> {
        let (first, second) = if a.0 == Parameter::Ratio {
            (b, a)
        } else {
            (a, b)
        };
        self.with_parameter(first.0, first.1)?
            .with_parameter(second.0, second.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x: Axis,
    pub y: Axis,
    pub fixed: OperatingPoint,
    pub output: OutputQuantity,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x.parameter == self.y.parameter {
            return Err(Error::Config(format!(
                "both axes sweep `{}`",
                self.x.parameter
            )));
        }
        if self.x.parameter.conflicts_with(self.y.parameter) {
            return Err(Error::Config(format!(
                "axes `{}` and `{}` set the same quantity",
                self.x.parameter, self.y.parameter
            )));
        }
        Ok(())
    }

    pub fn transposed(&self) -> Self {
        Self {
            x: self.y,
            y: self.x,
            ..*self
        }
    }

    fn point(&self, x: f64, y: f64) -> Result<OperatingPoint> {
        self.fixed.at((self.x.parameter, x), (self.y.parameter, y))
    }

    /// Stable 64-bit FNV-1a digest of the spec's debug rendering.
    pub fn scenario_hash(&self) -> u64 {
        fnv1a(format!("{self:?}").as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// One grid node. Infeasible nodes carry the reason instead of a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub value: Option<f64>,
    pub infeasible: Option<String>,
}

impl Node {
    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) => Node {
                value: Some(v),
                infeasible: None,
            },
            Err(e) => Node {
                value: None,
                infeasible: Some(e.to_string()),
            },
        }
    }

    pub fn feasible(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub scenario_hash: u64,
    /// Wall-clock seconds since the Unix epoch when the sweep finished.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub x: Axis,
    pub y: Axis,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// `grid[x_index][y_index]`.
    pub grid: Vec<Vec<Node>>,
    pub output: OutputQuantity,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn get(&self, ix: usize, iy: usize) -> &Node {
        &self.grid[ix][iy]
    }

    /// Rows `(x, y, node)` in x-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, &Node)> {
        self.grid.iter().enumerate().flat_map(move |(ix, col)| {
            col.iter()
                .enumerate()
                .map(move |(iy, node)| (self.x_values[ix], self.y_values[iy], node))
        })
    }
}

pub fn sweep_grid(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let x_values = spec.x.values();
    let y_values = spec.y.values();
    let ny = y_values.len();
    let flat: Vec<Node> = (0..x_values.len() * ny)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx / ny, idx % ny);
            Node::from_result(
                spec.point(x_values[ix], y_values[iy])
                    .and_then(|p| p.evaluate(spec.output)),
            )
        })
        .collect();
    let grid = flat.chunks(ny).map(|c| c.to_vec()).collect();
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(SweepResult {
        x: spec.x,
        y: spec.y,
        x_values,
        y_values,
        grid,
        output: spec.output,
        metadata: SweepMetadata {
            scenario_hash: spec.scenario_hash(),
            timestamp,
        },
    })
}

/// `R_M = 1` crossings along one x grid line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourLine {
    pub x: f64,
    /// Crossing y values in increasing order; empty when the line never reaches `R_M = 1`.
    pub crossings: Vec<f64>,
    /// Whether `log R_M` was monotone over the feasible y nodes.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub x_parameter: Parameter,
    pub y_parameter: Parameter,
    pub lines: Vec<ContourLine>,
}

impl Contour {
    /// The contour as a polyline of `(x, y)` points.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.lines
            .iter()
            .flat_map(|l| l.crossings.iter().map(move |&y| (l.x, y)))
            .collect()
    }
}

/// Target accuracy of a contour point, in decades of `R_M`.
pub const CONTOUR_TOLERANCE_LOG10: f64 = 1e-6;

/// Traces `R_M = 1` by bisection along y (in the axis' own coordinate)
/// for every x grid value. The spec's `output` is ignored.
pub fn contour_rm_unity(spec: &SweepSpec) -> Result<Contour> {
    spec.validate()?;
    let y_values = spec.y.values();
    let lines = spec
        .x
        .values()
        .into_par_iter()
        .map(|x| contour_line(spec, x, &y_values))
        .collect();
    Ok(Contour {
        x_parameter: spec.x.parameter,
        y_parameter: spec.y.parameter,
        lines,
    })
}

fn log_rm(spec: &SweepSpec, x: f64, y: f64) -> Option<f64> {
    let rm = spec.point(x, y).and_then(|p| p.rm()).ok()?.rm;
    (rm > 0.0 && rm.is_finite()).then(|| rm.log10())
}

fn contour_line(spec: &SweepSpec, x: f64, y_values: &[f64]) -> ContourLine {
    let samples: Vec<(f64, Option<f64>)> =
        y_values.iter().map(|&y| (y, log_rm(spec, x, y))).collect();

    let feasible: Vec<f64> = samples.iter().filter_map(|s| s.1).collect();
    let monotone =
        feasible.windows(2).all(|w| w[1] >= w[0]) || feasible.windows(2).all(|w| w[1] <= w[0]);

    let mut crossings = Vec::new();
    for (i, &(y, g)) in samples.iter().enumerate() {
        let Some(g) = g else { continue };
        if g.abs() < CONTOUR_TOLERANCE_LOG10 {
            crossings.push(y);
            continue;
        }
        let Some(&(y_next, Some(g_next))) = samples.get(i + 1) else {
            continue;
        };
        if g_next.abs() >= CONTOUR_TOLERANCE_LOG10 && (g < 0.0) != (g_next < 0.0) {
            if let Some(root) = bisect_line(spec, x, (y, g), (y_next, g_next)) {
                crossings.push(root);
            }
        }
    }
    ContourLine {
        x,
        crossings,
        monotone,
    }
}

fn bisect_line(spec: &SweepSpec, x: f64, lo: (f64, f64), hi: (f64, f64)) -> Option<f64> {
    let axis = &spec.y;
    let (mut a, mut b) = (axis.coordinate_of(lo.0), axis.coordinate_of(hi.0));
    let lo_negative = lo.1 < 0.0;
    let mut best = (f64::INFINITY, lo.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let y = axis.value_at_coordinate(mid);
        let g = log_rm(spec, x, y)?;
        if g.abs() < best.0 {
            best = (g.abs(), y);
        }
        if g.abs() < CONTOUR_TOLERANCE_LOG10 || mid == a || mid == b {
            break;
        }
        if (g < 0.0) == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(best.1)
}

/// Everything except range and weather that a scenario line needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSetup {
    pub geometry: GeometryInputs,
    pub background: RadiationBackground,
    pub radar_protocol: Protocol,
    pub atmosphere: AtmosphereModel,
    pub eta_det: f64,
    pub eta_idler: f64,
    pub signal: SignalModel,
    pub p_err: f64,
    pub undetectable_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPoint {
    pub range_km: f64,
    pub eta_atm: f64,
    pub eta_x: f64,
    pub eta_r: f64,
    pub eta_t: f64,
    pub eta_anc: f64,
    pub ratio: f64,
    pub rm: RmResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioLine {
    pub weather: Weather,
    pub protocol: Protocol,
    pub points: Vec<ScenarioPoint>,
}

/// Link budget and `R_M` at each range for one weather class.
pub fn scenario_line(
    ranges_km: &[f64],
    weather: Weather,
    setup: &ScenarioSetup,
) -> Result<ScenarioLine> {
    if ranges_km.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(
            "scenario ranges must be strictly increasing".into(),
        ));
    }
    let points = ranges_km
        .iter()
        .map(|&range_km| {
            let geometry = setup.geometry.at_range_km(range_km)?;
            let factors = LinkEfficiencies::from_geometry(
                &geometry,
                weather,
                &setup.atmosphere,
                setup.eta_det,
                setup.eta_idler,
            )?;
            let eta = factors.compose();
            let mut op = OperatingPoint::new(
                setup.radar_protocol,
                setup.signal,
                eta.eta_t,
                eta.eta_r,
                eta.eta_anc,
                setup.background,
            );
            op.p_err = setup.p_err;
            op.undetectable_threshold = setup.undetectable_threshold;
            Ok(ScenarioPoint {
                range_km,
                eta_atm: factors.eta_atm,
                eta_x: factors.eta_return,
                eta_r: eta.eta_r,
                eta_t: eta.eta_t,
                eta_anc: eta.eta_anc,
                ratio: eta.ratio,
                rm: op.rm()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioLine {
        weather,
        protocol: setup.radar_protocol,
        points,
    })
}

/// Ready-made sweeps and scenario set-ups reproducing the published study.
pub mod presets {
    use super::*;
    use crate::linkbudget::{
        DEFAULT_DETECTOR_AREA_M2, DEFAULT_DETECTOR_EFFICIENCY, DEFAULT_IDLER_EFFICIENCY,
        DEFAULT_RCS_M2,
    };

    /// Ranges spanned by the scenario lines, km.
    pub const SCENARIO_RANGES_KM: [f64; 8] = [25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0];
    /// Background total used by the efficiency-plane study.
    pub const REFERENCE_BACKGROUND_COUNTS: f64 = 1e4;
    /// Default signal for scenario lines: `mu = 1e-4` in 100 modes, `<N_S> = 0.01`.
    pub const SCENARIO_SIGNAL_MU: f64 = 1e-4;
    pub const SCENARIO_SIGNAL_MODES: u64 = 100;

    /// Single-photon operating point of the `<N_S>` vs `eta_R/eta_T` study:
    /// `mu = 1e-5`, `M = 100`, `eta_T = 1e-4`, ancilla efficiency 0.8.
    pub fn single_photon_point() -> OperatingPoint {
        let signal = SignalModel::new(1e-5, 100).expect("valid");
        OperatingPoint::new(
            Protocol::QiSinglePhoton,
            signal,
            1e-4,
            1e-4,
            0.8,
            RadiationBackground::solar_microwave(),
        )
    }

    /// `<N_S>` in [1e-4, 10] against `eta_R/eta_T` in [1e-8, 1].
    pub fn single_photon_grid(points: usize) -> SweepSpec {
        SweepSpec {
            x: Axis::log(Parameter::NSignal, 1e-4, 10.0, points),
            y: Axis::log(Parameter::Ratio, 1e-8, 1.0, points),
            fixed: single_photon_point(),
            output: OutputQuantity::Rm,
        }
    }

    /// Gaussian-state radar: `N_B` in [1, 1e8] against `eta_R/eta_T` in [1e-12, 1].
    pub fn gaussian_background_grid(points: usize) -> SweepSpec {
        let mut fixed = single_photon_point();
        fixed.radar_protocol = Protocol::QiGaussian;
        SweepSpec {
            x: Axis::log(Parameter::NBackground, 1.0, 1e8, points),
            y: Axis::log(Parameter::Ratio, 1e-12, 1.0, points),
            fixed,
            output: OutputQuantity::Rm,
        }
    }

    /// Gaussian-state radar in the `eta_T`-`eta_R` plane at `N_B = 1e4`.
    pub fn efficiency_plane(points: usize) -> SweepSpec {
        let mut fixed = single_photon_point();
        fixed.radar_protocol = Protocol::QiGaussian;
        fixed = fixed
            .with_parameter(Parameter::NBackground, REFERENCE_BACKGROUND_COUNTS)
            .expect("valid");
        SweepSpec {
            x: Axis::log(Parameter::EtaT, 1e-6, 1e-1, points),
            y: Axis::log(Parameter::EtaR, 1e-20, 1e-6, points),
            fixed,
            output: OutputQuantity::Rm,
        }
    }

    /// Link budget defaults: 2 m^2 RCS, 10 cm x 10 cm detector, `eta_det = 0.5`,
    /// idler efficiency 0.8, single-mode background of `N_B = 1e4`.
    pub fn scenario_setup(radar_protocol: Protocol) -> ScenarioSetup {
        ScenarioSetup {
            geometry: GeometryInputs::new(25e3, DEFAULT_RCS_M2, DEFAULT_DETECTOR_AREA_M2)
                .expect("valid"),
            background: RadiationBackground::solar_microwave()
                .with_total_counts(REFERENCE_BACKGROUND_COUNTS)
                .expect("valid"),
            radar_protocol,
            atmosphere: AtmosphereModel::default(),
            eta_det: DEFAULT_DETECTOR_EFFICIENCY,
            eta_idler: DEFAULT_IDLER_EFFICIENCY,
            signal: SignalModel::new(SCENARIO_SIGNAL_MU, SCENARIO_SIGNAL_MODES).expect("valid"),
            p_err: TWO_SIGMA_P_ERR,
            undetectable_threshold: DEFAULT_UNDETECTABLE_THRESHOLD,
        }
    }
}
