//! Built-in validation run: every acceptance criterion plus a few extra
//! consistency checks, each against an independent reference computation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qrwr_reference::{erfc_quadrature, log_log_slope, p_err_quadrature, rel};

use crate::background::{planck_occupancy, RadiationBackground, VarianceModel};
use crate::background::{MICROWAVE_REFERENCE_HZ, OPTICAL_REFERENCE_HZ, SOLAR_TEMPERATURE_K};
use crate::detection::{
    error_probability, required_snr, required_trials, rm_ratio, DetectionInputs, Protocol,
    RmInputs, SignalModel, TWO_SIGMA_P_ERR,
};
use crate::linkbudget::{
    aperture_fraction, geometric_return, AtmosphereModel, GeometryInputs, LinkEfficiencies,
    Weather, DEFAULT_DETECTOR_AREA_M2, DEFAULT_DETECTOR_EFFICIENCY, DEFAULT_RCS_M2,
};
use crate::mc::{validate_erfc, McConfig, ThresholdRule};
use crate::sweep::{contour_rm_unity, presets, scenario_line, sweep_grid, CONTOUR_TOLERANCE_LOG10};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckOptions {
    pub seed: u64,
    /// Shots per SNR value in the Monte Carlo check.
    pub mc_shots: u64,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            mc_shots: 100_000,
        }
    }
}

type Check = fn(&SelfcheckOptions) -> Result<(bool, String)>;

const CHECKS: [(&str, &str, Check); 14] = [
    ("1", "geometric return", geometric),
    ("2", "atmosphere anchors", anchors),
    ("3", "aperture fraction", aperture),
    ("4", "link-budget ratio span", ratio_span),
    ("5", "background magnitude", background),
    ("6", "erfc pipeline", erfc_pipeline),
    ("7", "gaussian-state scenario regime", gaussian_scenario),
    ("8", "single-photon scenario regime", single_photon_scenario),
    ("9", "quadratic cost law", quadratic_cost),
    ("10", "monte carlo vs erfc", monte_carlo),
    (
        "11",
        "detector-efficiency invariance and symmetry",
        invariance,
    ),
    ("x1", "erfc accuracy on [0, 10]", erfc_accuracy),
    (
        "x2",
        "contour points re-evaluate to R_M = 1",
        contour_accuracy,
    ),
    ("x3", "transposed sweep", transpose),
];

pub fn run(opts: &SelfcheckOptions) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(id, name, check)| {
            let (passed, detail) = check(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome {
                id: id.to_string(),
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect()
}

fn scenario_factors(weather: Weather, range_km: f64) -> Result<LinkEfficiencies> {
    let geometry = GeometryInputs::new(range_km * 1e3, DEFAULT_RCS_M2, DEFAULT_DETECTOR_AREA_M2)?;
    LinkEfficiencies::from_geometry(
        &geometry,
        weather,
        &AtmosphereModel::default(),
        DEFAULT_DETECTOR_EFFICIENCY,
        1.0,
    )
}

fn geometric(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let near = geometric_return(2.0, 25e3)?;
    let far = geometric_return(2.0, 200e3)?;
    let ok = (near - 2.546e-10).abs() < 5e-14
        && (far - 3.979e-12).abs() < 5e-16
        && rel(near, 2.5e-10) < 0.02
        && rel(far, 4.0e-12) < 0.02;
    Ok((
        ok,
        format!("eta_X(25 km) = {near:.4e}, eta_X(200 km) = {far:.4e}"),
    ))
}

fn anchors(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let m = AtmosphereModel::default();
    let got = [
        m.transmission(25.0, Weather::Good)?,
        m.transmission(200.0, Weather::Good)?,
        m.transmission(25.0, Weather::Bad)?,
        m.transmission(200.0, Weather::Bad)?,
    ];
    Ok((
        got == [0.98, 0.82, 0.50, 0.004],
        format!("good {} / {}, bad {} / {}", got[0], got[1], got[2], got[3]),
    ))
}

fn aperture(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let a = aperture_fraction(0.01, 2.0)?;
    Ok((a == 0.005, format!("eta_DA = {a}")))
}

fn ratio_span(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for w in Weather::ALL {
        for &km in &presets::SCENARIO_RANGES_KM {
            let r = scenario_factors(w, km)?.compose().ratio;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let within3 = |v: f64, target: f64| v / target < 3.0 && target / v < 3.0;
    let ok = within3(hi, 5e-8) && within3(lo, 3e-12);
    Ok((ok, format!("eta_R/eta_T in [{lo:.3e}, {hi:.3e}]")))
}

fn background(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let mw = planck_occupancy(MICROWAVE_REFERENCE_HZ, SOLAR_TEMPERATURE_K)?;
    let opt = planck_occupancy(OPTICAL_REFERENCE_HZ, SOLAR_TEMPERATURE_K)?;
    let ratio = mw / opt;
    let ok = (1e4..=2e4).contains(&mw) && (1e5..=1e7).contains(&ratio);
    Ok((
        ok,
        format!("mu_B(10 GHz) = {mw:.4e}, microwave/optical = {ratio:.3e}"),
    ))
}

fn erfc_pipeline(opts: &SelfcheckOptions) -> Result<(bool, String)> {
    let p8 = error_probability(8.0)?;
    let p8_ok = (p8 - p_err_quadrature(8.0)).abs() < 1e-6 && (p8 - 0.078649).abs() < 1e-6;
    let s = required_snr(TWO_SIGMA_P_ERR)?;
    let s_ok = (s - 11.38).abs() <= 0.02;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = 10f64.powf(rng.random_range(-9.0..0.5f64.log10()));
        let p = p.min(0.5 - 1e-9);
        worst = worst.max(rel(error_probability(required_snr(p)?)?, p));
    }
    let rt_ok = worst < 1e-8;
    Ok((
        p8_ok && s_ok && rt_ok,
        format!(
            "p(8) = {p8:.8} [{}]; required_snr(0.0455) = {s:.5} vs 11.38 +- 0.02 [{}]; round-trip worst {worst:.1e} [{}]",
            flag(p8_ok),
            flag(s_ok),
            flag(rt_ok)
        ),
    ))
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn scenario_rms(protocol: Protocol) -> Result<Vec<f64>> {
    let setup = presets::scenario_setup(protocol);
    let mut out = Vec::new();
    for w in Weather::ALL {
        let line = scenario_line(&presets::SCENARIO_RANGES_KM, w, &setup)?;
        out.extend(line.points.iter().map(|p| p.rm.rm));
    }
    Ok(out)
}

fn extent(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

fn gaussian_scenario(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let rms = scenario_rms(Protocol::QiGaussian)?;
    let (lo, hi) = extent(&rms);
    Ok((
        lo > 1.0,
        format!("{} points, R_M in [{lo:.3e}, {hi:.3e}]", rms.len()),
    ))
}

fn single_photon_scenario(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let rms = scenario_rms(Protocol::QiSinglePhoton)?;
    let (lo, hi) = extent(&rms);
    Ok((
        hi < 1e-3,
        format!("{} points, R_M in [{lo:.3e}, {hi:.3e}]", rms.len()),
    ))
}

fn quadratic_cost(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let signal = SignalModel::new(1e-3, 100)?;
    let (eta_r, eta_anc) = (1e-5, 0.4);
    let inputs = DetectionInputs::new(eta_r * eta_anc, eta_r, eta_anc, signal, 1e4);
    let mut kt = Vec::new();
    let mut kr = Vec::new();
    for i in 0..=50 {
        let p = 10f64.powf(-6.0 + 5.0 * i as f64 / 50.0);
        kt.push(required_trials(Protocol::TargetDirect, p, &inputs)?);
        kr.push(required_trials(Protocol::QiGaussian, p, &inputs)?);
    }
    let slope = log_log_slope(&kr, &kt);
    Ok(((slope - 2.0).abs() <= 0.01, format!("slope {slope:.6}")))
}

fn monte_carlo(opts: &SelfcheckOptions) -> Result<(bool, String)> {
    let cfg = McConfig {
        seed: opts.seed,
        shots: opts.mc_shots,
        trials_per_shot: 100,
        signal: SignalModel::new(0.0, 1)?,
        background: RadiationBackground::solar_microwave()
            .with_occupancy(1e4)?
            .with_variance_model(VarianceModel::Poisson),
        eta_signal: 1.0,
        eta_ancilla: 1.0,
        threshold_rule: ThresholdRule::Midpoint,
    };
    let grid = [1.0, 4.0, 8.0, 16.0];
    let first = validate_erfc(&grid, &cfg)?;
    let again = validate_erfc(&grid, &cfg)?;
    let within = first.iter().all(|r| r.z_score.abs() < 4.0);
    let zs: Vec<String> = first.iter().map(|r| format!("{:.2}", r.z_score)).collect();
    Ok((
        within && first == again,
        format!(
            "z = [{}] at {} shots, deterministic: {}",
            zs.join(", "),
            cfg.shots,
            first == again
        ),
    ))
}

fn invariance(opts: &SelfcheckOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x11);
    let mut worst_scale = 0.0f64;
    let mut worst_sym = 0.0f64;
    for _ in 0..500 {
        let log = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
        let factors = LinkEfficiencies::new(
            log(&mut rng, -3.0, 0.0),
            DEFAULT_DETECTOR_EFFICIENCY,
            log(&mut rng, -4.0, 0.0),
            log(&mut rng, -14.0, -6.0),
            rng.random_range(0.1..1.0),
        )?;
        let scale = rng.random_range(1e-3..=1.0);
        let signal = SignalModel::new(log(&mut rng, -6.0, 0.0), rng.random_range(1..500))?;
        let var_bg = log(&mut rng, 0.0, 10.0);
        for protocol in [Protocol::QiSinglePhoton, Protocol::QiGaussian] {
            let rm = |f: &LinkEfficiencies| -> Result<f64> {
                let c = f.compose();
                Ok(rm_ratio(&RmInputs::shared(
                    protocol,
                    TWO_SIGMA_P_ERR,
                    c.eta_t,
                    c.eta_r,
                    c.eta_anc,
                    signal,
                    var_bg,
                ))?
                .rm)
            };
            let base = rm(&factors)?;
            worst_scale = worst_scale.max(rel(rm(&factors.with_scaled_detector(scale)?)?, base));
        }
        let eta = factors.compose().eta_t;
        let mut sym = RmInputs::shared(
            Protocol::TargetDirect,
            TWO_SIGMA_P_ERR,
            eta,
            eta,
            1.0,
            signal,
            var_bg,
        );
        sym.p_err = log(&mut rng, -6.0, -1.0);
        worst_sym = worst_sym.max(rel(rm_ratio(&sym)?.rm, 1.0));
    }
    Ok((
        worst_scale < 1e-10 && worst_sym < 1e-10,
        format!("worst relative change {worst_scale:.1e}, symmetric |rm - 1| {worst_sym:.1e}"),
    ))
}

fn erfc_accuracy(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 0..=400 {
        let x = i as f64 * 0.025;
        let snr = 8.0 * x * x;
        worst = worst.max(rel(2.0 * error_probability(snr)?, erfc_quadrature(x)));
    }
    Ok((worst < 1e-13, format!("worst relative error {worst:.1e}")))
}

fn contour_accuracy(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for spec in [
        presets::single_photon_grid(21),
        presets::gaussian_background_grid(21),
        presets::efficiency_plane(21),
    ] {
        for (x, y) in contour_rm_unity(&spec)?.points() {
            let point = spec
                .fixed
                .with_parameter(spec.x.parameter, x)?
                .with_parameter(spec.y.parameter, y)?;
            worst = worst.max(point.rm()?.rm.log10().abs());
            count += 1;
        }
    }
    Ok((
        count > 0 && worst < CONTOUR_TOLERANCE_LOG10,
        format!("{count} points, worst |log10 R_M| {worst:.1e}"),
    ))
}

fn transpose(_: &SelfcheckOptions) -> Result<(bool, String)> {
    let spec = presets::single_photon_grid(9);
    let a = sweep_grid(&spec)?;
    let b = sweep_grid(&spec.transposed())?;
    let ok =
        (0..a.x_values.len()).all(|i| (0..a.y_values.len()).all(|j| a.get(i, j) == b.get(j, i)));
    Ok((
        ok,
        format!("{}x{} grid", a.x_values.len(), a.y_values.len()),
    ))
}
