use proptest::prelude::*;
use qrwr_core::background::{RadiationBackground, VarianceModel};
use qrwr_core::detection::{
    error_probability, required_snr, required_trials, rm_background_correction, rm_ratio, snr_gs,
    snr_sp, snr_target, DetectionInputs, Protocol, Regime, RmInputs, SignalModel, SnrForm,
    TWO_SIGMA_P_ERR,
};
use qrwr_core::linkbudget::{AtmosphereModel, GeometryInputs, LinkEfficiencies, Weather};
use qrwr_core::Error;
use qrwr_reference::{log_log_slope, p_err_quadrature, rel};

fn signal() -> impl Strategy<Value = SignalModel> {
    (-6.0f64..1.0, 1u64..500).prop_map(|(lmu, m)| SignalModel::new(10f64.powf(lmu), m).unwrap())
}

proptest! {
    #[test]
    fn snr_scale_laws(
        k in 1.0f64..1e8,
        eta_t in 1e-8f64..1.0,
        eta_r in 1e-14f64..1.0,
        eta_anc in 1e-3f64..1.0,
        s in signal(),
        var_bg in 1e-2f64..1e10,
        exact in any::<bool>(),
    ) {
        let form = if exact { SnrForm::Exact } else { SnrForm::Approximate };
        let vs = eta_t * s.total();
        let t = |k: f64| snr_target(k, eta_t, &s, vs, var_bg, form).unwrap();
        let sp = |k: f64| snr_sp(k, eta_r, eta_anc, &s, var_bg).unwrap();
        let gs = |k: f64| snr_gs(k, eta_r, eta_anc, &s, var_bg).unwrap();
        prop_assert!(rel(t(4.0 * k), 2.0 * t(k)) < 1e-14);
        prop_assert!(rel(sp(4.0 * k), 2.0 * sp(k)) < 1e-14);
        prop_assert!(rel(gs(2.0 * k), 2.0 * gs(k)) < 1e-14);
    }

    #[test]
    fn perr_roundtrip(lp in -9.0f64..-0.302) {
        let p = 10f64.powf(lp).min(0.5 - 1e-9);
        prop_assert!(rel(error_probability(required_snr(p).unwrap()).unwrap(), p) < 1e-8);
    }

    #[test]
    fn trials_roundtrip(
        eta_t in 1e-6f64..1.0,
        eta_r in 1e-10f64..1.0,
        eta_anc in 1e-2f64..1.0,
        s in signal(),
        var_bg in 1.0f64..1e9,
        lp in -8.0f64..-0.5,
    ) {
        let p = 10f64.powf(lp);
        let inputs = DetectionInputs::new(eta_t, eta_r, eta_anc, s, var_bg);
        for proto in [Protocol::TargetDirect, Protocol::QiSinglePhoton, Protocol::QiGaussian] {
            let k = required_trials(proto, p, &inputs).unwrap();
            let back = error_probability(inputs.snr(proto, k).unwrap()).unwrap();
            prop_assert!(rel(back, p) < 1e-8, "{proto}: {back} vs {p}");
        }
    }

    #[test]
    fn detector_efficiency_invariance(
        atm in 1e-3f64..1.0,
        ap in 1e-4f64..1.0,
        ret in 1e-14f64..1e-6,
        idler in 0.1f64..1.0,
        scale in 1e-3f64..=1.0,
        mu_b in 1.0f64..1e5,
    ) {
        let bg = RadiationBackground::solar_microwave().with_occupancy(mu_b).unwrap();
        let s = SignalModel::new(1e-3, 100).unwrap();
        let base = LinkEfficiencies::new(atm, 0.5, ap, ret, idler).unwrap();
        for proto in [Protocol::QiSinglePhoton, Protocol::QiGaussian] {
            let rm = |f: &LinkEfficiencies| {
                let c = f.compose();
                rm_ratio(&RmInputs::shared(proto, TWO_SIGMA_P_ERR, c.eta_t, c.eta_r, c.eta_anc, s, bg.variance()))
                    .unwrap()
                    .rm
            };
            let a = rm(&base);
            let b = rm(&base.with_scaled_detector(scale).unwrap());
            prop_assert!(rel(b, a) < 1e-10, "{proto}: {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_sides_give_unity(
        eta in 1e-8f64..1.0,
        s in signal(),
        var_bg in 1e-2f64..1e10,
        lp in -6.0f64..-1.0,
    ) {
        let mut inputs = RmInputs::shared(Protocol::TargetDirect, 10f64.powf(lp), eta, eta, 1.0, s, var_bg);
        inputs.radar_protocol = Protocol::TargetDirect;
        let r = rm_ratio(&inputs).unwrap();
        prop_assert!(rel(r.rm, 1.0) < 1e-10);
        prop_assert_eq!(r.regime, Regime::RadarAdvantage);
    }
}

#[test]
fn perr_matches_quadrature_on_grid() {
    for i in 0..=200 {
        let snr = 0.25 * i as f64;
        let p = error_probability(snr).unwrap();
        assert!(rel(p, p_err_quadrature(snr)) < 1e-10, "snr {snr}");
    }
}

#[test]
fn quadratic_photon_cost() {
    let s = SignalModel::new(1e-3, 100).unwrap();
    let (eta_r, eta_anc) = (1e-5, 0.4);
    let inputs = DetectionInputs::new(eta_r * eta_anc, eta_r, eta_anc, s, 1e4);
    let (mut kt, mut kr) = (Vec::new(), Vec::new());
    for i in 0..=50 {
        let p = 10f64.powf(-6.0 + 5.0 * i as f64 / 50.0);
        kt.push(required_trials(Protocol::TargetDirect, p, &inputs).unwrap());
        kr.push(required_trials(Protocol::QiGaussian, p, &inputs).unwrap());
    }
    let slope = log_log_slope(&kr, &kt);
    assert!((slope - 2.0).abs() < 0.01, "{slope}");
}

#[test]
fn regime_boundaries() {
    assert_eq!(Regime::classify(1.0 - 1e-15, 1e6), Regime::QrwrAdvantage);
    assert_eq!(Regime::classify(1.0, 1e6), Regime::RadarAdvantage);
    assert_eq!(
        Regime::classify(1e6 * (1.0 - 1e-15), 1e6),
        Regime::RadarAdvantage
    );
    assert_eq!(Regime::classify(1e6, 1e6), Regime::PracticallyUndetectable);
    assert_eq!(
        Regime::classify(50.0, 10.0),
        Regime::PracticallyUndetectable
    );
}

#[test]
fn gaussian_background_scaling_high_occupancy() {
    let s = SignalModel::new(1e-3, 100).unwrap();
    for mu_b in [1e3, 1e4, 1e6] {
        let var = |mu: f64| {
            RadiationBackground::solar_microwave()
                .with_occupancy(mu)
                .unwrap()
                .variance()
        };
        let at = |v: f64| DetectionInputs::new(1e-4, 1e-9, 0.4, s, v);
        let (lo, hi) = (at(var(mu_b)), at(var(10.0 * mu_b)));
        let kr = required_trials(Protocol::QiGaussian, TWO_SIGMA_P_ERR, &hi).unwrap()
            / required_trials(Protocol::QiGaussian, TWO_SIGMA_P_ERR, &lo).unwrap();
        let kt = required_trials(Protocol::TargetDirect, TWO_SIGMA_P_ERR, &hi).unwrap()
            / required_trials(Protocol::TargetDirect, TWO_SIGMA_P_ERR, &lo).unwrap();
        let tol = 10.0 / mu_b;
        assert!(rel(kr, 10.0) < tol, "mu_b {mu_b}: K_R x{kr}");
        assert!(rel(kt, 100.0) < tol, "mu_b {mu_b}: K_T x{kt}");
    }
}

#[test]
fn background_correction_matches_recomputation() {
    let s = SignalModel::new(1e-4, 100).unwrap();
    let bg_t = RadiationBackground::new(300.0, 1e9, 10)
        .unwrap()
        .with_occupancy(3e3)
        .unwrap();
    let bg_r = bg_t
        .with_occupancy(20.0)
        .unwrap()
        .with_variance_model(VarianceModel::Poisson);
    let (vt, vr) = (bg_t.variance(), bg_r.variance());
    let shared = RmInputs::shared(
        Protocol::QiSinglePhoton,
        TWO_SIGMA_P_ERR,
        1e-4,
        1e-10,
        0.4,
        s,
        vr,
    );
    let rm_shared = rm_ratio(&shared).unwrap().rm;
    let mut split = shared;
    split.target.var_bg = vt;
    let direct = rm_ratio(&split).unwrap().rm;
    let corrected = rm_background_correction(rm_shared, vt, vr).unwrap();
    assert!(rel(corrected, direct) < 1e-10, "{corrected} vs {direct}");
    assert_eq!(rm_background_correction(2.5, 7.0, 7.0).unwrap(), 2.5);
    assert!(rel(rm_background_correction(2.5, 70.0, 7.0).unwrap(), 25.0) < 1e-15);
    assert!(matches!(
        rm_background_correction(1.0, 0.0, 1.0),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn single_photon_advantage_at_link_budgets() {
    let atm = AtmosphereModel::default();
    let s = SignalModel::new(1e-4, 100).unwrap();
    let var = RadiationBackground::solar_microwave()
        .with_occupancy(1e4)
        .unwrap()
        .variance();
    for w in Weather::ALL {
        for km in [25.0, 50.0, 100.0, 150.0, 200.0] {
            let g = GeometryInputs::new(km * 1e3, 2.0, 0.01).unwrap();
            let c = LinkEfficiencies::from_geometry(&g, w, &atm, 0.5, 0.8)
                .unwrap()
                .compose();
            let r = rm_ratio(&RmInputs::shared(
                Protocol::QiSinglePhoton,
                TWO_SIGMA_P_ERR,
                c.eta_t,
                c.eta_r,
                c.eta_anc,
                s,
                var,
            ))
            .unwrap();
            assert!(r.rm < 1e-3, "{w} {km} km: {}", r.rm);
            assert_eq!(r.regime, Regime::QrwrAdvantage);
            // closed form eta_R eta_anc / (eta_T^2 N_S)
            let closed = c.eta_r * c.eta_anc / (c.eta_t * c.eta_t * s.total());
            assert!(rel(r.rm, closed) < 1e-10);
        }
    }
}

#[test]
fn infeasible_and_singular() {
    let zero = SignalModel::new(0.0, 10).unwrap();
    let inputs = DetectionInputs::new(1e-3, 1e-3, 0.5, zero, 1e4);
    assert!(matches!(
        required_trials(Protocol::TargetDirect, 0.1, &inputs),
        Err(Error::Infeasible(_))
    ));
    let s = SignalModel::new(1e-3, 10).unwrap();
    assert!(matches!(
        snr_sp(1.0, 1e-3, 0.5, &s, 0.0),
        Err(Error::Singular(_))
    ));
    assert!(required_snr(0.5).is_err());
    assert!(required_snr(0.0).is_err());
    assert!(error_probability(-1.0).is_err());
}
