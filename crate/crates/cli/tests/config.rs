use qrwr_cli::config::ScenarioConfig;
use qrwr_cli::CliError;
use qrwr_core::background::VarianceModel;
use qrwr_core::detection::Protocol;
use qrwr_core::linkbudget::Weather;
use qrwr_core::sweep::Parameter;

fn config_error(text: &str) -> String {
    match ScenarioConfig::parse(text) {
        Err(CliError::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn empty_file_gives_defaults() {
    let cfg = ScenarioConfig::parse("").unwrap();
    assert_eq!(cfg, ScenarioConfig::default());
    assert_eq!(cfg.link.eta_det, 0.5);
    assert_eq!(cfg.link.eta_idler, 0.8);
    assert_eq!(cfg.geometry.rcs_m2, 2.0);
    assert_eq!(cfg.geometry.detector_area_m2, 0.01);
    assert_eq!(cfg.background.temperature_k, 6273.0);
    assert_eq!(cfg.background.frequency_hz, 1e10);
    assert_eq!(cfg.background.variance, VarianceModel::ThermalMultimode);
    assert_eq!(cfg.detection.p_err, 0.0455);
    assert_eq!(cfg.detection.undetectable_threshold, 1e6);
    assert_eq!(cfg.atmosphere.good, vec![[25.0, 0.98], [200.0, 0.82]]);
    assert_eq!(cfg.atmosphere.bad, vec![[25.0, 0.5], [200.0, 0.004]]);
    assert_eq!(
        cfg.scenario.ranges_km,
        vec![25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0]
    );
    let eta = cfg.efficiencies().unwrap();
    assert!((eta.eta_t - 0.98 * 0.5 * 0.005).abs() < 1e-15);
}

#[test]
fn sections_parse() {
    let cfg = ScenarioConfig::parse(
        r#"
[background]
modes = 4
total_counts = 100.0
variance = "poisson"

[detection]
protocol = "sp"
weather = "bad"

[sweep]
x = { parameter = "n_b", min = 1, max = 1e8, points = 3 }
y = { parameter = "eta_r", min = 0, max = 1e-6, points = 4, scale = "linear" }
output = "snr_radar"
"#,
    )
    .unwrap();
    let bg = cfg.target_background().unwrap();
    assert_eq!(bg.occupancy(), 25.0);
    assert_eq!(bg.variance(), 100.0);
    assert_eq!(cfg.detection.protocol, Protocol::QiSinglePhoton);
    assert_eq!(cfg.detection.weather, Weather::Bad);
    assert_eq!(cfg.sweep.x.parameter, Parameter::NBackground);
    let long = ScenarioConfig::parse("[detection]\nprotocol = \"qi_gaussian\"\n").unwrap();
    assert_eq!(long.detection.protocol, Protocol::QiGaussian);
}

#[test]
fn duplicate_key_rejected_with_location() {
    let msg = config_error("[link]\neta_det = 0.5\neta_det = 0.6\n");
    assert!(
        msg.contains("line 3") && msg.contains("duplicate key"),
        "{msg}"
    );
    let msg = config_error("[link]\neta_det = 0.5\n[link]\neta_idler = 0.6\n");
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn unknown_keys_rejected() {
    let msg = config_error("[link]\neta_dett = 0.5\n");
    assert!(msg.contains("line 2") && msg.contains("eta_dett"), "{msg}");
    let msg = config_error("[links]\neta_det = 0.5\n");
    assert!(msg.contains("links"), "{msg}");
    let msg = config_error(
        "[sweep]\nx = { parameter = \"n_s\", min = 1, max = 2, points = 2, step = 1 }\n",
    );
    assert!(msg.contains("step"), "{msg}");
}

#[test]
fn type_and_value_errors() {
    let msg = config_error("[signal]\nmodes = \"many\"\n");
    assert!(msg.contains("line 2") && msg.contains("modes"), "{msg}");
    assert!(config_error("[link]\neta_det = 1.5\n").contains("[link]"));
    assert!(config_error("[signal]\nmu = -1\n").contains("[signal]"));
    assert!(config_error("[background]\nmodes = 0\n").contains("[background]"));
    assert!(
        config_error("[background]\noccupancy = 1\ntotal_counts = 2\n").contains("at most one")
    );
    assert!(config_error("[detection]\np_err = 0.7\n").contains("[detection]"));
    assert!(config_error("[detection]\nprotocol = \"radar\"\n").contains("protocol"));
    assert!(
        config_error("[atmosphere]\ngood = [[200, 0.8], [25, 0.9]]\n").contains("[atmosphere]")
    );
    assert!(config_error("[scenario]\nranges_km = [50, 25]\n").contains("[scenario]"));
    assert!(
        config_error("[sweep]\nx = { parameter = \"mu\", min = 2, max = 1, points = 2 }\n")
            .contains("[sweep]")
    );
    assert!(
        config_error("[sweep]\nx = { parameter = \"eta_x\", min = 1, max = 2, points = 2 }\n")
            .contains("eta_x")
    );
    assert!(config_error("[mc]\nshots = 0\n").contains("[mc]"));
}

#[test]
fn round_trip() {
    let texts = [
        "",
        "[background]\noccupancy = 1e4\n[radar_background]\nmodes = 3\nvariance = \"poisson\"\n[link]\neta_t = 1e-3\n",
        include_str!("data/sweep_sp.toml"),
        include_str!("data/scenario_gs.toml"),
    ];
    for text in texts {
        let cfg = ScenarioConfig::parse(text).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
    }
}

#[test]
fn hash_ignores_key_order_and_explicit_defaults() {
    let a = ScenarioConfig::parse("[link]\neta_det = 0.4\neta_idler = 0.7\n[signal]\nmu = 1e-3\n")
        .unwrap();
    let b =
        ScenarioConfig::parse("[signal]\nmu = 0.001\n\n[link]\neta_idler = 0.7\neta_det = 0.4\n")
            .unwrap();
    let c = ScenarioConfig::parse(
        "[signal]\nmu = 0.001\nmodes = 100\n[link]\neta_idler = 0.7\neta_det = 0.4\n",
    )
    .unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash(), c.hash());
    assert_ne!(a.hash(), ScenarioConfig::default().hash());
    assert_eq!(a.hash().len(), 64);
}
