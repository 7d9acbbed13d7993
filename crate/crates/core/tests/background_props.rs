use proptest::prelude::*;
use qrwr_core::background::{
    planck_log_occupancy, planck_occupancy, RadiationBackground, VarianceModel, BOLTZMANN_K,
    PLANCK_H,
};
use qrwr_core::mc::sample_background_counts;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn occupancy_monotone_on_grid() {
    let freqs = log_grid(1e9, 1e15, 61);
    let temps = log_grid(3.0, 1e4, 41);
    for &t in &temps {
        for w in freqs.windows(2) {
            let (a, b) = (
                planck_log_occupancy(w[0], t).unwrap(),
                planck_log_occupancy(w[1], t).unwrap(),
            );
            assert!(b < a, "not decreasing in frequency at T = {t}");
            let (pa, pb) = (
                planck_occupancy(w[0], t).unwrap(),
                planck_occupancy(w[1], t).unwrap(),
            );
            assert!(pb < pa || pa == 0.0);
        }
    }
    for &nu in &freqs {
        for w in temps.windows(2) {
            let (a, b) = (
                planck_log_occupancy(nu, w[0]).unwrap(),
                planck_log_occupancy(nu, w[1]).unwrap(),
            );
            assert!(b > a, "not increasing in temperature at nu = {nu}");
        }
    }
}

proptest! {
    #[test]
    fn rayleigh_jeans_limit(log_x in -12.0f64..-3.0, t in 3.0f64..1e4) {
        let x = 10f64.powf(log_x);
        let nu = x * BOLTZMANN_K * t / PLANCK_H;
        let mu = planck_occupancy(nu, t).unwrap();
        let rj = BOLTZMANN_K * t / (PLANCK_H * nu);
        prop_assert!(((mu - rj) / rj).abs() < 1e-3);
    }

    #[test]
    fn thermal_variance_dominates_poisson(mu in 0.0f64..1e6, modes in 1u64..1000) {
        let bg = RadiationBackground::new(300.0, 1e9, modes).unwrap().with_occupancy(mu).unwrap();
        let thermal = bg.with_variance_model(VarianceModel::ThermalMultimode).variance();
        let poisson = bg.with_variance_model(VarianceModel::Poisson).variance();
        prop_assert!(thermal >= poisson);
        prop_assert!(poisson == bg.counts());
        if mu > 0.0 {
            prop_assert!(thermal > poisson);
            prop_assert!(((thermal / poisson - 1.0) - mu).abs() <= 1e-12 * mu.max(1.0));
        }
    }
}

/// Batched sample variance: (overall estimate, standard error from batch spread).
fn batched_variance(samples: &[f64], batches: usize) -> (f64, f64) {
    let size = samples.len() / batches;
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let per: Vec<f64> = samples.chunks(size).take(batches).map(var).collect();
    let mean = per.iter().sum::<f64>() / batches as f64;
    let spread = per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var(samples), (spread / batches as f64).sqrt())
}

#[test]
fn geometric_oracle_matches_single_mode_thermal_variance() {
    // Bose-Einstein counts with mean 10 are geometric with p = 1 / 11.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let geo = Geometric::new(1.0 / 11.0).unwrap();
    let draws: Vec<f64> = (0..1_000_000)
        .map(|_| geo.sample(&mut rng) as f64)
        .collect();
    let (var, se) = batched_variance(&draws, 50);
    let bg = RadiationBackground::solar_microwave()
        .with_occupancy(10.0)
        .unwrap();
    assert_eq!(bg.variance(), 110.0);
    assert!((var - 110.0).abs() < 3.0 * se, "{var} +- {se}");
}

#[test]
fn summed_modes_match_multimode_variance() {
    // M_B = 100, mu_B = 100: summed independent geometric modes vs 1.01e6
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let geo = Geometric::new(1.0 / 101.0).unwrap();
    let draws: Vec<f64> = (0..40_000)
        .map(|_| (0..100).map(|_| geo.sample(&mut rng) as f64).sum())
        .collect();
    let (var, se) = batched_variance(&draws, 40);
    let bg = RadiationBackground::new(300.0, 1e9, 100)
        .unwrap()
        .with_occupancy(100.0)
        .unwrap();
    assert!(
        (var - bg.variance()).abs() < 3.0 * se,
        "{var} +- {se} vs {}",
        bg.variance()
    );
}

#[test]
fn engine_sampler_variance_converges() {
    for (model, mu, modes) in [
        (VarianceModel::ThermalMultimode, 10.0, 1),
        (VarianceModel::ThermalMultimode, 3.0, 20),
        (VarianceModel::Poisson, 50.0, 4),
    ] {
        let bg = RadiationBackground::new(300.0, 1e9, modes)
            .unwrap()
            .with_occupancy(mu)
            .unwrap()
            .with_variance_model(model);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let draws: Vec<f64> = (0..400_000)
            .map(|_| sample_background_counts(&bg, 1, &mut rng))
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let (var, se) = batched_variance(&draws, 40);
        assert!(
            (var - bg.variance()).abs() < 3.0 * se,
            "{model:?}: {var} +- {se} vs {}",
            bg.variance()
        );
        assert!((mean - bg.counts()).abs() < 5.0 * (bg.variance() / draws.len() as f64).sqrt());
    }
}
