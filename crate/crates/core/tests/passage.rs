use proptest::prelude::*;
use wavebounds::montecarlo::{mc_exit_cdf, ExitMcConfig};
use wavebounds::passage::{exit_time_cdf, exit_time_density, hitting_time_cdf};
use wavebounds::quadrature::integrate;
use wavebounds::{Execution, ExitCorridor, HittingLevel, SeriesConfig};

fn hit(a: f64, t: f64) -> f64 {
    hitting_time_cdf(HittingLevel::new(a).unwrap(), t).unwrap()
}

#[test]
fn hitting_cdf_monotone_on_grid() {
    let levels: Vec<f64> = (0..20).map(|i| 0.05 + 0.25 * i as f64).collect();
    let times: Vec<f64> = (0..20).map(|j| 0.01 + 0.4 * j as f64).collect();
    for &a in &levels {
        for w in times.windows(2) {
            assert!(hit(a, w[1]) >= hit(a, w[0]));
        }
    }
    for &t in &times {
        for w in levels.windows(2) {
            assert!(hit(w[1], t) <= hit(w[0], t));
            assert_eq!(hit(-w[0], t), hit(w[0], t));
        }
    }
}

#[test]
fn exit_cdf_integrates_its_density() {
    let cfg = SeriesConfig::default();
    for (a, b) in [(-1.0, 1.0), (-0.3, 2.0), (-1.5, 0.4)] {
        let corridor = ExitCorridor::new(a, b).unwrap();
        let (x, y) = (corridor.center(), corridor.half_width());
        for t in [0.05, 0.3, 1.0, 3.0] {
            let lead = 1e-3_f64.min(t / 2.0);
            // Start the quadrature where the density is still negligible.
            let head = exit_time_cdf(corridor, lead, &cfg).unwrap();
            let body = integrate(
                |s| exit_time_density(s, x, y, &cfg).unwrap(),
                lead,
                t,
                1e-11,
                1 << 14,
            )
            .unwrap()
            .value;
            let cdf = exit_time_cdf(corridor, t, &cfg).unwrap();
            assert!((cdf - head - body).abs() <= 1e-8, "({a},{b}) t={t}: {cdf} vs {}", head + body);
            assert!(head < 1e-12 || lead == t / 2.0);
        }
    }
}

#[test]
fn exit_mc_is_reproducible_across_schedulers() {
    let corridor = ExitCorridor::new(-0.5, 0.8).unwrap();
    let mut cfg = ExitMcConfig {
        num_paths: 3000,
        step: 1e-3,
        seed: 4,
        bridge_correction: true,
        execution: Execution::Parallel,
    };
    let par = mc_exit_cdf(corridor, &[0.1, 0.5], &cfg).unwrap();
    cfg.execution = Execution::Sequential;
    assert_eq!(par, mc_exit_cdf(corridor, &[0.1, 0.5], &cfg).unwrap());
}

#[test]
fn exit_mc_matches_series_at_small_scale() {
    let corridor = ExitCorridor::new(-1.0, 0.5).unwrap();
    let cfg = ExitMcConfig {
        num_paths: 20_000,
        step: 1e-3,
        seed: 12,
        bridge_correction: true,
        execution: Execution::Parallel,
    };
    let horizons = [0.1, 0.4, 1.0];
    let est = mc_exit_cdf(corridor, &horizons, &cfg).unwrap();
    for (h, e) in horizons.iter().zip(est) {
        let exact = exit_time_cdf(corridor, *h, &SeriesConfig::default()).unwrap();
        assert!((e.value - exact).abs() < 4.0 * e.std_err, "t={h}: {} vs {exact}", e.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Reaching the nearer barrier means the corridor was left; leaving it
    // means one of the two barriers was reached.
    #[test]
    fn exit_is_bracketed_by_hitting_probabilities(a in -3.0f64..-0.05, b in 0.05f64..3.0, t in 0.02f64..6.0) {
        let corridor = ExitCorridor::new(a, b).unwrap();
        let exit = exit_time_cdf(corridor, t, &SeriesConfig::default()).unwrap();
        let near = hit((-a).min(b), t);
        let union = (hit(a, t) + hit(b, t)).min(1.0);
        prop_assert!(exit >= near - 1e-12, "{exit} < {near}");
        prop_assert!(exit <= union + 1e-12, "{exit} > {union}");
    }

    #[test]
    fn exit_cdf_is_monotone_in_time(a in -3.0f64..-0.05, b in 0.05f64..3.0, t in 0.02f64..6.0, dt in 0.0f64..2.0) {
        let corridor = ExitCorridor::new(a, b).unwrap();
        let cfg = SeriesConfig::default();
        let f0 = exit_time_cdf(corridor, t, &cfg).unwrap();
        let f1 = exit_time_cdf(corridor, t + dt, &cfg).unwrap();
        prop_assert!(f1 >= f0 - 1e-12);
    }
}
