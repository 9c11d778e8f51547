use areawalk::closedform::{g_closed, g_partial_closed};
use areawalk::montecarlo::{
    chaining_check, estimate_argmin_prob, estimate_g, estimate_gn, estimate_partial_density,
    first_partial_density_check, functional_samples, ks_two_sample, GOptions, McConfig, OrderStatsPath,
    DEFAULT_WIDTH,
};

/// G_2(t) = P{X_1 >= t, 2 X_1 + X_2 >= 3t}
///        = int_t^{3t/2} e^{-x} e^{-(3t - 2x)} dx + e^{-3t/2}
///        = 2 e^{-3t/2} - e^{-2t}.
fn g2_oracle(t: f64) -> f64 {
    2.0 * (-1.5 * t).exp() - (-2.0 * t).exp()
}

/// Same quantity by midpoint quadrature of the joint density of (X_1, X_2)
/// over the survival region.
fn g2_quadrature(t: f64) -> f64 {
    let integrand = |x1: f64| (-x1).exp() * (-(3.0 * t - 2.0 * x1).max(0.0)).exp();
    let midpoint = |a: f64, b: f64| {
        let cells = 200_000;
        let h = (b - a) / cells as f64;
        (0..cells).map(|i| integrand(a + (i as f64 + 0.5) * h) * h).sum::<f64>()
    };
    // Split at the kink x1 = 3t/2.
    midpoint(t, 1.5 * t) + midpoint(1.5 * t, 40.0)
}

#[test]
fn two_step_survival_matches_double_integral() {
    let cfg = McConfig::new(400_000, 3);
    for t in [0.2, 0.5, 0.8] {
        assert!((g2_oracle(t) - g2_quadrature(t)).abs() < 1e-6);
        let est = estimate_gn(t, 2, &cfg).unwrap();
        assert!(est.within_sigmas(g2_oracle(t), 4.0), "t = {t}: {} vs {}", est.mean, g2_oracle(t));
    }
}

#[test]
fn one_step_survival_is_exponential() {
    let cfg = McConfig::new(200_000, 8);
    for t in [0.1, 0.5, 0.9] {
        assert!(estimate_gn(t, 1, &cfg).unwrap().within_sigmas((-t).exp(), 4.0));
    }
}

#[test]
fn survival_is_monotone_in_n_under_common_numbers() {
    let cfg = McConfig::new(50_000, 21);
    for t in [0.3, 0.6, 0.9] {
        let means: Vec<f64> = [1, 2, 3, 5, 10, 20, 40].iter().map(|&n| estimate_gn(t, n, &cfg).unwrap().mean).collect();
        assert!(means.windows(2).all(|w| w[1] <= w[0]), "t = {t}: {means:?}");
    }
}

#[test]
fn survival_is_monotone_in_t() {
    let cfg = McConfig::new(50_000, 5);
    let means: Vec<f64> = [0.1, 0.3, 0.5, 0.7].iter().map(|&t| estimate_gn(t, 10, &cfg).unwrap().mean).collect();
    assert!(means.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn estimates_do_not_depend_on_threads() {
    let one = McConfig::new(30_000, 77).with_threads(1);
    let three = one.with_threads(3);
    assert_eq!(
        estimate_g(0.4, &one, GOptions::default()).unwrap(),
        estimate_g(0.4, &three, GOptions::default()).unwrap()
    );
    assert_eq!(
        estimate_partial_density(5, 3, 0.3, DEFAULT_WIDTH, true, &one).unwrap(),
        estimate_partial_density(5, 3, 0.3, DEFAULT_WIDTH, true, &three).unwrap()
    );
}

#[test]
fn infinite_horizon_estimate_near_closed_form() {
    let cfg = McConfig::new(200_000, 12);
    for t in [0.2, 0.5] {
        let est = estimate_g(t, &cfg, GOptions::default()).unwrap();
        let g = g_closed(t).unwrap();
        assert!((est.mean - g).abs() <= (4.0 * est.stderr).max(0.005), "t = {t}: {}", est.mean);
        assert_eq!(est.param("horizon"), Some(areawalk::montecarlo::default_horizon(t) as f64));
    }
}

#[test]
fn argmin_two_steps_is_fair() {
    // Y_2 < Y_1 iff X_2 < X_1.
    let cfg = McConfig::new(200_000, 4);
    assert!(estimate_argmin_prob(2, 1, &cfg).unwrap().within_sigmas(0.5, 4.0));
    assert!(estimate_argmin_prob(2, 2, &cfg).unwrap().within_sigmas(0.5, 4.0));
}

#[test]
fn argmin_probabilities_sum_to_one() {
    let cfg = McConfig::new(20_000, 6);
    let total: f64 = (1..=5).map(|k| estimate_argmin_prob(5, k, &cfg).unwrap().mean).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn last_index_density_for_two_steps() {
    // argmin = 2 at level t: X_1 = x in [t, 3t/2], X_2 = 3t - 2x, Jacobian 3,
    // giving 3 (e^{-3t/2} - e^{-2t}).
    let cfg = McConfig::new(400_000, 9);
    let t: f64 = 0.5;
    let want = 3.0 * ((-1.5 * t).exp() - (-2.0 * t).exp());
    let est = estimate_partial_density(2, 2, t, DEFAULT_WIDTH, false, &cfg).unwrap();
    assert!((est.mean - want).abs() <= 4.0 * est.stderr + DEFAULT_WIDTH.powi(2), "{} vs {want}", est.mean);
}

#[test]
fn partial_density_exact_cases() {
    let cfg = McConfig::new(400_000, 10);
    for (n, k, t) in [(2, 1, 0.5), (3, 2, 0.4)] {
        let want = g_partial_closed(n, k, t, None).unwrap().value;
        for richardson in [false, true] {
            let est = estimate_partial_density(n, k, t, DEFAULT_WIDTH, richardson, &cfg).unwrap();
            assert!(
                (est.mean - want).abs() <= 4.0 * est.stderr + DEFAULT_WIDTH.powi(2),
                "n = {n}, k = {k}, richardson = {richardson}: {} vs {want}",
                est.mean
            );
        }
    }
}

#[test]
fn chaining_and_first_density_relations() {
    let cfg = McConfig::new(200_000, 31);
    assert!(chaining_check(4, 2, 0.4, DEFAULT_WIDTH, &cfg).unwrap().passes(3.0));
    assert!(chaining_check(4, 3, 0.5, DEFAULT_WIDTH, &cfg).unwrap().passes(3.0));
    assert!(first_partial_density_check(1, 0.5, DEFAULT_WIDTH, &cfg).unwrap().passes(3.0));
    assert!(first_partial_density_check(3, 0.4, DEFAULT_WIDTH, &cfg).unwrap().passes(3.0));
}

#[test]
fn orderstats_representations_share_a_distribution() {
    let cfg = McConfig::new(20_000, 13);
    let sorted = functional_samples(50, OrderStatsPath::Sorted, &cfg).unwrap();
    let spacings = functional_samples(50, OrderStatsPath::Spacings, &cfg).unwrap();
    let ks = ks_two_sample(&sorted, &spacings, 0.01);
    assert!(!ks.reject, "KS {} vs critical {}", ks.statistic, ks.critical);
    // The functional for n = 2 is visibly different from n = 50.
    let small = functional_samples(2, OrderStatsPath::Sorted, &cfg).unwrap();
    assert!(ks_two_sample(&sorted, &small, 0.01).reject);
}

#[test]
fn estimate_serializes_with_metadata() {
    let est = estimate_gn(0.5, 3, &McConfig::new(1000, 2)).unwrap();
    let json = serde_json::to_value(&est).unwrap();
    assert_eq!(json["estimator"], "Gn");
    assert_eq!(json["params"]["n"], 3.0);
    assert_eq!(json["samples"], 1000);
    assert_eq!(json["seed"], 2);
}
