use proptest::prelude::*;
use stormfreq_core::stattests::{ks_distance, rank_correlation_t};
use stormfreq_core::{aic, fit_mle, ks_statistic, runs_test, spearman_rho, stationarity_t_test, Family, Sampler};

fn gumbel_draws(s: &mut Sampler, n: usize, loc: f64, scale: f64) -> Vec<f64> {
    (0..n).map(|_| loc - scale * (-s.uniform_open().ln()).ln()).collect()
}

/// Rank by counting, ties averaged, then textbook Pearson.
fn brute_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx).powi(2);
        syy += (ry[i] - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

#[test]
fn spearman_matches_brute_force() {
    let mut s = Sampler::new(31);
    for _ in 0..200 {
        let xs: Vec<f64> = (0..20).map(|_| (s.uniform_open() * 8.0).floor()).collect();
        let ys: Vec<f64> = (0..20).map(|_| s.uniform_open()).collect();
        let rho = spearman_rho(&xs, &ys).unwrap();
        assert!((rho - brute_spearman(&xs, &ys)).abs() < 1e-12);
    }
}

#[test]
fn rank_correlation_just_below_critical() {
    // Build a permutation of 1..=40 with sum of squared rank differences 7356,
    // i.e. rho = 1 - 6*7356/(40*1599) ~ 0.31.
    let n = 40usize;
    let mut perm: Vec<usize> = (1..=n).collect();
    let d2 = |p: &[usize]| -> i64 { p.iter().enumerate().map(|(i, &r)| (i as i64 + 1 - r as i64).pow(2)).sum() };
    let mut s = Sampler::new(7);
    while d2(&perm) != 7356 {
        let i = (s.uniform_open() * n as f64) as usize;
        let j = (s.uniform_open() * n as f64) as usize;
        let before = (d2(&perm) - 7356).abs();
        perm.swap(i, j);
        if (d2(&perm) - 7356).abs() > before {
            perm.swap(i, j);
        }
    }
    // year order 1..=40, values ranked by `perm`
    let values: Vec<f64> = perm.iter().map(|&r| 500.0 + r as f64).collect();
    let verdict = stationarity_t_test(&values, 0.05).unwrap();
    let years: Vec<f64> = (1..=40).map(|y| y as f64).collect();
    let rho = spearman_rho(&years, &values).unwrap();
    assert!((rho - (1.0 - 6.0 * 7356.0 / (40.0 * 1599.0))).abs() < 1e-12);
    assert!((rank_correlation_t(rho, 40) - 2.010).abs() < 1e-3, "{}", verdict.statistic);
    assert!((verdict.statistic.abs() - 2.010).abs() < 1e-3);
    assert!(verdict.passed);
    assert!((verdict.critical_value - 2.024).abs() < 5e-4);
}

#[test]
fn monotone_series_has_infinite_statistic() {
    let values: Vec<f64> = (0..40).map(|i| 500.0 + i as f64).collect();
    let verdict = stationarity_t_test(&values, 0.05).unwrap();
    assert!(verdict.is_infinite());
    assert!(!verdict.passed);
}

/// Exact null probability that |z| >= critical for a balanced split, by
/// enumerating the run-count distribution.
fn exact_runs_size(half: u64, critical: f64) -> f64 {
    fn choose(n: u64, k: u64) -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
    let (n1, n2) = (half, half);
    let n = (n1 + n2) as f64;
    let total = choose(n1 + n2, n1);
    let mean = 2.0 * (n1 * n2) as f64 / n + 1.0;
    let nn = (n1 * n2) as f64;
    let sd = (2.0 * nn * (2.0 * nn - n) / (n * n * (n - 1.0))).sqrt();
    (2..=n1 + n2)
        .map(|r| {
            let p = if r % 2 == 0 {
                let k = r / 2;
                2.0 * choose(n1 - 1, k - 1) * choose(n2 - 1, k - 1) / total
            } else {
                let k = (r - 1) / 2;
                (choose(n1 - 1, k) * choose(n2 - 1, k - 1) + choose(n1 - 1, k - 1) * choose(n2 - 1, k)) / total
            };
            if ((r as f64 - mean) / sd).abs() >= critical { p } else { 0.0 }
        })
        .sum()
}

#[test]
fn runs_test_rejection_rate_near_nominal() {
    let exact = exact_runs_size(20, 1.959_963_984_540_054);
    assert!((exact - 0.05).abs() <= 0.02, "{exact}");

    let trials = 20_000;
    let mut s = Sampler::new(2000);
    let mut rejected = 0;
    for _ in 0..trials {
        let values: Vec<f64> = (0..40).map(|_| s.uniform_open()).collect();
        if !runs_test(&values, 0.05).unwrap().passed {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / trials as f64;
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((rate - 0.05).abs() <= 0.02, "{rate}");
    assert!((rate - exact).abs() < 4.0 * se, "{rate} vs exact {exact}");
}

#[test]
fn ks_accepts_fitted_gumbel_samples() {
    let mut s = Sampler::new(1000);
    let mut accepted = 0;
    for _ in 0..1000 {
        let sample = gumbel_draws(&mut s, 40, 600.0, 50.0);
        let fit = fit_mle(&sample, Family::Gumbel).unwrap();
        let verdict = ks_statistic(&sample, &fit, 0.05).unwrap();
        assert!((verdict.critical_value - 0.210).abs() < 5e-4);
        if verdict.statistic <= 0.210 {
            accepted += 1;
        }
    }
    assert!(accepted >= 990, "{accepted}");
}

#[test]
fn aic_prefers_gumbel_for_gumbel_data() {
    let mut s = Sampler::new(500);
    let mut wins = [0usize; 4];
    for _ in 0..500 {
        let sample = gumbel_draws(&mut s, 40, 600.0, 60.0);
        let best = Family::ALL
            .iter()
            .filter_map(|&f| fit_mle(&sample, f).ok().filter(|fit| fit.converged).map(|fit| (f, aic(&fit, &sample).unwrap().value)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        wins[best.0.index()] += 1;
    }
    assert!(wins[Family::Gumbel.index()] > 250, "{wins:?}");
}

#[test]
fn aic_difference_tracks_likelihood() {
    let mut s = Sampler::new(12);
    let sample = gumbel_draws(&mut s, 40, 600.0, 60.0);
    let fits: Vec<_> = Family::ALL.iter().map(|&f| fit_mle(&sample, f).unwrap()).collect();
    for a in &fits {
        for b in &fits {
            let diff = aic(a, &sample).unwrap().value - aic(b, &sample).unwrap().value;
            let expected = -2.0 * (a.log_likelihood - b.log_likelihood);
            assert!((diff - expected).abs() < 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn rank_tests_ignore_monotone_transforms(seed in 0u64..100_000) {
        let mut s = Sampler::new(seed);
        let values = gumbel_draws(&mut s, 40, 600.0, 50.0);
        let warped: Vec<f64> = values.iter().map(|v| (v / 100.0).exp() + v.powi(3)).collect();
        let a = stationarity_t_test(&values, 0.05).unwrap();
        let b = stationarity_t_test(&warped, 0.05).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        let a = runs_test(&values, 0.05).unwrap();
        let b = runs_test(&warped, 0.05).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert_eq!(a.passed, b.passed);
    }

    #[test]
    fn ks_distance_bounded_and_stable(seed in 0u64..100_000, extra in 300.0f64..900.0) {
        let mut s = Sampler::new(seed);
        let sample = gumbel_draws(&mut s, 40, 600.0, 50.0);
        let fit = fit_mle(&sample, Family::Gumbel).unwrap();
        let d = ks_distance(&sample, &fit).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let mut grown = sample.clone();
        grown.push(extra);
        let d2 = ks_distance(&grown, &fit).unwrap();
        prop_assert!((d2 - d).abs() <= 1.0 / 40.0 + 1e-12);
    }
}
