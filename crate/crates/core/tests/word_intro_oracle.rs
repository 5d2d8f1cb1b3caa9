//! Gap-curve estimators against brute-force enumeration and exact rational
//! arithmetic, plus the stability property of gamma under resampling.

mod common;

use common::{bag_of, brute_gap_sums, compositions};
use orgsift::corpus::{sample_user, ClassLabel, UserSample};
use orgsift::synth::{gen_user, GeneratorSpec};
use orgsift::word_intro::{
    fit_decay, gamma_feature, gap_curve_analytic, gap_curve_exhaustive, gap_curve_mc, Estimator, GammaConfig,
    GapCurve, TokenBag,
};
use rand::SeedableRng;

#[test]
fn exhaustive_equals_brute_force_for_all_small_bags() {
    let mut checked = 0;
    for n in 2..=8 {
        for freqs in compositions(n, 4) {
            let v = freqs.iter().filter(|&&f| f > 0).count();
            if v < 2 {
                continue;
            }
            let (words, ids) = bag_of(&freqs);
            let curve = gap_curve_exhaustive(&TokenBag::from_tokens(&words)).unwrap();
            let (sums, orderings) = brute_gap_sums(&ids, v);
            let want: Vec<f64> = sums.iter().map(|&s| s as f64 / orderings as f64).collect();
            assert_eq!(curve.m_bar, want, "{freqs:?}");
            checked += 1;
        }
    }
    assert!(checked > 300);
}

#[test]
fn small_worked_bags() {
    let curve = gap_curve_exhaustive(&TokenBag::from_tokens(&["a", "a", "b"])).unwrap();
    assert_eq!(curve.m_bar, vec![4.0 / 3.0]);
    let curve = gap_curve_exhaustive(&TokenBag::from_tokens(&["a", "b"])).unwrap();
    assert_eq!(curve.m_bar, vec![1.0]);
    let curve = gap_curve_analytic(&TokenBag::from_tokens(&["a", "a", "b"])).unwrap();
    assert_eq!(curve.m_bar, vec![2.0]);
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Expected introduction positions by exact integer comparison:
/// `E[U(k)] >= n  <=>  V C(N,k) - sum_w C(N - f_w, k) >= n C(N,k)`.
fn exact_analytic(freqs: &[usize]) -> Vec<f64> {
    let n_tok: u128 = freqs.iter().sum::<usize>() as u128;
    let v = freqs.len() as u128;
    let reach = |intro: u128| -> u128 {
        (0..=n_tok)
            .find(|&k| {
                let c = binom(n_tok, k);
                let missing: u128 = freqs.iter().map(|&f| binom(n_tok - f as u128, k)).sum();
                v * c - missing >= intro * c
            })
            .expect("E[U(N)] = V")
    };
    let ks: Vec<u128> = (1..=v).map(reach).collect();
    ks.windows(2).map(|w| (w[1] - w[0]) as f64).collect()
}

#[test]
fn analytic_matches_exact_rational_inversion() {
    for n in 2..=12 {
        for freqs in compositions(n, 4) {
            let nz: Vec<usize> = freqs.iter().copied().filter(|&f| f > 0).collect();
            if nz.len() < 2 {
                continue;
            }
            let (words, _) = bag_of(&freqs);
            let curve = gap_curve_analytic(&TokenBag::from_tokens(&words)).unwrap();
            assert_eq!(curve.m_bar, exact_analytic(&nz), "{freqs:?}");
        }
    }
}

#[test]
fn all_distinct_bags_give_unit_gaps_and_zero_gamma() {
    let words: Vec<String> = (0..30).map(|i| format!("t{i}")).collect();
    let bag = TokenBag::from_tokens(&words);
    for curve in [
        gap_curve_mc(&bag, 17, 3).unwrap(),
        gap_curve_analytic(&bag).unwrap(),
    ] {
        assert!(curve.m_bar.iter().all(|&m| m == 1.0));
        let fit = fit_decay(&curve);
        assert_eq!(fit.gamma, 0.0);
        assert!(!fit.degenerate);
    }
}

/// The band asked for between the two estimators does not hold: inverting
/// the expected type count at integer positions is a different quantity
/// from the expected gap, and on small bags they differ by far more than
/// 35%. The bag "a a b" alone gives 2 against 4/3.
#[test]
#[ignore = "analytic and permutation-mean curves differ by more than 35% on most small bags"]
fn analytic_within_35_percent_of_exhaustive() {
    for n in 2..=12 {
        for freqs in compositions(n, 4) {
            if freqs.iter().filter(|&&f| f > 0).count() < 2 {
                continue;
            }
            let (words, _) = bag_of(&freqs);
            let bag = TokenBag::from_tokens(&words);
            let ex = gap_curve_exhaustive(&bag).unwrap();
            let an = gap_curve_analytic(&bag).unwrap();
            for (e, a) in ex.m_bar.iter().zip(&an.m_bar) {
                assert!((a - e).abs() <= 0.35 * e, "{freqs:?}: {a} vs {e}");
            }
        }
    }
}

fn gap_variance(ids: &[u32], v: usize) -> Vec<f64> {
    // Second moments by brute force over all orderings.
    let n = ids.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s1 = vec![0f64; v - 1];
    let mut s2 = vec![0f64; v - 1];
    let mut count = 0f64;
    loop {
        let arranged: Vec<u32> = perm.iter().map(|&i| ids[i]).collect();
        let mut seen = vec![false; v];
        let mut order = Vec::new();
        for (p, &t) in arranged.iter().enumerate() {
            if !seen[t as usize] {
                seen[t as usize] = true;
                order.push(p);
            }
        }
        for i in 0..v - 1 {
            let g = (order[i + 1] - order[i]) as f64;
            s1[i] += g;
            s2[i] += g * g;
        }
        count += 1.0;
        // next lexicographic permutation of indices
        let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else { break };
        let j = perm.iter().rposition(|&x| x > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    s1.iter().zip(&s2).map(|(a, b)| b / count - (a / count).powi(2)).collect()
}

#[test]
fn monte_carlo_converges_within_standard_error() {
    let words = ["a", "a", "a", "b", "b", "c", "d", "a"];
    let bag = TokenBag::from_tokens(&words);
    let exact = gap_curve_exhaustive(&bag).unwrap();
    let ids: Vec<u32> = bag.token_ids().to_vec();
    let var = gap_variance(&ids, bag.types());
    for r in [50usize, 200, 800] {
        let one = gap_curve_mc(&bag, r, 11).unwrap();
        let two = gap_curve_mc(&bag, 2 * r, 11).unwrap();
        for i in 0..var.len() {
            let se = (var[i] / r as f64).sqrt();
            assert!((one.m_bar[i] - two.m_bar[i]).abs() <= 4.0 * se, "R={r} n={}", i + 1);
            assert!((two.m_bar[i] - exact.m_bar[i]).abs() <= 4.0 * se);
        }
    }
    // Same seed, same curve.
    assert_eq!(gap_curve_mc(&bag, 100, 5).unwrap(), gap_curve_mc(&bag, 100, 5).unwrap());
}

#[test]
fn power_law_exponents_are_recovered() {
    for gamma in [0.0, 1.0, 1.5] {
        let curve = GapCurve {
            m_bar: (1..=60).map(|n| 3.0 * (n as f64).powf(gamma)).collect(),
            estimator: Estimator::Analytic,
            replicates: 0,
        };
        let fit = fit_decay(&curve);
        assert!((fit.gamma - gamma).abs() < 1e-9, "{gamma}: {}", fit.gamma);
    }
}

fn resampled_gamma_std(class: ClassLabel, seed: u64) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let spec = GeneratorSpec::jittered(class, 2000, seed, &mut rng);
    let records = gen_user(&spec, "u");
    let gammas: Vec<f64> = (0..100)
        .map(|i| {
            let sample = sample_user(&records, 400, 1000 + i).unwrap();
            gamma_feature(&sample, &GammaConfig::default(), i).unwrap().gamma
        })
        .collect();
    let mean = gammas.iter().sum::<f64>() / gammas.len() as f64;
    (gammas.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gammas.len() as f64).sqrt()
}

#[test]
fn human_gamma_is_more_stable_than_spammer_gamma_under_resampling() {
    for seed in [0, 1] {
        let human = resampled_gamma_std(ClassLabel::Human, seed);
        let spammer = resampled_gamma_std(ClassLabel::Spammer, seed);
        assert!(human < spammer, "seed {seed}: human {human} spammer {spammer}");
    }
}

fn quartiles(mut xs: Vec<f64>) -> (f64, f64) {
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| xs[((xs.len() - 1) as f64 * p).round() as usize];
    (q(0.25), q(0.75))
}

#[test]
fn human_and_robot_gamma_interquartile_ranges_do_not_overlap() {
    let gammas = |class: ClassLabel| -> Vec<f64> {
        (0..20u64)
            .map(|seed| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let spec = GeneratorSpec::jittered(class, 400, seed, &mut rng);
                let texts = gen_user(&spec, "u").into_iter().map(|r| r.text).collect();
                gamma_feature(&UserSample::new("u", texts), &GammaConfig::default(), seed)
                    .unwrap()
                    .gamma
            })
            .collect()
    };
    let (h_lo, h_hi) = quartiles(gammas(ClassLabel::Human));
    let (r_lo, r_hi) = quartiles(gammas(ClassLabel::Robot));
    assert!(h_hi < r_lo || r_hi < h_lo, "human [{h_lo}, {h_hi}] robot [{r_lo}, {r_hi}]");
}

#[test]
fn repeated_identical_tweets_are_flagged() {
    let sample = UserSample::new("u", vec!["buy now".to_string(); 50]);
    let fit = gamma_feature(&sample, &GammaConfig::default(), 0).unwrap();
    assert!(fit.degenerate);
    assert_eq!(fit.gamma, 0.0);
}
