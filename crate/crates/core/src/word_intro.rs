//! Word-introduction decay exponent.
//!
//! Shuffle a user's tokens, record the positions at which each word type
//! first appears and average the gaps between consecutive introductions.
//! The introduction rate `1 / m_bar[n]` decays roughly as `n^-gamma`; gamma
//! is estimated by least squares in log-log space over the last third of
//! introduction numbers.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::UserSample;
use crate::error::{Error, Result};
use crate::seed;
use crate::text_features::fold_char;

pub const DEFAULT_REPLICATES: usize = 100;

/// Case-folded word tokens of a text, interned by first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenBag {
    tokens: Vec<u32>,
    types: Vec<String>,
    freqs: Vec<usize>,
}

impl TokenBag {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> TokenBag {
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut types = Vec::new();
        let mut freqs = Vec::new();
        let mut ids = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref();
            let id = *index.entry(t).or_insert_with(|| {
                types.push(t.to_string());
                freqs.push(0);
                (types.len() - 1) as u32
            });
            freqs[id as usize] += 1;
            ids.push(id);
        }
        TokenBag {
            tokens: ids,
            types,
            freqs,
        }
    }

    /// Total tokens N.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Distinct types V.
    pub fn types(&self) -> usize {
        self.types.len()
    }

    pub fn type_freqs(&self) -> impl Iterator<Item = (&str, usize)> {
        self.types.iter().map(String::as_str).zip(self.freqs.iter().copied())
    }

    pub fn token_ids(&self) -> &[u32] {
        &self.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    #[default]
    MonteCarlo,
    Analytic,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::MonteCarlo => "mc",
            Estimator::Analytic => "analytic",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" | "monte_carlo" => Ok(Estimator::MonteCarlo),
            "analytic" => Ok(Estimator::Analytic),
            _ => Err(Error::InvalidArgument(format!("unknown gamma estimator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaConfig {
    pub estimator: Estimator,
    pub replicates: usize,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            estimator: Estimator::MonteCarlo,
            replicates: DEFAULT_REPLICATES,
        }
    }
}

/// Mean introduction gaps; `m_bar[i]` belongs to introduction number `n = i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCurve {
    pub m_bar: Vec<f64>,
    pub estimator: Estimator,
    /// Number of arrangements averaged (Monte Carlo only; 0 for analytic).
    pub replicates: usize,
}

impl GapCurve {
    /// `(n, m_bar, alpha)` rows, for plotting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "m_bar", "alpha"])?;
        for (i, m) in self.m_bar.iter().enumerate() {
            w.write_record([(i + 1).to_string(), m.to_string(), (1.0 / m).to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<gap curve>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub gamma: f64,
    pub intercept: f64,
    pub fit_range: (usize, usize),
    pub r_squared: f64,
    pub degenerate: bool,
}

impl DecayFit {
    fn degenerate(fit_range: (usize, usize)) -> Self {
        DecayFit {
            gamma: 0.0,
            intercept: 0.0,
            fit_range,
            r_squared: 0.0,
            degenerate: true,
        }
    }
}

fn is_strippable(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '…' | '“' | '”' | '‘' | '’' | '«' | '»' | '¿' | '¡' | '—' | '–' | '·'
        )
}

fn is_url(token: &str) -> bool {
    token.starts_with("http:") || token.starts_with("https:")
}

/// Normalize one whitespace-delimited word; `None` if nothing is left.
///
/// Leading `#` and `@` are kept so hashtags and mentions stay distinct from
/// plain words; URLs are kept verbatim.
pub fn normalize_token(raw: &str) -> Option<String> {
    let folded: String = raw.chars().map(fold_char).collect();
    if is_url(&folded) {
        return Some(folded);
    }
    let trimmed = folded.trim_end_matches(is_strippable);
    let start = trimmed
        .char_indices()
        .find(|&(_, c)| !is_strippable(c) || c == '#' || c == '@')
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    let token = &trimmed[start..];
    // A bare sigil is punctuation, not a tag.
    let token = if token.chars().all(|c| c == '#' || c == '@') {
        ""
    } else {
        token
    };
    (!token.is_empty()).then(|| token.to_string())
}

/// Concatenate the sample's tweets in order and split into word tokens.
pub fn tokenize(sample: &UserSample) -> Result<TokenBag> {
    let tokens: Vec<String> = sample
        .tweets
        .iter()
        .flat_map(|t| t.split_whitespace())
        .filter_map(normalize_token)
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptyText);
    }
    Ok(TokenBag::from_tokens(&tokens))
}

// Adds p_{n+1} - p_n for one arrangement into `sums`.
fn accumulate_gaps(arrangement: &[u32], types: usize, seen: &mut [bool], sums: &mut [u64]) {
    seen.iter_mut().for_each(|s| *s = false);
    let mut introduced = 0usize;
    let mut last = 0usize;
    for (pos, &t) in arrangement.iter().enumerate() {
        let seen_t = &mut seen[t as usize];
        if !*seen_t {
            *seen_t = true;
            if introduced > 0 {
                sums[introduced - 1] += (pos - last) as u64;
            }
            last = pos;
            introduced += 1;
            if introduced == types {
                break;
            }
        }
    }
}

fn check_vocab(bag: &TokenBag) -> Result<()> {
    if bag.types() < 2 {
        return Err(Error::DegenerateVocabulary { types: bag.types() });
    }
    Ok(())
}

/// Average gaps over `replicates` seeded shuffles. Replicate `r` is shuffled
/// with seed `rng_seed + r`, and gap sums are integers, so the curve is
/// identical however the replicates are scheduled.
pub fn gap_curve_mc(bag: &TokenBag, replicates: usize, rng_seed: u64) -> Result<GapCurve> {
    check_vocab(bag)?;
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be positive".into()));
    }
    let v = bag.types();
    let sums = (0..replicates)
        .into_par_iter()
        .fold(
            || (vec![0u64; v - 1], vec![false; v], bag.tokens.clone()),
            |(mut sums, mut seen, mut buf), r| {
                buf.copy_from_slice(&bag.tokens);
                let mut rng = seed::rng(rng_seed.wrapping_add(r as u64));
                buf.shuffle(&mut rng);
                accumulate_gaps(&buf, v, &mut seen, &mut sums);
                (sums, seen, buf)
            },
        )
        .map(|(sums, _, _)| sums)
        .reduce(
            || vec![0u64; v - 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(GapCurve {
        m_bar: sums.iter().map(|&s| s as f64 / replicates as f64).collect(),
        estimator: Estimator::MonteCarlo,
        replicates,
    })
}

/// Exact permutation mean by visiting every distinct arrangement of the bag
/// once. Distinct arrangements of a multiset are equally likely under a
/// uniform shuffle, so this equals the mean over all `N!` orderings.
/// Only practical for small bags.
pub fn gap_curve_exhaustive(bag: &TokenBag) -> Result<GapCurve> {
    check_vocab(bag)?;
    let v = bag.types();
    let mut arr = bag.tokens.clone();
    arr.sort_unstable();
    let mut sums = vec![0u64; v - 1];
    let mut seen = vec![false; v];
    let mut count = 0usize;
    loop {
        accumulate_gaps(&arr, v, &mut seen, &mut sums);
        count += 1;
        if !next_permutation(&mut arr) {
            break;
        }
    }
    Ok(GapCurve {
        m_bar: sums.iter().map(|&s| s as f64 / count as f64).collect(),
        estimator: Estimator::MonteCarlo,
        replicates: count,
    })
}

fn next_permutation(a: &mut [u32]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).expect("a[i+1] > a[i]");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Closed-form curve from the expected number of distinct types among the
/// first `k` tokens of a random arrangement,
/// `E[U(k)] = V - sum_w C(N - f_w, k) / C(N, k)`. The expected position of
/// the `n`-th introduction is taken as the first `k` with `E[U(k)] >= n`.
pub fn gap_curve_analytic(bag: &TokenBag) -> Result<GapCurve> {
    check_vocab(bag)?;
    let n_tokens = bag.len();
    let v = bag.types();

    // Types sharing a frequency share a hypergeometric term.
    let mut by_freq: Vec<(usize, usize)> = Vec::new();
    let mut freqs = bag.freqs.clone();
    freqs.sort_unstable();
    for f in freqs {
        match by_freq.last_mut() {
            Some((g, c)) if *g == f => *c += 1,
            _ => by_freq.push((f, 1)),
        }
    }

    // ln C(N-f, k) - ln C(N, k) accumulated term by term; None once zero.
    let mut log_ratio: Vec<Option<f64>> = vec![Some(0.0); by_freq.len()];
    let mut intro_at = Vec::with_capacity(v);
    let mut next = 1usize;
    const EPS: f64 = 1e-9;
    for k in 0..=n_tokens {
        let missing: f64 = by_freq
            .iter()
            .zip(&log_ratio)
            .filter_map(|(&(_, count), lr)| lr.map(|lr| count as f64 * lr.exp()))
            .sum();
        let expected = v as f64 - missing;
        while next <= v && expected >= next as f64 - EPS {
            intro_at.push(k);
            next += 1;
        }
        if next > v || k == n_tokens {
            break;
        }
        for (&(f, _), lr) in by_freq.iter().zip(log_ratio.iter_mut()) {
            if let Some(acc) = lr {
                let remaining = n_tokens - f;
                *lr = if k >= remaining {
                    None
                } else {
                    Some(*acc + ((remaining - k) as f64).ln() - ((n_tokens - k) as f64).ln())
                };
            }
        }
    }
    // E[U(N)] = V exactly, so every introduction is placed.
    debug_assert_eq!(intro_at.len(), v);
    let m_bar = intro_at
        .windows(2)
        .map(|w| (w[1] - w[0]).max(1) as f64)
        .collect();
    Ok(GapCurve {
        m_bar,
        estimator: Estimator::Analytic,
        replicates: 0,
    })
}

/// Default fit range: the top third of introduction numbers,
/// `[ceil(2(V-1)/3), V-1]` where `V - 1` is the curve length.
pub fn default_fit_range(curve_len: usize) -> (usize, usize) {
    ((2 * curve_len).div_ceil(3).max(1), curve_len)
}

pub fn fit_decay(curve: &GapCurve) -> DecayFit {
    fit_decay_range(curve, default_fit_range(curve.m_bar.len()))
}

/// OLS of `log10(1 / m_bar[n])` on `log10(n)` for `n` in the inclusive range;
/// `gamma = -slope`. Fewer than three points gives a degenerate fit.
pub fn fit_decay_range(curve: &GapCurve, (lo, hi): (usize, usize)) -> DecayFit {
    let lo = lo.max(1);
    let hi = hi.min(curve.m_bar.len());
    if hi < lo || hi - lo + 1 < 3 {
        return DecayFit::degenerate((lo, hi));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| ((n as f64).log10(), -curve.m_bar[n - 1].log10()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let gamma = -slope;
    // -0.0 prints oddly in reports.
    let gamma = if gamma == 0.0 { 0.0 } else { gamma };
    DecayFit {
        gamma,
        intercept,
        fit_range: (lo, hi),
        r_squared,
        degenerate: false,
    }
}

/// tokenize, build the gap curve, fit the tail. A vocabulary of fewer than
/// two types yields a degenerate fit rather than an error.
pub fn gamma_feature(sample: &UserSample, cfg: &GammaConfig, rng_seed: u64) -> Result<DecayFit> {
    let bag = tokenize(sample)?;
    let curve = match cfg.estimator {
        Estimator::MonteCarlo => gap_curve_mc(&bag, cfg.replicates, rng_seed),
        Estimator::Analytic => gap_curve_analytic(&bag),
    };
    match curve {
        Ok(c) => Ok(fit_decay(&c)),
        Err(Error::DegenerateVocabulary { .. }) => Ok(DecayFit::degenerate((1, 0))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bag(words: &str) -> TokenBag {
        let toks: Vec<&str> = words.split_whitespace().collect();
        TokenBag::from_tokens(&toks)
    }

    fn sample(tweets: &[&str]) -> UserSample {
        UserSample::new("u", tweets.iter().map(|s| s.to_string()).collect())
    }

    fn curve(m_bar: Vec<f64>) -> GapCurve {
        GapCurve {
            m_bar,
            estimator: Estimator::MonteCarlo,
            replicates: 1,
        }
    }

    #[test]
    fn tokenize_examples() {
        let b = tokenize(&sample(&["I love Twitter", "I love to spam"])).unwrap();
        assert_eq!((b.len(), b.types()), (7, 5));
        let types: Vec<&str> = b.type_freqs().map(|(t, _)| t).collect();
        assert_eq!(types, ["i", "love", "twitter", "to", "spam"]);
        let b = tokenize(&sample(&["a a a"])).unwrap();
        assert_eq!((b.len(), b.types()), (3, 1));
        let b = tokenize(&sample(&["A a"])).unwrap();
        assert_eq!((b.len(), b.types()), (2, 1));
        assert!(matches!(tokenize(&sample(&["... !!"])), Err(Error::EmptyText)));
    }

    #[test]
    fn token_normalization() {
        assert_eq!(normalize_token("Hello,").as_deref(), Some("hello"));
        assert_eq!(normalize_token("\"quoted\"").as_deref(), Some("quoted"));
        assert_eq!(normalize_token("#Job:").as_deref(), Some("#job"));
        assert_eq!(normalize_token("@USER").as_deref(), Some("@user"));
        assert_eq!(normalize_token("http://t.co/Ab,").as_deref(), Some("http://t.co/ab,"));
        assert_eq!(normalize_token("#"), None);
        assert_eq!(normalize_token("..."), None);
        assert_eq!(normalize_token("it's").as_deref(), Some("it's"));
    }

    #[test]
    fn exhaustive_aab() {
        let c = gap_curve_exhaustive(&bag("a a b")).unwrap();
        assert_eq!(c.replicates, 3);
        assert_eq!(c.m_bar, vec![4.0 / 3.0]);
    }

    #[test]
    fn all_distinct_is_flat() {
        let b = bag("a b c d e f g h i j");
        for seed in 0..3 {
            let c = gap_curve_mc(&b, 20, seed).unwrap();
            assert!(c.m_bar.iter().all(|&m| m == 1.0));
        }
        let a = gap_curve_analytic(&b).unwrap();
        assert!(a.m_bar.iter().all(|&m| m == 1.0));
        let fit = fit_decay(&a);
        assert_eq!(fit.gamma, 0.0);
        assert!(!fit.degenerate);
        assert_eq!(gap_curve_mc(&bag("a b"), 5, 0).unwrap().m_bar, vec![1.0]);
    }

    #[test]
    fn analytic_aab() {
        let c = gap_curve_analytic(&bag("a a b")).unwrap();
        assert_eq!(c.m_bar, vec![2.0]);
    }

    #[test]
    fn degenerate_vocabulary() {
        assert!(matches!(
            gap_curve_mc(&bag("a a a"), 10, 0),
            Err(Error::DegenerateVocabulary { types: 1 })
        ));
        assert!(gap_curve_analytic(&bag("a")).is_err());
        let fit = gamma_feature(&sample(&["same same", "same"]), &GammaConfig::default(), 1).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.gamma, 0.0);
    }

    #[test]
    fn mc_is_seed_deterministic_and_schedule_free() {
        let b = bag("the cat sat on the mat and the dog sat on the log with a cat");
        let x = gap_curve_mc(&b, 50, 9).unwrap();
        let y = gap_curve_mc(&b, 50, 9).unwrap();
        assert_eq!(x, y);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let z = one.install(|| gap_curve_mc(&b, 50, 9).unwrap());
        assert_eq!(x, z);
        assert_ne!(x, gap_curve_mc(&b, 50, 10).unwrap());
    }

    #[test]
    fn fit_examples() {
        let flat = fit_decay(&curve(vec![1.0; 30]));
        assert_eq!(flat.gamma, 0.0);
        assert_eq!(flat.fit_range, (20, 30));

        let linear = fit_decay(&curve((1..=30).map(|n| n as f64).collect()));
        assert!((linear.gamma - 1.0).abs() < 1e-9);
        assert!((linear.r_squared - 1.0).abs() < 1e-12);

        let c = 3.7;
        let power = fit_decay(&curve((1..=50).map(|n| c * (n as f64).powf(1.5)).collect()));
        assert!((power.gamma - 1.5).abs() < 1e-9);
        assert!((power.intercept + c.log10()).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_three_points() {
        // V = 6 gives n in {4, 5}: two points.
        assert!(fit_decay(&curve(vec![1.0; 5])).degenerate);
        // V = 7 gives n in {4, 5, 6}.
        assert!(!fit_decay(&curve(vec![1.0; 6])).degenerate);
        let custom = fit_decay_range(&curve((1..=30).map(|n| n as f64).collect()), (1, 30));
        assert_eq!(custom.fit_range, (1, 30));
        assert!((custom.gamma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_tweet_sample_is_allowed() {
        let s = sample(&["one two three four five six seven eight"]);
        let fit = gamma_feature(&s, &GammaConfig::default(), 3).unwrap();
        assert!(fit.gamma.is_finite());
        let analytic = GammaConfig {
            estimator: Estimator::Analytic,
            ..Default::default()
        };
        assert!(gamma_feature(&s, &analytic, 3).unwrap().gamma.is_finite());
    }

    #[test]
    fn gap_curve_csv() {
        let mut out = Vec::new();
        curve(vec![1.0, 2.0]).write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "n,m_bar,alpha\n1,1,1\n2,2,0.5\n");
    }

    proptest! {
        #[test]
        fn next_permutation_visits_multinomial_count(f in proptest::collection::vec(1usize..4, 1..4)) {
            let mut toks = Vec::new();
            for (t, &c) in f.iter().enumerate() {
                toks.extend(std::iter::repeat_n(t.to_string(), c));
            }
            let b = TokenBag::from_tokens(&toks);
            prop_assume!(b.types() >= 2);
            let c = gap_curve_exhaustive(&b).unwrap();
            let fact = |n: usize| (1..=n).product::<usize>();
            let expected = fact(toks.len()) / f.iter().map(|&c| fact(c)).product::<usize>();
            prop_assert_eq!(c.replicates, expected);
        }
    }
}
