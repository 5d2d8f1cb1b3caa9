//! Average pairwise tweet dissimilarity and URL rate.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::UserSample;
use crate::error::{Error, Result};
use crate::lcs::{self, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LcsMode {
    #[default]
    Subsequence,
    Substring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DissimilarityConfig {
    pub mode: LcsMode,
    pub case_fold: bool,
}

impl Default for DissimilarityConfig {
    fn default() -> Self {
        DissimilarityConfig {
            mode: LcsMode::Subsequence,
            case_fold: true,
        }
    }
}

/// Which URL markers count towards the URL rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UrlMode {
    /// Only the literal `http:`.
    Paper,
    /// `http:` and `https:`.
    #[default]
    Extended,
}

/// The three per-sample features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub mu_lcs: f64,
    pub gamma: f64,
    pub mu_url: f64,
    /// Set when the word-introduction fit had too few points; `gamma` is 0.
    #[serde(default)]
    pub gamma_degenerate: bool,
}

impl FeatureVector {
    pub fn new(mu_lcs: f64, gamma: f64, mu_url: f64) -> Self {
        FeatureVector {
            mu_lcs,
            gamma,
            mu_url,
            gamma_degenerate: false,
        }
    }
}

impl fmt::Display for LcsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LcsMode::Subsequence => "subsequence",
            LcsMode::Substring => "substring",
        })
    }
}

impl FromStr for LcsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsequence" => Ok(LcsMode::Subsequence),
            "substring" => Ok(LcsMode::Substring),
            _ => Err(Error::InvalidArgument(format!("unknown lcs mode `{s}`"))),
        }
    }
}

impl fmt::Display for UrlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UrlMode::Paper => "paper",
            UrlMode::Extended => "extended",
        })
    }
}

impl FromStr for UrlMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(UrlMode::Paper),
            "extended" => Ok(UrlMode::Extended),
            _ => Err(Error::InvalidArgument(format!("unknown url mode `{s}`"))),
        }
    }
}

/// Simple one-to-one lowercase mapping; characters whose lowercase form is
/// not a single scalar value are left unchanged so lengths are preserved.
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

fn to_chars(s: &str, case_fold: bool) -> Vec<char> {
    if case_fold {
        s.chars().map(fold_char).collect()
    } else {
        s.chars().collect()
    }
}

/// LCS length of two already-prepared strings.
pub fn lcs_length(a: &str, b: &str, mode: LcsMode) -> usize {
    let (a, b) = (to_chars(a, false), to_chars(b, false));
    match mode {
        LcsMode::Subsequence => lcs::subsequence(&a, &b),
        LcsMode::Substring => lcs::substring(&a, &b),
    }
}

fn dissimilarity(len_a: usize, len_b: usize, common: usize) -> f64 {
    let total = (len_a + len_b) as f64;
    (total - 2.0 * common as f64) / total
}

/// `(|a| + |b| - 2|LCS|) / (|a| + |b|)` over unicode scalar values.
pub fn pair_dissimilarity(a: &str, b: &str, cfg: &DissimilarityConfig) -> Result<f64> {
    let (a, b) = (to_chars(a, cfg.case_fold), to_chars(b, cfg.case_fold));
    if a.is_empty() && b.is_empty() {
        return Err(Error::DegenerateInput);
    }
    let common = match cfg.mode {
        LcsMode::Subsequence => lcs::subsequence(&a, &b),
        LcsMode::Substring => lcs::substring(&a, &b),
    };
    Ok(dissimilarity(a.len(), b.len(), common))
}

/// Mean dissimilarity over all unordered tweet pairs of the sample.
///
/// Pairs are evaluated in parallel; each row `i` sums its pairs `(i, j > i)`
/// in order and rows are then added in index order, so the result does not
/// depend on the number of worker threads.
pub fn avg_dissimilarity(sample: &UserSample, cfg: &DissimilarityConfig) -> Result<f64> {
    let s = sample.len();
    if s < 2 {
        return Err(Error::InsufficientSample { got: s, need: 2 });
    }
    let texts: Vec<Vec<char>> = sample
        .tweets
        .iter()
        .map(|t| to_chars(t, cfg.case_fold))
        .collect();
    let profiles: Vec<Profile> = match cfg.mode {
        LcsMode::Subsequence => texts.par_iter().map(|t| Profile::new(t)).collect(),
        LcsMode::Substring => Vec::new(),
    };

    let row_sums: Vec<Result<f64>> = (0..s - 1)
        .into_par_iter()
        .map(|i| {
            let mut sum = 0.0;
            for j in i + 1..s {
                let (a, b) = (&texts[i], &texts[j]);
                if a.is_empty() && b.is_empty() {
                    return Err(Error::DegenerateInput);
                }
                let common = match cfg.mode {
                    LcsMode::Subsequence => {
                        let (pi, pj) = (&profiles[i], &profiles[j]);
                        if b.len() * pi.words() <= a.len() * pj.words() {
                            pi.lcs(b)
                        } else {
                            pj.lcs(a)
                        }
                    }
                    LcsMode::Substring => lcs::substring(a, b),
                };
                sum += dissimilarity(a.len(), b.len(), common);
            }
            Ok(sum)
        })
        .collect();

    let mut total = 0.0;
    for r in row_sums {
        total += r?;
    }
    let pairs = (s * (s - 1) / 2) as f64;
    Ok(total / pairs)
}

/// Count of URL markers across the sample divided by the number of tweets.
pub fn url_rate(sample: &UserSample, mode: UrlMode) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let count: usize = sample
        .tweets
        .iter()
        .map(|t| count_url_markers(t, mode))
        .sum();
    count as f64 / sample.len() as f64
}

pub fn count_url_markers(text: &str, mode: UrlMode) -> usize {
    let lower = text.to_ascii_lowercase();
    let http = lower.matches("http:").count();
    match mode {
        UrlMode::Paper => http,
        UrlMode::Extended => http + lower.matches("https:").count(),
    }
}
