//! Per-user feature extraction over a corpus.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Fingerprint, TOKENIZER_ID};
use crate::corpus::{sample_user, ClassLabel, Corpus, TweetRecord};
use crate::error::{Error, Result};
use crate::seed;
use crate::text_features::{avg_dissimilarity, url_rate, DissimilarityConfig, FeatureVector, UrlMode};
use crate::word_intro::{gamma_feature, GammaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    /// Tweets per sample.
    pub s: usize,
    pub dissimilarity: DissimilarityConfig,
    pub url_mode: UrlMode,
    pub gamma: GammaConfig,
    pub seed: u64,
}

impl ExtractConfig {
    pub fn new(s: usize, seed: u64) -> Self {
        ExtractConfig {
            s,
            dissimilarity: DissimilarityConfig::default(),
            url_mode: UrlMode::default(),
            gamma: GammaConfig::default(),
            seed,
        }
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            lcs_mode: self.dissimilarity.mode,
            case_fold: self.dissimilarity.case_fold,
            url_mode: self.url_mode,
            gamma_estimator: self.gamma.estimator,
            replicates: self.gamma.replicates,
            tokenizer: TOKENIZER_ID.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserFeatures {
    pub user_id: String,
    pub s: usize,
    pub origin: usize,
    pub features: FeatureVector,
    pub label: Option<ClassLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub user_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    /// Sorted by user id.
    pub rows: Vec<UserFeatures>,
    pub excluded: Vec<Exclusion>,
}

impl Extraction {
    /// Rows that carry a gold label.
    pub fn labeled(&self) -> Vec<(String, FeatureVector, ClassLabel)> {
        self.rows
            .iter()
            .filter_map(|r| r.label.map(|l| (r.user_id.clone(), r.features, l)))
            .collect()
    }
}

/// Sample `cfg.s` tweets of one user and compute its three features.
pub fn extract_user(user_id: &str, records: &[TweetRecord], cfg: &ExtractConfig) -> Result<UserFeatures> {
    let sample_seed = seed::for_key(seed::for_stage(cfg.seed, "sample"), user_id);
    let gamma_seed = seed::for_key(seed::for_stage(cfg.seed, "gamma"), user_id);
    let sample = sample_user(records, cfg.s, sample_seed)?;
    let mu_lcs = avg_dissimilarity(&sample, &cfg.dissimilarity)?;
    let mu_url = url_rate(&sample, cfg.url_mode);
    let fit = gamma_feature(&sample, &cfg.gamma, gamma_seed)?;
    Ok(UserFeatures {
        user_id: user_id.to_string(),
        s: cfg.s,
        origin: sample.origin,
        features: FeatureVector {
            mu_lcs,
            gamma: fit.gamma,
            mu_url,
            gamma_degenerate: fit.degenerate,
        },
        label: None,
    })
}

/// Extract every user in parallel. Users that cannot be sampled or measured
/// are excluded with a reason instead of failing the run.
pub fn extract_corpus(corpus: &Corpus, cfg: &ExtractConfig) -> Extraction {
    let users: Vec<(&str, &[TweetRecord])> = corpus.users().collect();
    let results: Vec<std::result::Result<UserFeatures, Exclusion>> = users
        .par_iter()
        .map(|&(id, recs)| {
            extract_user(id, recs, cfg)
                .map(|mut f| {
                    f.label = corpus.label(id);
                    f
                })
                .map_err(|e| Exclusion {
                    user_id: id.to_string(),
                    reason: e.to_string(),
                })
        })
        .collect();
    let mut out = Extraction::default();
    for r in results {
        match r {
            Ok(f) => out.rows.push(f),
            Err(x) => out.excluded.push(x),
        }
    }
    out
}

/// `user_id,s,mu_lcs,gamma,mu_url,label,fingerprint`
pub fn write_features_csv<W: Write>(rows: &[UserFeatures], fingerprint: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["user_id", "s", "mu_lcs", "gamma", "mu_url", "label", "fingerprint"])?;
    for r in rows {
        w.write_record([
            r.user_id.clone(),
            r.s.to_string(),
            r.features.mu_lcs.to_string(),
            r.features.gamma.to_string(),
            r.features.mu_url.to_string(),
            r.label.map(|l| l.to_string()).unwrap_or_default(),
            fingerprint.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<features>", e))?;
    Ok(())
}
