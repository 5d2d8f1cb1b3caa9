//! Language-only detection of automated text accounts.
//!
//! Each account is summarized by three features computed from an ordinal
//! sample of its messages: average pairwise dissimilarity (via longest common
//! subsequence), the decay exponent of its word-introduction rate, and its
//! URL rate. Accounts whose features leave a window of `n` standard
//! deviations around the organic population mean are flagged as automated.
//!
//! Modules follow the pipeline order:
//! [`corpus`] → [`text_features`] / [`word_intro`] (via [`extract`]) →
//! [`classifier`] → [`evaluation`]. [`synth`] generates labeled test corpora.

pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod extract;
pub mod lcs;
pub mod report;
pub mod seed;
pub mod synth;
pub mod text_features;
pub mod word_intro;

pub use classifier::{calibrate, classify, Feature, FeatureMask, Grid, OrganicModel, Verdict};
pub use corpus::{clean_text, load_corpus, sample_user, Binary, ClassLabel, Corpus, TweetRecord, UserSample};
pub use error::{Error, Result};
pub use evaluation::{auc_trapezoid, crossval, make_folds, CrossValConfig, RocCurve};
pub use extract::{extract_corpus, ExtractConfig, UserFeatures};
pub use text_features::{avg_dissimilarity, pair_dissimilarity, url_rate, FeatureVector};
pub use word_intro::{fit_decay, gamma_feature, tokenize};
