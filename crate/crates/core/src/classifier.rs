//! Organic-population calibration and threshold-window classification.
//!
//! A user is an automaton when any enabled feature lies more than `n`
//! organic standard deviations from the organic mean.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Binary, ClassLabel};
use crate::error::{Error, Result};
use crate::text_features::{FeatureVector, LcsMode, UrlMode};
use crate::word_intro::Estimator;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Dissimilarity,
    Gamma,
    Url,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Dissimilarity, Feature::Gamma, Feature::Url];

    pub fn value(self, v: &FeatureVector) -> f64 {
        match self {
            Feature::Dissimilarity => v.mu_lcs,
            Feature::Gamma => v.gamma,
            Feature::Url => v.mu_url,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Dissimilarity => "dissimilarity",
            Feature::Gamma => "gamma",
            Feature::Url => "url",
        }
    }

    /// Direction in which automation typically pushes the feature:
    /// repetitive text lowers dissimilarity and gamma, spam raises URL rate.
    fn suspicious_sign(self) -> f64 {
        match self {
            Feature::Dissimilarity | Feature::Gamma => -1.0,
            Feature::Url => 1.0,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Feature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dissimilarity" | "lcs" => Ok(Feature::Dissimilarity),
            "gamma" => Ok(Feature::Gamma),
            "url" => Ok(Feature::Url),
            other => Err(Error::InvalidArgument(format!("unknown feature `{other}`"))),
        }
    }
}

/// Non-empty set of enabled features, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Feature>", into = "Vec<Feature>")]
pub struct FeatureMask(Vec<Feature>);

impl FeatureMask {
    pub fn new(features: impl IntoIterator<Item = Feature>) -> Result<Self> {
        let mut v: Vec<Feature> = features.into_iter().collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(FeatureMask(v))
    }

    pub fn all() -> Self {
        FeatureMask(Feature::ALL.to_vec())
    }

    pub fn single(f: Feature) -> Self {
        FeatureMask(vec![f])
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }

    pub fn contains(&self, f: Feature) -> bool {
        self.0.contains(&f)
    }

    pub fn is_subset_of(&self, other: &FeatureMask) -> bool {
        self.0.iter().all(|f| other.contains(*f))
    }
}

impl Default for FeatureMask {
    fn default() -> Self {
        FeatureMask::all()
    }
}

impl TryFrom<Vec<Feature>> for FeatureMask {
    type Error = Error;
    fn try_from(v: Vec<Feature>) -> Result<Self> {
        FeatureMask::new(v)
    }
}

impl From<FeatureMask> for Vec<Feature> {
    fn from(m: FeatureMask) -> Self {
        m.0
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|x| x.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for FeatureMask {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let feats = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(Feature::from_str)
            .collect::<Result<Vec<_>>>()?;
        FeatureMask::new(feats)
    }
}

/// Either one multiplier for all features or one per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplier {
    Shared(f64),
    PerFeature(BTreeMap<Feature, f64>),
}

impl Multiplier {
    pub fn for_feature(&self, f: Feature) -> Option<f64> {
        match self {
            Multiplier::Shared(n) => Some(*n),
            Multiplier::PerFeature(m) => m.get(&f).copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    #[default]
    TwoSided,
    /// Only deviations in each feature's suspicious direction count.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

/// Settings the features were extracted with; a model only applies to
/// features produced the same way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub lcs_mode: LcsMode,
    pub case_fold: bool,
    pub url_mode: UrlMode,
    pub gamma_estimator: Estimator,
    pub replicates: usize,
    pub tokenizer: String,
}

pub const TOKENIZER_ID: &str = "whitespace+punct-strip+casefold/keep-urls-tags-v1";

impl Default for Fingerprint {
    fn default() -> Self {
        Fingerprint {
            lcs_mode: LcsMode::Subsequence,
            case_fold: true,
            url_mode: UrlMode::Extended,
            gamma_estimator: Estimator::MonteCarlo,
            replicates: crate::word_intro::DEFAULT_REPLICATES,
            tokenizer: TOKENIZER_ID.to_string(),
        }
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lcs={};fold={};url={};gamma={};R={};tok=v1",
            self.lcs_mode, self.case_fold as u8, self.url_mode, self.gamma_estimator, self.replicates
        )
    }
}

/// Where the window came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub folds: usize,
    pub fold_n_opt: Vec<f64>,
    /// user id -> fold index of the calibration run.
    pub fold_assignment: BTreeMap<String, usize>,
    /// Fingerprint of the run that produced the model.
    #[serde(default)]
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganicModel {
    pub version: u32,
    pub stats: BTreeMap<Feature, FeatureStats>,
    pub mask: FeatureMask,
    pub window: Option<Multiplier>,
    pub tuning_sigma: Option<Multiplier>,
    pub sides: Sides,
    pub sample_size: usize,
    /// Divisor used for the standard deviations; always "population" (N).
    pub std_divisor: String,
    pub fingerprint: Fingerprint,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub binary: Binary,
    pub z: BTreeMap<Feature, f64>,
    pub violated: Vec<Feature>,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Organic mean and standard deviation per enabled feature. Automaton vectors
/// are ignored here.
pub fn calibrate(training: &[(FeatureVector, ClassLabel)], mask: &FeatureMask) -> Result<OrganicModel> {
    let organic: Vec<&FeatureVector> = training
        .iter()
        .filter(|(_, l)| l.is_organic())
        .map(|(v, _)| v)
        .collect();
    if organic.len() < 2 {
        return Err(Error::InsufficientTraining { got: organic.len() });
    }
    let mut stats = BTreeMap::new();
    for &f in mask.features() {
        let xs: Vec<f64> = organic.iter().map(|v| f.value(v)).collect();
        let (mean, std) = mean_std(&xs);
        if !(std > 0.0 && std.is_finite()) {
            return Err(Error::DegenerateFeature(f));
        }
        stats.insert(f, FeatureStats { mean, std });
    }
    Ok(OrganicModel {
        version: MODEL_VERSION,
        stats,
        mask: mask.clone(),
        window: None,
        tuning_sigma: None,
        sides: Sides::TwoSided,
        sample_size: 0,
        std_divisor: "population".into(),
        fingerprint: Fingerprint::default(),
        provenance: Provenance::default(),
    })
}

impl OrganicModel {
    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_VERSION {
            return Err(Error::ModelVersion {
                found: self.version,
                expected: MODEL_VERSION,
            });
        }
        for &f in self.mask.features() {
            match self.stats.get(&f) {
                Some(s) if s.std > 0.0 && s.std.is_finite() && s.mean.is_finite() => {}
                Some(_) => return Err(Error::DegenerateFeature(f)),
                None => return Err(Error::InvalidModel(format!("no statistics for `{f}`"))),
            }
        }
        if let Some(w) = &self.window {
            for &f in self.mask.features() {
                match w.for_feature(f) {
                    Some(n) if n >= 0.0 && n.is_finite() => {}
                    _ => return Err(Error::InvalidModel(format!("missing or negative window for `{f}`"))),
                }
            }
        }
        Ok(())
    }

    pub fn z_score(&self, f: Feature, v: &FeatureVector) -> f64 {
        let s = self.stats[&f];
        (f.value(v) - s.mean) / s.std
    }

    fn deviation(&self, f: Feature, z: f64) -> f64 {
        match self.sides {
            Sides::TwoSided => z.abs(),
            Sides::OneSided => (z * f.suspicious_sign()).max(0.0),
        }
    }

    /// Largest deviation over enabled features: the user is an automaton
    /// under a shared window `n` exactly when this exceeds `n`.
    pub fn exclusion_score(&self, v: &FeatureVector) -> f64 {
        self.mask
            .features()
            .iter()
            .map(|&f| self.deviation(f, self.z_score(f, v)))
            .fold(0.0, f64::max)
    }

    pub fn classify_with(&self, v: &FeatureVector, window: &Multiplier) -> Verdict {
        let mut z = BTreeMap::new();
        let mut violated = Vec::new();
        for &f in self.mask.features() {
            let zf = self.z_score(f, v);
            z.insert(f, zf);
            let n = window.for_feature(f).unwrap_or(f64::INFINITY);
            if self.deviation(f, zf) > n {
                violated.push(f);
            }
        }
        let binary = if violated.is_empty() {
            Binary::Organic
        } else {
            Binary::Automaton
        };
        Verdict { binary, z, violated }
    }

    /// Classify with the model's stored window.
    pub fn classify_calibrated(&self, v: &FeatureVector) -> Result<Verdict> {
        let w = self
            .window
            .as_ref()
            .ok_or_else(|| Error::InvalidModel("model has no window set".into()))?;
        Ok(self.classify_with(v, w))
    }

    /// Same statistics restricted to a subset of the enabled features.
    pub fn restrict(&self, mask: &FeatureMask) -> Result<OrganicModel> {
        if !mask.is_subset_of(&self.mask) {
            return Err(Error::MaskMismatch {
                requested: mask.to_string(),
                model: self.mask.to_string(),
            });
        }
        let mut m = self.clone();
        m.stats.retain(|f, _| mask.contains(*f));
        m.mask = mask.clone();
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<OrganicModel> {
        let raw: serde_json::Value = serde_json::from_str(s)?;
        let version = raw.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != MODEL_VERSION {
            return Err(Error::ModelVersion {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let m: OrganicModel = serde_json::from_value(raw)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<OrganicModel> {
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        OrganicModel::from_json(&s)
    }
}

/// Classify with a shared window `n`.
pub fn classify(model: &OrganicModel, v: &FeatureVector, n: f64) -> Verdict {
    model.classify_with(v, &Multiplier::Shared(n))
}

/// Evenly spaced thresholds `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lo: 0.0,
            hi: 10.0,
            step: 0.05,
        }
    }
}

impl Grid {
    pub fn single(n: f64) -> Grid {
        Grid {
            lo: n,
            hi: n,
            step: 1.0,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        // Multiply rather than accumulate so values are exact decimal-ish and reproducible.
        (0..count)
            .map(|i| {
                let x = self.lo + i as f64 * self.step;
                (x * 1e9).round() / 1e9
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid `{s}` is not lo:hi:step"));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [lo, hi, step] = parts[..] else {
            return Err(bad());
        };
        if !(lo >= 0.0 && hi >= lo && step > 0.0 && hi.is_finite()) {
            return Err(bad());
        }
        Ok(Grid { lo, hi, step })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

/// (FPR, TPR) of a shared window `n`, automaton = positive.
pub fn rates(model: &OrganicModel, validation: &[(FeatureVector, ClassLabel)], n: f64) -> (f64, f64) {
    let scores: Vec<(f64, ClassLabel)> = validation
        .iter()
        .map(|(v, l)| (model.exclusion_score(v), *l))
        .collect();
    rates_from_scores(&scores, n)
}

pub(crate) fn rates_from_scores(scores: &[(f64, ClassLabel)], n: f64) -> (f64, f64) {
    let (mut fp, mut neg, mut tp, mut pos) = (0usize, 0usize, 0usize, 0usize);
    for &(score, label) in scores {
        let flagged = score > n;
        if label.is_organic() {
            neg += 1;
            fp += flagged as usize;
        } else {
            pos += 1;
            tp += flagged as usize;
        }
    }
    let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    (frac(fp, neg), frac(tp, pos))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowChoice {
    pub n_opt: f64,
    pub youden_j: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Threshold from `grid` maximizing Youden's J = TPR - FPR; ties go to the
/// larger threshold.
pub fn select_window(
    model: &OrganicModel,
    validation: &[(FeatureVector, ClassLabel)],
    grid: &Grid,
) -> Result<WindowChoice> {
    let has = |organic: bool| validation.iter().any(|(_, l)| l.is_organic() == organic);
    if !(has(true) && has(false)) {
        return Err(Error::SingleClass);
    }
    let scores: Vec<(f64, ClassLabel)> = validation
        .iter()
        .map(|(v, l)| (model.exclusion_score(v), *l))
        .collect();
    let points: Vec<(f64, f64, f64)> = grid
        .values()
        .into_iter()
        .map(|n| {
            let (fpr, tpr) = rates_from_scores(&scores, n);
            (n, fpr, tpr)
        })
        .collect();
    Ok(best_youden(&points).expect("grid is never empty"))
}

/// Pick the Youden-optimal `(threshold, fpr, tpr)` point, ties to larger threshold.
pub fn best_youden(points: &[(f64, f64, f64)]) -> Option<WindowChoice> {
    let mut best: Option<WindowChoice> = None;
    for &(n, fpr, tpr) in points {
        let j = tpr - fpr;
        let better = match &best {
            None => true,
            Some(b) => j > b.youden_j || (j == b.youden_j && n > b.n_opt),
        };
        if better {
            best = Some(WindowChoice {
                n_opt: n,
                youden_j: j,
                tpr,
                fpr,
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(a: f64, b: f64, c: f64) -> FeatureVector {
        FeatureVector::new(a, b, c)
    }

    fn two_point_model() -> OrganicModel {
        let training = vec![
            (fv(0.8, 0.7, 0.1), ClassLabel::Human),
            (fv(0.6, 0.5, 0.3), ClassLabel::Human),
            (fv(0.1, 0.1, 0.9), ClassLabel::Robot),
        ];
        calibrate(&training, &FeatureMask::all()).unwrap()
    }

    #[test]
    fn calibrate_two_points() {
        let m = two_point_model();
        let expect = [(Feature::Dissimilarity, 0.7), (Feature::Gamma, 0.6), (Feature::Url, 0.2)];
        for (f, mean) in expect {
            assert!((m.stats[&f].mean - mean).abs() < 1e-12);
            assert!((m.stats[&f].std - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn calibrate_errors() {
        let one = vec![(fv(0.8, 0.7, 0.1), ClassLabel::Human), (fv(0.1, 0.1, 0.1), ClassLabel::Cyborg)];
        assert!(matches!(
            calibrate(&one, &FeatureMask::all()),
            Err(Error::InsufficientTraining { got: 1 })
        ));
        let flat_gamma = vec![(fv(0.8, 0.5, 0.1), ClassLabel::Human), (fv(0.6, 0.5, 0.3), ClassLabel::Human)];
        assert!(matches!(
            calibrate(&flat_gamma, &FeatureMask::all()),
            Err(Error::DegenerateFeature(Feature::Gamma))
        ));
        // masked-out constant feature is fine
        let mask: FeatureMask = "dissimilarity,url".parse().unwrap();
        assert!(calibrate(&flat_gamma, &mask).is_ok());
    }

    #[test]
    fn classify_examples() {
        let m = two_point_model();
        let at_mean = classify(&m, &fv(0.7, 0.6, 0.2), 0.0);
        assert_eq!(at_mean.binary, Binary::Organic);
        assert!(at_mean.z.values().all(|&z| z.abs() < 1e-12));

        assert_eq!(classify(&m, &fv(0.71, 0.6, 0.2), 0.0).binary, Binary::Automaton);

        let v = classify(&m, &fv(0.7, 0.6, 0.9), 3.0);
        assert_eq!(v.binary, Binary::Automaton);
        assert_eq!(v.violated, vec![Feature::Url]);
        assert!((v.z[&Feature::Url] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn one_sided_ignores_benign_direction() {
        let mut m = two_point_model();
        m.sides = Sides::OneSided;
        // Very high dissimilarity and low URL rate are not suspicious.
        assert_eq!(classify(&m, &fv(1.5, 0.6, -0.5), 1.0).binary, Binary::Organic);
        assert_eq!(classify(&m, &fv(0.2, 0.6, 0.2), 1.0).violated, vec![Feature::Dissimilarity]);
    }

    #[test]
    fn per_feature_windows() {
        let mut m = two_point_model();
        let w = Multiplier::PerFeature(BTreeMap::from([
            (Feature::Dissimilarity, 1.0),
            (Feature::Gamma, 1.0),
            (Feature::Url, 10.0),
        ]));
        m.window = Some(w);
        assert_eq!(m.classify_calibrated(&fv(0.7, 0.6, 0.9)).unwrap().binary, Binary::Organic);
        assert_eq!(
            m.classify_calibrated(&fv(0.5, 0.6, 0.2)).unwrap().violated,
            vec![Feature::Dissimilarity]
        );
    }

    #[test]
    fn select_window_examples() {
        let m = two_point_model();
        let separated = vec![
            (fv(0.7, 0.6, 0.2), ClassLabel::Human),
            (fv(0.72, 0.61, 0.21), ClassLabel::Human),
            (fv(0.1, 0.6, 0.2), ClassLabel::Robot),
            (fv(0.7, 0.6, 2.0), ClassLabel::Cyborg),
        ];
        let c = select_window(&m, &separated, &Grid::default()).unwrap();
        assert_eq!((c.tpr, c.fpr, c.youden_j), (1.0, 0.0, 1.0));
        // largest n that still separates: robot |z| = 6, cyborg z = 18
        assert!((c.n_opt - 5.95).abs() < 1e-9);

        let single = select_window(&m, &separated, &Grid::single(2.5)).unwrap();
        assert_eq!(single.n_opt, 2.5);

        let one_class = vec![(fv(0.7, 0.6, 0.2), ClassLabel::Human)];
        assert!(matches!(select_window(&m, &one_class, &Grid::default()), Err(Error::SingleClass)));
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:10:0.05".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 201);
        assert_eq!(v[1], 0.05);
        assert_eq!(v[200], 10.0);
        assert_eq!(v[3], 0.15);
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert_eq!(Grid::single(2.0).values(), vec![2.0]);
    }

    #[test]
    fn mask_parsing() {
        let m: FeatureMask = "url,dissimilarity,url".parse().unwrap();
        assert_eq!(m.features(), [Feature::Dissimilarity, Feature::Url]);
        assert_eq!(m.to_string(), "dissimilarity,url");
        assert!(matches!("".parse::<FeatureMask>(), Err(Error::EmptyMask)));
        assert!("speed".parse::<FeatureMask>().is_err());
    }

    #[test]
    fn model_versioning_and_mask_checks() {
        let mut m = two_point_model();
        m.window = Some(Multiplier::Shared(2.0));
        let json = m.to_json().unwrap();
        assert_eq!(OrganicModel::from_json(&json).unwrap(), m);
        let tampered = json.replace("\"version\": 1", "\"version\": 7");
        assert!(matches!(
            OrganicModel::from_json(&tampered),
            Err(Error::ModelVersion { found: 7, .. })
        ));
        let url_only = m.restrict(&FeatureMask::single(Feature::Url)).unwrap();
        let narrow = url_only.restrict(&"url,gamma".parse().unwrap());
        assert!(matches!(narrow, Err(Error::MaskMismatch { .. })));
    }

    fn arb_vec() -> impl Strategy<Value = FeatureVector> {
        (0.0..1.0f64, 0.0..3.0f64, 0.0..2.0f64).prop_map(|(a, b, c)| fv(a, b, c))
    }

    fn arb_model() -> impl Strategy<Value = OrganicModel> {
        (
            proptest::collection::vec(arb_vec(), 3..12),
            proptest::sample::subsequence(Feature::ALL.to_vec(), 1..=3),
        )
            .prop_filter_map("degenerate", |(vs, feats)| {
                let training: Vec<_> = vs.into_iter().map(|v| (v, ClassLabel::Human)).collect();
                calibrate(&training, &FeatureMask::new(feats).unwrap()).ok()
            })
    }

    proptest! {
        #[test]
        fn verdicts_shrink_as_window_grows(m in arb_model(), v in arb_vec(), a in 0.0..8.0f64, b in 0.0..8.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let wide = classify(&m, &v, hi);
            let narrow = classify(&m, &v, lo);
            prop_assert!(wide.violated.iter().all(|f| narrow.violated.contains(f)));
        }

        #[test]
        fn exclusion_rule_decomposes(m in arb_model(), v in arb_vec(), n in 0.0..6.0f64) {
            let full = classify(&m, &v, n).binary == Binary::Automaton;
            let any_single = m.mask.features().iter().any(|&f| {
                let single = m.restrict(&FeatureMask::single(f)).unwrap();
                classify(&single, &v, n).binary == Binary::Automaton
            });
            prop_assert_eq!(full, any_single);
            prop_assert_eq!(full, m.exclusion_score(&v) > n);
        }

        #[test]
        fn masked_features_are_ignored(m in arb_model(), v in arb_vec(), junk in -100.0..100.0f64, n in 0.0..6.0f64) {
            let mut w = v;
            for f in Feature::ALL {
                if !m.mask.contains(f) {
                    match f {
                        Feature::Dissimilarity => w.mu_lcs = junk,
                        Feature::Gamma => w.gamma = junk,
                        Feature::Url => w.mu_url = junk,
                    }
                }
            }
            prop_assert_eq!(classify(&m, &v, n), classify(&m, &w, n));
        }

        #[test]
        fn serialization_round_trips(m in arb_model(), n in 0.0..6.0f64, vs in proptest::collection::vec(arb_vec(), 1..10)) {
            let mut m = m;
            m.window = Some(Multiplier::Shared(n));
            m.tuning_sigma = Some(Multiplier::Shared(n / 3.0));
            let back = OrganicModel::from_json(&m.to_json().unwrap()).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(back.to_json().unwrap(), m.to_json().unwrap());
            for v in &vs {
                prop_assert_eq!(back.classify_calibrated(v).unwrap(), m.classify_calibrated(v).unwrap());
            }
        }
    }
}
