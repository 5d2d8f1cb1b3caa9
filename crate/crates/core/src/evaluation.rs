//! k-fold cross-validation, fold-averaged ROC curves, AUC and final reports.
//!
//! Automatons are the positive class: a true positive is an automaton
//! flagged by exclusion, a false positive a human flagged as automaton.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    best_youden, calibrate, mean_std, rates_from_scores, Feature, FeatureMask, Grid, Multiplier,
    OrganicModel, Sides, WindowChoice,
};
use crate::corpus::{Binary, ClassLabel, Corpus};
use crate::error::{Error, Result};
use crate::extract::{extract_corpus, ExtractConfig, UserFeatures};
use crate::seed;
use crate::text_features::FeatureVector;

/// One labeled user as seen by the evaluation harness.
pub type Labeled = (String, FeatureVector, ClassLabel);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_of(&self, user: &str) -> Option<usize> {
        self.assignment.get(user).copied()
    }
}

/// Stratified assignment of users to `k` folds. Each class is shuffled and
/// dealt round-robin, the automatons continuing where the organics stopped,
/// so fold sizes differ by at most one overall and per class.
pub fn make_folds(users: &[(String, ClassLabel)], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if users.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{} users cannot fill {k} folds",
            users.len()
        )));
    }
    let mut organic: Vec<&str> = Vec::new();
    let mut automaton: Vec<&str> = Vec::new();
    for (u, l) in users {
        match l.binary() {
            Binary::Organic => organic.push(u),
            Binary::Automaton => automaton.push(u),
        }
    }
    if organic.is_empty() || automaton.is_empty() {
        return Err(Error::SingleClass);
    }
    organic.sort_unstable();
    automaton.sort_unstable();
    let mut rng = seed::rng(seed::for_stage(seed, "folds"));
    organic.shuffle(&mut rng);
    automaton.shuffle(&mut rng);
    let assignment = organic
        .iter()
        .chain(automaton.iter())
        .enumerate()
        .map(|(i, u)| (u.to_string(), i % k))
        .collect();
    Ok(FoldPlan { k, assignment, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Ascending threshold; the last point is `n = inf` at (0, 0).
    pub points: Vec<RocPoint>,
    pub auc: f64,
    /// Youden-optimal point of this curve.
    pub best: WindowChoice,
    pub s: usize,
    pub mask: FeatureMask,
}

/// Trapezoidal area under `(fpr, tpr)` points. Points are sorted first and
/// the curve is extended to (0, 0) and (1, 1).
pub fn auc_trapezoid(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("AUC needs at least 2 points".into()));
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    if pts.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::InvalidArgument("non-finite ROC point".into()));
    }
    pts.push((0.0, 0.0));
    pts.push((1.0, 1.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(pts
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub total: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tpr: f64,
    pub fpr: f64,
    pub organic_recall: f64,
    pub automaton_recall: f64,
    pub per_class: BTreeMap<ClassLabel, ClassCounts>,
}

impl ConfusionReport {
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = (ClassLabel, Binary)>) -> Self {
        let mut r = ConfusionReport::default();
        for (label, verdict) in outcomes {
            let flagged = verdict == Binary::Automaton;
            let c = r.per_class.entry(label).or_default();
            c.total += 1;
            c.flagged += flagged as usize;
            match (label.is_organic(), flagged) {
                (false, true) => r.tp += 1,
                (false, false) => r.fn_ += 1,
                (true, true) => r.fp += 1,
                (true, false) => r.tn += 1,
            }
        }
        let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        r.tpr = frac(r.tp, r.tp + r.fn_);
        r.fpr = frac(r.fp, r.fp + r.tn);
        r.automaton_recall = r.tpr;
        r.organic_recall = frac(r.tn, r.fp + r.tn);
        r
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Fraction of a class flagged as automaton.
    pub fn flagged_rate(&self, label: ClassLabel) -> Option<f64> {
        self.per_class
            .get(&label)
            .filter(|c| c.total > 0)
            .map(|c| c.flagged as f64 / c.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValConfig {
    pub k: usize,
    pub grid: Grid,
    pub seed: u64,
    pub mask: FeatureMask,
    pub sides: Sides,
}

impl Default for CrossValConfig {
    fn default() -> Self {
        CrossValConfig {
            k: 10,
            grid: Grid::default(),
            seed: 0,
            mask: FeatureMask::all(),
            sides: Sides::TwoSided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_organic: usize,
    pub test_users: usize,
    pub roc: Vec<RocPoint>,
    pub auc: f64,
    pub choice: WindowChoice,
    pub confusion: ConfusionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValResult {
    /// Pointwise fold average at matched thresholds.
    pub curve: RocCurve,
    pub folds: Vec<FoldResult>,
    pub plan: FoldPlan,
    pub mean_fold_auc: f64,
    pub auc_std_err: f64,
    pub n_opt_mean: f64,
    /// Population standard deviation of the per-fold optimal windows.
    pub n_opt_std: f64,
    pub mean_tpr: f64,
    pub tpr_std_err: f64,
    pub mean_fpr: f64,
    pub fpr_std_err: f64,
}

/// Sample standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

fn thresholds(grid: &Grid) -> Vec<f64> {
    let mut t = grid.values();
    if t.first().is_none_or(|&x| x > 0.0) {
        t.insert(0, 0.0);
    }
    t.push(f64::INFINITY);
    t
}

fn run_fold(
    fold: usize,
    data: &[Labeled],
    plan: &FoldPlan,
    cfg: &CrossValConfig,
    ts: &[f64],
) -> Result<FoldResult> {
    let (train, test): (Vec<&Labeled>, Vec<&Labeled>) = data
        .iter()
        .partition(|(u, _, _)| plan.fold_of(u) != Some(fold));
    let training: Vec<(FeatureVector, ClassLabel)> = train.iter().map(|(_, v, l)| (*v, *l)).collect();
    let train_organic = training.iter().filter(|(_, l)| l.is_organic()).count();
    let fold_err = |e: Error| Error::Fold {
        fold,
        message: e.to_string(),
    };
    let mut model = calibrate(&training, &cfg.mask).map_err(fold_err)?;
    model.sides = cfg.sides;

    let scores: Vec<(f64, ClassLabel)> = test
        .iter()
        .map(|(_, v, l)| (model.exclusion_score(v), *l))
        .collect();
    let has = |organic: bool| scores.iter().any(|(_, l)| l.is_organic() == organic);
    if !(has(true) && has(false)) {
        return Err(Error::Fold {
            fold,
            message: "held-out fold lacks one of the two classes".into(),
        });
    }
    let roc: Vec<RocPoint> = ts
        .iter()
        .map(|&n| {
            let (fpr, tpr) = rates_from_scores(&scores, n);
            RocPoint { threshold: n, fpr, tpr }
        })
        .collect();
    let finite: Vec<(f64, f64, f64)> = roc
        .iter()
        .filter(|p| p.threshold.is_finite())
        .map(|p| (p.threshold, p.fpr, p.tpr))
        .collect();
    let choice = best_youden(&finite).expect("thresholds are never empty");
    let auc = auc_trapezoid(&roc.iter().map(|p| (p.fpr, p.tpr)).collect::<Vec<_>>())?;
    let confusion = ConfusionReport::from_outcomes(scores.iter().map(|&(score, l)| {
        let b = if score > choice.n_opt {
            Binary::Automaton
        } else {
            Binary::Organic
        };
        (l, b)
    }));
    Ok(FoldResult {
        fold,
        train_organic,
        test_users: test.len(),
        roc,
        auc,
        choice,
        confusion,
    })
}

/// Run k-fold cross-validation over extracted, labeled features.
pub fn crossval(data: &[Labeled], s: usize, cfg: &CrossValConfig) -> Result<CrossValResult> {
    let users: Vec<(String, ClassLabel)> = data.iter().map(|(u, _, l)| (u.clone(), *l)).collect();
    let plan = make_folds(&users, cfg.k, cfg.seed)?;
    crossval_with_plan(data, s, cfg, plan)
}

pub fn crossval_with_plan(
    data: &[Labeled],
    s: usize,
    cfg: &CrossValConfig,
    plan: FoldPlan,
) -> Result<CrossValResult> {
    let ts = thresholds(&cfg.grid);
    let folds: Vec<FoldResult> = (0..plan.k)
        .into_par_iter()
        .map(|f| run_fold(f, data, &plan, cfg, &ts))
        .collect::<Result<_>>()?;

    let k = folds.len() as f64;
    let points: Vec<RocPoint> = ts
        .iter()
        .enumerate()
        .map(|(i, &n)| RocPoint {
            threshold: n,
            fpr: folds.iter().map(|f| f.roc[i].fpr).sum::<f64>() / k,
            tpr: folds.iter().map(|f| f.roc[i].tpr).sum::<f64>() / k,
        })
        .collect();
    let auc = auc_trapezoid(&points.iter().map(|p| (p.fpr, p.tpr)).collect::<Vec<_>>())?;
    let finite: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.threshold.is_finite())
        .map(|p| (p.threshold, p.fpr, p.tpr))
        .collect();
    let best = best_youden(&finite).expect("thresholds are never empty");

    let fold_aucs: Vec<f64> = folds.iter().map(|f| f.auc).collect();
    let n_opts: Vec<f64> = folds.iter().map(|f| f.choice.n_opt).collect();
    let tprs: Vec<f64> = folds.iter().map(|f| f.choice.tpr).collect();
    let fprs: Vec<f64> = folds.iter().map(|f| f.choice.fpr).collect();
    let (n_opt_mean, n_opt_std) = mean_std(&n_opts);
    Ok(CrossValResult {
        curve: RocCurve {
            points,
            auc,
            best,
            s,
            mask: cfg.mask.clone(),
        },
        mean_fold_auc: fold_aucs.iter().sum::<f64>() / k,
        auc_std_err: std_error(&fold_aucs),
        n_opt_mean,
        n_opt_std,
        mean_tpr: tprs.iter().sum::<f64>() / k,
        tpr_std_err: std_error(&tprs),
        mean_fpr: fprs.iter().sum::<f64>() / k,
        fpr_std_err: std_error(&fprs),
        folds,
        plan,
    })
}

/// Shuffle labels among users (class counts preserved) for null-model checks.
pub fn permute_labels(data: &[Labeled], seed: u64) -> Vec<Labeled> {
    let mut labels: Vec<ClassLabel> = data.iter().map(|(_, _, l)| *l).collect();
    labels.shuffle(&mut seed::rng(seed::for_stage(seed, "permute")));
    data.iter()
        .zip(labels)
        .map(|((u, v, _), l)| (u.clone(), *v, l))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub s: usize,
    pub eligible: usize,
    pub auc: f64,
    pub mean_fold_auc: f64,
    pub auc_std_err: f64,
    pub mean_tpr: f64,
    pub tpr_std_err: f64,
    pub mean_fpr: f64,
    pub fpr_std_err: f64,
    pub n_opt: f64,
    pub n_opt_std: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BinSweep {
    pub rows: Vec<BinRow>,
    pub curves: Vec<RocCurve>,
    pub warnings: Vec<String>,
}

/// Default tweet bins 25, 50, ..., 500.
pub fn default_bins() -> Vec<usize> {
    (1..=20).map(|i| i * 25).collect()
}

/// Cross-validate at each bin size. Users with fewer tweets than a bin are
/// left out of that bin only; a bin that cannot be evaluated is skipped with
/// a warning.
pub fn bin_sweep(
    corpus: &Corpus,
    bins: &[usize],
    extract: &ExtractConfig,
    cv: &CrossValConfig,
) -> Result<BinSweep> {
    let mut out = BinSweep::default();
    for &s in bins {
        let cfg = ExtractConfig { s, ..*extract };
        let ext = extract_corpus(corpus, &cfg);
        let data = ext.labeled();
        if data.is_empty() {
            out.warnings.push(format!("bin s={s}: no eligible labeled users, skipped"));
            continue;
        }
        match crossval(&data, s, cv) {
            Ok(r) => {
                out.rows.push(bin_row(s, data.len(), &r));
                out.curves.push(r.curve);
            }
            Err(e) => out.warnings.push(format!("bin s={s}: {e}; skipped")),
        }
    }
    Ok(out)
}

pub fn bin_row(s: usize, eligible: usize, r: &CrossValResult) -> BinRow {
    BinRow {
        s,
        eligible,
        auc: r.curve.auc,
        mean_fold_auc: r.mean_fold_auc,
        auc_std_err: r.auc_std_err,
        mean_tpr: r.mean_tpr,
        tpr_std_err: r.tpr_std_err,
        mean_fpr: r.mean_fpr,
        fpr_std_err: r.fpr_std_err,
        n_opt: r.n_opt_mean,
        n_opt_std: r.n_opt_std,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fence {
    pub feature: Feature,
    pub mean: f64,
    pub std: f64,
    pub window: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserVerdict {
    pub user_id: String,
    pub label: Option<ClassLabel>,
    pub features: FeatureVector,
    pub verdict: Binary,
    pub z: BTreeMap<Feature, f64>,
    pub violated: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalReport {
    pub confusion: ConfusionReport,
    pub fences: Vec<Fence>,
    pub users: Vec<UserVerdict>,
}

/// Apply the calibrated model to every user and tabulate the outcome.
pub fn final_report(model: &OrganicModel, users: &[UserFeatures]) -> Result<FinalReport> {
    model.validate()?;
    let window = model
        .window
        .clone()
        .ok_or_else(|| Error::InvalidModel("model has no window set".into()))?;
    let verdicts: Vec<UserVerdict> = users
        .iter()
        .map(|u| {
            let v = model.classify_with(&u.features, &window);
            UserVerdict {
                user_id: u.user_id.clone(),
                label: u.label,
                features: u.features,
                verdict: v.binary,
                z: v.z,
                violated: v.violated,
            }
        })
        .collect();
    let confusion = ConfusionReport::from_outcomes(
        verdicts
            .iter()
            .filter_map(|u| u.label.map(|l| (l, u.verdict))),
    );
    let fences = model
        .mask
        .features()
        .iter()
        .map(|&f| {
            let st = model.stats[&f];
            let n = window.for_feature(f).unwrap_or(f64::INFINITY);
            Fence {
                feature: f,
                mean: st.mean,
                std: st.std,
                window: n,
                lower: st.mean - n * st.std,
                upper: st.mean + n * st.std,
            }
        })
        .collect();
    Ok(FinalReport {
        confusion,
        fences,
        users: verdicts,
    })
}

/// Calibrate on every organic user and set the window to the fold-averaged
/// optimum of `cv`, with its across-fold spread as the tuning sigma.
pub fn calibrated_model(data: &[Labeled], cfg: &CrossValConfig, cv: &CrossValResult) -> Result<OrganicModel> {
    let training: Vec<(FeatureVector, ClassLabel)> = data.iter().map(|(_, v, l)| (*v, *l)).collect();
    let mut model = calibrate(&training, &cfg.mask)?;
    model.sides = cfg.sides;
    model.sample_size = cv.curve.s;
    model.window = Some(Multiplier::Shared(cv.n_opt_mean));
    model.tuning_sigma = Some(Multiplier::Shared(cv.n_opt_std));
    model.provenance.seed = cfg.seed;
    model.provenance.folds = cfg.k;
    model.provenance.fold_n_opt = cv.folds.iter().map(|f| f.choice.n_opt).collect();
    model.provenance.fold_assignment = cv.plan.assignment.clone();
    Ok(model)
}

/// Per-feature windows: each feature's own fold-averaged optimum from a
/// single-feature cross-validation.
pub fn per_feature_windows(
    data: &[Labeled],
    s: usize,
    cfg: &CrossValConfig,
) -> Result<(BTreeMap<Feature, f64>, BTreeMap<Feature, f64>)> {
    let mut windows = BTreeMap::new();
    let mut sigmas = BTreeMap::new();
    for &f in cfg.mask.features() {
        let single = CrossValConfig {
            mask: FeatureMask::single(f),
            ..cfg.clone()
        };
        let r = crossval(data, s, &single)?;
        windows.insert(f, r.n_opt_mean);
        sigmas.insert(f, r.n_opt_std);
    }
    Ok((windows, sigmas))
}
