//! Command-line surface. Argument parsing lives here (not in `main`) so the
//! commands can be driven from tests.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classifier::{FeatureMask, Grid, Multiplier, OrganicModel, Sides};
use crate::corpus::{load_corpus, Corpus, Format, LoadReport, Strictness};
use crate::error::{Error, Result};
use crate::evaluation::{
    bin_row, bin_sweep, calibrated_model, crossval, final_report, per_feature_windows, BinRow,
    ConfusionReport, CrossValConfig, FinalReport, RocCurve,
};
use crate::extract::{extract_corpus, write_features_csv, Exclusion, ExtractConfig};
use crate::report::{
    auc_by_bin_svg, roc_svg, write_auc_by_bin_csv, write_fences_csv, write_file, write_json,
    write_roc_csv, write_verdicts_csv,
};
use crate::synth::{gen_corpus, ClassMix, ManifestEntry};
use crate::text_features::{DissimilarityConfig, LcsMode, UrlMode};
use crate::word_intro::{Estimator, GammaConfig, DEFAULT_REPLICATES};

pub const DEFAULT_TWEETS: usize = 400;
pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "orgsift", version, about = "Flag automated text accounts from their language alone")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus.
    Gen(GenArgs),
    /// Compute per-user features.
    Extract(RunArgs),
    /// Cross-validate and write a calibrated model.
    Calibrate(CalibrateArgs),
    /// Cross-validated ROC and AUC, optionally over several tweet bins.
    Crossval(CrossvalArgs),
    /// Apply a model to a corpus.
    Classify(ModelArgs),
    /// Apply a model and write confusion counts and fence positions.
    Report(ModelArgs),
}

/// Flags shared by every command that reads a corpus.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    /// Tweets sampled per user.
    #[arg(long = "tweets", short = 's')]
    pub tweets: Option<usize>,
    #[arg(long, short = 'k', default_value_t = DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, env = "ORGSIFT_SEED")]
    pub seed: Option<u64>,
    /// Comma-separated feature names: dissimilarity, gamma, url.
    #[arg(long)]
    pub mask: Option<FeatureMask>,
    #[arg(long)]
    pub lcs_mode: Option<LcsMode>,
    #[arg(long)]
    pub url_mode: Option<UrlMode>,
    #[arg(long)]
    pub gamma_estimator: Option<Estimator>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Threshold grid `lo:hi:step`.
    #[arg(long, default_value = "0:10:0.05")]
    pub grid: Grid,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Reject malformed input lines (`--strict false` skips and counts them).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub strict: bool,
    /// Count only deviations in each feature's suspicious direction.
    #[arg(long)]
    pub one_sided: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    /// Tweets per generated user.
    #[arg(long = "tweets", short = 's', default_value_t = DEFAULT_TWEETS)]
    pub tweets: usize,
    #[arg(long, env = "ORGSIFT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 120)]
    pub human: usize,
    #[arg(long, default_value_t = 30)]
    pub robot: usize,
    #[arg(long, default_value_t = 30)]
    pub cyborg: usize,
    #[arg(long, default_value_t = 20)]
    pub spammer: usize,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Tweet bins: `25..500:25`, `25..100` (step 25) or a comma list.
    #[arg(long)]
    pub bins: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Tune one window per feature instead of a shared one.
    #[arg(long)]
    pub per_feature_windows: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub model: PathBuf,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub extract: ExtractConfig,
    pub cv: CrossValConfig,
    pub bins: Option<Vec<usize>>,
    /// Never affects output, so not recorded.
    #[serde(skip)]
    pub workers: Option<usize>,
    pub strict: bool,
}

impl RunConfig {
    pub fn from_args(command: &str, a: &RunArgs) -> Result<RunConfig> {
        let seed = a.seed.unwrap_or(0);
        let s = a.tweets.unwrap_or(DEFAULT_TWEETS);
        if s < 2 {
            return Err(Error::InvalidArgument("--tweets must be at least 2".into()));
        }
        if a.workers == Some(0) {
            return Err(Error::InvalidArgument("--workers must be positive".into()));
        }
        let replicates = a.replicates.unwrap_or(DEFAULT_REPLICATES);
        if replicates == 0 {
            return Err(Error::InvalidArgument("--replicates must be positive".into()));
        }
        let extract = ExtractConfig {
            s,
            dissimilarity: DissimilarityConfig {
                mode: a.lcs_mode.unwrap_or_default(),
                ..Default::default()
            },
            url_mode: a.url_mode.unwrap_or_default(),
            gamma: GammaConfig {
                estimator: a.gamma_estimator.unwrap_or_default(),
                replicates,
            },
            seed,
        };
        let cv = CrossValConfig {
            k: a.folds,
            grid: a.grid,
            seed,
            mask: a.mask.clone().unwrap_or_else(FeatureMask::all),
            sides: if a.one_sided { Sides::OneSided } else { Sides::TwoSided },
        };
        Ok(RunConfig {
            command: command.to_string(),
            input: a.input.clone(),
            output_dir: a.output_dir.clone(),
            extract,
            cv,
            bins: None,
            workers: a.workers,
            strict: a.strict,
        })
    }

    /// Everything that affects numerical output. Paths and worker count are
    /// left out on purpose.
    pub fn fingerprint(&self) -> String {
        let s = match &self.bins {
            Some(b) => b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            None => self.extract.s.to_string(),
        };
        let sides = match self.cv.sides {
            Sides::TwoSided => "two",
            Sides::OneSided => "one",
        };
        format!(
            "{};s={};k={};seed={};mask={};grid={};sides={}",
            self.extract.fingerprint(),
            s,
            self.cv.k,
            self.extract.seed,
            self.cv.mask,
            self.cv.grid,
            sides
        )
    }

    fn load(&self) -> Result<Corpus> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--input is required".into()))?;
        let strictness = if self.strict {
            Strictness::Strict
        } else {
            Strictness::Lenient
        };
        load_corpus(path, Format::from_path(path), strictness)
    }

    fn out(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.output_dir).map_err(|e| Error::io(&self.output_dir, e))?;
        Ok(self.output_dir.join(name))
    }
}

/// `25..500:25`, `25..100` (step 25), or `25,50,400`.
pub fn parse_bins(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bins `{s}` are not `lo..hi:step` or a comma list"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let bins: Vec<usize> = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, st)) => (num(h)?, num(st)?),
            None => (num(rest)?, 25),
        };
        let lo = num(lo)?;
        if step == 0 || hi < lo {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if bins.is_empty() || bins.iter().any(|&b| b < 2) {
        return Err(bad());
    }
    Ok(bins)
}

#[derive(Serialize)]
struct RunReport<'a, T: Serialize> {
    fingerprint: String,
    config: &'a RunConfig,
    load: &'a LoadReport,
    excluded: &'a [Exclusion],
    #[serde(flatten)]
    extra: T,
}

fn write_run_report<T: Serialize>(
    cfg: &RunConfig,
    load: &LoadReport,
    excluded: &[Exclusion],
    extra: T,
) -> Result<PathBuf> {
    let path = cfg.out("run_report.json")?;
    let report = RunReport {
        fingerprint: cfg.fingerprint(),
        config: cfg,
        load,
        excluded,
        extra,
    };
    write_json(&report, &path)?;
    Ok(path)
}

fn with_csv<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(BufWriter<fs::File>) -> Result<()>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f(BufWriter::new(file))
}

/// What a command produced, for the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn cmd_gen(a: &GenArgs) -> Result<Outcome> {
    if a.tweets == 0 {
        return Err(Error::InvalidArgument("--tweets must be positive".into()));
    }
    let mix = ClassMix {
        human: a.human,
        robot: a.robot,
        cyborg: a.cyborg,
        spammer: a.spammer,
    };
    let syn = gen_corpus(&mix, a.tweets, a.seed);
    fs::create_dir_all(&a.output_dir).map_err(|e| Error::io(&a.output_dir, e))?;
    let corpus_path = a.output_dir.join("corpus.jsonl");
    with_csv(&corpus_path, |w| syn.write_jsonl(w))?;

    #[derive(Serialize)]
    struct Manifest<'a> {
        fingerprint: String,
        mix: ClassMix,
        tweets_per_user: usize,
        seed: u64,
        users: &'a [ManifestEntry],
    }
    let manifest_path = a.output_dir.join("manifest.json");
    let fingerprint = format!(
        "gen;human={};robot={};cyborg={};spammer={};tweets={};seed={}",
        mix.human, mix.robot, mix.cyborg, mix.spammer, a.tweets, a.seed
    );
    write_json(
        &Manifest {
            fingerprint,
            mix,
            tweets_per_user: a.tweets,
            seed: a.seed,
            users: &syn.manifest,
        },
        &manifest_path,
    )?;
    Ok(Outcome {
        lines: vec![format!(
            "generated {} users, {} records",
            syn.manifest.len(),
            syn.records.len()
        )],
        files: vec![corpus_path, manifest_path],
    })
}

pub fn cmd_extract(cfg: &RunConfig) -> Result<Outcome> {
    let corpus = cfg.load()?;
    let ext = extract_corpus(&corpus, &cfg.extract);
    let fp = cfg.fingerprint();
    let path = cfg.out("features.csv")?;
    with_csv(&path, |w| write_features_csv(&ext.rows, &fp, w))?;
    #[derive(Serialize)]
    struct Extra {
        rows: usize,
    }
    let report = write_run_report(cfg, &corpus.report, &ext.excluded, Extra { rows: ext.rows.len() })?;
    Ok(Outcome {
        lines: vec![format!(
            "extracted {} users, excluded {}",
            ext.rows.len(),
            ext.excluded.len()
        )],
        files: vec![path, report],
    })
}

/// Pool per-fold outcomes into one confusion table.
fn pooled(reports: &[&ConfusionReport]) -> ConfusionReport {
    use crate::corpus::Binary;
    let mut outcomes = Vec::new();
    for r in reports {
        for (&label, c) in &r.per_class {
            outcomes.extend(std::iter::repeat_n((label, Binary::Automaton), c.flagged));
            outcomes.extend(std::iter::repeat_n((label, Binary::Organic), c.total - c.flagged));
        }
    }
    ConfusionReport::from_outcomes(outcomes)
}

fn write_curves(cfg: &RunConfig, curves: &[RocCurve], rows: &[BinRow], out: &mut Outcome) -> Result<()> {
    let fp = cfg.fingerprint();
    let roc = cfg.out("roc.csv")?;
    with_csv(&roc, |w| write_roc_csv(curves, &fp, w))?;
    let bins = cfg.out("auc_by_bin.csv")?;
    with_csv(&bins, |w| write_auc_by_bin_csv(rows, &cfg.cv.mask, &fp, w))?;
    let roc_chart = cfg.out("roc.svg")?;
    write_file(&roc_chart, &roc_svg(curves, &fp))?;
    let bin_chart = cfg.out("auc_by_bin.svg")?;
    write_file(&bin_chart, &auc_by_bin_svg(rows, &fp))?;
    out.files.extend([roc, bins, roc_chart, bin_chart]);
    Ok(())
}

pub fn cmd_crossval(cfg: &RunConfig) -> Result<Outcome> {
    let corpus = cfg.load()?;
    let fp = cfg.fingerprint();
    let mut out = Outcome::default();
    if let Some(bins) = &cfg.bins {
        let sweep = bin_sweep(&corpus, bins, &cfg.extract, &cfg.cv)?;
        if sweep.rows.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no bin could be evaluated: {}",
                sweep.warnings.join("; ")
            )));
        }
        write_curves(cfg, &sweep.curves, &sweep.rows, &mut out)?;
        #[derive(Serialize)]
        struct Extra<'a> {
            bins: &'a [BinRow],
            warnings: &'a [String],
        }
        out.files.push(write_run_report(
            cfg,
            &corpus.report,
            &[],
            Extra {
                bins: &sweep.rows,
                warnings: &sweep.warnings,
            },
        )?);
        for r in &sweep.rows {
            out.lines.push(format!(
                "s={} users={} AUC={:.4} (fold se {:.4}) n_opt={:.2}",
                r.s, r.eligible, r.auc, r.auc_std_err, r.n_opt
            ));
        }
        out.lines.extend(sweep.warnings.iter().map(|w| format!("warning: {w}")));
        return Ok(out);
    }

    let ext = extract_corpus(&corpus, &cfg.extract);
    let data = ext.labeled();
    let r = crossval(&data, cfg.extract.s, &cfg.cv)?;
    let row = bin_row(cfg.extract.s, data.len(), &r);
    write_curves(cfg, std::slice::from_ref(&r.curve), std::slice::from_ref(&row), &mut out)?;

    #[derive(Serialize)]
    struct FoldConfusion<'a> {
        fold: usize,
        n_opt: f64,
        auc: f64,
        confusion: &'a ConfusionReport,
    }
    #[derive(Serialize)]
    struct Confusion<'a> {
        fingerprint: &'a str,
        pooled: ConfusionReport,
        folds: Vec<FoldConfusion<'a>>,
    }
    let confusion = Confusion {
        fingerprint: &fp,
        pooled: pooled(&r.folds.iter().map(|f| &f.confusion).collect::<Vec<_>>()),
        folds: r
            .folds
            .iter()
            .map(|f| FoldConfusion {
                fold: f.fold,
                n_opt: f.choice.n_opt,
                auc: f.auc,
                confusion: &f.confusion,
            })
            .collect(),
    };
    let cpath = cfg.out("confusion.json")?;
    write_json(&confusion, &cpath)?;
    out.files.push(cpath);
    #[derive(Serialize)]
    struct Extra<'a> {
        bins: &'a [BinRow],
    }
    out.files.push(write_run_report(
        cfg,
        &corpus.report,
        &ext.excluded,
        Extra {
            bins: std::slice::from_ref(&row),
        },
    )?);
    out.lines.push(format!(
        "s={} mask={} users={} AUC={:.4} (fold se {:.4}) n_opt={:.2}±{:.2}",
        cfg.extract.s,
        cfg.cv.mask,
        data.len(),
        r.curve.auc,
        r.auc_std_err,
        r.n_opt_mean,
        r.n_opt_std
    ));
    Ok(out)
}

pub fn cmd_calibrate(cfg: &RunConfig, per_feature: bool) -> Result<Outcome> {
    let corpus = cfg.load()?;
    let ext = extract_corpus(&corpus, &cfg.extract);
    let data = ext.labeled();
    let r = crossval(&data, cfg.extract.s, &cfg.cv)?;
    let mut model = calibrated_model(&data, &cfg.cv, &r)?;
    if per_feature {
        let (windows, sigmas) = per_feature_windows(&data, cfg.extract.s, &cfg.cv)?;
        model.window = Some(Multiplier::PerFeature(windows));
        model.tuning_sigma = Some(Multiplier::PerFeature(sigmas));
    }
    model.fingerprint = cfg.extract.fingerprint();
    model.provenance.config = cfg.fingerprint();
    model.validate()?;
    let path = cfg.out("model.json")?;
    model.save(&path)?;
    #[derive(Serialize)]
    struct Extra {
        users: usize,
        auc: f64,
    }
    let report = write_run_report(
        cfg,
        &corpus.report,
        &ext.excluded,
        Extra {
            users: data.len(),
            auc: r.curve.auc,
        },
    )?;
    let window = match &model.window {
        Some(Multiplier::Shared(n)) => format!("{n:.3}"),
        Some(Multiplier::PerFeature(m)) => m
            .iter()
            .map(|(f, n)| format!("{f}={n:.3}"))
            .collect::<Vec<_>>()
            .join(","),
        None => "-".into(),
    };
    Ok(Outcome {
        lines: vec![format!("calibrated on {} users: window {window}, AUC={:.4}", data.len(), r.curve.auc)],
        files: vec![path, report],
    })
}

/// Resolve the run against a stored model: the mask must match exactly (the
/// window was tuned for it) and feature settings must agree with the model.
fn model_config(a: &RunArgs, command: &str, model: &OrganicModel) -> Result<RunConfig> {
    if let Some(mask) = &a.mask {
        if *mask != model.mask {
            return Err(Error::MaskMismatch {
                requested: mask.to_string(),
                model: model.mask.to_string(),
            });
        }
    }
    let fp = &model.fingerprint;
    let conflict = |flag: &str, given: String, stored: String| {
        Error::InvalidArgument(format!("--{flag} {given} conflicts with the model ({stored})"))
    };
    if let Some(m) = a.lcs_mode.filter(|m| *m != fp.lcs_mode) {
        return Err(conflict("lcs-mode", m.to_string(), fp.lcs_mode.to_string()));
    }
    if let Some(m) = a.url_mode.filter(|m| *m != fp.url_mode) {
        return Err(conflict("url-mode", m.to_string(), fp.url_mode.to_string()));
    }
    if let Some(m) = a.gamma_estimator.filter(|m| *m != fp.gamma_estimator) {
        return Err(conflict("gamma-estimator", m.to_string(), fp.gamma_estimator.to_string()));
    }
    if let Some(r) = a.replicates.filter(|r| *r != fp.replicates) {
        return Err(conflict("replicates", r.to_string(), fp.replicates.to_string()));
    }
    let resolved = RunArgs {
        tweets: a.tweets.or(Some(model.sample_size)),
        seed: a.seed.or(Some(model.provenance.seed)),
        mask: Some(model.mask.clone()),
        lcs_mode: Some(fp.lcs_mode),
        url_mode: Some(fp.url_mode),
        gamma_estimator: Some(fp.gamma_estimator),
        replicates: Some(fp.replicates),
        one_sided: model.sides == Sides::OneSided,
        ..a.clone()
    };
    let mut cfg = RunConfig::from_args(command, &resolved)?;
    cfg.extract.dissimilarity.case_fold = fp.case_fold;
    Ok(cfg)
}

fn apply_model(a: &ModelArgs, command: &str) -> Result<(RunConfig, Corpus, Vec<Exclusion>, FinalReport)> {
    let model = OrganicModel::load(&a.model)?;
    let cfg = model_config(&a.run, command, &model)?;
    let corpus = cfg.load()?;
    let ext = extract_corpus(&corpus, &cfg.extract);
    let report = final_report(&model, &ext.rows)?;
    Ok((cfg, corpus, ext.excluded, report))
}

#[derive(Serialize)]
struct ConfusionDoc<'a> {
    fingerprint: &'a str,
    confusion: &'a ConfusionReport,
}

pub fn cmd_classify(a: &ModelArgs) -> Result<Outcome> {
    let (cfg, corpus, excluded, report) = apply_model(a, "classify")?;
    let fp = cfg.fingerprint();
    let mut out = Outcome::default();
    let vpath = cfg.out("verdicts.csv")?;
    with_csv(&vpath, |w| write_verdicts_csv(&report.users, &fp, w))?;
    out.files.push(vpath);
    if report.confusion.total() > 0 {
        let cpath = cfg.out("confusion.json")?;
        write_json(
            &ConfusionDoc {
                fingerprint: &fp,
                confusion: &report.confusion,
            },
            &cpath,
        )?;
        out.files.push(cpath);
    }
    let flagged = report.users.iter().filter(|u| u.verdict == crate::corpus::Binary::Automaton).count();
    out.files.push(write_run_report(&cfg, &corpus.report, &excluded, ())?);
    out.lines.push(format!("classified {} users, {flagged} flagged", report.users.len()));
    Ok(out)
}

pub fn cmd_report(a: &ModelArgs) -> Result<Outcome> {
    let (cfg, corpus, excluded, report) = apply_model(a, "report")?;
    if report.confusion.total() == 0 {
        return Err(Error::InvalidArgument("report needs a labeled corpus".into()));
    }
    let fp = cfg.fingerprint();
    let mut out = Outcome::default();
    let cpath = cfg.out("confusion.json")?;
    write_json(
        &ConfusionDoc {
            fingerprint: &fp,
            confusion: &report.confusion,
        },
        &cpath,
    )?;
    let fpath = cfg.out("fences.csv")?;
    with_csv(&fpath, |w| write_fences_csv(&report.fences, &fp, w))?;
    let vpath = cfg.out("verdicts.csv")?;
    with_csv(&vpath, |w| write_verdicts_csv(&report.users, &fp, w))?;
    out.files.extend([cpath, fpath, vpath]);
    out.files.push(write_run_report(&cfg, &corpus.report, &excluded, ())?);
    let c = &report.confusion;
    out.lines.push(format!(
        "organic recall {:.4}, automaton recall {:.4} (tp {} fp {} tn {} fn {})",
        c.organic_recall, c.automaton_recall, c.tp, c.fp, c.tn, c.fn_
    ));
    Ok(out)
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {n} workers: {e}")))?
            .install(f),
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen(a) => with_workers(a.workers, || cmd_gen(&a)),
        Command::Extract(a) => {
            let cfg = RunConfig::from_args("extract", &a)?;
            with_workers(cfg.workers, || cmd_extract(&cfg))
        }
        Command::Calibrate(a) => {
            let cfg = RunConfig::from_args("calibrate", &a.run)?;
            with_workers(cfg.workers, || cmd_calibrate(&cfg, a.per_feature_windows))
        }
        Command::Crossval(a) => {
            let mut cfg = RunConfig::from_args("crossval", &a.run)?;
            cfg.bins = a.bins.as_deref().map(parse_bins).transpose()?;
            with_workers(cfg.workers, || cmd_crossval(&cfg))
        }
        Command::Classify(a) => with_workers(a.run.workers, || cmd_classify(&a)),
        Command::Report(a) => with_workers(a.run.workers, || cmd_report(&a)),
    }
}

/// Process exit code for an error: 2 for bad input, 3 for degenerate statistics.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_degenerate() {
        3
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins() {
        assert_eq!(parse_bins("25..100:25").unwrap(), vec![25, 50, 75, 100]);
        assert_eq!(parse_bins("25..75").unwrap(), vec![25, 50, 75]);
        assert_eq!(parse_bins("400, 25").unwrap(), vec![400, 25]);
        assert!(parse_bins("10..5").is_err());
        assert!(parse_bins("a").is_err());
        assert!(parse_bins("1").is_err());
    }

    #[test]
    fn defaults_are_recorded() {
        let cli = Cli::try_parse_from(["orgsift", "extract", "--input", "x.jsonl"]).unwrap();
        let Command::Extract(a) = cli.command else { panic!() };
        let cfg = RunConfig::from_args("extract", &a).unwrap();
        assert_eq!(cfg.extract.s, 400);
        assert_eq!(cfg.cv.k, 10);
        assert!(cfg.strict);
        assert_eq!(
            cfg.fingerprint(),
            "lcs=subsequence;fold=1;url=extended;gamma=mc;R=100;tok=v1;s=400;k=10;seed=0;mask=dissimilarity,gamma,url;grid=0:10:0.05;sides=two"
        );
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "orgsift", "crossval", "--input", "c.csv", "-s", "50", "-k", "5", "--seed", "9", "--mask", "url,lcs",
            "--lcs-mode", "substring", "--url-mode", "paper", "--gamma-estimator", "analytic", "--replicates", "7",
            "--grid", "0:5:0.5", "--workers", "2", "--strict", "false", "--bins", "25,50",
        ])
        .unwrap();
        let Command::Crossval(a) = cli.command else { panic!() };
        let cfg = RunConfig::from_args("crossval", &a.run).unwrap();
        assert_eq!(cfg.extract.s, 50);
        assert_eq!(cfg.cv.k, 5);
        assert_eq!(cfg.extract.seed, 9);
        assert_eq!(cfg.cv.mask.to_string(), "dissimilarity,url");
        assert_eq!(cfg.extract.dissimilarity.mode, LcsMode::Substring);
        assert_eq!(cfg.extract.url_mode, UrlMode::Paper);
        assert_eq!(cfg.extract.gamma.estimator, Estimator::Analytic);
        assert_eq!(cfg.extract.gamma.replicates, 7);
        assert_eq!(cfg.cv.grid.to_string(), "0:5:0.5");
        assert_eq!(cfg.workers, Some(2));
        assert!(!cfg.strict);
        assert_eq!(a.bins.as_deref(), Some("25,50"));
    }

    #[test]
    fn bad_flag_values_are_rejected() {
        assert!(Cli::try_parse_from(["orgsift", "extract", "--mask", "colour"]).is_err());
        assert!(Cli::try_parse_from(["orgsift", "extract", "--grid", "1:0:1"]).is_err());
        assert!(Cli::try_parse_from(["orgsift", "extract", "--lcs-mode", "fuzzy"]).is_err());
    }

    #[test]
    fn exit_codes_split_input_from_degenerate() {
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 2);
        assert_eq!(exit_code(&Error::SingleClass), 3);
    }
}
