//! Tweet corpus ingestion, text cleaning and ordinal per-user sampling.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Gold annotation of an account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Human,
    Robot,
    Cyborg,
    Spammer,
}

/// Binary view of a [`ClassLabel`]; automatons are the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Binary {
    Organic,
    Automaton,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 4] = [
        ClassLabel::Human,
        ClassLabel::Robot,
        ClassLabel::Cyborg,
        ClassLabel::Spammer,
    ];

    pub fn binary(self) -> Binary {
        match self {
            ClassLabel::Human => Binary::Organic,
            _ => Binary::Automaton,
        }
    }

    pub fn is_organic(self) -> bool {
        self.binary() == Binary::Organic
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Human => "human",
            ClassLabel::Robot => "robot",
            ClassLabel::Cyborg => "cyborg",
            ClassLabel::Spammer => "spammer",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "human" => Ok(ClassLabel::Human),
            "robot" => Ok(ClassLabel::Robot),
            "cyborg" => Ok(ClassLabel::Cyborg),
            "spammer" => Ok(ClassLabel::Spammer),
            other => Err(Error::InvalidArgument(format!("unknown label `{other}`"))),
        }
    }
}

impl fmt::Display for Binary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binary::Organic => "organic",
            Binary::Automaton => "automaton",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub user_id: String,
    pub seq: u64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ClassLabel>,
}

/// `s` consecutive cleaned tweets of one user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSample {
    pub user_id: String,
    pub tweets: Vec<String>,
    /// Index of the first sampled tweet within the user's ordered records.
    pub origin: usize,
}

impl UserSample {
    pub fn new(user_id: impl Into<String>, tweets: Vec<String>) -> Self {
        UserSample {
            user_id: user_id.into(),
            tweets,
            origin: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Guess from the file extension; anything that is not `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

/// Counts gathered while loading; serialized into run reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub records: usize,
    pub users: usize,
    /// Malformed lines skipped in lenient mode.
    pub skipped: usize,
    /// Records whose text was empty after cleaning.
    pub dropped_empty: usize,
    pub per_user: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

/// Records grouped by user and sorted by `seq`. Immutable once loaded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    users: BTreeMap<String, Vec<TweetRecord>>,
    labels: BTreeMap<String, ClassLabel>,
    pub report: LoadReport,
}

impl Corpus {
    /// Build a corpus from in-memory records. Conflicting labels or duplicate
    /// `seq` values within a user are errors.
    pub fn from_records(records: impl IntoIterator<Item = TweetRecord>) -> Result<Corpus> {
        let mut builder = Builder::new(PathBuf::from("<memory>"), Strictness::Strict);
        for (i, rec) in records.into_iter().enumerate() {
            builder.push(i + 1, rec)?;
        }
        Ok(builder.finish())
    }

    pub fn users(&self) -> impl Iterator<Item = (&str, &[TweetRecord])> {
        self.users.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn user_ids(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }

    pub fn records(&self, user_id: &str) -> Option<&[TweetRecord]> {
        self.users.get(user_id).map(Vec::as_slice)
    }

    pub fn label(&self, user_id: &str) -> Option<ClassLabel> {
        self.labels.get(user_id).copied()
    }

    pub fn labels(&self) -> &BTreeMap<String, ClassLabel> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        self.users.iter().map(|(k, v)| (k.clone(), v.len())).collect()
    }
}

/// Collapse whitespace runs to a single space and trim both ends.
pub fn clean_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    user_id: String,
    #[serde(default)]
    seq: Option<u64>,
    text: String,
    #[serde(default)]
    label: Option<String>,
}

struct Builder {
    path: PathBuf,
    strictness: Strictness,
    users: BTreeMap<String, Vec<TweetRecord>>,
    labels: BTreeMap<String, ClassLabel>,
    seen: HashSet<(String, u64)>,
    report: LoadReport,
}

impl Builder {
    fn new(path: PathBuf, strictness: Strictness) -> Self {
        Builder {
            path,
            strictness,
            users: BTreeMap::new(),
            labels: BTreeMap::new(),
            seen: HashSet::new(),
            report: LoadReport::default(),
        }
    }

    fn malformed(&mut self, line: usize, message: String) -> Result<()> {
        match self.strictness {
            Strictness::Strict => Err(Error::Malformed {
                path: self.path.clone(),
                line,
                message,
            }),
            Strictness::Lenient => {
                self.report.skipped += 1;
                Ok(())
            }
        }
    }

    fn push_raw(&mut self, line: usize, raw: RawRecord) -> Result<()> {
        let label = match raw.label.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => match s.parse::<ClassLabel>() {
                Ok(l) => Some(l),
                Err(e) => return self.malformed(line, e.to_string()),
            },
        };
        let rec = TweetRecord {
            user_id: raw.user_id,
            // Line order stands in for time order when no seq is given.
            seq: raw.seq.unwrap_or(line as u64),
            text: raw.text,
            label,
        };
        self.push(line, rec)
    }

    fn push(&mut self, line: usize, rec: TweetRecord) -> Result<()> {
        if rec.user_id.is_empty() {
            return self.malformed(line, "empty user_id".into());
        }
        if !self.seen.insert((rec.user_id.clone(), rec.seq)) {
            return self.malformed(
                line,
                format!("duplicate seq {} for user {}", rec.seq, rec.user_id),
            );
        }
        if let Some(label) = rec.label {
            match self.labels.get(&rec.user_id) {
                Some(&prev) if prev != label => {
                    return self.malformed(
                        line,
                        format!("user {} labeled both {prev} and {label}", rec.user_id),
                    );
                }
                Some(_) => {}
                None => {
                    self.labels.insert(rec.user_id.clone(), label);
                }
            }
        }
        if clean_text(&rec.text).is_empty() {
            self.report.dropped_empty += 1;
            return Ok(());
        }
        self.users.entry(rec.user_id.clone()).or_default().push(rec);
        Ok(())
    }

    fn finish(mut self) -> Corpus {
        for recs in self.users.values_mut() {
            recs.sort_by_key(|r| r.seq);
        }
        // Labels of users whose every record was dropped are meaningless.
        self.labels.retain(|u, _| self.users.contains_key(u));
        self.report.users = self.users.len();
        self.report.records = self.users.values().map(Vec::len).sum();
        self.report.per_user = self
            .users
            .iter()
            .map(|(k, v)| (k.clone(), v.len()))
            .collect();
        if self.users.is_empty() {
            self.report
                .warnings
                .push(format!("{}: no records loaded", self.path.display()));
        }
        Corpus {
            users: self.users,
            labels: self.labels,
            report: self.report,
        }
    }
}

/// Load a JSONL or CSV corpus. See the README for the record schema.
pub fn load_corpus(path: &Path, format: Format, strictness: Strictness) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut builder = Builder::new(path.to_path_buf(), strictness);
    match format {
        Format::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let lineno = i + 1;
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<RawRecord>(&line) {
                    Ok(raw) => builder.push_raw(lineno, raw)?,
                    Err(e) => builder.malformed(lineno, e.to_string())?,
                }
            }
        }
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
            let headers = reader.headers()?.clone();
            for required in ["user_id", "text"] {
                if !headers.iter().any(|h| h == required) {
                    return Err(Error::Malformed {
                        path: path.to_path_buf(),
                        line: 1,
                        message: format!("missing `{required}` column in header"),
                    });
                }
            }
            for (i, row) in reader.records().enumerate() {
                // Header is line 1; fall back to row index when the reader has no position.
                let fallback = i + 2;
                let row = match row {
                    Ok(r) => r,
                    Err(e) => {
                        let line = e
                            .position()
                            .map(|p| p.line() as usize)
                            .unwrap_or(fallback);
                        builder.malformed(line, e.to_string())?;
                        continue;
                    }
                };
                let line = row
                    .position()
                    .map(|p| p.line() as usize)
                    .unwrap_or(fallback);
                match row.deserialize::<RawRecord>(Some(&headers)) {
                    Ok(raw) => builder.push_raw(line, raw)?,
                    Err(e) => builder.malformed(line, e.to_string())?,
                }
            }
        }
    }
    Ok(builder.finish())
}

/// Load the public Social Honeypot tweet dump (`legitimate_users_tweets.txt`
/// and `content_polluters_tweets.txt`, tab-separated
/// `user_id, tweet_id, text, created_at`). Legitimate users are labeled
/// human, content polluters spammer. Malformed lines are skipped and counted.
pub fn load_honeypot(dir: &Path) -> Result<Corpus> {
    let sources = [
        ("legitimate_users_tweets.txt", "legit", ClassLabel::Human),
        ("content_polluters_tweets.txt", "polluter", ClassLabel::Spammer),
    ];
    let mut builder = Builder::new(dir.to_path_buf(), Strictness::Lenient);
    for (file, prefix, label) in sources {
        let path = dir.join(file);
        let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut rows: Vec<(String, String, u64, String)> = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            let fields: Vec<&str> = line.split('\t').collect();
            let parsed = match fields.as_slice() {
                [user, tweet_id, text, created] => tweet_id
                    .trim()
                    .parse::<u64>()
                    .ok()
                    .map(|id| (format!("{prefix}:{}", user.trim()), created.to_string(), id, text.to_string())),
                _ => None,
            };
            match parsed {
                Some(row) => rows.push(row),
                None => builder.malformed(i + 1, "expected 4 tab-separated fields".into())?,
            }
        }
        rows.sort();
        let mut ordinal: BTreeMap<String, u64> = BTreeMap::new();
        for (line, (user, _, _, text)) in rows.into_iter().enumerate() {
            let seq = ordinal.entry(user.clone()).or_insert(0);
            let rec = TweetRecord {
                user_id: user,
                seq: *seq,
                text,
                label: Some(label),
            };
            *seq += 1;
            builder.push(line + 1, rec)?;
        }
    }
    Ok(builder.finish())
}

/// Take `s` consecutive cleaned tweets from a uniformly random start in
/// `[0, records.len() - s]`. Records must already be in `seq` order.
pub fn sample_user(records: &[TweetRecord], s: usize, rng_seed: u64) -> Result<UserSample> {
    if s == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    if records.len() < s {
        return Err(Error::InsufficientSample {
            got: records.len(),
            need: s,
        });
    }
    let max_origin = records.len() - s;
    let origin = if max_origin == 0 {
        0
    } else {
        seed::rng(rng_seed).random_range(0..=max_origin)
    };
    Ok(UserSample {
        user_id: records[0].user_id.clone(),
        tweets: records[origin..origin + s]
            .iter()
            .map(|r| clean_text(&r.text))
            .collect(),
        origin,
    })
}
