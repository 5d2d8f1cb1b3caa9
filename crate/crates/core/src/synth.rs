//! Labeled synthetic corpora emulating human, robot, cyborg and spammer
//! accounts, for exercising the pipeline without the original datasets.
//!
//! Templates paraphrase the kinds of messages each class produces: structured
//! weather / scanner / trend updates for robots, truncated borrowed headlines
//! and job posts ending in a link for cyborgs, and bursts of near-identical
//! follow requests for spammers.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Zipf};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClassLabel, TweetRecord};
use crate::error::{Error, Result};
use crate::seed;

/// Upper bound on character substitutions applied to one burst tweet.
pub const MAX_MUTATIONS: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class: ClassLabel,
    pub vocabulary_size: usize,
    /// Zipf exponent of word ranks in free text.
    pub zipf_exponent: f64,
    /// Mean words per free-text message.
    pub mean_words: f64,
    pub template_set: Vec<String>,
    pub url_probability: f64,
    /// Per-character substitution probability inside spam bursts.
    pub mutation_rate: f64,
    /// Longest spam burst; bursts are `burst_len / 2 ..= burst_len` tweets.
    pub burst_len: usize,
    /// Expected share of tweets belonging to bursts.
    pub burst_fraction: f64,
    /// Spam comes in campaigns: the local burst share swings by this relative
    /// amount around `burst_fraction` over a cycle of `burst_cycle` tweets.
    pub burst_swing: f64,
    pub burst_cycle: usize,
    /// Share of borrowed headlines (the rest are job posts) for cyborgs.
    pub headline_fraction: f64,
    pub tweets_per_user: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(self.url_probability)
            && unit(self.mutation_rate)
            && unit(self.burst_fraction)
            && unit(self.burst_swing)
            && unit(self.headline_fraction))
        {
            return Err(Error::InvalidArgument("probabilities must lie in [0, 1]".into()));
        }
        if self.vocabulary_size == 0 {
            return Err(Error::InvalidArgument("vocabulary_size must be at least 1".into()));
        }
        if self.class == ClassLabel::Spammer && self.burst_len == 0 {
            return Err(Error::InvalidArgument("burst_len must be positive".into()));
        }
        Ok(())
    }

    /// Default parameters for a class, without per-user jitter.
    pub fn for_class(class: ClassLabel, tweets_per_user: usize, seed: u64) -> GeneratorSpec {
        let base = GeneratorSpec {
            class,
            vocabulary_size: 6000,
            zipf_exponent: 1.0,
            mean_words: 9.0,
            template_set: Vec::new(),
            url_probability: 0.03,
            mutation_rate: 0.0,
            burst_len: 0,
            burst_fraction: 0.0,
            burst_swing: 0.0,
            burst_cycle: 0,
            headline_fraction: 0.0,
            tweets_per_user,
            seed,
        };
        match class {
            ClassLabel::Human => base,
            ClassLabel::Robot => GeneratorSpec {
                vocabulary_size: 40,
                template_set: vec![ROBOT_TEMPLATES[0].to_string()],
                url_probability: 0.0,
                ..base
            },
            ClassLabel::Cyborg => GeneratorSpec {
                vocabulary_size: 8000,
                zipf_exponent: 0.9,
                mean_words: 16.0,
                url_probability: 0.9,
                headline_fraction: 0.8,
                ..base
            },
            ClassLabel::Spammer => GeneratorSpec {
                template_set: vec![SPAM_TEMPLATES[0].to_string()],
                mutation_rate: 0.02,
                burst_len: 10,
                burst_fraction: 0.45,
                burst_swing: 0.8,
                burst_cycle: 800,
                ..base
            },
        }
    }

    /// Class defaults with per-user parameter jitter drawn from `rng`.
    pub fn jittered(class: ClassLabel, tweets_per_user: usize, seed: u64, rng: &mut impl Rng) -> GeneratorSpec {
        let mut spec = GeneratorSpec::for_class(class, tweets_per_user, seed);
        match class {
            ClassLabel::Human => {
                spec.zipf_exponent = rng.random_range(1.0..1.06);
                spec.mean_words = rng.random_range(8.0..10.0);
                spec.url_probability = rng.random_range(0.0..0.08);
            }
            ClassLabel::Robot => {
                let t = ROBOT_TEMPLATES.choose(rng).expect("non-empty");
                spec.template_set = vec![t.to_string()];
                spec.url_probability = if t.contains("{url}") { 1.0 } else { 0.0 };
            }
            ClassLabel::Cyborg => {
                spec.url_probability = rng.random_range(0.8..1.0);
                spec.headline_fraction = rng.random_range(0.6..1.0);
            }
            ClassLabel::Spammer => {
                spec.zipf_exponent = rng.random_range(1.0..1.1);
                spec.mean_words = rng.random_range(7.0..11.0);
                spec.url_probability = rng.random_range(0.0..0.08);
                spec.burst_fraction = rng.random_range(0.4..0.65);
                let t = SPAM_TEMPLATES.choose(rng).expect("non-empty");
                spec.template_set = vec![t.to_string()];
            }
        }
        spec
    }
}

const ROBOT_TEMPLATES: &[&str] = &[
    "Temp: {temp}°F | Humidity: {pct}% | Wind: {dir} {speed} mph | Barometer: {baro} in | Dewpoint: {temp}°F",
    "Wind {speed} mph {dir}. Barometer {mb} mb, {trend}. Temperature {temp} °F. Rain today {rain} in. Humidity {pct}%",
    "#{incident} {num} {street} {zip} ({date} {time}) #Orlando #{hood}",
    "TRAFFIC STOP at {street} / {street}, GRESHAM, OR [Gresham Police #PG{id}] {time} #pdx911",
    "On {day} {dom}, #{tag} was Trending Topic in {city} for {hours} hours: {url} #trndnl",
    "A {year} {make} was just scanned near {city}, TN {zip} {url} #myvinny #startup #buyacar",
];

const SPAM_TEMPLATES: &[&str] = &[
    "#CallMe{name} #CallMe{name} @USER If {name} called me it'll seriously make my day I love you please call me!",
    "S/o to @USER thanks for the support. Check out my music @USER {url} I promise u won't be disappointed.",
    "{name} from the band My birthday is in {dom} days, And it would be an amazing gift, If you could follow me. Ily @USER",
    "@USER {name} please follow me it would mean the world to me, I have been trying for so long #follow{name}",
];

const JOB_TEMPLATE: &str = "{company} #{field} #Job: {title} ( #{city} , {st}) {url} #Jobs #TweetMyJobs";

const COMMON_WORDS: &[&str] = &[
    "the", "i", "to", "a", "and", "you", "my", "is", "it", "in", "me", "of", "that", "for", "on",
    "so", "this", "be", "just", "with", "lol", "but", "at", "like", "have", "your", "all", "not",
    "we", "are", "get", "when", "was", "up", "what", "love", "do", "go", "now", "can", "one",
    "know", "im", "out", "no", "day", "good", "if", "about", "want", "got", "how", "u", "people",
    "time", "today", "they", "need", "he", "she", "see", "back", "really", "why", "new", "going",
    "night", "think", "from", "shit", "still", "here", "never", "make", "only", "work", "lmao",
    "right", "much", "some", "come", "more", "oh", "too", "always", "happy", "great", "there",
    "off", "tomorrow", "home", "school", "wanna", "life", "best", "girl", "yes", "feel", "last",
    "thank", "first", "well", "let", "watch", "man", "over", "even", "again", "game", "better",
    "fun", "friends", "tonight", "ready", "food", "hot", "house", "sleep", "bout", "guess", "son",
];

const SYLLABLES: &[&str] = &[
    "ba", "ke", "lo", "mi", "nu", "ra", "te", "vo", "sa", "di", "po", "gu", "fa", "ze", "ri",
    "ma", "to", "ne", "li", "ka", "so", "pe", "wu", "ja", "ho", "be", "ce", "du", "fi", "go",
    "la", "mo", "ni", "qua", "ru", "si", "tu", "ve", "yo", "zi",
];

/// Word of the given Zipf rank (0-based). Ranks past the common-word list
/// map to pronounceable pseudo-words, distinct for every rank.
pub fn vocab_word(rank: usize) -> String {
    if rank < COMMON_WORDS.len() {
        return COMMON_WORDS[rank].to_string();
    }
    let mut r = rank - COMMON_WORDS.len();
    let k = SYLLABLES.len();
    // Two-syllable words first, then three, then four.
    let mut width = 2;
    let mut block = k * k;
    while r >= block {
        r -= block;
        width += 1;
        block *= k;
    }
    let mut parts = Vec::with_capacity(width);
    for _ in 0..width {
        parts.push(SYLLABLES[r % k]);
        r /= k;
    }
    let w = parts.concat();
    // A handful of syllable pairs spell real words; 'x' never occurs in a syllable.
    if COMMON_WORDS.contains(&w.as_str()) {
        w + "x"
    } else {
        w
    }
}

fn url(rng: &mut impl Rng) -> String {
    const ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    let code: String = (0..8)
        .map(|_| ALNUM[rng.random_range(0..ALNUM.len())] as char)
        .collect();
    format!("http://t.co/{code}")
}

struct FreeText {
    zipf: Zipf<f64>,
    mean_words: f64,
}

impl FreeText {
    fn new(spec: &GeneratorSpec) -> Self {
        FreeText {
            zipf: Zipf::new(spec.vocabulary_size as f64, spec.zipf_exponent).expect("valid zipf parameters"),
            mean_words: spec.mean_words,
        }
    }

    fn words(&self, rng: &mut impl Rng, count: usize) -> Vec<String> {
        (0..count)
            .map(|_| vocab_word(self.zipf.sample(rng) as usize - 1))
            .collect()
    }

    fn length(&self, rng: &mut impl Rng) -> usize {
        let half = (self.mean_words / 2.0).max(1.0);
        rng.random_range((self.mean_words - half).max(1.0)..=(self.mean_words + half)).round() as usize
    }
}

fn human_tweet(rng: &mut ChaCha8Rng, text: &FreeText, url_p: f64) -> String {
    let n = text.length(rng);
    let mut words = text.words(rng, n);
    if rng.random_bool(0.1) {
        let tag = text.words(rng, 1).remove(0);
        words.push(format!("#{tag}"));
    }
    if let Some(first) = words.first_mut() {
        if rng.random_bool(0.4) {
            let mut cs = first.chars();
            if let Some(c) = cs.next() {
                *first = c.to_uppercase().chain(cs).collect();
            }
        }
    }
    let mut t = words.join(" ");
    if rng.random_bool(0.15) {
        t = format!("@USER {t}");
    }
    let ending = ["", "", "", ".", "!", "?", " ??", "..", " lol"];
    t.push_str(ending.choose(rng).expect("non-empty"));
    if rng.random_bool(url_p) {
        t.push(' ');
        t.push_str(&url(rng));
    }
    t
}

const STICKY_SLOTS: &[&str] = &["incident", "hood", "city", "tag", "make", "trend", "day"];
const POOLED_SLOTS: &[&str] = &["url", "id", "num", "zip", "time", "date", "year", "hours", "dom"];
const ROBOT_POOL: usize = 12;

fn fill(template: &str, rng: &mut ChaCha8Rng, slots: &BTreeMap<&str, String>) -> String {
    let mut out = String::with_capacity(template.len() + 16);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').map(|c| open + c).expect("balanced template");
        let key = &rest[open + 1..close];
        match slots.get(key) {
            Some(v) => out.push_str(v),
            None => out.push_str(&slot_value(key, rng)),
        }
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}

fn slot_value(key: &str, rng: &mut ChaCha8Rng) -> String {
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| xs.choose(rng).expect("non-empty").to_string();
    match key {
        "temp" => format!("{:.1}", rng.random_range(40.0..99.0)),
        "pct" => rng.random_range(20..100).to_string(),
        "dir" => pick(rng, &["N", "NE", "E", "SE", "S", "SW", "W", "NW", "---"]),
        "speed" => format!("{:.1}", rng.random_range(0.0..25.0)),
        "baro" => format!("{:.2}", rng.random_range(29.5..30.5)),
        "mb" => format!("{:.1}", rng.random_range(1000.0..1030.0)),
        "trend" => pick(rng, &["Rising slowly", "Falling slowly", "Steady"]),
        "rain" => format!("{:.2}", rng.random_range(0.0..1.5)),
        "incident" => pick(
            rng,
            &["SuspiciousPerson", "AccidentWithRoadBlockage", "HitAndRun", "TrafficStop", "Burglary"],
        ),
        "num" => rng.random_range(100..9999).to_string(),
        "street" => pick(
            rng,
            &["W D JUDGE DR", "SE 181ST AVE", "SE PINE ST", "LEEVISTA BV", "S SEMORAN BV", "NE GLISAN ST"],
        ),
        "zip" => rng.random_range(30000..39999).to_string(),
        "date" => format!("{}/{}", rng.random_range(1..13), rng.random_range(1..29)),
        "time" => format!("{:02}:{:02}", rng.random_range(0..24), rng.random_range(0..60)),
        "hood" => pick(rng, &["MercyDrive", "CentralBusinessDistrict", "Parramore", "CollegePark"]),
        "id" => rng.random_range(14_000_000_000u64..14_999_999_999).to_string(),
        "day" => pick(rng, &["Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"]),
        "dom" => rng.random_range(1..29).to_string(),
        "tag" => pick(rng, &["WinUgly", "sunnysmiles", "heatJustinBieber", "MondayMotivation", "TBT"]),
        "city" => pick(rng, &["Pittsburgh", "Cleveland", "Orlando", "Boston", "Glendale", "Monroe", "SanDiego"]),
        "hours" => rng.random_range(1..24).to_string(),
        "url" => url(rng),
        "year" => rng.random_range(1995..2015).to_string(),
        "make" => pick(rng, &["Ford Ranger", "Honda Civic", "Toyota Camry", "Chevy Malibu", "Dodge Ram"]),
        "company" => pick(
            rng,
            &["Soliant Health", "Barnabas Health", "Tyco", "Accountable Healthcare Staffing", "Cerner", "Overlake"],
        ),
        "field" => pick(rng, &["Nursing", "IT", "Marketing", "FamilyPractice", "Sales", "Healthcare"]),
        "title" => pick(
            rng,
            &["Patient Care Associate", "Cerner Analyst", "Digital Marketing Specialist", "Registered Nurse", "Account Executive"],
        ),
        "st" => pick(rng, &["IN", "NJ", "AZ", "CA", "NC", "TN", "MA"]),
        "name" => pick(rng, &["Cam", "Ashton", "Cameron", "Niall", "Justin", "Luke"]),
        other => other.to_string(),
    }
}

fn headline(rng: &mut ChaCha8Rng, text: &FreeText) -> String {
    let n = text.length(rng);
    let words = text.words(rng, n);
    let mut line = String::new();
    let limit = rng.random_range(60..100);
    for w in words {
        if line.len() + w.len() + 1 > limit {
            line.push_str("...");
            break;
        }
        if !line.is_empty() {
            line.push(' ');
        }
        let mut cs = w.chars();
        if let Some(c) = cs.next() {
            line.extend(c.to_uppercase());
            line.extend(cs);
        }
    }
    line
}

fn mutate(text: &str, rate: f64, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    if chars.is_empty() || rate <= 0.0 {
        return text.to_string();
    }
    let k = Binomial::new(chars.len() as u64, rate)
        .expect("rate in [0, 1]")
        .sample(rng)
        .min(MAX_MUTATIONS);
    for _ in 0..k {
        let i = rng.random_range(0..chars.len());
        let orig = chars[i];
        let mut c = orig;
        while c == orig {
            c = rng.random_range(b'a'..=b'z') as char;
        }
        chars[i] = c;
    }
    chars.into_iter().collect()
}

/// Generate one user's tweets from its spec. Deterministic in `spec.seed`.
pub fn gen_user(spec: &GeneratorSpec, user_id: &str) -> Vec<TweetRecord> {
    let mut rng = seed::rng(spec.seed);
    let texts: Vec<String> = match spec.class {
        ClassLabel::Human => {
            let ft = FreeText::new(spec);
            (0..spec.tweets_per_user)
                .map(|_| human_tweet(&mut rng, &ft, spec.url_probability))
                .collect()
        }
        ClassLabel::Robot => {
            let template = spec.template_set.first().map(String::as_str).unwrap_or(ROBOT_TEMPLATES[0]);
            // A feed mostly reports on the same place and kind of event, and
            // its links and codes come from a small fixed set.
            let home: Vec<(&str, String)> = STICKY_SLOTS
                .iter()
                .map(|&k| (k, slot_value(k, &mut rng)))
                .collect();
            let pools: Vec<(&str, Vec<String>)> = POOLED_SLOTS
                .iter()
                .map(|&k| (k, (0..ROBOT_POOL).map(|_| slot_value(k, &mut rng)).collect()))
                .collect();
            (0..spec.tweets_per_user)
                .map(|_| {
                    let mut slots: BTreeMap<&str, String> = home
                        .iter()
                        .filter(|_| rng.random_bool(0.8))
                        .cloned()
                        .collect();
                    for (k, pool) in &pools {
                        slots.insert(k, pool.choose(&mut rng).expect("non-empty").clone());
                    }
                    fill(template, &mut rng, &slots)
                })
                .collect()
        }
        ClassLabel::Cyborg => {
            let ft = FreeText::new(spec);
            (0..spec.tweets_per_user)
                .map(|_| {
                    if rng.random_bool(spec.headline_fraction) {
                        let mut t = headline(&mut rng, &ft);
                        if rng.random_bool(spec.url_probability) {
                            t.push(' ');
                            t.push_str(&url(&mut rng));
                        }
                        t
                    } else {
                        fill(JOB_TEMPLATE, &mut rng, &BTreeMap::new())
                    }
                })
                .collect()
        }
        ClassLabel::Spammer => spammer_stream(spec, &mut rng),
    };
    texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| TweetRecord {
            user_id: user_id.to_string(),
            seq: i as u64,
            text,
            label: Some(spec.class),
        })
        .collect()
}

// Organic stream with bursts of one follow-request template. Within a burst
// every tweet carries at most MAX_MUTATIONS substitutions and a counter from
// a single decade, so two burst tweets differ in at most five characters.
fn spammer_stream(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<String> {
    let ft = FreeText::new(spec);
    let template = spec.template_set.first().map(String::as_str).unwrap_or(SPAM_TEMPLATES[0]);
    // One filled message per user: spammers repeat the same request.
    let base = fill(template, rng, &BTreeMap::new());
    let burst_max = spec.burst_len.clamp(1, 10);
    let burst_min = (burst_max / 2).max(1);
    let mean_burst = (burst_min + burst_max) as f64 / 2.0;
    let f = spec.burst_fraction.clamp(0.0, 0.95);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let local_f = |t: usize| {
        if spec.burst_cycle == 0 {
            return f;
        }
        let angle = std::f64::consts::TAU * t as f64 / spec.burst_cycle as f64 + phase;
        (f * (1.0 + spec.burst_swing * angle.sin())).clamp(0.0, 0.95)
    };

    let mut out = Vec::with_capacity(spec.tweets_per_user);
    while out.len() < spec.tweets_per_user {
        let f = local_f(out.len());
        let gap = if f > 0.0 {
            let mean_gap = mean_burst * (1.0 - f) / f;
            (rng.random_range(0.0..=2.0 * mean_gap).round() as usize).max(1)
        } else {
            spec.tweets_per_user
        };
        for _ in 0..gap.min(spec.tweets_per_user - out.len()) {
            out.push(human_tweet(rng, &ft, spec.url_probability));
        }
        let len = rng.random_range(burst_min..=burst_max).min(spec.tweets_per_user - out.len());
        let counter0 = rng.random_range(10..1000) * 10;
        for i in 0..len {
            let body = mutate(&base, spec.mutation_rate, rng);
            out.push(format!("{body} X{}", counter0 + i));
        }
    }
    out
}

/// Burst tweets of a spammer user, in order (their text ends in `X<counter>`).
pub fn is_burst_tweet(text: &str) -> bool {
    text.rsplit(' ')
        .next()
        .and_then(|t| t.strip_prefix('X'))
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMix {
    pub human: usize,
    pub robot: usize,
    pub cyborg: usize,
    pub spammer: usize,
}

impl ClassMix {
    /// 120 human, 30 robot, 30 cyborg, 20 spammer.
    pub fn standard() -> Self {
        ClassMix {
            human: 120,
            robot: 30,
            cyborg: 30,
            spammer: 20,
        }
    }

    fn expand(&self) -> Vec<ClassLabel> {
        let mut v = Vec::new();
        for (class, n) in [
            (ClassLabel::Human, self.human),
            (ClassLabel::Robot, self.robot),
            (ClassLabel::Cyborg, self.cyborg),
            (ClassLabel::Spammer, self.spammer),
        ] {
            v.extend(std::iter::repeat_n(class, n));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub user_id: String,
    pub spec: GeneratorSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub records: Vec<TweetRecord>,
    pub manifest: Vec<ManifestEntry>,
}

pub const STANDARD_TWEETS: usize = 400;

/// Users are numbered in class order; user `i` draws its jitter and text
/// from seeds derived from `base_seed + i`.
pub fn gen_corpus(mix: &ClassMix, tweets_per_user: usize, base_seed: u64) -> SyntheticCorpus {
    let classes = mix.expand();
    let users: Vec<(ManifestEntry, Vec<TweetRecord>)> = classes
        .par_iter()
        .enumerate()
        .map(|(i, &class)| {
            let user_seed = seed::mix(base_seed.wrapping_add(i as u64));
            let mut jitter_rng = seed::rng(seed::for_stage(user_seed, "jitter"));
            let spec = GeneratorSpec::jittered(class, tweets_per_user, user_seed, &mut jitter_rng);
            let user_id = format!("{}-{i:04}", class.as_str());
            let records = gen_user(&spec, &user_id);
            (ManifestEntry { user_id, spec }, records)
        })
        .collect();
    let mut records = Vec::with_capacity(classes.len() * tweets_per_user);
    let mut manifest = Vec::with_capacity(classes.len());
    for (m, r) in users {
        manifest.push(m);
        records.extend(r);
    }
    SyntheticCorpus { records, manifest }
}

/// The desk-scale benchmark corpus.
pub fn standard_corpus(base_seed: u64) -> SyntheticCorpus {
    gen_corpus(&ClassMix::standard(), STANDARD_TWEETS, base_seed)
}

impl SyntheticCorpus {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n").map_err(|e| Error::io("<jsonl>", e))?;
        }
        Ok(())
    }

    pub fn write_manifest<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.manifest)?;
        Ok(())
    }
}
