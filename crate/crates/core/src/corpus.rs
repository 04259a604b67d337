//! Publication records, corpus ingestion, validation, period views and
//! citation relations.
//!
//! A corpus file is UTF-8 JSON Lines: one [`PaperRecord`] per line. Absent
//! optional fields take their defaults (`lang = "en"`, empty lists,
//! `text = null`, `origin = "seed"`). Keywords are lowercased, trimmed and
//! deduplicated on ingest.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Field {
        line: usize,
        field: String,
        message: String,
    },
    #[error("line {line}: duplicate id {id:?} (first seen on line {first_line})")]
    DuplicateId {
        line: usize,
        first_line: usize,
        id: String,
    },
    #[error("invalid period: from {from} is after to {to}")]
    InvalidPeriod { from: i32, to: i32 },
    #[error("unknown seed id {0:?}")]
    UnknownSeed(String),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    #[default]
    En,
    Fr,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Fr => "fr",
        }
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Lang::En),
            "fr" => Ok(Lang::Fr),
            other => Err(format!(
                "unsupported language tag {other:?} (expected \"en\" or \"fr\")"
            )),
        }
    }
}

/// Where a record sits relative to the journal being analysed.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Published in the journal itself.
    #[default]
    Seed,
    /// Cited by a seed paper.
    Cited,
    /// Cites a seed paper.
    Citing,
    External,
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seed" => Ok(Origin::Seed),
            "cited" => Ok(Origin::Cited),
            "citing" => Ok(Origin::Citing),
            "external" => Ok(Origin::External),
            other => Err(format!(
                "unknown origin {other:?} (expected seed, cited, citing or external)"
            )),
        }
    }
}

/// One publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    pub year: i32,
    #[serde(default)]
    pub lang: Lang,
    /// Authors' affiliation countries, ISO 3166-1 alpha-2.
    #[serde(default)]
    pub affiliations: Vec<String>,
    /// Countries studied in the paper, ISO 3166-1 alpha-2.
    #[serde(default)]
    pub studied: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub text: Option<String>,
    /// Opaque reference identifiers; they need not name corpus records.
    #[serde(default)]
    pub refs: Vec<String>,
    #[serde(default)]
    pub origin: Origin,
}

impl PaperRecord {
    /// A seed record with the given id and year and every other field empty.
    pub fn new(id: impl Into<String>, year: i32) -> Self {
        PaperRecord {
            id: id.into(),
            title: String::new(),
            year,
            lang: Lang::En,
            affiliations: Vec::new(),
            studied: Vec::new(),
            keywords: Vec::new(),
            text: None,
            refs: Vec::new(),
            origin: Origin::Seed,
        }
    }

    /// True when the record carries a non-blank full text.
    pub fn has_text(&self) -> bool {
        self.text.as_deref().is_some_and(|t| !t.trim().is_empty())
    }
}

/// Lowercase, trim, drop empties and deduplicate, keeping first occurrences.
pub fn normalize_keywords<I, S>(keywords: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for kw in keywords {
        let kw = kw.as_ref().trim().to_lowercase();
        if !kw.is_empty() && seen.insert(kw.clone()) {
            out.push(kw);
        }
    }
    out
}

pub fn is_country_code(code: &str) -> bool {
    code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase())
}

/// An immutable set of papers keyed by id, with keyword and year indexes.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    papers: BTreeMap<String, Arc<PaperRecord>>,
    keyword_index: BTreeMap<String, BTreeSet<String>>,
    year_index: BTreeMap<i32, BTreeSet<String>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.papers == other.papers
    }
}

impl Corpus {
    /// Builds a corpus from records. Keywords are normalized; a repeated id
    /// is reported with its 1-based position.
    pub fn from_records<I>(records: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = PaperRecord>,
    {
        let mut first_seen: HashMap<String, usize> = HashMap::new();
        let mut papers = BTreeMap::new();
        for (i, mut rec) in records.into_iter().enumerate() {
            let line = i + 1;
            if let Some(&first_line) = first_seen.get(&rec.id) {
                return Err(CorpusError::DuplicateId {
                    line,
                    first_line,
                    id: rec.id,
                });
            }
            first_seen.insert(rec.id.clone(), line);
            rec.keywords = normalize_keywords(&rec.keywords);
            papers.insert(rec.id.clone(), Arc::new(rec));
        }
        Ok(Self::from_map(papers))
    }

    fn from_map(papers: BTreeMap<String, Arc<PaperRecord>>) -> Self {
        let (keyword_index, year_index) = build_indexes(&papers);
        Corpus {
            papers,
            keyword_index,
            year_index,
        }
    }

    /// Parses JSON Lines text. Blank lines are skipped but still counted
    /// for line numbers in error messages.
    pub fn parse_jsonl(input: &str) -> Result<Self, CorpusError> {
        let mut first_seen: HashMap<String, usize> = HashMap::new();
        let mut papers = BTreeMap::new();
        for (i, raw) in input.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let rec = parse_record(raw, line)?;
            if let Some(&first_line) = first_seen.get(&rec.id) {
                return Err(CorpusError::DuplicateId {
                    line,
                    first_line,
                    id: rec.id,
                });
            }
            first_seen.insert(rec.id.clone(), line);
            papers.insert(rec.id.clone(), Arc::new(rec));
        }
        Ok(Self::from_map(papers))
    }

    /// One JSON object per line, in id order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in self.papers.values() {
            out.push_str(&serde_json::to_string(rec.as_ref()).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PaperRecord> {
        self.papers.get(id).map(Arc::as_ref)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.papers.contains_key(id)
    }

    /// Papers in ascending id order.
    pub fn papers(&self) -> impl Iterator<Item = &PaperRecord> + '_ {
        self.papers.values().map(Arc::as_ref)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.papers.keys().map(String::as_str)
    }

    pub fn keyword_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.keyword_index
    }

    pub fn year_index(&self) -> &BTreeMap<i32, BTreeSet<String>> {
        &self.year_index
    }

    pub fn papers_with_keyword(&self, keyword: &str) -> Option<&BTreeSet<String>> {
        self.keyword_index.get(keyword)
    }

    pub fn year_range(&self) -> Option<(i32, i32)> {
        let first = *self.year_index.keys().next()?;
        let last = *self.year_index.keys().next_back()?;
        Some((first, last))
    }

    /// Rebuilds both indexes from scratch and compares them with the stored ones.
    pub fn indexes_consistent(&self) -> bool {
        let (kw, years) = build_indexes(&self.papers);
        kw == self.keyword_index && years == self.year_index
    }

    /// Papers with `from <= year <= to`. The receiver is left untouched.
    pub fn filter_period(&self, period: PeriodFilter) -> Corpus {
        let papers = self
            .year_index
            .range(period.from_year()..=period.to_year())
            .flat_map(|(_, ids)| ids.iter())
            .map(|id| (id.clone(), Arc::clone(&self.papers[id])))
            .collect();
        Self::from_map(papers)
    }

    /// Keeps only papers whose ids have no entry in `report`.
    pub fn without_invalid(&self, report: &[Violation]) -> Corpus {
        let bad: BTreeSet<&str> = report.iter().map(|v| v.id.as_str()).collect();
        let papers = self
            .papers
            .iter()
            .filter(|(id, _)| !bad.contains(id.as_str()))
            .map(|(id, p)| (id.clone(), Arc::clone(p)))
            .collect();
        Self::from_map(papers)
    }

    /// Checks every record invariant. Ordering is by id, then rule.
    pub fn validate(&self) -> Vec<Violation> {
        validate_corpus(self)
    }
}

fn build_indexes(
    papers: &BTreeMap<String, Arc<PaperRecord>>,
) -> (
    BTreeMap<String, BTreeSet<String>>,
    BTreeMap<i32, BTreeSet<String>>,
) {
    let mut keywords: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut years: BTreeMap<i32, BTreeSet<String>> = BTreeMap::new();
    for (id, rec) in papers {
        for kw in &rec.keywords {
            keywords.entry(kw.clone()).or_default().insert(id.clone());
        }
        years.entry(rec.year).or_default().insert(id.clone());
    }
    (keywords, years)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Corpus::parse_jsonl(&text)
}

const FIELDS: [&str; 10] = [
    "id",
    "title",
    "year",
    "lang",
    "affiliations",
    "studied",
    "keywords",
    "text",
    "refs",
    "origin",
];

// Decoded by hand so that errors can name the offending field.
fn parse_record(raw: &str, line: usize) -> Result<PaperRecord, CorpusError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| CorpusError::Syntax {
        line,
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(CorpusError::Syntax {
            line,
            message: "record is not a JSON object".into(),
        });
    };
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(field_err(line, unknown, "unknown field"));
    }

    let id = req_string(&obj, "id", line)?;
    let title = opt_string(&obj, "title", line)?.unwrap_or_default();
    let year = match obj.get("year") {
        None => return Err(field_err(line, "year", "missing")),
        Some(v) => v
            .as_i64()
            .and_then(|y| i32::try_from(y).ok())
            .ok_or_else(|| field_err(line, "year", "expected an integer"))?,
    };
    let lang = match opt_string(&obj, "lang", line)? {
        None => Lang::En,
        Some(s) => s.parse().map_err(|m: String| field_err(line, "lang", &m))?,
    };
    let origin = match opt_string(&obj, "origin", line)? {
        None => Origin::Seed,
        Some(s) => s
            .parse()
            .map_err(|m: String| field_err(line, "origin", &m))?,
    };
    Ok(PaperRecord {
        id,
        title,
        year,
        lang,
        affiliations: string_list(&obj, "affiliations", line)?,
        studied: string_list(&obj, "studied", line)?,
        keywords: normalize_keywords(string_list(&obj, "keywords", line)?),
        text: opt_string(&obj, "text", line)?,
        refs: string_list(&obj, "refs", line)?,
        origin,
    })
}

fn field_err(line: usize, field: &str, message: &str) -> CorpusError {
    CorpusError::Field {
        line,
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn req_string(obj: &Map<String, Value>, field: &str, line: usize) -> Result<String, CorpusError> {
    opt_string(obj, field, line)?.ok_or_else(|| field_err(line, field, "missing"))
}

fn opt_string(
    obj: &Map<String, Value>,
    field: &str,
    line: usize,
) -> Result<Option<String>, CorpusError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(field_err(line, field, "expected a string")),
    }
}

fn string_list(
    obj: &Map<String, Value>,
    field: &str,
    line: usize,
) -> Result<Vec<String>, CorpusError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| field_err(line, field, "expected an array of strings"))
            })
            .collect(),
        Some(_) => Err(field_err(line, field, "expected an array of strings")),
    }
}

/// Inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PeriodFilter {
    from_year: i32,
    to_year: i32,
}

impl PeriodFilter {
    pub fn new(from_year: i32, to_year: i32) -> Result<Self, CorpusError> {
        if from_year > to_year {
            return Err(CorpusError::InvalidPeriod {
                from: from_year,
                to: to_year,
            });
        }
        Ok(PeriodFilter { from_year, to_year })
    }

    pub fn single(year: i32) -> Self {
        PeriodFilter {
            from_year: year,
            to_year: year,
        }
    }

    /// Every year the corpus can hold.
    pub fn all() -> Self {
        PeriodFilter {
            from_year: i32::MIN,
            to_year: i32::MAX,
        }
    }

    pub fn from_year(&self) -> i32 {
        self.from_year
    }

    pub fn to_year(&self) -> i32 {
        self.to_year
    }

    pub fn contains(&self, year: i32) -> bool {
        self.from_year <= year && year <= self.to_year
    }
}

pub fn filter_period(corpus: &Corpus, period: PeriodFilter) -> Corpus {
    corpus.filter_period(period)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    CountryCode,
    IdEmpty,
    KeywordForm,
    YearRange,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::CountryCode => "country-code",
            Rule::IdEmpty => "id-empty",
            Rule::KeywordForm => "keyword-form",
            Rule::YearRange => "year-range",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub id: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}] {}", self.id, self.rule, self.detail)
    }
}

/// One violation per (record, rule). Sorted by id, then rule name.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut report = Vec::new();
    for rec in corpus.papers() {
        let mut push = |rule: Rule, detail: String| {
            report.push(Violation {
                id: rec.id.clone(),
                rule,
                detail,
            })
        };
        if rec.id.is_empty() {
            push(Rule::IdEmpty, "id must be non-empty".into());
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&rec.year) {
            push(
                Rule::YearRange,
                format!("year {} outside {MIN_YEAR}..={MAX_YEAR}", rec.year),
            );
        }
        let bad_codes: Vec<&str> = rec
            .affiliations
            .iter()
            .chain(&rec.studied)
            .map(String::as_str)
            .filter(|c| !is_country_code(c))
            .collect();
        if !bad_codes.is_empty() {
            push(
                Rule::CountryCode,
                format!("not two uppercase ASCII letters: {}", bad_codes.join(", ")),
            );
        }
        if rec.keywords != normalize_keywords(&rec.keywords) {
            push(
                Rule::KeywordForm,
                "keywords must be lowercase, trimmed and distinct".into(),
            );
        }
    }
    report.sort_by(|a, b| a.id.cmp(&b.id).then(a.rule.name().cmp(b.rule.name())));
    report
}

/// Papers related to a set of seeds by citation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Neighborhood {
    /// Corpus records referenced by a seed.
    pub cited: BTreeSet<String>,
    /// Records whose references include a seed.
    pub citing: BTreeSet<String>,
    /// Records sharing at least one reference string with a seed.
    pub coupled: BTreeSet<String>,
}

/// Seeds themselves never appear in any of the three sets; the sets may
/// overlap each other.
pub fn citation_neighborhood(
    corpus: &Corpus,
    seed_ids: &BTreeSet<String>,
) -> Result<Neighborhood, CorpusError> {
    if let Some(missing) = seed_ids.iter().find(|id| !corpus.contains(id)) {
        return Err(CorpusError::UnknownSeed(missing.clone()));
    }
    let mut seed_refs: BTreeSet<&str> = BTreeSet::new();
    let mut out = Neighborhood::default();
    for id in seed_ids {
        for r in &corpus.papers[id].refs {
            seed_refs.insert(r);
            if corpus.contains(r) && !seed_ids.contains(r) {
                out.cited.insert(r.clone());
            }
        }
    }
    for rec in corpus.papers() {
        if seed_ids.contains(&rec.id) {
            continue;
        }
        if rec.refs.iter().any(|r| seed_ids.contains(r)) {
            out.citing.insert(rec.id.clone());
        }
        if rec.refs.iter().any(|r| seed_refs.contains(r.as_str())) {
            out.coupled.insert(rec.id.clone());
        }
    }
    Ok(out)
}

/// Bibliographic coupling between two papers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CouplingLink {
    /// Lexicographically smaller id.
    pub a: String,
    pub b: String,
    /// Number of distinct shared references.
    pub weight: u32,
}

/// All coupled pairs, sorted by `(a, b)`.
pub fn coupling_links(corpus: &Corpus) -> Vec<CouplingLink> {
    // ref -> positions of citing papers in id order
    let ids: Vec<&str> = corpus.ids().collect();
    let mut by_ref: HashMap<&str, Vec<u32>> = HashMap::new();
    for (pos, rec) in corpus.papers().enumerate() {
        let distinct: BTreeSet<&str> = rec.refs.iter().map(String::as_str).collect();
        for r in distinct {
            by_ref.entry(r).or_default().push(pos as u32);
        }
    }
    let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
    for citing in by_ref.values() {
        for (i, &a) in citing.iter().enumerate() {
            for &b in &citing[i + 1..] {
                *counts.entry((a, b)).or_default() += 1;
            }
        }
    }
    let mut pairs: Vec<((u32, u32), u32)> = counts.into_iter().collect();
    pairs.sort_unstable();
    pairs
        .into_iter()
        .map(|((a, b), weight)| CouplingLink {
            a: ids[a as usize].to_string(),
            b: ids[b as usize].to_string(),
            weight,
        })
        .collect()
}
