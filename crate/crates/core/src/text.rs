//! Tokenization, TF-IDF weighting, lexicon counting and gazetteer-based
//! country detection.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{is_country_code, Lang};

#[derive(Debug, Error)]
pub enum TextError {
    #[error("term {term:?} has document frequency 0")]
    ZeroDocumentFrequency { term: String },
    #[error("document count must be at least 1")]
    NoDocuments,
    #[error("lexicon {0:?} has no terms")]
    EmptyLexicon(String),
    #[error("lexicon {name:?}: term {term:?} {problem}")]
    BadLexiconTerm {
        name: String,
        term: String,
        problem: &'static str,
    },
    #[error("lexicon name {0:?} is used twice")]
    DuplicateLexicon(String),
    #[error("gazetteer alias {alias:?} maps to both {first} and {second}")]
    ConflictingAlias {
        alias: String,
        first: String,
        second: String,
    },
    #[error("gazetteer code {0:?} is not a two-letter uppercase code")]
    BadCountryCode(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

/// Lowercases, folds diacritics and splits on anything that is not
/// alphanumeric. No filtering.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    let mut folded = String::with_capacity(text.len());
    for c in text.to_lowercase().nfd() {
        if is_combining_mark(c) {
            continue;
        }
        match c {
            'œ' => folded.push_str("oe"),
            'æ' => folded.push_str("ae"),
            'ß' => folded.push_str("ss"),
            'ø' => folded.push('o'),
            'ł' => folded.push('l'),
            'đ' => folded.push('d'),
            c => folded.push(c),
        }
    }
    folded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

static STOP_EN: OnceLock<HashSet<String>> = OnceLock::new();
static STOP_FR: OnceLock<HashSet<String>> = OnceLock::new();

fn load_stopwords(raw: &str) -> HashSet<String> {
    raw.lines().flat_map(normalize_tokens).collect()
}

/// The bundled stopword list for `lang`, folded the same way as tokens.
pub fn stopwords(lang: Lang) -> &'static HashSet<String> {
    match lang {
        Lang::En => {
            STOP_EN.get_or_init(|| load_stopwords(include_str!("../data/stopwords/en.txt")))
        }
        Lang::Fr => {
            STOP_FR.get_or_init(|| load_stopwords(include_str!("../data/stopwords/fr.txt")))
        }
    }
}

/// Normalized tokens with stopwords, single characters and pure digit
/// strings removed.
pub fn tokenize(text: &str, lang: Lang) -> Vec<String> {
    let stop = stopwords(lang);
    normalize_tokens(text)
        .into_iter()
        .filter(|t| t.chars().nth(1).is_some())
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .filter(|t| !stop.contains(t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Counts,
    TfIdf,
}

/// Sparse term vector; zero entries are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    mode: Weighting,
    entries: BTreeMap<String, f64>,
}

impl TermVector {
    pub fn counts<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut entries = BTreeMap::new();
        for t in tokens {
            *entries.entry(t.as_ref().to_string()).or_insert(0.0) += 1.0;
        }
        TermVector {
            mode: Weighting::Counts,
            entries,
        }
    }

    pub fn mode(&self) -> Weighting {
        self.mode
    }

    pub fn get(&self, term: &str) -> f64 {
        self.entries.get(term).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `weight(t) = tf(t) * ln(n_docs / df(t))`, natural log, no smoothing.
/// Terms present in every document get weight 0 and are left out.
pub fn vectorize_tfidf<S: AsRef<str>>(
    doc_tokens: &[S],
    document_frequencies: &HashMap<String, u32>,
    n_docs: u32,
) -> Result<TermVector, TextError> {
    if n_docs == 0 {
        return Err(TextError::NoDocuments);
    }
    let counts = TermVector::counts(doc_tokens);
    let mut entries = BTreeMap::new();
    for (term, tf) in counts.entries {
        let df = document_frequencies.get(&term).copied().unwrap_or(0);
        if df == 0 {
            return Err(TextError::ZeroDocumentFrequency { term });
        }
        let weight = tf * (f64::from(n_docs) / f64::from(df)).ln();
        if weight > 0.0 {
            entries.insert(term, weight);
        }
    }
    Ok(TermVector {
        mode: Weighting::TfIdf,
        entries,
    })
}

/// Number of documents containing each term.
pub fn document_frequencies<D, S>(docs: D) -> HashMap<String, u32>
where
    D: IntoIterator,
    D::Item: AsRef<[S]>,
    S: AsRef<str>,
{
    let mut df: HashMap<String, u32> = HashMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        for t in distinct {
            *df.entry(t.to_string()).or_default() += 1;
        }
    }
    df
}

/// A named semantic field, such as "risk".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    terms: BTreeSet<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconRecord {
    name: String,
    terms: Vec<String>,
}

impl Lexicon {
    /// Terms are normalized like tokens and must each be a single token.
    pub fn new<I, S>(name: impl Into<String>, terms: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut set = BTreeSet::new();
        for raw in terms {
            let raw = raw.as_ref();
            let mut toks = normalize_tokens(raw);
            if toks.len() != 1 {
                return Err(TextError::BadLexiconTerm {
                    name,
                    term: raw.to_string(),
                    problem: "is not a single token",
                });
            }
            if !set.insert(toks.remove(0)) {
                return Err(TextError::BadLexiconTerm {
                    name,
                    term: raw.to_string(),
                    problem: "is repeated",
                });
            }
        }
        if set.is_empty() {
            return Err(TextError::EmptyLexicon(name));
        }
        Ok(Lexicon { name, terms: set })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &BTreeSet<String> {
        &self.terms
    }

    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }
}

/// Reads one `{"name": ..., "terms": [...]}` record per line.
pub fn load_lexicons(path: impl AsRef<Path>) -> Result<Vec<Lexicon>, TextError> {
    let path = path.as_ref();
    let raw = read(path)?;
    parse_lexicons(&raw, &path.display().to_string())
}

pub fn parse_lexicons(raw: &str, source: &str) -> Result<Vec<Lexicon>, TextError> {
    let mut out: Vec<Lexicon> = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: LexiconRecord = serde_json::from_str(line).map_err(|e| TextError::Parse {
            path: source.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if out.iter().any(|l| l.name == rec.name) {
            return Err(TextError::DuplicateLexicon(rec.name));
        }
        out.push(Lexicon::new(rec.name, rec.terms)?);
    }
    Ok(out)
}

/// Occurrences (with multiplicity) of each lexicon's terms. Every lexicon
/// appears in the result.
pub fn lexicon_counts<S: AsRef<str>>(
    doc_tokens: &[S],
    lexicons: &[Lexicon],
) -> BTreeMap<String, u64> {
    let mut out: BTreeMap<String, u64> = lexicons.iter().map(|l| (l.name.clone(), 0)).collect();
    let mut tf: HashMap<&str, u64> = HashMap::new();
    for t in doc_tokens {
        *tf.entry(t.as_ref()).or_default() += 1;
    }
    for lex in lexicons {
        let n: u64 = lex.terms.iter().filter_map(|t| tf.get(t.as_str())).sum();
        *out.get_mut(&lex.name).expect("seeded above") += n;
    }
    out
}

/// Country aliases, possibly several tokens long, mapped to alpha-2 codes.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    aliases: HashMap<Vec<String>, String>,
    longest: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GazetteerRecord {
    code: String,
    aliases: Vec<String>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alias: &str, code: &str) -> Result<(), TextError> {
        if !is_country_code(code) {
            return Err(TextError::BadCountryCode(code.to_string()));
        }
        let key = normalize_tokens(alias);
        if key.is_empty() {
            return Ok(());
        }
        if let Some(existing) = self.aliases.get(&key) {
            if existing != code {
                return Err(TextError::ConflictingAlias {
                    alias: alias.to_string(),
                    first: existing.clone(),
                    second: code.to_string(),
                });
            }
        }
        self.longest = self.longest.max(key.len());
        self.aliases.insert(key, code.to_string());
        Ok(())
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut g = Gazetteer::new();
        for (alias, code) in pairs {
            g.insert(alias, code)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.aliases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aliases.is_empty()
    }

    pub fn lookup(&self, alias_tokens: &[String]) -> Option<&str> {
        self.aliases.get(alias_tokens).map(String::as_str)
    }

    pub fn max_alias_tokens(&self) -> usize {
        self.longest
    }
}

/// Reads one `{"code": "FR", "aliases": [...]}` record per line.
pub fn load_gazetteer(path: impl AsRef<Path>) -> Result<Gazetteer, TextError> {
    let path = path.as_ref();
    let raw = read(path)?;
    parse_gazetteer(&raw, &path.display().to_string())
}

pub fn parse_gazetteer(raw: &str, source: &str) -> Result<Gazetteer, TextError> {
    let mut g = Gazetteer::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: GazetteerRecord = serde_json::from_str(line).map_err(|e| TextError::Parse {
            path: source.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        for alias in &rec.aliases {
            g.insert(alias, &rec.code)?;
        }
    }
    Ok(g)
}

fn read(path: &Path) -> Result<String, TextError> {
    std::fs::read_to_string(path).map_err(|source| TextError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Greedy longest-match scan of the normalized token stream.
pub fn detect_studied_countries(text: &str, gazetteer: &Gazetteer) -> BTreeSet<String> {
    let tokens = normalize_tokens(text);
    let mut found = BTreeSet::new();
    let mut i = 0;
    while i < tokens.len() {
        let max = gazetteer.longest.min(tokens.len() - i);
        let hit = (1..=max)
            .rev()
            .find_map(|len| gazetteer.aliases.get(&tokens[i..i + len]).map(|c| (len, c)));
        match hit {
            Some((len, code)) => {
                found.insert(code.clone());
                i += len;
            }
            None => i += 1,
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_examples() {
        assert!(tokenize("", Lang::En).is_empty());
        assert_eq!(
            tokenize("The urban, URBAN growth!", Lang::En),
            ["urban", "urban", "growth"]
        );
        assert_eq!(
            tokenize("modèles spatiaux des villes", Lang::Fr),
            ["modeles", "spatiaux", "villes"]
        );
    }

    #[test]
    fn tokenize_drops_digits_and_short_tokens() {
        assert_eq!(tokenize("In 2005 a x3 b 12 co2", Lang::En), ["x3", "co2"]);
    }

    #[test]
    fn french_stopwords_match_after_folding() {
        // "été" and "où" are listed with accents
        assert_eq!(tokenize("Été, où l'espace", Lang::Fr), ["espace"]);
        assert_eq!(tokenize("cœur", Lang::Fr), ["coeur"]);
    }

    #[test]
    fn tfidf_formula() {
        let df = HashMap::from([("a".to_string(), 1), ("b".to_string(), 4)]);
        let v = vectorize_tfidf(&["a", "a", "a", "b"], &df, 4).unwrap();
        assert_eq!(v.mode(), Weighting::TfIdf);
        assert!((v.get("a") - 4.158883083359672).abs() < 1e-12);
        assert_eq!(v.len(), 1, "df = n_docs gives weight 0 and is omitted");
        assert!(vectorize_tfidf::<&str>(&[], &df, 4).unwrap().is_empty());
    }

    #[test]
    fn tfidf_rejects_unknown_terms() {
        let df = HashMap::from([("a".to_string(), 0)]);
        assert!(matches!(
            vectorize_tfidf(&["a"], &df, 3),
            Err(TextError::ZeroDocumentFrequency { .. })
        ));
        assert!(matches!(
            vectorize_tfidf(&["zzz"], &HashMap::new(), 3),
            Err(TextError::ZeroDocumentFrequency { .. })
        ));
        assert!(matches!(
            vectorize_tfidf(&["a"], &df, 0),
            Err(TextError::NoDocuments)
        ));
    }

    #[test]
    fn lexicon_counts_with_multiplicity() {
        let risk = Lexicon::new("risk", ["risk", "hazard"]).unwrap();
        let counts = lexicon_counts(&["risk", "hazard", "risk"], std::slice::from_ref(&risk));
        assert_eq!(counts["risk"], 3);
        let counts = lexicon_counts(&["city"], &[risk]);
        assert_eq!(counts["risk"], 0);
    }

    #[test]
    fn lexicon_terms_are_validated() {
        assert!(matches!(
            Lexicon::new("x", Vec::<&str>::new()),
            Err(TextError::EmptyLexicon(_))
        ));
        assert!(Lexicon::new("x", ["two words"]).is_err());
        assert!(Lexicon::new("x", ["Risk", "risk"]).is_err());
        let l = Lexicon::new("x", ["Frontière"]).unwrap();
        assert!(l.contains("frontiere"));
    }

    #[test]
    fn lexicon_file_rejects_duplicate_names() {
        let raw =
            "{\"name\":\"risk\",\"terms\":[\"risk\"]}\n{\"name\":\"risk\",\"terms\":[\"flood\"]}\n";
        assert!(matches!(
            parse_lexicons(raw, "mem"),
            Err(TextError::DuplicateLexicon(_))
        ));
        let err = parse_lexicons("{\"name\":1}", "mem").unwrap_err();
        assert!(matches!(err, TextError::Parse { line: 1, .. }));
    }

    #[test]
    fn detect_exact_aliases() {
        let g = Gazetteer::from_pairs([("France", "FR"), ("Germany", "DE")]).unwrap();
        let found = detect_studied_countries("comparing France and Germany", &g);
        assert_eq!(found, BTreeSet::from(["DE".to_string(), "FR".to_string()]));
    }

    #[test]
    fn detect_prefers_longest_alias() {
        let g = Gazetteer::from_pairs([("new zealand", "NZ"), ("zealand", "NZ"), ("new", "XX")])
            .unwrap();
        let found = detect_studied_countries("New Zealand policy", &g);
        assert_eq!(found, BTreeSet::from(["NZ".to_string()]));
    }

    #[test]
    fn gazetteer_rejects_bad_input() {
        assert!(Gazetteer::from_pairs([("France", "France")]).is_err());
        assert!(Gazetteer::from_pairs([("Georgia", "GE"), ("georgia", "US")]).is_err());
        let g =
            parse_gazetteer("{\"code\":\"CI\",\"aliases\":[\"Côte d'Ivoire\"]}", "mem").unwrap();
        assert_eq!(
            detect_studied_countries("en cote d ivoire", &g),
            BTreeSet::from(["CI".to_string()])
        );
    }
}
