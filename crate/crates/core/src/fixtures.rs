//! Deterministic synthetic corpora with planted structure, and the small
//! hand-built fixtures shared by tests and demos.
//!
//! A planted corpus assigns document `d` to keyword block `d % blocks` and
//! to theme `d % themes`. Each keyword draw stays inside the document's own
//! block with probability `in_block_probability` (0.9 by default) and
//! otherwise comes from another block. Texts are drawn from the theme's
//! vocabulary only, so theme vocabularies never overlap.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_keywords, Corpus, PaperRecord};
use crate::network::KeywordGraph;

#[derive(Debug, Error, PartialEq)]
pub enum FixtureError {
    #[error("spec needs at least one keyword block")]
    NoBlocks,
    #[error("keyword block {0} is empty")]
    EmptyBlock(usize),
    #[error("keyword {0:?} appears in more than one block")]
    SharedKeyword(String),
    #[error("theme vocabulary {0} is empty")]
    EmptyVocabulary(usize),
    #[error("word {0:?} appears in more than one theme vocabulary")]
    SharedWord(String),
    #[error("in-block probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("year range {0}..={1} is empty or outside 1900..=2100")]
    Years(i32, i32),
    #[error("country code {0:?} is not two uppercase letters")]
    Country(String),
}

fn default_probability() -> f64 {
    0.9
}
fn default_years() -> (i32, i32) {
    (1996, 2016)
}
fn default_countries() -> Vec<String> {
    ["BR", "CH", "DE", "ES", "FR", "GB", "IT", "US"]
        .map(String::from)
        .to_vec()
}
fn default_words() -> usize {
    40
}

/// Parameters of a planted corpus. Also the schema of `fixtures --spec`
/// files (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    /// Keywords drawn per document (capped by the number of keywords available).
    pub n_keywords: usize,
    /// Planted keyword communities; lists must be disjoint.
    pub blocks: Vec<Vec<String>>,
    /// Planted theme vocabularies; lists must be disjoint. May be empty, in
    /// which case documents get no text.
    #[serde(default)]
    pub theme_vocabularies: Vec<Vec<String>>,
    #[serde(default = "default_words")]
    pub words_per_doc: usize,
    #[serde(default = "default_probability")]
    pub in_block_probability: f64,
    #[serde(default = "default_years")]
    pub years: (i32, i32),
    #[serde(default = "default_countries")]
    pub countries: Vec<String>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `blocks` blocks of `block_size` keywords named `b<block>k<index>`, and
    /// `themes` vocabularies of `vocab_size` words named `t<theme>w<index>`.
    pub fn planted(
        n_docs: usize,
        blocks: usize,
        block_size: usize,
        n_keywords: usize,
        themes: usize,
        vocab_size: usize,
        seed: u64,
    ) -> Self {
        SyntheticSpec {
            n_docs,
            n_keywords,
            blocks: (0..blocks)
                .map(|b| (0..block_size).map(|i| format!("b{b}k{i:03}")).collect())
                .collect(),
            theme_vocabularies: (0..themes)
                .map(|t| (0..vocab_size).map(|i| format!("t{t}w{i:03}")).collect())
                .collect(),
            words_per_doc: default_words(),
            in_block_probability: default_probability(),
            years: default_years(),
            countries: default_countries(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        if self.blocks.is_empty() {
            return Err(FixtureError::NoBlocks);
        }
        let mut seen = BTreeSet::new();
        for (b, block) in self.blocks.iter().enumerate() {
            let block = normalize_keywords(block);
            if block.is_empty() {
                return Err(FixtureError::EmptyBlock(b));
            }
            for kw in block {
                if !seen.insert(kw.clone()) {
                    return Err(FixtureError::SharedKeyword(kw));
                }
            }
        }
        let mut words = BTreeSet::new();
        for (t, vocab) in self.theme_vocabularies.iter().enumerate() {
            if vocab.is_empty() {
                return Err(FixtureError::EmptyVocabulary(t));
            }
            for w in vocab {
                if !words.insert(w.clone()) {
                    return Err(FixtureError::SharedWord(w.clone()));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.in_block_probability) {
            return Err(FixtureError::Probability(self.in_block_probability));
        }
        let (lo, hi) = self.years;
        if lo > hi || lo < 1900 || hi > 2100 {
            return Err(FixtureError::Years(lo, hi));
        }
        if let Some(bad) = self
            .countries
            .iter()
            .find(|c| !crate::corpus::is_country_code(c))
        {
            return Err(FixtureError::Country(bad.clone()));
        }
        Ok(())
    }

    /// Block of every planted keyword.
    pub fn keyword_blocks(&self) -> BTreeMap<String, usize> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| normalize_keywords(block).into_iter().map(move |k| (k, b)))
            .collect()
    }

    /// Planted theme of document `i` (in id order), if texts are generated.
    pub fn doc_theme(&self, i: usize) -> Option<usize> {
        (!self.theme_vocabularies.is_empty()).then(|| i % self.theme_vocabularies.len())
    }

    pub fn doc_id(i: usize) -> String {
        format!("D{i:06}")
    }
}

/// Records of the planted corpus, in id order.
pub fn planted_records(spec: &SyntheticSpec) -> Result<Vec<PaperRecord>, FixtureError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let blocks: Vec<Vec<String>> = spec.blocks.iter().map(normalize_keywords).collect();
    let total_keywords: usize = blocks.iter().map(Vec::len).sum();
    let per_doc = spec.n_keywords.min(total_keywords);
    let countries = if spec.countries.is_empty() {
        default_countries()
    } else {
        spec.countries.clone()
    };

    let mut out = Vec::with_capacity(spec.n_docs);
    for d in 0..spec.n_docs {
        let own = d % blocks.len();
        let mut chosen: Vec<String> = Vec::with_capacity(per_doc);
        let mut chosen_set: BTreeSet<&str> = BTreeSet::new();
        let mut attempts = 0;
        while chosen.len() < per_doc {
            attempts += 1;
            let stay = blocks.len() == 1 || rng.gen::<f64>() < spec.in_block_probability;
            let block = if stay {
                own
            } else {
                let other = rng.gen_range(0..blocks.len() - 1);
                if other >= own {
                    other + 1
                } else {
                    other
                }
            };
            let kw = &blocks[block][rng.gen_range(0..blocks[block].len())];
            // avoid an endless loop when a block is nearly exhausted
            if chosen_set.insert(kw) || attempts > 50 * per_doc.max(1) {
                chosen.push(kw.clone());
            }
        }

        let mut rec = PaperRecord::new(
            SyntheticSpec::doc_id(d),
            rng.gen_range(spec.years.0..=spec.years.1),
        );
        rec.title = format!("Synthetic paper {d}");
        rec.keywords = normalize_keywords(chosen);
        let n_aff = rng.gen_range(1..=2usize);
        rec.affiliations = countries
            .choose_multiple(&mut rng, n_aff)
            .cloned()
            .collect();
        rec.affiliations.sort();
        rec.studied = vec![countries[own % countries.len()].clone()];
        if let Some(theme) = spec.doc_theme(d) {
            let vocab = &spec.theme_vocabularies[theme];
            let words: Vec<&str> = (0..spec.words_per_doc)
                .map(|_| vocab[rng.gen_range(0..vocab.len())].as_str())
                .collect();
            rec.text = Some(words.join(" "));
        }
        let pool = spec.n_docs.max(1);
        rec.refs = (0..3)
            .map(|_| format!("R{:06}", rng.gen_range(0..pool)))
            .collect();
        rec.refs.sort();
        rec.refs.dedup();
        out.push(rec);
    }
    Ok(out)
}

/// The planted corpus as a JSON Lines corpus file.
pub fn generate_planted_corpus(spec: &SyntheticSpec) -> Result<String, FixtureError> {
    let corpus = Corpus::from_records(planted_records(spec)?).expect("generated ids are unique");
    Ok(corpus.to_jsonl())
}

/// Three papers used throughout the docs:
///
/// | id | year | affiliations | studied |
/// |----|------|--------------|---------|
/// | P1 | 2000 | FR           | DE      |
/// | P2 | 2005 | FR, US       | FR      |
/// | P3 | 2012 | BR           | BR      |
pub fn three_paper_corpus() -> Corpus {
    let mut p1 = PaperRecord::new("P1", 2000);
    p1.title = "Border regions of Germany".into();
    p1.affiliations = vec!["FR".into()];
    p1.studied = vec!["DE".into()];
    p1.keywords = vec![
        "boundaries".into(),
        "europe".into(),
        "spatial analysis".into(),
    ];
    p1.text = Some(
        "Border regimes and boundary change along the frontier of Germany. \
         The border shapes regional integration; flood risk is marginal."
            .into(),
    );
    p1.refs = vec!["R1".into(), "R2".into()];

    let mut p2 = PaperRecord::new("P2", 2005);
    p2.title = "Urban risk in France".into();
    p2.affiliations = vec!["FR".into(), "US".into()];
    p2.studied = vec!["FR".into()];
    p2.keywords = vec!["risk".into(), "urban".into(), "spatial analysis".into()];
    p2.text = Some(
        "Flood risk and hazard exposure in French cities. Risk maps and \
         vulnerability indicators guide urban planning near the border."
            .into(),
    );
    p2.refs = vec!["R1".into(), "P1".into()];

    let mut p3 = PaperRecord::new("P3", 2012);
    p3.title = "Metropolitan growth in Brazil".into();
    p3.affiliations = vec!["BR".into()];
    p3.studied = vec!["BR".into()];
    p3.keywords = vec!["urban".into(), "growth".into(), "complexity".into()];
    p3.text = Some(
        "Urban growth and hazard in Brazilian metropolitan regions. \
         Landslide risk and flood hazard follow informal urbanisation."
            .into(),
    );
    p3.refs = vec!["R3".into()];

    Corpus::from_records([p1, p2, p3]).expect("fixture ids are unique")
}

/// Two cliques of `size` nodes joined by one bridge edge. Nodes `n00..`
/// belong to the first clique.
pub fn two_clique_graph(size: usize) -> KeywordGraph {
    let names: Vec<String> = (0..2 * size).map(|i| format!("n{i:02}")).collect();
    let mut edges = Vec::new();
    for block in 0..2 {
        for i in 0..size {
            for j in i + 1..size {
                edges.push((
                    names[block * size + i].clone(),
                    names[block * size + j].clone(),
                    1,
                ));
            }
        }
    }
    edges.push((names[size - 1].clone(), names[size].clone(), 1));
    KeywordGraph::new(names.into_iter().map(|n| (n, 1)), edges).expect("valid fixture")
}

/// Two triangles with no edge between them.
pub fn disjoint_triangles() -> KeywordGraph {
    KeywordGraph::from_edges([
        ("a", "b", 1),
        ("b", "c", 1),
        ("a", "c", 1),
        ("x", "y", 1),
        ("y", "z", 1),
        ("x", "z", 1),
    ])
    .expect("valid fixture")
}

/// Normalized mutual information `I(A;B) / sqrt(H(A) H(B))` between two
/// labelings of the same items. Two single-cluster labelings score 1.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let n = a.len() as f64;
    if same_partition(a, b) {
        return 1.0;
    }
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
    }
    let entropy =
        |m: &HashMap<usize, f64>| -> f64 { m.values().map(|&c| -(c / n) * (c / n).ln()).sum() };
    let (ha, hb) = (entropy(&pa), entropy(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * ((c * n) / (pa[&x] * pb[&y])).ln())
        .sum();
    (mi / (ha * hb).sqrt()).clamp(0.0, 1.0)
}

/// True when the two labelings group items identically up to renaming.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut forward: HashMap<usize, usize> = HashMap::new();
    let mut backward: HashMap<usize, usize> = HashMap::new();
    a.len() == b.len()
        && a.iter().zip(b).all(|(&x, &y)| {
            *forward.entry(x).or_insert(y) == y && *backward.entry(y).or_insert(x) == x
        })
}

/// Fraction of items whose predicted cluster's majority truth label matches
/// their own.
pub fn purity(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len(), "labelings differ in length");
    if predicted.is_empty() {
        return 1.0;
    }
    let mut table: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (&p, &t) in predicted.iter().zip(truth) {
        *table.entry(p).or_default().entry(t).or_default() += 1;
    }
    let hits: usize = table
        .values()
        .map(|row| row.values().copied().max().unwrap_or(0))
        .sum();
    hits as f64 / predicted.len() as f64
}
