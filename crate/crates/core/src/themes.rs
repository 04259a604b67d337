//! Full-text themes by spherical k-means over unit TF-IDF vectors, and
//! word-cloud payloads derived from them.
//!
//! Initial centres come from greedy k-means++ (a few seeded candidates per
//! centre, keeping the one that most reduces the potential). Lloyd
//! iterations then alternate cosine assignment and normalized-mean centroid
//! updates until assignments stop changing or 100 iterations pass.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::text::{document_frequencies, tokenize, vectorize_tfidf};

pub const DEFAULT_THEMES: usize = 10;
pub const DEFAULT_CLOUD_TERMS: usize = 50;
pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum ThemeError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("{available} documents have text, fewer than k = {k}")]
    TooFewDocuments { k: usize, available: usize },
    #[error("unknown theme id {0}")]
    UnknownTheme(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theme {
    pub id: usize,
    /// Member paper ids, ascending.
    pub members: Vec<String>,
    /// Token counts summed over member texts.
    pub term_frequencies: BTreeMap<String, u64>,
    /// Unit-length mean direction of member TF-IDF vectors (non-zero entries).
    pub centroid: Vec<(String, f64)>,
}

impl Theme {
    pub fn doc_count(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThemeModel {
    pub k: usize,
    pub seed: u64,
    themes: Vec<Theme>,
    /// Sum of member-to-centroid cosines after each centroid update.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

impl ThemeModel {
    pub fn themes(&self) -> &[Theme] {
        &self.themes
    }

    pub fn theme(&self, id: usize) -> Option<&Theme> {
        self.themes.get(id)
    }

    /// Theme of a paper, if it has one.
    pub fn theme_of(&self, paper_id: &str) -> Option<usize> {
        self.themes
            .iter()
            .find(|t| {
                t.members
                    .binary_search_by(|m| m.as_str().cmp(paper_id))
                    .is_ok()
            })
            .map(|t| t.id)
    }

    /// 1 for the theme with most documents; ties go to the lower id.
    pub fn color_rank(&self, id: usize) -> Option<usize> {
        let mut order: Vec<&Theme> = self.themes.iter().collect();
        order.sort_by(|a, b| b.doc_count().cmp(&a.doc_count()).then(a.id.cmp(&b.id)));
        order.iter().position(|t| t.id == id).map(|p| p + 1)
    }
}

struct Doc {
    id: String,
    counts: BTreeMap<String, u64>,
    /// Unit (or zero) TF-IDF vector as sorted `(term index, weight)`.
    vector: Vec<(usize, f64)>,
}

fn dot(doc: &[(usize, f64)], centroid: &[f64]) -> f64 {
    doc.iter().map(|&(t, w)| w * centroid[t]).sum()
}

fn doc_d2(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    // |a - b|^2 for unit vectors, with zero vectors handled explicitly
    let (mut i, mut j, mut cos) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                cos += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let na: f64 = a.iter().map(|x| x.1 * x.1).sum();
    let nb: f64 = b.iter().map(|x| x.1 * x.1).sum();
    (na + nb - 2.0 * cos).max(0.0)
}

pub fn extract_themes(corpus: &Corpus, k: usize, seed: u64) -> Result<ThemeModel, ThemeError> {
    if k == 0 {
        return Err(ThemeError::ZeroK);
    }
    let texted: Vec<(String, Vec<String>)> = corpus
        .papers()
        .filter(|p| p.has_text())
        .map(|p| {
            (
                p.id.clone(),
                tokenize(p.text.as_deref().unwrap_or_default(), p.lang),
            )
        })
        .collect();
    if texted.len() < k {
        return Err(ThemeError::TooFewDocuments {
            k,
            available: texted.len(),
        });
    }

    let n_docs = texted.len() as u32;
    let df = document_frequencies(texted.iter().map(|(_, t)| t.as_slice()));
    let mut vocab: Vec<&String> = df.keys().collect();
    vocab.sort();
    let term_index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let docs: Vec<Doc> = texted
        .iter()
        .map(|(id, tokens)| {
            let tfidf =
                vectorize_tfidf(tokens, &df, n_docs).expect("df computed from the same tokens");
            let norm = tfidf.norm();
            let vector = tfidf
                .iter()
                .map(|(t, w)| (term_index[t], w / norm))
                .collect();
            let mut counts = BTreeMap::new();
            for t in tokens {
                *counts.entry(t.clone()).or_insert(0u64) += 1;
            }
            Doc {
                id: id.clone(),
                counts,
                vector,
            }
        })
        .collect();

    let dims = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = kmeans_pp(&docs, k, &mut rng);
    let mut centroids: Vec<Vec<f64>> = centers
        .iter()
        .map(|&d| {
            let mut c = vec![0.0; dims];
            for &(t, w) in &docs[d].vector {
                c[t] = w;
            }
            c
        })
        .collect();

    let mut assignment: Vec<usize> = Vec::new();
    let mut objective = Vec::new();
    let mut iterations = 0;
    for iter in 0..MAX_ITERATIONS {
        let mut next = assign(&docs, &centroids);
        repair_empty(&docs, &centroids, &mut next, k);
        if iter > 0 && next == assignment {
            break;
        }
        assignment = next;
        centroids = update_centroids(&docs, &assignment, k, dims);
        objective.push(
            docs.iter()
                .zip(&assignment)
                .map(|(d, &c)| dot(&d.vector, &centroids[c]))
                .sum(),
        );
        iterations = iter + 1;
    }

    let mut themes: Vec<Theme> = (0..k)
        .map(|id| Theme {
            id,
            members: Vec::new(),
            term_frequencies: BTreeMap::new(),
            centroid: centroids[id]
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(t, &w)| (vocab[t].clone(), w))
                .collect(),
        })
        .collect();
    for (doc, &c) in docs.iter().zip(&assignment) {
        let theme = &mut themes[c];
        theme.members.push(doc.id.clone());
        for (term, &n) in &doc.counts {
            *theme.term_frequencies.entry(term.clone()).or_insert(0) += n;
        }
    }
    Ok(ThemeModel {
        k,
        seed,
        themes,
        objective,
        iterations,
    })
}

/// Greedy k-means++ seeding; returns document indices.
fn kmeans_pp(docs: &[Doc], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = docs.len();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let first = rng.gen_range(0..n);
    let mut centers = vec![first];
    let mut closest: Vec<f64> = docs
        .iter()
        .map(|d| doc_d2(&d.vector, &docs[first].vector))
        .collect();

    while centers.len() < k {
        let potential: f64 = closest.iter().sum();
        if potential <= 0.0 {
            // every document coincides with a centre
            let next = (0..n).find(|i| !centers.contains(i)).expect("k <= n");
            centers.push(next);
            continue;
        }
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for _ in 0..trials {
            let target = rng.gen::<f64>() * potential;
            let mut acc = 0.0;
            let mut pick = (0..n)
                .rev()
                .find(|&i| closest[i] > 0.0)
                .expect("positive potential");
            for (i, &d) in closest.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            let updated: Vec<f64> = docs
                .iter()
                .zip(&closest)
                .map(|(d, &c)| c.min(doc_d2(&d.vector, &docs[pick].vector)))
                .collect();
            let pot: f64 = updated.iter().sum();
            if best.as_ref().is_none_or(|(_, b, _)| pot < *b) {
                best = Some((pick, pot, updated));
            }
        }
        let (pick, _, updated) = best.expect("at least one trial");
        centers.push(pick);
        closest = updated;
    }
    centers
}

/// Most similar centroid; ties go to the lower theme index.
fn assign(docs: &[Doc], centroids: &[Vec<f64>]) -> Vec<usize> {
    docs.iter()
        .map(|d| {
            let mut best = 0;
            let mut best_sim = f64::NEG_INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let s = dot(&d.vector, c);
                if s > best_sim {
                    best = j;
                    best_sim = s;
                }
            }
            best
        })
        .collect()
}

/// Gives every empty theme the document least similar to its own centroid,
/// taken from a theme that can spare one.
fn repair_empty(docs: &[Doc], centroids: &[Vec<f64>], assignment: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, d) in docs.iter().enumerate() {
            let c = assignment[i];
            if sizes[c] < 2 {
                continue;
            }
            let s = dot(&d.vector, &centroids[c]);
            if far.is_none_or(|(_, fs)| s < fs) {
                far = Some((i, s));
            }
        }
        let (i, _) = far.expect("k <= number of documents");
        sizes[assignment[i]] -= 1;
        assignment[i] = empty;
        sizes[empty] = 1;
    }
}

fn update_centroids(docs: &[Doc], assignment: &[usize], k: usize, dims: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dims]; k];
    for (d, &c) in docs.iter().zip(assignment) {
        for &(t, w) in &d.vector {
            sums[c][t] += w;
        }
    }
    for s in &mut sums {
        let norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            s.iter_mut().for_each(|v| *v /= norm);
        }
    }
    sums
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudEntry {
    pub term: String,
    pub frequency: u64,
    /// `frequency / max frequency in the cloud`.
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordCloud {
    pub theme_id: usize,
    pub doc_count: usize,
    pub color_rank: usize,
    /// By frequency descending, then term ascending.
    pub entries: Vec<CloudEntry>,
}

pub fn word_cloud(
    model: &ThemeModel,
    theme_id: usize,
    top_n: usize,
) -> Result<WordCloud, ThemeError> {
    let theme = model
        .theme(theme_id)
        .ok_or(ThemeError::UnknownTheme(theme_id))?;
    let mut terms: Vec<(&String, u64)> = theme
        .term_frequencies
        .iter()
        .map(|(t, &f)| (t, f))
        .collect();
    terms.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    terms.truncate(top_n);
    let max = terms.first().map_or(1, |t| t.1) as f64;
    Ok(WordCloud {
        theme_id,
        doc_count: theme.doc_count(),
        color_rank: model.color_rank(theme_id).expect("theme exists"),
        entries: terms
            .into_iter()
            .map(|(term, frequency)| CloudEntry {
                term: term.clone(),
                frequency,
                size: frequency as f64 / max,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThemeSummary {
    pub id: usize,
    pub doc_count: usize,
    pub color_rank: usize,
    pub top_terms: Vec<CloudEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThemeExport {
    pub k: usize,
    pub seed: u64,
    pub themes: Vec<ThemeSummary>,
}

/// Per-theme summary sorted by theme id.
pub fn export_themes(model: &ThemeModel, top_n: usize) -> ThemeExport {
    ThemeExport {
        k: model.k,
        seed: model.seed,
        themes: model
            .themes
            .iter()
            .map(|t| {
                let cloud = word_cloud(model, t.id, top_n).expect("theme exists");
                ThemeSummary {
                    id: t.id,
                    doc_count: cloud.doc_count,
                    color_rank: cloud.color_rank,
                    top_terms: cloud.entries,
                }
            })
            .collect(),
    }
}
