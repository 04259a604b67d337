//! Country activity, country × lexicon contingency tables, standardized
//! residuals and Ward classification of countries by thematic profile.
//!
//! Residuals follow the usual chi-square decomposition:
//!
//! ```text
//! e_ct = row_c * col_t / N
//! r_ct = (n_ct - e_ct) / sqrt(e_ct)
//! ```
//!
//! A cell is over-represented when `r_ct > 2` and under-represented when
//! `r_ct < -2`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, PaperRecord, PeriodFilter};
use crate::text::{detect_studied_countries, lexicon_counts, tokenize, Gazetteer, Lexicon};
use crate::themes::ThemeModel;

/// Residual magnitude beyond which a cell is labelled over or under.
pub const RESIDUAL_THRESHOLD: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum GeoError {
    #[error("at least one lexicon is required")]
    NoLexicons,
    #[error("no paper in scope has a full text")]
    NoText,
    #[error("table is empty")]
    EmptyTable,
    #[error("row {0:?} has a zero total")]
    ZeroRow(String),
    #[error("column {0:?} has a zero total")]
    ZeroColumn(String),
    #[error("k = {k} is outside 1..={countries}")]
    KOutOfRange { k: usize, countries: usize },
    #[error("no country has a non-zero profile")]
    NoCountries,
    #[error("matrix shape does not match labels: {0}")]
    Shape(String),
}

/// Which country list of a paper a table or count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Studied,
    Affiliation,
}

impl std::str::FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "studied" => Ok(Role::Studied),
            "affiliation" | "authored" => Ok(Role::Affiliation),
            other => Err(format!(
                "unknown role {other:?} (expected studied or affiliation)"
            )),
        }
    }
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Studied => "studied",
            Role::Affiliation => "affiliation",
        }
    }
}

/// Countries studied by a paper. Explicit metadata wins; when it is empty
/// and a gazetteer is supplied, the full text is scanned.
pub fn studied_countries(paper: &PaperRecord, gazetteer: Option<&Gazetteer>) -> BTreeSet<String> {
    if !paper.studied.is_empty() {
        return paper.studied.iter().cloned().collect();
    }
    match (gazetteer, paper.text.as_deref()) {
        (Some(g), Some(text)) => detect_studied_countries(text, g),
        _ => BTreeSet::new(),
    }
}

/// Distinct countries attached to `paper` under `role`.
pub fn countries_for(
    paper: &PaperRecord,
    role: Role,
    gazetteer: Option<&Gazetteer>,
) -> BTreeSet<String> {
    match role {
        Role::Affiliation => paper.affiliations.iter().cloned().collect(),
        Role::Studied => studied_countries(paper, gazetteer),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ActivityCounts {
    pub n_authored: u32,
    pub n_studied: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountryActivity {
    pub period: PeriodFilter,
    /// Keyed by alpha-2 code, so iteration is in code order.
    pub countries: BTreeMap<String, ActivityCounts>,
}

impl CountryActivity {
    pub fn get(&self, code: &str) -> ActivityCounts {
        self.countries.get(code).copied().unwrap_or_default()
    }
}

/// Each paper counts at most once per country and role.
pub fn country_activity(
    corpus: &Corpus,
    period: PeriodFilter,
    gazetteer: Option<&Gazetteer>,
) -> CountryActivity {
    let view = corpus.filter_period(period);
    let mut countries: BTreeMap<String, ActivityCounts> = BTreeMap::new();
    for paper in view.papers() {
        for code in countries_for(paper, Role::Affiliation, gazetteer) {
            countries.entry(code).or_default().n_authored += 1;
        }
        for code in countries_for(paper, Role::Studied, gazetteer) {
            countries.entry(code).or_default().n_studied += 1;
        }
    }
    CountryActivity { period, countries }
}

/// Country × column count matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContingencyTable {
    rows: Vec<String>,
    cols: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(
        rows: Vec<String>,
        cols: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self, GeoError> {
        if counts.len() != rows.len() {
            return Err(GeoError::Shape(format!(
                "{} rows, {} labels",
                counts.len(),
                rows.len()
            )));
        }
        if let Some(bad) = counts.iter().find(|r| r.len() != cols.len()) {
            return Err(GeoError::Shape(format!(
                "row of {} cells, {} columns",
                bad.len(),
                cols.len()
            )));
        }
        Ok(ContingencyTable { rows, cols, counts })
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, row: &str, col: &str) -> Option<u64> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.cols.iter().position(|x| x == col)?;
        Some(self.counts[r][c])
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols.len())
            .map(|c| self.counts.iter().map(|r| r[c]).sum())
            .collect()
    }

    pub fn grand_total(&self) -> u64 {
        self.row_totals().iter().sum()
    }

    /// Drops all-zero rows and columns, returning the dropped labels.
    pub fn without_empty(&self) -> (ContingencyTable, Vec<String>, Vec<String>) {
        let rt = self.row_totals();
        let ct = self.col_totals();
        let keep_r: Vec<usize> = (0..self.rows.len()).filter(|&i| rt[i] > 0).collect();
        let keep_c: Vec<usize> = (0..self.cols.len()).filter(|&j| ct[j] > 0).collect();
        let dropped_r = (0..self.rows.len())
            .filter(|&i| rt[i] == 0)
            .map(|i| self.rows[i].clone())
            .collect();
        let dropped_c = (0..self.cols.len())
            .filter(|&j| ct[j] == 0)
            .map(|j| self.cols[j].clone())
            .collect();
        let table = ContingencyTable {
            rows: keep_r.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: keep_c.iter().map(|&j| self.cols[j].clone()).collect(),
            counts: keep_r
                .iter()
                .map(|&i| keep_c.iter().map(|&j| self.counts[i][j]).collect())
                .collect(),
        };
        (table, dropped_r, dropped_c)
    }
}

/// Lexicon occurrences in the full texts of papers attached to each
/// country. A paper with several countries adds its counts to every one.
/// Papers without text are skipped.
pub fn build_contingency(
    corpus: &Corpus,
    lexicons: &[Lexicon],
    role: Role,
    gazetteer: Option<&Gazetteer>,
) -> Result<ContingencyTable, GeoError> {
    if lexicons.is_empty() {
        return Err(GeoError::NoLexicons);
    }
    let cols: Vec<String> = lexicons.iter().map(|l| l.name().to_string()).collect();
    let mut rows: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut any_text = false;
    // corpus iteration is in id order, so accumulation order is fixed
    for paper in corpus.papers() {
        let Some(text) = paper.text.as_deref().filter(|_| paper.has_text()) else {
            continue;
        };
        any_text = true;
        let countries = countries_for(paper, role, gazetteer);
        if countries.is_empty() {
            continue;
        }
        let counts = lexicon_counts(&tokenize(text, paper.lang), lexicons);
        for code in countries {
            let row = rows.entry(code).or_insert_with(|| vec![0; cols.len()]);
            for (cell, name) in row.iter_mut().zip(&cols) {
                *cell += counts[name];
            }
        }
    }
    if !any_text {
        return Err(GeoError::NoText);
    }
    let (labels, counts) = rows.into_iter().unzip();
    ContingencyTable::new(labels, cols, counts)
}

/// Country × theme table: number of each country's papers assigned to each
/// theme of `model`.
pub fn build_theme_contingency(
    corpus: &Corpus,
    model: &ThemeModel,
    role: Role,
    gazetteer: Option<&Gazetteer>,
) -> Result<ContingencyTable, GeoError> {
    let cols: Vec<String> = model
        .themes()
        .iter()
        .map(|t| format!("theme-{}", t.id))
        .collect();
    let mut rows: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for theme in model.themes() {
        for id in &theme.members {
            let Some(paper) = corpus.get(id) else {
                continue;
            };
            for code in countries_for(paper, role, gazetteer) {
                rows.entry(code).or_insert_with(|| vec![0; cols.len()])[theme.id] += 1;
            }
        }
    }
    if model.themes().is_empty() {
        return Err(GeoError::NoText);
    }
    let (labels, counts) = rows.into_iter().unzip();
    ContingencyTable::new(labels, cols, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Over,
    Neutral,
    Under,
}

impl Representation {
    pub fn of(residual: f64) -> Self {
        if residual > RESIDUAL_THRESHOLD {
            Representation::Over
        } else if residual < -RESIDUAL_THRESHOLD {
            Representation::Under
        } else {
            Representation::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub expected: Vec<Vec<f64>>,
    pub residuals: Vec<Vec<f64>>,
    pub labels: Vec<Vec<Representation>>,
}

pub fn representation_residuals(table: &ContingencyTable) -> Result<Residuals, GeoError> {
    let n = table.grand_total();
    if n == 0 || table.rows.is_empty() || table.cols.is_empty() {
        return Err(GeoError::EmptyTable);
    }
    let rt = table.row_totals();
    let ct = table.col_totals();
    if let Some(i) = rt.iter().position(|&t| t == 0) {
        return Err(GeoError::ZeroRow(table.rows[i].clone()));
    }
    if let Some(j) = ct.iter().position(|&t| t == 0) {
        return Err(GeoError::ZeroColumn(table.cols[j].clone()));
    }
    let n = n as f64;
    let mut expected = Vec::with_capacity(rt.len());
    let mut residuals = Vec::with_capacity(rt.len());
    let mut labels = Vec::with_capacity(rt.len());
    for (i, &row_total) in rt.iter().enumerate() {
        let e_row: Vec<f64> = ct
            .iter()
            .map(|&c| row_total as f64 * c as f64 / n)
            .collect();
        let r_row: Vec<f64> = e_row
            .iter()
            .zip(&table.counts[i])
            .map(|(&e, &obs)| (obs as f64 - e) / e.sqrt())
            .collect();
        labels.push(r_row.iter().map(|&r| Representation::of(r)).collect());
        expected.push(e_row);
        residuals.push(r_row);
    }
    Ok(Residuals {
        rows: table.rows.clone(),
        cols: table.cols.clone(),
        expected,
        residuals,
        labels,
    })
}

/// One agglomeration step. Leaves are `0..n` in row order; the cluster
/// created by merge `i` is `n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryClassification {
    /// Classified countries, in table row order.
    pub countries: Vec<String>,
    /// Class of each entry of `countries`, numbered `1..=k` by first appearance.
    pub classes: Vec<usize>,
    pub k: usize,
    pub dendrogram: Vec<Merge>,
    /// Countries left out because their row is all zero.
    pub excluded: Vec<String>,
}

impl CountryClassification {
    pub fn class_of(&self, code: &str) -> Option<usize> {
        let i = self.countries.iter().position(|c| c == code)?;
        Some(self.classes[i])
    }

    /// Partition obtained by replaying the dendrogram down to `k` classes.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>, GeoError> {
        cut_dendrogram(&self.dendrogram, self.countries.len(), k)
    }
}

/// Row profiles, Ward linkage on Euclidean distance, dendrogram cut to `k`
/// classes. Merge heights are Ward distances,
/// `sqrt(2 * |A| * |B| / (|A| + |B|)) * ||mean(A) - mean(B)||`.
/// Equal distances resolve to the pair whose smallest members come first
/// in row order.
pub fn classify_countries(
    table: &ContingencyTable,
    k: usize,
) -> Result<CountryClassification, GeoError> {
    let totals = table.row_totals();
    let mut countries = Vec::new();
    let mut profiles = Vec::new();
    let mut excluded = Vec::new();
    for (i, code) in table.rows.iter().enumerate() {
        if totals[i] == 0 {
            excluded.push(code.clone());
            continue;
        }
        let t = totals[i] as f64;
        countries.push(code.clone());
        profiles.push(
            table.counts[i]
                .iter()
                .map(|&c| c as f64 / t)
                .collect::<Vec<f64>>(),
        );
    }
    if countries.is_empty() {
        return Err(GeoError::NoCountries);
    }
    if k == 0 || k > countries.len() {
        return Err(GeoError::KOutOfRange {
            k,
            countries: countries.len(),
        });
    }
    let dendrogram = ward_linkage(&profiles);
    let classes = cut_dendrogram(&dendrogram, countries.len(), k)?;
    Ok(CountryClassification {
        countries,
        classes,
        k,
        dendrogram,
        excluded,
    })
}

/// Ward agglomeration over `points` with Lance–Williams updates on squared
/// distances.
pub fn ward_linkage(points: &[Vec<f64>]) -> Vec<Merge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    // d2[i][j] holds the squared Ward distance between active clusters i, j
    let mut d2 = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2[i][j] = s;
            d2[j][i] = s;
        }
    }
    let mut size = vec![1usize; n];
    let mut label: Vec<usize> = (0..n).collect();
    // smallest original row in each slot's cluster; slots are merged into
    // the lower index so this equals the slot index itself
    let mut active: Vec<bool> = vec![true; n];
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if !active[j] {
                    continue;
                }
                if best.is_none_or(|(_, _, d)| d2[i][j] < d) {
                    best = Some((i, j, d2[i][j]));
                }
            }
        }
        let (a, b, dist2) = best.expect("two active clusters remain");
        let (na, nb) = (size[a] as f64, size[b] as f64);
        for c in 0..n {
            if !active[c] || c == a || c == b {
                continue;
            }
            let nc = size[c] as f64;
            let updated =
                ((na + nc) * d2[a][c] + (nb + nc) * d2[b][c] - nc * dist2) / (na + nb + nc);
            d2[a][c] = updated;
            d2[c][a] = updated;
        }
        merges.push(Merge {
            left: label[a].min(label[b]),
            right: label[a].max(label[b]),
            height: dist2.max(0.0).sqrt(),
            size: size[a] + size[b],
        });
        size[a] += size[b];
        label[a] = n + step;
        active[b] = false;
    }
    merges
}

/// Replays the first `n - k` merges; classes are numbered from 1 in order
/// of each class's first row.
pub fn cut_dendrogram(merges: &[Merge], n: usize, k: usize) -> Result<Vec<usize>, GeoError> {
    if k == 0 || k > n || merges.len() + 1 < n {
        return Err(GeoError::KOutOfRange { k, countries: n });
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in merges.iter().take(n - k).enumerate() {
        let node = n + step;
        let l = find(&mut parent, m.left);
        let r = find(&mut parent, m.right);
        parent[l] = node;
        parent[r] = node;
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        let next = class_of_root.len() + 1;
        out.push(*class_of_root.entry(root).or_insert(next));
    }
    Ok(out)
}

/// One country in the choropleth join table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryRecord {
    pub code: String,
    pub n_authored: u32,
    pub n_studied: u32,
    /// `None` when the country was not classified.
    pub class: Option<usize>,
    /// Standardized residual per column; empty when not classified.
    pub residuals: BTreeMap<String, f64>,
}

/// Classification of a table together with activity, ready for export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub k: usize,
    /// Columns that carried residuals (all-zero columns are dropped).
    pub columns: Vec<String>,
    /// Every country seen in the activity counts or the table, by code.
    pub countries: Vec<CountryRecord>,
    /// Classified countries; dendrogram leaf `i` is `leaves[i]`.
    pub leaves: Vec<String>,
    pub dendrogram: Vec<Merge>,
    /// Table rows left out because they were all zero.
    pub excluded: Vec<String>,
}

/// Drops empty rows and columns, computes residuals and classes, and joins
/// both with `activity` by country code.
pub fn class_report(
    table: &ContingencyTable,
    k: usize,
    activity: &CountryActivity,
) -> Result<ClassReport, GeoError> {
    let (clean, excluded, _) = table.without_empty();
    if clean.rows.is_empty() {
        return Err(GeoError::NoCountries);
    }
    let classification = classify_countries(&clean, k)?;
    let residuals = representation_residuals(&clean)?;

    let mut records: BTreeMap<String, CountryRecord> = BTreeMap::new();
    let blank = |code: &str| CountryRecord {
        code: code.to_string(),
        n_authored: 0,
        n_studied: 0,
        class: None,
        residuals: BTreeMap::new(),
    };
    for (code, counts) in &activity.countries {
        let r = records.entry(code.clone()).or_insert_with(|| blank(code));
        r.n_authored = counts.n_authored;
        r.n_studied = counts.n_studied;
    }
    for code in table.rows.iter() {
        records.entry(code.clone()).or_insert_with(|| blank(code));
    }
    for (i, code) in classification.countries.iter().enumerate() {
        records.get_mut(code).expect("row recorded").class = Some(classification.classes[i]);
    }
    for (i, code) in residuals.rows.iter().enumerate() {
        let r = records.get_mut(code).expect("row recorded");
        r.residuals = residuals
            .cols
            .iter()
            .cloned()
            .zip(residuals.residuals[i].iter().copied())
            .collect();
    }
    Ok(ClassReport {
        k,
        columns: residuals.cols,
        countries: records.into_values().collect(),
        leaves: classification.countries,
        dendrogram: classification.dendrogram,
        excluded,
    })
}
