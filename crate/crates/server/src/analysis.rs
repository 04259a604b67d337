//! Response bodies of every endpoint, computed from a snapshot. The CLI
//! calls the same functions, so a command and its endpoint agree.

use biblionet::corpus::{MAX_YEAR, MIN_YEAR};
use biblionet::geo::{
    build_contingency, build_theme_contingency, class_report, country_activity, ClassReport,
    GeoError, Role,
};
use biblionet::network::CommunityHierarchy;
use biblionet::network::{
    build_cooccurrence, cut_level, detect_communities, layout, ExportEdge, ExportNode,
    GraphDocument, KeywordGraph, LayoutPositions, Scope, DEFAULT_ITERATIONS,
};
use biblionet::themes::{
    export_themes, extract_themes, word_cloud, ThemeError, ThemeExport, ThemeModel, WordCloud,
};
use biblionet::PeriodFilter;
use serde::Serialize;

use crate::error::ApiError;
use crate::request::{AnalysisRequest, ColumnSource};
use crate::snapshot::Snapshot;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub papers: usize,
    /// `[first, last]`, or null for an empty corpus.
    pub years: Option<(i32, i32)>,
    /// Distinct keywords.
    pub keywords: usize,
}

pub fn summary(snap: &Snapshot) -> Summary {
    Summary {
        papers: snap.corpus.len(),
        years: snap.corpus.year_range(),
        keywords: snap.corpus.keyword_index().len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityRecord {
    pub code: String,
    pub n_authored: u32,
    pub n_studied: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityExport {
    pub from: i32,
    pub to: i32,
    /// Sorted by code.
    pub countries: Vec<ActivityRecord>,
}

/// Missing bounds default to the corpus year range.
pub fn period(
    snap: &Snapshot,
    from: Option<i32>,
    to: Option<i32>,
) -> Result<PeriodFilter, ApiError> {
    let (lo, hi) = snap.corpus.year_range().unwrap_or((MIN_YEAR, MAX_YEAR));
    let from = from.unwrap_or(lo.min(to.unwrap_or(lo)));
    let to = to.unwrap_or(hi.max(from));
    PeriodFilter::new(from, to).map_err(|e| ApiError::invalid("from", e.to_string()))
}

pub fn activity(
    snap: &Snapshot,
    from: Option<i32>,
    to: Option<i32>,
) -> Result<ActivityExport, ApiError> {
    let period = period(snap, from, to)?;
    let a = country_activity(&snap.corpus, period, snap.gazetteer.as_ref());
    Ok(ActivityExport {
        from: period.from_year(),
        to: period.to_year(),
        countries: a
            .countries
            .into_iter()
            .map(|(code, c)| ActivityRecord {
                code,
                n_authored: c.n_authored,
                n_studied: c.n_studied,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassesExport {
    pub role: Role,
    pub source: ColumnSource,
    pub from: i32,
    pub to: i32,
    #[serde(flatten)]
    pub report: ClassReport,
}

fn geo_error(e: GeoError) -> ApiError {
    match e {
        GeoError::KOutOfRange { .. } => ApiError::invalid("k", e.to_string()),
        GeoError::NoLexicons => ApiError::invalid("source", "no lexicon file is configured"),
        other => ApiError::unprocessable(other.to_string()),
    }
}

fn theme_error(e: ThemeError, param: &str) -> ApiError {
    match e {
        ThemeError::UnknownTheme(id) => ApiError::unknown_theme(&id.to_string()),
        other => ApiError::invalid(param, other.to_string()),
    }
}

pub fn themes_model(snap: &Snapshot, k: usize, param: &str) -> Result<ThemeModel, ApiError> {
    extract_themes(&snap.corpus, k, snap.seed).map_err(|e| theme_error(e, param))
}

pub fn classes(
    snap: &Snapshot,
    k: usize,
    role: Role,
    source: ColumnSource,
    themes: usize,
    from: Option<i32>,
    to: Option<i32>,
) -> Result<ClassesExport, ApiError> {
    let period = period(snap, from, to)?;
    let view = snap.corpus.filter_period(period);
    let gazetteer = snap.gazetteer.as_ref();
    let table = match source {
        ColumnSource::Lexicons => build_contingency(&view, &snap.lexicons, role, gazetteer),
        ColumnSource::Themes => {
            let model = themes_model(snap, themes, "themes")?;
            build_theme_contingency(&view, &model, role, gazetteer)
        }
    }
    .map_err(geo_error)?;
    let activity = country_activity(&snap.corpus, period, gazetteer);
    let report = class_report(&table, k, &activity).map_err(geo_error)?;
    Ok(ClassesExport {
        role,
        source,
        from: period.from_year(),
        to: period.to_year(),
        report,
    })
}

/// Graph, hierarchy and positions of one network view.
pub struct NetworkModel {
    pub graph: KeywordGraph,
    pub hierarchy: CommunityHierarchy,
    pub positions: LayoutPositions,
}

pub fn network_model(snap: &Snapshot, scope: Scope, min_weight: u32) -> NetworkModel {
    let graph = build_cooccurrence(&snap.corpus, scope, min_weight, false);
    let hierarchy = detect_communities(&graph, snap.seed, 1.0);
    let positions = layout(&graph, snap.seed, DEFAULT_ITERATIONS);
    NetworkModel {
        graph,
        hierarchy,
        positions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkView {
    pub scope: Scope,
    #[serde(rename = "minWeight")]
    pub min_weight: u32,
    /// Level served, after clamping.
    pub level: usize,
    /// Number of stored levels; valid levels are `0..levels`.
    pub levels: usize,
    pub communities: usize,
    pub modularity: f64,
    pub nodes: Vec<ExportNode>,
    pub edges: Vec<ExportEdge>,
}

pub fn network(
    snap: &Snapshot,
    scope: Scope,
    min_weight: u32,
    level: Option<usize>,
) -> NetworkView {
    let model = network_model(snap, scope, min_weight);
    let top = model.hierarchy.top();
    let level = level.unwrap_or(top).min(top);
    let partition = cut_level(&model.hierarchy, level);
    let doc = GraphDocument::new(&model.graph, &partition, &model.positions).expect("sizes agree");
    let l = model.hierarchy.level(level);
    NetworkView {
        scope,
        min_weight,
        level,
        levels: model.hierarchy.levels.len(),
        communities: l.communities,
        modularity: l.modularity,
        nodes: doc.nodes,
        edges: doc.edges,
    }
}

pub fn themes(snap: &Snapshot, k: usize, top: usize) -> Result<ThemeExport, ApiError> {
    Ok(export_themes(&themes_model(snap, k, "k")?, top))
}

pub fn cloud(snap: &Snapshot, id: usize, k: usize, top: usize) -> Result<WordCloud, ApiError> {
    word_cloud(&themes_model(snap, k, "k")?, id, top).map_err(|e| theme_error(e, "k"))
}

fn to_body<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("response serializes")
}

/// JSON body answering `request` against `snap`.
pub fn respond(request: &AnalysisRequest, snap: &Snapshot) -> Result<Vec<u8>, ApiError> {
    Ok(match *request {
        AnalysisRequest::Summary => to_body(&summary(snap)),
        AnalysisRequest::Activity { from, to } => to_body(&activity(snap, from, to)?),
        AnalysisRequest::Classes {
            k,
            role,
            source,
            themes,
            from,
            to,
        } => to_body(&classes(snap, k, role, source, themes, from, to)?),
        AnalysisRequest::Network {
            scope,
            min_weight,
            level,
        } => to_body(&network(snap, scope, min_weight, level)),
        AnalysisRequest::Themes { k, top } => to_body(&themes(snap, k, top)?),
        AnalysisRequest::Cloud { id, k, top } => to_body(&cloud(snap, id, k, top)?),
    })
}
