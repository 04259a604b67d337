//! Parsing and canonical form of analysis requests.
//!
//! Every request is parsed into a typed value with defaults filled in, so
//! two requests that differ only in parameter order or spelling of a value
//! (`scope=SEED` vs `scope=seed`) share one canonical string and one cache
//! entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use biblionet::geo::Role;
use biblionet::network::Scope;
use biblionet::themes::{DEFAULT_CLOUD_TERMS, DEFAULT_THEMES};

use crate::error::ApiError;

/// Column source of a classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnSource {
    Lexicons,
    Themes,
}

impl FromStr for ColumnSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lexicons" => Ok(ColumnSource::Lexicons),
            "themes" => Ok(ColumnSource::Themes),
            other => Err(format!(
                "unknown source {other:?} (expected lexicons or themes)"
            )),
        }
    }
}

impl ColumnSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnSource::Lexicons => "lexicons",
            ColumnSource::Themes => "themes",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisRequest {
    Summary,
    Activity {
        from: Option<i32>,
        to: Option<i32>,
    },
    Classes {
        k: usize,
        role: Role,
        source: ColumnSource,
        /// Theme count, used only when `source` is themes.
        themes: usize,
        from: Option<i32>,
        to: Option<i32>,
    },
    Network {
        scope: Scope,
        min_weight: u32,
        /// `None` selects the coarsest level.
        level: Option<usize>,
    },
    Themes {
        k: usize,
        top: usize,
    },
    Cloud {
        id: usize,
        k: usize,
        top: usize,
    },
}

/// Query parameters checked against the names an endpoint accepts.
struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    fn new(query: &[(String, String)], allowed: &[&str]) -> Result<Self, ApiError> {
        let mut values = BTreeMap::new();
        for (key, value) in query {
            if !allowed.contains(&key.as_str()) {
                return Err(ApiError::unknown_parameter(key));
            }
            if values.insert(key.clone(), value.clone()).is_some() {
                return Err(ApiError::invalid(
                    key,
                    format!("parameter {key} given more than once"),
                ));
            }
        }
        Ok(Params { values })
    }

    fn get<T: FromStr>(&self, name: &str) -> Result<Option<T>, ApiError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| ApiError::invalid(name, format!("{name}={raw:?}: {e}"))),
        }
    }

    fn get_lower<T: FromStr>(&self, name: &str) -> Result<Option<T>, ApiError>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .to_ascii_lowercase()
                .parse()
                .map(Some)
                .map_err(|e| ApiError::invalid(name, format!("{e}"))),
        }
    }

    fn positive(&self, name: &str, default: Option<usize>) -> Result<usize, ApiError> {
        match self.get::<usize>(name)? {
            Some(0) => Err(ApiError::invalid(
                name,
                format!("{name} must be at least 1"),
            )),
            Some(v) => Ok(v),
            None => default.ok_or_else(|| ApiError::missing(name)),
        }
    }
}

impl AnalysisRequest {
    /// Parses the query of `endpoint` (`summary`, `activity`, `classes`,
    /// `network`, `themes` or `cloud`). `id` is the path segment of cloud
    /// requests.
    pub fn parse(
        endpoint: &str,
        id: Option<&str>,
        query: &[(String, String)],
    ) -> Result<Self, ApiError> {
        match endpoint {
            "summary" => {
                Params::new(query, &[])?;
                Ok(AnalysisRequest::Summary)
            }
            "activity" => {
                let p = Params::new(query, &["from", "to"])?;
                Ok(AnalysisRequest::Activity {
                    from: p.get("from")?,
                    to: p.get("to")?,
                })
            }
            "classes" => {
                let p = Params::new(query, &["k", "role", "source", "themes", "from", "to"])?;
                let source = p.get_lower("source")?.unwrap_or(ColumnSource::Lexicons);
                let themes = p.positive("themes", Some(DEFAULT_THEMES))?;
                Ok(AnalysisRequest::Classes {
                    k: p.positive("k", None)?,
                    role: p.get_lower("role")?.unwrap_or(Role::Studied),
                    source,
                    themes: if source == ColumnSource::Themes {
                        themes
                    } else {
                        DEFAULT_THEMES
                    },
                    from: p.get("from")?,
                    to: p.get("to")?,
                })
            }
            "network" => {
                let p = Params::new(query, &["scope", "minWeight", "level"])?;
                Ok(AnalysisRequest::Network {
                    scope: p.get_lower("scope")?.unwrap_or(Scope::Seed),
                    min_weight: p.get::<u32>("minWeight")?.unwrap_or(1).max(1),
                    level: p.get("level")?,
                })
            }
            "themes" => {
                let p = Params::new(query, &["k", "top"])?;
                Ok(AnalysisRequest::Themes {
                    k: p.positive("k", Some(DEFAULT_THEMES))?,
                    top: p.positive("top", Some(DEFAULT_CLOUD_TERMS))?,
                })
            }
            "cloud" => {
                let p = Params::new(query, &["k", "top"])?;
                let raw = id.unwrap_or_default();
                let id = raw.parse().map_err(|_| ApiError::unknown_theme(raw))?;
                Ok(AnalysisRequest::Cloud {
                    id,
                    k: p.positive("k", Some(DEFAULT_THEMES))?,
                    top: p.positive("top", Some(DEFAULT_CLOUD_TERMS))?,
                })
            }
            other => Err(ApiError::internal(format!("no endpoint named {other}"))),
        }
    }

    /// Endpoint name followed by every parameter in key order.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<i32>| v.map_or_else(|| "-".to_string(), |y| y.to_string());
        let _ = match self {
            AnalysisRequest::Summary => write!(out, "summary"),
            AnalysisRequest::Activity { from, to } => {
                write!(out, "activity?from={}&to={}", opt(*from), opt(*to))
            }
            AnalysisRequest::Classes {
                k,
                role,
                source,
                themes,
                from,
                to,
            } => write!(
                out,
                "classes?from={}&k={k}&role={}&source={}&themes={themes}&to={}",
                opt(*from),
                role.as_str(),
                source.as_str(),
                opt(*to)
            ),
            AnalysisRequest::Network {
                scope,
                min_weight,
                level,
            } => write!(
                out,
                "network?level={}&minWeight={min_weight}&scope={}",
                level.map_or_else(|| "top".to_string(), |l| l.to_string()),
                scope.as_str()
            ),
            AnalysisRequest::Themes { k, top } => write!(out, "themes?k={k}&top={top}"),
            AnalysisRequest::Cloud { id, k, top } => write!(out, "cloud/{id}?k={k}&top={top}"),
        };
        out
    }
}

/// Key of a request's cached response under snapshot `version`.
pub fn cache_key(request: &AnalysisRequest, version: u64) -> String {
    format!("v{version}:{}", request.canonical())
}

/// Decodes a raw query string into ordered pairs.
pub fn query_pairs(raw: Option<&str>) -> Vec<(String, String)> {
    form_urlencoded::parse(raw.unwrap_or_default().as_bytes())
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect()
}
