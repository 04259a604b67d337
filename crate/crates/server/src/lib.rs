//! HTTP service and command-line front end over the `biblionet` analyses.
//!
//! The service answers read-only JSON requests from an immutable corpus
//! snapshot, caches responses by canonical request and snapshot version,
//! and swaps in a freshly loaded snapshot on `POST /api/admin/reload`.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod request;
pub mod service;
pub mod snapshot;

pub use error::ApiError;
pub use request::{cache_key, AnalysisRequest, ColumnSource};
pub use service::{router, AppState};
pub use snapshot::{DataConfig, LoadError, Snapshot};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PORT: u16 = 8080;
/// Environment variable that overrides the listening port.
pub const PORT_ENV: &str = "BIBLIONET_PORT";
