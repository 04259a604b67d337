//! Analytics over a corpus of scientific publications.
//!
//! Three linked views are computed from one [`corpus::Corpus`]:
//!
//! * [`geo`]: per-period country activity, country × lexicon contingency
//!   tables with standardized residuals, and Ward classification of
//!   countries by thematic profile;
//! * [`network`]: keyword co-occurrence graphs, multi-level Louvain
//!   communities and a seeded force-directed layout, exported as GraphML
//!   or JSON;
//! * [`themes`]: spherical k-means over TF-IDF vectors of full texts, with
//!   word-cloud payloads.
//!
//! [`text`] holds the tokenizer and lexicon/gazetteer tooling they share,
//! and [`fixtures`] builds deterministic synthetic corpora.

pub mod corpus;
pub mod fixtures;
pub mod geo;
pub mod network;
pub mod text;
pub mod themes;

pub use corpus::{Corpus, PaperRecord, PeriodFilter};
