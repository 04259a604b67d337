//! Immutable, versioned view of everything the analyses read.

use std::path::PathBuf;
use std::sync::Arc;

use biblionet::corpus::{load_corpus, Violation};
use biblionet::text::{load_gazetteer, load_lexicons, Gazetteer, Lexicon};
use biblionet::Corpus;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Corpus(#[from] biblionet::corpus::CorpusError),
    #[error(transparent)]
    Text(#[from] biblionet::text::TextError),
    #[error("corpus has {} invalid record(s), first: {} ({}); rerun with --drop-invalid to skip them", .0.len(), .0[0].id, .0[0].detail)]
    Invalid(Vec<Violation>),
}

/// Where the data comes from and how analyses are seeded.
#[derive(Debug, Clone, PartialEq)]
pub struct DataConfig {
    pub corpus: PathBuf,
    pub lexicons: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub seed: u64,
    pub drop_invalid: bool,
}

impl DataConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        DataConfig {
            corpus: corpus.into(),
            lexicons: None,
            gazetteer: None,
            seed: crate::DEFAULT_SEED,
            drop_invalid: false,
        }
    }
}

#[derive(Debug)]
pub struct Snapshot {
    pub corpus: Arc<Corpus>,
    pub lexicons: Vec<Lexicon>,
    pub gazetteer: Option<Gazetteer>,
    pub seed: u64,
    /// Records removed by `--drop-invalid`.
    pub dropped: Vec<Violation>,
    pub version: u64,
}

impl Snapshot {
    pub fn load(config: &DataConfig, version: u64) -> Result<Snapshot, LoadError> {
        let corpus = load_corpus(&config.corpus)?;
        let lexicons = match &config.lexicons {
            Some(path) => load_lexicons(path)?,
            None => Vec::new(),
        };
        let gazetteer = config.gazetteer.as_ref().map(load_gazetteer).transpose()?;
        Self::from_parts(corpus, lexicons, gazetteer, config, version)
    }

    pub fn from_parts(
        corpus: Corpus,
        lexicons: Vec<Lexicon>,
        gazetteer: Option<Gazetteer>,
        config: &DataConfig,
        version: u64,
    ) -> Result<Snapshot, LoadError> {
        let report = corpus.validate();
        let (corpus, dropped) = if report.is_empty() {
            (corpus, Vec::new())
        } else if config.drop_invalid {
            (corpus.without_invalid(&report), report)
        } else {
            return Err(LoadError::Invalid(report));
        };
        Ok(Snapshot {
            corpus: Arc::new(corpus),
            lexicons,
            gazetteer,
            seed: config.seed,
            dropped,
            version,
        })
    }
}
