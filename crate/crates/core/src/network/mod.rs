//! Keyword co-occurrence networks: construction, modularity, multi-level
//! community detection, force-directed layout and export.

mod export;
mod graph;
mod layout;
mod louvain;
mod modularity;

pub use export::{export_graph, parse_graph, ExportEdge, ExportFormat, ExportNode, GraphDocument};
pub use graph::{build_cooccurrence, KeywordGraph, Scope};
pub use layout::{layout, LayoutPositions, DEFAULT_ITERATIONS};
pub use louvain::{cut_level, detect_communities, CommunityHierarchy, Level, MIN_GAIN};
pub use modularity::{modularity, modularity_with_resolution};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("invalid edge {0}")]
    InvalidEdge(String),
    #[error("modularity is undefined on a graph without edges")]
    Edgeless,
    #[error("partition has {got} entries for {expected} nodes")]
    PartitionSize { expected: usize, got: usize },
    #[error("positions cover {got} of {expected} nodes")]
    PositionsSize { expected: usize, got: usize },
    #[error("unknown export format {0:?} (expected graphml or json)")]
    UnknownFormat(String),
    #[error("cannot parse graph document: {0}")]
    Parse(String),
}

/// Community id of every node, indexed like [`KeywordGraph::nodes`].
pub type Partition = Vec<usize>;
