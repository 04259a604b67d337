use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::str::FromStr;

use serde::Serialize;

use super::NetworkError;
use crate::corpus::{Corpus, Origin, PaperRecord};

/// Which papers contribute keywords to the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// The journal's own papers.
    #[default]
    Seed,
    /// Seed papers plus the papers they cite and the papers citing them.
    Neighborhood,
}

impl Scope {
    pub fn includes(self, paper: &PaperRecord) -> bool {
        match self {
            Scope::Seed => paper.origin == Origin::Seed,
            Scope::Neighborhood => {
                matches!(paper.origin, Origin::Seed | Origin::Cited | Origin::Citing)
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Seed => "seed",
            Scope::Neighborhood => "neighborhood",
        }
    }
}

impl FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "seed" => Ok(Scope::Seed),
            "neighborhood" | "neighbourhood" => Ok(Scope::Neighborhood),
            other => Err(format!(
                "unknown scope {other:?} (expected seed or neighborhood)"
            )),
        }
    }
}

/// Undirected, weighted, simple graph over keywords. Nodes are kept in
/// ascending keyword order; edges are stored once with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeywordGraph {
    nodes: Vec<String>,
    frequency: Vec<u32>,
    edges: Vec<(usize, usize, u32)>,
    adjacency: Vec<Vec<(usize, u32)>>,
}

impl KeywordGraph {
    /// Builds a graph from `(keyword, frequency)` nodes and
    /// `(keyword, keyword, weight)` edges.
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Self, NetworkError>
    where
        N: IntoIterator<Item = (String, u32)>,
        E: IntoIterator<Item = (String, String, u32)>,
    {
        let nodes: BTreeMap<String, u32> = nodes.into_iter().collect();
        let index: HashMap<&str, usize> = nodes
            .keys()
            .enumerate()
            .map(|(i, k)| (k.as_str(), i))
            .collect();
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (a, b, w) in edges {
            let bad = |why: &str| NetworkError::InvalidEdge(format!("{a:?}-{b:?}: {why}"));
            let (Some(&ia), Some(&ib)) = (index.get(a.as_str()), index.get(b.as_str())) else {
                return Err(bad("endpoint is not a node"));
            };
            if ia == ib {
                return Err(bad("self-loop"));
            }
            if w == 0 {
                return Err(bad("weight must be at least 1"));
            }
            let key = (ia.min(ib), ia.max(ib));
            if !seen.insert(key) {
                return Err(bad("parallel edge"));
            }
            list.push((key.0, key.1, w));
        }
        let (names, freq): (Vec<String>, Vec<u32>) = nodes.into_iter().unzip();
        Ok(Self::assemble(names, freq, list))
    }

    /// Unit-frequency nodes inferred from the edge list.
    pub fn from_edges<'a, I>(edges: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, u32)>,
    {
        let edges: Vec<(String, String, u32)> = edges
            .into_iter()
            .map(|(a, b, w)| (a.to_string(), b.to_string(), w))
            .collect();
        let nodes: BTreeSet<String> = edges
            .iter()
            .flat_map(|(a, b, _)| [a.clone(), b.clone()])
            .collect();
        Self::new(nodes.into_iter().map(|n| (n, 1)), edges)
    }

    fn assemble(
        nodes: Vec<String>,
        frequency: Vec<u32>,
        mut edges: Vec<(usize, usize, u32)>,
    ) -> Self {
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b, w) in &edges {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        KeywordGraph {
            nodes,
            frequency,
            edges,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Number of documents carrying each keyword.
    pub fn frequencies(&self) -> &[u32] {
        &self.frequency
    }

    /// `(a, b, weight)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, u32)] {
        &self.adjacency[node]
    }

    pub fn node_index(&self, keyword: &str) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(keyword))
            .ok()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u32> {
        let (ia, ib) = (self.node_index(a)?, self.node_index(b)?);
        let list = &self.adjacency[ia];
        list.binary_search_by_key(&ib, |&(n, _)| n)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|&(_, _, w)| u64::from(w)).sum()
    }

    pub fn degree(&self, node: usize) -> u64 {
        self.adjacency[node]
            .iter()
            .map(|&(_, w)| u64::from(w))
            .sum()
    }
}

/// Edge weight = number of in-scope documents whose keyword set holds both
/// ends. Edges lighter than `min_weight` are dropped; nodes left without an
/// edge are dropped too unless `keep_isolated` is set.
pub fn build_cooccurrence(
    corpus: &Corpus,
    scope: Scope,
    min_weight: u32,
    keep_isolated: bool,
) -> KeywordGraph {
    let docs: Vec<BTreeSet<&str>> = corpus
        .papers()
        .filter(|p| scope.includes(p))
        .map(|p| p.keywords.iter().map(String::as_str).collect())
        .collect();

    let vocab: BTreeSet<&str> = docs.iter().flatten().copied().collect();
    let vocab: Vec<&str> = vocab.into_iter().collect();
    let index: HashMap<&str, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i as u32))
        .collect();

    let mut frequency = vec![0u32; vocab.len()];
    let mut pairs: HashMap<u64, u32> = HashMap::new();
    let mut ids = Vec::new();
    for doc in &docs {
        ids.clear();
        // BTreeSet iteration gives ascending ids
        ids.extend(doc.iter().map(|k| index[k]));
        for (i, &a) in ids.iter().enumerate() {
            frequency[a as usize] += 1;
            for &b in &ids[i + 1..] {
                *pairs
                    .entry((u64::from(a) << 32) | u64::from(b))
                    .or_default() += 1;
            }
        }
    }

    let min_weight = min_weight.max(1);
    let mut kept: Vec<(u32, u32, u32)> = pairs
        .into_iter()
        .filter(|&(_, w)| w >= min_weight)
        .map(|(key, w)| ((key >> 32) as u32, key as u32, w))
        .collect();
    kept.sort_unstable();

    let mut used = vec![keep_isolated; vocab.len()];
    for &(a, b, _) in &kept {
        used[a as usize] = true;
        used[b as usize] = true;
    }
    let mut remap = vec![usize::MAX; vocab.len()];
    let mut nodes = Vec::new();
    let mut freq = Vec::new();
    for (i, kw) in vocab.iter().enumerate() {
        if used[i] {
            remap[i] = nodes.len();
            nodes.push(kw.to_string());
            freq.push(frequency[i]);
        }
    }
    let edges = kept
        .into_iter()
        .map(|(a, b, w)| (remap[a as usize], remap[b as usize], w))
        .collect();
    KeywordGraph::assemble(nodes, freq, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[&str]]) -> Corpus {
        Corpus::from_records(docs.iter().enumerate().map(|(i, kws)| {
            let mut r = PaperRecord::new(format!("D{i:03}"), 2000);
            r.keywords = kws.iter().map(|s| s.to_string()).collect();
            r
        }))
        .unwrap()
    }

    #[test]
    fn single_document_is_a_clique() {
        let g = build_cooccurrence(&corpus(&[&["a", "b", "c"]]), Scope::Seed, 1, false);
        assert_eq!(g.nodes(), ["a", "b", "c"]);
        assert_eq!(g.edges(), [(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        assert_eq!(g.frequencies(), [1, 1, 1]);
    }

    #[test]
    fn weights_count_documents() {
        let g = build_cooccurrence(
            &corpus(&[&["a", "b"], &["a", "b"], &["a", "c"]]),
            Scope::Seed,
            1,
            false,
        );
        assert_eq!(g.weight("a", "b"), Some(2));
        assert_eq!(g.weight("a", "c"), Some(1));
        assert_eq!(g.weight("b", "c"), None);
        assert_eq!(g.frequencies(), [3, 2, 1]);
    }

    #[test]
    fn min_weight_prunes_edges_and_orphans() {
        let c = corpus(&[&["a", "b"], &["a", "b"], &["a", "c"], &["d"]]);
        let g = build_cooccurrence(&c, Scope::Seed, 2, false);
        assert_eq!(g.nodes(), ["a", "b"]);
        let g = build_cooccurrence(&c, Scope::Seed, 2, true);
        assert_eq!(g.nodes(), ["a", "b", "c", "d"]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn keyword_free_corpus_gives_empty_graph() {
        let g = build_cooccurrence(&corpus(&[&[], &[]]), Scope::Seed, 1, false);
        assert!(g.is_empty());
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn scope_follows_origin() {
        let mut cited = PaperRecord::new("C", 2000);
        cited.origin = Origin::Cited;
        cited.keywords = vec!["x".into(), "y".into()];
        let mut ext = PaperRecord::new("E", 2000);
        ext.origin = Origin::External;
        ext.keywords = vec!["x".into(), "z".into()];
        let mut seed = PaperRecord::new("S", 2000);
        seed.keywords = vec!["a".into(), "b".into()];
        let c = Corpus::from_records([cited, ext, seed]).unwrap();
        assert_eq!(
            build_cooccurrence(&c, Scope::Seed, 1, false).nodes(),
            ["a", "b"]
        );
        assert_eq!(
            build_cooccurrence(&c, Scope::Neighborhood, 1, false).nodes(),
            ["a", "b", "x", "y"]
        );
    }

    #[test]
    fn explicit_construction_rejects_non_simple_graphs() {
        assert!(KeywordGraph::from_edges([("a", "a", 1)]).is_err());
        assert!(KeywordGraph::from_edges([("a", "b", 1), ("b", "a", 2)]).is_err());
        assert!(KeywordGraph::from_edges([("a", "b", 0)]).is_err());
        let g = KeywordGraph::from_edges([("b", "a", 3)]).unwrap();
        assert_eq!(g.edges(), [(0, 1, 3)]);
        assert_eq!(g.degree(0), 3);
    }
}
