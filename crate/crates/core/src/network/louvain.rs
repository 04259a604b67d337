//! Louvain community detection.
//!
//! Each round runs local moving (nodes visited in a seeded shuffled order,
//! each moved to the neighbouring community with the best modularity gain)
//! until a full pass moves nothing, then collapses communities into single
//! nodes. Every round that changes the partition adds one hierarchy level.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{modularity_with_resolution, KeywordGraph, Partition};

/// Smallest modularity improvement that justifies a move.
pub const MIN_GAIN: f64 = 1e-9;

const MAX_PASSES: usize = 10_000;
const MAX_LEVELS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    /// Community of every original node, numbered from 0 in node order.
    pub partition: Partition,
    pub communities: usize,
    /// Modularity of `partition` at the hierarchy's resolution; 0 when the
    /// graph has no edges.
    pub modularity: f64,
}

/// Nested partitions from finest (level 0) to coarsest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityHierarchy {
    pub levels: Vec<Level>,
    pub seed: u64,
    pub resolution: f64,
}

impl CommunityHierarchy {
    /// Index of the coarsest level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, level: usize) -> &Level {
        &self.levels[level.min(self.top())]
    }
}

/// Partition at `level`, clamped to the coarsest stored level.
pub fn cut_level(hierarchy: &CommunityHierarchy, level: usize) -> Partition {
    hierarchy.level(level).partition.clone()
}

struct WorkGraph {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of the collapsed internal edges of each node, counted once.
    loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl WorkGraph {
    fn from_graph(graph: &KeywordGraph) -> Self {
        let n = graph.node_count();
        let adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                graph
                    .neighbors(i)
                    .iter()
                    .map(|&(j, w)| (j, f64::from(w)))
                    .collect()
            })
            .collect();
        Self::with_loops(adj, vec![0.0; n])
    }

    fn with_loops(adj: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&loops)
            .map(|(list, &l)| list.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        let two_m = degree.iter().sum();
        WorkGraph {
            adj,
            loops,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community into one node.
    fn aggregate(&self, community: &[usize], count: usize) -> WorkGraph {
        let mut loops = vec![0.0; count];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> =
            vec![Default::default(); count];
        for i in 0..self.len() {
            let ci = community[i];
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    // seen from both ends
                    loops[ci] += w / 2.0;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj = weights
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        WorkGraph::with_loops(adj, loops)
    }
}

/// Runs local moving to convergence. Returns the renumbered communities and
/// whether any node moved.
fn local_moving(g: &WorkGraph, rng: &mut ChaCha8Rng, resolution: f64) -> (Vec<usize>, bool) {
    let n = g.len();
    let mut community: Vec<usize> = (0..n).collect();
    if g.two_m <= 0.0 {
        return (community, false);
    }
    let mut total: Vec<f64> = g.degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let m = g.two_m / 2.0;
    let mut link = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;

    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &node in &order {
            let k = g.degree[node];
            let current = community[node];
            for &(j, w) in &g.adj[node] {
                let c = community[j];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }
            total[current] -= k;

            let gain = |c: usize, link_c: f64| link_c - resolution * total[c] * k / g.two_m;
            let stay = gain(current, link[current]);
            let mut best = current;
            let mut best_gain = stay;
            touched.sort_unstable();
            for &c in &touched {
                let g_c = gain(c, link[c]);
                if g_c > best_gain || (g_c == best_gain && c < best) {
                    best = c;
                    best_gain = g_c;
                }
            }
            if best != current && (best_gain - stay) / m <= MIN_GAIN {
                best = current;
            }
            total[best] += k;
            if best != current {
                community[node] = best;
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    (renumber(&community), any_move)
}

/// Relabels communities 0.. in order of first appearance.
fn renumber(community: &[usize]) -> Vec<usize> {
    let mut map = vec![usize::MAX; community.len()];
    let mut next = 0;
    community
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

/// Multi-level Louvain optimisation of modularity at `resolution`.
/// The same graph, seed and resolution always give the same hierarchy.
pub fn detect_communities(graph: &KeywordGraph, seed: u64, resolution: f64) -> CommunityHierarchy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.node_count();
    let mut work = WorkGraph::from_graph(graph);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels: Vec<Level> = Vec::new();

    while levels.len() < MAX_LEVELS {
        let (community, moved) = local_moving(&work, &mut rng, resolution);
        if !moved && !levels.is_empty() {
            break;
        }
        let count = community.iter().max().map_or(0, |&c| c + 1);
        for m in &mut membership {
            *m = community[*m];
        }
        let q = if graph.edge_count() == 0 {
            0.0
        } else {
            modularity_with_resolution(graph, &membership, resolution).expect("graph has edges")
        };
        levels.push(Level {
            partition: renumber(&membership),
            communities: count,
            modularity: q,
        });
        if !moved || count == work.len() {
            break;
        }
        work = work.aggregate(&community, count);
    }

    CommunityHierarchy {
        levels,
        seed,
        resolution,
    }
}
