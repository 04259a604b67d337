use std::collections::HashMap;

use super::{KeywordGraph, NetworkError};

/// Newman–Girvan modularity of `partition` on `graph`:
///
/// ```text
/// Q = 1/(2m) * Σ_ij [A_ij - k_i k_j / (2m)] δ(c_i, c_j)
/// ```
///
/// evaluated per community as `Σ_c [in_c / 2m - (tot_c / 2m)^2]`, where
/// `in_c` counts each internal edge twice and `tot_c` sums weighted degrees.
pub fn modularity(graph: &KeywordGraph, partition: &[usize]) -> Result<f64, NetworkError> {
    modularity_with_resolution(graph, partition, 1.0)
}

/// Modularity with the null-model term scaled by `resolution`.
pub fn modularity_with_resolution(
    graph: &KeywordGraph,
    partition: &[usize],
    resolution: f64,
) -> Result<f64, NetworkError> {
    if partition.len() != graph.node_count() {
        return Err(NetworkError::PartitionSize {
            expected: graph.node_count(),
            got: partition.len(),
        });
    }
    let two_m = 2 * graph.total_weight();
    if two_m == 0 {
        return Err(NetworkError::Edgeless);
    }
    // integer sums keep the all-in-one case exactly zero
    let mut internal: HashMap<usize, u64> = HashMap::new();
    let mut total: HashMap<usize, u64> = HashMap::new();
    for &(a, b, w) in graph.edges() {
        let w = u64::from(w);
        *total.entry(partition[a]).or_default() += w;
        *total.entry(partition[b]).or_default() += w;
        if partition[a] == partition[b] {
            *internal.entry(partition[a]).or_default() += 2 * w;
        }
    }
    let two_m = two_m as f64;
    let mut communities: Vec<usize> = total.keys().copied().collect();
    communities.sort_unstable();
    Ok(communities
        .into_iter()
        .map(|c| {
            let inside = internal.get(&c).copied().unwrap_or(0) as f64 / two_m;
            let share = total[&c] as f64 / two_m;
            inside - resolution * share * share
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> KeywordGraph {
        KeywordGraph::from_edges([
            ("a", "b", 1),
            ("b", "c", 1),
            ("a", "c", 1),
            ("x", "y", 1),
            ("y", "z", 1),
            ("x", "z", 1),
        ])
        .unwrap()
    }

    #[test]
    fn all_in_one_is_zero() {
        let g = two_triangles();
        assert_eq!(modularity(&g, &[0; 6]).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_triangles_give_one_half() {
        let g = two_triangles();
        // nodes sorted: a b c x y z
        assert_eq!(modularity(&g, &[0, 0, 0, 1, 1, 1]).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        let g = two_triangles();
        assert_eq!(
            modularity(&g, &[0, 0]),
            Err(NetworkError::PartitionSize {
                expected: 6,
                got: 2
            })
        );
        let empty = KeywordGraph::default();
        assert_eq!(modularity(&empty, &[]), Err(NetworkError::Edgeless));
    }
}
