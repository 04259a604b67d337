//! Reference implementations used as test oracles. Each one follows the
//! textbook definition directly and shares no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense symmetric adjacency matrix from `(a, b, w)` triples.
pub fn adjacency(n: usize, edges: &[(usize, usize, u32)]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += f64::from(w);
        a[j][i] += f64::from(w);
    }
    a
}

/// Q = 1/(2m) Σ_ij [A_ij - k_i k_j / 2m] δ(c_i, c_j), evaluated literally.
pub fn modularity_double_sum(adj: &[Vec<f64>], partition: &[usize]) -> f64 {
    let n = adj.len();
    let k: Vec<f64> = adj.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if partition[i] == partition[j] {
                q += adj[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0];
    grow(&mut prefix, 0, n, &mut out);
    out
}

/// Largest modularity over all partitions of the graph.
pub fn brute_force_max_modularity(adj: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for p in all_partitions(adj.len()) {
        let q = modularity_double_sum(adj, &p);
        if q > best.0 {
            best = (q, p);
        }
    }
    best
}

/// Pair counts by enumerating each document's keyword pairs.
pub fn naive_cooccurrence(docs: &[Vec<String>]) -> BTreeMap<(String, String), u32> {
    let mut out = BTreeMap::new();
    for doc in docs {
        let set: BTreeSet<&String> = doc.iter().collect();
        let list: Vec<&String> = set.into_iter().collect();
        for i in 0..list.len() {
            for j in 0..list.len() {
                if list[i] < list[j] {
                    *out.entry((list[i].clone(), list[j].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

/// Random keyword lists drawn from `vocab` words `k0..`.
pub fn random_docs(
    rng: &mut ChaCha8Rng,
    n_docs: usize,
    max_kw: usize,
    vocab: usize,
) -> Vec<Vec<String>> {
    (0..n_docs)
        .map(|_| {
            let n = rng.gen_range(0..=max_kw);
            (0..n)
                .map(|_| format!("k{}", rng.gen_range(0..vocab)))
                .collect()
        })
        .collect()
}

/// Two cliques with sizes `a` and `b` joined by `bridges` distinct
/// cross edges; node names sort in index order.
pub fn planted_two_cliques(
    rng: &mut ChaCha8Rng,
    a: usize,
    b: usize,
    bridges: usize,
) -> (Vec<String>, Vec<(usize, usize, u32)>) {
    let n = a + b;
    let names: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
    let mut edges = Vec::new();
    for i in 0..a {
        for j in i + 1..a {
            edges.push((i, j, 1));
        }
    }
    for i in a..n {
        for j in i + 1..n {
            edges.push((i, j, 1));
        }
    }
    let mut cross = BTreeSet::new();
    while cross.len() < bridges {
        cross.insert((rng.gen_range(0..a), rng.gen_range(a..n)));
    }
    edges.extend(cross.into_iter().map(|(i, j)| (i, j, 1)));
    (names, edges)
}
