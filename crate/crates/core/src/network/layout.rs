//! Fruchterman–Reingold force-directed placement.
//!
//! Nodes repel with `k² / d` and edges attract with `w · d² / k`, where
//! `k = sqrt(1 / n)` is the ideal edge length in the unit square. Each step
//! is capped by a temperature that falls linearly from 0.1 to zero. The
//! final drawing is centred and scaled uniformly into `[0, 1]²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::KeywordGraph;

pub const DEFAULT_ITERATIONS: usize = 300;

const INITIAL_TEMPERATURE: f64 = 0.1;
const MIN_DISTANCE: f64 = 1e-9;

/// Position of every node, indexed like [`KeywordGraph::nodes`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutPositions {
    pub coords: Vec<(f64, f64)>,
}

impl LayoutPositions {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

pub fn layout(graph: &KeywordGraph, seed: u64, iterations: usize) -> LayoutPositions {
    let n = graph.node_count();
    match n {
        0 => return LayoutPositions::default(),
        1 => {
            return LayoutPositions {
                coords: vec![(0.5, 0.5)],
            }
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    let k = (1.0 / n as f64).sqrt();
    let k2 = k * k;
    let mut disp = vec![(0.0f64, 0.0f64); n];

    for step in 0..iterations {
        let temperature = INITIAL_TEMPERATURE * (1.0 - step as f64 / iterations as f64);
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));

        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy, d) = separation(pos[i], pos[j]);
                let f = k2 / d;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[i].0 += fx;
                disp[i].1 += fy;
                disp[j].0 -= fx;
                disp[j].1 -= fy;
            }
        }
        for &(a, b, w) in graph.edges() {
            let (dx, dy, d) = separation(pos[a], pos[b]);
            let f = f64::from(w) * d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[a].0 -= fx;
            disp[a].1 -= fy;
            disp[b].0 += fx;
            disp[b].1 += fy;
        }
        for (p, &(dx, dy)) in pos.iter_mut().zip(&disp) {
            let len = (dx * dx + dy * dy).sqrt();
            if len > 0.0 {
                let step = len.min(temperature);
                p.0 += dx / len * step;
                p.1 += dy / len * step;
            }
        }
    }
    LayoutPositions {
        coords: rescale(&pos),
    }
}

fn separation(a: (f64, f64), b: (f64, f64)) -> (f64, f64, f64) {
    let (mut dx, dy) = (a.0 - b.0, a.1 - b.1);
    let mut d = (dx * dx + dy * dy).sqrt();
    if d < MIN_DISTANCE {
        // coincident points: push apart along x
        dx = MIN_DISTANCE;
        d = MIN_DISTANCE;
    }
    (dx, dy, d)
}

fn rescale(pos: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pos {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    pos.iter()
        .map(|&(x, y)| {
            if span > 0.0 {
                (
                    (0.5 + (x - cx) / span).clamp(0.0, 1.0),
                    (0.5 + (y - cy) / span).clamp(0.0, 1.0),
                )
            } else {
                (0.5, 0.5)
            }
        })
        .collect()
}
