//! Node-link baseline: Fruchterman–Reingold with vertex-size-aware edge
//! lengths, border ghosts and a repulsive unit-square boundary.

use std::collections::BTreeMap;

use crate::graph::SegGraph;

/// Position in the unit square and circle radius.
pub type Placed = ([f64; 2], f64);

pub const LARGEST_RADIUS: f64 = 0.1;
const MARGIN: f64 = 1e-3;
const MAX_MOVE: f64 = 0.05;

/// Radii proportional to sqrt(size), the largest being [`LARGEST_RADIUS`].
pub fn radii(graph: &SegGraph) -> Vec<f64> {
    let n = graph.num_segments();
    let max = (0..n).map(|v| graph.weight(v)).max().unwrap_or(0);
    (0..n)
        .map(|v| {
            if max == 0 {
                LARGEST_RADIUS
            } else {
                LARGEST_RADIUS * (graph.weight(v) as f64 / max as f64).sqrt()
            }
        })
        .collect()
}

pub fn base_distance(num_segments: usize) -> f64 {
    (1.0 / num_segments.max(1) as f64).sqrt()
}

/// k'_ij = k0 + r_i + r_j.
pub fn optimal_distance(k0: f64, ri: f64, rj: f64) -> f64 {
    k0 + ri + rj
}

fn nearest_boundary(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    let d = [x, 1.0 - x, y, 1.0 - y];
    let k = (0..4).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
    match k {
        0 => [0.0, y],
        1 => [1.0, y],
        2 => [x, 0.0],
        _ => [x, 1.0],
    }
}

/// Layout of the segment vertices (not the border). Deterministic: starts
/// from a circle and never draws random numbers.
pub fn force_layout_baseline(graph: &SegGraph, iterations: usize, step: f64) -> BTreeMap<usize, Placed> {
    let n = graph.num_segments();
    let border = graph.border();
    let r = radii(graph);
    let k0 = base_distance(n);
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n.max(1) as f64;
            [0.5 + 0.3 * t.cos(), 0.5 + 0.3 * t.sin()]
        })
        .collect();
    let mut step = step;
    for _ in 0..iterations {
        let mut disp = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in i + 1..n {
                let k = optimal_distance(k0, r[i], r[j]);
                let d = [pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt().max(1e-9);
                let f = k * k / len;
                for a in 0..2 {
                    disp[i][a] += d[a] / len * f;
                    disp[j][a] -= d[a] / len * f;
                }
            }
        }
        for e in graph.edges() {
            let (i, j) = (e.a.min(e.b), e.a.max(e.b));
            let (ghost, k) = if j == border {
                (nearest_boundary(pos[i]), k0 + r[i])
            } else {
                (pos[j], optimal_distance(k0, r[i], r[j]))
            };
            let d = [pos[i][0] - ghost[0], pos[i][1] - ghost[1]];
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt().max(1e-9);
            let f = len * len / k;
            for a in 0..2 {
                disp[i][a] -= d[a] / len * f;
                if j != border {
                    disp[j][a] += d[a] / len * f;
                }
            }
        }
        for i in 0..n {
            let [x, y] = pos[i];
            let c = (r[i] + k0).powi(2);
            disp[i][0] += c * (1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x)));
            disp[i][1] += c * (1.0 / (y * y) - 1.0 / ((1.0 - y) * (1.0 - y)));
            for a in 0..2 {
                let m = (step * disp[i][a]).clamp(-MAX_MOVE, MAX_MOVE);
                pos[i][a] = (pos[i][a] + m).clamp(MARGIN, 1.0 - MARGIN);
            }
        }
        step *= 0.99;
    }
    (0..n).map(|i| (i, (pos[i], r[i]))).collect()
}
