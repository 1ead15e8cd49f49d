//! Weighted region adjacency graph with an explicit border vertex.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::grid::{pair, Pair, SegmentStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: u64,
}

/// Segments are vertices `0..num_segments`; the border is vertex
/// `num_segments` and has weight 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegGraph {
    num_segments: usize,
    weights: Vec<u64>,
    edges: Vec<Edge>,
    #[serde(skip)]
    index: BTreeMap<Pair, usize>,
}

impl SegGraph {
    /// Builds a graph from vertex weights and edges; duplicate pairs and
    /// self-loops are dropped.
    pub fn from_parts(num_segments: usize, weights: Vec<u64>, edges: Vec<Edge>) -> Self {
        assert_eq!(weights.len(), num_segments);
        let mut ws = weights;
        ws.push(0);
        let mut index = BTreeMap::new();
        let mut kept = Vec::new();
        for e in edges {
            if e.a == e.b {
                continue;
            }
            let p = pair(e.a, e.b);
            if index.contains_key(&p) {
                continue;
            }
            index.insert(p, kept.len());
            kept.push(Edge {
                a: p.0,
                b: p.1,
                weight: e.weight,
            });
        }
        SegGraph {
            num_segments,
            weights: ws,
            edges: kept,
            index,
        }
    }

    pub fn num_segments(&self) -> usize {
        self.num_segments
    }

    pub fn num_vertices(&self) -> usize {
        self.num_segments + 1
    }

    pub fn border(&self) -> usize {
        self.num_segments
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.index.contains_key(&pair(a, b))
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&pair(a, b)).copied()
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<u64> {
        self.edge_index(a, b).map(|i| self.edges[i].weight)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.a == v {
                    Some(e.b)
                } else if e.b == v {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn edge_set(&self) -> Vec<Pair> {
        self.index.keys().copied().collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// DOT dump with `weight=` attributes on vertices and edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph segmentation {\n");
        for v in 0..self.num_vertices() {
            if v == self.border() {
                let _ = writeln!(out, "  {v} [label=\"border\", weight=0];");
            } else {
                let _ = writeln!(out, "  {v} [weight={}];", self.weights[v]);
            }
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -- {} [weight={}];", e.a, e.b, e.weight);
        }
        out.push_str("}\n");
        out
    }
}

/// One vertex per segment plus the border, one edge per positive face count.
pub fn build_graph(stats: &SegmentStats) -> SegGraph {
    let edges = stats
        .boundaries
        .iter()
        .filter(|(_, &w)| w > 0)
        .map(|(&(a, b), &weight)| Edge { a, b, weight })
        .collect();
    SegGraph::from_parts(stats.num_segments, stats.sizes.clone(), edges)
}
