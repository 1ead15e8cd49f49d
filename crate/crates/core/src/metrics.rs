//! Adjacency extraction, topology validation and quality reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::tables::DeviationTables;
use crate::error::{Error, Result};
use crate::graph::SegGraph;
use crate::grid::{pair, Pair, SegmentStats};
use crate::raster::{CellState, CROSSING};

/// Adjacency of a 2D state; the border vertex has index `num_segments`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<Pair>,
}

/// Segments present, plus the border; an edge for every von Neumann contact
/// between two segments and for every segment touching the grid border.
pub fn extract_adjacency(cs: &CellState) -> Adjacency {
    let border = cs.origin().border();
    let mut vertices = BTreeSet::from([border]);
    let mut edges = BTreeSet::new();
    let (w, h) = (cs.width(), cs.height());
    for y in 0..h {
        for x in 0..w {
            let a = cs.get(x, y);
            if a < 0 {
                continue;
            }
            vertices.insert(a as usize);
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                edges.insert(pair(a as usize, border));
            }
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if nx < w && ny < h {
                    let b = cs.get(nx, ny);
                    if b >= 0 && b != a {
                        edges.insert(pair(a as usize, b as usize));
                    }
                }
            }
        }
    }
    Adjacency { vertices, edges }
}

/// Differences between a state and its origin graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopologyCheck {
    pub missing_vertices: Vec<usize>,
    pub missing_edges: Vec<Pair>,
    pub extra_edges: Vec<Pair>,
    /// Segments split into several components (crossings bridge their arms).
    pub disconnected: Vec<usize>,
    /// Crossing cells without two opposite arm pairs.
    pub bad_crossings: Vec<usize>,
}

impl TopologyCheck {
    pub fn ok(&self) -> bool {
        self.missing_vertices.is_empty()
            && self.missing_edges.is_empty()
            && self.extra_edges.is_empty()
            && self.disconnected.is_empty()
            && self.bad_crossings.is_empty()
    }

    pub fn adjacency_ok(&self) -> bool {
        self.missing_vertices.is_empty() && self.missing_edges.is_empty() && self.extra_edges.is_empty()
    }
}

impl fmt::Display for TopologyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "topology preserved");
        }
        let mut parts = Vec::new();
        if !self.missing_vertices.is_empty() {
            parts.push(format!("missing segments {:?}", self.missing_vertices));
        }
        if !self.missing_edges.is_empty() {
            parts.push(format!("missing edges {:?}", self.missing_edges));
        }
        if !self.extra_edges.is_empty() {
            parts.push(format!("extra edges {:?}", self.extra_edges));
        }
        if !self.disconnected.is_empty() {
            parts.push(format!("disconnected segments {:?}", self.disconnected));
        }
        if !self.bad_crossings.is_empty() {
            parts.push(format!("invalid crossings at cells {:?}", self.bad_crossings));
        }
        write!(f, "{}", parts.join("; "))
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Number of components of every segment, where the two arms of a crossing
/// with equal labels count as touching.
pub fn segment_components(cs: &CellState) -> Vec<usize> {
    let n = cs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for i in 0..n {
        let a = cs.label(i);
        let [nn, e, s, w] = cs.neighbors4(i);
        if a >= 0 {
            for j in [e, s].into_iter().flatten() {
                if cs.label(j) == a {
                    union(&mut parent, i, j);
                }
            }
        } else if a == CROSSING {
            for (p, q) in [(w, e), (nn, s)] {
                if let (Some(p), Some(q)) = (p, q) {
                    if cs.label(p) >= 0 && cs.label(p) == cs.label(q) {
                        union(&mut parent, p, q);
                    }
                }
            }
        }
    }
    let mut roots: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cs.origin().num_segments()];
    for i in 0..n {
        let a = cs.label(i);
        if a >= 0 {
            let r = find(&mut parent, i);
            roots[a as usize].insert(r);
        }
    }
    roots.iter().map(BTreeSet::len).collect()
}

/// Compares a state with `origin`: same segments, same edges, connected
/// segments and well-formed crossings.
pub fn validate_topology(cs: &CellState, origin: &SegGraph) -> TopologyCheck {
    let adj = extract_adjacency(cs);
    let expected: BTreeSet<Pair> = origin.edge_set().into_iter().collect();
    let mut check = TopologyCheck {
        missing_vertices: (0..origin.num_vertices())
            .filter(|v| !adj.vertices.contains(v))
            .collect(),
        missing_edges: expected.difference(&adj.edges).copied().collect(),
        extra_edges: adj.edges.difference(&expected).copied().collect(),
        ..Default::default()
    };
    check.disconnected = segment_components(cs)
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 1)
        .map(|(s, _)| s)
        .collect();
    check.bad_crossings = (0..cs.len())
        .filter(|&i| cs.label(i) == CROSSING && cs.crossing_arms(i).is_none())
        .collect();
    check
}

/// (d̄_A, d̄_L): mean absolute Eq. 1 deviation over segments and mean absolute
/// Eq. 2 deviation over the edges of the origin graph.
pub fn mean_deviations(cs: &CellState, stats: &SegmentStats) -> (f64, f64) {
    let t = DeviationTables::compute(cs, stats);
    means(&t, cs.origin())
}

pub(crate) fn means(t: &DeviationTables, g: &SegGraph) -> (f64, f64) {
    let n = t.num_segments();
    let da = if n == 0 {
        0.0
    } else {
        (0..n).map(|s| t.area_dev(s as i32).abs()).sum::<f64>() / n as f64
    };
    let edges = g.edges();
    let dl = if edges.is_empty() {
        0.0
    } else {
        edges.iter().map(|e| t.boundary_dev(e.a, e.b).abs()).sum::<f64>() / edges.len() as f64
    };
    (da, dl)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEntry {
    pub id: usize,
    pub target: f64,
    pub actual: f64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    /// Segment ids; the border is `num_segments`.
    pub pair: [usize; 2],
    pub target: f64,
    pub actual: f64,
    pub abs_dev: f64,
}

/// Quality of a final state. Deviations are fractions, not percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub num_segments: usize,
    pub num_edges: usize,
    pub crossings: usize,
    pub mean_area_dev: f64,
    pub mean_boundary_dev: f64,
    pub resolution: [usize; 2],
    pub per_segment: Vec<SegmentEntry>,
    pub per_edge: Vec<EdgeEntry>,
    pub iterations_used: usize,
    /// Wall time in seconds per stage. Kept out of the JSON so reports of
    /// identical runs stay byte-identical; see `write_timings`.
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

impl QualityReport {
    pub fn new(cs: &CellState, stats: &SegmentStats, iterations_used: usize) -> Self {
        let t = DeviationTables::compute(cs, stats);
        let g = cs.origin();
        let (da, dl) = means(&t, g);
        QualityReport {
            num_segments: stats.num_segments,
            num_edges: g.edges().len(),
            crossings: cs.num_crossings(),
            mean_area_dev: da,
            mean_boundary_dev: dl,
            resolution: [cs.width(), cs.height()],
            per_segment: (0..stats.num_segments)
                .map(|s| SegmentEntry {
                    id: s,
                    target: t.area_target(s),
                    actual: t.area_actual(s),
                    abs_dev: t.area_dev(s as i32).abs(),
                })
                .collect(),
            per_edge: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    pair: [e.a, e.b],
                    target: t.boundary_target(e.a, e.b),
                    actual: t.boundary_actual(e.a, e.b),
                    abs_dev: t.boundary_dev(e.a, e.b).abs(),
                })
                .collect(),
            iterations_used,
            timings: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "segments {}  edges {}  crossings {}  resolution {}x{}  iterations {}\n",
            self.num_segments,
            self.num_edges,
            self.crossings,
            self.resolution[0],
            self.resolution[1],
            self.iterations_used
        ));
        out.push_str(&format!(
            "mean area deviation {:.4}%  mean boundary deviation {:.4}%\n",
            100.0 * self.mean_area_dev,
            100.0 * self.mean_boundary_dev
        ));
        out.push_str("segment   target%   actual%    |dA|%\n");
        for s in &self.per_segment {
            out.push_str(&format!(
                "{:>7} {:>9.4} {:>9.4} {:>9.4}\n",
                s.id,
                100.0 * s.target,
                100.0 * s.actual,
                100.0 * s.abs_dev
            ));
        }
        out.push_str("   edge   target%   actual%    |dL|%\n");
        for e in &self.per_edge {
            let b = if e.pair[1] == self.num_segments {
                "B".to_string()
            } else {
                e.pair[1].to_string()
            };
            out.push_str(&format!(
                "{:>7} {:>9.4} {:>9.4} {:>9.4}\n",
                format!("{}-{}", e.pair[0], b),
                100.0 * e.target,
                100.0 * e.actual,
                100.0 * e.abs_dev
            ));
        }
        if !self.timings.is_empty() {
            let t: Vec<String> = self.timings.iter().map(|(k, v)| format!("{k} {v:.3}s")).collect();
            out.push_str(&format!("timings: {}\n", t.join(", ")));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Writes the stage timings as a JSON object.
pub fn write_timings(report: &QualityReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&report.timings).expect("timings serialize") + "\n";
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the JSON report and prints the table to stdout.
pub fn emit_report(report: &QualityReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report.to_json()).map_err(|e| Error::io(path, e))?;
    print!("{}", report.table());
    Ok(())
}
