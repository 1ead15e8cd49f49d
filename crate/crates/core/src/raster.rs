//! The automaton's cell grid, its text dump, and the conversion of an
//! orthogonal drawing into an initial configuration.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SegGraph;
use crate::layout::ortho::{orthogonal_draw, OrthoDrawing, Point};
use crate::layout::planarize::PlanarizedGraph;
use crate::metrics::validate_topology;

pub const BACKGROUND: i32 = -1;
pub const CROSSING: i32 = -2;
/// Largest accepted width or height of a configuration.
pub const MAX_SIDE: usize = 4096;

/// Row-major 2D labels, row 0 at the top. `crossings` maps every crossing
/// cell to the labels of its horizontal and vertical arms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellState {
    width: usize,
    height: usize,
    cells: Vec<i32>,
    crossings: BTreeMap<usize, [u32; 2]>,
    origin: Arc<SegGraph>,
}

impl CellState {
    pub fn new(width: usize, height: usize, cells: Vec<i32>, origin: Arc<SegGraph>) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::Input(format!(
                "{} cells do not fill a {width}x{height} grid",
                cells.len()
            )));
        }
        let n = origin.num_segments() as i32;
        if let Some(&bad) = cells.iter().find(|&&c| c >= n || c < CROSSING) {
            return Err(Error::UnknownSegment(bad as i64));
        }
        let mut cs = CellState {
            width,
            height,
            cells,
            crossings: BTreeMap::new(),
            origin,
        };
        cs.rebuild_crossings();
        Ok(cs)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[i32] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.cells[y * self.width + x]
    }

    pub fn label(&self, i: usize) -> i32 {
        self.cells[i]
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.width, i / self.width)
    }

    pub fn origin(&self) -> &SegGraph {
        &self.origin
    }

    pub fn origin_arc(&self) -> Arc<SegGraph> {
        self.origin.clone()
    }

    pub fn crossings(&self) -> &BTreeMap<usize, [u32; 2]> {
        &self.crossings
    }

    pub fn num_crossings(&self) -> usize {
        self.cells.iter().filter(|&&c| c == CROSSING).count()
    }

    pub fn on_border(&self, i: usize) -> bool {
        let (x, y) = self.coords(i);
        x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height
    }

    /// Von Neumann neighbors in N, E, S, W order.
    pub fn neighbors4(&self, i: usize) -> [Option<usize>; 4] {
        let (x, y) = self.coords(i);
        let w = self.width;
        [
            (y > 0).then(|| i - w),
            (x + 1 < w).then(|| i + 1),
            (y + 1 < self.height).then(|| i + w),
            (x > 0).then(|| i - 1),
        ]
    }

    /// Moore neighbors clockwise from north; `None` outside the grid.
    pub fn ring8(&self, i: usize) -> [Option<usize>; 8] {
        let (x, y) = (self.coords(i).0 as i64, self.coords(i).1 as i64);
        const RING: [(i64, i64); 8] = [
            (0, -1),
            (1, -1),
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
        ];
        RING.map(|(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height)
                .then(|| ny as usize * self.width + nx as usize)
        })
    }

    /// Arm labels `[horizontal, vertical]` if the cell is a valid crossing.
    pub fn crossing_arms(&self, i: usize) -> Option<[u32; 2]> {
        let [n, e, s, w] = self.neighbors4(i);
        let l = |c: Option<usize>| c.map(|c| self.cells[c]).filter(|&v| v >= 0);
        let (n, e, s, w) = (l(n)?, l(e)?, l(s)?, l(w)?);
        (e == w && n == s && e != n).then_some([e as u32, n as u32])
    }

    /// True iff every crossing cell has two distinct arm labels on opposite
    /// sides.
    pub fn crossings_valid(&self) -> bool {
        self.cells
            .iter()
            .enumerate()
            .all(|(i, &c)| c != CROSSING || self.crossing_arms(i).is_some())
    }

    pub(crate) fn set(&mut self, i: usize, label: i32) {
        let old = self.cells[i];
        self.cells[i] = label;
        if old == CROSSING {
            self.crossings.remove(&i);
        }
        if label == CROSSING {
            if let Some(arms) = self.crossing_arms(i) {
                self.crossings.insert(i, arms);
            }
        }
    }

    pub(crate) fn rebuild_crossings(&mut self) {
        self.crossings = (0..self.cells.len())
            .filter(|&i| self.cells[i] == CROSSING)
            .filter_map(|i| self.crossing_arms(i).map(|a| (i, a)))
            .collect();
    }

    /// Per-segment cell counts.
    pub fn areas(&self) -> Vec<u64> {
        let mut a = vec![0; self.origin.num_segments()];
        for &c in &self.cells {
            if c >= 0 {
                a[c as usize] += 1;
            }
        }
        a
    }

    pub fn to_castate(&self) -> String {
        let mut out = format!("CASTATE {} {}\n", self.width, self.height);
        for row in self.cells.chunks(self.width) {
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_castate(text: &str, origin: Arc<SegGraph>) -> Result<Self> {
        let mut tokens = text.split_ascii_whitespace();
        if tokens.next() != Some("CASTATE") {
            return Err(Error::Input("missing CASTATE header".into()));
        }
        let mut dim = || -> Result<usize> {
            tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Input("bad CASTATE dimensions".into()))
        };
        let (w, h) = (dim()?, dim()?);
        let cells = tokens
            .map(|t| t.parse::<i32>().map_err(|_| Error::Input(format!("bad cell label {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        CellState::new(w, h, cells, origin)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_castate()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>, origin: Arc<SegGraph>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CellState::from_castate(&text, origin)
    }
}

/// Scale factor f = max(2, sqrt(deg(border))).
pub fn scaling_factor(border_degree: usize) -> f64 {
    (border_degree as f64).sqrt().max(2.0)
}

fn cells_of(points: &[Point], to_cell: impl Fn(Point) -> (usize, usize)) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for w in points.windows(2) {
        let (p, q) = (to_cell(w[0]), to_cell(w[1]));
        let dx = (q.0 as i64 - p.0 as i64).signum();
        let dy = (q.1 as i64 - p.1 as i64).signum();
        let mut c = p;
        loop {
            if out.last() != Some(&c) {
                out.push(c);
            }
            if c == q {
                break;
            }
            c = ((c.0 as i64 + dx) as usize, (c.1 as i64 + dy) as usize);
        }
    }
    out
}

/// Rasterizes a drawing: boxes and edge units are scaled by `10·f` cells, so a
/// box around a single edge is `20·f` cells wide.
pub fn build_initial_config(d: &OrthoDrawing, g: &SegGraph) -> Result<CellState> {
    let border = g.border();
    let f = scaling_factor(g.degree(border));
    let (max_x, max_y) = (d.width().max(0) as usize, d.height().max(0) as usize);
    let size = |k: usize| (max_x * k + 2 * (k + 2) + 1, max_y * k + (k + 2) + 1);
    let mut k = (10.0 * f).round() as usize;
    while k > 2 && (size(k).0 > MAX_SIDE || size(k).1 > MAX_SIDE) {
        k -= 1;
    }
    let (width, height) = size(k);
    if width > MAX_SIDE || height > MAX_SIDE {
        return Err(Error::GridTooLarge {
            width,
            height,
            limit: MAX_SIDE,
        });
    }
    let margin = k + 2;
    let to_cell = |(x, y): Point| {
        (
            (x * k as i64 + margin as i64) as usize,
            (height as i64 - 1 - y * k as i64) as usize,
        )
    };
    let mut cells = vec![BACKGROUND; width * height];
    let mut boxes = BTreeMap::new();
    for (&v, r) in &d.vertex_boxes {
        let (x0, y1) = to_cell((r.x0, r.y0));
        let (x1, y0) = to_cell((r.x1, r.y1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                cells[y * width + x] = v as i32;
            }
        }
        boxes.insert(v, (x0, y0, x1, y1));
    }
    let in_box = |v: usize, (x, y): (usize, usize)| {
        boxes
            .get(&v)
            .is_some_and(|&(x0, y0, x1, y1)| x0 <= x && x <= x1 && y0 <= y && y <= y1)
    };
    let crossing_cells: HashSet<(usize, usize)> =
        d.crossings.iter().map(|c| to_cell(c.point)).collect();

    for (i, e) in g.edges().iter().enumerate() {
        let path: Vec<(usize, usize)> = cells_of(&d.edge_paths[i], to_cell)
            .into_iter()
            .filter(|&c| !in_box(e.a, c) && !in_box(e.b, c))
            .collect();
        let n = path.len();
        let split = if e.b == border {
            n
        } else {
            let blocked: HashSet<usize> = path
                .iter()
                .enumerate()
                .filter(|(_, c)| crossing_cells.contains(c))
                .flat_map(|(j, _)| [j, j + 1])
                .collect();
            let m0 = n.div_ceil(2);
            (0..n)
                .flat_map(|dd| [m0.checked_sub(dd), Some(m0 + dd)])
                .flatten()
                .find(|&m| m >= 1 && m < n && !blocked.contains(&m))
                .ok_or_else(|| Error::Routing(format!("edge {}-{} has no split cell", e.a, e.b)))?
        };
        for (j, &(x, y)) in path.iter().enumerate() {
            let idx = y * width + x;
            let label = if crossing_cells.contains(&(x, y)) {
                CROSSING
            } else if j < split {
                e.a as i32
            } else {
                e.b as i32
            };
            let cur = cells[idx];
            if cur != BACKGROUND && !(cur == CROSSING && label == CROSSING) {
                return Err(Error::Routing(format!(
                    "edge {}-{} collides at cell ({x}, {y})",
                    e.a, e.b
                )));
            }
            cells[idx] = label;
        }
    }
    let cs = CellState::new(width, height, cells, Arc::new(g.clone()))?;
    if !cs.crossings_valid() {
        return Err(Error::Routing("a crossing cell lacks two opposite arms".into()));
    }
    Ok(cs)
}

fn dedup_rows(width: usize, height: usize, cells: &[i32]) -> Option<(usize, Vec<i32>)> {
    let mut out: Vec<i32> = Vec::with_capacity(cells.len());
    let mut rows = 0;
    for y in 0..height {
        let row = &cells[y * width..(y + 1) * width];
        if rows > 0 && &out[(rows - 1) * width..] == row {
            continue;
        }
        out.extend_from_slice(row);
        rows += 1;
    }
    (rows < height).then_some((rows, out))
}

fn transpose(width: usize, height: usize, cells: &[i32]) -> Vec<i32> {
    let mut t = vec![0; cells.len()];
    for y in 0..height {
        for x in 0..width {
            t[x * height + y] = cells[y * width + x];
        }
    }
    t
}

/// Deletes rows and columns equal to an adjacent one until none remain.
pub fn compact(cs: &CellState) -> CellState {
    let (mut w, mut h, mut cells) = (cs.width, cs.height, cs.cells.clone());
    loop {
        let mut changed = false;
        if let Some((rows, c)) = dedup_rows(w, h, &cells) {
            h = rows;
            cells = c;
            changed = true;
        }
        let t = transpose(w, h, &cells);
        if let Some((cols, c)) = dedup_rows(h, w, &t) {
            w = cols;
            cells = transpose(h, w, &c);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    CellState::new(w, h, cells, cs.origin.clone()).expect("compaction keeps labels valid")
}

/// Draws, rasterizes, validates and compacts one candidate; returns the
/// compacted configuration.
pub fn rasterize_candidate(pg: &PlanarizedGraph, g: &SegGraph) -> Result<CellState> {
    let d = orthogonal_draw(pg)?;
    let cs = build_initial_config(&d, g)?;
    let check = validate_topology(&cs, g);
    if !check.ok() {
        return Err(Error::Routing(format!("initial configuration: {check}")));
    }
    let c = compact(&cs);
    let check = validate_topology(&c, g);
    if !check.ok() {
        return Err(Error::Routing(format!("compacted configuration: {check}")));
    }
    Ok(c)
}

/// Rasterizes all candidates in parallel and returns the successful one with
/// the fewest crossing cells, ties to the lowest index, together with that
/// index.
pub fn select_initial_config(candidates: &[PlanarizedGraph], g: &SegGraph) -> Result<(CellState, usize)> {
    let results: Vec<Result<CellState>> = candidates
        .par_iter()
        .map(|pg| rasterize_candidate(pg, g))
        .collect();
    let mut best: Option<(usize, usize, CellState)> = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(cs) => {
                let c = cs.num_crossings();
                if best.as_ref().is_none_or(|b| c < b.0) {
                    best = Some((c, i, cs));
                }
            }
            Err(e) => log::debug!("candidate {i} rejected: {e}"),
        }
    }
    best.map(|(_, i, cs)| (cs, i))
        .ok_or(Error::NoCandidate(candidates.len()))
}
