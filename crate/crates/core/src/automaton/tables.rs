use crate::error::{Error, Result};
use crate::grid::SegmentStats;
use crate::raster::{CellState, BACKGROUND};

/// 2D areas and boundary lengths of a state next to the n-D targets, with the
/// signed deviations of Eq. 1 and Eq. 2. Boundary entries are dense over
/// `(num_segments + 1)²`, the last index being the grid border.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationTables {
    n: usize,
    pub area_2d: Vec<u64>,
    pub total_2d: u64,
    boundary_2d: Vec<u64>,
    pub total_boundary_2d: u64,
    area_target: Vec<f64>,
    boundary_target: Vec<f64>,
}

impl DeviationTables {
    pub fn compute(cs: &CellState, stats: &SegmentStats) -> Self {
        let n = stats.num_segments;
        let n1 = n + 1;
        let mut t = DeviationTables {
            n,
            area_2d: vec![0; n],
            total_2d: cs.len() as u64,
            boundary_2d: vec![0; n1 * n1],
            total_boundary_2d: 0,
            area_target: stats
                .sizes
                .iter()
                .map(|&a| a as f64 / stats.total_size as f64)
                .collect(),
            boundary_target: vec![0.0; n1 * n1],
        };
        for (&(a, b), &l) in &stats.boundaries {
            let v = l as f64 / stats.total_boundary as f64;
            t.boundary_target[a * n1 + b] = v;
            t.boundary_target[b * n1 + a] = v;
        }
        let (w, h) = (cs.width(), cs.height());
        for y in 0..h {
            for x in 0..w {
                let a = cs.get(x, y);
                if a < 0 {
                    continue;
                }
                t.area_2d[a as usize] += 1;
                let exposed = (x == 0) as u64 + (x + 1 == w) as u64 + (y == 0) as u64 + (y + 1 == h) as u64;
                if exposed > 0 {
                    t.add_boundary(a as usize, n, exposed as i64);
                }
                if x + 1 < w {
                    let b = cs.get(x + 1, y);
                    if b >= 0 && b != a {
                        t.add_boundary(a as usize, b as usize, 1);
                    }
                }
                if y + 1 < h {
                    let b = cs.get(x, y + 1);
                    if b >= 0 && b != a {
                        t.add_boundary(a as usize, b as usize, 1);
                    }
                }
            }
        }
        t
    }

    fn add_boundary(&mut self, a: usize, b: usize, d: i64) {
        let n1 = self.n + 1;
        let v = &mut self.boundary_2d[a * n1 + b];
        *v = (*v as i64 + d) as u64;
        if a != b {
            let v = &mut self.boundary_2d[b * n1 + a];
            *v = (*v as i64 + d) as u64;
        }
        self.total_boundary_2d = (self.total_boundary_2d as i64 + d) as u64;
    }

    pub fn num_segments(&self) -> usize {
        self.n
    }

    pub fn boundary_2d(&self, a: usize, b: usize) -> u64 {
        self.boundary_2d[a * (self.n + 1) + b]
    }

    pub fn area_target(&self, s: usize) -> f64 {
        self.area_target[s]
    }

    pub fn area_actual(&self, s: usize) -> f64 {
        self.area_2d[s] as f64 / self.total_2d as f64
    }

    pub fn boundary_target(&self, a: usize, b: usize) -> f64 {
        self.boundary_target[a * (self.n + 1) + b]
    }

    pub fn boundary_actual(&self, a: usize, b: usize) -> f64 {
        if self.total_boundary_2d == 0 {
            return 0.0;
        }
        self.boundary_2d(a, b) as f64 / self.total_boundary_2d as f64
    }

    /// d_A of a label; background is −1.
    pub fn area_dev(&self, label: i32) -> f64 {
        if label < 0 {
            return -1.0;
        }
        let s = label as usize;
        self.area_target(s) - self.area_actual(s)
    }

    pub fn boundary_dev(&self, a: usize, b: usize) -> f64 {
        self.boundary_target(a, b) - self.boundary_actual(a, b)
    }

    /// Updates areas and boundary counts for relabeling cell `i` of `cs` to
    /// `to`; must be called before the cell is written.
    pub fn record_change(&mut self, cs: &CellState, i: usize, to: i32) {
        let from = cs.label(i);
        if from == to {
            return;
        }
        let border = self.n;
        let side = |c: Option<usize>| c.map_or(border as i32, |c| cs.label(c));
        for nb in cs.neighbors4(i) {
            let c = side(nb);
            if c < 0 {
                continue;
            }
            if from >= 0 && c != from {
                self.add_boundary(from as usize, c as usize, -1);
            }
            if to >= 0 && c != to {
                self.add_boundary(to as usize, c as usize, 1);
            }
        }
        if from >= 0 {
            self.area_2d[from as usize] -= 1;
        }
        if to >= 0 {
            self.area_2d[to as usize] += 1;
        }
    }
}

/// Eq. 1 for one segment, or −1 for the background.
pub fn area_deviation(segment: i64, stats: &SegmentStats, tables: &DeviationTables) -> Result<f64> {
    if segment == BACKGROUND as i64 {
        return Ok(-1.0);
    }
    if segment < 0 || segment as usize >= stats.num_segments {
        return Err(Error::UnknownSegment(segment));
    }
    let s = segment as usize;
    Ok(stats.sizes[s] as f64 / stats.total_size as f64 - tables.area_actual(s))
}

/// Eq. 2 for an edge of the segmentation graph (the border included).
pub fn boundary_deviation(a: usize, b: usize, stats: &SegmentStats, tables: &DeviationTables) -> Result<f64> {
    let l = stats.boundary(a, b);
    if l == 0 {
        return Err(Error::NotAnEdge(a, b));
    }
    Ok(l as f64 / stats.total_boundary as f64 - tables.boundary_actual(a, b))
}
