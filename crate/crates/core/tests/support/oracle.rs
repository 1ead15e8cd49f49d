//! Brute-force references, written without the library's scanning code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use segmap_core::grid::LabeledGrid;
use segmap_core::raster::CellState;

/// Every unordered pair of cells is tested for face adjacency; out-of-grid
/// neighbors count as the border `k`.
pub fn adjacency(cs: &CellState) -> (BTreeSet<usize>, BTreeSet<(usize, usize)>) {
    let k = cs.origin().num_segments();
    let (w, h) = (cs.width() as i64, cs.height() as i64);
    let cells: Vec<(i64, i64, i32)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| (x, y, cs.get(x as usize, y as usize)))
        .collect();
    let mut verts = BTreeSet::from([k]);
    let mut edges = BTreeSet::new();
    for &(x, y, a) in &cells {
        if a < 0 {
            continue;
        }
        verts.insert(a as usize);
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                edges.insert((a as usize, k));
            }
        }
        for &(x2, y2, b) in &cells {
            if b >= 0 && b != a && (x - x2).abs() + (y - y2).abs() == 1 {
                let (p, q) = (a.min(b) as usize, a.max(b) as usize);
                edges.insert((p, q));
            }
        }
    }
    (verts, edges)
}

/// Sizes and face counts by visiting all 2n faces of every cell. An inner
/// face is seen from both sides, hence the halving.
pub fn face_counts(grid: &LabeledGrid) -> (Vec<u64>, BTreeMap<(usize, usize), u64>) {
    let k = grid.labels().iter().max().map_or(0, |&m| m as usize + 1);
    let dims = grid.dims().to_vec();
    let mut sizes = vec![0u64; k];
    let mut twice: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for i in 0..grid.len() {
        let c = grid.coords(i);
        let a = grid.get(&c) as usize;
        sizes[a] += 1;
        for d in 0..dims.len() {
            for delta in [-1i64, 1] {
                let mut n = c.clone();
                let v = c[d] as i64 + delta;
                if v < 0 || v >= dims[d] as i64 {
                    *twice.entry((a, k)).or_default() += 2;
                    continue;
                }
                n[d] = v as usize;
                let b = grid.get(&n) as usize;
                if b != a {
                    *twice.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
    }
    (sizes, twice.into_iter().map(|(p, v)| (p, v / 2)).collect())
}
