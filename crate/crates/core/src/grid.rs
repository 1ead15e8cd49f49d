//! n-dimensional labeled grids: NDSEG file I/O, synthetic generators,
//! connected-component relabeling and segment statistics.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payload encoding of an NDSEG file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Ascii,
    Binary,
}

/// A regular n-dimensional grid of segment labels, row-major with the last
/// dimension varying fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGrid {
    dims: Vec<usize>,
    labels: Vec<u32>,
}

impl LabeledGrid {
    pub fn new(dims: Vec<usize>, labels: Vec<u32>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::Input(format!("invalid dims {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if n != labels.len() {
            return Err(Error::Input(format!(
                "dims {dims:?} need {n} labels, got {}",
                labels.len()
            )));
        }
        Ok(LabeledGrid { dims, labels })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Row-major strides (last dimension has stride 1).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for d in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * self.dims[d + 1];
        }
        strides
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(self.strides())
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dims.len()];
        for d in (0..self.dims.len()).rev() {
            coords[d] = index % self.dims[d];
            index /= self.dims[d];
        }
        coords
    }

    pub fn get(&self, coords: &[usize]) -> u32 {
        self.labels[self.index(coords)]
    }

    /// Number of distinct labels present.
    pub fn num_labels(&self) -> usize {
        let mut seen: Vec<u32> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Renumbers labels to `0..k` in order of increasing original label and
    /// returns the new grid together with the original id of every new label.
    pub fn normalized(&self) -> (LabeledGrid, Vec<u32>) {
        let mut originals: Vec<u32> = self.labels.clone();
        originals.sort_unstable();
        originals.dedup();
        let map: HashMap<u32, u32> = originals
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as u32))
            .collect();
        let labels = self.labels.iter().map(|l| map[l]).collect();
        (
            LabeledGrid {
                dims: self.dims.clone(),
                labels,
            },
            originals,
        )
    }

    /// Calls `f(neighbor_index)` for every von Neumann neighbor of `index`.
    fn for_each_neighbor(&self, index: usize, strides: &[usize], mut f: impl FnMut(usize)) {
        let mut rem = index;
        for d in 0..self.dims.len() {
            let c = rem / strides[d];
            rem %= strides[d];
            if c > 0 {
                f(index - strides[d]);
            }
            if c + 1 < self.dims[d] {
                f(index + strides[d]);
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Reads an NDSEG file.
pub fn load_grid(path: impl AsRef<Path>) -> Result<LabeledGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(io_err(path))?;
    parse_ndseg(&bytes)
}

fn take_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    let start = *pos;
    let end = bytes[start..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| start + p)
        .ok_or_else(|| Error::Input("truncated NDSEG header".into()))?;
    *pos = end + 1;
    std::str::from_utf8(&bytes[start..end])
        .map(|s| s.trim_end_matches('\r'))
        .map_err(|_| Error::Input("NDSEG header is not ASCII".into()))
}

/// Parses NDSEG bytes.
pub fn parse_ndseg(bytes: &[u8]) -> Result<LabeledGrid> {
    let mut pos = 0;
    if take_line(bytes, &mut pos)? != "NDSEG1" {
        return Err(Error::Input("missing NDSEG1 magic".into()));
    }
    let dims_line = take_line(bytes, &mut pos)?;
    let mut parts = dims_line.split_ascii_whitespace();
    if parts.next() != Some("dims") {
        return Err(Error::Input(format!("malformed dims line {dims_line:?}")));
    }
    let dims = parts
        .map(|p| p.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Input(format!("malformed dims line {dims_line:?}: {e}")))?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Input(format!("malformed dims line {dims_line:?}")));
    }
    let encoding = match take_line(bytes, &mut pos)? {
        "encoding ascii" => Encoding::Ascii,
        "encoding binary" => Encoding::Binary,
        other => return Err(Error::Input(format!("unknown encoding line {other:?}"))),
    };
    let n: usize = dims.iter().product();
    let payload = &bytes[pos..];
    let raw: Vec<i64> = match encoding {
        Encoding::Ascii => {
            let text = std::str::from_utf8(payload)
                .map_err(|_| Error::Input("ASCII payload is not valid text".into()))?;
            text.split_ascii_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Input(format!("malformed label: {e}")))?
        }
        Encoding::Binary => {
            if payload.len() % 4 != 0 {
                return Err(Error::Input("binary payload length is not a multiple of 4".into()));
            }
            payload
                .chunks_exact(4)
                .map(|c| i32::from_le_bytes([c[0], c[1], c[2], c[3]]) as i64)
                .collect()
        }
    };
    if raw.len() != n {
        return Err(Error::Input(format!(
            "label count mismatch: dims require {n}, found {}",
            raw.len()
        )));
    }
    let mut labels = Vec::with_capacity(n);
    for (offset, &label) in raw.iter().enumerate() {
        if label < 0 {
            return Err(Error::NegativeLabel { offset, label });
        }
        if label > i32::MAX as i64 {
            return Err(Error::Input(format!("label {label} at offset {offset} is too large")));
        }
        labels.push(label as u32);
    }
    LabeledGrid::new(dims, labels)
}

/// Serializes a grid in NDSEG format.
pub fn write_ndseg(grid: &LabeledGrid, encoding: Encoding) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"NDSEG1\n");
    let dims: Vec<String> = grid.dims.iter().map(|d| d.to_string()).collect();
    out.extend_from_slice(format!("dims {}\n", dims.join(" ")).as_bytes());
    match encoding {
        Encoding::Ascii => {
            out.extend_from_slice(b"encoding ascii\n");
            let row = *grid.dims.last().unwrap();
            for chunk in grid.labels.chunks(row) {
                let line: Vec<String> = chunk.iter().map(|l| l.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        Encoding::Binary => {
            out.extend_from_slice(b"encoding binary\n");
            for &l in &grid.labels {
                out.extend_from_slice(&(l as i32).to_le_bytes());
            }
        }
    }
    out
}

pub fn save_grid(grid: &LabeledGrid, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&write_ndseg(grid, encoding)).map_err(io_err(path))
}

/// Splits every label into its von Neumann connected components. New ids are
/// assigned in order of each component's first cell.
pub fn relabel_connected_components(grid: &LabeledGrid) -> LabeledGrid {
    const UNSET: u32 = u32::MAX;
    let strides = grid.strides();
    let mut out = vec![UNSET; grid.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if out[start] != UNSET {
            continue;
        }
        let label = grid.labels[start];
        out[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            grid.for_each_neighbor(i, &strides, |j| {
                if out[j] == UNSET && grid.labels[j] == label {
                    out[j] = next;
                    queue.push_back(j);
                }
            });
        }
        next += 1;
    }
    LabeledGrid {
        dims: grid.dims.clone(),
        labels: out,
    }
}

/// Grows `num_segments` segments from random seed cells, each claiming
/// unassigned face neighbors with its own random growth rate.
pub fn generate_d1(dims: &[usize], num_segments: usize, seed: u64) -> Result<LabeledGrid> {
    if !(2..=3).contains(&dims.len()) || dims.contains(&0) {
        return Err(Error::Input(format!("D1 needs 2 or 3 positive dims, got {dims:?}")));
    }
    let n: usize = dims.iter().product();
    if num_segments == 0 || num_segments > n {
        return Err(Error::Input(format!(
            "cannot place {num_segments} segments in {n} cells"
        )));
    }
    const UNSET: u32 = u32::MAX;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = LabeledGrid {
        dims: dims.to_vec(),
        labels: vec![UNSET; n],
    };
    let strides = grid.strides();

    let mut frontiers: Vec<Vec<usize>> = Vec::with_capacity(num_segments);
    let mut rates = Vec::with_capacity(num_segments);
    for s in 0..num_segments {
        let cell = loop {
            let c = rng.gen_range(0..n);
            if grid.labels[c] == UNSET {
                break c;
            }
        };
        grid.labels[cell] = s as u32;
        frontiers.push(vec![cell]);
        // uniform on (0, 1]
        rates.push(1.0 - rng.gen::<f64>());
    }
    let mut unassigned = n - num_segments;

    while unassigned > 0 && frontiers.iter().any(|f| !f.is_empty()) {
        for s in 0..num_segments {
            let frontier = std::mem::take(&mut frontiers[s]);
            let mut next = Vec::with_capacity(frontier.len());
            for cell in frontier {
                let mut open = false;
                let mut claimed = Vec::new();
                grid.for_each_neighbor(cell, &strides, |j| {
                    if grid.labels[j] == UNSET {
                        if rng.gen::<f64>() < rates[s] {
                            claimed.push(j);
                        } else {
                            open = true;
                        }
                    }
                });
                for j in claimed {
                    if grid.labels[j] == UNSET {
                        grid.labels[j] = s as u32;
                        unassigned -= 1;
                        next.push(j);
                    }
                }
                if open {
                    next.push(cell);
                }
            }
            frontiers[s] = next;
        }
    }

    if unassigned > 0 {
        // Unreachable with the frontier scheme; kept as a coverage guarantee.
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| grid.labels[i] != UNSET).collect();
        while let Some(i) = queue.pop_front() {
            let label = grid.labels[i];
            let mut fresh = Vec::new();
            grid.for_each_neighbor(i, &strides, |j| {
                if grid.labels[j] == UNSET {
                    fresh.push(j);
                }
            });
            for j in fresh {
                grid.labels[j] = label;
                queue.push_back(j);
            }
        }
    }
    Ok(grid)
}

/// A 20x20x20 cube split at index 10 along every axis into eight octants.
pub fn generate_d2() -> LabeledGrid {
    let dims = vec![20, 20, 20];
    let mut labels = Vec::with_capacity(8000);
    for x in 0..20 {
        for y in 0..20 {
            for z in 0..20 {
                let octant = ((x >= 10) as u32) << 2 | ((y >= 10) as u32) << 1 | (z >= 10) as u32;
                labels.push(octant);
            }
        }
    }
    LabeledGrid { dims, labels }
}

/// Unordered pair of graph vertices, stored with `0 <= 1`.
pub type Pair = (usize, usize);

pub fn pair(a: usize, b: usize) -> Pair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Segment sizes and face counts of an n-dimensional segmentation. The border
/// pseudo-segment has index `num_segments`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub num_segments: usize,
    pub sizes: Vec<u64>,
    pub total_size: u64,
    pub boundaries: BTreeMap<Pair, u64>,
    pub total_boundary: u64,
}

impl SegmentStats {
    pub fn border(&self) -> usize {
        self.num_segments
    }

    pub fn boundary(&self, a: usize, b: usize) -> u64 {
        self.boundaries.get(&pair(a, b)).copied().unwrap_or(0)
    }
}

/// Counts cells per segment and shared faces per segment pair. Labels are
/// expected to be `0..k`; use [`LabeledGrid::normalized`] otherwise.
pub fn compute_stats(grid: &LabeledGrid) -> SegmentStats {
    let num_segments = grid.labels.iter().max().map_or(0, |&m| m as usize + 1);
    let border = num_segments;
    let mut sizes = vec![0u64; num_segments];
    let mut boundaries: BTreeMap<Pair, u64> = BTreeMap::new();
    let strides = grid.strides();
    let ndim = grid.ndim();
    for (i, &label) in grid.labels.iter().enumerate() {
        let label = label as usize;
        sizes[label] += 1;
        let mut rem = i;
        for d in 0..ndim {
            let c = rem / strides[d];
            rem %= strides[d];
            if c == 0 {
                *boundaries.entry(pair(label, border)).or_default() += 1;
            }
            if c + 1 == grid.dims[d] {
                *boundaries.entry(pair(label, border)).or_default() += 1;
            } else {
                let other = grid.labels[i + strides[d]] as usize;
                if other != label {
                    *boundaries.entry(pair(label, other)).or_default() += 1;
                }
            }
        }
    }
    let total_boundary = boundaries.values().sum();
    SegmentStats {
        num_segments,
        sizes,
        total_size: grid.len() as u64,
        boundaries,
        total_boundary,
    }
}

/// Returns true iff every label forms a single von Neumann component.
pub fn labels_connected(grid: &LabeledGrid) -> bool {
    relabel_connected_components(grid).num_labels() == grid.num_labels()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(dims: &[usize], labels: &[u32]) -> LabeledGrid {
        LabeledGrid::new(dims.to_vec(), labels.to_vec()).unwrap()
    }

    #[test]
    fn parses_minimal_files() {
        let g = parse_ndseg(b"NDSEG1\ndims 1 1\nencoding ascii\n0\n").unwrap();
        assert_eq!(g.dims(), &[1, 1]);
        assert_eq!(g.num_labels(), 1);

        let g = parse_ndseg(b"NDSEG1\ndims 2 2\nencoding ascii\n0 0 1 1\n").unwrap();
        let stats = compute_stats(&g);
        assert_eq!(stats.sizes, vec![2, 2]);
    }

    #[test]
    fn rejects_negative_label() {
        let err = parse_ndseg(b"NDSEG1\ndims 3\nencoding ascii\n0 -1 2\n").unwrap_err();
        assert!(matches!(err, Error::NegativeLabel { offset: 1, label: -1 }));
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(parse_ndseg(b"NDSEG2\ndims 1\nencoding ascii\n0\n").is_err());
        assert!(parse_ndseg(b"NDSEG1\ndim 1\nencoding ascii\n0\n").is_err());
        assert!(parse_ndseg(b"NDSEG1\ndims 2\nencoding ascii\n0\n").is_err());
        assert!(parse_ndseg(b"NDSEG1\ndims 1\nencoding hex\n0\n").is_err());
    }

    #[test]
    fn binary_payload() {
        let g = grid(&[2, 3], &[0, 1, 2, 3, 4, 5]);
        let bytes = write_ndseg(&g, Encoding::Binary);
        assert_eq!(parse_ndseg(&bytes).unwrap(), g);
        let mut neg = b"NDSEG1\ndims 1\nencoding binary\n".to_vec();
        neg.extend_from_slice(&(-1i32).to_le_bytes());
        assert!(matches!(parse_ndseg(&neg), Err(Error::NegativeLabel { .. })));
    }

    #[test]
    fn relabel_splits_disconnected() {
        let g = relabel_connected_components(&grid(&[3], &[0, 1, 0]));
        assert_eq!(g.labels(), &[0, 1, 2]);
    }

    #[test]
    fn relabel_corners_are_separate() {
        let g = grid(&[3, 3], &[0, 1, 0, 1, 1, 1, 0, 1, 0]);
        let r = relabel_connected_components(&g);
        assert_eq!(r.num_labels(), 5);
    }

    #[test]
    fn relabel_identity_on_pure_grid() {
        let g = grid(&[2, 2], &[7, 7, 3, 3]);
        assert_eq!(relabel_connected_components(&g).labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn d1_single_segment_fills_domain() {
        let g = generate_d1(&[10, 10], 1, 0).unwrap();
        assert!(g.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn d1_rejects_too_many_segments() {
        assert!(generate_d1(&[2, 2], 5, 0).is_err());
        assert!(generate_d1(&[2, 2, 2, 2], 2, 0).is_err());
    }

    #[test]
    fn d1_is_deterministic_and_pure() {
        let a = generate_d1(&[50, 50], 20, 42).unwrap();
        let b = generate_d1(&[50, 50], 20, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_labels(), 20);
        assert_eq!(relabel_connected_components(&a).num_labels(), 20);
    }

    #[test]
    fn d2_octants() {
        let g = generate_d2();
        assert_eq!(g.get(&[0, 0, 0]), 0);
        assert_eq!(g.get(&[19, 19, 19]), 7);
        let stats = compute_stats(&g);
        assert!(stats.sizes.iter().all(|&s| s == 1000));
        for i in 0..8usize {
            let neighbours = (0..8).filter(|&j| j != i && stats.boundary(i, j) > 0).count();
            assert_eq!(neighbours, 3);
            assert_eq!(stats.boundary(i, 8), 300);
            for j in 0..8 {
                if (i ^ j).count_ones() == 1 {
                    assert_eq!(stats.boundary(i, j), 100);
                }
            }
        }
        assert_eq!(stats.total_boundary, 3600);
    }

    #[test]
    fn single_segment_stats() {
        let stats = compute_stats(&grid(&[2, 3], &[0; 6]));
        assert_eq!(stats.boundaries.len(), 1);
        assert_eq!(stats.boundary(0, 1), 10);
    }
}
