mod support;

use std::sync::Arc;

use proptest::prelude::*;
use segmap_core::graph::SegGraph;
use segmap_core::grid::{compute_stats, LabeledGrid};
use segmap_core::metrics::{extract_adjacency, QualityReport};
use segmap_core::raster::CellState;
use support::oracle;

fn state(k: usize, w: usize, h: usize, cells: Vec<i32>) -> CellState {
    let g = SegGraph::from_parts(k, vec![1; k], vec![]);
    CellState::new(w, h, cells, Arc::new(g)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adjacency_matches_oracle(k in 1usize..8, cells in prop::collection::vec(-2i32..8, 32 * 32)) {
        let cells: Vec<i32> = cells.into_iter().map(|c| if c >= k as i32 { c % k as i32 } else { c }).collect();
        let cs = state(k, 32, 32, cells);
        let (v, e) = oracle::adjacency(&cs);
        let got = extract_adjacency(&cs);
        prop_assert_eq!(got.vertices, v);
        prop_assert_eq!(got.edges, e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn stats_match_face_counts(
        dims in prop::collection::vec(1usize..=16, 3),
        k in 1u32..10,
        seed in any::<u64>(),
    ) {
        let n: usize = dims.iter().product();
        let mut x = seed | 1;
        let labels = (0..n)
            .map(|_| {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                (x % k as u64) as u32
            })
            .collect();
        let (grid, _) = LabeledGrid::new(dims, labels).unwrap().normalized();
        let stats = compute_stats(&grid);
        let (sizes, faces) = oracle::face_counts(&grid);
        prop_assert_eq!(&stats.sizes, &sizes);
        prop_assert_eq!(stats.boundaries.clone(), faces.clone());
        prop_assert_eq!(stats.total_boundary, faces.values().sum::<u64>());
        prop_assert_eq!(stats.total_size, n as u64);
    }
}

proptest! {
    #[test]
    fn report_deviations_bounded(k in 1usize..6, cells in prop::collection::vec(-1i32..6, 12 * 9)) {
        let cells: Vec<i32> = cells.into_iter().map(|c| c.min(k as i32 - 1)).collect();
        let cs = state(k, 12, 9, cells);
        let grid = LabeledGrid::new(vec![4, 4], (0..16).map(|i| (i % k) as u32).collect()).unwrap();
        let stats = compute_stats(&grid);
        let r = QualityReport::new(&cs, &stats, 0);
        for s in &r.per_segment {
            prop_assert!((0.0..=1.0).contains(&s.abs_dev));
        }
        for e in &r.per_edge {
            prop_assert!((0.0..=1.0).contains(&e.abs_dev));
        }
    }
}
