//! Local cell rules: security factor, topology criticality, ΔL.

use crate::raster::{CellState, CROSSING};

/// Label used for positions outside the grid in the Moore ring.
const OUTSIDE: i32 = i32::MIN;

/// 3 per von Neumann neighbor with the same label plus 1 per diagonal one;
/// positions outside the grid never match.
pub fn security_factor(cs: &CellState, i: usize) -> u32 {
    let s = cs.label(i);
    let ring = cs.ring8(i);
    ring.iter()
        .enumerate()
        .filter(|(_, c)| c.is_some_and(|c| cs.label(c) == s))
        .map(|(k, _)| if k % 2 == 0 { 3 } else { 1 })
        .sum()
}

/// Label changes along the clockwise Moore ring, the outside counting as a
/// label of its own.
pub fn ring_transitions(cs: &CellState, i: usize) -> usize {
    let ring = cs.ring8(i).map(|c| c.map_or(OUTSIDE, |c| cs.label(c)));
    (0..8).filter(|&k| ring[k] != ring[(k + 1) % 8]).count()
}

/// A cell is critical if it is a crossing, if its Moore ring changes label
/// more than three times, or if it is the last cell of its segment.
pub fn is_topology_critical(cs: &CellState, i: usize) -> bool {
    let s = cs.label(i);
    if s == CROSSING || ring_transitions(cs, i) > 3 {
        return true;
    }
    s >= 0 && !cs.cells().iter().enumerate().any(|(j, &c)| j != i && c == s)
}

/// ΔL = N_from − N_to over the von Neumann neighbors of the cell.
pub fn delta_boundary_length(cs: &CellState, i: usize, from: i32, to: i32) -> i32 {
    let mut d = 0;
    for c in cs.neighbors4(i).into_iter().flatten() {
        let l = cs.label(c);
        if l == from {
            d += 1;
        } else if l == to {
            d -= 1;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, SegGraph};
    use std::sync::Arc;

    fn state(w: usize, h: usize, cells: Vec<i32>, n: usize) -> CellState {
        let g = SegGraph::from_parts(
            n,
            vec![1; n],
            (0..n).map(|a| Edge { a, b: n, weight: 1 }).collect(),
        );
        CellState::new(w, h, cells, Arc::new(g)).unwrap()
    }

    #[test]
    fn security_extremes() {
        let cs = state(3, 3, vec![0; 9], 1);
        assert_eq!(security_factor(&cs, 4), 16);
        let cs = state(3, 3, vec![1, 1, 1, 1, 0, 1, 1, 1, 1], 2);
        assert_eq!(security_factor(&cs, 4), 0);
        let cs = state(3, 3, vec![1, 0, 1, 0, 0, 0, 1, 0, 1], 2);
        assert_eq!(security_factor(&cs, 4), 12);
        // a corner cell: outside counts as different
        let cs = state(2, 2, vec![0; 4], 1);
        assert_eq!(security_factor(&cs, 0), 3 + 3 + 1);
    }

    #[test]
    fn ring_patterns() {
        let cs = state(3, 3, vec![0; 9], 1);
        assert!(!is_topology_critical(&cs, 4));
        // three arcs: 1 on top, 2 at the bottom, 0 on the sides
        let cs = state(3, 3, vec![1, 1, 1, 0, 0, 0, 2, 2, 2], 3);
        assert_eq!(ring_transitions(&cs, 4), 4);
        assert!(is_topology_critical(&cs, 4));
        let cs = state(3, 3, vec![1, 1, 1, 0, 0, 0, 0, 0, 0], 2);
        assert_eq!(ring_transitions(&cs, 4), 2);
        assert!(!is_topology_critical(&cs, 4));
        let cs = state(3, 3, vec![1, 1, 2, 0, 0, 2, 0, 0, 0], 3);
        assert_eq!(ring_transitions(&cs, 4), 3);
        assert!(!is_topology_critical(&cs, 4));
        // the last cell of a segment may not vanish
        let cs = state(3, 3, vec![1, 1, 1, 1, 0, 1, 1, 1, 1], 2);
        assert!(is_topology_critical(&cs, 4));
    }

    #[test]
    fn delta_l_examples() {
        // neighbors N=0, E=0, S=1, W=2 around a 0 cell
        let cs = state(3, 3, vec![9, 0, 9, 2, 0, 0, 9, 1, 9].iter().map(|&c| if c == 9 { -1 } else { c }).collect(), 3);
        assert_eq!(delta_boundary_length(&cs, 4, 0, 1), 1);
        let cs = state(3, 3, vec![-1, 0, -1, 1, 0, 1, -1, 0, -1], 2);
        assert_eq!(delta_boundary_length(&cs, 4, 0, 1), 2 - 2);
        let cs = state(3, 3, vec![-1, 1, -1, 1, 0, 1, -1, 1, -1], 2);
        assert_eq!(delta_boundary_length(&cs, 4, 0, 1), -4);
    }
}
