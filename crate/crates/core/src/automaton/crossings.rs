//! Crossing maintenance: sliding crossings towards segment barycenters and
//! dropping crossings the topology does not need.

use std::collections::VecDeque;

use crate::metrics::{segment_components, validate_topology};
use crate::raster::{CellState, BACKGROUND, CROSSING};

use super::{AutomatonParams, DeviationTables};

/// Contact counts between labels (`a < b`), the grid border being label `n`.
fn contact_counts(cs: &CellState) -> Vec<u64> {
    let n1 = cs.origin().num_vertices();
    let mut counts = vec![0; n1 * n1];
    for i in 0..cs.len() {
        for (a, b) in incident(cs, i).into_iter().flatten() {
            counts[a * n1 + b] += 1;
        }
    }
    counts
}

/// Contacts of cell `i` with its four sides as label pairs `(min, max)`;
/// interior contacts are reported by the lower-indexed cell only.
fn incident(cs: &CellState, i: usize) -> [Option<(usize, usize)>; 4] {
    let border = cs.origin().border();
    let a = cs.label(i);
    cs.neighbors4(i).map(|nb| {
        if a < 0 {
            return None;
        }
        let b = match nb {
            None => border,
            Some(j) => {
                let b = cs.label(j);
                if b < 0 || b == a {
                    return None;
                }
                // count each interior contact from its lower cell only
                if j < i {
                    return None;
                }
                b as usize
            }
        };
        let a = a as usize;
        Some((a.min(b), a.max(b)))
    })
}

/// Net change of contact counts when the given cells change, as a list of
/// (pair index, delta).
fn local_contacts(
    cs: &CellState,
    label: impl Fn(usize) -> i32,
    cells: &[usize],
    n1: usize,
    out: &mut Vec<(usize, i32)>,
    sign: i32,
) {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let border = cs.origin().border();
    for &i in cells {
        for (k, nb) in cs.neighbors4(i).into_iter().enumerate() {
            // a contact is identified by its unordered cell pair
            let key = match nb {
                Some(j) => (i.min(j), i.max(j)),
                None => (i, usize::MAX - k),
            };
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let a = label(i);
            let b = nb.map_or(border as i32, &label);
            if a >= 0 && b >= 0 && a != b {
                let (a, b) = (a.min(b) as usize, a.max(b) as usize);
                out.push((a * n1 + b, sign));
            }
        }
    }
}

/// Whether no label pair gains or loses its last contact when the cells in
/// `old` (cell, previous label) took their current labels in `cs`.
fn adjacency_kept(cs: &CellState, old: &[(usize, i32)], count: impl Fn(usize, usize) -> u64) -> bool {
    let n1 = cs.origin().num_vertices();
    let changed: Vec<usize> = old.iter().map(|&(c, _)| c).collect();
    let before = |i: usize| old.iter().find(|&&(c, _)| c == i).map_or(cs.label(i), |&(_, l)| l);
    let mut delta = Vec::new();
    local_contacts(cs, before, &changed, n1, &mut delta, -1);
    local_contacts(cs, |i| cs.label(i), &changed, n1, &mut delta, 1);
    delta.sort_unstable();
    let mut k = 0;
    while k < delta.len() {
        let p = delta[k].0;
        let mut d = 0;
        while k < delta.len() && delta[k].0 == p {
            d += delta[k].1;
            k += 1;
        }
        let was = count(p / n1, p % n1) as i32;
        if (was > 0) != (was + d > 0) {
            return false;
        }
    }
    true
}

/// Whether the cells of `label` form one component, crossings bridging
/// opposite arms of equal label.
fn label_connected(cs: &CellState, label: i32) -> bool {
    let Some(start) = cs.cells().iter().position(|&c| c == label) else {
        return false;
    };
    let mut seen = vec![false; cs.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        let nb = cs.neighbors4(i);
        for (k, j) in nb.iter().enumerate() {
            let Some(mut j) = *j else { continue };
            if cs.label(j) == CROSSING {
                // hop over to the opposite arm
                match cs.neighbors4(j)[k] {
                    Some(o) => j = o,
                    None => continue,
                }
            }
            if !seen[j] && cs.label(j) == label {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
        }
    }
    count == cs.cells().iter().filter(|&&c| c == label).count()
}

fn barycenters(cs: &CellState) -> Vec<(f64, f64)> {
    let n = cs.origin().num_segments();
    let mut sum = vec![(0.0, 0.0, 0usize); n];
    for i in 0..cs.len() {
        let l = cs.label(i);
        if l >= 0 {
            let (x, y) = cs.coords(i);
            let s = &mut sum[l as usize];
            s.0 += x as f64;
            s.1 += y as f64;
            s.2 += 1;
        }
    }
    sum.into_iter()
        .map(|(x, y, c)| if c == 0 { (0.0, 0.0) } else { (x / c as f64, y / c as f64) })
        .collect()
}

fn dist(a: (usize, usize), b: (f64, f64)) -> f64 {
    ((a.0 as f64 - b.0).powi(2) + (a.1 as f64 - b.1).powi(2)).sqrt()
}

/// Swaps every crossing with the von Neumann neighbor that brings it closest
/// to the barycenter of that neighbor's segment, if any move keeps the
/// topology. Returns whether a crossing moved.
pub fn move_crossings(cs: &mut CellState) -> bool {
    move_crossings_in(cs, None)
}

/// As [`move_crossings`], reading contact counts from (and keeping up to
/// date) the deviation tables when given.
pub(crate) fn move_crossings_in(cs: &mut CellState, mut tables: Option<&mut DeviationTables>) -> bool {
    if cs.crossings().is_empty() {
        return false;
    }
    let centers = barycenters(cs);
    let mut counts: Option<Vec<u64>> = None;
    let n1 = cs.origin().num_vertices();
    let mut moved = false;
    let sites: Vec<(usize, [u32; 2])> = cs.crossings().iter().map(|(&c, &a)| (c, a)).collect();
    for (c, arms) in sites {
        let here = cs.coords(c);
        let mut options: Vec<(f64, usize)> = cs
            .neighbors4(c)
            .into_iter()
            .flatten()
            .filter(|&p| cs.label(p) >= 0)
            // the new site must not touch another crossing
            .filter(|&p| {
                cs.neighbors4(p)
                    .into_iter()
                    .flatten()
                    .all(|q| q == c || cs.label(q) != CROSSING)
            })
            .filter_map(|p| {
                let center = centers[cs.label(p) as usize];
                let gain = dist(here, center) - dist(cs.coords(p), center);
                (gain > 1e-9).then_some((gain, p))
            })
            .collect();
        if options.is_empty() {
            continue;
        }
        options.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        if tables.is_none() && counts.is_none() {
            counts = Some(contact_counts(cs));
        }
        for (_, p) in options {
            let label = cs.label(p);
            cs.set(c, label);
            cs.set(p, CROSSING);
            let ok = cs.crossing_arms(p) == Some(arms)
                && adjacency_kept(cs, &[(c, CROSSING), (p, label)], |a, b| match (&tables, &counts) {
                    (Some(t), _) => t.boundary_2d(a, b),
                    (None, Some(k)) => k[a * n1 + b],
                    (None, None) => unreachable!(),
                })
                && arms.iter().all(|&l| label_connected(cs, l as i32));
            cs.set(p, label);
            cs.set(c, CROSSING);
            if ok {
                if let Some(t) = tables.as_deref_mut() {
                    t.record_change(cs, c, label);
                }
                cs.set(c, label);
                if let Some(t) = tables.as_deref_mut() {
                    t.record_change(cs, p, CROSSING);
                }
                cs.set(p, CROSSING);
                if counts.is_some() {
                    counts = Some(contact_counts(cs));
                }
                moved = true;
                break;
            }
        }
    }
    moved
}

/// Tries to drop each crossing: the crossing cell becomes background, and if
/// that splits an arm segment, the smaller part reverts to background as
/// well. Kept only when the full topology check still passes.
pub fn remove_redundant_crossings(cs: &mut CellState, _params: &AutomatonParams) -> bool {
    let sites: Vec<usize> = cs.crossings().keys().copied().collect();
    let mut removed = false;
    for c in sites {
        if cs.label(c) != CROSSING {
            continue;
        }
        let mut trial = cs.clone();
        trial.set(c, BACKGROUND);
        trial.rebuild_crossings();
        let check = validate_topology(&trial, trial.origin());
        if check.ok() {
            *cs = trial;
            removed = true;
            continue;
        }
        if !check.adjacency_ok() || check.disconnected.is_empty() || !check.bad_crossings.is_empty() {
            continue;
        }
        for &s in &check.disconnected {
            for cell in smaller_parts(&trial, s as i32) {
                trial.set(cell, BACKGROUND);
            }
        }
        trial.rebuild_crossings();
        if validate_topology(&trial, trial.origin()).ok() {
            *cs = trial;
            removed = true;
        }
    }
    debug_assert_eq!(segment_components(cs).iter().filter(|&&k| k != 1).count(), 0);
    removed
}

/// Cells of every component of `label` except the largest.
fn smaller_parts(cs: &CellState, label: i32) -> Vec<usize> {
    let mut comp = vec![usize::MAX; cs.len()];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for start in 0..cs.len() {
        if cs.label(start) != label || comp[start] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut cells = vec![start];
        comp[start] = id;
        let mut k = 0;
        while k < cells.len() {
            let i = cells[k];
            k += 1;
            for (d, j) in cs.neighbors4(i).iter().enumerate() {
                let Some(mut j) = *j else { continue };
                if cs.label(j) == CROSSING {
                    match cs.neighbors4(j)[d] {
                        Some(o) => j = o,
                        None => continue,
                    }
                }
                if cs.label(j) == label && comp[j] == usize::MAX {
                    comp[j] = id;
                    cells.push(j);
                }
            }
        }
        parts.push(cells);
    }
    let Some(big) = (0..parts.len()).max_by_key(|&k| (parts[k].len(), usize::MAX - k)) else {
        return Vec::new();
    };
    parts
        .into_iter()
        .enumerate()
        .filter(|&(k, _)| k != big)
        .flat_map(|(_, c)| c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, SegGraph};
    use crate::metrics::extract_adjacency;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Arc<SegGraph> {
        Arc::new(SegGraph::from_parts(
            n,
            vec![1; n],
            edges.iter().map(|&(a, b)| Edge { a, b, weight: 1 }).collect(),
        ))
    }

    fn parse(rows: &[&str], g: Arc<SegGraph>) -> CellState {
        let cells = rows
            .iter()
            .flat_map(|r| {
                r.chars().map(|c| match c {
                    '.' => BACKGROUND,
                    'x' => CROSSING,
                    d => d.to_digit(10).unwrap() as i32,
                })
            })
            .collect();
        CellState::new(rows[0].len(), rows.len(), cells, g).unwrap()
    }

    #[test]
    fn stuck_crossing_stays() {
        // 1 and 2 are not adjacent, so a move would create contact
        let g = graph(3, &[(0, 3), (0, 1), (0, 2)]);
        let rows = ["00000", "00200", "01x10", "00200", "00000"];
        let mut cs = parse(&rows, g);
        let before = cs.clone();
        assert!(!move_crossings(&mut cs));
        assert_eq!(cs, before);
    }

    #[test]
    fn doubled_crossing_removed() {
        // 1 runs horizontally and is crossed twice by 2, which is bent into a U
        let g = graph(3, &[(0, 3), (0, 1), (0, 2), (1, 2)]);
        let rows = ["0000000", "0020200", "01x1x10", "0022200", "0000000"];
        let mut cs = parse(&rows, g.clone());
        assert!(validate_topology(&cs, &g).ok());
        let adj = extract_adjacency(&cs);
        assert!(remove_redundant_crossings(&mut cs, &AutomatonParams::default()));
        assert!(cs.num_crossings() < 2);
        assert_eq!(extract_adjacency(&cs), adj);
        assert!(validate_topology(&cs, &g).ok());
    }

    #[test]
    fn needed_crossing_kept() {
        // each half of 1 carries a contact of its own
        let g = graph(5, &[(0, 5), (0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4)]);
        let rows = ["0000000", "0002000", "031x140", "0002000", "0000000"];
        let mut cs = parse(&rows, g.clone());
        assert!(validate_topology(&cs, &g).ok(), "{}", validate_topology(&cs, &g));
        let before = cs.clone();
        assert!(!remove_redundant_crossings(&mut cs, &AutomatonParams::default()));
        assert_eq!(cs, before);
    }
}
