//! Cellular automaton that reshapes segments towards their n-D area and
//! boundary-length shares without changing the adjacency topology.

pub mod crossings;
pub mod rules;
pub mod tables;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::SegmentStats;
use crate::metrics::validate_topology;
use crate::raster::{CellState, CROSSING};

pub use crossings::{move_crossings, remove_redundant_crossings};
pub use rules::{delta_boundary_length, is_topology_critical, ring_transitions, security_factor};

pub use tables::{area_deviation, boundary_deviation, DeviationTables};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatonParams {
    pub max_iterations: usize,
    /// Damping factor g.
    pub damping: f64,
    pub security_threshold: u32,
    pub removal_interval: usize,
    pub stop_patience: usize,
    pub optimize_boundaries: bool,
    pub rng_seed: u64,
}

impl Default for AutomatonParams {
    fn default() -> Self {
        AutomatonParams {
            max_iterations: 5000,
            damping: 7.0,
            security_threshold: 11,
            removal_interval: 300,
            stop_patience: 10,
            optimize_boundaries: true,
            rng_seed: 0,
        }
    }
}

/// Offset `(x mod 2, y mod 2)` of the cells active in an iteration.
pub fn phase_offset(iteration: usize) -> (usize, usize) {
    [(0, 0), (1, 1), (1, 0), (0, 1)][iteration % 4]
}

/// Damping gate: the driving deviation is taken in percentage points, so
/// the default g = 7 only starts to damp below about 0.14%.
pub fn switch_probability(damping: f64, deviation: f64) -> f64 {
    (damping * 100.0 * deviation.abs()).min(1.0)
}

/// Uniform draw in [0, 1) that depends only on its arguments.
fn draw(seed: u64, iteration: usize, cell: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng.set_word_pos(2 * cell as u128);
    rng.gen()
}

/// Proposed relabeling of one cell with the deviation driving it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Proposal {
    cell: usize,
    to: i32,
    value: f64,
}

/// Number of maximal runs of `s` along the Moore ring of `i`.
fn ring_runs(cs: &CellState, i: usize, s: i32) -> usize {
    let ring = cs.ring8(i).map(|c| c.is_some_and(|c| cs.label(c) == s));
    if ring.iter().all(|&b| b) {
        return 1;
    }
    (0..8).filter(|&k| ring[k] && !ring[(k + 7) % 8]).count()
}

/// Labels on the four sides of `i`, the grid border reported as `border`.
fn sides(cs: &CellState, i: usize) -> [i32; 4] {
    let border = cs.origin().border() as i32;
    cs.neighbors4(i).map(|c| c.map_or(border, |c| cs.label(c)))
}

/// Whether relabeling `i` from `s` to `to` keeps every contact of `s` alive,
/// judged against the current contact counts.
fn contacts_survive(t: &DeviationTables, sides: &[i32; 4], s: i32, to: i32) -> bool {
    if s < 0 {
        return true;
    }
    sides.iter().all(|&u| {
        if u < 0 || u == s || u == to {
            return true;
        }
        let lost = sides.iter().filter(|&&v| v == u).count() as u64;
        t.boundary_2d(s as usize, u as usize) > lost
    })
}

fn propose(cs: &CellState, params: &AutomatonParams, t: &DeviationTables, i: usize) -> Option<Proposal> {
    let s = cs.label(i);
    if s == CROSSING {
        return None;
    }
    let sides = sides(cs, i);
    // arms of a crossing stay in place
    if sides.contains(&CROSSING) {
        return None;
    }
    if s >= 0
        && (t.area_2d[s as usize] <= 1
            || ring_runs(cs, i, s) > 1
            || security_factor(cs, i) >= params.security_threshold)
    {
        return None;
    }
    let g = cs.origin();
    let border = g.border() as i32;
    let mut targets: Vec<i32> = sides.iter().copied().filter(|&l| l >= 0 && l != s && l != border).collect();
    targets.sort_unstable();
    targets.dedup();
    let ds = t.area_dev(s);
    let mut best: Option<(f64, i32)> = None;
    for &to in &targets {
        // every contact the cell brings must already exist in the graph
        let tu = to as usize;
        if !sides.iter().all(|&u| u < 0 || u == to || u == s || g.has_edge(tu, u as usize)) {
            continue;
        }
        if !contacts_survive(t, &sides, s, to) {
            continue;
        }
        let mut value: f64 = 0.0;
        let dt = t.area_dev(to);
        if dt > ds {
            value = dt - ds;
        }
        if params.optimize_boundaries && s >= 0 {
            let dl = t.boundary_dev(s as usize, tu);
            let delta = sides.iter().filter(|&&l| l == s).count() as f64
                - sides.iter().filter(|&&l| l == to).count() as f64;
            if dl * delta > 0.0 {
                value = value.max(dl.abs());
            }
        }
        if value > 0.0 && best.is_none_or(|(v, _)| value > v) {
            best = Some((value, to));
        }
    }
    best.map(|(value, to)| Proposal { cell: i, to, value })
}

/// One phase of the automaton. Cells decide in parallel on the state at phase
/// start; accepted changes are applied in cell order, each only if it is still
/// the cell's best move. Returns whether any cell changed.
pub fn step(
    cs: &mut CellState,
    params: &AutomatonParams,
    tables: &mut DeviationTables,
    iteration: usize,
) -> bool {
    let (ox, oy) = phase_offset(iteration);
    let (w, h) = (cs.width(), cs.height());
    let snapshot: &CellState = cs;
    let t: &DeviationTables = tables;
    let accepted: Vec<Proposal> = (oy..h)
        .into_par_iter()
        .step_by(2)
        .flat_map_iter(|y| {
            (ox..w).step_by(2).filter_map(move |x| {
                let p = propose(snapshot, params, t, y * w + x)?;
                let prob = switch_probability(params.damping, p.value);
                (draw(params.rng_seed, iteration, p.cell) < prob).then_some(p)
            })
        })
        .collect();
    let mut changed = false;
    for p in &accepted {
        // earlier changes of this phase may have used up contacts or the
        // deviation that drove this one; the neighborhood itself is unchanged
        if propose(cs, params, tables, p.cell).is_none_or(|q| q.to != p.to) {
            continue;
        }
        tables.record_change(cs, p.cell, p.to);
        cs.set(p.cell, p.to);
        changed = true;
    }
    changed
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: CellState,
    pub iterations_used: usize,
}

/// Runs until `max_iterations` or `stop_patience` quiet iterations. Crossings
/// are moved every iteration and pruned every `removal_interval`; `frame` is
/// called with the iteration count and state every `frames_every`
/// iterations (0 disables it).
pub fn run_with_frames(
    cs: &CellState,
    stats: &SegmentStats,
    params: &AutomatonParams,
    frames_every: usize,
    mut frame: impl FnMut(usize, &CellState),
) -> RunResult {
    let mut state = cs.clone();
    let mut tables = DeviationTables::compute(&state, stats);
    let mut quiet = 0;
    let mut used = 0;
    let interval = params.removal_interval.max(1);
    for it in 0..params.max_iterations {
        used = it + 1;
        let mut changed = step(&mut state, params, &mut tables, it);
        if crossings::move_crossings_in(&mut state, Some(&mut tables)) {
            changed = true;
        }
        if used % interval == 0 {
            debug_assert_eq!(DeviationTables::compute(&state, stats), tables, "incremental tables drifted");
            // pruned arm pieces are not tracked incrementally
            if remove_redundant_crossings(&mut state, params) {
                changed = true;
                tables = DeviationTables::compute(&state, stats);
            }
            debug_assert!(validate_topology(&state, state.origin()).ok());
        }
        if frames_every > 0 && used % frames_every == 0 {
            frame(used, &state);
        }
        if changed {
            quiet = 0;
        } else {
            quiet += 1;
            if quiet >= params.stop_patience {
                break;
            }
        }
    }
    RunResult {
        state,
        iterations_used: used,
    }
}

pub fn run(cs: &CellState, stats: &SegmentStats, params: &AutomatonParams) -> RunResult {
    run_with_frames(cs, stats, params, 0, |_, _| {})
}
