//! Orthogonal drawing via a visibility representation: every vertex becomes a
//! horizontal bar at its st-number level, every edge a vertical segment at the
//! column of its left face. Crossing dummies are replaced by small gadgets so
//! that the two crossing edges meet in exactly one point.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::embedding::Rotation;
use super::planarize::PlanarizedGraph;
use crate::error::{Error, Result};
use crate::grid::{pair, Pair};

/// Spacing between consecutive levels and columns, in drawing units.
pub const SPACING: i64 = 4;

pub type Point = (i64, i64);

/// Closed axis-aligned rectangle in drawing units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn contains(&self, (x, y): Point) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub point: Point,
    /// Original edge indices.
    pub edges: [usize; 2],
}

/// Drawing in integer units, y pointing up. Row 0 is the outer border of the
/// drawing area; the border vertex itself has no box and its edges end on
/// row 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthoDrawing {
    pub border: usize,
    pub vertex_boxes: BTreeMap<usize, Rect>,
    /// Per original edge, polyline from `edge.a` to `edge.b`.
    pub edge_paths: Vec<Vec<Point>>,
    pub crossings: Vec<Crossing>,
    /// Endpoints of each original edge, as in the graph.
    pub endpoints: Vec<(usize, usize)>,
}

impl OrthoDrawing {
    pub fn width(&self) -> i64 {
        let boxes = self.vertex_boxes.values().map(|r| r.x1);
        let paths = self.edge_paths.iter().flatten().map(|p| p.0);
        boxes.chain(paths).max().unwrap_or(0)
    }

    pub fn height(&self) -> i64 {
        let boxes = self.vertex_boxes.values().map(|r| r.y1);
        let paths = self.edge_paths.iter().flatten().map(|p| p.1);
        boxes.chain(paths).max().unwrap_or(0)
    }

    /// Unit points of an edge path, endpoints' boxes excluded.
    pub fn unit_points(&self, edge: usize) -> Vec<Point> {
        let (a, b) = self.endpoints[edge];
        let path = &self.edge_paths[edge];
        let mut out = Vec::new();
        let mut push = |p: Point| {
            let inside = |v: usize| self.vertex_boxes.get(&v).is_some_and(|r| r.contains(p));
            if !inside(a) && !inside(b) && out.last() != Some(&p) {
                out.push(p);
            }
        };
        for w in path.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (dx, dy) = ((q.0 - p.0).signum(), (q.1 - p.1).signum());
            let mut c = p;
            push(c);
            while c != q {
                c = (c.0 + dx, c.1 + dy);
                push(c);
            }
        }
        if path.len() == 1 {
            push(path[0]);
        }
        out
    }

    /// Checks the drawing invariants: boxes disjoint, axis-aligned paths that
    /// start and end on their endpoints' boxes, no contact between paths other
    /// than the recorded crossings, no path through a foreign box.
    pub fn validate(&self) -> Result<()> {
        let boxes: Vec<(&usize, &Rect)> = self.vertex_boxes.iter().collect();
        for (i, (u, r)) in boxes.iter().enumerate() {
            for (v, s) in &boxes[i + 1..] {
                if r.x0 <= s.x1 && s.x0 <= r.x1 && r.y0 <= s.y1 && s.y0 <= r.y1 {
                    return Err(Error::Layout(format!("boxes of {u} and {v} overlap")));
                }
            }
        }
        let crossing_at: HashMap<Point, [usize; 2]> =
            self.crossings.iter().map(|c| (c.point, c.edges)).collect();
        let mut owner: HashMap<Point, usize> = HashMap::new();
        for (e, path) in self.edge_paths.iter().enumerate() {
            let (a, b) = self.endpoints[e];
            for w in path.windows(2) {
                if w[0].0 != w[1].0 && w[0].1 != w[1].1 {
                    return Err(Error::Layout(format!("edge {e} has a diagonal step")));
                }
            }
            let on = |v: usize, p: Point| match self.vertex_boxes.get(&v) {
                Some(r) => r.contains(p),
                None => p.1 == 0,
            };
            if !on(a, path[0]) || !on(b, *path.last().unwrap()) {
                return Err(Error::Layout(format!("edge {e} misses its endpoints")));
            }
            let pts = self.unit_points(e);
            let mut own = HashSet::new();
            for &p in &pts {
                if !own.insert(p) {
                    return Err(Error::Layout(format!("edge {e} overlaps itself")));
                }
                for (&v, r) in &self.vertex_boxes {
                    if v != a && v != b && r.contains(p) {
                        return Err(Error::Layout(format!("edge {e} runs through box {v}")));
                    }
                }
                if let Some(&other) = owner.get(&p) {
                    let ok = crossing_at
                        .get(&p)
                        .is_some_and(|c| c.contains(&e) && c.contains(&other));
                    if !ok {
                        return Err(Error::Layout(format!("edges {other} and {e} touch")));
                    }
                } else {
                    owner.insert(p, e);
                }
            }
        }
        Ok(())
    }
}

pub fn count_crossings(d: &OrthoDrawing) -> usize {
    d.crossings.len()
}

fn connected_without(rot: &Rotation, removed: usize, a: usize, b: usize) -> bool {
    let mut seen = vec![false; rot.num_vertices()];
    seen[removed] = true;
    seen[a] = true;
    let mut stack = vec![a];
    while let Some(v) = stack.pop() {
        if v == b {
            return true;
        }
        for &w in rot.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Adds edges inside faces until the embedded graph is biconnected. At a cut
/// vertex, two rotation-consecutive neighbors from different blocks are
/// joined through the face they share, which keeps the embedding planar.
fn biconnect(rot: &mut Rotation) -> HashSet<Pair> {
    let mut added = HashSet::new();
    'outer: loop {
        for v in 0..rot.num_vertices() {
            if rot.degree(v) < 2 {
                continue;
            }
            for a in rot.neighbors(v).to_vec() {
                let b = rot.succ(v, a);
                if a == b || connected_without(rot, v, a, b) {
                    continue;
                }
                let before_v = rot.pred(a, v);
                rot.insert_after(a, Some(before_v), b);
                rot.insert_after(b, Some(v), a);
                added.insert(pair(a, b));
                continue 'outer;
            }
        }
        return added;
    }
}

/// st-numbering of a biconnected graph containing edge s–t.
fn st_numbering(rot: &Rotation, s: usize, t: usize) -> Result<Vec<usize>> {
    let n = rot.num_vertices();
    let mut pre = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    pre[s] = 0;
    order.push(s);
    // iterative DFS with t forced as the first child of s
    let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
    let mut first = true;
    let mut low = vec![usize::MAX; n];
    low[s] = s;
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let w = if first {
            first = false;
            Some(t)
        } else if *i < rot.degree(v) {
            *i += 1;
            Some(rot.neighbors(v)[*i - 1])
        } else {
            None
        };
        match w {
            Some(w) if pre[w] == usize::MAX => {
                pre[w] = order.len();
                order.push(w);
                parent[w] = v;
                low[w] = w;
                stack.push((w, 0));
            }
            Some(w) => {
                if w != parent[v] && pre[w] < pre[low[v]] {
                    low[v] = w;
                }
            }
            None => {
                stack.pop();
                let p = parent[v];
                if p != usize::MAX && pre[low[v]] < pre[low[p]] {
                    low[p] = low[v];
                }
            }
        }
    }
    if order.len() != n {
        return Err(Error::Layout("graph is not connected".into()));
    }
    // linked list insertion
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];
    next[s] = t;
    prev[t] = s;
    let mut minus = vec![false; n];
    minus[s] = true;
    for &v in &order[2..] {
        let p = parent[v];
        if minus[low[v]] {
            let q = prev[p];
            prev[v] = q;
            next[v] = p;
            prev[p] = v;
            if q != usize::MAX {
                next[q] = v;
            }
            minus[p] = false;
        } else {
            let q = next[p];
            next[v] = q;
            prev[v] = p;
            next[p] = v;
            if q != usize::MAX {
                prev[q] = v;
            }
            minus[p] = true;
        }
    }
    let mut head = t;
    while prev[head] != usize::MAX {
        head = prev[head];
    }
    let mut st = vec![0; n];
    let mut cur = head;
    let mut k = 0;
    while cur != usize::MAX {
        st[cur] = k;
        k += 1;
        cur = next[cur];
    }
    if st[s] != 0 || st[t] != n - 1 {
        return Err(Error::Layout("st-numbering lost its poles".into()));
    }
    for v in 0..n {
        if v == s || v == t {
            continue;
        }
        let lower = rot.neighbors(v).iter().any(|&w| st[w] < st[v]);
        let higher = rot.neighbors(v).iter().any(|&w| st[w] > st[v]);
        if !(lower && higher) {
            return Err(Error::Layout(format!("vertex {v} breaks the st property")));
        }
    }
    Ok(st)
}

struct Piece {
    neighbor: usize,
    edge: usize,
    below: bool,
    col: i64,
}

/// Route of one original edge through a crossing, from the piece towards
/// `from` to the other piece.
struct Route {
    from: usize,
    points: Vec<Point>,
}

fn gadget(d: usize, yd: i64, pieces: &[Piece]) -> Result<(Point, Vec<(usize, Route)>)> {
    let fail = || {
        let desc: Vec<_> = pieces
            .iter()
            .map(|p| (p.neighbor, p.edge, p.below, p.col))
            .collect();
        Error::Layout(format!("no crossing gadget fits at dummy {d}: {desc:?}"))
    };
    if pieces.len() != 4 {
        return Err(fail());
    }
    let e0 = pieces[0].edge;
    let (p0, p1): (Vec<&Piece>, Vec<&Piece>) = pieces.iter().partition(|p| p.edge == e0);
    if p0.len() != 2 || p1.len() != 2 {
        return Err(fail());
    }
    let groups = [p0, p1];
    // an edge with both pieces on one side runs along the dummy's level
    for (hi, h) in groups.iter().enumerate() {
        if h[0].below != h[1].below {
            continue;
        }
        let v = &groups[1 - hi];
        let (l, r) = if h[0].col < h[1].col { (h[0], h[1]) } else { (h[1], h[0]) };
        let inside = |p: &Piece| l.col < p.col && p.col < r.col;
        let (near, far) = if v[0].below != v[1].below {
            // the piece on the edge's side must pass between its two pieces
            if v[0].below == h[0].below { (v[0], v[1]) } else { (v[1], v[0]) }
        } else if v[0].below != h[0].below {
            return Err(fail());
        } else if inside(v[0]) && !inside(v[1]) {
            (v[0], v[1])
        } else {
            (v[1], v[0])
        };
        if !inside(near) || (far.below == near.below && inside(far)) {
            continue;
        }
        let jog = if h[0].below { yd + 1 } else { yd - 1 };
        let h_route = Route {
            from: l.neighbor,
            points: vec![(l.col, yd), (r.col, yd)],
        };
        let v_route = Route {
            from: near.neighbor,
            points: vec![(near.col, jog), (far.col, jog)],
        };
        return Ok((
            (near.col, yd),
            vec![(l.edge, h_route), (near.edge, v_route)],
        ));
    }
    if groups.iter().any(|g| g[0].below == g[1].below) {
        return Err(fail());
    }
    let within = |x: i64, a: i64, b: i64| a.min(b) <= x && x <= a.max(b);
    for hi in 0..2 {
        let h = &groups[hi];
        let v = &groups[1 - hi];
        let (hb, ht) = if h[0].below { (h[0], h[1]) } else { (h[1], h[0]) };
        let (vb, vt) = if v[0].below { (v[0], v[1]) } else { (v[1], v[0]) };
        let x = hb.col + 2 * (ht.col - hb.col).signum();
        if x == hb.col || within(hb.col, vb.col, x) || within(ht.col, vt.col, x) {
            continue;
        }
        let h_route = Route {
            from: hb.neighbor,
            points: vec![(hb.col, yd), (ht.col, yd)],
        };
        let v_route = Route {
            from: vb.neighbor,
            points: vec![(vb.col, yd - 1), (x, yd - 1), (x, yd + 1), (vt.col, yd + 1)],
        };
        return Ok(((x, yd), vec![(hb.edge, h_route), (vb.edge, v_route)]));
    }
    Err(fail())
}

fn simplify(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last() == Some(&p) {
            continue;
        }
        if out.len() >= 2 {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            if (a.0 == b.0 && b.0 == p.0) || (a.1 == b.1 && b.1 == p.1) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// Draws an embedded planarized graph whose external face has been chosen.
pub fn orthogonal_draw(pg: &PlanarizedGraph) -> Result<OrthoDrawing> {
    let (s, y) = pg
        .external
        .ok_or_else(|| Error::Layout("no external face chosen".into()))?;
    let mut rot = pg.rotation.clone();
    biconnect(&mut rot);
    let t = y;
    let st = st_numbering(&rot, s, t)?;
    let faces = rot.faces();
    let ext = faces.dart_face[&(s, y)];
    let nf = faces.faces.len();
    let sink = nf;

    // dual DAG: left face -> right face of every st-oriented edge
    let mut arcs: Vec<Vec<usize>> = vec![Vec::new(); nf + 1];
    let mut indeg = vec![0usize; nf + 1];
    let mut left = HashMap::new();
    for u in 0..rot.num_vertices() {
        for &v in rot.neighbors(u) {
            if st[u] >= st[v] {
                continue;
            }
            let l = faces.dart_face[&(u, v)];
            let r = faces.dart_face[&(v, u)];
            let r = if r == ext { sink } else { r };
            arcs[l].push(r);
            indeg[r] += 1;
            left.insert(pair(u, v), l);
        }
    }
    let mut x = vec![0i64; nf + 1];
    let mut queue: VecDeque<usize> = (0..=nf).filter(|&f| indeg[f] == 0).collect();
    let mut done = 0;
    while let Some(f) = queue.pop_front() {
        done += 1;
        for &g in &arcs[f] {
            x[g] = x[g].max(x[f] + 1);
            indeg[g] -= 1;
            if indeg[g] == 0 {
                queue.push_back(g);
            }
        }
    }
    if done != nf + 1 {
        return Err(Error::Layout("dual graph has a cycle".into()));
    }
    let col = |u: usize, v: usize| SPACING * x[left[&pair(u, v)]];
    let level = |v: usize| SPACING * st[v] as i64;

    let real_pieces = |v: usize| -> Vec<Piece> {
        rot.neighbors(v)
            .iter()
            .filter_map(|&w| {
                pg.piece_of.get(&pair(v, w)).map(|&edge| Piece {
                    neighbor: w,
                    edge,
                    below: st[w] < st[v],
                    col: col(v, w),
                })
            })
            .collect()
    };

    let mut vertex_boxes = BTreeMap::new();
    for v in 0..pg.base.num_vertices() {
        if v == s {
            continue;
        }
        let cols: Vec<i64> = real_pieces(v).iter().map(|p| p.col).collect();
        let (lo, hi) = (*cols.iter().min().unwrap(), *cols.iter().max().unwrap());
        let y = level(v);
        vertex_boxes.insert(
            v,
            Rect {
                x0: lo - 1,
                y0: y - 1,
                x1: hi + 1,
                y1: y + 1,
            },
        );
    }

    let mut routes: HashMap<(usize, usize), Route> = HashMap::new();
    let mut crossings = Vec::new();
    for dummy in &pg.dummies {
        let d = dummy.vertex;
        let (point, rs) = gadget(d, level(d), &real_pieces(d))?;
        crossings.push(Crossing {
            point,
            edges: dummy.edges,
        });
        for (edge, r) in rs {
            routes.insert((d, edge), r);
        }
    }

    let mut edge_paths = Vec::with_capacity(pg.base.edges().len());
    let mut endpoints = Vec::new();
    for (i, e) in pg.base.edges().iter().enumerate() {
        let chain = pg.chain(i);
        let mut pts = vec![(col(chain[0], chain[1]), level(chain[0]))];
        for j in 1..chain.len() - 1 {
            let r = &routes[&(chain[j], i)];
            if r.from == chain[j - 1] {
                pts.extend(r.points.iter().copied());
            } else {
                pts.extend(r.points.iter().rev().copied());
            }
        }
        let m = chain.len() - 1;
        pts.push((col(chain[m - 1], chain[m]), level(chain[m])));
        edge_paths.push(simplify(pts));
        endpoints.push((e.a, e.b));
    }

    let drawing = OrthoDrawing {
        border: s,
        vertex_boxes,
        edge_paths,
        crossings,
        endpoints,
    };
    drawing.validate()?;
    Ok(drawing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge, SegGraph};
    use crate::grid::{compute_stats, generate_d1, generate_d2};
    use crate::layout::planarize::{choose_external_face, planarize};

    fn graph(n: usize, edges: &[(usize, usize)]) -> SegGraph {
        SegGraph::from_parts(
            n - 1,
            vec![1; n - 1],
            edges.iter().map(|&(a, b)| Edge { a, b, weight: 1 }).collect(),
        )
    }

    /// Cyclic order of drawn edges leaving each real box, compared with the
    /// rotation system restricted to real edges.
    fn assert_order_preserved(pg: &PlanarizedGraph, d: &OrthoDrawing) {
        let mut orientation = None;
        for (&v, r) in &d.vertex_boxes {
            let mut around = Vec::new();
            for (i, path) in d.edge_paths.iter().enumerate() {
                let (a, b) = d.endpoints[i];
                if a != v && b != v {
                    continue;
                }
                let p = if a == v { path[0] } else { *path.last().unwrap() };
                let q = if a == v { path[1] } else { path[path.len() - 2] };
                let up = q.1 > p.1;
                assert!(r.contains(p));
                // counterclockwise from east: top edges right to left, then
                // bottom edges left to right
                let key = if up { (0, -p.0) } else { (1, p.0) };
                around.push((key, i));
            }
            around.sort();
            let drawn: Vec<usize> = around.iter().map(|&(_, i)| i).collect();
            let rot: Vec<usize> = pg
                .rotation
                .neighbors(v)
                .iter()
                .map(|&w| pg.piece_of[&pair(v, w)])
                .collect();
            if drawn.len() < 3 {
                continue;
            }
            let matches = |seq: &[usize]| {
                (0..seq.len()).any(|k| {
                    let mut r = seq.to_vec();
                    r.rotate_left(k);
                    r == drawn
                })
            };
            let rev: Vec<usize> = rot.iter().rev().copied().collect();
            let this = if matches(&rot) {
                true
            } else {
                assert!(matches(&rev), "order broken at vertex {v}");
                false
            };
            assert_eq!(*orientation.get_or_insert(this), this);
        }
    }

    #[test]
    fn path_graph_draws_straight() {
        // A - B - C with C as the border
        let g = graph(3, &[(0, 1), (1, 2)]);
        let pg = planarize(&g);
        for c in choose_external_face(&pg) {
            let d = orthogonal_draw(&c).unwrap();
            assert_eq!(count_crossings(&d), 0);
            assert_eq!(d.vertex_boxes.len(), 2);
            for p in &d.edge_paths {
                assert_eq!(p.len(), 2);
                assert_eq!(p[0].0, p[1].0);
            }
        }
    }

    #[test]
    fn d2_candidates_draw_with_dummy_crossings() {
        let g = build_graph(&compute_stats(&generate_d2()));
        let pg = planarize(&g);
        for c in choose_external_face(&pg) {
            let d = orthogonal_draw(&c).unwrap();
            assert_eq!(count_crossings(&d), pg.dummies.len());
            assert_order_preserved(&c, &d);
        }
    }

    #[test]
    fn d1_candidates_draw() {
        for seed in 0..10 {
            let grid = if seed % 2 == 0 {
                generate_d1(&[50, 50], 5 + seed as usize, seed).unwrap()
            } else {
                generate_d1(&[20, 20, 20], 5 + seed as usize, seed).unwrap()
            };
            let g = build_graph(&compute_stats(&grid));
            let pg = planarize(&g);
            for c in choose_external_face(&pg) {
                let d = orthogonal_draw(&c).unwrap();
                assert_eq!(count_crossings(&d), pg.dummies.len());
                assert_order_preserved(&c, &d);
            }
        }
    }

    #[test]
    fn cut_vertices_are_handled() {
        // star with a pendant chain; border 5
        let g = graph(6, &[(0, 5), (1, 5), (2, 5), (2, 3), (3, 4)]);
        let pg = planarize(&g);
        for c in choose_external_face(&pg) {
            orthogonal_draw(&c).unwrap();
        }
    }

    #[test]
    fn st_numbering_has_st_property() {
        let g = build_graph(&compute_stats(&generate_d2()));
        let pg = planarize(&g);
        let mut rot = pg.rotation.clone();
        biconnect(&mut rot);
        let b = g.border();
        for &y in pg.rotation.neighbors(b) {
            let st = st_numbering(&rot, b, y).unwrap();
            let mut sorted = st.clone();
            sorted.sort();
            assert_eq!(sorted, (0..rot.num_vertices()).collect::<Vec<_>>());
        }
    }
}
