//! Left-right planarity test with embedding construction.
//!
//! Follows the de Fraysseix-Rosenstiehl left-right criterion in the
//! formulation of Brandes ("The Left-Right Planarity Test"). On success the
//! result is a rotation system: for every vertex, its neighbors in cyclic
//! order around it.

use std::collections::HashMap;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    const EMPTY: Interval = Interval {
        low: NONE,
        high: NONE,
    };

    fn is_empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Debug, Clone, Copy)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState<'a> {
    adj: &'a [Vec<usize>],
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    // oriented edges
    edges: Vec<(usize, usize)>,
    edge_id: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    ordered: Vec<Vec<usize>>,
    refs: Vec<usize>,
    side: Vec<i64>,
    lowpt_edge: Vec<usize>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
    left_ref: Vec<usize>,
    right_ref: Vec<usize>,
}

/// Cyclic neighbor lists stored as a linked ring per vertex.
struct RingEmbedding {
    cw: HashMap<(usize, usize), usize>,
    ccw: HashMap<(usize, usize), usize>,
    first: Vec<usize>,
}

impl RingEmbedding {
    fn new(n: usize) -> Self {
        RingEmbedding {
            cw: HashMap::new(),
            ccw: HashMap::new(),
            first: vec![NONE; n],
        }
    }

    fn add_cw(&mut self, v: usize, w: usize, reference: usize) {
        if reference == NONE {
            self.cw.insert((v, w), w);
            self.ccw.insert((v, w), w);
            self.first[v] = w;
            return;
        }
        let after = self.cw[&(v, reference)];
        self.cw.insert((v, reference), w);
        self.cw.insert((v, w), after);
        self.ccw.insert((v, after), w);
        self.ccw.insert((v, w), reference);
    }

    fn add_ccw(&mut self, v: usize, w: usize, reference: usize) {
        if reference == NONE {
            self.add_cw(v, w, NONE);
            return;
        }
        let before = self.ccw[&(v, reference)];
        self.add_cw(v, w, before);
        if self.first[v] == reference {
            self.first[v] = w;
        }
    }

    fn add_first(&mut self, v: usize, w: usize) {
        let reference = self.first[v];
        self.add_ccw(v, w, reference);
    }

    fn rotation(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let start = self.first[v];
        if start == NONE {
            return out;
        }
        let mut cur = start;
        loop {
            out.push(cur);
            cur = self.cw[&(v, cur)];
            if cur == start {
                break;
            }
        }
        out
    }
}

impl<'a> LrState<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        LrState {
            adj,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            edges: Vec::new(),
            edge_id: HashMap::new(),
            out: vec![Vec::new(); n],
            lowpt: Vec::new(),
            lowpt2: Vec::new(),
            nesting_depth: Vec::new(),
            ordered: vec![Vec::new(); n],
            refs: Vec::new(),
            side: Vec::new(),
            lowpt_edge: Vec::new(),
            stack_bottom: Vec::new(),
            stack: Vec::new(),
            left_ref: vec![NONE; n],
            right_ref: vec![NONE; n],
        }
    }

    fn eid(&self, v: usize, w: usize) -> usize {
        self.edge_id[&(v, w)]
    }

    fn orient(&mut self, v: usize) {
        let e = self.parent_edge[v];
        for idx in 0..self.adj[v].len() {
            let w = self.adj[v][idx];
            if self.edge_id.contains_key(&(v, w)) || self.edge_id.contains_key(&(w, v)) {
                continue;
            }
            let vw = self.edges.len();
            self.edges.push((v, w));
            self.edge_id.insert((v, w), vw);
            self.out[v].push(w);
            self.lowpt.push(self.height[v]);
            self.lowpt2.push(self.height[v]);
            self.nesting_depth.push(0);
            if self.height[w] == NONE {
                self.parent_edge[w] = vw;
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }
            self.nesting_depth[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                self.nesting_depth[vw] += 1;
            }
            if e != NONE {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, iv: &Interval, b: usize) -> bool {
        !iv.is_empty() && self.lowpt[iv.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low];
        }
        self.lowpt[p.left.low].min(self.lowpt[p.right.low])
    }

    fn test(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let ordered = self.ordered[v].clone();
        for (i, &w) in ordered.iter().enumerate() {
            let ei = self.eid(v, w);
            self.stack_bottom[ei] = self.stack.len();
            if ei == self.parent_edge[w] {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                self.stack.push(ConflictPair {
                    left: Interval::EMPTY,
                    right: Interval { low: ei, high: ei },
                });
            }
            if self.lowpt[ei] < self.height[v] {
                if i == 0 {
                    if e != NONE {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    }
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair {
            left: Interval::EMPTY,
            right: Interval::EMPTY,
        };
        loop {
            let Some(mut q) = self.stack.pop() else {
                return false;
            };
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.refs[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.refs[q.right.low] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            self.refs[p.right.low] = q.right.high;
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.refs[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.edges[e].0;
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if p.left.low != NONE {
                self.side[p.left.low] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while p.left.high != NONE && self.edges[p.left.high].1 == u {
                p.left.high = self.refs[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.refs[p.left.low] = p.right.low;
                self.side[p.left.low] = -1;
                p.left.low = NONE;
            }
            while p.right.high != NONE && self.edges[p.right.high].1 == u {
                p.right.high = self.refs[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.refs[p.right.low] = p.left.low;
                self.side[p.right.low] = -1;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            if let Some(top) = self.stack.last() {
                let hl = top.left.high;
                let hr = top.right.high;
                self.refs[e] = if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                    hl
                } else {
                    hr
                };
            }
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        // iterative form of the recursive sign resolution
        let mut chain = vec![e];
        while self.refs[*chain.last().unwrap()] != NONE {
            let next = self.refs[*chain.last().unwrap()];
            chain.push(next);
        }
        for i in (0..chain.len() - 1).rev() {
            let cur = chain[i];
            let next = chain[i + 1];
            self.side[cur] *= self.side[next];
            self.refs[cur] = NONE;
        }
        self.side[e]
    }

    fn embed(&mut self, v: usize, emb: &mut RingEmbedding) {
        let ordered = self.ordered[v].clone();
        for w in ordered {
            let ei = self.eid(v, w);
            if ei == self.parent_edge[w] {
                emb.add_first(w, v);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.embed(w, emb);
            } else if self.side[ei] == 1 {
                emb.add_cw(w, v, self.right_ref[w]);
            } else {
                emb.add_ccw(w, v, self.left_ref[w]);
                self.left_ref[w] = v;
            }
        }
    }
}

/// Tests planarity of the simple undirected graph given by adjacency lists.
/// Returns a rotation system on success.
pub fn planar_embedding(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let m: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    if n > 2 && m > 3 * n - 6 {
        return None;
    }
    let mut st = LrState::new(adj);
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v] == NONE {
            st.height[v] = 0;
            roots.push(v);
            st.orient(v);
        }
    }
    let ne = st.edges.len();
    st.refs = vec![NONE; ne];
    st.side = vec![1; ne];
    st.lowpt_edge = vec![NONE; ne];
    st.stack_bottom = vec![0; ne];
    for v in 0..n {
        let mut ws = st.out[v].clone();
        ws.sort_by_key(|&w| st.nesting_depth[st.eid(v, w)]);
        st.ordered[v] = ws;
    }
    for &r in &roots {
        if !st.test(r) {
            return None;
        }
    }
    for e in 0..ne {
        let s = st.sign(e);
        st.nesting_depth[e] *= s;
    }
    let mut emb = RingEmbedding::new(n);
    for v in 0..n {
        let mut ws = st.out[v].clone();
        ws.sort_by_key(|&w| st.nesting_depth[st.eid(v, w)]);
        let mut prev = NONE;
        for &w in &ws {
            emb.add_cw(v, w, prev);
            prev = w;
        }
        st.ordered[v] = ws;
    }
    for &r in &roots {
        st.embed(r, &mut emb);
    }
    Some((0..n).map(|v| emb.rotation(v)).collect())
}

pub fn is_planar(adj: &[Vec<usize>]) -> bool {
    planar_embedding(adj).is_some()
}
