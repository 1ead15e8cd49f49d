use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::embedding::Rotation;
use super::planarity::{is_planar, planar_embedding};
use crate::graph::SegGraph;
use crate::grid::{pair, Pair};

/// A degree-4 crossing vertex subdividing two original edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dummy {
    pub vertex: usize,
    /// Indices into `SegGraph::edges` of the two crossing edges.
    pub edges: [usize; 2],
}

/// The segmentation graph with crossings replaced by dummy vertices and a
/// planar rotation system on the result.
#[derive(Debug, Clone)]
pub struct PlanarizedGraph {
    pub base: SegGraph,
    pub rotation: Rotation,
    pub dummies: Vec<Dummy>,
    /// Original edge index of every planarized edge piece.
    pub piece_of: BTreeMap<Pair, usize>,
    /// Dart `border -> y` whose left face is the external face.
    pub external: Option<(usize, usize)>,
}

impl PlanarizedGraph {
    pub fn num_vertices(&self) -> usize {
        self.rotation.num_vertices()
    }

    pub fn is_dummy(&self, v: usize) -> bool {
        v >= self.base.num_vertices()
    }

    pub fn border(&self) -> usize {
        self.base.border()
    }

    /// Id of the external face in `self.rotation.faces()`.
    pub fn external_face(&self) -> Option<usize> {
        let d = self.external?;
        self.rotation.faces().dart_face.get(&d).copied()
    }

    /// Planarized edges in original-edge order, each as the vertex chain
    /// from the original edge's first endpoint to its second.
    pub fn chain(&self, edge: usize) -> Vec<usize> {
        let e = self.base.edges()[edge];
        let mut chain = vec![e.a];
        let mut prev = usize::MAX;
        let mut cur = e.a;
        while cur != e.b {
            let next = self
                .rotation
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&w| w != prev && self.piece_of.get(&pair(cur, w)) == Some(&edge))
                .expect("broken edge chain");
            prev = cur;
            cur = next;
            chain.push(cur);
        }
        chain
    }
}

fn adjacency(n: usize, edges: &[Pair]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Planarizes `graph`: a maximal planar subgraph is grown by adding edges in
/// descending weight order, then every rejected edge is routed along a
/// shortest path in the dual graph with a dummy vertex per crossed edge.
pub fn planarize(graph: &SegGraph) -> PlanarizedGraph {
    let n = graph.num_vertices();
    let mut order: Vec<usize> = (0..graph.edges().len()).collect();
    order.sort_by(|&i, &j| {
        let (ei, ej) = (graph.edges()[i], graph.edges()[j]);
        ej.weight.cmp(&ei.weight).then((ei.a, ei.b).cmp(&(ej.a, ej.b)))
    });

    let mut accepted: Vec<Pair> = Vec::new();
    let mut rejected = Vec::new();
    for &i in &order {
        let e = graph.edges()[i];
        accepted.push((e.a, e.b));
        if !is_planar(&adjacency(n, &accepted)) {
            accepted.pop();
            rejected.push(i);
        }
    }
    let rot = planar_embedding(&adjacency(n, &accepted)).expect("accepted subgraph is planar");
    let mut pg = PlanarizedGraph {
        base: graph.clone(),
        rotation: Rotation::new(rot),
        dummies: Vec::new(),
        piece_of: accepted
            .iter()
            .map(|&(a, b)| (pair(a, b), graph.edge_index(a, b).unwrap()))
            .collect(),
        external: None,
    };
    for i in rejected {
        insert_edge(&mut pg, i);
    }
    pg
}

/// Routes original edge `edge` through the current embedding, crossing as
/// few edges as possible.
fn insert_edge(pg: &mut PlanarizedGraph, edge: usize) {
    let e = pg.base.edges()[edge];
    let (u, v) = (e.a, e.b);
    let faces = pg.rotation.faces();
    let nf = faces.faces.len();
    let incident = |x: usize| -> Vec<usize> {
        let mut fs: Vec<usize> = pg
            .rotation
            .neighbors(x)
            .iter()
            .map(|&w| faces.dart_face[&(x, w)])
            .collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    };
    let sources = incident(u);
    let targets = incident(v);

    // BFS over faces; parent stores (previous face, crossed dart in it)
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; nf];
    let mut seen = vec![false; nf];
    let mut queue = VecDeque::new();
    for &f in &sources {
        seen[f] = true;
        queue.push_back(f);
    }
    let mut end = None;
    while let Some(f) = queue.pop_front() {
        if targets.contains(&f) {
            end = Some(f);
            break;
        }
        let mut next: Vec<(usize, (usize, usize))> = faces.faces[f]
            .iter()
            .map(|&(a, b)| (faces.dart_face[&(b, a)], (a, b)))
            .filter(|&(g, _)| g != f)
            .collect();
        next.sort_by_key(|&(g, _)| g);
        for (g, dart) in next {
            if !seen[g] {
                seen[g] = true;
                parent[g] = Some((f, dart));
                queue.push_back(g);
            }
        }
    }
    let end = end.expect("dual graph of a connected embedding is connected");
    let mut path = vec![end];
    let mut crossed = Vec::new();
    let mut cur = end;
    while let Some((f, dart)) = parent[cur] {
        crossed.push(dart);
        path.push(f);
        cur = f;
    }
    path.reverse();
    crossed.reverse();

    let corner_in = |face: usize, x: usize| -> usize {
        faces.faces[face]
            .iter()
            .find(|&&(_, b)| b == x)
            .map(|&(a, _)| a)
            .expect("vertex lies on face")
    };
    let u_after = corner_in(path[0], u);
    let v_after = corner_in(*path.last().unwrap(), v);

    let mut prev = u;
    let mut prev_dummy_rot: Option<usize> = None;
    for &(a, b) in &crossed {
        let d = pg.rotation.add_vertex();
        let crossed_edge = pg.piece_of.remove(&pair(a, b)).expect("crossed piece");
        pg.rotation.replace_neighbor(a, b, d);
        pg.rotation.replace_neighbor(b, a, d);
        // next neighbor is patched once known
        pg.rotation.set_rotation(d, vec![a, prev, b, usize::MAX]);
        pg.piece_of.insert(pair(a, d), crossed_edge);
        pg.piece_of.insert(pair(d, b), crossed_edge);
        pg.piece_of.insert(pair(prev, d), edge);
        match prev_dummy_rot {
            None => pg.rotation.insert_after(u, Some(u_after), d),
            Some(pd) => pg.rotation.replace_neighbor(pd, usize::MAX, d),
        }
        pg.dummies.push(Dummy {
            vertex: d,
            edges: [crossed_edge, edge],
        });
        prev = d;
        prev_dummy_rot = Some(d);
    }
    match prev_dummy_rot {
        None => pg.rotation.insert_after(u, Some(u_after), v),
        Some(pd) => pg.rotation.replace_neighbor(pd, usize::MAX, v),
    }
    pg.rotation.insert_after(v, Some(v_after), prev);
    pg.piece_of.insert(pair(prev, v), edge);
}

/// One candidate per corner at the border vertex, i.e. per face incident to
/// it counted with multiplicity.
pub fn choose_external_face(pg: &PlanarizedGraph) -> Vec<PlanarizedGraph> {
    let b = pg.border();
    pg.rotation
        .neighbors(b)
        .iter()
        .map(|&y| {
            let mut c = pg.clone();
            c.external = Some((b, y));
            c
        })
        .collect()
}
