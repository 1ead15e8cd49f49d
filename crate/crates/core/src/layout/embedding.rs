use std::collections::HashMap;

/// A combinatorial embedding stored as a rotation system. The face to the
/// left of dart `u -> v` continues with `v -> succ_v(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    rot: Vec<Vec<usize>>,
}

/// Faces of a rotation system, each as the cyclic sequence of its darts.
#[derive(Debug, Clone)]
pub struct Faces {
    pub faces: Vec<Vec<(usize, usize)>>,
    pub dart_face: HashMap<(usize, usize), usize>,
}

impl Rotation {
    pub fn new(rot: Vec<Vec<usize>>) -> Self {
        Rotation { rot }
    }

    pub fn num_vertices(&self) -> usize {
        self.rot.len()
    }

    pub fn num_edges(&self) -> usize {
        self.rot.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn add_vertex(&mut self) -> usize {
        self.rot.push(Vec::new());
        self.rot.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rot[a].contains(&b)
    }

    fn position(&self, v: usize, w: usize) -> usize {
        self.rot[v]
            .iter()
            .position(|&x| x == w)
            .unwrap_or_else(|| panic!("{w} is not a neighbor of {v}"))
    }

    pub fn succ(&self, v: usize, w: usize) -> usize {
        let list = &self.rot[v];
        list[(self.position(v, w) + 1) % list.len()]
    }

    pub fn pred(&self, v: usize, w: usize) -> usize {
        let list = &self.rot[v];
        list[(self.position(v, w) + list.len() - 1) % list.len()]
    }

    pub fn next_dart(&self, (u, v): (usize, usize)) -> (usize, usize) {
        (v, self.succ(v, u))
    }

    /// Inserts `w` into the rotation of `v` immediately after `after`
    /// (or as the only neighbor if `after` is `None`).
    pub fn insert_after(&mut self, v: usize, after: Option<usize>, w: usize) {
        match after {
            None => self.rot[v].push(w),
            Some(a) => {
                let p = self.position(v, a);
                self.rot[v].insert(p + 1, w);
            }
        }
    }

    pub fn replace_neighbor(&mut self, v: usize, old: usize, new: usize) {
        let p = self.position(v, old);
        self.rot[v][p] = new;
    }

    pub fn set_rotation(&mut self, v: usize, list: Vec<usize>) {
        self.rot[v] = list;
    }

    pub fn faces(&self) -> Faces {
        let mut dart_face = HashMap::new();
        let mut faces = Vec::new();
        for u in 0..self.rot.len() {
            for &v in &self.rot[u] {
                if dart_face.contains_key(&(u, v)) {
                    continue;
                }
                let id = faces.len();
                let mut face = Vec::new();
                let mut d = (u, v);
                while !dart_face.contains_key(&d) {
                    dart_face.insert(d, id);
                    face.push(d);
                    d = self.next_dart(d);
                }
                faces.push(face);
            }
        }
        Faces { faces, dart_face }
    }

    pub fn num_components(&self) -> usize {
        let n = self.rot.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.rot[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Euler's formula, summed over components, holds iff the rotation
    /// system is a planar embedding.
    pub fn is_planar_embedding(&self) -> bool {
        let v = self.rot.len() as i64;
        let e = self.num_edges() as i64;
        let f = self.faces().faces.len() as i64;
        let isolated = self.rot.iter().filter(|r| r.is_empty()).count() as i64;
        // each component with edges traces its own outer face; isolated
        // vertices trace none
        v - e + f == 2 * self.num_components() as i64 - isolated
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rot.clone()
    }
}
