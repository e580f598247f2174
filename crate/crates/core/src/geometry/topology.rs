//! Combinatorial helpers over indexed triangle lists.

use std::collections::BTreeMap;

use super::mesh::SeamLine;

pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected edge -> incident triangles.
pub fn edge_triangles(triangles: &[[usize; 3]]) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            map.entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_default()
                .push(t);
        }
    }
    map
}

pub fn vertex_triangles(vertex_count: usize, triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); vertex_count];
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            out[v].push(t);
        }
    }
    out
}

/// Directed boundary half-edges (a -> b as they appear in their triangle).
pub fn boundary_half_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let edges = edge_triangles(triangles);
    let mut out = Vec::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if edges[&edge_key(a, b)] == [t] {
                out.push((a, b));
            }
        }
    }
    out
}

/// Boundary loops, each following the triangles' orientation and starting at
/// its smallest vertex index. Loops are ordered by that start vertex.
pub fn boundary_loops(triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, b) in boundary_half_edges(triangles) {
        next.entry(a).or_default().push(b);
    }
    let mut loops = Vec::new();
    while let Some((&start, _)) = next.iter().find(|(_, v)| !v.is_empty()) {
        let mut lp = vec![start];
        let mut cur = start;
        loop {
            let Some(succ) = next.get_mut(&cur).and_then(|v| v.pop()) else {
                break;
            };
            if succ == start {
                break;
            }
            lp.push(succ);
            cur = succ;
        }
        loops.push(lp);
    }
    for lp in &mut loops {
        let pos = lp
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        lp.rotate_left(pos);
    }
    loops.sort_by_key(|lp| lp[0]);
    loops
}

/// Edge-connected components of a triangle list, each sorted, ordered by
/// smallest triangle index.
pub fn triangle_components(triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let edges = edge_triangles(triangles);
    let mut comp = vec![usize::MAX; triangles.len()];
    let mut out = Vec::new();
    for seed in 0..triangles.len() {
        if comp[seed] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![seed];
        comp[seed] = id;
        let mut stack = vec![seed];
        while let Some(t) = stack.pop() {
            let tri = triangles[t];
            for k in 0..3 {
                for &n in &edges[&edge_key(tri[k], tri[(k + 1) % 3])] {
                    if comp[n] == usize::MAX {
                        comp[n] = id;
                        members.push(n);
                        stack.push(n);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Vertices glued together by seams (union-find over seam pairs).
#[derive(Debug, Clone)]
pub struct GlueMap {
    parent: Vec<usize>,
}

impl GlueMap {
    pub fn new(vertex_count: usize, seams: &[SeamLine]) -> Self {
        let mut g = Self {
            parent: (0..vertex_count).collect(),
        };
        for seam in seams {
            for (a, b) in seam.pairs() {
                if a < vertex_count && b < vertex_count {
                    g.union(a, b);
                }
            }
        }
        g
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smallest index becomes the representative
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub fn rep(&self, v: usize) -> usize {
        self.find(v)
    }

    pub fn glued(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Representative -> sorted members, for every glued class with more
    /// than one member.
    pub fn classes(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.parent.len() {
            let r = self.find(v);
            if r != v {
                map.entry(r).or_insert_with(|| vec![r]).push(v);
            }
        }
        map
    }

    /// All vertices glued to `v` (including `v`), sorted.
    pub fn members(&self, v: usize) -> Vec<usize> {
        let r = self.find(v);
        let mut out: Vec<usize> = (0..self.parent.len())
            .filter(|&u| self.find(u) == r)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<[usize; 3]> {
        // 3 - 2
        // | / |
        // 0 - 1
        vec![[0, 1, 2], [0, 2, 3]]
    }

    #[test]
    fn square_boundary_loop() {
        assert_eq!(boundary_loops(&square()), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn components_split_on_vertex_contact() {
        // two triangles sharing only vertex 2 are separate components
        let tris = vec![[0, 1, 2], [2, 3, 4]];
        assert_eq!(triangle_components(&tris), vec![vec![0], vec![1]]);
    }

    #[test]
    fn glue_classes() {
        let seams = vec![SeamLine {
            side_a: vec![0, 3],
            side_b: vec![5, 7],
        }];
        let g = GlueMap::new(8, &seams);
        assert!(g.glued(5, 0));
        assert_eq!(g.members(7), vec![3, 7]);
        assert!(!g.glued(0, 3));
    }
}
