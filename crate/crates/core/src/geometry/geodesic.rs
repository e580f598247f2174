//! Shortest-path distances over the mesh edge graph.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use super::error::GeometryError;
use super::mesh::Mesh3;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances from `source` along mesh edges. Unreachable vertices
/// get `f64::INFINITY`.
pub fn geodesic_from_boundary(mesh: &Mesh3, source: &[usize]) -> Result<Vec<f64>, GeometryError> {
    geodesic_with_glue(mesh, source, &[])
}

/// Like [`geodesic_from_boundary`], with extra zero-length edges joining
/// seam-duplicated vertices.
pub fn geodesic_with_glue(
    mesh: &Mesh3,
    source: &[usize],
    glue: &[(usize, usize)],
) -> Result<Vec<f64>, GeometryError> {
    let n = mesh.vertices.len();
    if source.is_empty() {
        return Err(GeometryError::EmptySource);
    }
    if let Some(&bad) = source.iter().find(|&&s| s >= n) {
        return Err(GeometryError::InvalidIndex { index: bad, len: n });
    }

    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
    }
    let mut glued: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in glue {
        if a < n && b < n && a != b {
            glued[a].push(b);
            glued[b].push(a);
        }
    }

    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &s in source {
        dist[s] = 0.0;
        heap.push(Entry { dist: 0.0, vertex: s });
    }
    while let Some(Entry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        let pv = mesh.vertices[v];
        let relax = |w: usize, nd: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Entry>| {
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry { dist: nd, vertex: w });
            }
        };
        for &w in &adjacency[v] {
            let nd = d + (mesh.vertices[w] - pv).norm();
            relax(w, nd, &mut dist, &mut heap);
        }
        for &w in &glued[v] {
            relax(w, d, &mut dist, &mut heap);
        }
    }
    Ok(dist)
}
