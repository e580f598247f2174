//! Level-set polylines of a per-vertex scalar field.

use std::collections::BTreeMap;

use nalgebra::Point3;

use super::error::GeometryError;
use super::mesh::Mesh3;
use super::topology::edge_key;

/// A point on mesh edge `(low, high)` at parameter `t` from the low-valued end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoPoint {
    pub edge: (usize, usize),
    pub t: f64,
    pub position: Point3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<IsoPoint>,
    pub closed: bool,
}

/// Linear interpolation used for every level crossing in the crate.
pub fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Parameter `t` on an edge from value `low` to value `high` (low < level <= high)
/// such that `lerp(low, high, t)` reproduces `level` as closely as floating
/// point allows. The initial quotient is refined ulp by ulp.
pub fn level_crossing(low: f64, high: f64, level: f64) -> f64 {
    if !high.is_finite() {
        return 0.0;
    }
    let mut t = ((level - low) / (high - low)).clamp(0.0, 1.0);
    let mut best = (t, (lerp(low, high, t) - level).abs());
    for _ in 0..16 {
        let err = lerp(low, high, t) - level;
        if err == 0.0 {
            return t;
        }
        t = if err > 0.0 { t.next_down() } else { t.next_up() }.clamp(0.0, 1.0);
        let e = (lerp(low, high, t) - level).abs();
        if e < best.1 {
            best = (t, e);
        }
    }
    best.0
}

/// Iso-line `{dist = level}` as maximal polylines across triangles.
///
/// Vertices with `dist >= level` count as above the level; every triangle
/// straddling the level contributes exactly one segment.
pub fn extract_isoline(mesh: &Mesh3, dist: &[f64], level: f64) -> Result<Vec<Polyline>, GeometryError> {
    if !(level > 0.0) {
        return Err(GeometryError::InvalidLevel(level));
    }
    let above = |v: usize| dist[v] >= level;

    // crossing edges, keyed undirected, and per-triangle segments
    let mut points: BTreeMap<(usize, usize), IsoPoint> = BTreeMap::new();
    let mut incident: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut segments: Vec<[(usize, usize); 2]> = Vec::new();
    for tri in &mesh.triangles {
        let mut crossing = Vec::with_capacity(2);
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if above(a) == above(b) {
                continue;
            }
            let (lo, hi) = if above(a) { (b, a) } else { (a, b) };
            let key = edge_key(a, b);
            points.entry(key).or_insert_with(|| {
                let t = level_crossing(dist[lo], dist[hi], level);
                let pa = mesh.vertices[lo];
                let pb = mesh.vertices[hi];
                IsoPoint {
                    edge: (lo, hi),
                    t,
                    position: pa + (pb - pa) * t,
                }
            });
            crossing.push(key);
        }
        if crossing.len() == 2 {
            let s = segments.len();
            incident.entry(crossing[0]).or_default().push(s);
            incident.entry(crossing[1]).or_default().push(s);
            segments.push([crossing[0], crossing[1]]);
        }
    }
    if segments.is_empty() {
        return Err(GeometryError::EmptyIsoline { level });
    }

    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    let walk = |start: (usize, usize), used: &mut Vec<bool>| -> (Vec<(usize, usize)>, bool) {
        let mut chain = vec![start];
        let mut cur = start;
        loop {
            let next_seg = incident[&cur].iter().copied().find(|&s| !used[s]);
            let Some(s) = next_seg else { break };
            used[s] = true;
            let [p, q] = segments[s];
            let other = if p == cur { q } else { p };
            if other == start {
                return (chain, true);
            }
            chain.push(other);
            cur = other;
        }
        (chain, false)
    };

    // open chains start at crossing edges with a single incident segment
    let ends: Vec<(usize, usize)> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&k, _)| k)
        .collect();
    for start in ends {
        if incident[&start].iter().all(|&s| used[s]) {
            continue;
        }
        let (chain, closed) = walk(start, &mut used);
        polylines.push((chain, closed));
    }
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (chain, closed) = walk(segments[s][0], &mut used);
        polylines.push((chain, closed));
    }

    Ok(polylines
        .into_iter()
        .map(|(chain, closed)| Polyline {
            points: chain.iter().map(|k| points[k]).collect(),
            closed,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::grid_mesh;

    #[test]
    fn single_triangle_midpoints() {
        let mesh = Mesh3::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
                Point3::new(0.0, 2.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let lines = extract_isoline(&mesh, &[0.0, 0.0, 2.0], 1.0).unwrap();
        assert_eq!(lines.len(), 1);
        let pts = &lines[0].points;
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert_eq!(p.t, 0.5);
        }
        let mut ys: Vec<_> = pts.iter().map(|p| (p.position.x, p.position.y)).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ys, vec![(0.0, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn grid_isoline_spans_width() {
        let mesh = grid_mesh(5, 5, 1.0);
        let dist: Vec<f64> = mesh.vertices.iter().map(|p| p.y).collect();
        let lines = extract_isoline(&mesh, &dist, 1.5).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        for p in &lines[0].points {
            assert!((p.position.y - 1.5).abs() < 1e-12);
            let (lo, hi) = p.edge;
            assert_eq!(lerp(dist[lo], dist[hi], p.t), 1.5);
        }
        let xs: Vec<f64> = lines[0].points.iter().map(|p| p.position.x).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min, max), (0.0, 4.0));
    }

    #[test]
    fn level_beyond_range() {
        let mesh = grid_mesh(5, 5, 1.0);
        let dist: Vec<f64> = mesh.vertices.iter().map(|p| p.y).collect();
        assert!(matches!(
            extract_isoline(&mesh, &dist, 10.0),
            Err(GeometryError::EmptyIsoline { .. })
        ));
    }

    #[test]
    fn crossing_reproduces_level() {
        let cases = [(0.1, 0.7, 0.3), (1.0 / 3.0, 2.9, 1.7), (0.0, 1e-3, 3e-4), (2.2, 7.1, 5.55)];
        for (lo, hi, level) in cases {
            let t = level_crossing(lo, hi, level);
            assert!((lerp(lo, hi, t) - level).abs() <= f64::EPSILON * level.abs() * 4.0);
        }
    }
}
