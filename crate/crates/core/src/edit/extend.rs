//! Extending: growing a strip of constant width outward from a boundary.
//!
//! The strip lies in the tangent plane of the boundary triangles. Its
//! pattern is the pattern of the adjacent triangles extrapolated
//! barycentrically, and its scale matrices are transferred from them.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Point2, Point3, Vector3};

use super::boundary::{pick_chain, BoundaryChain};
use super::collision::resolve_body_collisions;
use super::error::EditError;
use super::op::BoundaryRef;
use crate::document::GarmentDocument;
use crate::flatten::scale_map::transfer_scale_matrix;
use crate::geometry::mesh::signed_area_2d;
use crate::geometry::topology::{boundary_loops, edge_key};
use crate::geometry::{barycentric, interpolate, SeamLine};

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendResult {
    pub doc: GarmentDocument,
    /// Garment triangles of the new strip.
    pub affected: BTreeSet<usize>,
    /// Garment vertices created along the new boundary.
    pub new_vertices: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Garment triangle owning each half-edge.
fn half_edge_owner(doc: &GarmentDocument) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for (t, tri) in doc.garment.triangles.iter().enumerate() {
        for k in 0..3 {
            out.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }
    out
}

/// Outward unit direction at every junction of the chain, indexed like
/// `chain.vertices()`.
fn junction_directions(doc: &GarmentDocument, chain: &BoundaryChain, owner: &BTreeMap<(usize, usize), usize>) -> Vec<Vector3<f64>> {
    let g = &doc.garment;
    let m = chain.edges.len();
    let count = if chain.closed { m } else { m + 1 };
    let edge_dir = |k: usize| {
        let (a, b) = chain.edges[k];
        (g.vertices[b] - g.vertices[a]).normalize()
    };
    let edge_normal = |k: usize| g.normal(owner[&chain.edges[k]]);
    let mut dirs = Vec::with_capacity(count);
    for j in 0..count {
        let incident: Vec<usize> = if chain.closed {
            vec![(j + m - 1) % m, j]
        } else {
            [j.checked_sub(1), (j < m).then_some(j)].into_iter().flatten().collect()
        };
        let tau: Vector3<f64> = incident.iter().map(|&k| edge_dir(k)).sum();
        let n: Vector3<f64> = incident.iter().map(|&k| edge_normal(k)).sum();
        dirs.push(tau.cross(&n).try_normalize(0.0).unwrap_or_else(Vector3::zeros));
    }
    // majority vote against the interior side of each edge
    let mut inward = 0usize;
    for (k, &(a, b)) in chain.edges.iter().enumerate() {
        let t = owner[&(a, b)];
        let tri = g.triangles[t];
        let c = tri.iter().copied().find(|&v| v != a && v != b).unwrap();
        let mid = Point3::from((g.vertices[a].coords + g.vertices[b].coords) * 0.5);
        let d = dirs[k] + dirs[(k + 1) % count];
        if d.dot(&(mid - g.vertices[c])) < 0.0 {
            inward += 1;
        }
    }
    if 2 * inward > chain.edges.len() {
        for d in &mut dirs {
            *d = -*d;
        }
    }
    dirs
}

/// The strip before collision handling.
pub fn extend_strip(doc: &GarmentDocument, boundary: &BoundaryRef, distance: f64) -> Result<ExtendResult, EditError> {
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(EditError::InvalidDistance(distance));
    }
    let chain = pick_chain(doc, &boundary.pick)?;
    if distance == 0.0 {
        return Ok(ExtendResult {
            doc: doc.clone(),
            affected: BTreeSet::new(),
            new_vertices: Vec::new(),
            warnings: Vec::new(),
        });
    }
    let owner = half_edge_owner(doc);
    let dirs = junction_directions(doc, &chain, &owner);
    let m = chain.edges.len();
    let count = dirs.len();
    let vertex_owner = doc.vertex_owner();
    let lists = doc.panel_triangle_lists();
    let mut out = doc.clone();

    // junction index of every copy touched by the chain
    let mut junction: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, &(a, b)) in chain.edges.iter().enumerate() {
        junction.entry(a).or_insert(k);
        junction.entry(b).or_insert((k + 1) % count);
    }

    // hosts per copy: chain triangles incident to it
    let mut hosts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &chain.edges {
        let t = owner[&(a, b)];
        hosts.entry(a).or_default().push(t);
        hosts.entry(b).or_default().push(t);
    }

    // new copies
    let mut copy: BTreeMap<usize, usize> = BTreeMap::new();
    let mut new_vertices = Vec::new();
    for (&v, &j) in &junction {
        let p = doc.garment.vertices[v] + dirs[j] * distance;
        let (panel, _) = vertex_owner[v].expect("validated document");
        let mut q = nalgebra::Vector2::zeros();
        let hs = &hosts[&v];
        for &t in hs {
            let local = lists[panel].iter().position(|&x| x == t).expect("host in panel");
            let bary = barycentric(&p, &doc.garment.triangle_points(t))?;
            q += interpolate(&bary, &doc.panels[panel].triangle_points(local)).coords;
        }
        let q = Point2::from(q / hs.len() as f64);
        let id = out.garment.vertices.len();
        out.garment.vertices.push(p);
        let pl = &mut out.panels[panel];
        pl.corr.push(id);
        pl.vertices.push(q);
        copy.insert(v, id);
        new_vertices.push(id);
    }

    // strip triangles, two per chain edge, appended to the garment and panel
    let mut warnings = Vec::new();
    let mut affected = BTreeSet::new();
    for &(a, b) in &chain.edges {
        let host = owner[&(a, b)];
        let (panel, _) = vertex_owner[a].expect("validated document");
        let local = lists[panel].iter().position(|&x| x == host).unwrap();
        let (a2, b2) = (copy[&a], copy[&b]);
        let host_normal = doc.garment.normal(host);
        let host_area = doc.panels[panel].signed_area(local);
        for tri in [[b, a, a2], [b, a2, b2]] {
            let t = out.garment.triangles.len();
            out.garment.triangles.push(tri);
            out.garment.panel_ids.push(panel);
            affected.insert(t);
            let pl = &mut out.panels[panel];
            let to_local = |v: usize| pl.corr.iter().position(|&c| c == v).expect("vertex in panel");
            let ltri = tri.map(to_local);
            pl.triangles.push(ltri);
            let sub3 = out.garment.triangle_points(t);
            let sub2 = ltri.map(|v| pl.vertices[v]);
            if out.garment.normal(t).dot(&host_normal) <= 0.0 || signed_area_2d(&sub2) * host_area <= 0.0 {
                warnings.push(format!("SelfIntersection: strip triangle on garment edge ({a}, {b})"));
            }
            let map = &doc.scale_maps[panel];
            let mt = transfer_scale_matrix(
                &doc.garment.triangle_points(host),
                &doc.panels[panel].triangle_points(local),
                map.designated_edges[local],
                &map.matrices[local],
                &sub3,
                &sub2,
                t,
            )
            .unwrap_or(map.matrices[local]);
            out.scale_maps[panel].matrices.push(mt);
            out.scale_maps[panel].designated_edges.push(0);
        }
    }

    extend_seams(&mut out.seams, &chain, &copy, doc, m);

    for (p, panel) in out.panels.iter_mut().enumerate() {
        let loops = boundary_loops(&panel.triangles);
        if loops.len() != 1 {
            return Err(EditError::NonDiskPanel { panel: p });
        }
        panel.boundary = loops.into_iter().next().unwrap();
    }

    Ok(ExtendResult {
        doc: out,
        affected,
        new_vertices,
        warnings,
    })
}

/// Glued copies at a junction keep their glue along the strip's side
/// edges: an existing seam ending there grows by one pair, otherwise a
/// new two-pair seam is created.
fn extend_seams(seams: &mut Vec<SeamLine>, chain: &BoundaryChain, copy: &BTreeMap<usize, usize>, doc: &GarmentDocument, m: usize) {
    let glue = doc.glue();
    let mut junction_pairs = BTreeSet::new();
    let links = if chain.closed { m } else { m.saturating_sub(1) };
    for k in 0..links {
        let x = chain.edges[k].1;
        let y = chain.edges[(k + 1) % m].0;
        if x != y && glue.glued(x, y) {
            junction_pairs.insert(edge_key(x, y));
        }
    }
    for (x, y) in junction_pairs {
        let (x2, y2) = (copy[&x], copy[&y]);
        let mut done = false;
        for seam in seams.iter_mut() {
            let n = seam.side_a.len();
            for (i, swap) in [(0, false), (n - 1, false), (0, true), (n - 1, true)] {
                let (sa, sb) = if swap { (y, x) } else { (x, y) };
                let (na, nb) = if swap { (y2, x2) } else { (x2, y2) };
                if seam.side_a[i] == sa && seam.side_b[i] == sb {
                    if i == 0 {
                        seam.side_a.insert(0, na);
                        seam.side_b.insert(0, nb);
                    } else {
                        seam.side_a.push(na);
                        seam.side_b.push(nb);
                    }
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
        if !done {
            seams.push(SeamLine {
                side_a: vec![x, x2],
                side_b: vec![y, y2],
            });
        }
    }
}

/// Extends the picked boundary by `distance` cm and pushes the new
/// vertices out of the body.
pub fn extend(doc: &GarmentDocument, boundary: &BoundaryRef, distance: f64) -> Result<ExtendResult, EditError> {
    let mut strip = extend_strip(doc, boundary, distance)?;
    if strip.new_vertices.is_empty() {
        return Ok(strip);
    }
    let (garment, _) = resolve_body_collisions(&strip.doc.garment, &strip.doc.body, &strip.new_vertices);
    strip.doc.garment = garment;
    Ok(strip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, CylinderSpec};
    use crate::geometry::query::signed_distance;

    #[test]
    fn planar_square_grows_in_plane() {
        let doc = fixtures::flat_square(1.0, 4);
        let out = extend(&doc, &BoundaryRef { pick: [0.5, -0.1, 0.0] }, 0.3).unwrap();
        out.doc.validate().unwrap();
        assert_eq!(out.doc.garment.triangles.len(), 32 + 8);
        for &t in &out.affected {
            assert!((out.doc.garment.normal(t) - Vector3::z()).norm() < 1e-12);
        }
        for &v in &out.new_vertices {
            assert!((out.doc.garment.vertices[v].y + 0.3).abs() < 1e-12);
        }
        // congruent pattern extrapolates congruently
        for m in &out.doc.scale_maps[0].matrices {
            assert!((m - nalgebra::Matrix2::identity()).abs().max() < 1e-9);
        }
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn cylinder_hem_keeps_its_seam() {
        let doc = fixtures::cylinder(CylinderSpec::default());
        let out = extend(&doc, &BoundaryRef { pick: [0.0, 0.0, -1.0] }, 0.5).unwrap();
        out.doc.validate().unwrap();
        assert_eq!(out.doc.seams.len(), 1);
        assert_eq!(out.doc.seams[0].side_a.len(), CylinderSpec::default().rows + 2);
        let zmin = out.doc.garment.vertices.iter().map(|p| p.z).fold(f64::MAX, f64::min);
        assert!((zmin + 0.5).abs() < 1e-9);
    }

    #[test]
    fn strip_is_pushed_out_of_the_body() {
        let mut doc = fixtures::flat_square(1.0, 4);
        doc.body = fixtures::wall_body(-0.1, 10.0);
        let out = extend(&doc, &BoundaryRef { pick: [0.5, -0.1, 0.0] }, 0.5).unwrap();
        for &v in &out.new_vertices {
            let (sd, _, _) = signed_distance(&out.doc.body.mesh, &out.doc.garment.vertices[v]).unwrap();
            assert!(sd >= 0.2 - 1e-9, "{sd}");
        }
    }

    #[test]
    fn negative_distance_rejected() {
        let doc = fixtures::flat_square(1.0, 2);
        let err = extend(&doc, &BoundaryRef { pick: [0.5, -0.1, 0.0] }, -0.2).unwrap_err();
        assert_eq!(err.name(), "InvalidDistance");
    }
}
