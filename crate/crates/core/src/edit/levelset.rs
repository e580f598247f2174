//! Cutting panels along the level set of a per-vertex scalar field.
//!
//! Crossing points on edges become new vertices: their 3D position and their
//! 2D pattern image are the same linear interpolation of the edge ends, i.e.
//! barycentric transfer, so no panel is re-flattened. Triangles straddling
//! the level split into two or three pieces, the kept pieces regroup into
//! disk panels, and seams, symmetry and scale matrices follow.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Matrix2, Point2, Point3};

use super::error::EditError;
use crate::document::GarmentDocument;
use crate::flatten::scale_map::{transfer_scale_matrix, IntrinsicScaleMap};
use crate::geometry::isoline::{lerp, level_crossing};
use crate::geometry::mesh::signed_area_2d;
use crate::geometry::topology::{boundary_loops, edge_key, edge_triangles, triangle_components};
use crate::geometry::{Mesh3, Panel, SeamLine, Symmetry};

/// Crossings closer than this (cm) to an edge end snap onto the vertex.
pub const SNAP_TOLERANCE: f64 = 1e-4;

/// Pieces smaller than this (cm²) are reported as slivers.
pub const SLIVER_AREA: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the part where the field exceeds the level.
    Above,
    /// Keep the part below the level.
    Below,
    /// Keep both parts as separate panels.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    /// One value per garment vertex.
    pub values: Vec<f64>,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub doc: GarmentDocument,
    /// New garment triangles produced by splitting.
    pub affected: BTreeSet<usize>,
    /// Old garment vertex -> new garment vertex, `None` when removed.
    pub vertex_map: Vec<Option<usize>>,
    /// New garment ids of the vertices created on the cut.
    pub cut_vertices: Vec<usize>,
    pub warnings: Vec<String>,
}

struct Split {
    id: usize,
}

struct Piece {
    tri: [usize; 3],
    host: usize,
    side: i8,
    split: bool,
}

fn sign(v: f64, level: f64) -> i8 {
    if v > level {
        1
    } else if v < level {
        -1
    } else {
        0
    }
}

pub fn level_set_cut(
    doc: &GarmentDocument,
    panels: &BTreeSet<usize>,
    field: &ScalarField,
    keep: Keep,
) -> Result<CutResult, EditError> {
    let g = &doc.garment;
    let n_old = g.vertices.len();
    let level = field.level;
    let mut values = field.values.clone();
    let lists = doc.panel_triangle_lists();
    let owner = doc.vertex_owner();
    let glue = doc.glue();

    let cut_tris: Vec<usize> = panels.iter().flat_map(|&p| lists[p].iter().copied()).collect();
    let straddles = |values: &[f64], a: usize, b: usize| sign(values[a], level) * sign(values[b], level) < 0;
    let ordered = |values: &[f64], a: usize, b: usize| if values[a] < values[b] { (a, b) } else { (b, a) };

    // snap crossings that fall next to a vertex onto the vertex
    loop {
        let mut changed = false;
        for &t in &cut_tris {
            let tri = g.triangles[t];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if !straddles(&values, a, b) {
                    continue;
                }
                let (lo, hi) = ordered(&values, a, b);
                let s = level_crossing(values[lo], values[hi], level);
                let len = (g.vertices[hi] - g.vertices[lo]).norm();
                if s * len < SNAP_TOLERANCE {
                    values[lo] = level;
                    changed = true;
                } else if (1.0 - s) * len < SNAP_TOLERANCE {
                    values[hi] = level;
                    changed = true;
                }
            }
        }
        for members in glue.classes().into_values() {
            if members.iter().any(|&m| values[m] == level) {
                for m in members {
                    if values[m] != level {
                        values[m] = level;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // new vertices on straddling edges
    let mut splits: BTreeMap<(usize, usize), Split> = BTreeMap::new();
    let mut pos3: Vec<Point3<f64>> = g.vertices.clone();
    let mut new_pos2: Vec<Point2<f64>> = Vec::new();
    for &t in &cut_tris {
        let tri = g.triangles[t];
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if !straddles(&values, a, b) || splits.contains_key(&edge_key(a, b)) {
                continue;
            }
            let (lo, hi) = ordered(&values, a, b);
            let s = level_crossing(values[lo], values[hi], level);
            let (plo, phi) = (g.vertices[lo], g.vertices[hi]);
            let p = Point3::new(lerp(plo.x, phi.x, s), lerp(plo.y, phi.y, s), lerp(plo.z, phi.z, s));
            let (panel, l_lo) = owner[lo].expect("validated document");
            let (_, l_hi) = owner[hi].expect("validated document");
            let (qlo, qhi) = (doc.panels[panel].vertices[l_lo], doc.panels[panel].vertices[l_hi]);
            let q = Point2::new(lerp(qlo.x, qhi.x, s), lerp(qlo.y, qhi.y, s));
            let id = pos3.len();
            pos3.push(p);
            new_pos2.push(q);
            splits.insert(edge_key(a, b), Split { id });
        }
    }
    let split_of = |a: usize, b: usize| splits.get(&edge_key(a, b)).map(|s| s.id);

    // pieces per cut panel
    let mut warnings = Vec::new();
    let mut pieces_by_panel: BTreeMap<usize, Vec<Piece>> = BTreeMap::new();
    for &p in panels {
        let mut pieces = Vec::new();
        for (k, &t) in lists[p].iter().enumerate() {
            let tri = g.triangles[t];
            let s = tri.map(|v| sign(values[v], level));
            let straddle = s.contains(&1) && s.contains(&-1);
            if !straddle {
                let side = if s.contains(&1) {
                    1
                } else if s.contains(&-1) {
                    -1
                } else {
                    1
                };
                pieces.push(Piece {
                    tri,
                    host: k,
                    side,
                    split: false,
                });
                continue;
            }
            let zeros = s.iter().filter(|&&x| x == 0).count();
            if zeros == 1 {
                let r = s.iter().position(|&x| x == 0).unwrap();
                let (z, a, b) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
                let m = split_of(a, b).expect("straddling edge has a split");
                pieces.push(Piece {
                    tri: [z, a, m],
                    host: k,
                    side: s[(r + 1) % 3],
                    split: true,
                });
                pieces.push(Piece {
                    tri: [z, m, b],
                    host: k,
                    side: s[(r + 2) % 3],
                    split: true,
                });
            } else {
                let r = (0..3)
                    .find(|&i| s[i] != s[(i + 1) % 3] && s[i] != s[(i + 2) % 3])
                    .expect("one vertex is alone on its side");
                let (l, a, b) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
                let pa = split_of(l, a).expect("straddling edge has a split");
                let pb = split_of(l, b).expect("straddling edge has a split");
                pieces.push(Piece {
                    tri: [l, pa, pb],
                    host: k,
                    side: s[r],
                    split: true,
                });
                let other = s[(r + 1) % 3];
                let quad = if (pos3[pa] - pos3[b]).norm() <= (pos3[a] - pos3[pb]).norm() {
                    [[pa, a, b], [pa, b, pb]]
                } else {
                    [[pa, a, pb], [a, b, pb]]
                };
                for tri in quad {
                    pieces.push(Piece {
                        tri,
                        host: k,
                        side: other,
                        split: true,
                    });
                }
            }
        }
        pieces_by_panel.insert(p, pieces);
    }

    let pos2_of = |v: usize| -> Point2<f64> {
        if v < n_old {
            let (p, l) = owner[v].expect("validated document");
            doc.panels[p].vertices[l]
        } else {
            new_pos2[v - n_old]
        }
    };

    // regroup kept pieces into panels
    struct NewPanel {
        source: usize,
        panel: Panel,
        map: IntrinsicScaleMap,
        split_local: Vec<usize>,
    }
    let mut produced: BTreeMap<usize, Vec<NewPanel>> = BTreeMap::new();
    for (&p, pieces) in &pieces_by_panel {
        let src = &doc.panels[p];
        let src_map = &doc.scale_maps[p];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for side in [1i8, -1] {
            let wanted = match keep {
                Keep::Above => side == 1,
                Keep::Below => side == -1,
                Keep::Both => true,
            };
            if !wanted {
                continue;
            }
            let idx: Vec<usize> = (0..pieces.len()).filter(|&i| pieces[i].side == side).collect();
            let tris: Vec<[usize; 3]> = idx.iter().map(|&i| pieces[i].tri).collect();
            for comp in triangle_components(&tris) {
                groups.push(comp.iter().map(|&c| idx[c]).collect());
            }
        }
        groups.sort_by_key(|grp| grp.iter().copied().min());
        let count = groups.len();
        let mut out = Vec::new();
        for (gi, grp) in groups.into_iter().enumerate() {
            let mut verts: Vec<usize> = grp.iter().flat_map(|&i| pieces[i].tri).collect();
            verts.sort_by_key(|&v| if v < n_old { (0, owner[v].unwrap().1) } else { (1, v) });
            verts.dedup();
            let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let triangles: Vec<[usize; 3]> = grp.iter().map(|&i| pieces[i].tri.map(|v| local[&v])).collect();
            let loops = boundary_loops(&triangles);
            if loops.len() != 1 {
                return Err(EditError::NonDiskPanel { panel: p });
            }
            let vertices: Vec<Point2<f64>> = verts.iter().map(|&v| pos2_of(v)).collect();
            let mut map = IntrinsicScaleMap::default();
            let mut split_local = Vec::new();
            for (li, &i) in grp.iter().enumerate() {
                let piece = &pieces[i];
                if !piece.split {
                    map.matrices.push(src_map.matrices[piece.host]);
                    map.designated_edges.push(src_map.designated_edges[piece.host]);
                    continue;
                }
                split_local.push(li);
                let sub3 = piece.tri.map(|v| pos3[v]);
                let sub2 = piece.tri.map(pos2_of);
                if 0.5 * (sub3[1] - sub3[0]).cross(&(sub3[2] - sub3[0])).norm() < SLIVER_AREA
                    || signed_area_2d(&sub2).abs() < SLIVER_AREA
                {
                    warnings.push(format!("SliverTriangles: panel {p} piece of triangle {}", piece.host));
                }
                let m = transfer_scale_matrix(
                    &src.garment_points(g, piece.host),
                    &src.triangle_points(piece.host),
                    src_map.designated_edges[piece.host],
                    &src_map.matrices[piece.host],
                    &sub3,
                    &sub2,
                    piece.host,
                )
                .unwrap_or(src_map.matrices[piece.host]);
                map.matrices.push(m);
                map.designated_edges.push(0);
            }
            let name = if count == 1 {
                src.name.clone()
            } else {
                format!("{}.{}", src.name, gi + 1)
            };
            out.push(NewPanel {
                source: p,
                panel: Panel {
                    name,
                    vertices,
                    triangles,
                    boundary: loops.into_iter().next().unwrap(),
                    corr: verts,
                },
                map,
                split_local,
            });
        }
        produced.insert(p, out);
    }

    // final panel list, still in old/new vertex ids
    let mut final_panels: Vec<(usize, Panel, IntrinsicScaleMap, Vec<usize>)> = Vec::new();
    for (p, panel) in doc.panels.iter().enumerate() {
        match produced.remove(&p) {
            Some(list) => {
                for np in list {
                    final_panels.push((np.source, np.panel, np.map, np.split_local));
                }
            }
            None => final_panels.push((p, panel.clone(), doc.scale_maps[p].clone(), Vec::new())),
        }
    }
    if final_panels.is_empty() {
        return Err(EditError::EmptyResult);
    }

    // compact vertex numbering: surviving old vertices, then new ones; a
    // vertex shared by several final panels gets one copy per panel
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); pos3.len()];
    for (i, (_, panel, _, _)) in final_panels.iter().enumerate() {
        for &v in &panel.corr {
            users[v].push(i);
        }
    }
    let mut copies: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pos3.len()];
    let mut vertices = Vec::new();
    for v in 0..pos3.len() {
        for &i in &users[v] {
            copies[v].push((i, vertices.len()));
            vertices.push(pos3[v]);
        }
    }
    let copy_in = |v: usize, panel: usize| copies[v].iter().find(|c| c.0 == panel).map(|c| c.1);
    let mut garment = Mesh3 {
        vertices,
        triangles: Vec::new(),
        panel_ids: Vec::new(),
    };
    let mut panels_out = Vec::new();
    let mut maps_out = Vec::new();
    let mut sources = Vec::new();
    let mut affected = BTreeSet::new();
    let mut old_ids = Vec::new();
    for (i, (source, mut panel, map, split_local)) in final_panels.into_iter().enumerate() {
        old_ids.push(panel.corr.clone());
        panel.corr = panel.corr.iter().map(|&v| copy_in(v, i).expect("vertex copy")).collect();
        let base = garment.triangles.len();
        for tri in &panel.triangles {
            garment.triangles.push(tri.map(|v| panel.corr[v]));
            garment.panel_ids.push(i);
        }
        affected.extend(split_local.iter().map(|&k| base + k));
        panels_out.push(panel);
        maps_out.push(map);
        sources.push(source);
    }

    let mut seams = rebuild_seams(&doc.seams, &splits, &copies, &garment);
    seams.extend(cut_seams(&panels_out, &old_ids, &sources, &garment));
    let symmetry = doc
        .symmetry
        .as_ref()
        .map(|s| rematch_symmetry(s, &sources, &garment));

    let cut_vertices = (n_old..pos3.len()).flat_map(|v| copies[v].iter().map(|c| c.1)).collect();
    let vertex_map = copies[..n_old].iter().map(|c| c.first().map(|c| c.1)).collect();
    let new_doc = GarmentDocument {
        version: doc.version.clone(),
        body: doc.body.clone(),
        garment,
        panels: panels_out,
        seams,
        symmetry,
        scale_maps: maps_out,
        history: doc.history.clone(),
    };
    Ok(CutResult {
        doc: new_doc,
        affected,
        vertex_map,
        cut_vertices,
        warnings,
    })
}

/// Seams with split vertices inserted where both sides were cut, restricted
/// to stretches whose pairs survive and still form boundary edges. Where a
/// seam vertex was duplicated, the copy continuing the run is used.
fn rebuild_seams(
    seams: &[SeamLine],
    splits: &BTreeMap<(usize, usize), Split>,
    copies: &[Vec<(usize, usize)>],
    garment: &Mesh3,
) -> Vec<SeamLine> {
    let edges = edge_triangles(&garment.triangles);
    let is_edge = |a: usize, b: usize| edges.get(&edge_key(a, b)).is_some_and(|t| t.len() == 1);
    let linked = |p: (usize, usize), q: (usize, usize)| is_edge(p.0, q.0) && is_edge(p.1, q.1);
    let options = |(a, b): (usize, usize)| -> Vec<(usize, usize)> {
        copies[a]
            .iter()
            .flat_map(|ca| copies[b].iter().map(move |cb| (ca.1, cb.1)))
            .collect()
    };
    let mut out = Vec::new();
    for seam in seams {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let n = seam.side_a.len();
        for k in 0..n {
            pairs.push((seam.side_a[k], seam.side_b[k]));
            if k + 1 < n {
                let sa = splits.get(&edge_key(seam.side_a[k], seam.side_a[k + 1]));
                let sb = splits.get(&edge_key(seam.side_b[k], seam.side_b[k + 1]));
                if let (Some(sa), Some(sb)) = (sa, sb) {
                    pairs.push((sa.id, sb.id));
                }
            }
        }
        let mut run: Vec<(usize, usize)> = Vec::new();
        let mut flush = |run: &mut Vec<(usize, usize)>| {
            if run.len() >= 2 {
                out.push(SeamLine {
                    side_a: run.iter().map(|p| p.0).collect(),
                    side_b: run.iter().map(|p| p.1).collect(),
                });
            }
            run.clear();
        };
        for (k, &pair) in pairs.iter().enumerate() {
            let here = options(pair);
            if here.is_empty() {
                flush(&mut run);
                continue;
            }
            if let Some(&last) = run.last() {
                if let Some(&p) = here.iter().find(|&&p| linked(last, p)) {
                    run.push(p);
                    continue;
                }
                flush(&mut run);
                // restart from another copy of the previous pair when it links
                let prev = options(pairs[k - 1]);
                if let Some((q, p)) = prev
                    .iter()
                    .flat_map(|&q| here.iter().map(move |&p| (q, p)))
                    .find(|&(q, p)| q != last && linked(q, p))
                {
                    run.extend([q, p]);
                    continue;
                }
            }
            let next = pairs.get(k + 1).map(|&p| options(p)).unwrap_or_default();
            let start = here
                .iter()
                .copied()
                .find(|&p| next.iter().any(|&q| linked(p, q)))
                .unwrap_or(here[0]);
            run.push(start);
        }
        flush(&mut run);
    }
    out
}

/// Seams sewing together pieces of one source panel along the cut: runs of
/// boundary edges whose ends were duplicated between the two pieces.
fn cut_seams(panels: &[Panel], old_ids: &[Vec<usize>], sources: &[usize], garment: &Mesh3) -> Vec<SeamLine> {
    let edges = edge_triangles(&garment.triangles);
    let mut out = Vec::new();
    for i in 0..panels.len() {
        for j in i + 1..panels.len() {
            if sources[i] != sources[j] {
                continue;
            }
            let in_j: BTreeMap<usize, usize> = old_ids[j].iter().copied().zip(panels[j].corr.iter().copied()).collect();
            let in_i: BTreeMap<usize, usize> = old_ids[i].iter().copied().zip(panels[i].corr.iter().copied()).collect();
            let boundary = |a: usize, b: usize| edges.get(&edge_key(a, b)).is_some_and(|t| t.len() == 1);
            // shared boundary edges, in source vertex ids
            let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let bl = &panels[i].boundary;
            for k in 0..bl.len() {
                let (la, lb) = (bl[k], bl[(k + 1) % bl.len()]);
                let (a, b) = (old_ids[i][la], old_ids[i][lb]);
                let (Some(&ja), Some(&jb)) = (in_j.get(&a), in_j.get(&b)) else {
                    continue;
                };
                if boundary(ja, jb) {
                    adjacency.entry(a).or_default().push(b);
                    adjacency.entry(b).or_default().push(a);
                }
            }
            let mut seen = BTreeSet::new();
            let ends: Vec<usize> = adjacency.iter().filter(|(_, n)| n.len() == 1).map(|(&v, _)| v).collect();
            let starts: Vec<usize> = ends.into_iter().chain(adjacency.keys().copied()).collect();
            for s in starts {
                if seen.contains(&s) {
                    continue;
                }
                let mut path = vec![s];
                seen.insert(s);
                let mut cur = s;
                while let Some(&next) = adjacency[&cur].iter().find(|v| !seen.contains(v)) {
                    seen.insert(next);
                    path.push(next);
                    cur = next;
                }
                if path.len() >= 2 {
                    out.push(SeamLine {
                        side_a: path.iter().map(|v| in_i[v]).collect(),
                        side_b: path.iter().map(|v| in_j[v]).collect(),
                    });
                }
            }
        }
    }
    out
}

fn panel_centroid(garment: &Mesh3, panel: usize) -> Point3<f64> {
    let mut acc = nalgebra::Vector3::zeros();
    let mut total = 0.0;
    for t in 0..garment.triangles.len() {
        if garment.panel_ids[t] != panel {
            continue;
        }
        let [a, b, c] = garment.triangle_points(t);
        let w = garment.triangle_area(t);
        acc += w * (a.coords + b.coords + c.coords) / 3.0;
        total += w;
    }
    Point3::from(acc / total.max(f64::MIN_POSITIVE))
}

/// Re-derives the panel pairing after panels were split. Descendants of a
/// paired panel are matched by reflected centroid.
fn rematch_symmetry(sym: &Symmetry, sources: &[usize], garment: &Mesh3) -> Symmetry {
    let old_count = sources.iter().max().map_or(0, |&m| m + 1).max(sym.pairs.iter().flatten().max().map_or(0, |&m| m + 1));
    let mut descendants = vec![Vec::new(); old_count];
    for (i, &s) in sources.iter().enumerate() {
        descendants[s].push(i);
    }
    let centroids: Vec<Point3<f64>> = (0..sources.len()).map(|i| panel_centroid(garment, i)).collect();
    let (lo, hi) = garment.vertices.iter().fold(
        (Point3::from([f64::INFINITY; 3]), Point3::from([f64::NEG_INFINITY; 3])),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let tol = 1e-6 * (1.0 + (hi - lo).norm());
    let mut pairs = Vec::new();
    for &[a, b] in &sym.pairs {
        let (da, db) = (&descendants[a], &descendants[b]);
        if da.is_empty() || db.is_empty() {
            continue;
        }
        if da.len() == 1 && db.len() == 1 {
            pairs.push([da[0], db[0]]);
            continue;
        }
        let best = |x: usize, pool: &[usize]| -> Option<usize> {
            let r = sym.reflect_point(&centroids[x]);
            pool.iter()
                .map(|&y| (y, (centroids[y] - r).norm()))
                .filter(|&(_, d)| d < tol)
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .map(|(y, _)| y)
        };
        for &x in da {
            if let Some(y) = best(x, db) {
                if best(y, da) == Some(x) && (a != b || x <= y) {
                    pairs.push([x, y]);
                }
            }
        }
    }
    Symmetry {
        point: sym.point,
        normal: sym.normal,
        pairs,
    }
}

/// Identity scale matrix check used by tests.
pub fn is_identity(m: &Matrix2<f64>, tol: f64) -> bool {
    (m - Matrix2::identity()).abs().max() <= tol
}
