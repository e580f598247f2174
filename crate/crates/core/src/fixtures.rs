//! Synthetic garments: flat quads, grids and open cylinders with exactly
//! known dimensions.

use nalgebra::{Point2, Point3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::document::GarmentDocument;
use crate::geometry::topology::boundary_loops;
use crate::geometry::{BodyModel, Bone, Mesh3, Panel, SeamLine, Symmetry};

/// `nx × ny` vertices with the given spacing in the z = 0 plane, row-major.
pub fn grid_mesh(nx: usize, ny: usize, spacing: f64) -> Mesh3 {
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push(Point3::new(i as f64 * spacing, j as f64 * spacing, 0.0));
        }
    }
    Mesh3::new(vertices, grid_triangles(nx, ny))
}

/// Two counterclockwise triangles per cell of an `nx × ny` vertex grid.
pub fn grid_triangles(nx: usize, ny: usize) -> Vec<[usize; 3]> {
    let mut tris = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v00 = j * nx + i;
            let v10 = v00 + 1;
            let v01 = v00 + nx;
            let v11 = v01 + 1;
            tris.push([v00, v10, v11]);
            tris.push([v00, v11, v01]);
        }
    }
    tris
}

/// One panel before assembly: local 2D and 3D positions share indices.
#[derive(Debug, Clone)]
pub struct PanelSpec {
    pub name: String,
    pub uv: Vec<Point2<f64>>,
    pub xyz: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

/// A seam given as panel-local vertex chains.
#[derive(Debug, Clone)]
pub struct SeamSpec {
    pub a: (usize, Vec<usize>),
    pub b: (usize, Vec<usize>),
}

/// Concatenates panels into a garment (vertices and triangles grouped by
/// panel) and memorizes the scale matrices.
pub fn assemble(body: BodyModel, panels: Vec<PanelSpec>, seams: Vec<SeamSpec>, symmetry: Option<Symmetry>) -> GarmentDocument {
    let mut garment = Mesh3::default();
    let mut out = Vec::new();
    let mut offsets = Vec::new();
    for (p, spec) in panels.into_iter().enumerate() {
        let base = garment.vertices.len();
        offsets.push(base);
        garment.vertices.extend(spec.xyz.iter().copied());
        for tri in &spec.triangles {
            garment.triangles.push(tri.map(|v| v + base));
            garment.panel_ids.push(p);
        }
        let boundary = boundary_loops(&spec.triangles).into_iter().next().unwrap_or_default();
        out.push(Panel {
            name: spec.name,
            vertices: spec.uv,
            triangles: spec.triangles,
            boundary,
            corr: (base..base + spec.xyz.len()).collect(),
        });
    }
    let seams = seams
        .into_iter()
        .map(|s| SeamLine {
            side_a: s.a.1.iter().map(|v| v + offsets[s.a.0]).collect(),
            side_b: s.b.1.iter().map(|v| v + offsets[s.b.0]).collect(),
        })
        .collect();
    GarmentDocument::new(body, garment, out, seams, symmetry).expect("fixture scale map")
}

/// Planar `size × size` square split into `n × n` cells, pattern congruent
/// to the garment. A bone runs along the square's y-axis, 5 cm behind it.
pub fn flat_square(size: f64, n: usize) -> GarmentDocument {
    let grid = grid_mesh(n + 1, n + 1, size / n as f64);
    let uv = grid.vertices.iter().map(|p| Point2::new(p.x, p.y)).collect();
    let body = BodyModel {
        skeleton: vec![Bone {
            name: "spine".into(),
            start: Point3::new(0.5 * size, 0.0, -5.0),
            end: Point3::new(0.5 * size, size, -5.0),
        }],
        ..Default::default()
    };
    let spec = PanelSpec {
        name: "square".into(),
        uv,
        xyz: grid.vertices,
        triangles: grid.triangles,
    };
    assemble(body, vec![spec], vec![], None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    pub radius: f64,
    pub height: f64,
    /// Polygon sides around the axis.
    pub segments: usize,
    /// Cell rows along the axis.
    pub rows: usize,
    /// Pattern size relative to the drape (2 for an elastic cuff).
    pub pattern_scale: f64,
    pub origin: Point3<f64>,
    pub axis: Vector3<f64>,
}

impl Default for CylinderSpec {
    fn default() -> Self {
        Self {
            radius: 1.0,
            height: 1.0,
            segments: 8,
            rows: 4,
            pattern_scale: 1.0,
            origin: Point3::origin(),
            axis: Vector3::z(),
        }
    }
}

impl CylinderSpec {
    /// Polygon side length of one segment.
    pub fn chord(&self) -> f64 {
        2.0 * self.radius * (std::f64::consts::PI / self.segments as f64).sin()
    }

    pub fn circumference(&self) -> f64 {
        self.chord() * self.segments as f64
    }

    fn frame(&self) -> Rotation3<f64> {
        Rotation3::rotation_between(&Vector3::z(), &self.axis).unwrap_or_else(|| {
            Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::x()), std::f64::consts::PI)
        })
    }

    /// Vertex index of ring `j`, column `i` (column `segments` duplicates 0).
    pub fn index(&self, j: usize, i: usize) -> usize {
        j * (self.segments + 1) + i
    }

    pub fn panel(&self, name: &str, rows: std::ops::RangeInclusive<usize>) -> PanelSpec {
        let rot = self.frame();
        let cols = self.segments + 1;
        let (r0, r1) = (*rows.start(), *rows.end());
        let dz = self.height / self.rows as f64;
        let mut uv = Vec::new();
        let mut xyz = Vec::new();
        for j in r0..=r1 {
            for i in 0..cols {
                let theta = std::f64::consts::TAU * (i % self.segments) as f64 / self.segments as f64;
                let z = j as f64 * dz;
                let local = Vector3::new(self.radius * theta.cos(), self.radius * theta.sin(), z);
                xyz.push(self.origin + rot * local);
                uv.push(Point2::new(
                    self.pattern_scale * self.chord() * i as f64,
                    self.pattern_scale * z,
                ));
            }
        }
        PanelSpec {
            name: name.into(),
            uv,
            xyz,
            triangles: grid_triangles(cols, r1 - r0 + 1),
        }
    }

    /// Self-seam joining the first and last column of a panel spanning
    /// `nrows + 1` rings.
    pub fn self_seam(&self, panel: usize, nrows: usize) -> SeamSpec {
        let cols = self.segments + 1;
        SeamSpec {
            a: (panel, (0..=nrows).map(|j| j * cols).collect()),
            b: (panel, (0..=nrows).map(|j| j * cols + self.segments).collect()),
        }
    }

    pub fn bone(&self, name: &str) -> Bone {
        Bone {
            name: name.into(),
            start: self.origin,
            end: self.origin + self.axis.normalize() * self.height,
        }
    }
}

/// Open cylinder, one panel closed by a self-seam, bone on the axis.
pub fn cylinder(spec: CylinderSpec) -> GarmentDocument {
    let body = BodyModel {
        skeleton: vec![spec.bone("arm")],
        ..Default::default()
    };
    let panel = spec.panel("tube", 0..=spec.rows);
    assemble(body, vec![panel], vec![spec.self_seam(0, spec.rows)], None)
}

/// Cylinder whose pattern is twice the drape in both directions, the
/// elastic-cuff design.
pub fn elastic_cuff() -> GarmentDocument {
    cylinder(CylinderSpec {
        radius: 4.0,
        height: 6.0,
        segments: 24,
        rows: 6,
        pattern_scale: 2.0,
        ..Default::default()
    })
}

/// Cylinder split into a lower and an upper panel by a seam at ring
/// `split`. Seam side A is the lower panel.
pub fn two_part_cylinder(spec: CylinderSpec, split: usize) -> GarmentDocument {
    let body = BodyModel {
        skeleton: vec![spec.bone("arm")],
        ..Default::default()
    };
    let lower = spec.panel("lower", 0..=split);
    let upper = spec.panel("upper", split..=spec.rows);
    let cols = spec.segments + 1;
    let seam = SeamSpec {
        a: (0, (0..cols).map(|i| split * cols + i).collect()),
        b: (1, (0..cols).collect()),
    };
    assemble(
        body,
        vec![lower, upper],
        vec![spec.self_seam(0, split), spec.self_seam(1, spec.rows - split), seam],
        None,
    )
}

/// Reflection of a panel through the plane `x = 0`; windings are reversed
/// so normals stay outward and 2D triangles stay counterclockwise.
pub fn mirrored_panel(spec: &PanelSpec, name: &str) -> PanelSpec {
    PanelSpec {
        name: name.into(),
        uv: spec.uv.iter().map(|p| Point2::new(-p.x, p.y)).collect(),
        xyz: spec.xyz.iter().map(|p| Point3::new(-p.x, p.y, p.z)).collect(),
        triangles: spec.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
    }
}

/// Two sleeves symmetric about `x = 0`: panel 0 on +x, panel 1 its mirror.
pub fn mirrored_sleeves() -> GarmentDocument {
    let spec = CylinderSpec {
        radius: 3.0,
        height: 12.0,
        segments: 12,
        rows: 6,
        origin: Point3::new(4.0, 0.0, 0.0),
        axis: Vector3::x(),
        ..Default::default()
    };
    let right = spec.panel("right_sleeve", 0..=spec.rows);
    let left = mirrored_panel(&right, "left_sleeve");
    let right_bone = spec.bone("right_arm");
    let left_bone = Bone {
        name: "left_arm".into(),
        start: Point3::new(-right_bone.start.x, right_bone.start.y, right_bone.start.z),
        end: Point3::new(-right_bone.end.x, right_bone.end.y, right_bone.end.z),
    };
    let body = BodyModel {
        skeleton: vec![right_bone, left_bone],
        ..Default::default()
    };
    let symmetry = Symmetry::new(Point3::origin(), Vector3::x(), vec![[0, 1]]);
    assemble(
        body,
        vec![right, left],
        vec![spec.self_seam(0, spec.rows), spec.self_seam(1, spec.rows)],
        Some(symmetry),
    )
}

/// Large planar body wall `y = level` whose outside faces `+y`.
pub fn wall_body(level: f64, half: f64) -> BodyModel {
    let vertices = vec![
        Point3::new(-half, level, -half),
        Point3::new(half, level, -half),
        Point3::new(half, level, half),
        Point3::new(-half, level, half),
    ];
    // normals (+y): counterclockwise seen from +y
    let triangles = vec![[0, 2, 1], [0, 3, 2]];
    BodyModel {
        mesh: Mesh3 {
            vertices,
            triangles,
            panel_ids: Vec::new(),
        },
        skeleton: vec![Bone {
            name: "spine".into(),
            start: Point3::new(0.0, level - 10.0, 0.0),
            end: Point3::new(0.0, level - 10.0, 10.0),
        }],
        feature_points: Vec::new(),
    }
}

/// Curved height-field garment over a jittered planar pattern, so the
/// scale matrices vary from triangle to triangle.
pub fn random_patch(seed: u64, n: usize) -> GarmentDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0;
    let mut uv = Vec::new();
    let mut xyz = Vec::new();
    let (a, b) = (rng.random_range(-0.08..0.08), rng.random_range(-0.08..0.08));
    let pattern_scale = rng.random_range(0.7..1.6);
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let jitter = if i > 0 && j > 0 && i < n && j < n { 0.15 } else { 0.0 };
            let u = x + rng.random_range(-jitter..=jitter);
            let v = y + rng.random_range(-jitter..=jitter);
            uv.push(Point2::new(pattern_scale * u, pattern_scale * v));
            let z = a * (x - 0.5 * n as f64).powi(2) + b * (y - 0.5 * n as f64).powi(2);
            xyz.push(Point3::new(x, y, z));
        }
    }
    let body = BodyModel {
        skeleton: vec![Bone {
            name: "spine".into(),
            start: Point3::new(0.5 * n as f64, 0.0, -4.0),
            end: Point3::new(0.5 * n as f64, n as f64, -4.0),
        }],
        ..Default::default()
    };
    let spec = PanelSpec {
        name: "patch".into(),
        uv,
        xyz,
        triangles: grid_triangles(n + 1, n + 1),
    };
    assemble(body, vec![spec], vec![], None)
}
