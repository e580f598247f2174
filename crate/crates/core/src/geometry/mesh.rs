//! Garment, pattern and body mesh types.
//!
//! All coordinates are centimeters. Garment triangles are stored grouped by
//! panel: the triangles of panel 0 come first, then panel 1, and so on. Panel
//! triangle `k` of panel `p` is garment triangle `offset(p) + k`, and its
//! vertices map through the panel's `corr` table in the same order.

use nalgebra::{Point2, Point3, Vector3};

/// Triangles with an area below this (cm²) are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh3 {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// Panel id per triangle. Empty for meshes that carry no panels (the body).
    pub panel_ids: Vec<usize>,
}

impl Mesh3 {
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[usize; 3]>) -> Self {
        let panel_ids = vec![0; triangles.len()];
        Self {
            vertices,
            triangles,
            panel_ids,
        }
    }

    pub fn triangle_points(&self, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalized normal (twice the area vector).
    pub fn area_vector(&self, t: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle_points(t);
        (b - a).cross(&(c - a))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.area_vector(t).norm()
    }

    /// Unit normal, zero vector for degenerate triangles.
    pub fn normal(&self, t: usize) -> Vector3<f64> {
        let n = self.area_vector(t);
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vector3::zeros()
        }
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
}

/// One 2D sewing piece.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    pub name: String,
    pub vertices: Vec<Point2<f64>>,
    /// Local vertex indices, triangle-for-triangle with the garment sub-mesh.
    pub triangles: Vec<[usize; 3]>,
    /// Ordered boundary loop of local vertex indices.
    pub boundary: Vec<usize>,
    /// Panel vertex -> garment vertex.
    pub corr: Vec<usize>,
}

impl Panel {
    pub fn triangle_points(&self, t: usize) -> [Point2<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area_2d(&self.triangle_points(t))
    }

    /// Sum of absolute triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.signed_area(t).abs())
            .sum()
    }

    /// +1 when the triangles are counterclockwise, -1 when clockwise.
    pub fn orientation(&self) -> f64 {
        let total: f64 = (0..self.triangles.len()).map(|t| self.signed_area(t)).sum();
        if total < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Area-weighted centroid of the 2D panel.
    pub fn area_centroid(&self) -> Point2<f64> {
        let mut acc = nalgebra::Vector2::zeros();
        let mut total = 0.0;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            let w = signed_area_2d(&[a, b, c]).abs();
            acc += w * (a.coords + b.coords + c.coords) / 3.0;
            total += w;
        }
        if total > 0.0 {
            Point2::from(acc / total)
        } else {
            Point2::origin()
        }
    }

    /// 3D points of panel triangle `t` looked up through `corr`.
    pub fn garment_points(&self, garment: &Mesh3, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [
            garment.vertices[self.corr[a]],
            garment.vertices[self.corr[b]],
            garment.vertices[self.corr[c]],
        ]
    }

    /// The panel's 3D sub-mesh with panel-local vertex numbering.
    pub fn submesh(&self, garment: &Mesh3) -> Mesh3 {
        let vertices = self.corr.iter().map(|&g| garment.vertices[g]).collect();
        Mesh3::new(vertices, self.triangles.clone())
    }

    pub fn bounding_box(&self) -> (Point2<f64>, Point2<f64>) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }
}

pub fn signed_area_2d(tri: &[Point2<f64>; 3]) -> f64 {
    let u = tri[1] - tri[0];
    let v = tri[2] - tri[0];
    0.5 * (u.x * v.y - u.y * v.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bone {
    pub name: String,
    pub start: Point3<f64>,
    pub end: Point3<f64>,
}

impl Bone {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn axis(&self) -> Vector3<f64> {
        (self.end - self.start).normalize()
    }

    /// Distance from `p` to the bone segment.
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        let d = self.end - self.start;
        let t = ((p - self.start).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        (p - (self.start + t * d)).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePoint {
    pub name: String,
    pub position: Point3<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BodyModel {
    pub mesh: Mesh3,
    pub skeleton: Vec<Bone>,
    pub feature_points: Vec<FeaturePoint>,
}

/// Two garment-vertex chains stitched position by position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeamLine {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl SeamLine {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.side_a.iter().copied().zip(self.side_b.iter().copied())
    }
}
