//! Cutting by a screen-space stroke.
//!
//! The stroke becomes a signed distance field over the garment vertices,
//! measured in pixels after projecting each vertex to the screen; the cut is
//! that field's zero level set on the panels the stroke's rays hit.

use std::collections::BTreeSet;

use nalgebra::{Point2, Point3, Vector2, Vector3};

use super::error::EditError;
use super::levelset::{level_set_cut, CutResult, Keep, ScalarField};
use super::op::{Camera, Projection, StrokeSide};
use crate::document::GarmentDocument;
use crate::geometry::query::ray_triangle;

/// Largest spacing (px) between consecutive ray samples along the stroke.
pub const SAMPLE_SPACING: f64 = 2.0;

/// Two hits count as distinct layers when their depths differ by more.
const LAYER_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lens {
    /// World units per pixel off-axis, per unit depth.
    Perspective(f64),
    /// World units per pixel.
    Orthographic(f64),
}

/// Orthonormal view basis of a camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraBasis {
    pub eye: Point3<f64>,
    pub forward: Vector3<f64>,
    pub right: Vector3<f64>,
    pub up: Vector3<f64>,
    lens: Lens,
}

impl CameraBasis {
    pub fn new(camera: &Camera) -> Result<Self, EditError> {
        let bad = |msg: &str| EditError::InvalidCamera(msg.to_string());
        let finite = camera.eye.iter().chain(&camera.target).chain(&camera.up).chain(&camera.viewport);
        if finite.into_iter().any(|x| !x.is_finite()) {
            return Err(bad("non-finite value"));
        }
        let [w, h] = camera.viewport;
        if !(w > 0.0 && h > 0.0) {
            return Err(bad("viewport must be positive"));
        }
        let eye = Point3::from(camera.eye);
        let forward = (Point3::from(camera.target) - eye)
            .try_normalize(1e-12)
            .ok_or_else(|| bad("eye and target coincide"))?;
        let right = forward
            .cross(&Vector3::from(camera.up))
            .try_normalize(1e-12)
            .ok_or_else(|| bad("up is parallel to the view direction"))?;
        let up = right.cross(&forward);
        let lens = match camera.projection {
            Projection::Perspective { fov_y } => {
                if !(fov_y > 0.0 && fov_y < 180.0) {
                    return Err(bad("fov_y must be in (0, 180) degrees"));
                }
                Lens::Perspective((0.5 * fov_y.to_radians()).tan() / (0.5 * h))
            }
            Projection::Orthographic { height } => {
                if !(height > 0.0 && height.is_finite()) {
                    return Err(bad("orthographic height must be positive"));
                }
                Lens::Orthographic(height / h)
            }
        };
        Ok(Self {
            eye,
            forward,
            right,
            up,
            lens,
        })
    }

    /// Ray through screen point `s` (pixels from the centre, y up).
    pub fn ray(&self, s: &Point2<f64>) -> (Point3<f64>, Vector3<f64>) {
        match self.lens {
            Lens::Perspective(k) => {
                let d = self.forward + self.right * (k * s.x) + self.up * (k * s.y);
                (self.eye, d.normalize())
            }
            Lens::Orthographic(scale) => {
                let o = self.eye + self.right * (scale * s.x) + self.up * (scale * s.y);
                (o, self.forward)
            }
        }
    }

    /// Screen position of a world point.
    pub fn project(&self, p: &Point3<f64>) -> Point2<f64> {
        let d = p - self.eye;
        let (x, y) = (d.dot(&self.right), d.dot(&self.up));
        match self.lens {
            Lens::Perspective(k) => {
                let z = d.dot(&self.forward).max(1e-9);
                Point2::new(x / (z * k), y / (z * k))
            }
            Lens::Orthographic(scale) => Point2::new(x / scale, y / scale),
        }
    }
}

/// Stroke points with consecutive duplicates removed.
pub fn validate_sketch(sketch: &[[f64; 2]]) -> Result<Vec<Point2<f64>>, EditError> {
    if sketch.iter().flatten().any(|x| !x.is_finite()) {
        return Err(EditError::InvalidSketch("non-finite point".into()));
    }
    let mut pts: Vec<Point2<f64>> = Vec::new();
    for p in sketch {
        let p = Point2::from(*p);
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    if pts.len() < 2 {
        return Err(EditError::InvalidSketch("needs two distinct points".into()));
    }
    Ok(pts)
}

/// Stroke resampled so no gap exceeds `max_step`.
pub fn densify(stroke: &[Point2<f64>], max_step: f64) -> Vec<Point2<f64>> {
    let mut out = vec![stroke[0]];
    for w in stroke.windows(2) {
        let n = ((w[1] - w[0]).norm() / max_step).ceil().max(1.0) as usize;
        for i in 1..=n {
            let t = i as f64 / n as f64;
            out.push(w[0] + (w[1] - w[0]) * t);
        }
    }
    out
}

/// Signed distance from `q` to the stroke with both end segments extended
/// indefinitely; positive to the left of the drawing direction.
pub fn stroke_field(stroke: &[Point2<f64>], q: &Point2<f64>) -> f64 {
    let last = stroke.len() - 2;
    let mut best = (f64::INFINITY, 0.0);
    for (i, w) in stroke.windows(2).enumerate() {
        let d: Vector2<f64> = w[1] - w[0];
        let rel = q - w[0];
        let mut t = rel.dot(&d) / d.norm_squared();
        if i > 0 {
            t = t.max(0.0);
        }
        if i < last {
            t = t.min(1.0);
        }
        let dist = (rel - d * t).norm();
        if dist < best.0 {
            let side = d.perp(&rel);
            best = (dist, if side > 0.0 { 1.0 } else if side < 0.0 { -1.0 } else { 0.0 });
        }
    }
    best.0 * best.1
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SketchHits {
    /// Panels hit first along some sample ray.
    pub front: BTreeSet<usize>,
    /// Panels hit behind the first layer.
    pub back: BTreeSet<usize>,
    /// Some ray crossed at least two distinct layers.
    pub layered: bool,
}

pub fn sketch_hits(doc: &GarmentDocument, basis: &CameraBasis, samples: &[Point2<f64>]) -> SketchHits {
    let g = &doc.garment;
    let mut out = SketchHits::default();
    for s in samples {
        let (o, d) = basis.ray(s);
        let mut hits: Vec<(f64, usize)> = (0..g.triangles.len())
            .filter_map(|t| ray_triangle(&o, &d, &g.triangle_points(t)).map(|h| (h, g.panel_ids[t])))
            .collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let first = hits[0].0;
        for &(t, p) in &hits {
            if t - first > LAYER_GAP {
                out.back.insert(p);
                out.layered = true;
            } else {
                out.front.insert(p);
            }
        }
    }
    out
}

/// Cuts the garment along a stroke. `discard` removes the part on that side
/// of the stroke; without it both parts stay as separate panels.
pub fn cut_by_sketch(
    doc: &GarmentDocument,
    sketch: &[[f64; 2]],
    camera: &Camera,
    both_sides: bool,
    discard: Option<StrokeSide>,
) -> Result<CutResult, EditError> {
    let stroke = validate_sketch(sketch)?;
    let basis = CameraBasis::new(camera)?;
    let hits = sketch_hits(doc, &basis, &densify(&stroke, SAMPLE_SPACING));
    if hits.front.is_empty() {
        return Err(EditError::NoIntersection);
    }
    if both_sides && !hits.layered {
        return Err(EditError::OpenLoop);
    }
    let mut panels = hits.front.clone();
    if both_sides {
        panels.extend(&hits.back);
    }
    let values = doc
        .garment
        .vertices
        .iter()
        .map(|p| stroke_field(&stroke, &basis.project(p)))
        .collect();
    let keep = match discard {
        Some(StrokeSide::Left) => Keep::Below,
        Some(StrokeSide::Right) => Keep::Above,
        None => Keep::Both,
    };
    level_set_cut(doc, &panels, &ScalarField { values, level: 0.0 }, keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, CylinderSpec};

    fn side_camera() -> Camera {
        Camera {
            eye: [0.0, -10.0, 0.5],
            target: [0.0, 0.0, 0.5],
            up: [0.0, 0.0, 1.0],
            projection: Projection::Orthographic { height: 4.0 },
            viewport: [400.0, 400.0],
        }
    }

    #[test]
    fn projection_inverts_rays() {
        for projection in [Projection::Orthographic { height: 4.0 }, Projection::Perspective { fov_y: 50.0 }] {
            let camera = Camera {
                projection,
                ..side_camera()
            };
            let basis = CameraBasis::new(&camera).unwrap();
            let s = Point2::new(37.0, -12.5);
            let (o, d) = basis.ray(&s);
            let q = basis.project(&(o + d * 7.0));
            assert!((q - s).norm() < 1e-9);
        }
    }

    #[test]
    fn field_sign_and_extension() {
        let stroke = [Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)];
        assert_eq!(stroke_field(&stroke, &Point2::new(5.0, 3.0)), 3.0);
        assert_eq!(stroke_field(&stroke, &Point2::new(5.0, -2.0)), -2.0);
        assert_eq!(stroke_field(&stroke, &Point2::new(-50.0, 1.0)), 1.0);
        assert_eq!(stroke_field(&stroke, &Point2::new(90.0, -4.0)), -4.0);
    }

    #[test]
    fn densified_gaps_are_small() {
        let pts = densify(&[Point2::new(0.0, 0.0), Point2::new(9.0, 0.0)], SAMPLE_SPACING);
        assert!(pts.windows(2).all(|w| (w[1] - w[0]).norm() <= SAMPLE_SPACING + 1e-12));
        assert_eq!(*pts.last().unwrap(), Point2::new(9.0, 0.0));
    }

    #[test]
    fn invalid_inputs() {
        let doc = fixtures::cylinder(CylinderSpec::default());
        let err = cut_by_sketch(&doc, &[[1.0, 1.0]], &side_camera(), false, None).unwrap_err();
        assert_eq!(err.name(), "InvalidSketch");
        let camera = Camera {
            viewport: [0.0, 10.0],
            ..side_camera()
        };
        let err = cut_by_sketch(&doc, &[[0.0, 0.0], [1.0, 0.0]], &camera, false, None).unwrap_err();
        assert_eq!(err.name(), "InvalidCamera");
        let far = [[1000.0, 1000.0], [1100.0, 1000.0]];
        assert_eq!(
            cut_by_sketch(&doc, &far, &side_camera(), false, None).unwrap_err(),
            EditError::NoIntersection
        );
    }

    #[test]
    fn horizontal_stroke_halves_the_tube() {
        let doc = fixtures::cylinder(CylinderSpec::default());
        // z = 0.6 in world units, 100 px per cm
        let sketch = [[-150.0, 10.0], [150.0, 10.0]];
        let cut = cut_by_sketch(&doc, &sketch, &side_camera(), true, Some(StrokeSide::Left)).unwrap();
        cut.doc.validate().unwrap();
        assert_eq!(cut.doc.panels.len(), 1);
        let zmax = cut.doc.garment.vertices.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        assert!((zmax - 0.6).abs() < 1e-9, "{zmax}");
    }
}
