//! Left-right symmetry plane and panel pairing.

use nalgebra::{Point3, Vector3};

#[derive(Debug, Clone, PartialEq)]
pub struct Symmetry {
    pub point: Point3<f64>,
    /// Unit plane normal.
    pub normal: Vector3<f64>,
    /// Panel pairs `[left, right]`; a panel lying across the plane is paired
    /// with itself.
    pub pairs: Vec<[usize; 2]>,
}

impl Symmetry {
    pub fn new(point: Point3<f64>, normal: Vector3<f64>, pairs: Vec<[usize; 2]>) -> Self {
        Self {
            point,
            normal: normal.normalize(),
            pairs,
        }
    }

    pub fn reflect_point(&self, p: &Point3<f64>) -> Point3<f64> {
        let d = (p - self.point).dot(&self.normal);
        p - self.normal * (2.0 * d)
    }

    pub fn reflect_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        v - self.normal * (2.0 * v.dot(&self.normal))
    }

    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        (p - self.point).dot(&self.normal)
    }

    /// Mirror counterpart of `panel`, if the pairing table lists it.
    pub fn counterpart(&self, panel: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&[a, b]| {
            if a == panel {
                Some(b)
            } else if b == panel {
                Some(a)
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_is_an_involution() {
        let s = Symmetry::new(Point3::origin(), Vector3::x(), vec![[0, 1], [2, 2]]);
        let p = Point3::new(3.5, -1.25, 7.0);
        assert_eq!(s.reflect_point(&p), Point3::new(-3.5, -1.25, 7.0));
        assert_eq!(s.reflect_point(&s.reflect_point(&p)), p);
        assert_eq!(s.counterpart(1), Some(0));
        assert_eq!(s.counterpart(2), Some(2));
        assert_eq!(s.counterpart(3), None);
    }
}
