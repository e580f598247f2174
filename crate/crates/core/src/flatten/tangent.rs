//! Boundary tangent constraints that keep panel outlines similar.
//!
//! For boundary vertex `i` with loop neighbours `p` and `n`, the residual
//! `(x_n - x_p)·Δy - (y_n - y_p)·Δx` vanishes exactly when the new chord is
//! parallel to the unit reference chord `(Δx, Δy)`.

use nalgebra::{Point2, Vector2};

use super::error::FlattenError;
use crate::geometry::Panel;

/// Reference chords shorter than this are skipped.
pub const MIN_CHORD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentConstraint {
    pub prev: usize,
    pub vertex: usize,
    pub next: usize,
    /// Unit reference chord.
    pub chord: Vector2<f64>,
}

impl TangentConstraint {
    pub fn residual(&self, coords: &[Point2<f64>]) -> f64 {
        let c = coords[self.next] - coords[self.prev];
        c.x * self.chord.y - c.y * self.chord.x
    }

    /// Coefficients over the interleaved unknowns `(x0, y0, x1, y1, ...)`.
    pub fn row(&self) -> [(usize, f64); 4] {
        let (dx, dy) = (self.chord.x, self.chord.y);
        [
            (2 * self.next, dy),
            (2 * self.prev, -dy),
            (2 * self.next + 1, -dx),
            (2 * self.prev + 1, dx),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TangentSet {
    pub constraints: Vec<TangentConstraint>,
    /// Boundary vertices whose reference chord was degenerate.
    pub skipped: Vec<usize>,
}

/// Constraints for a closed boundary loop, with reference chords taken from
/// `coords`.
pub fn tangent_constraints_for_loop(loop_: &[usize], coords: &[Point2<f64>]) -> Result<TangentSet, FlattenError> {
    let n = loop_.len();
    if n < 3 {
        return Err(FlattenError::TooShortBoundary { len: n });
    }
    let mut set = TangentSet::default();
    for i in 0..n {
        let prev = loop_[(i + n - 1) % n];
        let next = loop_[(i + 1) % n];
        let chord = coords[next] - coords[prev];
        let len = chord.norm();
        if len < MIN_CHORD {
            set.skipped.push(loop_[i]);
            continue;
        }
        set.constraints.push(TangentConstraint {
            prev,
            vertex: loop_[i],
            next,
            chord: chord / len,
        });
    }
    Ok(set)
}

pub fn build_tangent_constraints(panel: &Panel) -> Result<TangentSet, FlattenError> {
    tangent_constraints_for_loop(&panel.boundary, &panel.vertices)
}

pub fn max_residual(set: &TangentSet, coords: &[Point2<f64>]) -> f64 {
    set.constraints
        .iter()
        .map(|c| c.residual(coords).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_run_is_preserved_by_horizontal_similarity() {
        let coords = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        let c = TangentConstraint {
            prev: 0,
            vertex: 1,
            next: 2,
            chord: Vector2::new(1.0, 0.0),
        };
        let moved: Vec<_> = coords.iter().map(|p| Point2::new(3.0 * p.x + 5.0, p.y)).collect();
        assert_eq!(c.residual(&moved), 0.0);
    }

    #[test]
    fn perpendicular_chord_is_maximal() {
        let c = TangentConstraint {
            prev: 0,
            vertex: 1,
            next: 2,
            chord: Vector2::new(1.0, 0.0),
        };
        let coords = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 0.5), Point2::new(0.0, 1.0)];
        assert_eq!(c.residual(&coords), -1.0);
    }

    #[test]
    fn scaled_square_has_zero_residuals() {
        let square = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let set = tangent_constraints_for_loop(&[0, 1, 2, 3], &square).unwrap();
        assert_eq!(set.constraints.len(), 4);
        let doubled: Vec<_> = square.iter().map(|p| Point2::from(p.coords * 2.0)).collect();
        assert_eq!(max_residual(&set, &doubled), 0.0);
    }

    #[test]
    fn degenerate_chord_is_skipped() {
        let coords = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 0.0), Point2::new(0.5, 1.0)];
        let set = tangent_constraints_for_loop(&[0, 1, 2, 3], &coords).unwrap();
        assert_eq!(set.skipped, vec![1, 3]);
    }

    #[test]
    fn row_matches_residual() {
        let c = TangentConstraint {
            prev: 0,
            vertex: 1,
            next: 2,
            chord: Vector2::new(0.6, 0.8),
        };
        let coords = vec![Point2::new(0.3, -1.0), Point2::new(9.0, 9.0), Point2::new(2.0, 4.5)];
        let flat: Vec<f64> = coords.iter().flat_map(|p| [p.x, p.y]).collect();
        let dot: f64 = c.row().iter().map(|&(i, a)| a * flat[i]).sum();
        assert!((dot - c.residual(&coords)).abs() < 1e-15);
    }

    #[test]
    fn short_boundary_rejected() {
        let coords = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        assert_eq!(
            tangent_constraints_for_loop(&[0, 1], &coords),
            Err(FlattenError::TooShortBoundary { len: 2 })
        );
    }
}
