//! Local-global stitching of per-triangle targets into one panel.
//!
//! Energy, over unknown 2D positions `x` and per-triangle rotations `R`:
//!
//! ```text
//! E = Σ_t Σ_(i→j in t) ‖(x_j - x_i) - R_t (r_j - r_i)‖²
//!   + w1 Σ_c ‖x_c - C_c‖²
//!   + w2 Σ_b r_b(x)²
//! ```
//!
//! where `r` are the target triangle's vertex positions. The local step
//! fits each `R_t` in closed form; the global step is a linear least-squares
//! solve whose normal matrix does not depend on `R`, so it is factored once.

use nalgebra::{Matrix2, Point2, Vector2};

use super::error::FlattenError;
use super::tangent::TangentConstraint;
use crate::geometry::frame::{frame_vertex_positions, rotation};
use crate::linalg::{EnvelopeCholesky, SymmetricBuilder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub w1: f64,
    pub w2: f64,
    pub max_iterations: usize,
    pub rel_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            w1: 1000.0,
            w2: 1000.0,
            max_iterations: 50,
            rel_tolerance: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), FlattenError> {
        if !(self.w1 > 0.0 && self.w2 > 0.0) {
            return Err(FlattenError::InvalidProblem("weights must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(FlattenError::InvalidProblem("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StitchProblem {
    pub vertex_count: usize,
    pub triangles: Vec<[usize; 3]>,
    /// Target vertex positions per triangle, in triangle order.
    pub rest: Vec<[Vector2<f64>; 3]>,
    pub fixed: Vec<(usize, Point2<f64>)>,
    pub tangents: Vec<TangentConstraint>,
}

impl StitchProblem {
    /// Problem from target frame matrices. `orientation` is `-1` for panels
    /// whose triangles run clockwise, so targets are mirrored to match.
    pub fn from_frames(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        frames: &[Matrix2<f64>],
        designated_edges: &[usize],
        orientation: f64,
    ) -> Self {
        let flip = Matrix2::new(1.0, 0.0, 0.0, orientation.signum());
        let rest = frames
            .iter()
            .zip(designated_edges)
            .map(|(f, &e)| frame_vertex_positions(f, e).map(|p| flip * p))
            .collect();
        Self {
            vertex_count,
            triangles,
            rest,
            fixed: Vec::new(),
            tangents: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), FlattenError> {
        let n = self.vertex_count;
        if self.rest.len() != self.triangles.len() {
            return Err(FlattenError::MismatchedTopology {
                expected: self.triangles.len(),
                found: self.rest.len(),
            });
        }
        if self.triangles.iter().flatten().any(|&v| v >= n) {
            return Err(FlattenError::InvalidProblem("triangle index out of range".into()));
        }
        let mut fixed: Vec<usize> = self.fixed.iter().map(|&(v, _)| v).collect();
        fixed.sort_unstable();
        fixed.dedup();
        if fixed.len() < 2 {
            return Err(FlattenError::InvalidProblem("need at least two fixed vertices".into()));
        }
        if fixed.iter().any(|&v| v >= n) {
            return Err(FlattenError::InvalidProblem("fixed vertex out of range".into()));
        }
        if self
            .tangents
            .iter()
            .any(|c| c.prev >= n || c.next >= n || c.vertex >= n)
        {
            return Err(FlattenError::InvalidProblem("tangent vertex out of range".into()));
        }
        let finite = self.rest.iter().flatten().all(|p| p.iter().all(|x| x.is_finite()))
            && self.fixed.iter().all(|(_, p)| p.x.is_finite() && p.y.is_finite())
            && self.tangents.iter().all(|c| c.chord.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(FlattenError::NonFiniteInput);
        }
        Ok(())
    }

    /// Per-half-edge target vectors `(i, j, R_t (r_j - r_i))`.
    pub fn edge_targets(&self, rotations: &[Matrix2<f64>]) -> Vec<(usize, usize, Vector2<f64>)> {
        let mut out = Vec::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let r = &self.rest[t];
            for k in 0..3 {
                let l = (k + 1) % 3;
                out.push((tri[k], tri[l], rotations[t] * (r[l] - r[k])));
            }
        }
        out
    }

    /// Closed-form best rotation per triangle for the given coordinates.
    pub fn fit_rotations(&self, coords: &[Point2<f64>]) -> Vec<Matrix2<f64>> {
        self.triangles
            .iter()
            .zip(&self.rest)
            .map(|(tri, r)| {
                let (mut cross, mut dot) = (0.0, 0.0);
                for k in 0..3 {
                    let l = (k + 1) % 3;
                    let e = r[l] - r[k];
                    let g = coords[tri[l]] - coords[tri[k]];
                    cross += e.x * g.y - e.y * g.x;
                    dot += e.dot(&g);
                }
                rotation(cross.atan2(dot))
            })
            .collect()
    }

    pub fn energy(&self, coords: &[Point2<f64>], rotations: &[Matrix2<f64>], config: &SolverConfig) -> f64 {
        let mut e = 0.0;
        for (i, j, d) in self.edge_targets(rotations) {
            e += ((coords[j] - coords[i]) - d).norm_squared();
        }
        for &(c, p) in &self.fixed {
            e += config.w1 * (coords[c] - p).norm_squared();
        }
        for t in &self.tangents {
            let r = t.residual(coords);
            e += config.w2 * r * r;
        }
        e
    }
}

/// The factored global step of one problem.
#[derive(Debug, Clone)]
pub struct GlobalStep {
    problem: StitchProblem,
    config: SolverConfig,
    factor: EnvelopeCholesky,
}

impl GlobalStep {
    pub fn new(problem: StitchProblem, config: SolverConfig) -> Result<Self, FlattenError> {
        config.validate()?;
        problem.validate()?;
        let n = problem.vertex_count;
        let mut h = SymmetricBuilder::new(2 * n);
        for tri in &problem.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                for c in 0..2 {
                    h.add_outer(&[(2 * j + c, 1.0), (2 * i + c, -1.0)], 1.0);
                }
            }
        }
        for &(v, _) in &problem.fixed {
            h.add(2 * v, 2 * v, config.w1);
            h.add(2 * v + 1, 2 * v + 1, config.w1);
        }
        for t in &problem.tangents {
            h.add_outer(&t.row(), config.w2);
        }
        let factor = h.factor()?;
        Ok(Self { problem, config, factor })
    }

    pub fn problem(&self) -> &StitchProblem {
        &self.problem
    }

    /// Coordinates minimizing the energy for fixed rotations.
    pub fn solve(&self, rotations: &[Matrix2<f64>]) -> Vec<Point2<f64>> {
        let n = self.problem.vertex_count;
        let mut b = vec![0.0; 2 * n];
        for (i, j, d) in self.problem.edge_targets(rotations) {
            b[2 * j] += d.x;
            b[2 * i] -= d.x;
            b[2 * j + 1] += d.y;
            b[2 * i + 1] -= d.y;
        }
        for &(v, p) in &self.problem.fixed {
            b[2 * v] += self.config.w1 * p.x;
            b[2 * v + 1] += self.config.w1 * p.y;
        }
        let z = self.factor.solve(&b);
        (0..n).map(|v| Point2::new(z[2 * v], z[2 * v + 1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StitchResult {
    pub coords: Vec<Point2<f64>>,
    /// Energy at the initial guess, then after every global step.
    pub energy_trace: Vec<f64>,
    /// Rotations used by the last global step.
    pub rotations: Vec<Matrix2<f64>>,
    pub iterations: usize,
}

pub fn stitch(
    problem: &StitchProblem,
    initial: &[Point2<f64>],
    config: &SolverConfig,
) -> Result<StitchResult, FlattenError> {
    if initial.len() != problem.vertex_count {
        return Err(FlattenError::MismatchedTopology {
            expected: problem.vertex_count,
            found: initial.len(),
        });
    }
    if initial.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(FlattenError::NonFiniteInput);
    }
    let step = GlobalStep::new(problem.clone(), *config)?;

    let mut coords = initial.to_vec();
    let mut rotations = problem.fit_rotations(&coords);
    let mut energy = problem.energy(&coords, &rotations, config);
    let mut trace = vec![energy];
    let mut iterations = 0;
    while iterations < config.max_iterations {
        if iterations > 0 {
            rotations = problem.fit_rotations(&coords);
        }
        coords = step.solve(&rotations);
        iterations += 1;
        let next = problem.energy(&coords, &rotations, config);
        trace.push(next);
        let change = (energy - next).abs();
        energy = next;
        if !energy.is_finite() {
            return Err(FlattenError::NonFiniteInput);
        }
        if energy <= f64::MIN_POSITIVE || change <= config.rel_tolerance * trace[trace.len() - 2] {
            break;
        }
    }
    Ok(StitchResult {
        coords,
        energy_trace: trace,
        rotations,
        iterations,
    })
}

/// Whether every step of `trace` is non-increasing up to `1e-12` slack.
pub fn is_monotone(trace: &[f64]) -> bool {
    trace
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frame::local_frame;

    fn unit_square() -> (Vec<Point2<f64>>, Vec<[usize; 3]>) {
        (
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    fn frames(coords: &[Point2<f64>], tris: &[[usize; 3]], scale: f64) -> Vec<Matrix2<f64>> {
        tris.iter()
            .map(|t| local_frame(&t.map(|v| coords[v]), 0).unwrap().matrix * scale)
            .collect()
    }

    #[test]
    fn zero_residual_fixed_point() {
        let (coords, tris) = unit_square();
        let f = frames(&coords, &tris, 1.0);
        let mut p = StitchProblem::from_frames(4, tris.clone(), &f, &[0, 0], 1.0);
        p.fixed = vec![(0, coords[0]), (1, coords[1])];
        let r = stitch(&p, &coords, &SolverConfig::default()).unwrap();
        for (a, b) in r.coords.iter().zip(&coords) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(r.energy_trace.last().unwrap().abs() < 1e-18);
    }

    #[test]
    fn doubled_square_grows_away_from_fixed_edge() {
        let (coords, tris) = unit_square();
        let f = frames(&coords, &tris, 2.0);
        let mut p = StitchProblem::from_frames(4, tris, &f, &[0, 0], 1.0);
        p.fixed = vec![(0, coords[0]), (1, coords[1])];
        let r = stitch(&p, &coords, &SolverConfig::default()).unwrap();
        assert!(is_monotone(&r.energy_trace));
        // the doubled square cannot fit a unit-length fixed edge exactly;
        // the top edge must sit well above the original
        assert!(r.coords[2].y > 1.5 && r.coords[3].y > 1.5);
    }

    #[test]
    fn clockwise_targets_are_mirrored() {
        let coords = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)];
        let tris = vec![[0, 1, 2]];
        let f = frames(&coords, &tris, 1.0);
        let mut p = StitchProblem::from_frames(3, tris, &f, &[0], -1.0);
        p.fixed = vec![(0, coords[0]), (1, coords[1])];
        let r = stitch(&p, &coords, &SolverConfig::default()).unwrap();
        assert!((r.coords[2] - coords[2]).norm() < 1e-9);
    }

    #[test]
    fn rejects_underconstrained_problem() {
        let (coords, tris) = unit_square();
        let f = frames(&coords, &tris, 1.0);
        let mut p = StitchProblem::from_frames(4, tris, &f, &[0, 0], 1.0);
        p.fixed = vec![(0, coords[0])];
        assert!(matches!(
            stitch(&p, &coords, &SolverConfig::default()),
            Err(FlattenError::InvalidProblem(_))
        ));
    }

    #[test]
    fn rejects_non_finite_guess() {
        let (mut coords, tris) = unit_square();
        let f = frames(&coords, &tris, 1.0);
        let mut p = StitchProblem::from_frames(4, tris, &f, &[0, 0], 1.0);
        p.fixed = vec![(0, coords[0]), (1, coords[1])];
        coords[2].x = f64::NAN;
        assert_eq!(
            stitch(&p, &coords, &SolverConfig::default()),
            Err(FlattenError::NonFiniteInput)
        );
    }
}
