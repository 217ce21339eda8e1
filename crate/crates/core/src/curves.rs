//! Matrix-valued curves on `[0, 1]`: sampling, length, arclength
//! reparametrization and concatenation.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::linalg::{
    eig_unitary, eigh, inv_sqrt_pd, max_abs, CMat, Hermitian, PositiveDefinite, Projection, SchattenIndex, Unitary,
    REPAIR_FACTOR, STRUCTURE_TOL,
};
use crate::spaces::{self, off_space_deviation, SpaceTag};

/// Grid size used by the verification routines.
pub const VERIFY_STEPS: usize = 2048;
/// Grid size used for files written by the command-line tool.
pub const OUTPUT_STEPS: usize = 256;

/// Refinement passes in [`reparametrize_constant_speed`].
const EQUALIZE_ITERATIONS: usize = 12;
/// Relative spread of interval lengths at which refinement stops.
const EQUALIZE_RTOL: f64 = 1e-5;

type EvalFn = dyn Fn(f64) -> CMat + Send + Sync;

/// A curve given by a closed-form evaluation map.
#[derive(Clone)]
pub struct CurveGenerator {
    space: SpaceTag,
    eval: Arc<EvalFn>,
}

impl CurveGenerator {
    pub fn new(space: SpaceTag, eval: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        CurveGenerator {
            space,
            eval: Arc::new(eval),
        }
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn eval(&self, t: f64) -> CMat {
        (self.eval)(t)
    }
}

impl fmt::Debug for CurveGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveGenerator")
            .field("space", &self.space)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub space: SpaceTag,
    pub grid: Vec<f64>,
    pub points: Vec<CMat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthReport {
    pub length: f64,
    pub speed_profile: Vec<f64>,
    /// Largest `|speed − length|` over the intervals (the mean speed on
    /// `[0, 1]` equals the length).
    pub max_speed_deviation: f64,
}

fn uniform_grid(n_steps: usize) -> Vec<f64> {
    (0..=n_steps)
        .map(|k| if k == n_steps { 1.0 } else { k as f64 / n_steps as f64 })
        .collect()
}

impl SampledCurve {
    /// Builds a curve after checking the grid and that every point lies on
    /// `space`.
    pub fn new(space: SpaceTag, grid: Vec<f64>, points: Vec<CMat>) -> Result<Self> {
        if grid.len() != points.len() || grid.len() < 2 {
            return Err(GeoError::InvalidInput(format!(
                "a curve needs at least two nodes and one matrix per node (grid {}, matrices {})",
                grid.len(),
                points.len()
            )));
        }
        if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeoError::InvalidInput("grid must increase strictly from 0 to 1".into()));
        }
        let n = points[0].nrows();
        for (index, m) in points.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(GeoError::DimensionMismatch {
                    expected: n,
                    got: m.nrows(),
                });
            }
            let deviation = off_space_deviation(space, m);
            if !(deviation <= STRUCTURE_TOL * REPAIR_FACTOR * 10.0) {
                return Err(GeoError::OffSpacePoint {
                    index,
                    space: space.name().into(),
                    deviation,
                });
            }
        }
        Ok(SampledCurve { space, grid, points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn start(&self) -> &CMat {
        &self.points[0]
    }

    pub fn end(&self) -> &CMat {
        self.points.last().unwrap()
    }

    /// Applies `f` to every point, keeping the grid.
    pub fn map_points(&self, space: SpaceTag, f: impl Fn(&CMat) -> CMat + Sync + Send) -> Result<SampledCurve> {
        let points: Vec<CMat> = self.points.par_iter().map(f).collect();
        SampledCurve::new(space, self.grid.clone(), points)
    }
}

/// Samples `g` on the uniform grid with `n_steps` intervals.
pub fn sample(g: &CurveGenerator, n_steps: usize) -> Result<SampledCurve> {
    if n_steps == 0 {
        return Err(GeoError::InvalidInput("n_steps must be at least 1".into()));
    }
    let grid = uniform_grid(n_steps);
    let points: Vec<CMat> = grid.par_iter().map(|&t| g.eval(t)).collect();
    SampledCurve::new(g.space(), grid, points)
}

/// Length contribution of a single interval from `a` to `b`.
pub fn interval_length(space: SpaceTag, a: &CMat, b: &CMat, p: SchattenIndex) -> f64 {
    match space {
        SpaceTag::Hermitian | SpaceTag::Grassmann => {
            p.combine(eigh(&Hermitian::symmetrize(b - a)).values.iter().map(|x| x.abs()))
        }
        SpaceTag::Unitary => {
            // singular values of b − a = a(a*b − I) are |e^{iφ} − 1| = 2|sin(φ/2)|
            let w = Unitary::new_unchecked(a.adjoint() * b);
            p.combine(eig_unitary(&w).phases.iter().map(|ph| 2.0 * (ph / 2.0).sin().abs()))
        }
        SpaceTag::Positive => {
            let pa = PositiveDefinite::new_unchecked(Hermitian::symmetrize(a.clone()));
            let g = inv_sqrt_pd(&pa);
            let m = Hermitian::symmetrize(b.clone()).congruence(g.matrix());
            p.combine(eigh(&m).values.iter().map(|&x| x.max(f64::MIN_POSITIVE).ln()))
        }
    }
}

/// Length of a sampled curve under the Finsler metric with index `p`.
pub fn length(c: &SampledCurve, p: SchattenIndex) -> LengthReport {
    let contributions: Vec<f64> = (0..c.n_steps())
        .into_par_iter()
        .map(|k| interval_length(c.space, &c.points[k], &c.points[k + 1], p))
        .collect();
    let mut total = 0.0;
    for &x in &contributions {
        total += x;
    }
    let speed_profile: Vec<f64> = contributions
        .iter()
        .enumerate()
        .map(|(k, &x)| x / (c.grid[k + 1] - c.grid[k]))
        .collect();
    let max_speed_deviation = speed_profile.iter().map(|s| (s - total).abs()).fold(0.0, f64::max);
    LengthReport {
        length: total,
        speed_profile,
        max_speed_deviation,
    }
}

/// Point at fraction `lambda` of the geodesic from `a` to `b`.
fn interpolate(space: SpaceTag, a: &CMat, b: &CMat, lambda: f64) -> CMat {
    if lambda <= 0.0 {
        return a.clone();
    }
    if lambda >= 1.0 {
        return b.clone();
    }
    match space {
        SpaceTag::Hermitian => a + (b - a).scale(lambda),
        SpaceTag::Unitary => {
            spaces::geodesic_unitary(&Unitary::new_unchecked(a.clone()), &Unitary::new_unchecked(b.clone()))
                .eval(lambda)
        }
        SpaceTag::Positive => spaces::geodesic_positive(
            &PositiveDefinite::new_unchecked(Hermitian::symmetrize(a.clone())),
            &PositiveDefinite::new_unchecked(Hermitian::symmetrize(b.clone())),
        )
        .eval(lambda),
        SpaceTag::Grassmann => {
            let pa = Projection::new(a.clone());
            let pb = Projection::new(b.clone());
            match (pa, pb) {
                (Ok(pa), Ok(pb)) => match spaces::geodesic_grassmann(&pa, &pb) {
                    Ok(g) => g.eval(lambda),
                    Err(_) => {
                        if lambda < 0.5 {
                            a.clone()
                        } else {
                            b.clone()
                        }
                    }
                },
                _ => {
                    if lambda < 0.5 {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
            }
        }
    }
}

/// Resamples `c` so that its nodes are equally spaced in arclength, moving
/// along the space's geodesic between consecutive samples.
///
/// Nodes are first placed by inverting the cumulative length of `c`. An
/// interval that straddles a corner of the sampled polyline is then shorter
/// than its share, so the nodes are moved by inverting the cumulative length
/// of the resampled curve itself until the interval lengths agree.
pub fn reparametrize_constant_speed(c: &SampledCurve, p: SchattenIndex) -> Result<SampledCurve> {
    let report = length(c, p);
    if !(report.length > 0.0) {
        return Err(GeoError::ZeroLength);
    }
    let n = c.n_steps();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for (k, s) in report.speed_profile.iter().enumerate() {
        let prev = cumulative[k];
        cumulative.push(prev + s * (c.grid[k + 1] - c.grid[k]));
    }
    let total = cumulative[n];
    let grid = uniform_grid(n);
    let point_at = |x: f64| -> CMat {
        // last node with cumulative ≤ x, clamped to a valid interval
        let k = cumulative.partition_point(|&y| y <= x).saturating_sub(1).min(n - 1);
        let span = cumulative[k + 1] - cumulative[k];
        let lambda = if span > 0.0 {
            ((x - cumulative[k]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let lambda = if lambda < 1e-12 {
            0.0
        } else if lambda > 1.0 - 1e-12 {
            1.0
        } else {
            lambda
        };
        interpolate(c.space, &c.points[k], &c.points[k + 1], lambda)
    };

    let mut positions: Vec<f64> = grid.iter().map(|&u| u * total).collect();
    positions[n] = total;
    let mut points: Vec<CMat> = positions.par_iter().map(|&x| point_at(x)).collect();
    for _ in 0..EQUALIZE_ITERATIONS {
        let pieces: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| interval_length(c.space, &points[k], &points[k + 1], p))
            .collect();
        let sum: f64 = pieces.iter().sum();
        if !(sum > 0.0) {
            break;
        }
        let share = sum / n as f64;
        let worst = pieces.iter().map(|x| (x - share).abs()).fold(0.0, f64::max);
        if worst <= EQUALIZE_RTOL * share {
            break;
        }
        let mut covered = Vec::with_capacity(n + 1);
        covered.push(0.0);
        for (k, x) in pieces.iter().enumerate() {
            let prev = covered[k];
            covered.push(prev + x);
        }
        let mut moved = positions.clone();
        for (j, slot) in moved.iter_mut().enumerate().take(n).skip(1) {
            let target = j as f64 * share;
            let k = covered.partition_point(|&y| y <= target).saturating_sub(1).min(n - 1);
            let span = covered[k + 1] - covered[k];
            let lambda = if span > 0.0 {
                ((target - covered[k]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
            *slot = positions[k] + lambda * (positions[k + 1] - positions[k]);
        }
        positions = moved;
        points = positions.par_iter().map(|&x| point_at(x)).collect();
    }
    SampledCurve::new(c.space, grid, points)
}

/// Joins `c1` and `c2`, placing the joint at `L(c1) / (L(c1) + L(c2))` so
/// that constant-speed inputs give a constant-speed result.
pub fn concatenate(c1: &SampledCurve, c2: &SampledCurve, p: SchattenIndex) -> Result<SampledCurve> {
    if c1.space != c2.space {
        return Err(GeoError::SpaceMismatch);
    }
    if c1.dim() != c2.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: c1.dim(),
            got: c2.dim(),
        });
    }
    let gap = max_abs(&(c1.end() - c2.start()));
    if gap > 1e-8 * max_abs(c1.end()).max(1.0) {
        return Err(GeoError::EndpointMismatch { gap });
    }
    let l1 = length(c1, p).length;
    let l2 = length(c2, p).length;
    if l2 == 0.0 {
        return Ok(c1.clone());
    }
    if l1 == 0.0 {
        return Ok(c2.clone());
    }
    let tau = l1 / (l1 + l2);
    let mut grid: Vec<f64> = c1.grid.iter().map(|t| t * tau).collect();
    let mut points = c1.points.clone();
    for (t, m) in c2.grid.iter().zip(&c2.points).skip(1) {
        grid.push(tau + t * (1.0 - tau));
        points.push(m.clone());
    }
    *grid.last_mut().unwrap() = 1.0;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GeoError::InvalidInput(
            "concatenation produced a degenerate grid".into(),
        ));
    }
    Ok(SampledCurve {
        space: c1.space,
        grid,
        points,
    })
}

/// Tangent-norm speed at the left node of each interval, computed from
/// forward differences. Agrees with [`length`]'s speed profile to first
/// order; kept for diagnostics.
pub fn forward_difference_speeds(c: &SampledCurve, p: SchattenIndex) -> Result<Vec<f64>> {
    (0..c.n_steps())
        .map(|k| {
            let dt = c.grid[k + 1] - c.grid[k];
            let v = (&c.points[k + 1] - &c.points[k]).unscale(dt);
            spaces::tangent_norm(c.space, &c.points[k], &v, p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::linalg::{diag_real, PositiveDefinite};
    use crate::spaces::{constant_curve, geodesic};

    #[test]
    fn constant_generator() {
        let m = diag_real(&[1.0, 2.0]);
        let c = sample(&constant_curve(SpaceTag::Hermitian, m.clone()), 8).unwrap();
        assert!(c.points.iter().all(|x| x == &m));
        assert_eq!(length(&c, SchattenIndex::One).length, 0.0);
    }

    #[test]
    fn unitary_quarter_steps() {
        let g = geodesic(
            SpaceTag::Unitary,
            &CMat::identity(1, 1),
            &CMat::identity(1, 1).scale(-1.0),
        )
        .unwrap();
        let c = sample(&g, 4).unwrap();
        for (k, m) in c.points.iter().enumerate() {
            let z = Complex64::from_polar(1.0, k as f64 * PI / 4.0);
            assert!((m[(0, 0)] - z).norm() < 1e-15);
        }
    }

    #[test]
    fn hermitian_segment_length_exact() {
        let d = diag_real(&[3.0, -4.0]);
        let g = geodesic(SpaceTag::Hermitian, &CMat::zeros(2, 2), &d).unwrap();
        let r = length(&sample(&g, 8).unwrap(), SchattenIndex::One);
        assert!((r.length - 7.0).abs() < 1e-13);
        assert!(r.max_speed_deviation < 1e-12);
    }

    #[test]
    fn positive_log_form_exact_on_geodesic() {
        let b = PositiveDefinite::new(diag_real(&[5.0, 0.5])).unwrap();
        let g = geodesic(SpaceTag::Positive, &CMat::identity(2, 2), b.matrix()).unwrap();
        for n in [1, 3, 16] {
            let r = length(&sample(&g, n).unwrap(), SchattenIndex::One);
            assert!((r.length - (5f64.ln() + 2f64.ln())).abs() < 1e-13);
        }
    }

    #[test]
    fn segment_with_quadratic_speed_is_restored() {
        let d = diag_real(&[1.0, -2.0]);
        let grid = uniform_grid(64);
        let points = grid.iter().map(|t| d.scale(t * t)).collect();
        let c = SampledCurve::new(SpaceTag::Hermitian, grid, points).unwrap();
        let r = reparametrize_constant_speed(&c, SchattenIndex::One).unwrap();
        for (k, m) in r.points.iter().enumerate() {
            let t = k as f64 / 64.0;
            assert!(max_abs(&(m - d.scale(t))) < 1e-12);
        }
        let rep = length(&r, SchattenIndex::One);
        assert!(rep.max_speed_deviation < 1e-3 * rep.length);
    }

    #[test]
    fn zero_length_reparametrization() {
        let c = sample(&constant_curve(SpaceTag::Hermitian, CMat::zeros(2, 2)), 8).unwrap();
        assert_eq!(
            reparametrize_constant_speed(&c, SchattenIndex::Inf).unwrap_err().code(),
            "ZERO_LENGTH"
        );
    }

    #[test]
    fn concatenation_errors() {
        let a = sample(&constant_curve(SpaceTag::Hermitian, CMat::zeros(2, 2)), 8).unwrap();
        let b = sample(&constant_curve(SpaceTag::Hermitian, CMat::identity(2, 2)), 8).unwrap();
        assert_eq!(
            concatenate(&a, &b, SchattenIndex::One).unwrap_err().code(),
            "ENDPOINT_MISMATCH"
        );
        let u = sample(&constant_curve(SpaceTag::Unitary, CMat::identity(2, 2)), 8).unwrap();
        assert_eq!(
            concatenate(&b, &u, SchattenIndex::One).unwrap_err().code(),
            "SPACE_MISMATCH"
        );
    }

    #[test]
    fn off_space_samples_rejected() {
        let g = CurveGenerator::new(SpaceTag::Unitary, |t| CMat::identity(2, 2).scale(1.0 + t));
        assert_eq!(sample(&g, 8).unwrap_err().code(), "OFF_SPACE_POINT");
    }
}
