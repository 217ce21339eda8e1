use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{matrix_json, CheckResult, Tally};
use crate::curves::{length, sample, SampledCurve};
use crate::error::{GeoError, Result};
use crate::linalg::{
    commutator_residual, eig_unitary, eigh, exp_h, frechet_exp, max_abs, pinch, powf_pd, schatten_norm,
    schatten_norm_hermitian, Hermitian, PositiveDefinite, ProjectorSystem, SchattenIndex, Unitary,
};
use crate::minimal::{is_minimal_hermitian_trace, UnitaryFamilyMember, DEFAULT_ENDPOINT_TOLERANCE};
use crate::spaces::{dist_positive, geodesic_positive, SpaceTag};

const MONOTONE_SLACK: f64 = 1e-7;
const COLLISION_TOL: f64 = 1e-10;

fn require_space(c: &SampledCurve, space: SpaceTag) -> Result<()> {
    if c.space != space {
        return Err(GeoError::SpaceMismatch);
    }
    Ok(())
}

/// Length of a pinched `H(n)` curve against the original, and against
/// `‖c(1)‖_1` when the curve passes the minimality test.
pub fn check_pinching_minimality(c: &SampledCurve, system: &ProjectorSystem) -> Result<CheckResult> {
    require_space(c, SpaceTag::Hermitian)?;
    let scale = max_abs(c.end()).max(1.0);
    let start = max_abs(c.start());
    if start > 1e-12 * scale {
        return Err(GeoError::BadStart { norm: start });
    }
    for (index, p) in system.projectors().iter().enumerate() {
        let residual = commutator_residual(p.matrix(), c.end());
        if residual > 1e-8 * scale {
            return Err(GeoError::NoncommutingSystem { index, residual });
        }
    }
    let pinched = c.map_points(SpaceTag::Hermitian, |m| pinch(system, m).expect("dimensions checked"))?;
    let original = length(c, SchattenIndex::One).length;
    let reduced = length(&pinched, SchattenIndex::One).length;
    let mut tally = Tally::new("pinching_minimality", 1e-9);
    tally.seed();
    tally.observe(
        reduced - original,
        || json!({ "original": original, "pinched": reduced }),
    );
    let verdict = is_minimal_hermitian_trace(c, DEFAULT_ENDPOINT_TOLERANCE)?;
    if verdict.supported() {
        let target = verdict.endpoint_trace_norm;
        let rel = if target > 0.0 {
            (reduced - target).abs() / target
        } else {
            reduced
        };
        tally.observe_scaled(
            rel,
            1e-4,
            || json!({ "pinched": reduced, "endpoint_trace_norm": target }),
        );
    }
    Ok(tally.finish())
}

/// Each diagonal entry of a curve with diagonal endpoint moves
/// monotonically towards its final value; entries ending at zero stay at
/// zero.
pub fn check_diagonal_monotonicity(c: &SampledCurve) -> Result<CheckResult> {
    require_space(c, SpaceTag::Hermitian)?;
    let end = c.end();
    let n = c.dim();
    let scale = max_abs(end).max(1.0);
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| end[(i, j)].norm())
        .fold(0.0, f64::max);
    if off > 1e-8 * scale {
        return Err(GeoError::PreconditionViolated(format!(
            "endpoint is not diagonal (off-diagonal mass {off:.3e})"
        )));
    }
    let mut tally = Tally::new("diagonal_monotonicity", MONOTONE_SLACK);
    tally.seed();
    for i in 0..n {
        let d = end[(i, i)].re;
        let zero = d.abs() <= 1e-12 * scale;
        for k in 0..c.n_steps() {
            let (a, b) = (c.points[k][(i, i)].re, c.points[k + 1][(i, i)].re);
            let violation = if zero {
                b.abs()
            } else if d > 0.0 {
                a - b
            } else {
                b - a
            };
            tally.observe(
                violation,
                || json!({ "entry": i, "node": k, "from": a, "to": b, "endpoint": d }),
            );
        }
    }
    Ok(tally.finish())
}

/// Phase curves of a unitary curve, tracked by nearest matching on the
/// circle. Returns one unwrapped curve per eigenvalue.
///
/// At every step the sorted phases are matched to the tracked ones by the
/// cyclic shift minimizing the largest move; moves above `π/4` are refused.
/// An interior node where two curves meet within `1e-10` while separated on
/// both neighbouring nodes cannot be resolved (crossing or bounce) and is
/// reported as [`GeoError::TrackingAmbiguous`].
pub fn track_phases(c: &SampledCurve) -> Result<Vec<Vec<f64>>> {
    require_space(c, SpaceTag::Unitary)?;
    let n = c.dim();
    let nodes = c.points.len();
    let phases: Vec<Vec<f64>> = c
        .points
        .par_iter()
        .map(|m| {
            let mut p = eig_unitary(&Unitary::new_unchecked(m.clone())).phases;
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            p
        })
        .collect();
    let wrap = |x: f64| {
        let mut y = x.rem_euclid(2.0 * PI);
        if y > PI {
            y -= 2.0 * PI;
        }
        y
    };
    let mut curves: Vec<Vec<f64>> = (0..n).map(|j| vec![phases[0][j]]).collect();
    for (k, current) in phases.iter().enumerate().skip(1) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (wrap(curves[a][k - 1]), wrap(curves[b][k - 1]));
            pa.partial_cmp(&pb).unwrap().then(a.cmp(&b))
        });
        let mut best: Option<(f64, usize)> = None;
        for shift in 0..n {
            let cost = order
                .iter()
                .enumerate()
                .map(|(r, &j)| wrap(current[(r + shift) % n] - curves[j][k - 1]).abs())
                .fold(0.0, f64::max);
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, shift));
            }
        }
        let (cost, shift) = best.expect("non-empty");
        if cost > FRAC_PI_4 {
            return Err(GeoError::TrackingAmbiguous { node: k });
        }
        for (r, &j) in order.iter().enumerate() {
            let prev = curves[j][k - 1];
            curves[j].push(prev + wrap(current[(r + shift) % n] - prev));
        }
    }
    for k in 1..nodes.saturating_sub(1) {
        for a in 0..n {
            for b in a + 1..n {
                let gap = |i: usize| wrap(curves[a][i] - curves[b][i]).abs();
                if gap(k) < COLLISION_TOL && gap(k - 1) > COLLISION_TOL && gap(k + 1) > COLLISION_TOL {
                    return Err(GeoError::TrackingAmbiguous { node: k });
                }
            }
        }
    }
    Ok(curves)
}

/// Eigenvalue curves of a sampled curve: sorted eigenvalues for Hermitian,
/// positive and projection-valued curves, tracked phases for unitary ones.
pub fn eigen_curves(c: &SampledCurve) -> Result<Vec<Vec<f64>>> {
    if c.space == SpaceTag::Unitary {
        return track_phases(c);
    }
    let values: Vec<Vec<f64>> = c
        .points
        .par_iter()
        .map(|m| eigh(&Hermitian::symmetrize(m.clone())).values)
        .collect();
    Ok((0..c.dim()).map(|j| values.iter().map(|v| v[j]).collect()).collect())
}

/// Every eigenvalue (or phase) curve is monotone, in whichever direction
/// it moves.
pub fn check_eigencurve_monotonicity(c: &SampledCurve, space: SpaceTag) -> Result<CheckResult> {
    require_space(c, space)?;
    let curves = eigen_curves(c)?;
    let mut tally = Tally::new("eigencurve_monotonicity", MONOTONE_SLACK);
    tally.seed();
    for (j, curve) in curves.iter().enumerate() {
        let (mut up, mut down) = (0.0f64, 0.0f64);
        for w in curve.windows(2) {
            up = up.max(w[0] - w[1]);
            down = down.max(w[1] - w[0]);
        }
        tally.observe(
            up.min(down),
            || json!({ "curve": j, "backward_up": up, "backward_down": down }),
        );
    }
    Ok(tally.finish())
}

/// `‖e^{−h/2} Dexp(h)[k] e^{−h/2}‖_p ≥ ‖k‖_p`, measured relative to
/// `max(1, ‖k‖_p)`.
pub fn check_iemi(h: &Hermitian, k: &Hermitian, p: SchattenIndex) -> Result<CheckResult> {
    let d = frechet_exp(h, k)?;
    let half = exp_h(&h.scale(-0.5));
    let lhs = schatten_norm(&(half.matrix() * d.matrix() * half.matrix()), p);
    let rhs = schatten_norm_hermitian(k, p);
    let mut tally = Tally::new("iemi", 1e-10);
    tally.seed();
    tally.observe((rhs - lhs) / rhs.max(1.0), || {
        json!({ "h": matrix_json(h.matrix()), "k": matrix_json(k.matrix()), "p": p.to_string(), "lhs": lhs, "rhs": rhs })
    });
    Ok(tally.finish())
}

/// `d(c^t, d^t) ≤ t d(c, d)` in `Gl(n)+`.
pub fn check_araki_contraction(
    c: &PositiveDefinite,
    d: &PositiveDefinite,
    t: f64,
    p: SchattenIndex,
) -> Result<CheckResult> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeoError::InvalidInput(format!("t must lie in [0, 1], got {t}")));
    }
    if c.dim() != d.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: c.dim(),
            got: d.dim(),
        });
    }
    let lhs = dist_positive(&powf_pd(c, t), &powf_pd(d, t), p);
    let rhs = t * dist_positive(c, d, p);
    let mut tally = Tally::new("araki_contraction", 1e-9);
    tally.seed();
    tally.observe(lhs - rhs, || {
        json!({ "c": matrix_json(c.matrix()), "d": matrix_json(d.matrix()), "t": t, "p": p.to_string(), "lhs": lhs, "rhs": rhs })
    });
    Ok(tally.finish())
}

/// Midpoint convexity of `s ↦ d(I, γ(s))` along the geodesic from `a` to
/// `b`, over all pairs of a uniform grid.
pub fn check_convexity_distance(
    a: &PositiveDefinite,
    b: &PositiveDefinite,
    p: SchattenIndex,
    grid_size: usize,
) -> Result<CheckResult> {
    if grid_size < 3 {
        return Err(GeoError::InvalidInput("grid_size must be at least 3".into()));
    }
    if a.dim() != b.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let g = geodesic_positive(a, b);
    // doubled grid so that every midpoint of a grid pair is a node
    let fine = 2 * (grid_size - 1);
    let f: Vec<f64> = (0..=fine)
        .into_par_iter()
        .map(|i| {
            let m = Hermitian::symmetrize(g.eval(i as f64 / fine as f64));
            p.combine(eigh(&m).values.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()))
        })
        .collect();
    let mut tally = Tally::new("distance_convexity", 1e-9);
    tally.seed();
    for i in 0..grid_size {
        for j in i + 1..grid_size {
            let (fi, fj, fm) = (f[2 * i], f[2 * j], f[i + j]);
            tally.observe(fm - 0.5 * (fi + fj), || {
                json!({ "a": matrix_json(a.matrix()), "b": matrix_json(b.matrix()), "s1": i, "s2": j, "grid": grid_size })
            });
        }
    }
    Ok(tally.finish())
}

/// Sampled diagnostics of a member of the unitary minimal family.
#[derive(Debug, Clone, Serialize)]
pub struct StructureDiagnostics {
    pub length: f64,
    pub expected_length: f64,
    pub relative_length_error: f64,
    /// Largest deviation of the top-block compression from
    /// `expi(t X_S)`, including off-block leakage.
    pub block_lock_residual: f64,
    /// Largest `|d_∞(I, α(r)) − r d_∞(I, α(1))|` over `r = k/16`.
    pub linearity_residual: f64,
    pub endpoint_residual: f64,
}

pub fn structure_diagnostics(
    member: &UnitaryFamilyMember,
    target: &Unitary,
    n_steps: usize,
) -> Result<StructureDiagnostics> {
    let c = sample(&member.generator, n_steps)?;
    let l = length(&c, SchattenIndex::Inf).length;
    let expected = member.length();
    let top = member.split.block_basis(true);
    let rest = member.split.block_basis(false);
    let y = top.adjoint() * member.x.matrix() * &top;
    let values: Vec<f64> = (0..y.nrows()).map(|i| y[(i, i)].re).collect();
    let block_lock_residual = c
        .grid
        .par_iter()
        .zip(c.points.par_iter())
        .map(|(&t, m)| {
            let mut local = top.adjoint() * m * &top;
            for (i, &v) in values.iter().enumerate() {
                local[(i, i)] -= Complex64::from_polar(1.0, t * v);
            }
            let mut r = max_abs(&local);
            if rest.ncols() > 0 {
                r = r
                    .max(max_abs(&(top.adjoint() * m * &rest)))
                    .max(max_abs(&(rest.adjoint() * m * &top)));
            }
            r
        })
        .reduce(|| 0.0, f64::max);
    let linearity_residual = (0..=16)
        .map(|k| {
            let r = k as f64 / 16.0;
            let point = Unitary::new_unchecked(member.generator.eval(r));
            let d = SchattenIndex::Inf.combine(eig_unitary(&point).phases);
            (d - r * expected).abs()
        })
        .fold(0.0, f64::max);
    Ok(StructureDiagnostics {
        length: l,
        expected_length: expected,
        relative_length_error: (l - expected).abs() / expected,
        block_lock_residual,
        linearity_residual,
        endpoint_residual: max_abs(&(c.end() - target.matrix())),
    })
}
