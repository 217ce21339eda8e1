use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::linalg::{
    diag_real, eigh, inv_sqrt_pd, sqrt_pd, CMat, Hermitian, PositiveDefinite, Projection, SchattenIndex, Unitary,
};
use crate::minimal::{minimal_family_grassmann, minimal_family_unitary, PerturbationSpec};
use crate::random::{derive_seed, haar_unitary, rng, uniform, SeededRng};
use crate::spaces::{dist, geodesic, geodesic_unitary, SpaceTag};

/// Relative tolerance of the membership test `W ∈ M_t(u, v)`.
pub const MEMBERSHIP_RTOL: f64 = 1e-6;

const ANTIPODAL_NOTE: &str = "convexity of intermediate sets fails at distance pi/2 and beyond: \
     for u = I, v = -I the points exp(+-i t pi) I lie in M_t, yet the geodesic midpoint between them is I, which lies outside M_t for t < 1/2 (membership residual at least t pi/2)";

#[derive(Debug, Clone, Serialize)]
pub struct IntermediateSetReport {
    pub space: SpaceTag,
    pub p: String,
    pub t: f64,
    pub distance: f64,
    pub tolerance: f64,
    pub members_tested: usize,
    /// Per pair: the largest residual over both members and the interior
    /// points `β(s)`, `s = 1/8, …, 7/8`, of the geodesic joining them.
    pub membership_residuals: Vec<f64>,
    pub worst_residual: f64,
    pub convexity_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub t: f64,
    /// Residuals of `e^{±itπ} I` in `M_t(I, −I)`.
    pub member_residuals: [f64; 2],
    /// Largest entry of `|β(1/2) − I|`, `β` the geodesic joining the two
    /// members.
    pub midpoint_deviation_from_identity: f64,
    pub midpoint_residual: f64,
    pub lower_bound: f64,
    pub reproduced: bool,
}

/// `max(|d(u,w) − t d(u,v)|, |d(w,v) − (1−t) d(u,v)|)`.
pub fn intermediate_membership(w: &CMat, u: &CMat, v: &CMat, t: f64, space: SpaceTag, p: SchattenIndex) -> Result<f64> {
    check_t(t)?;
    let d = dist(space, u, v, p)?;
    let a = dist(space, u, w, p)?;
    let b = dist(space, w, v, p)?;
    Ok((a - t * d).abs().max((b - (1.0 - t) * d).abs()))
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(GeoError::InvalidInput(format!("t must lie in (0, 1), got {t}")));
    }
    Ok(())
}

/// Produces seeded points of `M_t(u, v)`.
type MemberFn = Box<dyn Fn(u64) -> Result<CMat> + Send + Sync>;

fn member_generator(u: &CMat, v: &CMat, t: f64, space: SpaceTag, p: SchattenIndex) -> Result<MemberFn> {
    match space {
        SpaceTag::Unitary => {
            require_inf(space, p)?;
            let uu = Unitary::new(u.clone())?;
            let vv = Unitary::new(v.clone())?;
            let d = dist(space, u, v, p)?;
            if d >= FRAC_PI_2 {
                return Err(GeoError::PreconditionViolated(format!(
                    "d_inf(u, v) = {d:.6} must be below pi/2; {ANTIPODAL_NOTE}"
                )));
            }
            let target = Unitary::new_unchecked(uu.matrix().adjoint() * vv.matrix());
            let base = uu.into_matrix();
            if d < 1e-14 {
                return Ok(Box::new(move |_| Ok(base.clone())));
            }
            Ok(Box::new(move |seed| {
                let spec = PerturbationSpec::detour(seed, uniform(&mut rng(seed), 0.2, 1.0));
                let member = minimal_family_unitary(&target, &spec)?;
                Ok(&base * member.generator.eval(t))
            }))
        }
        SpaceTag::Grassmann => {
            require_inf(space, p)?;
            let pp = Projection::new(u.clone())?;
            let qq = Projection::new(v.clone())?;
            let gap = Hermitian::symmetrize(u - v).norm_inf();
            if gap >= FRAC_1_SQRT_2 {
                return Err(GeoError::PreconditionViolated(format!(
                    "||u - v||_inf = {gap:.6} must be below 1/sqrt(2); {ANTIPODAL_NOTE}"
                )));
            }
            // validates ranks and distance once
            dist(space, u, v, p)?;
            Ok(Box::new(move |seed| {
                let spec = PerturbationSpec::detour(seed, uniform(&mut rng(seed), 0.2, 1.0));
                let member = match minimal_family_grassmann(&pp, &qq, &spec) {
                    Err(GeoError::UniqueGeodesicOnly) => {
                        minimal_family_grassmann(&pp, &qq, &PerturbationSpec::geodesic())?
                    }
                    other => other?,
                };
                Ok(member.generator.eval(t))
            }))
        }
        SpaceTag::Positive => {
            let a = PositiveDefinite::new(u.clone())?;
            let b = PositiveDefinite::new(v.clone())?;
            let half = sqrt_pd(&a).matrix().clone();
            let log_ratio = eigh(&b.hermitian().congruence(inv_sqrt_pd(&a).matrix()));
            let basis = log_ratio.vectors;
            let lambda: Vec<f64> = log_ratio.values.iter().map(|x| x.max(f64::MIN_POSITIVE).ln()).collect();
            let build: fn(&mut SeededRng, &[f64], f64) -> CMat = match p {
                SchattenIndex::One => trace_member,
                SchattenIndex::Inf => spectral_member,
                other => {
                    return Err(GeoError::InvalidInput(format!(
                        "intermediate sets of Gl(n)+ are generated for p = 1 and p = inf only, got {other}"
                    )))
                }
            };
            Ok(Box::new(move |seed| {
                let local = build(&mut rng(seed), &lambda, t);
                let w = &half * &basis * local * basis.adjoint() * &half;
                Ok((&w + w.adjoint()).scale(0.5))
            }))
        }
        SpaceTag::Hermitian => Err(GeoError::InvalidInput(
            "intermediate sets are generated for unitary, grassmann and positive spaces".into(),
        )),
    }
}

fn require_inf(space: SpaceTag, p: SchattenIndex) -> Result<()> {
    if p != SchattenIndex::Inf {
        return Err(GeoError::InvalidInput(format!(
            "intermediate sets of the {space} space are generated for p = inf only, got {p}"
        )));
    }
    Ok(())
}

/// Point `W` with `I ≤ W ≤ e^Λ` on the positive eigenvalues of
/// `Λ = diag(lambda)`, `e^Λ ≤ W ≤ I` on the negative ones, and
/// `log det` of each block equal to `t` times that of `e^Λ`. Such a point
/// splits the trace-norm distance from `I` to `e^Λ` in ratio `t : 1 − t`,
/// and the blocks are not diagonal in general.
fn trace_member(rng: &mut SeededRng, lambda: &[f64], t: f64) -> CMat {
    let n = lambda.len();
    let scale = lambda.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let pos: Vec<usize> = (0..n).filter(|&i| lambda[i] > 1e-14 * scale).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| lambda[i] < -1e-14 * scale).collect();
    let mut out = CMat::identity(n, n);
    for idx in [pos, neg] {
        if idx.is_empty() {
            continue;
        }
        let block: Vec<f64> = idx.iter().map(|&i| lambda[i]).collect();
        let w = loewner_interpolant(rng, &block, t);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(i, j)] = w[(a, b)];
            }
        }
    }
    out
}

/// For same-signed `lambda`, a block `A(s) = I ± G R(s) G` with
/// `G = |e^Λ − I|^{1/2}` and `R(s)` a Loewner-increasing path of
/// contractions from `0` through a random `R₀` to `I`. `|log det A(s)|`
/// increases from `0` to `|Σ λ|`; bisection hits the fraction `t`.
fn loewner_interpolant(rng: &mut SeededRng, lambda: &[f64], t: f64) -> CMat {
    let k = lambda.len();
    let sign = if lambda[0] > 0.0 { 1.0 } else { -1.0 };
    let g = diag_real(&lambda.iter().map(|x| (x.exp() - 1.0).abs().sqrt()).collect::<Vec<_>>());
    let v = haar_unitary(rng, k);
    let weights: Vec<f64> = (0..k).map(|_| uniform(rng, 0.0, 1.0)).collect();
    let r0 = v.matrix() * diag_real(&weights) * v.matrix().adjoint();
    let identity = CMat::identity(k, k);
    let at = |s: f64| -> CMat {
        let r = if s <= 0.5 {
            r0.scale(2.0 * s)
        } else {
            &r0 + (&identity - &r0).scale(2.0 * s - 1.0)
        };
        let a = &identity + (&g * r * &g).scale(sign);
        (&a + a.adjoint()).scale(0.5)
    };
    let log_det = |m: &CMat| -> f64 {
        eigh(&Hermitian::symmetrize(m.clone()))
            .values
            .iter()
            .map(|x| x.max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            .abs()
    };
    let target = t * lambda.iter().sum::<f64>().abs();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if log_det(&at(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Commuting point `e^{diag μ}` with `|μ_i| ≤ tM` and `|λ_i − μ_i| ≤ (1−t)M`,
/// `M = max |λ_i|`.
fn spectral_member(rng: &mut SeededRng, lambda: &[f64], t: f64) -> CMat {
    let m = lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mu: Vec<Complex64> = lambda
        .iter()
        .map(|&l| {
            let lo = (l - (1.0 - t) * m).max(-t * m);
            let hi = (l + (1.0 - t) * m).min(t * m);
            let x = if hi > lo { uniform(rng, lo, hi) } else { 0.5 * (lo + hi) };
            Complex64::new(x.exp(), 0.0)
        })
        .collect();
    crate::linalg::diag_complex(&mu)
}

/// Builds `n_pairs` seeded pairs of points of `M_t(u, v)` from minimal
/// curves and checks that the geodesic joining each pair stays in
/// `M_t(u, v)`.
pub fn check_midpoint_convexity(
    u: &CMat,
    v: &CMat,
    t: f64,
    space: SpaceTag,
    p: SchattenIndex,
    n_pairs: usize,
    seed: u64,
) -> Result<IntermediateSetReport> {
    check_t(t)?;
    let members = member_generator(u, v, t, space, p)?;
    let d = dist(space, u, v, p)?;
    let tolerance = MEMBERSHIP_RTOL * d;
    let residual = |w: &CMat| intermediate_membership(w, u, v, t, space, p);
    let membership_residuals: Vec<f64> = (0..n_pairs as u64)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let w0 = members(derive_seed(seed, "midpoint-member", 2 * k))?;
            let w1 = members(derive_seed(seed, "midpoint-member", 2 * k + 1))?;
            let beta = geodesic(space, &w0, &w1)?;
            let mut worst = residual(&w0)?.max(residual(&w1)?);
            for j in 1..8 {
                worst = worst.max(residual(&beta.eval(j as f64 / 8.0))?);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst_residual = membership_residuals.iter().copied().fold(0.0, f64::max);
    Ok(IntermediateSetReport {
        space,
        p: p.to_string(),
        t,
        distance: d,
        tolerance,
        members_tested: 2 * n_pairs,
        convexity_passed: membership_residuals.iter().all(|&r| r <= tolerance.max(1e-14)),
        membership_residuals,
        worst_residual,
    })
}

/// The pair `u = I`, `v = −I` in `U(n)` at distance `π`: both
/// `e^{±itπ} I` belong to `M_t(I, −I)`, but for `t < 1/2` the geodesic
/// midpoint between them is `I`, whose residual is `tπ`.
pub fn antipodal_counterexample(n: usize, t: f64) -> Result<CounterexampleReport> {
    if n == 0 {
        return Err(GeoError::InvalidInput("dimension must be positive".into()));
    }
    if !(t > 0.0 && t < 0.5) {
        return Err(GeoError::InvalidInput(format!("t must lie in (0, 1/2), got {t}")));
    }
    let identity = CMat::identity(n, n);
    let minus = identity.scale(-1.0);
    let member = |sign: f64| identity.map(|z| z * Complex64::from_polar(1.0, sign * t * PI));
    let (plus_w, minus_w) = (member(1.0), member(-1.0));
    let p = SchattenIndex::Inf;
    let residual = |w: &CMat| intermediate_membership(w, &identity, &minus, t, SpaceTag::Unitary, p);
    let member_residuals = [residual(&plus_w)?, residual(&minus_w)?];
    let mid = geodesic_unitary(&Unitary::new(plus_w)?, &Unitary::new(minus_w)?).eval(0.5);
    let midpoint_residual = residual(&mid)?;
    let lower_bound = t * PI / 2.0;
    let tol = MEMBERSHIP_RTOL * PI;
    Ok(CounterexampleReport {
        n,
        t,
        member_residuals,
        midpoint_deviation_from_identity: crate::linalg::max_abs(&(&mid - &identity)),
        midpoint_residual,
        lower_bound,
        reproduced: member_residuals.iter().all(|&r| r <= tol) && midpoint_residual >= lower_bound,
    })
}
