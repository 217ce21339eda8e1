//! The four metric spaces and their Finsler distances.
//!
//! | space       | tangent norm at `a`              | distance                          |
//! |-------------|----------------------------------|-----------------------------------|
//! | `H(n)`      | `‖v‖_p`                          | `‖a − b‖_p`                       |
//! | `U(n)`      | `‖a* v‖_p = ‖v‖_p`               | `‖log(a* b)‖_p` (principal log)   |
//! | `Gl(n)+`    | `‖a^{-1/2} v a^{-1/2}‖_p`        | `‖log(a^{-1/2} b a^{-1/2})‖_p`    |
//! | Grassmann   | `‖v‖_p`                          | `‖X‖_p`, `X` the direct rotation  |
//!
//! Distances on the Grassmannian are only defined for `‖P − Q‖_∞ < 1`, where
//! the direct rotation `X` (with `Q = e^{iX} P e^{-iX}`, `X = PX + XP`) is
//! unique and satisfies `‖X‖_∞ < π/2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::CurveGenerator;
use crate::error::{GeoError, Result};
use crate::linalg::{
    eig_unitary, eigh, inv_sqrt_pd, log_unitary, max_abs, schatten_norm, schatten_norm_hermitian, sqrt_pd, CMat,
    Hermitian, PositiveDefinite, Projection, SchattenIndex, Unitary, REPAIR_FACTOR, STRUCTURE_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Hermitian,
    Unitary,
    Positive,
    Grassmann,
}

impl SpaceTag {
    pub const ALL: [SpaceTag; 4] = [
        SpaceTag::Hermitian,
        SpaceTag::Unitary,
        SpaceTag::Positive,
        SpaceTag::Grassmann,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpaceTag::Hermitian => "hermitian",
            SpaceTag::Unitary => "unitary",
            SpaceTag::Positive => "positive",
            SpaceTag::Grassmann => "grassmann",
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceTag {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hermitian" | "h" => Ok(SpaceTag::Hermitian),
            "unitary" | "u" => Ok(SpaceTag::Unitary),
            "positive" | "gl+" | "pd" => Ok(SpaceTag::Positive),
            "grassmann" | "grassmannian" | "g" => Ok(SpaceTag::Grassmann),
            other => Err(GeoError::InvalidInput(format!("unknown space '{other}'"))),
        }
    }
}

/// Result of [`grassmann_log`].
#[derive(Debug, Clone)]
pub struct GrassmannLogResult {
    /// Direct rotation generator.
    pub x: Hermitian,
    /// `‖P X P + P⊥ X P⊥‖_∞`, zero for an exactly codiagonal generator.
    pub codiagonal_residual: f64,
}

/// Checks that `m` is a point of `space` (with the usual repair tolerance)
/// and returns the repaired matrix.
pub fn validate_point(space: SpaceTag, m: &CMat) -> Result<CMat> {
    Ok(match space {
        SpaceTag::Hermitian => Hermitian::new(m.clone())?.into_matrix(),
        SpaceTag::Unitary => Unitary::new(m.clone())?.into_matrix(),
        SpaceTag::Positive => PositiveDefinite::new(m.clone())?.matrix().clone(),
        SpaceTag::Grassmann => Projection::new(m.clone())?.matrix().clone(),
    })
}

/// Deviation of `m` from `space` (0 when on it), relative where that makes
/// sense.
pub fn off_space_deviation(space: SpaceTag, m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let herm = max_abs(&(m - m.adjoint())) / max_abs(m).max(1.0);
    match space {
        SpaceTag::Hermitian => herm,
        SpaceTag::Unitary => max_abs(&(m.adjoint() * m - CMat::identity(n, n))),
        SpaceTag::Grassmann => herm.max(max_abs(&(m * m - m))),
        SpaceTag::Positive => {
            if herm > STRUCTURE_TOL * REPAIR_FACTOR {
                return herm;
            }
            let min = eigh(&Hermitian::symmetrize(m.clone()))
                .values
                .last()
                .copied()
                .unwrap_or(1.0);
            if min > 0.0 {
                herm
            } else {
                f64::INFINITY
            }
        }
    }
}

fn same_dim(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(GeoError::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(())
}

pub fn dist_hermitian(a: &Hermitian, b: &Hermitian, p: SchattenIndex) -> f64 {
    schatten_norm_hermitian(&a.sub(b), p)
}

/// `‖log(a* b)‖_p` with the +π branch at eigenvalue −1.
pub fn dist_unitary(a: &Unitary, b: &Unitary, p: SchattenIndex) -> f64 {
    let w = Unitary::new_unchecked(a.matrix().adjoint() * b.matrix());
    p.combine(eig_unitary(&w).phases)
}

/// True when `a* b` has −1 in its spectrum, i.e. the distance was evaluated
/// on the branch cut.
pub fn unitary_is_antipodal(a: &Unitary, b: &Unitary) -> bool {
    let w = Unitary::new_unchecked(a.matrix().adjoint() * b.matrix());
    eig_unitary(&w).phases.iter().any(|&ph| ph >= PI - 1e-9)
}

/// `‖log(a^{-1/2} b a^{-1/2})‖_p`.
pub fn dist_positive(a: &PositiveDefinite, b: &PositiveDefinite, p: SchattenIndex) -> f64 {
    let g = inv_sqrt_pd(a);
    let m = b.hermitian().congruence(g.matrix());
    p.combine(eigh(&m).values.iter().map(|&x| x.max(f64::MIN_POSITIVE).ln()))
}

/// `S_P = 2P − I`.
pub fn symmetry(p: &Projection) -> Unitary {
    let n = p.dim();
    Unitary::new_unchecked(p.matrix().scale(2.0) - CMat::identity(n, n))
}

fn check_grassmann_pair(p: &Projection, q: &Projection) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    if p.rank() != q.rank() {
        return Err(GeoError::RankMismatch(p.rank(), q.rank()));
    }
    let distance = Hermitian::symmetrize(p.matrix() - q.matrix()).norm_inf();
    if distance >= 1.0 - 1e-12 {
        return Err(GeoError::GrassmannTooFar { distance });
    }
    Ok(())
}

/// Direct rotation from `p` to `q`: `x = ½ log(S_q S_p)`.
pub fn grassmann_log(p: &Projection, q: &Projection) -> Result<GrassmannLogResult> {
    check_grassmann_pair(p, q)?;
    let sq_sp = symmetry(q).mul(&symmetry(p));
    let x = log_unitary(&sq_sp).scale(0.5);
    let pm = p.matrix();
    let pc = p.complement();
    let pcm = pc.matrix();
    let diagonal_part = pm * x.matrix() * pm + pcm * x.matrix() * pcm;
    Ok(GrassmannLogResult {
        codiagonal_residual: max_abs(&diagonal_part),
        x,
    })
}

pub fn dist_grassmann(p: &Projection, q: &Projection, idx: SchattenIndex) -> Result<f64> {
    check_grassmann_pair(p, q)?;
    let sq_sp = symmetry(q).mul(&symmetry(p));
    Ok(idx.combine(eig_unitary(&sq_sp).phases.iter().map(|ph| ph / 2.0)))
}

/// Distance between two points given as raw matrices.
pub fn dist(space: SpaceTag, a: &CMat, b: &CMat, p: SchattenIndex) -> Result<f64> {
    same_dim(a, b)?;
    match space {
        SpaceTag::Hermitian => Ok(dist_hermitian(
            &Hermitian::new(a.clone())?,
            &Hermitian::new(b.clone())?,
            p,
        )),
        SpaceTag::Unitary => Ok(dist_unitary(&Unitary::new(a.clone())?, &Unitary::new(b.clone())?, p)),
        SpaceTag::Positive => Ok(dist_positive(
            &PositiveDefinite::new(a.clone())?,
            &PositiveDefinite::new(b.clone())?,
            p,
        )),
        SpaceTag::Grassmann => dist_grassmann(&Projection::new(a.clone())?, &Projection::new(b.clone())?, p),
    }
}

/// Finsler norm of the tangent vector `v` at `base`.
pub fn tangent_norm(space: SpaceTag, base: &CMat, v: &CMat, p: SchattenIndex) -> Result<f64> {
    same_dim(base, v)?;
    Ok(match space {
        SpaceTag::Hermitian | SpaceTag::Grassmann => schatten_norm(v, p),
        SpaceTag::Unitary => schatten_norm(&(base.adjoint() * v), p),
        SpaceTag::Positive => {
            let a = PositiveDefinite::new(base.clone())?;
            let g = inv_sqrt_pd(&a);
            schatten_norm(&(g.matrix() * v * g.matrix()), p)
        }
    })
}

pub fn geodesic_hermitian(a: &Hermitian, b: &Hermitian) -> CurveGenerator {
    let a = a.matrix().clone();
    let d = b.matrix() - &a;
    CurveGenerator::new(SpaceTag::Hermitian, move |t| &a + d.scale(t))
}

/// `t ↦ a expi(t X)`, `X = log(a* b)`.
pub fn geodesic_unitary(a: &Unitary, b: &Unitary) -> CurveGenerator {
    let w = Unitary::new_unchecked(a.matrix().adjoint() * b.matrix());
    let e = eig_unitary(&w);
    let base = a.matrix().clone();
    let v = e.vectors.into_matrix();
    let phases = e.phases;
    CurveGenerator::new(SpaceTag::Unitary, move |t| {
        let mut scaled = v.clone();
        for (j, &ph) in phases.iter().enumerate() {
            let z = Complex64::from_polar(1.0, t * ph);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= z;
            }
        }
        &base * scaled * v.adjoint()
    })
}

/// `t ↦ a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}`.
pub fn geodesic_positive(a: &PositiveDefinite, b: &PositiveDefinite) -> CurveGenerator {
    let half = sqrt_pd(a).matrix().clone();
    let g = inv_sqrt_pd(a);
    let e = eigh(&b.hermitian().congruence(g.matrix()));
    let w = &half * &e.vectors;
    let values = e.values;
    CurveGenerator::new(SpaceTag::Positive, move |t| {
        let mut scaled = w.clone();
        for (j, &x) in values.iter().enumerate() {
            let z = x.max(f64::MIN_POSITIVE).powf(t);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= z;
            }
        }
        let m = scaled * w.adjoint();
        (&m + m.adjoint()).scale(0.5)
    })
}

/// `t ↦ expi(t X) p expi(−t X)` with `X` the direct rotation.
pub fn geodesic_grassmann(p: &Projection, q: &Projection) -> Result<CurveGenerator> {
    let x = grassmann_log(p, q)?.x;
    Ok(rotation_curve(&x, p.matrix().clone()))
}

/// `t ↦ expi(t x) m expi(−t x)`.
pub(crate) fn rotation_curve(x: &Hermitian, m: CMat) -> CurveGenerator {
    let e = eigh(x);
    let v = e.vectors;
    let values = e.values;
    let local = v.adjoint() * m * &v;
    CurveGenerator::new(SpaceTag::Grassmann, move |t| {
        let mut rotated = local.clone();
        for j in 0..rotated.ncols() {
            for i in 0..rotated.nrows() {
                rotated[(i, j)] *= Complex64::from_polar(1.0, t * (values[i] - values[j]));
            }
        }
        let out = &v * rotated * v.adjoint();
        (&out + out.adjoint()).scale(0.5)
    })
}

/// Geodesic between two points given as raw matrices.
pub fn geodesic(space: SpaceTag, a: &CMat, b: &CMat) -> Result<CurveGenerator> {
    same_dim(a, b)?;
    match space {
        SpaceTag::Hermitian => Ok(geodesic_hermitian(
            &Hermitian::new(a.clone())?,
            &Hermitian::new(b.clone())?,
        )),
        SpaceTag::Unitary => Ok(geodesic_unitary(&Unitary::new(a.clone())?, &Unitary::new(b.clone())?)),
        SpaceTag::Positive => Ok(geodesic_positive(
            &PositiveDefinite::new(a.clone())?,
            &PositiveDefinite::new(b.clone())?,
        )),
        SpaceTag::Grassmann => geodesic_grassmann(&Projection::new(a.clone())?, &Projection::new(b.clone())?),
    }
}

/// Constant curve at `m`.
pub fn constant_curve(space: SpaceTag, m: CMat) -> CurveGenerator {
    CurveGenerator::new(space, move |_| m.clone())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, FRAC_PI_4};

    use super::*;
    use crate::linalg::{diag_real, real};

    fn rot(theta: f64) -> CMat {
        CMat::from_row_slice(
            2,
            2,
            &[
                real(theta.cos()),
                real(-theta.sin()),
                real(theta.sin()),
                real(theta.cos()),
            ],
        )
    }

    #[test]
    fn unitary_antipodal_distance() {
        let i = CMat::identity(2, 2);
        let d = dist(SpaceTag::Unitary, &i, &i.scale(-1.0), SchattenIndex::Inf).unwrap();
        assert!((d - PI).abs() < 1e-15);
        assert!(unitary_is_antipodal(
            &Unitary::identity(2),
            &Unitary::new(i.scale(-1.0)).unwrap()
        ));
    }

    #[test]
    fn positive_commuting_distance() {
        let i = CMat::identity(2, 2);
        let b = diag_real(&[E * E, E]);
        assert!((dist(SpaceTag::Positive, &i, &b, SchattenIndex::One).unwrap() - 3.0).abs() < 1e-14);
        assert!((dist(SpaceTag::Positive, &i, &b, SchattenIndex::Inf).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn grassmann_planar_rotation() {
        let p = diag_real(&[1.0, 0.0]);
        let r = rot(FRAC_PI_4);
        let q = &r * &p * r.adjoint();
        let d = dist(SpaceTag::Grassmann, &p, &q, SchattenIndex::Inf).unwrap();
        assert!((d - FRAC_PI_4).abs() < 1e-14);
        let gap = Hermitian::new(&p - &q).unwrap().norm_inf();
        assert!((gap - FRAC_PI_4.sin()).abs() < 1e-14);
    }

    #[test]
    fn grassmann_log_rotation_pair() {
        let p = Projection::coordinate(2, &[0]);
        let r = rot(0.3);
        let q = Projection::new(&r * p.matrix() * r.adjoint()).unwrap();
        let g = grassmann_log(&p, &q).unwrap();
        let e = g.x.eigh();
        assert!((e.values[0] - 0.3).abs() < 1e-14 && (e.values[1] + 0.3).abs() < 1e-14);
        assert!(g.codiagonal_residual < 1e-14);
        let u = crate::linalg::expi(&g.x);
        let back = u.matrix() * p.matrix() * u.matrix().adjoint();
        assert!(max_abs(&(back - q.matrix())) < 1e-14);
    }

    #[test]
    fn grassmann_identical_points() {
        let p = Projection::coordinate(3, &[1]);
        let g = grassmann_log(&p, &p).unwrap();
        assert!(max_abs(g.x.matrix()) < 1e-15);
    }

    #[test]
    fn grassmann_errors() {
        let p = Projection::coordinate(2, &[0]);
        let q = Projection::coordinate(2, &[1]);
        assert_eq!(grassmann_log(&p, &q).unwrap_err().code(), "GRASSMANN_TOO_FAR");
        let r = Projection::coordinate(2, &[0, 1]);
        // rank is checked before distance
        assert_eq!(grassmann_log(&q, &r).unwrap_err().code(), "RANK_MISMATCH");
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(symmetry(&Projection::identity(2)).matrix(), &CMat::identity(2, 2));
        assert_eq!(
            symmetry(&Projection::zeros(2)).matrix(),
            &CMat::identity(2, 2).scale(-1.0)
        );
        assert_eq!(
            symmetry(&Projection::coordinate(2, &[0])).matrix(),
            &diag_real(&[1.0, -1.0])
        );
    }

    #[test]
    fn tangent_norm_examples() {
        let base = diag_real(&[4.0, 4.0]);
        let n = tangent_norm(SpaceTag::Positive, &base, &base, SchattenIndex::Inf).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
        let v = diag_real(&[3.0, -4.0]);
        let n = tangent_norm(SpaceTag::Positive, &CMat::identity(2, 2), &v, SchattenIndex::One).unwrap();
        assert!((n - 7.0).abs() < 1e-14);
    }

    #[test]
    fn positive_geodesic_from_identity_is_power() {
        let b = PositiveDefinite::new(diag_real(&[2.0, 5.0])).unwrap();
        let g = geodesic_positive(&PositiveDefinite::identity(2), &b);
        let m = g.eval(0.5);
        assert!((m[(0, 0)].re - 2f64.sqrt()).abs() < 1e-14);
        assert!((m[(1, 1)].re - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn unitary_geodesic_scalar() {
        let g = geodesic(
            SpaceTag::Unitary,
            &CMat::identity(1, 1),
            &CMat::identity(1, 1).scale(-1.0),
        )
        .unwrap();
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let z = g.eval(t)[(0, 0)];
            assert!((z - Complex64::from_polar(1.0, t * PI)).norm() < 1e-15);
        }
    }

    #[test]
    fn space_tag_parse() {
        assert_eq!("Unitary".parse::<SpaceTag>().unwrap(), SpaceTag::Unitary);
        assert!("sphere".parse::<SpaceTag>().is_err());
    }
}
