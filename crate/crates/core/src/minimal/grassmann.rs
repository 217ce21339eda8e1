use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::unitary::{random_block_perturbation, Rotation};
use super::{
    fit_symmetric_pair, top_block_split, BlockSplit, PerturbationMode, PerturbationSpec, UniquenessCertificate,
};
use super::{SPEED_BUDGET, SPEED_CHECK_STEPS};
use crate::curves::CurveGenerator;
use crate::error::{GeoError, Result};
use crate::linalg::{eig_unitary, eigh, CMat, Hermitian, Projection};
use crate::spaces::{constant_curve, grassmann_log, symmetry, SpaceTag};

/// One member of the spectral-norm minimal family between two projections.
#[derive(Debug, Clone)]
pub struct GrassmannFamilyMember {
    pub generator: CurveGenerator,
    /// Direct rotation from `p` to `q`.
    pub x: Hermitian,
    /// `None` when `p = q`.
    pub split: Option<BlockSplit>,
    pub perturbation: Option<Hermitian>,
    pub max_complement_speed: f64,
}

impl GrassmannFamilyMember {
    pub fn length(&self) -> f64 {
        self.split.as_ref().map_or(0.0, |s| s.norm_inf)
    }
}

/// Rotation data for `t ↦ expi(t X) p expi(−t X)`.
struct Orbit {
    vectors: CMat,
    values: Vec<f64>,
    local: CMat,
}

impl Orbit {
    fn new(x: &Hermitian, p: &CMat) -> Self {
        let e = eigh(x);
        let local = e.vectors.adjoint() * p * &e.vectors;
        Orbit {
            vectors: e.vectors,
            values: e.values,
            local,
        }
    }

    fn at(&self, t: f64) -> CMat {
        let mut rotated = self.local.clone();
        for j in 0..rotated.ncols() {
            for i in 0..rotated.nrows() {
                rotated[(i, j)] *= Complex64::from_polar(1.0, t * (self.values[i] - self.values[j]));
            }
        }
        &self.vectors * rotated * self.vectors.adjoint()
    }
}

/// A member of the family of spectral-norm minimal curves joining `p` with
/// `q`. The top eigenspace of `|X|` follows the geodesic; on its complement
/// the geodesic is conjugated by `expi(φ(t) K)`.
pub fn minimal_family_grassmann(
    p: &Projection,
    q: &Projection,
    spec: &PerturbationSpec,
) -> Result<GrassmannFamilyMember> {
    spec.validate()?;
    let x = grassmann_log(p, q)?.x;
    if x.norm_inf() < 1e-14 {
        return Ok(GrassmannFamilyMember {
            generator: constant_curve(SpaceTag::Grassmann, p.matrix().clone()),
            x,
            split: None,
            perturbation: None,
            max_complement_speed: 0.0,
        });
    }
    let split = top_block_split(&x)?;
    let complement_cols = split.block_basis(false);
    if spec.mode == PerturbationMode::Detour && complement_cols.ncols() == 0 {
        return Err(GeoError::UniqueGeodesicOnly);
    }
    let radius = split.complement_radius();
    let margin = SPEED_BUDGET * split.norm_inf - radius;
    let perturbation = match spec.mode {
        PerturbationMode::Detour if margin > 0.0 && spec.detour_scale > 0.0 => {
            Some(random_block_perturbation(spec.seed, &complement_cols, margin / PI))
        }
        _ => None,
    };

    let orbit = Orbit::new(&x, p.matrix());
    let mut max_complement_speed = radius;
    if let Some(k) = &perturbation {
        let c = split.complement_part.matrix();
        max_complement_speed = (0..=SPEED_CHECK_STEPS)
            .into_par_iter()
            .map(|j| {
                let t = j as f64 / SPEED_CHECK_STEPS as f64;
                let (_, dphi) = spec.bump(t);
                let a = c + k.matrix().scale(dphi);
                let g = orbit.at(t);
                let comm = (&a * &g - &g * &a) * Complex64::new(0.0, 1.0);
                Hermitian::symmetrize(comm).norm_inf()
            })
            .reduce(|| 0.0, f64::max);
        if max_complement_speed > SPEED_BUDGET * split.norm_inf {
            return Err(GeoError::SpeedBudgetExceeded(format!(
                "complement speed {max_complement_speed} exceeds the budget {}",
                SPEED_BUDGET * split.norm_inf
            )));
        }
    }

    let rot = perturbation.as_ref().map(Rotation::of);
    let spec_c = spec.clone();
    let generator = CurveGenerator::new(SpaceTag::Grassmann, move |t| {
        let g = orbit.at(t);
        let m = match &rot {
            Some(r) => {
                let v = r.unitary(spec_c.bump(t).0);
                &v * g * v.adjoint()
            }
            None => g,
        };
        (&m + m.adjoint()).scale(0.5)
    });
    Ok(GrassmannFamilyMember {
        generator,
        x,
        split: Some(split),
        perturbation,
        max_complement_speed,
    })
}

/// Whether exactly one minimal curve joins `p` and `q`: the phases of
/// `S_q S_p` must form a pair `{θ, −θ}`. The reported `θ` is that phase,
/// twice the common principal angle.
pub fn is_unique_minimal_grassmann(p: &Projection, q: &Projection) -> Result<UniquenessCertificate> {
    // validates rank and distance
    grassmann_log(p, q)?;
    let w = symmetry(q).mul(&symmetry(p));
    Ok(fit_symmetric_pair(eig_unitary(&w).phases, PI))
}
