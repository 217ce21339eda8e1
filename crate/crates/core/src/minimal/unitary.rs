use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    fit_symmetric_pair, top_block_split, BlockSplit, PerturbationMode, PerturbationSpec, UniquenessCertificate,
};
use super::{SPEED_BUDGET, SPEED_CHECK_STEPS};
use crate::curves::CurveGenerator;
use crate::error::{GeoError, Result};
use crate::linalg::{eig_unitary, eigh, log_unitary, CMat, Hermitian, Unitary};
use crate::random::{gaussian_hermitian, rng};
use crate::spaces::SpaceTag;

/// Which of the two block-structure cases applies to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StructureCase {
    /// `‖X‖_∞ < π`: the top block follows `expi(t X_S)`.
    #[serde(rename = "a")]
    Regular,
    /// `‖X‖_∞ = π`: the top block follows `expi(t Y_S)` with
    /// `σ(Y_S) ⊆ {π, −π}`.
    #[serde(rename = "b")]
    Antipodal,
}

impl fmt::Display for StructureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureCase::Regular => "a",
            StructureCase::Antipodal => "b",
        })
    }
}

/// One member of the spectral-norm minimal family from `I` to a target.
#[derive(Debug, Clone)]
pub struct UnitaryFamilyMember {
    pub generator: CurveGenerator,
    pub case: StructureCase,
    pub split: BlockSplit,
    /// Generator of the geodesic part: `X` with its top block replaced by
    /// `Y_S` in the antipodal case.
    pub x: Hermitian,
    pub perturbation: Option<Hermitian>,
    /// Largest spectral norm of the complement velocity seen on the check
    /// grid.
    pub max_complement_speed: f64,
}

impl UnitaryFamilyMember {
    /// Spectral distance from `I` to the target, which is also the length
    /// of every member.
    pub fn length(&self) -> f64 {
        self.split.norm_inf
    }
}

/// Conjugation data for `expi(φ K)`.
#[derive(Clone)]
pub(crate) struct Rotation {
    vectors: CMat,
    values: Vec<f64>,
}

impl Rotation {
    pub(crate) fn of(k: &Hermitian) -> Self {
        let e = eigh(k);
        Rotation {
            vectors: e.vectors,
            values: e.values,
        }
    }

    /// `expi(φ K)`.
    pub(crate) fn unitary(&self, phi: f64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let z = Complex64::from_polar(1.0, phi * v);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= z;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Random Hermitian matrix supported on the span of `cols`, with spectral
/// norm `norm`.
pub(crate) fn random_block_perturbation(seed: u64, cols: &CMat, norm: f64) -> Hermitian {
    let mut r = rng(seed);
    let k = cols.ncols();
    let local = gaussian_hermitian(&mut r, k);
    let local_norm = local.norm_inf().max(f64::MIN_POSITIVE);
    let full = cols * local.matrix() * cols.adjoint();
    Hermitian::symmetrize(full).scale(norm / local_norm)
}

fn top_values(split: &BlockSplit, case: StructureCase, spec: &PerturbationSpec) -> Result<Vec<f64>> {
    let mut values = split.eigenvalues.clone();
    match (case, &spec.sign_pattern) {
        (StructureCase::Regular, Some(_)) => {
            return Err(GeoError::InvalidInput(
                "sign_pattern applies only to targets at spectral distance π".into(),
            ))
        }
        (StructureCase::Regular, None) => {}
        (StructureCase::Antipodal, signs) => {
            if let Some(s) = signs {
                if s.len() != split.top_indices.len() {
                    return Err(GeoError::InvalidInput(format!(
                        "sign_pattern needs {} entries (dimension of the top eigenspace), got {}",
                        split.top_indices.len(),
                        s.len()
                    )));
                }
            }
            for (k, &i) in split.top_indices.iter().enumerate() {
                let sign = signs.as_ref().map_or(1, |s| s[k]);
                values[i] = PI * f64::from(sign);
            }
        }
    }
    Ok(values)
}

/// `‖e^{−iφK} C e^{iφK} + φ' K‖_∞` for `K` given by its rotation data.
fn complement_speed(c: &CMat, rot: &Rotation, phi: f64, dphi: f64) -> f64 {
    let v = &rot.vectors;
    let mut local = v.adjoint() * c * v;
    for j in 0..local.ncols() {
        for i in 0..local.nrows() {
            local[(i, j)] *= Complex64::from_polar(1.0, -phi * (rot.values[i] - rot.values[j]));
        }
        local[(j, j)] += Complex64::new(dphi * rot.values[j], 0.0);
    }
    Hermitian::symmetrize(local).norm_inf()
}

/// A member of the family of spectral-norm minimal curves joining `I` with
/// `u_target`.
pub fn minimal_family_unitary(u_target: &Unitary, spec: &PerturbationSpec) -> Result<UnitaryFamilyMember> {
    spec.validate()?;
    let x = log_unitary(u_target);
    if x.norm_inf() < 1e-14 {
        return Err(GeoError::IdentityTarget);
    }
    let split = top_block_split(&x)?;
    let case = if split.norm_inf >= PI - 1e-9 {
        StructureCase::Antipodal
    } else {
        StructureCase::Regular
    };
    let values = top_values(&split, case, spec)?;
    let n = x.dim();
    let basis = split.basis.clone();
    let generator_x = {
        let mut scaled = basis.clone();
        for (j, &v) in values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        Hermitian::symmetrize(scaled * basis.adjoint())
    };

    let complement_cols = split.block_basis(false);
    let radius = split.complement_radius();
    let margin = SPEED_BUDGET * split.norm_inf - radius;
    let perturbation = match spec.mode {
        PerturbationMode::Detour if complement_cols.ncols() > 0 && margin > 0.0 && spec.detour_scale > 0.0 => {
            Some(random_block_perturbation(spec.seed, &complement_cols, margin / PI))
        }
        _ => None,
    };

    let mut max_complement_speed = radius;
    if let Some(k) = &perturbation {
        let rot = Rotation::of(k);
        let c = split.complement_part.matrix();
        max_complement_speed = (0..=SPEED_CHECK_STEPS)
            .into_par_iter()
            .map(|j| {
                let (phi, dphi) = spec.bump(j as f64 / SPEED_CHECK_STEPS as f64);
                complement_speed(c, &rot, phi, dphi)
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
    let generator = CurveGenerator::new(SpaceTag::Unitary, move |t| {
        let mut scaled = basis.clone();
        for (j, &v) in values.iter().enumerate() {
            let z = Complex64::from_polar(1.0, t * v);
            for i in 0..n {
                scaled[(i, j)] *= z;
            }
        }
        let geo = scaled * basis.adjoint();
        match &rot {
            Some(r) => geo * r.unitary(spec_c.bump(t).0),
            None => geo,
        }
    });

    Ok(UnitaryFamilyMember {
        generator,
        case,
        split,
        x: generator_x,
        perturbation,
        max_complement_speed,
    })
}

/// Whether exactly one minimal curve joins `u` and `v`: the phases of `u*v`
/// must form a pair `{θ, −θ}` with `0 ≤ θ < π`.
pub fn is_unique_minimal_unitary(u: &Unitary, v: &Unitary) -> Result<UniquenessCertificate> {
    if u.dim() != v.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let w = u.adjoint().mul(v);
    Ok(fit_symmetric_pair(eig_unitary(&w).phases, PI))
}
