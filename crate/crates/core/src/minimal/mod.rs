//! Representative members of the families of minimal curves, and the
//! predicates deciding when such a family reduces to a single curve.
//!
//! * [`minimal_family_unitary`]: spectral-norm minimal curves from `I` to a
//!   unitary target. They move the top eigenspace of `X = log U` along the
//!   one-parameter group and leave the rest free up to the speed budget.
//! * [`minimal_family_grassmann`]: the analogue between two projections.
//! * [`minimal_family_hermitian`]: trace-norm minimal curves from `0` to `D`
//!   in `H(n)`, built from monotone block increments.
//! * [`lift_positive`] / [`lift_unitary`]: exponential lifts of Hermitian
//!   curves, which keep trace-norm minimality.

mod grassmann;
mod hermitian;
mod unitary;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::linalg::{eigh, CMat, Hermitian, Projection};

pub use grassmann::{is_unique_minimal_grassmann, minimal_family_grassmann, GrassmannFamilyMember};
pub use hermitian::{
    is_minimal_hermitian_trace, lift_positive, lift_unitary, minimal_family_hermitian, Clause, HermitianFamilyMember,
    HermitianSplit, MinimalityVerdict, Verdict, DEFAULT_ENDPOINT_TOLERANCE,
};
pub use unitary::{is_unique_minimal_unitary, minimal_family_unitary, StructureCase, UnitaryFamilyMember};

/// Relative threshold for deciding that `|λ| = ‖X‖_∞`.
pub const CLUSTER_RTOL: f64 = 1e-8;
/// Fraction of `‖X‖_∞` the perturbed complement block may use.
pub const SPEED_BUDGET: f64 = 1.0 - 1e-6;
/// Grid on which the speed budget is verified.
pub const SPEED_CHECK_STEPS: usize = 2048;
/// Tolerance for fitting a phase multiset to a pair `{θ, −θ}`.
pub const PAIR_FIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationMode {
    Geodesic,
    Detour,
}

impl FromStr for PerturbationMode {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geodesic" => Ok(PerturbationMode::Geodesic),
            "detour" => Ok(PerturbationMode::Detour),
            other => Err(GeoError::InvalidInput(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for PerturbationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbationMode::Geodesic => "geodesic",
            PerturbationMode::Detour => "detour",
        })
    }
}

/// Selects one member of a spectral-norm minimal family.
///
/// In `Detour` mode the free block is conjugated by `expi(φ(t) K)` with
/// `φ(t) = detour_scale · sin²(πt)` and `K` a seeded random Hermitian
/// matrix living on the free block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub seed: u64,
    pub mode: PerturbationMode,
    pub detour_scale: f64,
    /// Signs of the `±π` eigenvalues of the top block, used only when the
    /// target sits at spectral distance `π`.
    pub sign_pattern: Option<Vec<i8>>,
}

impl PerturbationSpec {
    pub fn geodesic() -> Self {
        PerturbationSpec {
            seed: 0,
            mode: PerturbationMode::Geodesic,
            detour_scale: 0.0,
            sign_pattern: None,
        }
    }

    pub fn detour(seed: u64, detour_scale: f64) -> Self {
        PerturbationSpec {
            seed,
            mode: PerturbationMode::Detour,
            detour_scale,
            sign_pattern: None,
        }
    }

    pub fn with_signs(mut self, signs: Vec<i8>) -> Self {
        self.sign_pattern = Some(signs);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.mode == PerturbationMode::Detour && !(0.0..1.0).contains(&self.detour_scale) {
            return Err(GeoError::SpeedBudgetExceeded(format!(
                "detour_scale must lie in [0, 1), got {}",
                self.detour_scale
            )));
        }
        if let Some(signs) = &self.sign_pattern {
            if signs.iter().any(|&s| s != 1 && s != -1) {
                return Err(GeoError::InvalidInput("sign_pattern entries must be +1 or -1".into()));
            }
        }
        Ok(())
    }

    fn bump(&self, t: f64) -> (f64, f64) {
        let s = self.detour_scale;
        let pi = std::f64::consts::PI;
        let sin = (pi * t).sin();
        (s * sin * sin, s * pi * (2.0 * pi * t).sin())
    }
}

/// Splitting of a Hermitian `X` along `S = ker(‖X‖_∞ I − |X|)`.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    pub top_projector: Projection,
    /// `P_S X P_S`.
    pub top_part: Hermitian,
    /// `X − P_S X P_S`, supported on `S⊥`.
    pub complement_part: Hermitian,
    pub norm_inf: f64,
    /// Eigenvectors of `X`; the columns listed in `top_indices` span `S`.
    pub basis: CMat,
    pub eigenvalues: Vec<f64>,
    pub top_indices: Vec<usize>,
}

impl BlockSplit {
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|i| !self.top_indices.contains(i))
            .collect()
    }

    /// Spectral radius of the complement block (0 when `S` is everything).
    pub fn complement_radius(&self) -> f64 {
        self.complement_indices()
            .iter()
            .map(|&i| self.eigenvalues[i].abs())
            .fold(0.0, f64::max)
    }

    /// Orthonormal columns spanning `S` (`top = true`) or `S⊥`.
    pub fn block_basis(&self, top: bool) -> CMat {
        let idx = if top {
            self.top_indices.clone()
        } else {
            self.complement_indices()
        };
        let n = self.basis.nrows();
        let mut out = CMat::zeros(n, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            out.set_column(k, &self.basis.column(i));
        }
        out
    }
}

pub fn top_block_split(x: &Hermitian) -> Result<BlockSplit> {
    let e = eigh(x);
    let norm = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if norm == 0.0 {
        return Err(GeoError::ZeroMatrix);
    }
    let top_indices: Vec<usize> = (0..e.values.len())
        .filter(|&i| e.values[i].abs() >= norm * (1.0 - CLUSTER_RTOL))
        .collect();
    let top_projector = e.projector(&top_indices);
    let pm = top_projector.matrix();
    let top_part = Hermitian::symmetrize(pm * x.matrix() * pm);
    let complement_part = x.sub(&top_part);
    Ok(BlockSplit {
        top_projector,
        top_part,
        complement_part,
        norm_inf: norm,
        basis: e.vectors,
        eigenvalues: e.values,
        top_indices,
    })
}

/// Outcome of a uniqueness test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessCertificate {
    pub unique: bool,
    /// The `θ` with spectrum `⊆ {e^{iθ}, e^{−iθ}}` when unique.
    pub theta: Option<f64>,
    /// Two phases that cannot belong to one `±θ` pair.
    pub violating_pair: Option<(f64, f64)>,
    pub phases: Vec<f64>,
}

/// Decides whether `phases ⊆ {θ, −θ}` for some `0 ≤ θ < bound`.
pub(crate) fn fit_symmetric_pair(phases: Vec<f64>, bound: f64) -> UniquenessCertificate {
    let abs: Vec<f64> = phases.iter().map(|p| p.abs()).collect();
    let (mut imax, mut imin) = (0, 0);
    for i in 0..abs.len() {
        if abs[i] > abs[imax] {
            imax = i;
        }
        if abs[i] < abs[imin] {
            imin = i;
        }
    }
    if phases.is_empty() {
        return UniquenessCertificate {
            unique: true,
            theta: Some(0.0),
            violating_pair: None,
            phases,
        };
    }
    let theta = abs[imax];
    let spread = abs[imax] - abs[imin];
    if spread > PAIR_FIT_TOL {
        return UniquenessCertificate {
            unique: false,
            theta: None,
            violating_pair: Some((phases[imax], phases[imin])),
            phases,
        };
    }
    if theta >= bound - PAIR_FIT_TOL {
        return UniquenessCertificate {
            unique: false,
            theta: None,
            violating_pair: Some((phases[imax], -phases[imax])),
            phases,
        };
    }
    UniquenessCertificate {
        unique: true,
        theta: Some(theta),
        violating_pair: None,
        phases,
    }
}
