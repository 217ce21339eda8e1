use super::{max_abs, CMat, Projection, STRUCTURE_TOL};
use crate::error::{GeoError, Result};

/// Mutually orthogonal projections summing to the identity.
#[derive(Debug, Clone)]
pub struct ProjectorSystem {
    projectors: Vec<Projection>,
}

impl ProjectorSystem {
    pub fn new(projectors: Vec<Projection>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(GeoError::InvalidInput("empty projector system".into()));
        };
        let n = first.dim();
        let tol = STRUCTURE_TOL * 1e2;
        let mut sum = CMat::zeros(n, n);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != n {
                return Err(GeoError::DimensionMismatch {
                    expected: n,
                    got: p.dim(),
                });
            }
            for q in &projectors[i + 1..] {
                let overlap = max_abs(&(p.matrix() * q.matrix()));
                if overlap > tol {
                    return Err(GeoError::InvalidInput(format!(
                        "projectors are not mutually orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
            sum += p.matrix();
        }
        let gap = max_abs(&(sum - CMat::identity(n, n)));
        if gap > tol {
            return Err(GeoError::InvalidInput(format!(
                "projectors do not sum to the identity (gap {gap:.3e})"
            )));
        }
        Ok(ProjectorSystem { projectors })
    }

    /// The trivial system `{I}`.
    pub fn trivial(n: usize) -> Self {
        ProjectorSystem {
            projectors: vec![Projection::identity(n)],
        }
    }

    /// Rank-one projections onto the canonical basis vectors.
    pub fn canonical(n: usize) -> Self {
        ProjectorSystem {
            projectors: (0..n).map(|i| Projection::coordinate(n, &[i])).collect(),
        }
    }

    /// Projections onto groups of columns of a unitary `basis`.
    pub fn from_basis_groups(basis: &CMat, groups: &[Vec<usize>]) -> Result<Self> {
        let n = basis.nrows();
        let projectors = groups
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| {
                let mut cols = CMat::zeros(n, g.len());
                for (k, &i) in g.iter().enumerate() {
                    cols.set_column(k, &basis.column(i));
                }
                Projection::from_orthonormal_columns(&cols)
            })
            .collect();
        ProjectorSystem::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn projectors(&self) -> &[Projection] {
        &self.projectors
    }
}

/// The pinching `sum_j P_j m P_j`.
pub fn pinch(system: &ProjectorSystem, m: &CMat) -> Result<CMat> {
    let n = system.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(GeoError::DimensionMismatch {
            expected: n,
            got: m.nrows(),
        });
    }
    let mut out = CMat::zeros(n, n);
    for p in system.projectors() {
        out += p.matrix() * m * p.matrix();
    }
    Ok(out)
}
