//! Dense complex linear algebra: Hermitian eigendecomposition, unitary
//! spectra, functional calculus, Schatten norms, pinching and the Fréchet
//! derivative of the exponential.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The newtypes in this module
//! ([`Hermitian`], [`Unitary`], [`PositiveDefinite`], [`Projection`]) are
//! validated on construction; everything downstream can assume the
//! invariant holds to working precision.

mod calculus;
mod frechet;
mod jacobi;
mod norms;
mod pinch;
mod unitary_eig;

pub use calculus::{exp_h, expi, inv_sqrt_pd, log_pd, log_unitary, matrix_function, powf_pd, sqrt_pd};
pub use frechet::{divided_difference_exp, exp_divided_difference, frechet_exp, DividedDifference};
pub use norms::{schatten_norm, schatten_norm_hermitian, singular_values, SchattenIndex};
pub use pinch::{pinch, ProjectorSystem};
pub use unitary_eig::{eig_unitary, UnitaryEigen};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GeoError, Result};

pub type CMat = DMatrix<Complex64>;

/// Relative tolerance for the Hermitian / unitary / idempotent invariants.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Inputs within this multiple of [`STRUCTURE_TOL`] are repaired, not rejected.
pub const REPAIR_FACTOR: f64 = 10.0;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn diag_real(values: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&x| real(x))))
}

pub fn diag_complex(values: &[Complex64]) -> CMat {
    CMat::from_diagonal(&DVector::from_column_slice(values))
}

/// `v * diag(d) * v^*` without forming the diagonal matrix.
pub(crate) fn congruence_diag(v: &CMat, d: &[Complex64]) -> CMat {
    let mut scaled = v.clone();
    for (j, &dj) in d.iter().enumerate() {
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= dj;
        }
    }
    scaled * v.adjoint()
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

fn check_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(GeoError::InvalidInput(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GeoError::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// A complex self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMat);

impl Hermitian {
    /// Validates hermiticity (relative to the largest entry) and symmetrizes.
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let scale = max_abs(&m).max(1.0);
        let deviation = max_abs(&(&m - m.adjoint())) / scale;
        if deviation > STRUCTURE_TOL * REPAIR_FACTOR {
            return Err(GeoError::NonHermitianInput { deviation });
        }
        Ok(Hermitian(hermitian_part(&m)))
    }

    /// Symmetrizes without validation. For results of arithmetic that is
    /// Hermitian in exact arithmetic.
    pub(crate) fn symmetrize(m: CMat) -> Self {
        Hermitian(hermitian_part(&m))
    }

    pub fn zeros(n: usize) -> Self {
        Hermitian(CMat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Hermitian(CMat::identity(n, n))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Hermitian(diag_real(values))
    }

    /// Builds the matrix from real row-major entries.
    pub fn from_real_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(GeoError::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Hermitian::new(CMat::from_iterator(
            n,
            n,
            (0..n * n).map(|k| real(entries[(k % n) * n + k / n])),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn eigh(&self) -> EigenDecomposition {
        EigenDecomposition::of(self)
    }

    /// Spectral norm, computed from the spectrum.
    pub fn norm_inf(&self) -> f64 {
        self.eigh().values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Hermitian {
        Hermitian(self.0.scale(s))
    }

    pub fn add(&self, other: &Hermitian) -> Hermitian {
        Hermitian(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Hermitian) -> Hermitian {
        Hermitian(&self.0 - &other.0)
    }

    /// `g * self * g^*`.
    pub fn congruence(&self, g: &CMat) -> Hermitian {
        Hermitian::symmetrize(g * &self.0 * g.adjoint())
    }
}

/// A unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(CMat);

impl Unitary {
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let deviation = max_abs(&(m.adjoint() * &m - CMat::identity(n, n)));
        if deviation > STRUCTURE_TOL * REPAIR_FACTOR {
            return Err(GeoError::NonUnitaryInput { deviation });
        }
        Ok(Unitary(m))
    }

    pub(crate) fn new_unchecked(m: CMat) -> Self {
        Unitary(m)
    }

    pub fn identity(n: usize) -> Self {
        Unitary(CMat::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    pub fn mul(&self, other: &Unitary) -> Unitary {
        Unitary(&self.0 * &other.0)
    }
}

/// A Hermitian matrix with strictly positive spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDefinite(Hermitian);

impl PositiveDefinite {
    pub fn new(m: CMat) -> Result<Self> {
        let h = Hermitian::new(m)?;
        PositiveDefinite::from_hermitian(h)
    }

    pub fn from_hermitian(h: Hermitian) -> Result<Self> {
        let min = h.eigh().values.last().copied().unwrap_or(1.0);
        if min <= 0.0 || !min.is_finite() {
            return Err(GeoError::DomainError(format!(
                "smallest eigenvalue {min:.3e} is not positive"
            )));
        }
        Ok(PositiveDefinite(h))
    }

    pub(crate) fn new_unchecked(h: Hermitian) -> Self {
        PositiveDefinite(h)
    }

    pub fn identity(n: usize) -> Self {
        PositiveDefinite(Hermitian::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.0
    }

    pub fn matrix(&self) -> &CMat {
        self.0.matrix()
    }
}

/// An orthogonal projection together with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    base: Hermitian,
    rank: usize,
}

impl Projection {
    pub fn new(m: CMat) -> Result<Self> {
        let base = Hermitian::new(m)?;
        let p = base.matrix();
        let deviation = max_abs(&(p * p - p));
        if deviation > STRUCTURE_TOL * REPAIR_FACTOR {
            return Err(GeoError::InvalidInput(format!(
                "matrix is not idempotent (deviation {deviation:.3e})"
            )));
        }
        let trace = p.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > 1e-6 {
            return Err(GeoError::InvalidInput(format!(
                "projection trace {trace} is not an integer"
            )));
        }
        Ok(Projection {
            base,
            rank: rank as usize,
        })
    }

    /// Projection onto the span of the given orthonormal columns.
    pub fn from_orthonormal_columns(cols: &CMat) -> Self {
        let rank = cols.ncols();
        Projection {
            base: Hermitian::symmetrize(cols * cols.adjoint()),
            rank,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Projection {
            base: Hermitian::zeros(n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            base: Hermitian::identity(n),
            rank: n,
        }
    }

    /// The canonical projection onto the listed coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let mut d = vec![0.0; n];
        for &a in axes {
            d[a] = 1.0;
        }
        Projection {
            base: Hermitian::from_diagonal(&d),
            rank: axes.len(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.base
    }

    pub fn matrix(&self) -> &CMat {
        self.base.matrix()
    }

    /// `I - P`.
    pub fn complement(&self) -> Projection {
        let n = self.dim();
        Projection {
            base: Hermitian(CMat::identity(n, n) - self.base.matrix()),
            rank: n - self.rank,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub vectors: CMat,
    pub values: Vec<f64>,
}

impl EigenDecomposition {
    pub fn of(h: &Hermitian) -> Self {
        let (values, vectors) = jacobi::jacobi_eigh(h.matrix());
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let n = values.len();
        let mut sorted_vectors = CMat::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            sorted_vectors.set_column(dst, &vectors.column(src));
        }
        EigenDecomposition {
            vectors: sorted_vectors,
            values: order.iter().map(|&i| values[i]).collect(),
        }
    }

    pub fn reconstruct(&self) -> CMat {
        let d: Vec<Complex64> = self.values.iter().map(|&x| real(x)).collect();
        congruence_diag(&self.vectors, &d)
    }

    /// `vectors * diag(f(values)) * vectors^*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Hermitian {
        let d: Vec<Complex64> = self.values.iter().map(|&x| real(f(x))).collect();
        Hermitian::symmetrize(congruence_diag(&self.vectors, &d))
    }

    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let d: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        congruence_diag(&self.vectors, &d)
    }

    /// Projection onto the span of the eigenvectors with the given indices.
    pub fn projector(&self, indices: &[usize]) -> Projection {
        let n = self.vectors.nrows();
        let mut cols = CMat::zeros(n, indices.len());
        for (k, &i) in indices.iter().enumerate() {
            cols.set_column(k, &self.vectors.column(i));
        }
        Projection::from_orthonormal_columns(&cols)
    }
}

/// Eigendecomposition of a Hermitian matrix (non-increasing eigenvalues).
pub fn eigh(h: &Hermitian) -> EigenDecomposition {
    EigenDecomposition::of(h)
}

/// Eigendecomposition of a raw matrix that must be Hermitian within tolerance.
pub fn eigh_checked(m: &CMat) -> Result<EigenDecomposition> {
    Ok(Hermitian::new(m.clone())?.eigh())
}

/// Commutator norm `max |AB - BA|` (entrywise).
pub fn commutator_residual(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a * b - b * a))
}
