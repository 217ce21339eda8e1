//! Functional calculus on Hermitian, positive and unitary matrices.

use num_complex::Complex64;

use super::{congruence_diag, eig_unitary, eigh, Hermitian, PositiveDefinite, Unitary};
use crate::error::{GeoError, Result};

/// `f(h)` by the spectral theorem. Fails with `DOMAIN_ERROR` when `f` is not
/// finite at some eigenvalue.
pub fn matrix_function(h: &Hermitian, f: impl Fn(f64) -> f64) -> Result<Hermitian> {
    let e = eigh(h);
    let mut mapped = Vec::with_capacity(e.values.len());
    for &x in &e.values {
        let y = f(x);
        if !y.is_finite() {
            return Err(GeoError::DomainError(format!("function undefined at eigenvalue {x}")));
        }
        mapped.push(y);
    }
    let d: Vec<Complex64> = mapped.into_iter().map(|y| Complex64::new(y, 0.0)).collect();
    Ok(Hermitian::symmetrize(congruence_diag(&e.vectors, &d)))
}

/// `exp(i x)`.
pub fn expi(x: &Hermitian) -> Unitary {
    let e = eigh(x);
    let d: Vec<Complex64> = e.values.iter().map(|&v| Complex64::from_polar(1.0, v)).collect();
    Unitary::new_unchecked(congruence_diag(&e.vectors, &d))
}

/// `exp(x)` for Hermitian `x`.
pub fn exp_h(x: &Hermitian) -> PositiveDefinite {
    PositiveDefinite::new_unchecked(eigh(x).map(f64::exp))
}

/// Principal logarithm of a positive definite matrix.
pub fn log_pd(a: &PositiveDefinite) -> Hermitian {
    eigh(a.hermitian()).map(|x| x.max(f64::MIN_POSITIVE).ln())
}

/// `a^t` for real `t`.
pub fn powf_pd(a: &PositiveDefinite, t: f64) -> PositiveDefinite {
    PositiveDefinite::new_unchecked(eigh(a.hermitian()).map(|x| x.max(f64::MIN_POSITIVE).powf(t)))
}

pub fn sqrt_pd(a: &PositiveDefinite) -> PositiveDefinite {
    PositiveDefinite::new_unchecked(eigh(a.hermitian()).map(|x| x.max(0.0).sqrt()))
}

pub fn inv_sqrt_pd(a: &PositiveDefinite) -> PositiveDefinite {
    PositiveDefinite::new_unchecked(eigh(a.hermitian()).map(|x| 1.0 / x.max(f64::MIN_POSITIVE).sqrt()))
}

/// The Hermitian `X` with `expi(X) = u` and spectrum in (-pi, pi]; the
/// eigenvalue -1 maps to +pi.
pub fn log_unitary(u: &Unitary) -> Hermitian {
    let e = eig_unitary(u);
    let d: Vec<Complex64> = e.phases.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    Hermitian::symmetrize(congruence_diag(e.vectors.matrix(), &d))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;
    use crate::linalg::{diag_complex, max_abs, CMat};

    #[test]
    fn exp_of_diagonal() {
        let e = exp_h(&Hermitian::from_diagonal(&[0.0, 1.0]));
        assert!((e.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((e.matrix()[(1, 1)].re - E).abs() < 1e-15);
    }

    #[test]
    fn log_of_identity() {
        let l = log_pd(&PositiveDefinite::identity(3));
        assert_eq!(max_abs(l.matrix()), 0.0);
    }

    #[test]
    fn log_rejects_nonpositive_via_matrix_function() {
        let h = Hermitian::from_diagonal(&[1.0, -1.0]);
        let err = matrix_function(&h, f64::ln).unwrap_err();
        assert_eq!(err.code(), "DOMAIN_ERROR");
    }

    #[test]
    fn log_of_minus_identity() {
        let u = Unitary::new(CMat::identity(3, 3).scale(-1.0)).unwrap();
        let x = log_unitary(&u);
        assert!(max_abs(&(x.matrix() - CMat::identity(3, 3).scale(PI))) < 1e-15);
    }

    #[test]
    fn expi_of_diagonal() {
        let u = expi(&Hermitian::from_diagonal(&[FRAC_PI_2, -FRAC_PI_4]));
        let expected = diag_complex(&[Complex64::new(0.0, 1.0), Complex64::from_polar(1.0, -FRAC_PI_4)]);
        assert!(max_abs(&(u.matrix() - expected)) < 1e-15);
    }
}
