//! Fréchet derivative of the matrix exponential through the first divided
//! difference: in an eigenbasis of `h`, `D exp(h)[k] = exp^[1](h) ∘ k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{eigh, CMat, Hermitian, Unitary};
use crate::error::{GeoError, Result};

const CONFLUENT_RTOL: f64 = 1e-8;

fn divided_difference_entry(a: f64, b: f64) -> f64 {
    let delta = a - b;
    if delta.abs() < CONFLUENT_RTOL * 1f64.max(a.abs()).max(b.abs()) {
        ((a + b) / 2.0).exp()
    } else {
        // (e^a - e^b)/(a - b) = e^b expm1(a - b)/(a - b), free of cancellation
        b.exp() * delta.exp_m1() / delta
    }
}

/// First divided difference of `exp` at the given eigenvalues.
pub fn exp_divided_difference(values: &[f64]) -> DMatrix<f64> {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| divided_difference_entry(values[i], values[j]))
}

/// Divided-difference matrix of `exp` together with the eigenbasis it is
/// expressed in.
#[derive(Debug, Clone)]
pub struct DividedDifference {
    pub basis: Unitary,
    pub eigenvalues: Vec<f64>,
    pub matrix: Hermitian,
}

impl DividedDifference {
    pub fn of(h: &Hermitian) -> Self {
        let e = eigh(h);
        let dd = exp_divided_difference(&e.values);
        DividedDifference {
            basis: Unitary::new_unchecked(e.vectors),
            matrix: Hermitian::symmetrize(dd.map(|x| Complex64::new(x, 0.0))),
            eigenvalues: e.values,
        }
    }
}

/// Divided difference of `exp` at `h`, expressed in the eigenbasis of `h`
/// (eigenvalues non-increasing).
pub fn divided_difference_exp(h: &Hermitian) -> DividedDifference {
    DividedDifference::of(h)
}

/// `D exp(h)[k] = ∫_0^1 e^{t h} k e^{(1-t) h} dt`, evaluated as a Hadamard
/// product in the eigenbasis of `h`.
pub fn frechet_exp(h: &Hermitian, k: &Hermitian) -> Result<Hermitian> {
    if h.dim() != k.dim() {
        return Err(GeoError::DimensionMismatch {
            expected: h.dim(),
            got: k.dim(),
        });
    }
    let e = eigh(h);
    let dd = exp_divided_difference(&e.values);
    let w = &e.vectors;
    let mut local: CMat = w.adjoint() * k.matrix() * w;
    for j in 0..local.ncols() {
        for i in 0..local.nrows() {
            local[(i, j)] *= dd[(i, j)];
        }
    }
    Ok(Hermitian::symmetrize(w * local * w.adjoint()))
}
