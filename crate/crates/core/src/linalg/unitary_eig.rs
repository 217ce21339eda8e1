//! Spectral decomposition of unitary matrices.
//!
//! A unitary `u` is normal, so its Hermitian and skew-Hermitian parts
//! `Re(u) = (u + u*)/2` and `Im(u) = (u - u*)/(2i)` commute and share an
//! eigenbasis. We diagonalize the fixed combination `Re(u) + c Im(u)`, read
//! the phases off the diagonal of `V* u V`, and re-split any cluster whose
//! residual is too large (accidental degeneracy of the combination).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{congruence_diag, eigh, CMat, Hermitian, Unitary};

/// Mixing constant for the joint diagonalization.
const MIX: f64 = 0.7310585786;
/// Alternative constants used when re-splitting a cluster.
const REMIX: [f64; 3] = [-1.3763819205, 0.2679491924, 3.0776835372];
const RESIDUAL_TOL: f64 = 1e-8;
const CLUSTER_GAP: f64 = 1e-4;
/// Phases this close to -pi are reported as +pi.
const BRANCH_SNAP: f64 = 1e-11;

/// `u = vectors * diag(exp(i phases)) * vectors^*`, phases in (-pi, pi],
/// sorted non-increasing.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub vectors: Unitary,
    pub phases: Vec<f64>,
}

impl UnitaryEigen {
    pub fn reconstruct(&self) -> CMat {
        let d: Vec<Complex64> = self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        congruence_diag(self.vectors.matrix(), &d)
    }
}

fn split_parts(u: &CMat, c: f64) -> Hermitian {
    let re = (u + u.adjoint()).scale(0.5);
    let im = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
    Hermitian::symmetrize(re + im.scale(c))
}

fn offdiag_residual(b: &CMat) -> f64 {
    let n = b.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                worst = worst.max(b[(i, j)].norm());
            }
        }
    }
    worst
}

/// Diagonalizes `u` (assumed unitary) in place of `v`, recursing into
/// clusters of the mixed operator that were not split cleanly.
fn diagonalize(u: &CMat, depth: usize) -> CMat {
    let c = if depth == 0 {
        MIX
    } else {
        REMIX[(depth - 1) % REMIX.len()]
    };
    let e = eigh(&split_parts(u, c));
    let mut v = e.vectors;
    let b = v.adjoint() * u * &v;
    if offdiag_residual(&b) <= RESIDUAL_TOL || depth > REMIX.len() {
        return v;
    }

    let n = u.nrows();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (e.values[end - 1] - e.values[end]).abs() < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let block = b.view((start, start), (end - start, end - start)).into_owned();
            let w = diagonalize(&block, depth + 1);
            let cols = v.columns(start, end - start).into_owned() * w;
            v.columns_mut(start, end - start).copy_from(&cols);
        }
        start = end;
    }
    v
}

fn principal_phase(z: Complex64) -> f64 {
    let phase = z.im.atan2(z.re);
    if phase <= -PI + BRANCH_SNAP {
        PI
    } else {
        phase
    }
}

/// Eigendecomposition of a unitary matrix with phases in (-pi, pi]; the
/// eigenvalue -1 gets phase +pi.
pub fn eig_unitary(u: &Unitary) -> UnitaryEigen {
    let m = u.matrix();
    let n = m.nrows();
    let v = diagonalize(m, 0);
    let b = v.adjoint() * m * &v;
    let phases: Vec<f64> = (0..n).map(|k| principal_phase(b[(k, k)])).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[b].total_cmp(&phases[a]));
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    UnitaryEigen {
        vectors: Unitary::new_unchecked(vectors),
        phases: order.iter().map(|&i| phases[i]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_complex, expi, max_abs};

    #[test]
    fn identity_phases() {
        let e = eig_unitary(&Unitary::identity(3));
        assert_eq!(e.phases, vec![0.0; 3]);
    }

    #[test]
    fn minus_identity_takes_plus_pi() {
        let m = CMat::identity(2, 2).scale(-1.0);
        let e = eig_unitary(&Unitary::new(m).unwrap());
        assert_eq!(e.phases, vec![PI, PI]);
    }

    #[test]
    fn accidental_degeneracy_is_split() {
        // phases a, b with a + b = 2 atan(MIX) collide in Re + MIX Im.
        let phi0 = MIX.atan();
        let a = phi0 + 0.9;
        let b = phi0 - 0.9;
        let d = diag_complex(&[Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)]);
        let w = expi(&Hermitian::from_real_rows(2, &[0.3, 0.7, 0.7, -0.2]).unwrap());
        let u = w.matrix() * d * w.matrix().adjoint();
        let e = eig_unitary(&Unitary::new(u.clone()).unwrap());
        assert!((e.phases[0] - a).abs() < 1e-10);
        assert!((e.phases[1] - b).abs() < 1e-10);
        assert!(max_abs(&(e.reconstruct() - u)) < 1e-10);
    }
}
