//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::CMat;

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_RTOL: f64 = 1e-12;

/// Diagonalizes a Hermitian matrix. Returns unsorted eigenvalues and the
/// matrix whose columns are the matching eigenvectors.
///
/// Only the lower and upper triangles' average is used, so the input should
/// already be Hermitian to working precision.
pub(crate) fn jacobi_eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = CMat::identity(n, n);
    if n <= 1 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return (values, v);
    }

    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return (vec![0.0; n], v);
    }
    let target = OFF_DIAGONAL_RTOL * frob;

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, frob);
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates entry (p, q) with the complex rotation J = D R, where
/// D = diag(1, conj(e)) makes the pivot real and R is the classical real
/// Jacobi rotation. Applies A <- J* A J and V <- V J.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= f64::EPSILON * 1e-3 * scale {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let e = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -e.conj() * s;
    let jqq = e.conj() * c;

    let n = a.nrows();
    // A <- A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A <- J* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (mut vals, v) = jacobi_eigh(&h);
        let recon = &v
            * CMat::from_diagonal(&nalgebra::DVector::from_iterator(2, vals.iter().map(|&x| c(x, 0.0))))
            * v.adjoint();
        assert!((recon - &h).norm() < 1e-14);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let (vals, v) = jacobi_eigh(&CMat::zeros(3, 3));
        assert_eq!(vals, vec![0.0; 3]);
        assert_eq!(v, CMat::identity(3, 3));
    }
}
