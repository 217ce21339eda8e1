//! Reference computations used only by the test suites. Every routine here
//! avoids the eigensolvers of `mingeo-core` so that agreement between the
//! two is meaningful: exponentials come from Taylor series with scaling and
//! squaring, square roots from the Denman–Beavers iteration, eigenvalues
//! from characteristic-polynomial roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a 30-term Taylor
/// polynomial.
pub fn taylor_expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = one_norm(m);
    let mut s = 0u32;
    while norm / f64::from(1u32 << s.min(30)) > 0.25 && s < 60 {
        s += 1;
    }
    let scaled = m.unscale(2f64.powi(s as i32));
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(i h)` through [`taylor_expm`].
pub fn taylor_expi(h: &CMat) -> CMat {
    taylor_expm(&(h * Complex64::new(0.0, 1.0)))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, refined by Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `∫_0^1 e^{t h} k e^{(1−t) h} dt` by 64-node Gauss–Legendre quadrature.
pub fn frechet_quadrature(h: &CMat, k: &CMat) -> CMat {
    let n = h.nrows();
    let (nodes, weights) = gauss_legendre(64);
    let mut out = CMat::zeros(n, n);
    for (t, w) in nodes.iter().zip(&weights) {
        let left = taylor_expm(&h.scale(*t));
        let right = taylor_expm(&h.scale(1.0 - t));
        out += (left * k * right).scale(*w);
    }
    out
}

/// Central difference `(e^{h + εk} − e^{h − εk}) / 2ε`.
pub fn frechet_central_difference(h: &CMat, k: &CMat, eps: f64) -> CMat {
    (taylor_expm(&(h + k.scale(eps))) - taylor_expm(&(h - k.scale(eps)))).unscale(2.0 * eps)
}

/// Coefficients `c_0..c_n` (with `c_n = 1`) of `det(x I − h)` for a
/// Hermitian `h`, from power sums and Newton's identities.
pub fn charpoly(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let mut power = CMat::identity(n, n);
    let mut sums = vec![0.0; n + 1];
    for k in 1..=n {
        power = &power * h;
        sums[k] = power.trace().re;
    }
    // e_k elementary symmetric polynomials
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * sums[i];
        }
        e[k] = acc / k as f64;
    }
    // det(xI − h) = Σ (−1)^k e_k x^{n−k}
    let mut c = vec![0.0; n + 1];
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[n - k] = sign * e[k];
    }
    c
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

/// Real roots of a polynomial known to have only real roots, via the
/// interlacing of its roots with those of its derivative.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max);
    let mut crit = real_roots(&derivative(c));
    crit.reverse();
    let mut edges = vec![-bound];
    edges.extend(crit.iter().copied());
    edges.push(bound);
    let dc = derivative(c);
    let mut roots = Vec::with_capacity(deg);
    for w in edges.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            // no sign change: a double root sits at the nearer critical point
            let cand = if fa.abs() < fb.abs() { a } else { b };
            if horner(c, cand).abs() < 1e-8 * (1.0 + bound.powi(deg as i32)) {
                roots.push(cand);
            }
            continue;
        }
        let mut fa = fa;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = horner(c, m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if b - a < 1e-15 * (1.0 + m.abs()) {
                break;
            }
        }
        let mut x = 0.5 * (a + b);
        for _ in 0..3 {
            let d = horner(&dc, x);
            if d != 0.0 {
                let step = horner(c, x) / d;
                if step.abs() < (b - a).abs() + 1e-12 {
                    x -= step;
                }
            }
        }
        roots.push(x);
    }
    roots.truncate(deg);
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}

/// Eigenvalues of a Hermitian matrix (non-increasing) as roots of its
/// characteristic polynomial.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    real_roots(&charpoly(h))
}

/// Principal square root of a positive definite matrix by the
/// Denman–Beavers iteration.
pub fn denman_beavers_sqrt(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMat::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().expect("invertible iterate");
        let zi = z.clone().try_inverse().expect("invertible iterate");
        let ny = (&y + zi).scale(0.5);
        let nz = (&z + yi).scale(0.5);
        let delta = (&ny - &y).norm() / ny.norm();
        y = ny;
        z = nz;
        if delta < 1e-15 {
            break;
        }
    }
    y
}

/// `a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}` from Denman–Beavers roots
/// and LU inverses.
pub fn geometric_mean(a: &CMat, b: &CMat) -> CMat {
    let ah = denman_beavers_sqrt(a);
    let ahi = ah.clone().try_inverse().expect("positive definite");
    let inner = &ahi * b * &ahi;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    &ah * denman_beavers_sqrt(&inner) * &ah
}

/// `a^k` by repeated squaring.
pub fn int_power(a: &CMat, mut k: u32) -> CMat {
    let n = a.nrows();
    let mut base = a.clone();
    let mut acc = CMat::identity(n, n);
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

/// Largest singular value by power iteration on `m* m`.
pub fn spectral_norm(m: &CMat) -> f64 {
    let n = m.ncols();
    let g = m.adjoint() * m;
    let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64));
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w = &g * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.norm();
        v = w.unscale(norm);
        if (next - lambda).abs() < 1e-15 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// Brute-force version of the `{θ, −θ}` test: tries every `|φ_i|` as the
/// candidate `θ` and accepts when every phase matches `±θ` within `tol`
/// and `θ < bound − tol`.
pub fn brute_force_pair_fit(phases: &[f64], bound: f64, tol: f64) -> Option<f64> {
    if phases.is_empty() {
        return Some(0.0);
    }
    phases
        .iter()
        .map(|p| p.abs())
        .filter(|&theta| theta < bound - tol)
        .find(|&theta| {
            phases
                .iter()
                .all(|&p| (p - theta).abs() <= tol || (p + theta).abs() <= tol)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            v.len(),
            v.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    #[test]
    fn expm_of_diagonal() {
        let e = taylor_expm(&diag(&[0.0, 1.0, -3.0]));
        assert!((e[(1, 1)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(2, 2)].re - (-3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(64);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn roots_of_diagonal() {
        let r = hermitian_eigenvalues(&diag(&[3.0, -4.0, 0.5]));
        assert!((r[0] - 3.0).abs() < 1e-12 && (r[1] - 0.5).abs() < 1e-12 && (r[2] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn db_sqrt() {
        let a = diag(&[4.0, 9.0]);
        let s = denman_beavers_sqrt(&a);
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-14 && (s[(1, 1)].re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pair_fit() {
        assert_eq!(brute_force_pair_fit(&[0.5, -0.5, 0.5], 3.0, 1e-9), Some(0.5));
        assert_eq!(brute_force_pair_fit(&[0.5, 0.0], 3.0, 1e-9), None);
    }
}
