//! Seeded random matrices. Every stream is a ChaCha8 generator seeded from a
//! `u64`, so results are reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eigh, exp_h, expi, max_abs, CMat, Hermitian, PositiveDefinite, Projection, Unitary};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th instance of the check `name` under `master`.
/// FNV-1a over the name, mixed with splitmix64.
pub fn derive_seed(master: u64, name: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(splitmix(master ^ h).wrapping_add(index))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn gaussian_matrix(rng: &mut SeededRng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// GUE-like Hermitian matrix.
pub fn gaussian_hermitian(rng: &mut SeededRng, n: usize) -> Hermitian {
    let g = gaussian_matrix(rng, n);
    Hermitian::new((&g + g.adjoint()).scale(0.5)).expect("symmetrized")
}

/// Random Hermitian matrix rescaled to the given spectral norm.
pub fn hermitian_with_norm(rng: &mut SeededRng, n: usize, norm: f64) -> Hermitian {
    loop {
        let h = gaussian_hermitian(rng, n);
        let current = h.norm_inf();
        if current > 1e-3 {
            return h.scale(norm / current);
        }
    }
}

/// Haar-distributed unitary (QR of a complex Gaussian with phase correction).
pub fn haar_unitary(rng: &mut SeededRng, n: usize) -> Unitary {
    let qr = gaussian_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new(q).expect("QR factor is unitary")
}

/// `exp` of a Gaussian Hermitian matrix with spectral norm clipped to 3.
pub fn random_positive(rng: &mut SeededRng, n: usize) -> PositiveDefinite {
    let h = gaussian_hermitian(rng, n);
    let norm = h.norm_inf();
    let h = if norm > 3.0 { h.scale(3.0 / norm) } else { h };
    exp_h(&h)
}

/// `expi(X)` with `||X||_inf` uniform in `(0, max_norm)`.
pub fn unitary_near_identity(rng: &mut SeededRng, n: usize, max_norm: f64) -> Unitary {
    let norm = rng.random_range(0.0..max_norm).max(1e-3 * max_norm);
    expi(&hermitian_with_norm(rng, n, norm))
}

/// A uniformly rotated projection of the given rank.
pub fn random_projection(rng: &mut SeededRng, n: usize, rank: usize) -> Projection {
    let w = haar_unitary(rng, n);
    Projection::from_orthonormal_columns(&w.matrix().columns(0, rank).into_owned())
}

/// Random invertible matrix with condition number bounded by roughly `e^2`.
pub fn random_invertible(rng: &mut SeededRng, n: usize) -> CMat {
    let u = haar_unitary(rng, n);
    let v = haar_unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0f64).exp()).collect();
    let d = crate::linalg::diag_real(&s);
    u.matrix() * d * v.matrix()
}

/// Hermitian `X` that is `P`-codiagonal (`X = PX + XP`) with prescribed
/// principal angles, built in a random basis adapted to `P`.
pub fn codiagonal_generator(rng: &mut SeededRng, p: &Projection, angles: &[f64]) -> Hermitian {
    let n = p.dim();
    let e = eigh(p.hermitian());
    let rank = p.rank();
    // eigenvectors: first `rank` span R(P), the rest span N(P)
    let range = e.vectors.columns(0, rank).into_owned();
    let kernel = e.vectors.columns(rank, n - rank).into_owned();
    let ru = haar_unitary(rng, rank.max(1));
    let ku = haar_unitary(rng, (n - rank).max(1));
    let range = if rank > 0 { range * ru.matrix() } else { range };
    let kernel = if n > rank { kernel * ku.matrix() } else { kernel };
    let mut x = CMat::zeros(n, n);
    for (k, &theta) in angles.iter().enumerate().take(rank.min(n - rank)) {
        let a = range.column(k);
        let b = kernel.column(k);
        x += (a * b.adjoint() + b * a.adjoint()).scale(theta);
    }
    Hermitian::symmetrize(x)
}

/// Projection `e^{iX} P e^{-iX}` for a random `P`-codiagonal `X` with the
/// given principal angles.
pub fn projection_at_angles(rng: &mut SeededRng, p: &Projection, angles: &[f64]) -> Projection {
    let x = codiagonal_generator(rng, p, angles);
    let u = expi(&x);
    let q = u.matrix() * p.matrix() * u.matrix().adjoint();
    let q = (&q + q.adjoint()).scale(0.5);
    debug_assert!(max_abs(&(&q * &q - &q)) < 1e-10);
    Projection::new(q).expect("conjugated projection")
}

/// Random uniform real in `[lo, hi)`.
pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
