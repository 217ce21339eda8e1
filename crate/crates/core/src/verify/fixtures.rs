//! Seeded curves used by the battery: generic Hermitian curves, commuting
//! projector systems, and deliberately non-minimal violators that the
//! checks must reject.

use std::f64::consts::PI;

use crate::curves::{sample, CurveGenerator, SampledCurve};
use crate::error::Result;
use crate::linalg::{diag_real, eigh, CMat, Hermitian, ProjectorSystem};
use crate::minimal::HermitianFamilyMember;
use crate::random::{gaussian_hermitian, rng, uniform};
use crate::spaces::SpaceTag;

/// `c(t) = t A + sin(πt) B + (t² − t) C` with Gaussian Hermitian `A, B, C`;
/// starts at `0` and is generically not minimal.
pub fn random_hermitian_curve(seed: u64, n: usize, n_steps: usize) -> Result<SampledCurve> {
    let mut r = rng(seed);
    let a = gaussian_hermitian(&mut r, n).into_matrix();
    let b = gaussian_hermitian(&mut r, n).into_matrix();
    let c = gaussian_hermitian(&mut r, n).into_matrix();
    let g = CurveGenerator::new(SpaceTag::Hermitian, move |t| {
        a.scale(t) + b.scale((PI * t).sin()) + c.scale(t * t - t)
    });
    sample(&g, n_steps)
}

/// Random grouping of an eigenbasis of `d` into commuting projectors. The
/// groups never split an eigenspace, so the system commutes with `d`.
pub fn commuting_system(seed: u64, d: &Hermitian) -> Result<ProjectorSystem> {
    let e = eigh(d);
    let n = d.dim();
    let scale = d.norm_inf().max(1.0);
    let mut r = rng(seed);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (e.values[j] - e.values[i]).abs() <= 1e-10 * scale {
            j += 1;
        }
        let cluster: Vec<usize> = (i..j).collect();
        if groups.is_empty() || uniform(&mut r, 0.0, 1.0) < 0.5 {
            groups.push(cluster);
        } else {
            let k = (uniform(&mut r, 0.0, groups.len() as f64) as usize).min(groups.len() - 1);
            groups[k].extend(cluster);
        }
        i = j;
    }
    ProjectorSystem::from_basis_groups(&e.vectors, &groups)
}

/// A minimal member plus `ε sin(πt)` times a Hermitian term coupling the
/// positive and negative eigenspaces of the endpoint. The endpoints are
/// unchanged; the block structure is broken.
pub fn off_block_bump(member: &HermitianFamilyMember, eps: f64, n_steps: usize) -> Result<SampledCurve> {
    let split = &member.split;
    let n = split.basis.nrows();
    let i = split.positive.first().copied().or(split.kernel.first().copied());
    let j = split.negative.first().copied().or(split.kernel.last().copied());
    let mut coupling = CMat::zeros(n, n);
    if let (Some(i), Some(j)) = (i, j) {
        if i != j {
            let (a, b) = (split.basis.column(i), split.basis.column(j));
            coupling = a * b.adjoint() + b * a.adjoint();
        }
    }
    let c = sample(&member.generator, n_steps)?;
    let points = c
        .grid
        .iter()
        .zip(&c.points)
        .map(|(&t, m)| m + coupling.scale(eps * (PI * t).sin()))
        .collect();
    SampledCurve::new(SpaceTag::Hermitian, c.grid, points)
}

/// `t ↦ diag(t + a sin(3πt), −t, 0, …)`: ends at a diagonal matrix, but for
/// `a > 1/(3π)` the first entry overshoots and comes back. Smaller
/// amplitudes give a monotone, hence minimal, curve.
pub fn oscillating_diagonal(n: usize, amplitude: f64, n_steps: usize) -> Result<SampledCurve> {
    let g = CurveGenerator::new(SpaceTag::Hermitian, move |t| {
        let mut d = vec![0.0; n];
        d[0] = t + amplitude * (3.0 * PI * t).sin();
        if n > 1 {
            d[1] = -t;
        }
        diag_real(&d)
    });
    sample(&g, n_steps)
}

/// Curve whose top eigenvalue rises to `2` and falls back to `1`.
pub fn eigencurve_reversal(n: usize, n_steps: usize) -> Result<SampledCurve> {
    let g = CurveGenerator::new(SpaceTag::Hermitian, move |t| {
        let mut d = vec![0.0; n];
        d[0] = 4.0 * t * (1.0 - t) + t;
        diag_real(&d)
    });
    sample(&g, n_steps)
}
