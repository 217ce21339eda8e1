use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::curves::{length, CurveGenerator, SampledCurve};
use crate::error::{GeoError, Result};
use crate::linalg::{
    eigh, exp_h, expi, max_abs, powf_pd, CMat, Hermitian, PositiveDefinite, Projection, SchattenIndex,
};
use crate::random::{haar_unitary, rng};
use crate::spaces::SpaceTag;

/// Default tolerance (relative to `max(1, ‖c(1)‖_∞)`) for the block
/// structure test in [`is_minimal_hermitian_trace`].
pub const DEFAULT_ENDPOINT_TOLERANCE: f64 = 1e-8;
/// Eigenvalue slack for the sign of block increments.
const INCREMENT_TOL: f64 = 1e-7;
/// Relative tolerance for the length clause.
const LENGTH_RTOL: f64 = 1e-4;
/// Smallest weight drawn for the spectral increments, keeps their sum well
/// conditioned.
const MIN_WEIGHT: f64 = 1e-3;

/// Spectral blocks of an endpoint `D`: positive, kernel and negative
/// eigenspaces.
#[derive(Debug, Clone)]
pub struct HermitianSplit {
    pub s1: Projection,
    pub s2: Projection,
    pub s3: Projection,
    pub positive_part: Hermitian,
    pub negative_part: Hermitian,
    /// Eigenvectors of `D`, eigenvalues non-increasing.
    pub basis: CMat,
    pub eigenvalues: Vec<f64>,
    pub positive: Vec<usize>,
    pub kernel: Vec<usize>,
    pub negative: Vec<usize>,
}

impl HermitianSplit {
    /// Splits `d` treating eigenvalues with `|λ| ≤ tol` as zero.
    pub fn of(d: &Hermitian, tol: f64) -> Self {
        let e = eigh(d);
        let n = e.values.len();
        let positive: Vec<usize> = (0..n).filter(|&i| e.values[i] > tol).collect();
        let negative: Vec<usize> = (0..n).filter(|&i| e.values[i] < -tol).collect();
        let kernel: Vec<usize> = (0..n).filter(|&i| e.values[i].abs() <= tol).collect();
        let pos_vals: Vec<f64> = e.values.iter().map(|&v| if v > tol { v } else { 0.0 }).collect();
        let neg_vals: Vec<f64> = e.values.iter().map(|&v| if v < -tol { v } else { 0.0 }).collect();
        let rebuild = |vals: &[f64]| {
            let mut scaled = e.vectors.clone();
            for (j, &v) in vals.iter().enumerate() {
                for i in 0..n {
                    scaled[(i, j)] *= v;
                }
            }
            Hermitian::symmetrize(scaled * e.vectors.adjoint())
        };
        HermitianSplit {
            s1: e.projector(&positive),
            s2: e.projector(&kernel),
            s3: e.projector(&negative),
            positive_part: rebuild(&pos_vals),
            negative_part: rebuild(&neg_vals),
            basis: e.vectors,
            eigenvalues: e.values,
            positive,
            kernel,
            negative,
        }
    }

    fn block_of(&self, i: usize) -> u8 {
        if self.positive.contains(&i) {
            1
        } else if self.negative.contains(&i) {
            3
        } else {
            2
        }
    }
}

#[derive(Debug, Clone)]
pub struct HermitianFamilyMember {
    pub generator: CurveGenerator,
    pub split: HermitianSplit,
    /// `‖D‖_1`, the trace-norm length of every member.
    pub trace_norm: f64,
    /// Curve values at the knots `j / n_segments`.
    pub knots: Vec<CMat>,
}

impl HermitianFamilyMember {
    /// Point reached after a fraction `t` of the total trace-norm length.
    /// On every segment the trace-norm length grows linearly, so the
    /// arclength parameter is found by inverting a piecewise-linear map.
    pub fn at_length_fraction(&self, t: f64) -> CMat {
        let m = self.knots.len() - 1;
        let n = self.knots[0].nrows();
        let mut cumulative = vec![0.0];
        for j in 0..m {
            let inc = Hermitian::symmetrize(&self.knots[j + 1] - &self.knots[j]);
            let l: f64 = eigh(&inc).values.iter().map(|v| v.abs()).sum();
            cumulative.push(cumulative[j] + l);
        }
        let total = cumulative[m];
        if total == 0.0 {
            return CMat::zeros(n, n);
        }
        let target = t.clamp(0.0, 1.0) * total;
        let j = cumulative
            .partition_point(|&x| x <= target)
            .saturating_sub(1)
            .min(m - 1);
        let span = cumulative[j + 1] - cumulative[j];
        let frac = if span > 0.0 {
            ((target - cumulative[j]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        &self.knots[j] + (&self.knots[j + 1] - &self.knots[j]).scale(frac)
    }
}

/// Seeded increments `B_j ≥ 0` of a `k × k` block with `Σ B_j = diag(d)`:
/// `B_j = diag(d)^{1/2} T^{-1/2} C_j T^{-1/2} diag(d)^{1/2}` with
/// `C_j = V_j diag(u_j) V_j*` and `T = Σ C_j`.
fn psd_increments(rng: &mut crate::random::SeededRng, d: &[f64], m: usize) -> Vec<CMat> {
    let k = d.len();
    let cs: Vec<CMat> = (0..m)
        .map(|_| {
            let v = haar_unitary(rng, k);
            let u: Vec<f64> = (0..k).map(|_| rng.random_range(MIN_WEIGHT..=1.0)).collect();
            let mut scaled = v.matrix().clone();
            for (j, &w) in u.iter().enumerate() {
                for i in 0..k {
                    scaled[(i, j)] *= w;
                }
            }
            scaled * v.matrix().adjoint()
        })
        .collect();
    let mut total = CMat::zeros(k, k);
    for c in &cs {
        total += c;
    }
    let t = PositiveDefinite::new_unchecked(Hermitian::symmetrize(total));
    let t_inv_half = powf_pd(&t, -0.5);
    let d_half = crate::linalg::diag_real(&d.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    let left = &d_half * t_inv_half.matrix();
    cs.iter()
        .map(|c| {
            let b = &left * c * left.adjoint();
            (&b + b.adjoint()).scale(0.5)
        })
        .collect()
}

/// Embeds a block given on the columns `idx` of `basis` into `n × n`.
fn embed(basis: &CMat, idx: &[usize], block: &CMat) -> CMat {
    let n = basis.nrows();
    let mut cols = CMat::zeros(n, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        cols.set_column(k, &basis.column(i));
    }
    &cols * block * cols.adjoint()
}

/// A trace-norm minimal curve from `0` to `d`: the positive eigenspace of
/// `d` is filled by a chain of PSD increments, the negative one by NSD
/// increments, the kernel stays at zero. The curve is linear between the
/// knots `j / n_segments`.
pub fn minimal_family_hermitian(d: &Hermitian, seed: u64, n_segments: usize) -> Result<HermitianFamilyMember> {
    if n_segments == 0 {
        return Err(GeoError::InvalidInput("n_segments must be at least 1".into()));
    }
    let tol = 1e-13 * d.norm_inf().max(1.0);
    let split = HermitianSplit::of(d, tol);
    let trace_norm = split.eigenvalues.iter().map(|v| v.abs()).sum();
    if n_segments == 1 {
        let dm = d.matrix().clone();
        let knots = vec![CMat::zeros(d.dim(), d.dim()), dm.clone()];
        return Ok(HermitianFamilyMember {
            generator: CurveGenerator::new(SpaceTag::Hermitian, move |t| dm.scale(t)),
            split,
            trace_norm,
            knots,
        });
    }

    let mut r = rng(seed);
    let pos: Vec<f64> = split.positive.iter().map(|&i| split.eigenvalues[i]).collect();
    let neg: Vec<f64> = split.negative.iter().map(|&i| -split.eigenvalues[i]).collect();
    let pos_inc = if pos.is_empty() {
        Vec::new()
    } else {
        psd_increments(&mut r, &pos, n_segments)
    };
    let neg_inc = if neg.is_empty() {
        Vec::new()
    } else {
        psd_increments(&mut r, &neg, n_segments)
    };
    let n = d.dim();
    let increments: Vec<CMat> = (0..n_segments)
        .map(|j| {
            let mut b = CMat::zeros(n, n);
            if !pos_inc.is_empty() {
                b += embed(&split.basis, &split.positive, &pos_inc[j]);
            }
            if !neg_inc.is_empty() {
                b -= embed(&split.basis, &split.negative, &neg_inc[j]);
            }
            b
        })
        .collect();
    let mut knots = vec![CMat::zeros(n, n)];
    for b in &increments {
        let next = knots.last().unwrap() + b;
        knots.push(next);
    }
    // land exactly on the endpoint
    *knots.last_mut().unwrap() = split.positive_part.matrix() + split.negative_part.matrix();

    let m = n_segments;
    let stored = knots.clone();
    let generator = CurveGenerator::new(SpaceTag::Hermitian, move |t| {
        let s = (t.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let j = (s.floor() as usize).min(m - 1);
        let frac = s - j as f64;
        &knots[j] + (&knots[j + 1] - &knots[j]).scale(frac)
    });
    Ok(HermitianFamilyMember {
        generator,
        split,
        trace_norm,
        knots: stored,
    })
}

/// The three conditions of the trace-norm characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// Length equals `‖c(1)‖_1`.
    #[serde(rename = "length")]
    Length,
    /// Block structure along the eigenspaces of `c(1)`.
    #[serde(rename = "block_structure")]
    BlockStructure,
    /// Monotone increments on the positive and negative blocks.
    #[serde(rename = "monotone_increments")]
    MonotoneIncrements,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Length => "(i) length",
            Clause::BlockStructure => "(ii) block structure",
            Clause::MonotoneIncrements => "(iii) monotone increments",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Supported,
    Refuted,
}

/// Result of [`is_minimal_hermitian_trace`]. Sampled data can refute
/// minimality but only support it.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalityVerdict {
    pub verdict: Verdict,
    pub violated: Vec<Clause>,
    pub length: f64,
    pub endpoint_trace_norm: f64,
    /// Largest off-block (or kernel-block) entry over all nodes.
    pub block_residual: f64,
    /// Most negative eigenvalue of a positive-block increment, or most
    /// positive of a negative-block increment, with sign flipped so that
    /// larger means worse.
    pub increment_violation: f64,
}

impl MinimalityVerdict {
    pub fn supported(&self) -> bool {
        self.verdict == Verdict::Supported
    }
}

fn compress(m: &CMat, basis: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |a, b| {
        (basis.column(idx[a]).adjoint() * m * basis.column(idx[b]))[(0, 0)]
    })
}

/// Tests a sampled `H(n)` curve starting at `0` against the trace-norm
/// characterization of minimal curves.
pub fn is_minimal_hermitian_trace(c: &SampledCurve, endpoint_basis_tolerance: f64) -> Result<MinimalityVerdict> {
    if c.space != SpaceTag::Hermitian {
        return Err(GeoError::SpaceMismatch);
    }
    let d = Hermitian::symmetrize(c.end().clone());
    let scale = d.norm_inf().max(1.0);
    let tol = endpoint_basis_tolerance * scale;
    let start = max_abs(c.start());
    if start > tol {
        return Err(GeoError::BadStart { norm: start });
    }
    let split = HermitianSplit::of(&d, tol);
    let endpoint_trace_norm: f64 = split.eigenvalues.iter().map(|v| v.abs()).sum();
    let report = length(c, SchattenIndex::One);
    let mut violated = Vec::new();
    if (report.length - endpoint_trace_norm).abs() > LENGTH_RTOL * endpoint_trace_norm + 1e-12 {
        violated.push(Clause::Length);
    }

    let w = &split.basis;
    let n = c.dim();
    let mut block_residual: f64 = 0.0;
    for m in &c.points {
        let local = w.adjoint() * m * w;
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (split.block_of(i), split.block_of(j));
                if bi != bj || bi == 2 {
                    block_residual = block_residual.max(local[(i, j)].norm());
                }
            }
        }
    }
    if block_residual > tol {
        violated.push(Clause::BlockStructure);
    }

    let mut increment_violation: f64 = f64::NEG_INFINITY;
    for k in 0..c.n_steps() {
        let delta = &c.points[k + 1] - &c.points[k];
        if !split.positive.is_empty() {
            let block = Hermitian::symmetrize(compress(&delta, w, &split.positive));
            let min = eigh(&block).values.last().copied().unwrap_or(0.0);
            increment_violation = increment_violation.max(-min);
        }
        if !split.negative.is_empty() {
            let block = Hermitian::symmetrize(compress(&delta, w, &split.negative));
            let max = eigh(&block).values.first().copied().unwrap_or(0.0);
            increment_violation = increment_violation.max(max);
        }
    }
    let increment_violation = increment_violation.max(0.0);
    if increment_violation > INCREMENT_TOL {
        violated.push(Clause::MonotoneIncrements);
    }
    Ok(MinimalityVerdict {
        verdict: if violated.is_empty() {
            Verdict::Supported
        } else {
            Verdict::Refuted
        },
        violated,
        length: report.length,
        endpoint_trace_norm,
        block_residual,
        increment_violation,
    })
}

/// Pointwise `exp` of a Hermitian curve.
pub fn lift_positive(c: &SampledCurve) -> Result<SampledCurve> {
    if c.space != SpaceTag::Hermitian {
        return Err(GeoError::SpaceMismatch);
    }
    c.map_points(SpaceTag::Positive, |m| {
        exp_h(&Hermitian::symmetrize(m.clone())).matrix().clone()
    })
}

/// Pointwise `expi` of a Hermitian curve with `c(0) = 0` and
/// `‖c(1)‖_∞ ≤ π`.
pub fn lift_unitary(c: &SampledCurve) -> Result<SampledCurve> {
    if c.space != SpaceTag::Hermitian {
        return Err(GeoError::SpaceMismatch);
    }
    let start = max_abs(c.start());
    if start > 1e-12 {
        return Err(GeoError::BadStart { norm: start });
    }
    let norm = Hermitian::symmetrize(c.end().clone()).norm_inf();
    if norm > std::f64::consts::PI + 1e-9 {
        return Err(GeoError::NormBoundExceeded { norm });
    }
    c.map_points(SpaceTag::Unitary, |m| {
        expi(&Hermitian::symmetrize(m.clone())).into_matrix()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::sample;
    use crate::linalg::{c64, diag_real};

    #[test]
    fn single_segment_is_straight() {
        let d = Hermitian::from_real_rows(2, &[1.0, 2.0, 2.0, -1.0]).unwrap();
        let m = minimal_family_hermitian(&d, 3, 1).unwrap();
        assert_eq!(m.generator.eval(0.25), d.matrix().scale(0.25));
    }

    #[test]
    fn telescoping_length() {
        let d = Hermitian::from_diagonal(&[2.0, -1.0]);
        for seed in 0..5 {
            let m = minimal_family_hermitian(&d, seed, 2).unwrap();
            let c = sample(&m.generator, 64).unwrap();
            assert!((length(&c, SchattenIndex::One).length - 3.0).abs() < 1e-12);
            assert!(max_abs(&(c.end() - d.matrix())) < 1e-14);
            assert!(is_minimal_hermitian_trace(&c, DEFAULT_ENDPOINT_TOLERANCE)
                .unwrap()
                .supported());
        }
    }

    #[test]
    fn length_fraction_splits_trace_norm() {
        let d = Hermitian::from_diagonal(&[2.0, 0.5, -1.5]);
        let m = minimal_family_hermitian(&d, 4, 3).unwrap();
        for t in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let y = Hermitian::symmetrize(m.at_length_fraction(t));
            let l: f64 = eigh(&y).values.iter().map(|v| v.abs()).sum();
            assert!((l - 4.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_endpoint_gives_monotone_curve() {
        let mut r = rng(2);
        let g = crate::random::gaussian_matrix(&mut r, 3);
        let d = Hermitian::symmetrize(&g * g.adjoint());
        let m = minimal_family_hermitian(&d, 9, 4).unwrap();
        let c = sample(&m.generator, 40).unwrap();
        for k in 0..40 {
            let inc = Hermitian::symmetrize(&c.points[k + 1] - &c.points[k]);
            assert!(*eigh(&inc).values.last().unwrap() > -1e-12);
        }
    }

    #[test]
    fn off_block_bump_refuted() {
        let d = diag_real(&[1.0, -1.0]);
        let g = CurveGenerator::new(SpaceTag::Hermitian, move |t| {
            let b = 0.3 * (std::f64::consts::PI * t).sin();
            let mut m = d.scale(t);
            m[(0, 1)] = c64(b, 0.0);
            m[(1, 0)] = c64(b, 0.0);
            m
        });
        let c = sample(&g, 256).unwrap();
        let v = is_minimal_hermitian_trace(&c, DEFAULT_ENDPOINT_TOLERANCE).unwrap();
        assert_eq!(v.verdict, Verdict::Refuted);
        assert!(v.violated.contains(&Clause::BlockStructure));
        assert!(v.length > 2.0);
    }

    #[test]
    fn zero_curve_supported() {
        let c = sample(
            &crate::spaces::constant_curve(SpaceTag::Hermitian, CMat::zeros(2, 2)),
            8,
        )
        .unwrap();
        assert!(is_minimal_hermitian_trace(&c, DEFAULT_ENDPOINT_TOLERANCE)
            .unwrap()
            .supported());
    }

    #[test]
    fn bad_start() {
        let c = sample(
            &crate::spaces::constant_curve(SpaceTag::Hermitian, CMat::identity(2, 2)),
            8,
        )
        .unwrap();
        assert_eq!(
            is_minimal_hermitian_trace(&c, DEFAULT_ENDPOINT_TOLERANCE)
                .unwrap_err()
                .code(),
            "BAD_START"
        );
    }

    #[test]
    fn unitary_lift_of_antipodal_segment() {
        let d = Hermitian::from_diagonal(&[std::f64::consts::PI, -std::f64::consts::PI]);
        let c = sample(&minimal_family_hermitian(&d, 0, 1).unwrap().generator, 2048).unwrap();
        let lift = lift_unitary(&c).unwrap();
        assert!(max_abs(&(lift.end() + CMat::identity(2, 2))) < 1e-14);
        let l = length(&lift, SchattenIndex::One).length;
        assert!((l - 2.0 * std::f64::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn unitary_lift_norm_bound() {
        let c = sample(
            &minimal_family_hermitian(&Hermitian::from_diagonal(&[4.0]), 0, 1)
                .unwrap()
                .generator,
            8,
        )
        .unwrap();
        assert_eq!(lift_unitary(&c).unwrap_err().code(), "NORM_BOUND_EXCEEDED");
    }
}
