use std::path::Path;

use mingeo_core::curves::{length, sample, CurveGenerator, SampledCurve, VERIFY_STEPS};
use mingeo_core::linalg::{
    exp_h, inv_sqrt_pd, log_pd, sqrt_pd, CMat, Hermitian, PositiveDefinite, Projection, Unitary,
};
use mingeo_core::minimal::{
    is_minimal_hermitian_trace, is_unique_minimal_grassmann, is_unique_minimal_unitary, minimal_family_grassmann,
    minimal_family_hermitian, minimal_family_unitary, PerturbationMode, PerturbationSpec,
};
use mingeo_core::spaces::{dist as distance, geodesic as geodesic_of, unitary_is_antipodal};
use mingeo_core::verify::{
    check_diagonal_monotonicity, check_eigencurve_monotonicity, check_midpoint_convexity, run_report,
};
use mingeo_core::{GeoError, SchattenIndex, SpaceTag};

use crate::io::{load_point, read_json, write_json, CurveFile, CurveMetadata};
use crate::{CliError, FamilyArgs};

/// Decimal with 12 significant digits.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit (9.99… → 10.0…)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded.abs().log10().floor() as i32 > exponent && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn dist(space: SpaceTag, p: SchattenIndex, a: &Path, b: &Path) -> Result<bool, CliError> {
    let (a, b) = (load_point(a, space)?, load_point(b, space)?);
    println!("{}", format_significant(distance(space, &a, &b, p)?));
    Ok(true)
}

fn antipodal_pair(space: SpaceTag, a: &CMat, b: &CMat) -> bool {
    space == SpaceTag::Unitary
        && match (Unitary::new(a.clone()), Unitary::new(b.clone())) {
            (Ok(a), Ok(b)) => unitary_is_antipodal(&a, &b),
            _ => false,
        }
}

pub fn geodesic(
    space: SpaceTag,
    p: SchattenIndex,
    samples: usize,
    a: &Path,
    b: &Path,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let (a, b) = (load_point(a, space)?, load_point(b, space)?);
    let c = sample(&geodesic_of(space, &a, &b)?, samples)?;
    let mut metadata = CurveMetadata {
        generator: "geodesic".into(),
        endpoint_distance: Some(distance(space, &a, &b, p)?),
        ..Default::default()
    };
    metadata.lengths.insert(p.to_string(), length(&c, p).length);
    if antipodal_pair(space, &a, &b) {
        metadata.antipodal = true;
        metadata.notes.push(
            "a* b has eigenvalue -1; the logarithm takes the +pi branch and the geodesic is one of several".into(),
        );
    }
    write_json(&CurveFile::from_curve(&c, p, metadata), out)?;
    Ok(true)
}

/// Curve through the requested endpoints, the norm it is minimal for, and
/// what the metadata should say about it.
struct Constructed {
    generator: CurveGenerator,
    p: SchattenIndex,
    endpoint_distance: f64,
    case: Option<String>,
    notes: Vec<String>,
}

pub fn family(args: &FamilyArgs) -> Result<bool, CliError> {
    let space = args.space;
    let points: Vec<CMat> = args
        .points
        .iter()
        .map(|f| load_point(f, space))
        .collect::<Result<_, _>>()?;
    let spec = match args.mode {
        PerturbationMode::Geodesic => PerturbationSpec::geodesic(),
        PerturbationMode::Detour => PerturbationSpec::detour(args.seed, args.detour_scale),
    };
    let spec = match &args.signs {
        Some(signs) => spec.with_signs(signs.clone()),
        None => spec,
    };
    let segments = if args.mode == PerturbationMode::Geodesic {
        1
    } else {
        args.segments
    };
    let built = match space {
        SpaceTag::Unitary => unitary_family(&points, &spec)?,
        SpaceTag::Grassmann => grassmann_family(&points, &spec)?,
        SpaceTag::Hermitian => hermitian_family(&points, args.seed, segments)?,
        SpaceTag::Positive => positive_family(&points, args.seed, segments)?,
    };
    let c = sample(&built.generator, args.samples)?;
    let verified = length(&sample(&built.generator, VERIFY_STEPS)?, built.p).length;
    let mut metadata = CurveMetadata {
        seed: Some(args.seed),
        generator: format!("minimal_family_{space}"),
        verified_length: Some(verified),
        endpoint_distance: Some(built.endpoint_distance),
        case: built.case,
        notes: built.notes,
        ..Default::default()
    };
    metadata.lengths.insert(built.p.to_string(), length(&c, built.p).length);
    write_json(&CurveFile::from_curve(&c, built.p, metadata), args.out.as_deref())?;
    Ok(true)
}

fn endpoints(points: &[CMat], base: impl FnOnce(usize) -> CMat) -> (CMat, CMat) {
    match points {
        [target] => (base(target.nrows()), target.clone()),
        [a, b] => (a.clone(), b.clone()),
        _ => unreachable!("clap enforces one or two points"),
    }
}

fn unitary_family(points: &[CMat], spec: &PerturbationSpec) -> Result<Constructed, CliError> {
    let (a, b) = endpoints(points, |n| CMat::identity(n, n));
    let target = Unitary::new(a.adjoint() * &b)?;
    let member = minimal_family_unitary(&target, spec)?;
    let mut notes = Vec::new();
    if member.perturbation.is_none() && spec.mode == PerturbationMode::Detour {
        notes.push("no free block to perturb; the member is the geodesic".into());
    }
    let endpoint_distance = member.length();
    let g = member.generator.clone();
    Ok(Constructed {
        generator: CurveGenerator::new(SpaceTag::Unitary, move |t| &a * g.eval(t)),
        p: SchattenIndex::Inf,
        endpoint_distance,
        case: Some(member.case.to_string()),
        notes,
    })
}

fn grassmann_family(points: &[CMat], spec: &PerturbationSpec) -> Result<Constructed, CliError> {
    let [p, q] = points else {
        return Err(CliError::Parse(
            "the grassmann family needs two projection files".into(),
        ));
    };
    let (p, q) = (Projection::new(p.clone())?, Projection::new(q.clone())?);
    let member = minimal_family_grassmann(&p, &q, spec)?;
    Ok(Constructed {
        endpoint_distance: member.length(),
        generator: member.generator,
        p: SchattenIndex::Inf,
        case: Some("grassmann".into()),
        notes: Vec::new(),
    })
}

fn hermitian_case(d: &Hermitian) -> String {
    let split = mingeo_core::minimal::HermitianSplit::of(
        d,
        mingeo_core::minimal::DEFAULT_ENDPOINT_TOLERANCE * d.norm_inf().max(1.0),
    );
    format!(
        "hermitian blocks: {} positive, {} kernel, {} negative",
        split.positive.len(),
        split.kernel.len(),
        split.negative.len()
    )
}

fn hermitian_family(points: &[CMat], seed: u64, segments: usize) -> Result<Constructed, CliError> {
    let (a, b) = endpoints(points, |n| CMat::zeros(n, n));
    let d = Hermitian::new(&b - &a)?;
    let member = minimal_family_hermitian(&d, seed, segments)?;
    let g = member.generator.clone();
    Ok(Constructed {
        generator: CurveGenerator::new(SpaceTag::Hermitian, move |t| &a + g.eval(t)),
        p: SchattenIndex::One,
        endpoint_distance: member.trace_norm,
        case: Some(hermitian_case(&d)),
        notes: Vec::new(),
    })
}

/// `a^{1/2} e^{c(t)} a^{1/2}` with `c` a trace-norm minimal curve from `0`
/// to `log(a^{-1/2} b a^{-1/2})`.
fn positive_family(points: &[CMat], seed: u64, segments: usize) -> Result<Constructed, CliError> {
    let (a, b) = endpoints(points, |n| CMat::identity(n, n));
    let a = PositiveDefinite::new(a)?;
    let b = PositiveDefinite::new(b)?;
    let half = sqrt_pd(&a).matrix().clone();
    let inner = PositiveDefinite::from_hermitian(b.hermitian().congruence(inv_sqrt_pd(&a).matrix()))?;
    let d = log_pd(&inner);
    let member = minimal_family_hermitian(&d, seed, segments)?;
    let g = member.generator.clone();
    Ok(Constructed {
        generator: CurveGenerator::new(SpaceTag::Positive, move |t| {
            let e = exp_h(&Hermitian::new(g.eval(t)).expect("family members are Hermitian"));
            let m = &half * e.matrix() * &half;
            (&m + m.adjoint()).scale(0.5)
        }),
        p: SchattenIndex::One,
        endpoint_distance: member.trace_norm,
        case: Some(hermitian_case(&d)),
        notes: Vec::new(),
    })
}

fn load_curve(path: &Path) -> Result<SampledCurve, CliError> {
    read_json::<CurveFile>(path)?.curve()
}

pub fn verify_minimality(curve: &Path, tolerance: f64) -> Result<bool, CliError> {
    let c = load_curve(curve)?;
    let verdict = is_minimal_hermitian_trace(&c, tolerance)?;
    write_json(&verdict, None)?;
    Ok(verdict.supported())
}

pub fn verify_unique(space: SpaceTag, a: &Path, b: &Path) -> Result<bool, CliError> {
    let (a, b) = (load_point(a, space)?, load_point(b, space)?);
    let cert = match space {
        SpaceTag::Unitary => is_unique_minimal_unitary(&Unitary::new(a)?, &Unitary::new(b)?)?,
        SpaceTag::Grassmann => is_unique_minimal_grassmann(&Projection::new(a)?, &Projection::new(b)?)?,
        other => {
            return Err(CliError::Geo(GeoError::InvalidInput(format!(
                "uniqueness is decided for unitary and grassmann spaces, not {other}"
            ))))
        }
    };
    write_json(&cert, None)?;
    Ok(true)
}

pub fn verify_eigencurves(curve: &Path, scale: f64) -> Result<bool, CliError> {
    let c = load_curve(curve)?;
    let r = check_eigencurve_monotonicity(&c, c.space)?.rescaled(scale);
    write_json(&r, None)?;
    Ok(r.passed)
}

pub fn verify_diagonal(curve: &Path, scale: f64) -> Result<bool, CliError> {
    let c = load_curve(curve)?;
    let r = check_diagonal_monotonicity(&c)?.rescaled(scale);
    write_json(&r, None)?;
    Ok(r.passed)
}

pub fn verify_report(seed: u64, max_dim: usize, scale: f64, out: Option<&Path>) -> Result<bool, CliError> {
    let report: Vec<_> = run_report(seed, max_dim)?.iter().map(|r| r.rescaled(scale)).collect();
    write_json(&report, out)?;
    Ok(report.iter().all(|r| r.passed))
}

#[allow(clippy::too_many_arguments)]
pub fn midpoints(
    space: SpaceTag,
    p: SchattenIndex,
    t: f64,
    pairs: usize,
    seed: u64,
    a: &Path,
    b: &Path,
    scale: f64,
) -> Result<bool, CliError> {
    let (a, b) = (load_point(a, space)?, load_point(b, space)?);
    let mut report = check_midpoint_convexity(&a, &b, t, space, p, pairs, seed)?;
    report.tolerance *= scale;
    report.convexity_passed = report
        .membership_residuals
        .iter()
        .all(|&r| r <= report.tolerance.max(1e-14));
    write_json(&report, None)?;
    Ok(report.convexity_passed)
}
