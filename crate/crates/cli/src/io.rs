//! JSON file formats: single matrices and sampled curves. Floats are written
//! in the shortest form that parses back to the same `f64`, so a
//! write-then-read cycle is bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use mingeo_core::linalg::{c64, CMat, Hermitian, PositiveDefinite, Projection, SchattenIndex, Unitary};
use mingeo_core::spaces::validate_point;
use mingeo_core::{GeoError, SpaceTag};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Hermitian,
    Unitary,
    Positive,
    Projection,
    General,
}

impl MatrixKind {
    pub fn for_space(space: SpaceTag) -> MatrixKind {
        match space {
            SpaceTag::Hermitian => MatrixKind::Hermitian,
            SpaceTag::Unitary => MatrixKind::Unitary,
            SpaceTag::Positive => MatrixKind::Positive,
            SpaceTag::Grassmann => MatrixKind::Projection,
        }
    }
}

pub type Entries = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub kind: MatrixKind,
    pub entries: Entries,
}

impl MatrixFile {
    /// Checks the shape and the invariant named by `kind`.
    pub fn matrix(&self) -> Result<CMat, CliError> {
        let m = from_entries(self.n, &self.entries)?;
        let checked = match self.kind {
            MatrixKind::Hermitian => Hermitian::new(m.clone()).map(|_| ()),
            MatrixKind::Unitary => Unitary::new(m.clone()).map(|_| ()),
            MatrixKind::Positive => PositiveDefinite::new(m.clone()).map(|_| ()),
            MatrixKind::Projection => Projection::new(m.clone()).map(|_| ()),
            MatrixKind::General => Ok(()),
        };
        checked.map_err(CliError::Geo)?;
        Ok(m)
    }
}

pub fn to_entries(m: &CMat) -> Entries {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_entries(n: usize, entries: &Entries) -> Result<CMat, CliError> {
    if n == 0 {
        return Err(CliError::Parse("matrix dimension must be positive".into()));
    }
    if entries.len() != n || entries.iter().any(|row| row.len() != n) {
        return Err(CliError::Parse(format!(
            "entries must form an {n} x {n} array of [re, im] pairs"
        )));
    }
    if entries.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Parse("entries must be finite".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| c64(entries[i][j][0], entries[i][j][1])))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub generator: String,
    /// Length of the sampled curve under each recorded norm index.
    #[serde(default)]
    pub lengths: BTreeMap<String, f64>,
    /// Length at the verification resolution, for constructed members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_length: Option<f64>,
    /// Distance between the endpoints, which a minimal curve attains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_distance: Option<f64>,
    /// Structure case of the constructed member, when applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    /// Set when a unitary distance was evaluated on the branch cut
    /// (`−1` in the spectrum of `a* b`).
    #[serde(default)]
    pub antipodal: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub space: SpaceTag,
    pub p_norm: SchattenIndex,
    pub grid: Vec<f64>,
    pub matrices: Vec<Entries>,
    pub metadata: CurveMetadata,
}

impl CurveFile {
    pub fn from_curve(c: &mingeo_core::curves::SampledCurve, p: SchattenIndex, metadata: CurveMetadata) -> CurveFile {
        CurveFile {
            space: c.space,
            p_norm: p,
            grid: c.grid.clone(),
            matrices: c.points.iter().map(to_entries).collect(),
            metadata,
        }
    }

    /// Rebuilds the sampled curve; the grid and every point are validated.
    pub fn curve(&self) -> Result<mingeo_core::curves::SampledCurve, CliError> {
        let n = self.matrices.first().map(|m| m.len()).unwrap_or(0);
        let points = self
            .matrices
            .iter()
            .map(|e| from_entries(n, e))
            .collect::<Result<Vec<_>, _>>()?;
        mingeo_core::curves::SampledCurve::new(self.space, self.grid.clone(), points).map_err(CliError::Geo)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Loads a matrix file as a point of `space`. The declared kind must match
/// the space (or be `general`), and the point must pass the space check.
pub fn load_point(path: &Path, space: SpaceTag) -> Result<CMat, CliError> {
    let file: MatrixFile = read_json(path)?;
    if file.kind != MatrixKind::General && file.kind != MatrixKind::for_space(space) {
        return Err(CliError::Geo(GeoError::InvalidInput(format!(
            "{}: kind {} does not describe a point of the {space} space",
            path.display(),
            format!("{:?}", file.kind).to_lowercase()
        ))));
    }
    let m = file.matrix()?;
    validate_point(space, &m).map_err(CliError::Geo)
}
