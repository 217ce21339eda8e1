use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{eigh, CMat, Hermitian};
use crate::error::GeoError;

/// Exponent of a Schatten norm: a real `p >= 1` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenIndex {
    One,
    Two,
    Inf,
    Finite(f64),
}

impl SchattenIndex {
    pub fn new(p: f64) -> Result<Self, GeoError> {
        if p.is_infinite() && p > 0.0 {
            return Ok(SchattenIndex::Inf);
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(GeoError::InvalidInput(format!("Schatten index {p} must be >= 1")));
        }
        Ok(if p == 1.0 {
            SchattenIndex::One
        } else if p == 2.0 {
            SchattenIndex::Two
        } else {
            SchattenIndex::Finite(p)
        })
    }

    /// True for the indices the minimality machinery supports (1 and INF).
    pub fn is_extreme(&self) -> bool {
        matches!(self, SchattenIndex::One | SchattenIndex::Inf)
    }

    /// Combines singular values (or absolute eigenvalues) into the norm.
    pub fn combine(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        match *self {
            SchattenIndex::One => values.into_iter().map(f64::abs).sum(),
            SchattenIndex::Inf => values.into_iter().fold(0.0, |m, v| m.max(v.abs())),
            SchattenIndex::Two => {
                let v: Vec<f64> = values.into_iter().map(f64::abs).collect();
                let scale = v.iter().fold(0.0f64, |m, &x| m.max(x));
                if scale == 0.0 {
                    return 0.0;
                }
                scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
            }
            SchattenIndex::Finite(p) => {
                let v: Vec<f64> = values.into_iter().map(f64::abs).collect();
                let scale = v.iter().fold(0.0f64, |m, &x| m.max(x));
                if scale == 0.0 {
                    return 0.0;
                }
                scale * v.iter().map(|x| (x / scale).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for SchattenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchattenIndex::One => write!(f, "1"),
            SchattenIndex::Two => write!(f, "2"),
            SchattenIndex::Inf => write!(f, "inf"),
            SchattenIndex::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for SchattenIndex {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "INF" => Ok(SchattenIndex::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| GeoError::InvalidInput(format!("cannot parse norm index '{s}'")))?;
                SchattenIndex::new(p)
            }
        }
    }
}

impl Serialize for SchattenIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SchattenIndex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Singular values (non-increasing) of a square complex matrix, from the
/// spectrum of the Hermitian dilation `[[0, m], [m*, 0]]`.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut dilation = CMat::zeros(2 * n, 2 * n);
    dilation.view_mut((0, n), (n, n)).copy_from(m);
    dilation.view_mut((n, 0), (n, n)).copy_from(&m.adjoint());
    let e = eigh(&Hermitian::symmetrize(dilation));
    e.values[..n].iter().map(|&s| s.max(0.0)).collect()
}

/// Schatten p-norm of an arbitrary square matrix.
pub fn schatten_norm(m: &CMat, p: SchattenIndex) -> f64 {
    p.combine(singular_values(m))
}

/// Schatten p-norm of a Hermitian matrix (singular values are |eigenvalues|).
pub fn schatten_norm_hermitian(h: &Hermitian, p: SchattenIndex) -> f64 {
    p.combine(eigh(h).values)
}
