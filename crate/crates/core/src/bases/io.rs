//! Basis JSON files and report serialization.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Basis;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lorentz::Weight;
use crate::spaces::{AmbientSpace, ExponentRepr};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AmbientFile {
    Lp { p: ExponentRepr, dim: usize },
    BlockLpL2 { p: ExponentRepr, blocks: Vec<usize> },
    Lorentz { q: ExponentRepr, weight: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisFile {
    ambient: AmbientFile,
    vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duals: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl AmbientFile {
    fn into_space(self) -> Result<AmbientSpace> {
        match self {
            AmbientFile::Lp { p, dim } => AmbientSpace::lp(p.value()?, dim),
            AmbientFile::BlockLpL2 { p, blocks } => AmbientSpace::block_lp_l2(p.value()?, blocks),
            AmbientFile::Lorentz { q, weight } => AmbientSpace::lorentz(q.value()?, Weight::new(weight)?),
        }
    }

    fn from_space(space: &AmbientSpace) -> Self {
        match space {
            AmbientSpace::Lp { p, dim } => AmbientFile::Lp { p: ExponentRepr::from_value(*p), dim: *dim },
            AmbientSpace::BlockLpL2 { p, blocks } => {
                AmbientFile::BlockLpL2 { p: ExponentRepr::from_value(*p), blocks: blocks.clone() }
            }
            AmbientSpace::Lorentz { q, weight } => {
                AmbientFile::Lorentz { q: ExponentRepr::from_value(*q), weight: weight.values().to_vec() }
            }
        }
    }
}

pub fn basis_from_json(text: &str) -> Result<Basis> {
    let file: BasisFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let space = file.ambient.into_space()?;
    let dim = space.dim();
    let check_rows = |rows: &[Vec<f64>], what: &str| -> Result<()> {
        match rows.iter().position(|r| r.len() != dim) {
            Some(i) => {
                Err(Error::Schema(format!("{what} row {i} has length {} but ambient dim is {dim}", rows[i].len())))
            }
            None => Ok(()),
        }
    };
    check_rows(&file.vectors, "vectors")?;
    if let Some(d) = &file.duals {
        check_rows(d, "duals")?;
    }
    let vectors = Matrix::from_rows(file.vectors)?;
    let duals = file.duals.map(Matrix::from_rows).transpose()?;
    let basis = Basis::new(space, vectors, duals)?;
    match file.labels {
        Some(l) => basis.with_labels(l),
        None => Ok(basis),
    }
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<Basis> {
    basis_from_json(&fs::read_to_string(path)?)
}

pub fn basis_to_json(basis: &Basis) -> Result<String> {
    let file = BasisFile {
        ambient: AmbientFile::from_space(basis.space()),
        vectors: basis.vectors().to_rows(),
        duals: Some(basis.duals().to_rows()),
        labels: basis.labels().map(<[String]>::to_vec),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Writes any serializable report as pretty JSON.
pub fn save_report<R: Serialize>(path: impl AsRef<Path>, report: &R) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
