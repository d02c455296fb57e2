//! Chart description files (JSON): lossless load/save of wave, torus, and
//! lightlike charts.
//!
//! ```json
//! { "kind": "ppwave",    "dimension": 4, "profile": "x3^2 + x4^2" }
//! { "kind": "torus",     "dimension": 4, "profile": "sin(x1)" }
//! { "kind": "lightlike", "dimension": 4, "components": { "h22": "exp(x0)" } }
//! ```
//!
//! `dimension` is the full chart dimension. Profile and component strings
//! are stored verbatim, so a load/save round trip is byte-preserving.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penrose::{LightlikeChart, PenroseError};
use crate::ppwave::{ChartError, PpWaveChart, TorusChart};

#[derive(Debug, Error)]
pub enum ChartFileError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed chart file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("torus dimension {dim} must be even and ≥ 4")]
    BadTorusDimension { dim: usize },
    #[error("lightlike dimension {dim} must be ≥ 3")]
    BadLightlikeDimension { dim: usize },
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Penrose(#[from] PenroseError),
}

/// On-disk chart description.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChartFile {
    PpWave {
        dimension: usize,
        profile: String,
    },
    Torus {
        dimension: usize,
        profile: String,
    },
    Lightlike {
        dimension: usize,
        components: BTreeMap<String, String>,
    },
}

impl ChartFile {
    pub fn load(path: &Path) -> Result<Self, ChartFileError> {
        let text = fs::read_to_string(path).map_err(|source| ChartFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ChartFileError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|source| ChartFileError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ChartFile::PpWave { dimension, .. }
            | ChartFile::Torus { dimension, .. }
            | ChartFile::Lightlike { dimension, .. } => *dimension,
        }
    }
}

/// A chart built from a description file.
pub enum LoadedChart {
    PpWave(PpWaveChart),
    Torus(TorusChart),
    Lightlike(LightlikeChart),
}

impl ChartFile {
    pub fn build(&self) -> Result<LoadedChart, ChartFileError> {
        match self {
            ChartFile::PpWave { dimension, profile } => {
                Ok(LoadedChart::PpWave(PpWaveChart::new(*dimension, profile)?))
            }
            ChartFile::Torus { dimension, profile } => {
                if dimension % 2 != 0 || *dimension < 4 {
                    return Err(ChartFileError::BadTorusDimension { dim: *dimension });
                }
                Ok(LoadedChart::Torus(TorusChart::new(
                    (*dimension - 2) / 2,
                    profile,
                )?))
            }
            ChartFile::Lightlike {
                dimension,
                components,
            } => {
                if *dimension < 3 {
                    return Err(ChartFileError::BadLightlikeDimension { dim: *dimension });
                }
                Ok(LoadedChart::Lightlike(LightlikeChart::new(
                    *dimension - 1,
                    components,
                )?))
            }
        }
    }
}
