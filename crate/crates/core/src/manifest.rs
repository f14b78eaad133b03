//! JSON manifest describing an immersion, its ambient and the checks to run.
//!
//! Errors carry an RFC 6901 pointer into the document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Immersion, ProductAmbient};
use crate::expr::parse_str;
use crate::tol::Tolerances;
use crate::warped::{WarpedError, WarpedSpec};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{pointer}: {message}")]
    Json { pointer: String, message: String },
    #[error("{pointer}: {message}")]
    Invalid { pointer: String, message: String },
}

impl ManifestError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            ManifestError::Io { .. } => None,
            ManifestError::Json { pointer, .. } | ManifestError::Invalid { pointer, .. } => Some(pointer),
        }
    }

    fn invalid(pointer: impl Into<String>, message: impl ToString) -> Self {
        ManifestError::Invalid { pointer: pointer.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Classify,
    Identities,
    Warped,
    Inequality,
    Integrability,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Classify, Check::Identities, Check::Warped, Check::Inequality, Check::Integrability];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    pub n: usize,
    pub signs: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionSection {
    pub params: Vec<String>,
    pub components: Vec<String>,
    pub domain: Vec<[f64; 2]>,
}

fn default_random() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    /// Random interior points on top of the grid.
    #[serde(default = "default_random")]
    pub random: usize,
    #[serde(default)]
    pub seed: u64,
    /// Grid points per axis; chosen from the dimension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection { random: default_random(), seed: 0, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedSection {
    pub base_params: Vec<String>,
    pub fiber_params: Vec<String>,
    pub warp: String,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Classify, Check::Identities, Check::Integrability]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub ambient: AmbientSection,
    pub immersion: ImmersionSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warped: Option<WarpedSection>,
    /// Overrides of the default thresholds; unspecified fields keep their defaults.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
}

/// A validated manifest.
#[derive(Debug, Clone)]
pub struct Problem {
    pub manifest: Manifest,
    pub immersion: Immersion,
    pub warped: Option<WarpedSpec>,
}

impl Problem {
    pub fn wants(&self, c: Check) -> bool {
        self.manifest.checks.contains(&c)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.manifest.tolerances.unwrap_or_default()
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest, ManifestError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let mut pointer = pointer_of(e.path());
            let message = e.inner().to_string();
            if let Some(rest) = message.strip_prefix("missing field `") {
                if let Some(field) = rest.split('`').next() {
                    pointer.push('/');
                    pointer.push_str(field);
                }
            }
            ManifestError::Json { pointer, message }
        })
    }

    pub fn from_path(path: &Path) -> Result<Manifest, ManifestError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ManifestError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Manifest::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Parses every expression and checks dimensions, signs and the warped split.
    pub fn build(self) -> Result<Problem, ManifestError> {
        let imm = &self.immersion;
        if self.ambient.n != self.ambient.signs.len() {
            return Err(ManifestError::invalid(
                "/ambient/n",
                format!("n = {} but {} signs are given", self.ambient.n, self.ambient.signs.len()),
            ));
        }
        let ambient = ProductAmbient::new(&self.ambient.signs).map_err(|e| match e {
            GeometryError::BadSign { index, .. } => ManifestError::invalid(format!("/ambient/signs/{index}"), e),
            other => ManifestError::invalid("/ambient/signs", other),
        })?;
        if imm.domain.len() != imm.params.len() {
            return Err(ManifestError::invalid(
                "/immersion/domain",
                format!("{} intervals for {} parameters", imm.domain.len(), imm.params.len()),
            ));
        }
        let mut nodes = Vec::with_capacity(imm.components.len());
        for (i, src) in imm.components.iter().enumerate() {
            let node = parse_str(src)
                .map_err(|e| ManifestError::invalid(format!("/immersion/components/{i}"), e))?;
            nodes.push(node);
        }
        let domain = imm.domain.iter().map(|[a, b]| (*a, *b)).collect();
        let immersion = Immersion::new(imm.params.clone(), nodes, domain, ambient).map_err(|e| {
            let at = match &e {
                GeometryError::ComponentCount { .. } => "/immersion/components".to_string(),
                GeometryError::Dimension { .. }
                | GeometryError::DuplicateParam(_)
                | GeometryError::ReservedParam(_) => "/immersion/params".to_string(),
                GeometryError::UnknownParam { component, .. } => format!("/immersion/components/{component}"),
                GeometryError::BadDomain { name } => {
                    let i = imm.params.iter().position(|p| p == name).unwrap_or(0);
                    format!("/immersion/domain/{i}")
                }
                _ => "/immersion".to_string(),
            };
            ManifestError::invalid(at, e)
        })?;
        let warped = match &self.warped {
            None => None,
            Some(w) => Some(WarpedSpec::new(&immersion, &w.base_params, &w.fiber_params, &w.warp).map_err(|e| {
                let at = match &e {
                    WarpedError::Warp(_) => "/warped/warp",
                    WarpedError::UnknownParam(name) if w.fiber_params.contains(name) => "/warped/fiber_params",
                    WarpedError::WarpUsesFiber(_) => "/warped/warp",
                    _ => "/warped/base_params",
                };
                ManifestError::invalid(at, e)
            })?),
        };
        if let Some(t) = &self.tolerances {
            for (key, v) in t.entries() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(ManifestError::invalid(format!("/tolerances/{key}"), "tolerance must be positive and finite"));
                }
            }
        }
        if self.checks.is_empty() {
            return Err(ManifestError::invalid("/checks", "at least one check is required"));
        }
        if warped.is_none() {
            for (k, c) in self.checks.iter().enumerate() {
                if matches!(c, Check::Warped | Check::Inequality) {
                    return Err(ManifestError::invalid(
                        format!("/checks/{k}"),
                        "this check needs a `warped` section",
                    ));
                }
            }
        }
        Ok(Problem { manifest: self, immersion, warped })
    }
}

pub fn load(path: &Path) -> Result<Problem, ManifestError> {
    Manifest::from_path(path)?.build()
}
