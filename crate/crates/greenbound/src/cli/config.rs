//! TOML run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometrySpec;
use crate::green::Provenance;
use crate::inequalities::{theorem_ids, theorem_info, Exponent, FamilyKind, FamilySpec, TheoremKind};
use crate::representations::CASE_NAMES;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl GeometryConfig {
    pub fn spec(&self, h: f64) -> GeometrySpec {
        GeometrySpec { kind: self.kind.clone(), params: self.params.clone(), resolution: h, samples: self.samples }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenConfig {
    #[serde(default = "default_sources")]
    pub sources: usize,
    /// Analytic when an oracle exists unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn default_sources() -> usize {
    6
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig { sources: default_sources(), provenance: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "default_true")]
    pub bounds: bool,
    /// Profile a-grid on the finest level; empty skips profiling.
    #[serde(default)]
    pub a_grid: Vec<f64>,
}

fn default_true() -> bool {
    true
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { bounds: true, a_grid: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationConfig {
    #[serde(default = "default_cases")]
    pub cases: Vec<String>,
    /// Evaluation points; the table sources when empty.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Jensen sweep radii (disk only).
    #[serde(default)]
    pub jensen_radii: Vec<f64>,
    #[serde(default)]
    pub dbar: bool,
}

fn default_cases() -> Vec<String> {
    vec!["constant".into(), "harmonic_quadratic".into(), "radial_quadratic".into()]
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        RepresentationConfig { cases: default_cases(), points: Vec::new(), jensen_radii: Vec::new(), dbar: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub count: usize,
    /// Global seed plus the family index when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Exponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theorem: String,
    pub triples: Vec<TripleConfig>,
    /// Families by index into `families`; all when empty.
    #[serde(default)]
    pub families: Vec<usize>,
    /// Compare with the discrete Hölder certificate where one exists.
    #[serde(default)]
    pub certify: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Replaces the table tolerance of the named invariant
    /// (sign, boundary_vanishing, symmetry, mean_zero).
    #[serde(default)]
    pub invariants: BTreeMap<String, f64>,
    /// Allowed relative shortfall of empirical δ below the certified δ.
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_slack() -> f64 {
    1e-9
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { invariants: BTreeMap::new(), slack: default_slack() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub geometry: GeometryConfig,
    /// Resolution ladder h₀ > h₁ > ….
    pub resolutions: Vec<f64>,
    /// Ladder index the inequality sweeps run on.
    #[serde(default)]
    pub sweep_level: usize,
    #[serde(default)]
    pub green: GreenConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub representations: RepresentationConfig,
    #[serde(default)]
    pub families: Vec<FamilyConfig>,
    #[serde(default)]
    pub sweep: Vec<SweepConfig>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

fn default_out() -> PathBuf {
    PathBuf::from("greenbound-out")
}

const INVARIANTS: [&str; 4] = ["sign", "boundary_vanishing", "symmetry", "mean_zero"];

fn cfg_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config { path: path.into(), reason: reason.into() }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| locate(text, s.start)).unwrap_or_else(|| "<root>".into());
            cfg_err(path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(cfg_err("resolutions", "at least one resolution is required"));
        }
        for (k, h) in self.resolutions.iter().enumerate() {
            if !(h.is_finite() && *h > 0.0) {
                return Err(cfg_err(format!("resolutions[{k}]"), "must be positive"));
            }
            if k > 0 && *h >= self.resolutions[k - 1] {
                return Err(cfg_err(format!("resolutions[{k}]"), "the ladder must be strictly decreasing"));
            }
        }
        if self.sweep_level >= self.resolutions.len() {
            return Err(cfg_err("sweep_level", format!("ladder has {} levels", self.resolutions.len())));
        }
        if self.green.sources == 0 {
            return Err(cfg_err("green.sources", "must be positive"));
        }
        for (k, c) in self.representations.cases.iter().enumerate() {
            if !CASE_NAMES.contains(&c.as_str()) {
                return Err(cfg_err(format!("representations.cases[{k}]"), format!("unknown case `{c}`; known: {}", CASE_NAMES.join(", "))));
            }
        }
        for (k, f) in self.families.iter().enumerate() {
            if f.count == 0 {
                return Err(cfg_err(format!("families[{k}].count"), "must be positive"));
            }
        }
        let ids = theorem_ids();
        for (k, s) in self.sweep.iter().enumerate() {
            if !ids.contains(&s.theorem.as_str()) {
                return Err(cfg_err(format!("sweep[{k}].theorem"), format!("unknown theorem `{}`; valid ids: {}", s.theorem, ids.join(", "))));
            }
            let info = theorem_info(&s.theorem)?;
            if info.kind != TheoremKind::Inequality {
                return Err(cfg_err(format!("sweep[{k}].theorem"), format!("`{}` is not an inequality; it is checked by `{}`", s.theorem, info.command)));
            }
            for &i in &s.families {
                if i >= self.families.len() {
                    return Err(cfg_err(format!("sweep[{k}].families"), format!("no family with index {i}")));
                }
            }
        }
        for (name, v) in &self.tolerances.invariants {
            if !INVARIANTS.contains(&name.as_str()) {
                return Err(cfg_err(format!("tolerances.invariants.{name}"), format!("unknown invariant; known: {}", INVARIANTS.join(", "))));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(cfg_err(format!("tolerances.invariants.{name}"), "must be a nonnegative number"));
            }
        }
        Ok(())
    }

    /// Family specs with their effective seeds.
    pub fn family_specs(&self) -> Vec<FamilySpec> {
        self.families
            .iter()
            .enumerate()
            .map(|(k, f)| FamilySpec::new(f.kind, f.count, f.seed.unwrap_or(self.seed.wrapping_add(k as u64))))
            .collect()
    }
}

/// Line and column of a byte offset, for error paths when toml gives no key.
fn locate(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count() + 1).unwrap_or(1);
    format!("line {line}, column {col}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_parses() {
        let cfg = RunConfig::parse("resolutions = [0.2, 0.1]\n[geometry]\nkind = \"disk\"\nparams = [1.0]\n").unwrap();
        assert_eq!(cfg.green.sources, 6);
        assert_eq!(cfg.tolerances.slack, 1e-9);
    }

    #[test]
    fn ladder_must_decrease() {
        let e = RunConfig::parse("resolutions = [0.1, 0.2]\n[geometry]\nkind = \"disk\"\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "resolutions[1]"), "{e}");
    }

    #[test]
    fn unknown_theorem_and_field() {
        let e = RunConfig::parse("resolutions = [0.1]\n[geometry]\nkind = \"disk\"\n[[sweep]]\ntheorem = \"thm9\"\ntriples = []\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "sweep[0].theorem"), "{e}");
        let e = RunConfig::parse("resolutions = [0.1]\nbogus = 1\n[geometry]\nkind = \"disk\"\n").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = RunConfig::parse("resolutions = [0.1]\n[geometry]\nkind = \"disk\"\n[[sweep]]\ntheorem = \"thm1.13\"\ntriples = []\n").unwrap_err();
        assert!(e.to_string().contains("representations"), "{e}");
    }
}
