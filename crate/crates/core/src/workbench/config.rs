//! Run configuration: a JSON file with every field optional, merged under
//! command-line flags and `HVW_` environment overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SUITE_NAMES;
use crate::family::fixtures::FIXTURE_NAMES;
use crate::family::transport::DEFAULT_STEPS_PER_UNIT;
use crate::quadric::HyperellipticConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Usage(format!("unknown format '{other}' (expected json or csv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Suite names, or `["all"]`.
    pub suites: Vec<String>,
    pub seed: u64,
    /// Overrides the bound of every upper-bound check.
    pub tol: Option<f64>,
    /// Per-check bound overrides keyed by record name; `tol` wins.
    pub tolerances: BTreeMap<String, f64>,
    /// Overrides the sample count of every suite.
    pub samples: Option<usize>,
    pub parallel: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quadric: QuadricParams,
    pub family: FamilyParams,
    pub semiflat: SemiflatParams,
    pub scan: ScanParams,
    pub transport: TransportParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: vec!["all".into()],
            seed: 7,
            tol: None,
            tolerances: BTreeMap::new(),
            samples: None,
            parallel: false,
            out: None,
            format: Format::Json,
            quadric: QuadricParams::default(),
            family: FamilyParams::default(),
            semiflat: SemiflatParams::default(),
            scan: ScanParams::default(),
            transport: TransportParams::default(),
        }
    }
}

/// A complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];

pub fn complex(c: ComplexPair) -> Complex64 {
    Complex64::new(c[0], c[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadricParams {
    /// Explicit μ-configurations; when empty, `random_configs` are drawn.
    pub mu: Vec<[ComplexPair; 6]>,
    pub random_configs: usize,
}

impl Default for QuadricParams {
    fn default() -> Self {
        QuadricParams { mu: Vec::new(), random_configs: 3 }
    }
}

impl QuadricParams {
    pub fn explicit_configs(&self) -> Result<Vec<HyperellipticConfig>> {
        self.mu.iter().map(|m| HyperellipticConfig::new(m.map(complex))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    pub fixtures: Vec<String>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { fixtures: FIXTURE_NAMES.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiflatParams {
    /// Perturbation sizes for the step-halving ratios.
    pub eps: Vec<f64>,
    /// Number of ζ samples for the pencil check.
    pub zeta_samples: usize,
}

impl Default for SemiflatParams {
    fn default() -> Self {
        SemiflatParams { eps: vec![1e-2, 1e-3], zeta_samples: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    /// Generic admissible points per configuration.
    pub generic: usize,
    /// Constructed `y = λx` points per configuration.
    pub critical: usize,
    /// Explicit μ-configurations; when empty, one random configuration is drawn.
    pub mu: Vec<[ComplexPair; 6]>,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams { generic: 10, critical: 10, mu: Vec::new() }
    }
}

/// A base curve given by offsets from the sampled start point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Polyline { name: String, offsets: Vec<Vec<f64>> },
    /// Regular polygon through the start point in the first two base coordinates.
    Circle { name: String, radius: f64, segments: usize },
    /// Square loop of side `eps` along the first two base coordinates; the
    /// table also reports the holonomy ratio against side `eps/2`.
    Square { name: String, eps: f64 },
}

impl CurveSpec {
    pub fn name(&self) -> &str {
        match self {
            CurveSpec::Polyline { name, .. } | CurveSpec::Circle { name, .. } | CurveSpec::Square { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportParams {
    pub fixture: String,
    pub steps_per_unit: usize,
    pub curves: Vec<CurveSpec>,
}

impl Default for TransportParams {
    fn default() -> Self {
        TransportParams {
            fixture: "siegel1".into(),
            steps_per_unit: DEFAULT_STEPS_PER_UNIT,
            curves: vec![
                CurveSpec::Polyline { name: "zero-length".into(), offsets: vec![vec![0.0, 0.0], vec![0.0, 0.0]] },
                CurveSpec::Polyline { name: "unit-segment".into(), offsets: vec![vec![0.0, 0.0], vec![0.6, 0.8]] },
                CurveSpec::Circle { name: "circle".into(), radius: 0.1, segments: 64 },
                CurveSpec::Square { name: "square-0.1".into(), eps: 0.1 },
                CurveSpec::Square { name: "square-0.05".into(), eps: 0.05 },
            ],
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("configuration: {e}")))
    }

    /// Suite names with `all` expanded, in registry order, deduplicated.
    pub fn resolved_suites(&self) -> Result<Vec<&'static str>> {
        let mut out = Vec::new();
        for s in &self.suites {
            if s == "all" {
                for n in SUITE_NAMES {
                    if !out.contains(&n) {
                        out.push(n);
                    }
                }
                continue;
            }
            let n = SUITE_NAMES
                .iter()
                .find(|n| **n == s.as_str())
                .ok_or_else(|| Error::Usage(format!("unknown suite '{s}' (known: all, {})", SUITE_NAMES.join(", "))))?;
            if !out.contains(n) {
                out.push(*n);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Usage("no suite given".into()));
        }
        self.resolved_suites()?;
        if self.seed == 0 {
            return Err(Error::Usage("seed must be positive".into()));
        }
        if self.samples == Some(0) {
            return Err(Error::Usage("sample count must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Usage(format!("tolerance must be finite and non-negative, got {t}")));
            }
        }
        for f in &self.family.fixtures {
            if !FIXTURE_NAMES.contains(&f.as_str()) {
                return Err(Error::Usage(format!("unknown family fixture '{f}'")));
            }
        }
        if !FIXTURE_NAMES.contains(&self.transport.fixture.as_str()) {
            return Err(Error::Usage(format!("unknown family fixture '{}'", self.transport.fixture)));
        }
        if self.transport.steps_per_unit == 0 {
            return Err(Error::Usage("steps_per_unit must be positive".into()));
        }
        if self.semiflat.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Usage("semiflat eps values must be positive".into()));
        }
        self.quadric.explicit_configs().map_err(|e| Error::Usage(format!("quadric.mu: {e}")))?;
        for m in &self.scan.mu {
            HyperellipticConfig::new(m.map(complex)).map_err(|e| Error::Usage(format!("scan.mu: {e}")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_validate() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.resolved_suites().unwrap(), SUITE_NAMES.to_vec());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 3, "transport": {"fixture": "siegel2"}}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.transport.fixture, "siegel2");
        assert_eq!(c.transport.steps_per_unit, DEFAULT_STEPS_PER_UNIT);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 3}"#).is_err());
    }

    #[test]
    fn usage_errors() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            matches!(c.validate(), Err(Error::Usage(_)))
        };
        assert!(bad(|c| c.suites = vec!["nope".into()]));
        assert!(bad(|c| c.seed = 0));
        assert!(bad(|c| c.samples = Some(0)));
        assert!(bad(|c| c.family.fixtures = vec!["x".into()]));
        assert!(bad(|c| c.quadric.mu = vec![[[0.0, 0.0]; 6]]));
        let c = RunConfig { suites: vec!["quadric".into(), "all".into(), "quadric".into()], ..RunConfig::default() };
        assert_eq!(c.resolved_suites().unwrap().len(), SUITE_NAMES.len());
    }
}
