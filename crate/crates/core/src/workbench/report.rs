//! Verification records and reports.

use std::fmt;

use serde::Serialize;

/// Acceptance rule of a record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Every sample `≤` the value.
    AtMost(f64),
    /// Every sample `≥` the value.
    AtLeast(f64),
    /// Every sample inside `[lo, hi]`.
    Within(f64, f64),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl SampleStats {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return SampleStats { count: 0, min: f64::NAN, max: f64::NAN, mean: f64::NAN };
        }
        let nan = values.iter().any(|v| v.is_nan());
        let min = if nan { f64::NAN } else { values.iter().copied().fold(f64::INFINITY, f64::min) };
        let max = if nan { f64::NAN } else { values.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        SampleStats { count: values.len(), min, max, mean }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable identifier of the checked statement.
    pub anchor: String,
    /// The worst sample with respect to the bound.
    pub residual: f64,
    pub tolerance: Bound,
    pub passed: bool,
    pub stats: SampleStats,
    /// Set when the computation itself failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn from_samples(name: &str, anchor: &str, values: &[f64], tolerance: Bound) -> Self {
        let stats = SampleStats::of(values);
        let (residual, passed) = match tolerance {
            Bound::AtMost(b) => (stats.max, stats.max <= b),
            Bound::AtLeast(b) => (stats.min, stats.min >= b),
            Bound::Within(lo, hi) => {
                let r = if stats.min < lo { stats.min } else { stats.max };
                (r, stats.min >= lo && stats.max <= hi)
            }
        };
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            passed: passed && stats.count > 0,
            stats,
            error: None,
        }
    }

    pub fn failed(name: &str, anchor: &str, tolerance: Bound, error: String) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            residual: f64::NAN,
            tolerance,
            passed: false,
            stats: SampleStats::of(&[]),
            error: Some(error),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub parallel: bool,
}

impl Environment {
    pub fn current(parallel: bool) -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub suites: Vec<String>,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
    pub environment: Environment,
    pub wall_time_s: f64,
}

const CSV_HEADER: &str = "name,anchor,residual,tolerance,passed,count,min,max,mean,error";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl VerificationReport {
    pub fn new(seed: u64, suites: Vec<String>, records: Vec<CheckRecord>, environment: Environment, wall_time_s: f64) -> Self {
        let passed = records.iter().all(|r| r.passed);
        VerificationReport { seed, suites, passed, records, environment, wall_time_s }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// One CSV row per record, without timing fields; values print with
    /// round-trip precision so equal tables mean bitwise-equal residuals.
    pub fn residual_table(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let s = &r.stats;
            out.push_str(&format!(
                "{},{},{:e},{},{},{},{:e},{:e},{:e},{}\n",
                csv_field(&r.name),
                csv_field(&r.anchor),
                r.residual,
                csv_field(&r.tolerance.to_string()),
                r.passed,
                s.count,
                s.min,
                s.max,
                s.mean,
                csv_field(r.error.as_deref().unwrap_or("")),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_stats() {
        let r = CheckRecord::from_samples("a", "x", &[1e-12, 3e-12], Bound::AtMost(1e-10));
        assert!(r.passed);
        assert_eq!(r.residual, 3e-12);
        assert_eq!(r.stats.mean, 2e-12);
        let r = CheckRecord::from_samples("b", "x", &[0.5, 2.0], Bound::AtLeast(1.0));
        assert!(!r.passed);
        assert_eq!(r.residual, 0.5);
        let r = CheckRecord::from_samples("c", "x", &[0.24, 0.26], Bound::Within(0.2, 0.3));
        assert!(r.passed);
        assert!(!CheckRecord::from_samples("d", "x", &[f64::NAN], Bound::AtMost(1.0)).passed);
        assert!(!CheckRecord::from_samples("e", "x", &[], Bound::AtMost(1.0)).passed);
    }

    #[test]
    fn overall_pass_is_conjunction() {
        let ok = CheckRecord::from_samples("a", "x", &[0.0], Bound::AtMost(1.0));
        let bad = CheckRecord::failed("b", "x", Bound::AtMost(1.0), "boom".into());
        let env = Environment::current(false);
        assert!(VerificationReport::new(1, vec![], vec![ok.clone()], env.clone(), 0.0).passed);
        let rep = VerificationReport::new(1, vec![], vec![ok, bad], env, 0.0);
        assert!(!rep.passed);
        assert_eq!(rep.failures().map(|r| r.name.as_str()).collect::<Vec<_>>(), ["b"]);
        let table = rep.residual_table();
        assert!(table.starts_with(CSV_HEADER));
        assert_eq!(table.lines().count(), 3);
        assert!(rep.to_json().contains("\"error\": \"boom\""));
    }
}
