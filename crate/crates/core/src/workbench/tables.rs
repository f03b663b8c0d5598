//! Plot-ready tables: the Levi degeneracy scan and the transport sweep.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use super::config::{complex, CurveSpec, RunConfig};
use super::suites::{circle_curve, CRITICAL_TOL};
use super::{substream, Ctx};
use crate::family::fixtures;
use crate::family::transport::{parallel_transport, symplectic_residual, Curve};
use crate::family::{FamilyModel, FamilyPoint};
use crate::quadric::{critical_point, HyperellipticConfig, QuadricSystem};
use crate::{Error, Result};

/// Columns of the scan table.
pub const SCAN_COLUMNS: [&str; 6] = ["point_id", "config", "kind", "reduced_null_dim", "degenerate", "critical_z"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub point_id: usize,
    pub config: usize,
    /// `generic` or `constructed` (`y = λx`).
    pub kind: String,
    pub reduced_null_dim: usize,
    pub degenerate: bool,
    /// Common roots as `[re, im]`.
    pub critical_z: Vec<[f64; 2]>,
    /// Whether the common-root detector agrees with the null-space detector.
    pub detectors_agree: bool,
}

impl ScanRow {
    /// Degeneracy matches the construction: constructed rows degenerate, generic rows not.
    pub fn expected(&self) -> bool {
        self.degenerate == (self.kind == "constructed") && self.detectors_agree
    }
}

fn scan_configs(config: &RunConfig) -> Result<Vec<HyperellipticConfig>> {
    if config.scan.mu.is_empty() {
        Ok(vec![HyperellipticConfig::random(&mut substream(config.seed, "scan-levi/config"))])
    } else {
        config.scan.mu.iter().map(|m| HyperellipticConfig::new(m.map(complex))).collect()
    }
}

/// Generic admissible points followed by constructed `y = λx` points, for every configuration.
pub fn scan_levi(config: &RunConfig) -> Result<Vec<ScanRow>> {
    config.validate()?;
    let ctx = Ctx::new(config, "scan-levi");
    let systems: Vec<QuadricSystem> = scan_configs(config)?.into_iter().map(QuadricSystem::new).collect();
    let (ng, nc) = (config.scan.generic, config.scan.critical);
    let per = ng + nc;
    let rows = ctx.sweep("points", per * systems.len(), |i, rng| {
        let (c, k) = (i / per, i % per);
        let sys = &systems[c];
        let constructed = k >= ng;
        let pt = if constructed {
            let lambda = loop {
                let l = num_complex::Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if l.norm() >= 0.1 {
                    break l;
                }
            };
            critical_point(sys, rng.gen(), lambda)?
        } else {
            sys.sample_admissible(rng.gen())?
        };
        let null = sys.levi_null_directions(&pt)?;
        let roots = sys.critical_locus(&pt, CRITICAL_TOL)?;
        Ok(ScanRow {
            point_id: i,
            config: c,
            kind: if constructed { "constructed" } else { "generic" }.into(),
            reduced_null_dim: null.reduced_dim(),
            degenerate: null.degenerate(),
            critical_z: roots.iter().map(|z| [z.re, z.im]).collect(),
            detectors_agree: roots.is_empty() != null.degenerate(),
        })
    })?;
    Ok(rows)
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = SCAN_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let z: Vec<String> = r.critical_z.iter().map(|c| format!("{:e}{:+e}i", c[0], c[1])).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.point_id,
            r.config,
            r.kind,
            r.reduced_null_dim,
            r.degenerate,
            z.join(";")
        ));
    }
    out
}

/// Columns of the transport table.
pub const TRANSPORT_COLUMNS: [&str; 6] = ["curve", "steps", "endpoint", "symplectic_residual", "f_drift", "holonomy_ratio"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportRow {
    pub curve: String,
    pub steps: usize,
    pub endpoint: Vec<f64>,
    pub symplectic_residual: f64,
    /// `|f(end) − f(start)|`, absent when the fixture has no moment map.
    pub f_drift: Option<f64>,
    /// For squares: `|H_ε(u) − u| / |H_{ε/2}(u) − u|`, ≈ 4 for curvature-driven holonomy.
    pub holonomy_ratio: Option<f64>,
}

/// A failed transport, naming the curve and the curve parameter where the flow broke down.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportFailure {
    pub curve: String,
    pub message: String,
}

fn square(start: &[f64], eps: f64) -> Result<Curve> {
    let mut y = vec![0.0; start.len()];
    let mut z = vec![0.0; start.len()];
    y[0] = 1.0;
    z[1] = 1.0;
    Curve::square(start, &y, &z, eps)
}

fn build_curve(shape: &CurveSpec, start: &[f64]) -> Result<Curve> {
    let need2 = |d: usize| if d < 2 { Err(Error::Usage(format!("curve '{}' needs a base of dimension ≥ 2", shape.name()))) } else { Ok(()) };
    match shape {
        CurveSpec::Polyline { offsets, .. } => {
            if offsets.iter().any(|o| o.len() != start.len()) {
                return Err(Error::Usage(format!("curve '{}': offsets must have dimension {}", shape.name(), start.len())));
            }
            Curve::new(offsets.iter().map(|o| start.iter().zip(o).map(|(a, b)| a + b).collect()).collect())
        }
        CurveSpec::Circle { radius, segments, .. } => {
            need2(start.len())?;
            circle_curve(start, *radius, *segments)
        }
        CurveSpec::Square { eps, .. } => {
            need2(start.len())?;
            square(start, *eps)
        }
    }
}

fn displacement(fam: &FamilyModel, curve: &Curve, start: &[f64], steps: usize) -> Result<f64> {
    let end = parallel_transport(fam, curve, start, steps)?.endpoint;
    Ok((DVector::from_vec(end) - DVector::from_column_slice(start)).norm())
}

fn transport_row(fam: &FamilyModel, shape: &CurveSpec, p: &FamilyPoint, steps: usize) -> Result<TransportRow> {
    let curve = build_curve(shape, &p.base)?;
    let out = parallel_transport(fam, &curve, &p.fibre, steps)?;
    let end = FamilyPoint::new(curve.vertices.last().expect("non-empty").clone(), out.endpoint.clone());
    let f_drift = match fam.moment_map() {
        Some(f) => Some((f.value(&end.product())? - f.value(&p.product())?).norm()),
        None => None,
    };
    let holonomy_ratio = match shape {
        CurveSpec::Square { eps, .. } => {
            let big = (DVector::from_column_slice(&out.endpoint) - DVector::from_column_slice(&p.fibre)).norm();
            let small = displacement(fam, &square(&p.base, eps / 2.0)?, &p.fibre, steps)?;
            Some(big / small)
        }
        _ => None,
    };
    Ok(TransportRow {
        curve: shape.name().to_string(),
        steps: out.steps,
        endpoint: out.endpoint,
        symplectic_residual: symplectic_residual(fam, &out.jacobian),
        f_drift,
        holonomy_ratio,
    })
}

/// Transports one sampled start point along every configured curve.
pub fn transport_table(config: &RunConfig) -> Result<std::result::Result<Vec<TransportRow>, TransportFailure>> {
    config.validate()?;
    let t = &config.transport;
    let fam = fixtures::by_name(&t.fixture, config.seed)?;
    let p = fam.sample_point(&mut substream(config.seed, "transport/start"))?;
    let mut rows = Vec::new();
    for shape in &t.curves {
        match transport_row(&fam, shape, &p, t.steps_per_unit) {
            Ok(r) => rows.push(r),
            Err(e @ Error::Usage(_)) => return Err(e),
            Err(e) => return Ok(Err(TransportFailure { curve: shape.name().to_string(), message: e.to_string() })),
        }
    }
    Ok(Ok(rows))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn transport_csv(rows: &[TransportRow]) -> String {
    let mut out = TRANSPORT_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let e: Vec<String> = r.endpoint.iter().map(|x| format!("{x:e}")).collect();
        out.push_str(&format!(
            "{},{},{},{:e},{},{}\n",
            r.curve,
            r.steps,
            e.join(";"),
            r.symplectic_residual,
            opt(r.f_drift),
            opt(r.holonomy_ratio)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_flags_follow_construction() {
        let mut cfg = RunConfig::default();
        cfg.scan.generic = 3;
        cfg.scan.critical = 3;
        let rows = scan_levi(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.expected()), "{rows:?}");
        assert!(rows[3..].iter().all(|r| !r.critical_z.is_empty() && r.reduced_null_dim == 3));
        let csv = scan_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), SCAN_COLUMNS.join(","));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn empty_scan() {
        let mut cfg = RunConfig::default();
        cfg.scan.generic = 0;
        cfg.scan.critical = 0;
        let rows = scan_levi(&cfg).unwrap();
        assert!(rows.is_empty());
        assert_eq!(scan_csv(&rows).lines().count(), 1);
    }

    #[test]
    fn zero_length_curve_and_unknown_dimension() {
        let mut cfg = RunConfig::default();
        cfg.transport.curves = vec![CurveSpec::Polyline { name: "zero".into(), offsets: vec![vec![0.0, 0.0], vec![0.0, 0.0]] }];
        let rows = transport_table(&cfg).unwrap().unwrap();
        let fam = fixtures::by_name("siegel1", cfg.seed).unwrap();
        let p = fam.sample_point(&mut substream(cfg.seed, "transport/start")).unwrap();
        assert_eq!(rows[0].endpoint, p.fibre);
        assert_eq!(rows[0].f_drift, Some(0.0));
        assert_eq!(rows[0].steps, 0);
        cfg.transport.curves = vec![CurveSpec::Polyline { name: "bad".into(), offsets: vec![vec![0.0], vec![1.0]] }];
        assert!(matches!(transport_table(&cfg), Err(Error::Usage(_))));
    }
}
