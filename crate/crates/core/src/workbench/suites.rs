//! The registered verification suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::report::{Bound, CheckRecord};
use super::Ctx;
use crate::calculus::poisson::so6_moment_polynomials;
use crate::calculus::{lie_poisson_so6, FormField, FormValue, PoissonChart, Polynomial, ScalarField};
use crate::family::fixtures::{self, random_direction};
use crate::family::transport::{loop_holonomy, order_ratio, parallel_transport, symplectic_residual, Curve};
use crate::family::{FamilyModel, FamilyPoint};
use crate::quadric::{self, critical_point, HyperellipticConfig, OrbitPoint, QuadricSystem};
use crate::semiflat::{self, HyperkahlerTriple, Prepotential, VariationField};
use crate::{Error, Result};

type C = Complex64;

/// Root-matching tolerance of the common-root detector.
pub const CRITICAL_TOL: f64 = 1e-6;
/// Fourier residual below which a point counts as flat.
pub const FLATNESS_EPS: f64 = 1e-9;
/// Holomorphicity tolerance for Levi evaluations.
pub const HOLOMORPHIC_TOL: f64 = 1e-10;
/// Steps per unit length for the loop-holonomy runs.
pub const HOLONOMY_STEPS: usize = 2000;
/// Steps per unit length for the base run of the step-halving test.
pub const ORDER_STEPS: usize = 20;
/// Steps per unit length for the closed-form oscillator comparison.
pub const ORACLE_STEPS: usize = 10_000;

pub fn run_suite(ctx: &Ctx) -> Vec<CheckRecord> {
    match ctx.suite {
        "calculus" => calculus(ctx),
        "semiflat" => semiflat_suite(ctx),
        "variation" => variation(ctx),
        "quadric" => quadric_suite(ctx),
        "relations" => relations(ctx),
        "leaf" => leaf(ctx),
        "critical" => critical(ctx),
        "fourier" => fourier(ctx),
        "identities" => identities(ctx),
        "equivariance" => equivariance(ctx),
        "levi" => levi(ctx),
        "prequantum" => prequantum(ctx),
        "transport" => transport(ctx),
        other => unreachable!("unregistered suite {other}"),
    }
}

fn gauss(rng: &mut ChaCha20Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gauss_c(rng: &mut ChaCha20Rng) -> C {
    C::new(gauss(rng), gauss(rng))
}

fn uniform_vec(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_poly(rng: &mut ChaCha20Rng, dim: usize, degree: u32) -> Polynomial<f64> {
    Polynomial::random_dense(dim, degree, || rng.gen_range(-0.5..0.5))
}

fn flatten<T>(v: Result<Vec<Vec<T>>>) -> Result<Vec<T>> {
    v.map(|x| x.into_iter().flatten().collect())
}

fn column<T: Copy>(v: &Result<Vec<T>>, f: impl Fn(&T) -> f64) -> Result<Vec<f64>> {
    match v {
        Ok(x) => Ok(x.iter().map(f).collect()),
        Err(e) => Err(Error::InvalidParameters(e.to_string())),
    }
}

fn columns<const N: usize>(v: &Result<Vec<[f64; N]>>, idx: &[usize]) -> Result<Vec<f64>> {
    match v {
        Ok(x) => Ok(x.iter().flat_map(|r| idx.iter().map(|&k| r[k])).collect()),
        Err(e) => Err(Error::InvalidParameters(e.to_string())),
    }
}

// calculus

fn calculus(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(50);
    let chart = PoissonChart::canonical(2);
    let t = chart.tensor();
    let jacobi = ctx.sweep("jacobi", n, |_, rng| {
        let [f, g, h] = [(); 3].map(|_| random_poly(rng, 4, 3).into_field());
        let p = uniform_vec(rng, 4);
        let a = t.bracket(&f, &t.bracket(&g, &h)).value(&p)?;
        let b = t.bracket(&g, &t.bracket(&h, &f)).value(&p)?;
        let c = t.bracket(&h, &t.bracket(&f, &g)).value(&p)?;
        Ok((a + b + c).abs())
    });
    let antisymmetry = ctx.sweep("antisymmetry", n, |_, rng| {
        let h = random_poly(rng, 4, 3).into_field();
        Ok(chart.bracket_at(&h, &h, &uniform_vec(rng, 4))?.abs())
    });
    let field = ctx.sweep("vector-field", n, |_, rng| {
        let h1 = random_poly(rng, 4, 3).into_field();
        let h2 = random_poly(rng, 4, 3).into_field();
        let p = uniform_vec(rng, 4);
        let x = chart.hamiltonian_vector_field(&h2, &p)?;
        let dh1: f64 = h1.gradient(&p)?.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok((chart.bracket_at(&h1, &h2, &p)? - dh1).abs())
    });
    let d_squared = ctx.sweep("d-squared", ctx.samples(20), |_, rng| {
        let terms = (0..4).map(|k| (vec![k], random_poly(rng, 4, 3).into_field())).collect();
        let form = FormField::new(4, 1, terms)?;
        Ok(form.d().d().eval(&uniform_vec(rng, 4))?.norm())
    });
    let so6 = so6_moment_polynomials::<f64>();
    let canonical6 = PoissonChart::canonical(6);
    let pullback = ctx.sweep("lie-poisson-pullback", n, |_, rng| {
        let f = random_poly(rng, 15, 2);
        let g = random_poly(rng, 15, 2);
        let p = uniform_vec(rng, 12);
        let a = DMatrix::from_fn(6, 6, |i, j| p[i] * p[6 + j] - p[j] * p[6 + i]);
        let lp = lie_poisson_so6(&f.clone().into_field(), &g.clone().into_field(), &a)?;
        let pulled = canonical6.bracket_at(&f.compose(&so6).into_field(), &g.compose(&so6).into_field(), &p)?;
        Ok((lp - pulled).abs())
    });
    vec![
        ctx.record("jacobi", "bracket/jacobi-identity", jacobi, Bound::AtMost(1e-8)),
        ctx.record("antisymmetry", "bracket/antisymmetry", antisymmetry, Bound::AtMost(1e-12)),
        ctx.record("bracket-vs-vector-field", "bracket/hamiltonian-vector-field", field, Bound::AtMost(1e-10)),
        ctx.record("d-squared", "forms/d-squared", d_squared, Bound::AtMost(1e-9)),
        ctx.record("lie-poisson-pullback", "bracket/so6-moment-pullback", pullback, Bound::AtMost(1e-10)),
    ]
}

// semiflat

fn quadratic_plus(m: usize, eps: f64, extra: &Polynomial<f64>) -> Result<Prepotential> {
    let f = &Prepotential::flat_polynomial(m) + &extra.scale(eps);
    Prepotential::new(f.into_field(), Prepotential::standard_pairing(m))
}

fn quaternion_at(prep: &Prepotential, x: &[f64]) -> Result<f64> {
    semiflat::quaternion_residual(&semiflat::build_triple(prep, x)?)
}

fn halving_ratios(eps: &[f64], x: &[f64], extra: &Polynomial<f64>) -> Result<Vec<f64>> {
    eps.iter()
        .map(|&e| Ok(quaternion_at(&quadratic_plus(1, e, extra)?, x)? / quaternion_at(&quadratic_plus(1, 2.0 * e, extra)?, x)?))
        .collect()
}

fn random_two_form(rng: &mut ChaCha20Rng, n: usize) -> Result<FormValue<f64>> {
    let a = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    FormValue::from_matrix(&(&a - a.transpose()), 0.0)
}

fn semiflat_suite(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(5);
    let flat = ctx.sweep("flat", n, |i, rng| {
        let m = 1 + i % 2;
        let prep = Prepotential::flat(m);
        let x = uniform_vec(rng, 2 * m);
        Ok(quaternion_at(&prep, &x)?.max(semiflat::nonlinear_residuals(&prep, &x)?.normalized))
    });
    let closed = ctx.sweep("closedness", ctx.samples(20), |_, rng| {
        let prep = Prepotential::new(random_poly(rng, 2, 4).into_field(), Prepotential::standard_pairing(1))?;
        let r = semiflat::closedness_residuals(&prep, &uniform_vec(rng, 2))?;
        Ok(r.into_iter().fold(0.0, f64::max))
    });
    let eps = &ctx.config.semiflat.eps;
    let w = &Polynomial::<C>::coordinate(1, 0);
    let cubic = semiflat::real_part_of_holomorphic(1, &w.powi(3));
    let x1sq = Polynomial::<f64>::coordinate(2, 0).powi(2);
    let harmonic = flatten(ctx.sweep("harmonic", n, |_, rng| halving_ratios(eps, &uniform_vec(rng, 2), &cubic)));
    let generic = flatten(ctx.sweep("generic", n, |_, rng| halving_ratios(eps, &uniform_vec(rng, 2), &x1sq)));
    let zetas = ctx.config.semiflat.zeta_samples;
    let pencil = flatten(ctx.sweep("pencil", 2, |i, rng| {
        let m = i + 1;
        let t = semiflat::build_triple(&Prepotential::flat(m), &uniform_vec(rng, 2 * m))?;
        (0..zetas).map(|_| semiflat::pencil_residual(&t, gauss_c(rng), m)).collect()
    }));
    let negative = ctx.sweep("pencil-negative", n, |_, rng| {
        let t = HyperkahlerTriple {
            omega1: random_two_form(rng, 4)?,
            omega2: random_two_form(rng, 4)?,
            omega3: random_two_form(rng, 4)?,
            warning: None,
        };
        semiflat::pencil_residual(&t, gauss_c(rng), 1)
    });
    vec![
        ctx.record("flat", "semiflat/flat-quaternions", flat, Bound::AtMost(1e-12)),
        ctx.record("closedness", "semiflat/closed-triple", closed, Bound::AtMost(1e-8)),
        ctx.record("harmonic-ratio", "semiflat/second-order-harmonic", harmonic, Bound::Within(0.2, 0.3)),
        ctx.record("generic-ratio", "semiflat/first-order-generic", generic, Bound::Within(0.45, 0.55)),
        ctx.record("pencil", "semiflat/pencil-degenerate", pencil, Bound::AtMost(1e-10)),
        ctx.record("pencil-negative", "semiflat/pencil-degenerate", negative, Bound::AtLeast(1e-6)),
    ]
}

// variation

fn variation(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(20);
    let sample = |rng: &mut ChaCha20Rng, i: usize, extra: f64| -> Result<f64> {
        let m = 1 + i % 2;
        let p = Polynomial::<C>::random_dense(m, 3, || gauss_c(rng) * 0.5);
        let mut fdot = semiflat::real_part_of_holomorphic(m, &p);
        if extra != 0.0 {
            fdot = &fdot + &Polynomial::coordinate(2 * m, 0).powi(2).scale(extra);
        }
        let v = VariationField { fdot: fdot.into_field(), holomorphic: extra == 0.0 };
        Ok(semiflat::variation_check(&Prepotential::flat(m), &v, &uniform_vec(rng, 2 * m))?.max())
    };
    let harmonic = ctx.sweep("harmonic", n, |i, rng| sample(rng, i, 0.0));
    let negative = ctx.sweep("non-harmonic", n, |i, rng| {
        let c = rng.gen_range(0.5..1.5);
        sample(rng, i, c)
    });
    let constant = ctx.sweep("constant", 1, |_, rng| {
        let v = VariationField { fdot: ScalarField::constant(2, gauss(rng)), holomorphic: true };
        Ok(semiflat::variation_check(&Prepotential::flat(1), &v, &uniform_vec(rng, 2))?.max())
    });
    vec![
        ctx.record("harmonic", "semiflat/variation-harmonic", harmonic, Bound::AtMost(1e-9)),
        ctx.record("constant", "semiflat/variation-harmonic", constant, Bound::AtMost(1e-12)),
        ctx.record("non-harmonic", "semiflat/variation-harmonic", negative, Bound::AtLeast(1e-3)),
    ]
}

// quadric

fn quadric_configs(ctx: &Ctx) -> Result<Vec<HyperellipticConfig>> {
    let q = &ctx.config.quadric;
    if !q.mu.is_empty() {
        return q.explicit_configs();
    }
    Ok((0..q.random_configs.max(1)).map(|k| HyperellipticConfig::random(&mut ctx.rng("config", k))).collect())
}

/// `x/|x|, y/|y|` for a Gaussian point.
fn unit_point(rng: &mut ChaCha20Rng) -> OrbitPoint {
    let p = OrbitPoint::random(rng);
    let nx = p.x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let ny = p.y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    OrbitPoint::new(p.x.map(|c| c / nx), p.y.map(|c| c / ny))
}

struct Systems(Vec<QuadricSystem>);

impl Systems {
    fn new(ctx: &Ctx) -> Result<Self> {
        Ok(Systems(quadric_configs(ctx)?.into_iter().map(QuadricSystem::new).collect()))
    }

    fn get(&self, i: usize) -> &QuadricSystem {
        &self.0[i % self.0.len()]
    }

    /// Sample `i` on system `i mod k`.
    fn admissible(&self, i: usize, rng: &mut ChaCha20Rng) -> Result<(&QuadricSystem, OrbitPoint)> {
        let s = self.get(i);
        Ok((s, s.sample_admissible(rng.gen())?))
    }
}

fn with_systems(ctx: &Ctx, names: &[(&str, &str, Bound)], f: impl FnOnce(&Systems) -> Vec<Result<Vec<f64>>>) -> Vec<CheckRecord> {
    match Systems::new(ctx) {
        Ok(s) => names.iter().zip(f(&s)).map(|(&(n, a, b), v)| ctx.record(n, a, v, b)).collect(),
        Err(e) => names.iter().map(|&(n, a, b)| ctx.record(n, a, Err(Error::InvalidParameters(e.to_string())), b)).collect(),
    }
}

fn quadric_suite(ctx: &Ctx) -> Vec<CheckRecord> {
    let names = [
        ("commutation", "gaudin/commutation", Bound::AtMost(1e-8)),
        ("two-route", "gaudin/commutation", Bound::AtMost(1e-10)),
        ("admissible", "gaudin/constraints", Bound::AtMost(1e-12)),
        ("hamiltonian-evaluators", "gaudin/hamiltonians", Bound::AtMost(1e-12)),
    ];
    with_systems(ctx, &names, |sys| {
        let k = sys.0.len();
        let rows = ctx.sweep("points", ctx.samples(50) * k, |i, rng| {
            let (s, pt) = sys.admissible(i, rng)?;
            let cm = s.commutation_matrix(&pt)?;
            let lp = s.commutation_matrix_lie_poisson(&pt)?;
            let adm: f64 = s.constraint_residuals(&pt).iter().map(|r| r.norm()).sum();
            let direct = quadric::hamiltonians(s.config(), &pt);
            let coords = pt.coords();
            let mut dup = 0.0f64;
            for (f, d) in s.hamiltonian_fields().iter().zip(direct) {
                dup = dup.max((f.value(&coords)? - d).norm() / (1.0 + d.norm()));
            }
            let comm = cm.iter().map(|c| c.norm()).fold(0.0, f64::max);
            Ok([comm, (&cm - &lp).iter().map(|c| c.norm()).fold(0.0, f64::max), adm, dup])
        });
        (0..4).map(|j| column(&rows, |r| r[j])).collect()
    })
}

fn relations(ctx: &Ctx) -> Vec<CheckRecord> {
    let names = [
        ("sum-unconstrained", "gaudin/linear-relations", Bound::AtMost(1e-10)),
        ("quadratic-unconstrained", "gaudin/linear-relations", Bound::AtMost(1e-10)),
        ("cubic-unconstrained", "gaudin/linear-relations", Bound::AtMost(1e-10)),
        ("sum-admissible", "gaudin/linear-relations", Bound::AtMost(1e-10)),
        ("quadratic-admissible", "gaudin/linear-relations", Bound::AtMost(1e-10)),
    ];
    with_systems(ctx, &names, |sys| {
        let n = ctx.samples(100);
        let free = ctx.sweep("unconstrained", n, |i, rng| {
            let r = quadric::linear_relations(sys.get(i).config(), &unit_point(rng));
            Ok([r.r1.norm(), r.r2.norm(), r.r3.norm()])
        });
        let adm = ctx.sweep("admissible", n, |i, rng| {
            let (s, pt) = sys.admissible(i, rng)?;
            let r = quadric::linear_relations(s.config(), &pt);
            Ok([r.r1.norm(), r.r2.norm()])
        });
        vec![column(&free, |r| r[0]), column(&free, |r| r[1]), column(&free, |r| r[2]), column(&adm, |r| r[0]), column(&adm, |r| r[1])]
    })
}

/// Threshold above which a leaf derivative counts as a detected violation.
pub const LEAF_NEGATIVE: f64 = 1e-4;

fn leaf(ctx: &Ctx) -> Vec<CheckRecord> {
    let names = [
        ("admissible", "gaudin/leaf-invariance", Bound::AtMost(1e-10)),
        ("scaling-direction-unconstrained", "gaudin/leaf-invariance", Bound::AtMost(1e-10)),
        ("negative-fraction", "gaudin/leaf-invariance", Bound::AtLeast(0.9)),
    ];
    with_systems(ctx, &names, |sys| {
        let adm = ctx.sweep("admissible", ctx.samples(50), |i, rng| {
            let (s, pt) = sys.admissible(i, rng)?;
            let (a, b) = s.leaf_invariance(&pt)?;
            Ok(a.max(b))
        });
        let free = ctx.sweep("unconstrained", ctx.samples(100), |i, rng| sys.get(i).leaf_invariance(&unit_point(rng)));
        let fraction = free.as_ref().map_err(|e| Error::InvalidParameters(e.to_string())).map(|v| {
            vec![v.iter().filter(|r| r.1 > LEAF_NEGATIVE).count() as f64 / v.len().max(1) as f64]
        });
        vec![adm, column(&free, |r| r.0), fraction]
    })
}

fn random_lambda(rng: &mut ChaCha20Rng) -> C {
    loop {
        let l = gauss_c(rng);
        if l.norm() >= 0.1 {
            return l;
        }
    }
}

/// `(common-root detector, null-space detector)` flags for one point.
pub fn critical_flags(s: &QuadricSystem, pt: &OrbitPoint) -> Result<(bool, bool)> {
    let roots = s.critical_locus(pt, CRITICAL_TOL)?;
    let null = s.levi_null_directions(pt)?;
    Ok((!roots.is_empty(), null.degenerate()))
}

fn critical(ctx: &Ctx) -> Vec<CheckRecord> {
    let names = [
        ("constructed-common-root", "gaudin/critical-locus", Bound::AtLeast(1.0)),
        ("constructed-null-space", "gaudin/critical-locus", Bound::AtLeast(1.0)),
        ("generic-common-root", "gaudin/critical-locus", Bound::AtMost(0.0)),
        ("generic-null-space", "gaudin/critical-locus", Bound::AtMost(0.0)),
        ("disagreements", "gaudin/critical-locus", Bound::AtMost(0.0)),
    ];
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    with_systems(ctx, &names, |sys| {
        let built = ctx.sweep("constructed", ctx.samples(20), |i, rng| {
            let s = sys.get(i);
            let pt = critical_point(s, rng.gen(), random_lambda(rng))?;
            critical_flags(s, &pt)
        });
        let generic = ctx.sweep("generic", ctx.samples(50), |i, rng| {
            let (s, pt) = sys.admissible(i, rng)?;
            critical_flags(s, &pt)
        });
        let disagreements = match (&built, &generic) {
            (Ok(a), Ok(b)) => Ok(vec![a.iter().chain(b).filter(|(x, y)| x != y).count() as f64]),
            (Err(e), _) | (_, Err(e)) => Err(Error::InvalidParameters(e.to_string())),
        };
        vec![
            column(&built, |r| flag(r.0)),
            column(&built, |r| flag(r.1)),
            column(&generic, |r| flag(r.0)),
            column(&generic, |r| flag(r.1)),
            disagreements,
        ]
    })
}

// family connection

fn fixture_seed(ctx: &Ctx, name: &str) -> u64 {
    ctx.rng(&format!("fixture-{name}"), 0).gen()
}

fn family(ctx: &Ctx, name: &str) -> Result<FamilyModel> {
    fixtures::by_name(name, fixture_seed(ctx, name))
}

/// A point and two base directions.
fn family_sample(fam: &FamilyModel, rng: &mut ChaCha20Rng) -> Result<(FamilyPoint, Vec<f64>, Vec<f64>)> {
    let p = fam.sample_point(rng)?;
    let y = random_direction(rng, fam.base_dim());
    let z = random_direction(rng, fam.base_dim());
    Ok((p, y, z))
}

fn fourier(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(5);
    let mut out = Vec::new();
    for name in &ctx.config.family.fixtures {
        let rows = family(ctx, name).and_then(|fam| {
            ctx.sweep(name, n, |_, rng| {
                let (p, y, z) = family_sample(&fam, rng)?;
                let ff = fam.fourier_flatness(&p, &y, &z)?;
                Ok([ff.reconstruction_error, ff.mismatch.into_iter().fold(0.0, f64::max)])
            })
        });
        out.push(ctx.record(&format!("reconstruction/{name}"), "connection/fourier-expansion", column(&rows, |r| r[0]), Bound::AtMost(1e-10)));
        out.push(ctx.record(&format!("coefficients/{name}"), "connection/fourier-expansion", column(&rows, |r| r[1]), Bound::AtMost(1e-9)));
    }
    out
}

fn identities(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(5);
    let mut structure = Vec::new();
    let mut decomposition = Vec::new();
    let mut failure: Option<String> = None;
    let mut flat_points = 0usize;
    for name in &ctx.config.family.fixtures {
        let rows = family(ctx, name).and_then(|fam| {
            ctx.sweep(name, n, |_, rng| {
                let (p, y, z) = family_sample(&fam, rng)?;
                let ff = fam.fourier_flatness(&p, &y, &z)?;
                let ids = fam.structure_identities(&p, &y, &z)?;
                Ok((ff.max_residual(), ids))
            })
        });
        match rows {
            Ok(rows) => {
                for (res, ids) in rows {
                    decomposition.push(ids.decomposition);
                    if res <= FLATNESS_EPS {
                        flat_points += 1;
                        structure.push(ids.max());
                    }
                }
            }
            Err(e) => failure = Some(format!("{name}: {e}")),
        }
    }
    let wrap = |v: Vec<f64>| match &failure {
        Some(e) => Err(Error::InvalidParameters(e.clone())),
        None => Ok(v),
    };
    let genus2 = family(ctx, "genus2").and_then(|fam| {
        ctx.sweep("genus2", n, |_, rng| {
            let (p, y, z) = family_sample(&fam, rng)?;
            Ok(fam.fourier_flatness(&p, &y, &z)?.r4)
        })
    });
    let non_flat = family(ctx, "random-poly").and_then(|fam| {
        ctx.sweep("random-poly-negative", n, |_, rng| {
            let (p, y, z) = family_sample(&fam, rng)?;
            Ok(fam.fourier_flatness(&p, &y, &z)?.max_residual())
        })
    });
    vec![
        ctx.record("structure-equations", "connection/structure-equations", wrap(structure), Bound::AtMost(1e-8)),
        ctx.record("flat-points", "connection/structure-equations", wrap(vec![flat_points as f64]), Bound::AtLeast(1.0)),
        ctx.record("decomposition", "connection/structure-equations", wrap(decomposition), Bound::AtMost(1e-12)),
        ctx.record("genus2-phi-phi", "gaudin/phi-commutation", genus2, Bound::AtMost(1e-8)),
        ctx.record("non-flat-detected", "connection/fourier-expansion", non_flat, Bound::AtLeast(1e-3)),
    ]
}

fn equivariance(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(10);
    let siegel = flatten(ctx.sweep("siegel", n, |i, rng| {
        let fam = fixtures::siegel(1 + i % 2)?;
        let (p, y, _) = family_sample(&fam, rng)?;
        let (r1, r2) = fam.equivariance_residuals(&p, &y)?;
        Ok(vec![r1, r2])
    }));
    let w2 = ctx.sweep("weight2", n, |_, rng| {
        let fam = fixtures::weight2(gauss_c(rng))?;
        let (p, y, _) = family_sample(&fam, rng)?;
        Ok(fam.equivariance_residuals(&p, &y)?.0)
    });
    let w1 = ctx.sweep("weight1", n, |_, rng| {
        let fam = fixtures::weight1(gauss_c(rng) + C::new(0.5, 0.0))?;
        let (p, y, _) = family_sample(&fam, rng)?;
        Ok(fam.equivariance_residuals(&p, &y)?.0)
    });
    vec![
        ctx.record("weight2-siegel", "flow/equivariance", siegel, Bound::AtMost(1e-8)),
        ctx.record("weight2-constant-r1", "flow/equivariance", w2, Bound::AtMost(1e-8)),
        ctx.record("weight1-r1", "flow/equivariance", w1, Bound::AtLeast(1e-2)),
    ]
}

fn levi(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(100);
    let rows = ctx.sweep("holomorphic", n, |i, rng| {
        let fam = fixtures::random_holomorphic(rng.gen(), 1 + i % 2)?;
        let (p, y, _) = family_sample(&fam, rng)?;
        let v = fam.levi_details(&p, &y, HOLOMORPHIC_TOL)?;
        Ok([v.value, (v.value + v.holomorphic_gradient.powi(2) / 8.0).abs() / (1.0 + v.value.abs())])
    });
    let zeros = ctx.sweep("critical-points", 1, |_, rng| {
        let z2 = fixtures::weight2(gauss_c(rng))?;
        let origin = FamilyPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]);
        let a = z2.levi_form(&origin, &random_direction(rng, 2), HOLOMORPHIC_TOL)?;
        let constant = fixtures::weight2(C::new(0.0, 0.0))?;
        let (p, y, _) = family_sample(&constant, rng)?;
        let b = constant.levi_form(&p, &y, HOLOMORPHIC_TOL)?;
        Ok(a.abs().max(b.abs()))
    });
    let rejected = ctx.sweep("non-holomorphic", ctx.samples(10), |_, rng| {
        let fam = fixtures::random_polynomial(rng.gen())?;
        let (p, y, _) = family_sample(&fam, rng)?;
        Ok(match fam.levi_form(&p, &y, HOLOMORPHIC_TOL) {
            Err(Error::NotHolomorphic { .. }) => 1.0,
            _ => 0.0,
        })
    });
    let curvature = ctx.sweep("curvature", ctx.samples(10), |i, rng| {
        let fam = fixtures::siegel(1 + i % 2)?;
        let (p, y, _) = family_sample(&fam, rng)?;
        let l = fam.levi_form(&p, &y, HOLOMORPHIC_TOL)?;
        let f = fam.curvature(&fam.connection_a(), &p, &y, &fam.base().apply(&y))?;
        Ok((l + f.re).abs() / (1.0 + l.abs()))
    });
    vec![
        ctx.record("negativity", "levi/negativity", column(&rows, |r| r[0]), Bound::AtMost(1e-10)),
        ctx.record("zero-set", "levi/null-space", column(&rows, |r| r[1]), Bound::AtMost(1e-8)),
        ctx.record("critical-points", "levi/null-space", zeros, Bound::AtMost(1e-8)),
        ctx.record("non-holomorphic-rejected", "levi/negativity", rejected, Bound::AtLeast(1.0)),
        ctx.record("curvature", "levi/curvature", curvature, Bound::AtMost(1e-9)),
    ]
}

fn prequantum(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(5);
    let closed = ctx.sweep("closedness", n, |i, rng| {
        let fam = if i % 2 == 0 { fixtures::random_polynomial(rng.gen())? } else { fixtures::siegel(1)? };
        let p = fam.sample_point(rng)?;
        fam.prequantum_closedness(&p)
    });
    let typed = ctx.sweep("type", n, |i, rng| {
        let fam = fixtures::siegel(1 + i % 2)?;
        let p = fam.sample_point(rng)?;
        fam.prequantum_type_residual(&p)
    });
    vec![
        ctx.record("closedness", "prequantum/closed", closed, Bound::AtMost(1e-9)),
        ctx.record("type-1-1", "prequantum/type-1-1", typed, Bound::AtMost(1e-9)),
    ]
}

/// Unit direction in the first two base coordinates whose second component
/// is non-positive, keeping Siegel base points inside the domain.
fn descending_direction(rng: &mut ChaCha20Rng, dim: usize) -> Vec<f64> {
    let a = rng.gen_range(0.0..std::f64::consts::PI);
    let mut d = vec![0.0; dim];
    d[0] = a.cos();
    d[1] = -a.sin();
    d
}

fn f_drift(fam: &FamilyModel, start: &FamilyPoint, end: &FamilyPoint) -> Result<f64> {
    let f = fam.moment_map().ok_or(Error::MissingMomentMap)?;
    Ok((f.value(&end.product())? - f.value(&start.product())?).norm())
}

/// Closed polygon with `segments` sides through `start`, centred at `start − r e₁`.
pub fn circle_curve(start: &[f64], radius: f64, segments: usize) -> Result<Curve> {
    let vertices = (0..=segments.max(3))
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / segments.max(3) as f64;
            let mut v = start.to_vec();
            v[0] += radius * (t.cos() - 1.0);
            v[1] += radius * t.sin();
            v
        })
        .collect();
    Curve::new(vertices)
}

fn transport(ctx: &Ctx) -> Vec<CheckRecord> {
    let n = ctx.samples(3);
    let steps = ctx.config.transport.steps_per_unit;
    let unit = ctx.sweep("unit-curves", n, |_, rng| {
        let fam = fixtures::siegel(1)?;
        let p = fam.sample_point(rng)?;
        let curve = Curve::segment(&p.base, &descending_direction(rng, 2), 1.0)?;
        let out = parallel_transport(&fam, &curve, &p.fibre, steps)?;
        let end = FamilyPoint::new(curve.vertices[1].clone(), out.endpoint);
        Ok([symplectic_residual(&fam, &out.jacobian), f_drift(&fam, &p, &end)?])
    });
    let order = ctx.sweep("order", n, |_, rng| {
        let fam = fixtures::siegel(1)?;
        let p = fam.sample_point(rng)?;
        let curve = Curve::segment(&p.base, &descending_direction(rng, 2), 1.0)?;
        order_ratio(&fam, &curve, &p.fibre, ORDER_STEPS)
    });
    let holonomy = ctx.sweep("holonomy", 1, |_, rng| {
        let fam = fixtures::siegel(1)?;
        let p = fam.sample_point(rng)?;
        let a = loop_holonomy(&fam, &p, &[1.0, 0.0], &[0.0, 1.0], 0.1, HOLONOMY_STEPS)?;
        let b = loop_holonomy(&fam, &p, &[1.0, 0.0], &[0.0, 1.0], 0.05, HOLONOMY_STEPS)?;
        Ok([a.ratio, b.ratio, a.displacement / b.displacement])
    });
    let circle = ctx.sweep("circle", n, |_, rng| {
        let fam = fixtures::siegel(1)?;
        let p = fam.sample_point(rng)?;
        let curve = circle_curve(&p.base, 0.1, 64)?;
        let out = parallel_transport(&fam, &curve, &p.fibre, steps)?;
        f_drift(&fam, &p, &FamilyPoint::new(p.base.clone(), out.endpoint))
    });
    let oscillator = ctx.sweep("oscillator", n, |_, rng| {
        let c = rng.gen_range(-2.0..2.0);
        let fam = fixtures::oscillator(c)?;
        let u0 = uniform_vec(rng, 2);
        let curve = Curve::segment(&[0.0, 0.0], &[1.0, 0.0], 1.0)?;
        let out = parallel_transport(&fam, &curve, &u0, ORACLE_STEPS)?;
        let a = c / 2.0;
        let expect = [u0[0] * a.cos() + u0[1] * a.sin(), -u0[0] * a.sin() + u0[1] * a.cos()];
        Ok((out.endpoint[0] - expect[0]).abs().max((out.endpoint[1] - expect[1]).abs()))
    });
    let holonomy_ratios = columns(&holonomy, &[0, 1]);
    vec![
        ctx.record("symplectic", "transport/hamiltonian-isotopy", column(&unit, |r| r[0]), Bound::AtMost(1e-6)),
        ctx.record("f-drift-segment", "transport/moment-conservation", column(&unit, |r| r[1]), Bound::AtMost(1e-6)),
        ctx.record("f-drift-circle", "transport/moment-conservation", circle, Bound::AtMost(1e-6)),
        ctx.record("order-ratio", "transport/second-order", order, Bound::Within(3.5, 4.5)),
        ctx.record("holonomy-curvature", "transport/holonomy-curvature", holonomy_ratios, Bound::Within(0.9, 1.1)),
        ctx.record("holonomy-scaling", "transport/holonomy-curvature", column(&holonomy, |r| r[2]), Bound::Within(3.6, 4.4)),
        ctx.record("oscillator", "transport/closed-form", oscillator, Bound::AtMost(1e-8)),
    ]
}
