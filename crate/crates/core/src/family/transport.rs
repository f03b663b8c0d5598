//! Parallel transport of fibre points along base curves: the fibre follows
//! the horizontal lift `Ỹ = Y + ½ X_{γ(Y)}`, integrated by the implicit
//! midpoint rule.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{FamilyModel, FamilyPoint};
use crate::calculus::lift;
use crate::{Error, Result};

/// Default implicit-midpoint steps per unit base length.
pub const DEFAULT_STEPS_PER_UNIT: usize = 1000;
const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX: usize = 30;

/// A polyline in the base.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Curve {
    pub vertices: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidParameters("a curve needs at least two vertices".into()));
        }
        let d = vertices[0].len();
        if vertices.iter().any(|v| v.len() != d || v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidParameters("curve vertices must be finite and of equal dimension".into()));
        }
        Ok(Curve { vertices })
    }

    /// The straight segment from `start` in direction `dir` (normalized) of length `len`.
    pub fn segment(start: &[f64], dir: &[f64], len: f64) -> Result<Self> {
        let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        let end = start.iter().zip(dir).map(|(s, d)| s + len * d / n).collect();
        Curve::new(vec![start.to_vec(), end])
    }

    /// Counter-clockwise square of side `eps` spanned by `y` then `z`.
    pub fn square(start: &[f64], y: &[f64], z: &[f64], eps: f64) -> Result<Self> {
        let at = |a: f64, b: f64| start.iter().zip(y).zip(z).map(|((s, u), v)| s + eps * (a * u + b * v)).collect();
        Curve::new(vec![at(0.0, 0.0), at(1.0, 0.0), at(1.0, 1.0), at(0.0, 1.0), at(0.0, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| dist(&w[0], &w[1])).sum()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    pub endpoint: Vec<f64>,
    /// Derivative of the endpoint with respect to the starting fibre point.
    pub jacobian: DMatrix<f64>,
    pub steps: usize,
}

/// Vertical velocity `½ P ∇_F γ(ḃ)` and its fibre derivative `½ P ∇²_F γ(ḃ)`.
fn vertical_field(family: &FamilyModel, b: &[f64], bdot: &[f64], u: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let m = family.base_dim();
    let n = family.fibre_dim();
    let q: Vec<Complex64> = lift(&b.iter().chain(u).copied().collect::<Vec<_>>());
    let mut grad = vec![0.0; n];
    let mut hess = DMatrix::zeros(n, n);
    for (a, phi) in family.phi_components().iter().enumerate() {
        if bdot[a] == 0.0 {
            continue;
        }
        let jet = phi.jet(&q, 2)?;
        for r in 0..n {
            grad[r] += bdot[a] * jet.grad[m + r].im;
            for c in 0..n {
                hess[(r, c)] += bdot[a] * jet.hess_at(m + r, m + c).im;
            }
        }
    }
    let p = family.fibre().tensor().matrix();
    Ok((p * DVector::from_vec(grad) * 0.5, p * hess * 0.5))
}

/// Transports `start` along `curve` with `ceil(length · steps_per_unit)`
/// implicit-midpoint steps per segment.
pub fn parallel_transport(
    family: &FamilyModel,
    curve: &Curve,
    start: &[f64],
    steps_per_unit: usize,
) -> Result<TransportResult> {
    let n = family.fibre_dim();
    if curve.dim() != family.base_dim() {
        return Err(Error::DimensionMismatch { expected: family.base_dim(), found: curve.dim() });
    }
    if start.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: start.len() });
    }
    let mut u = DVector::from_column_slice(start);
    let mut jac = DMatrix::<f64>::identity(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut total_steps = 0;
    let mut t0 = 0.0;
    for w in curve.vertices.windows(2) {
        let len = dist(&w[0], &w[1]);
        if len == 0.0 {
            continue;
        }
        let steps = ((len * steps_per_unit as f64).ceil() as usize).max(1);
        let h = len / steps as f64;
        let bdot: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) / len).collect();
        for k in 0..steps {
            let tm = (k as f64 + 0.5) * h;
            let bmid: Vec<f64> = w[0].iter().zip(&bdot).map(|(a, d)| a + tm * d).collect();
            let time = t0 + tm;
            let (v0, _) = vertical_field(family, &bmid, &bdot, u.as_slice())?;
            let mut next = &u + &v0 * h;
            let mut a = DMatrix::zeros(n, n);
            for _ in 0..NEWTON_MAX {
                let mid = (&u + &next) * 0.5;
                let (v, dv) = vertical_field(family, &bmid, &bdot, mid.as_slice())?;
                let g = &next - &u - &v * h;
                let dg = &id - &dv * (0.5 * h);
                let delta = dg.lu().solve(&g).ok_or(Error::NonFinite { time })?;
                next -= &delta;
                a = dv;
                if !next.iter().all(|c| c.is_finite()) {
                    return Err(Error::NonFinite { time });
                }
                if delta.norm() <= NEWTON_TOL * (1.0 + next.norm()) {
                    break;
                }
            }
            let mid = (&u + &next) * 0.5;
            let (_, dv) = vertical_field(family, &bmid, &bdot, mid.as_slice())?;
            a = if dv.iter().all(|c| c.is_finite()) { dv } else { a };
            let lhs = &id - &a * (0.5 * h);
            let rhs = &id + &a * (0.5 * h);
            let step = lhs.lu().solve(&rhs).ok_or(Error::NonFinite { time })?;
            jac = step * jac;
            u = next;
        }
        total_steps += steps;
        t0 += len;
    }
    Ok(TransportResult { endpoint: u.iter().copied().collect(), jacobian: jac, steps: total_steps })
}

/// `‖JᵀωJ − ω‖` (max entry) with `ω` the fibre form.
pub fn symplectic_residual(family: &FamilyModel, jacobian: &DMatrix<f64>) -> f64 {
    let w = family.fibre().omega();
    (jacobian.transpose() * w * jacobian - w).amax()
}

/// `|u_N − u_{2N}| / |u_{2N} − u_{4N}|` for total step counts `N, 2N, 4N`;
/// ≈ 4 for a second-order integrator.
pub fn order_ratio(family: &FamilyModel, curve: &Curve, start: &[f64], steps_per_unit: usize) -> Result<f64> {
    let run = |k: usize| parallel_transport(family, curve, start, steps_per_unit * k).map(|r| DVector::from_vec(r.endpoint));
    let (a, b, c) = (run(1)?, run(2)?, run(4)?);
    Ok((&a - &b).norm() / (&b - &c).norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyCheck {
    pub eps: f64,
    /// `|H(u) − u|`.
    pub displacement: f64,
    /// Projection of `H(u) − u` onto the prediction, divided by its squared length.
    pub ratio: f64,
}

/// Transport around the square of side `ε` spanned by `Y, Z` at `p`,
/// compared with `−ε² X_{F_A(Y,Z)}` evaluated at the horizontal lift of the centre of the square.
pub fn loop_holonomy(
    family: &FamilyModel,
    p: &FamilyPoint,
    y: &[f64],
    z: &[f64],
    eps: f64,
    steps_per_unit: usize,
) -> Result<HolonomyCheck> {
    let curve = Curve::square(&p.base, y, z, eps)?;
    let out = parallel_transport(family, &curve, &p.fibre, steps_per_unit)?;
    let disp = DVector::from_vec(out.endpoint) - DVector::from_column_slice(&p.fibre);
    let m = family.base_dim();
    let conn = family.connection_a();
    let dim = family.dim();
    let pot_y = conn.potential(y);
    let pot_z = conn.potential(z);
    let centre: Vec<f64> = p.base.iter().zip(y).zip(z).map(|((b, u), v)| b + 0.5 * eps * (u + v)).collect();
    let to_centre = Curve::new(vec![p.base.clone(), centre.clone()])?;
    let lifted = parallel_transport(family, &to_centre, &p.fibre, steps_per_unit)?.endpoint;
    let q = FamilyPoint::new(centre, lifted).product();
    // fibre gradient of F_A(Y,Z) = Y c(Z) − Z c(Y) + {c(Y), c(Z)}
    let ycz = directional(&pot_z, y, dim);
    let zcy = directional(&pot_y, z, dim);
    let br = family.tensor().bracket(&pot_y, &pot_z);
    let f = crate::calculus::ScalarField::linear_combination(
        dim,
        vec![(Complex64::new(1.0, 0.0), ycz), (Complex64::new(-1.0, 0.0), zcy), (Complex64::new(1.0, 0.0), br)],
    );
    let g = f.gradient(&q)?;
    let fib: Vec<f64> = g[m..].iter().map(|c| c.re).collect();
    let x = DVector::from_vec(family.fibre().tensor().apply(&fib));
    let predicted = -x * (eps * eps);
    let denom = predicted.norm_squared();
    let ratio = if denom > 0.0 { disp.dot(&predicted) / denom } else { f64::NAN };
    Ok(HolonomyCheck { eps, displacement: disp.norm(), ratio })
}

fn directional(
    f: &crate::calculus::ScalarField<Complex64>,
    y: &[f64],
    dim: usize,
) -> crate::calculus::ScalarField<Complex64> {
    let terms = y
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(a, &c)| (Complex64::new(c, 0.0), f.partial_derivative(a)))
        .collect();
    crate::calculus::ScalarField::linear_combination(dim, terms)
}
