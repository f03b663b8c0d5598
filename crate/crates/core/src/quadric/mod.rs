//! The genus-2 quadric model: Hamiltonians `f_i` on the intersection of two
//! quadrics in ℂ⁶ paired with a transverse vector, their linear relations,
//! leaf invariance, Poisson commutation, the 1-form φ, and detection of the
//! critical locus where the Levi form degenerates.
//!
//! Points live on the canonical chart `(x₁…x₆, y₁…y₆)` of ℂ¹² with
//! `{x_i, y_j} = δ_ij`.

pub mod roots;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::calculus::poisson::{so6_moment_polynomials, so6_pairs};
use crate::calculus::{lie_poisson_so6, reduced_bracket, ConstraintSet, PoissonChart, Polynomial, ScalarField};
use crate::{Error, Result};

type C = Complex64;

/// Minimum pairwise distance between branch points.
pub const MIN_SEPARATION: f64 = 1e-8;
/// Constraint tolerance for the sampler's postcondition.
pub const ADMISSIBLE_TOL: f64 = 1e-12;
/// Constraint tolerance accepted by operations that require admissible input.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Singular-value threshold for Levi-null directions at unit-scale inputs.
pub const LEVI_TOL: f64 = 1e-8;
/// Smallest `|q(y)|` accepted from the sampler.
pub const MIN_QY: f64 = 1e-3;
const MAX_ATTEMPTS: usize = 16;
const LEADING_TRIM: f64 = 1e-10;

fn zero() -> C {
    C::new(0.0, 0.0)
}

fn gaussian(rng: &mut impl Rng) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Six distinct finite branch points `μ₁…μ₆` of `y² = Π(z − μ_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperellipticConfig {
    mu: [C; 6],
}

impl HyperellipticConfig {
    pub fn new(mu: [C; 6]) -> Result<Self> {
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameters("branch points must be finite".into()));
        }
        for i in 0..6 {
            for j in i + 1..6 {
                if (mu[i] - mu[j]).norm() <= MIN_SEPARATION {
                    return Err(Error::InvalidParameters(format!("branch points {i} and {j} coincide")));
                }
            }
        }
        Ok(HyperellipticConfig { mu })
    }

    pub fn from_real(mu: [f64; 6]) -> Result<Self> {
        Self::new(mu.map(|m| C::new(m, 0.0)))
    }

    /// Complex Gaussian branch points with pairwise separation at least 0.1.
    pub fn random(rng: &mut impl Rng) -> Self {
        loop {
            let mu = [(); 6].map(|_| gaussian(rng));
            let ok = (0..6).all(|i| (i + 1..6).all(|j| (mu[i] - mu[j]).norm() >= 0.1));
            if ok {
                return HyperellipticConfig { mu };
            }
        }
    }

    pub fn mu(&self) -> &[C; 6] {
        &self.mu
    }

    /// Branch points moved by `z ↦ (az + b)/(cz + d)`.
    pub fn mobius(&self, m: [C; 4]) -> Result<Self> {
        let [a, b, c, d] = m;
        if (a * d - b * c).norm() <= MIN_SEPARATION {
            return Err(Error::InvalidParameters("Möbius map is singular".into()));
        }
        let mut mu = self.mu;
        for z in mu.iter_mut() {
            let den = c * *z + d;
            if den.norm() <= MIN_SEPARATION {
                return Err(Error::InvalidParameters("Möbius map sends a branch point to infinity".into()));
            }
            *z = (a * *z + b) / den;
        }
        Self::new(mu)
    }
}

/// A point `(x, y) ∈ ℂ⁶ × ℂ⁶`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub x: [C; 6],
    pub y: [C; 6],
}

impl OrbitPoint {
    pub fn new(x: [C; 6], y: [C; 6]) -> Self {
        OrbitPoint { x, y }
    }

    pub fn from_coords(z: &[C]) -> Self {
        let mut x = [zero(); 6];
        let mut y = [zero(); 6];
        x.copy_from_slice(&z[..6]);
        y.copy_from_slice(&z[6..12]);
        OrbitPoint { x, y }
    }

    /// Independent complex Gaussian entries.
    pub fn random(rng: &mut impl Rng) -> Self {
        OrbitPoint { x: [(); 6].map(|_| gaussian(rng)), y: [(); 6].map(|_| gaussian(rng)) }
    }

    pub fn coords(&self) -> Vec<C> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    /// `a_ij = x_i y_j − x_j y_i`.
    pub fn a(&self, i: usize, j: usize) -> C {
        self.x[i] * self.y[j] - self.x[j] * self.y[i]
    }

    pub fn a_matrix(&self) -> DMatrix<C> {
        DMatrix::from_fn(6, 6, |i, j| self.a(i, j))
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `Σ v_i w_i` (bilinear, no conjugation).
pub fn dot(v: &[C; 6], w: &[C; 6]) -> C {
    v.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub fn q(v: &[C; 6]) -> C {
    dot(v, v)
}

pub fn q_mu(config: &HyperellipticConfig, v: &[C; 6]) -> C {
    v.iter().zip(&config.mu).map(|(a, m)| m * a * a).sum()
}

/// A tangent vector `(dμ₁…dμ₆)` to the space of branch points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseDirection {
    pub dmu: [C; 6],
}

impl BaseDirection {
    pub fn unit(k: usize) -> Self {
        let mut dmu = [zero(); 6];
        dmu[k] = C::new(1.0, 0.0);
        BaseDirection { dmu }
    }
}

/// `f_i = 4 Σ_{j≠i} a_ij² / (μ_j − μ_i)`.
pub fn hamiltonians(config: &HyperellipticConfig, pt: &OrbitPoint) -> [C; 6] {
    let mu = &config.mu;
    std::array::from_fn(|i| {
        (0..6).filter(|&j| j != i).map(|j| 4.0 * pt.a(i, j).powi(2) / (mu[j] - mu[i])).sum()
    })
}

/// `φ(dμ) = Σ_i f_i dμ_i`.
pub fn phi_evaluate(config: &HyperellipticConfig, pt: &OrbitPoint, dir: &BaseDirection) -> C {
    hamiltonians(config, pt).iter().zip(&dir.dmu).map(|(f, d)| f * d).sum()
}

/// Residuals of the three linear relations among the `f_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearRelations {
    /// `Σ f_i`; vanishes identically.
    pub r1: C,
    /// `Σ μ_i f_i + 4(q(x)q(y) − (x,y)²)`; vanishes identically.
    pub r2: C,
    /// `Σ μ_i² f_i + 4(q_μ(x)q(y) + q(x)q_μ(y) − 2 p_μ (x,y))` with
    /// `p_μ = Σ μ_i x_i y_i`; vanishes identically.
    pub r3: C,
}

impl LinearRelations {
    pub fn max(&self) -> f64 {
        self.r1.norm().max(self.r2.norm()).max(self.r3.norm())
    }
}

pub fn linear_relations(config: &HyperellipticConfig, pt: &OrbitPoint) -> LinearRelations {
    let f = hamiltonians(config, pt);
    let mu = &config.mu;
    let (x, y) = (&pt.x, &pt.y);
    let xy = dot(x, y);
    let p_mu: C = (0..6).map(|i| mu[i] * x[i] * y[i]).sum();
    let r1 = f.iter().sum();
    let r2 = f.iter().zip(mu).map(|(f, m)| f * m).sum::<C>() + 4.0 * (q(x) * q(y) - xy * xy);
    let r3 = f.iter().zip(mu).map(|(f, m)| f * m * m).sum::<C>()
        + 4.0 * (q_mu(config, x) * q(y) + q(x) * q_mu(config, y) - 2.0 * p_mu * xy);
    LinearRelations { r1, r2, r3 }
}

/// The model with its polynomials assembled once.
#[derive(Clone, Debug)]
pub struct QuadricSystem {
    config: HyperellipticConfig,
    f: Vec<ScalarField<C>>,
    f_so6: Vec<ScalarField<C>>,
    constraints: ConstraintSet<C>,
    chart: PoissonChart,
}

impl QuadricSystem {
    pub fn new(config: HyperellipticConfig) -> Self {
        let mu = config.mu;
        let a = so6_moment_polynomials::<C>();
        let pairs = so6_pairs();
        let build = |coord: &dyn Fn(usize) -> Polynomial<C>, dim: usize| -> Vec<ScalarField<C>> {
            (0..6)
                .map(|i| {
                    let mut p = Polynomial::zero(dim);
                    for (u, &(k, l)) in pairs.iter().enumerate() {
                        let j = if k == i {
                            l
                        } else if l == i {
                            k
                        } else {
                            continue;
                        };
                        let c = coord(u);
                        p = &p + &(&c * &c).scale(C::new(4.0, 0.0) / (mu[j] - mu[i]));
                    }
                    p.into_field()
                })
                .collect()
        };
        let f = build(&|u| a[u].clone(), 12);
        let f_so6 = build(&|u| Polynomial::coordinate(15, u), 15);
        let coord = |k| Polynomial::<C>::coordinate(12, k);
        let qx = (0..6).fold(Polynomial::zero(12), |acc, i| &acc + &(&coord(i) * &coord(i)));
        let qmx = (0..6).fold(Polynomial::zero(12), |acc, i| &acc + &(&coord(i) * &coord(i)).scale(mu[i]));
        let xy = (0..6).fold(Polynomial::zero(12), |acc, i| &acc + &(&coord(i) * &coord(6 + i)));
        let constraints = ConstraintSet::new(vec![qx.into_field(), qmx.into_field(), xy.into_field()]);
        QuadricSystem { config, f, f_so6, constraints, chart: PoissonChart::canonical(6) }
    }

    pub fn config(&self) -> &HyperellipticConfig {
        &self.config
    }

    /// `f_i` as polynomials on ℂ¹².
    pub fn hamiltonian_fields(&self) -> &[ScalarField<C>] {
        &self.f
    }

    /// `F_i(a)` on so(6)* with `f_i = F_i ∘ a`.
    pub fn lie_poisson_fields(&self) -> &[ScalarField<C>] {
        &self.f_so6
    }

    /// `q(x)`, `q_μ(x)`, `(x, y)` as polynomials on ℂ¹².
    pub fn constraints(&self) -> &ConstraintSet<C> {
        &self.constraints
    }

    pub fn chart(&self) -> &PoissonChart {
        &self.chart
    }

    pub fn constraint_residuals(&self, pt: &OrbitPoint) -> [C; 3] {
        [q(&pt.x), q_mu(&self.config, &pt.x), dot(&pt.x, &pt.y)]
    }

    fn check_admissible(&self, pt: &OrbitPoint, tol: f64) -> Result<()> {
        for (index, r) in self.constraint_residuals(pt).iter().enumerate() {
            if r.norm() > tol {
                return Err(Error::ConstraintViolation { index, residual: r.norm() });
            }
        }
        Ok(())
    }

    fn constraint_jacobian(&self, pt: &OrbitPoint) -> DMatrix<C> {
        let mut j = DMatrix::zeros(3, 12);
        for i in 0..6 {
            j[(0, i)] = 2.0 * pt.x[i];
            j[(1, i)] = 2.0 * self.config.mu[i] * pt.x[i];
            j[(2, i)] = pt.y[i];
            j[(2, 6 + i)] = pt.x[i];
        }
        j
    }

    /// One minimum-norm Newton step `δ = −Jᴴ(JJᴴ)⁻¹ r` towards the constraint set.
    pub fn newton_step(&self, pt: &OrbitPoint) -> Result<OrbitPoint> {
        let j = self.constraint_jacobian(pt);
        let r = nalgebra::DVector::from_column_slice(&self.constraint_residuals(pt));
        let jjh = &j * j.adjoint();
        let w = jjh.lu().solve(&r).ok_or_else(|| Error::Singular("constraint Jacobian".into()))?;
        let delta = j.adjoint() * w;
        let z: Vec<C> = pt.coords().iter().zip(delta.iter()).map(|(a, d)| a - d).collect();
        Ok(OrbitPoint::from_coords(&z))
    }

    /// A unit-scale admissible point: `|x| = |y| = 1`, constraints ≤ 1e−12,
    /// `|q(y)| ≥ 1e−3`. Deterministic in `seed`.
    pub fn sample_admissible(&self, seed: u64) -> Result<OrbitPoint> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..MAX_ATTEMPTS {
            if let Some(pt) = self.try_project(OrbitPoint::random(&mut rng)) {
                return Ok(pt);
            }
        }
        Err(Error::NewtonFailure { attempts: MAX_ATTEMPTS })
    }

    fn try_project(&self, mut pt: OrbitPoint) -> Option<OrbitPoint> {
        let max_res = |s: &Self, p: &OrbitPoint| s.constraint_residuals(p).iter().map(|r| r.norm()).fold(0.0, f64::max);
        for _ in 0..100 {
            if max_res(self, &pt) <= 1e-15 {
                break;
            }
            let next = self.newton_step(&pt).ok()?;
            let step = (OrbitPoint::from_coords(
                &next.coords().iter().zip(pt.coords()).map(|(a, b)| a - b).collect::<Vec<_>>(),
            ))
            .norm();
            let limit = 0.5 * pt.norm();
            pt = if step > limit {
                let s = limit / step;
                let z: Vec<C> = pt.coords().iter().zip(next.coords()).map(|(a, b)| a + (b - a) * s).collect();
                OrbitPoint::from_coords(&z)
            } else {
                next
            };
        }
        let nx = pt.x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let ny = pt.y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nx < 1e-6 || ny < 1e-6 {
            return None;
        }
        pt.x = pt.x.map(|c| c / nx);
        pt.y = pt.y.map(|c| c / ny);
        for _ in 0..2 {
            pt = self.newton_step(&pt).ok()?;
        }
        let sum: f64 = self.constraint_residuals(&pt).iter().map(|r| r.norm()).sum();
        (sum <= ADMISSIBLE_TOL && q(&pt.y).norm() >= MIN_QY && pt.coords().iter().all(|c| c.is_finite())).then_some(pt)
    }

    /// Largest `|df_i(v)|` along the leaf directions `ẏ = x` and `ẏ_i = μ_i x_i`.
    pub fn leaf_invariance(&self, pt: &OrbitPoint) -> Result<(f64, f64)> {
        let p = pt.coords();
        let mut v1 = vec![zero(); 12];
        let mut v2 = vec![zero(); 12];
        for i in 0..6 {
            v1[6 + i] = pt.x[i];
            v2[6 + i] = self.config.mu[i] * pt.x[i];
        }
        let (mut r1, mut r2) = (0.0f64, 0.0f64);
        for f in &self.f {
            let g = f.gradient(&p)?;
            let d = |v: &[C]| g.iter().zip(v).map(|(a, b)| a * b).sum::<C>().norm();
            r1 = r1.max(d(&v1));
            r2 = r2.max(d(&v2));
        }
        Ok((r1, r2))
    }

    /// Reduced brackets `{f_i, f_j}` by coisotropic reduction along the
    /// constraints, exactly antisymmetric.
    pub fn commutation_matrix(&self, pt: &OrbitPoint) -> Result<DMatrix<C>> {
        let p = pt.coords();
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in i + 1..6 {
                let b = reduced_bracket(&self.chart, &self.f[i], &self.f[j], &self.constraints, &p, CONSTRAINT_TOL)?;
                m[(i, j)] = b.value;
                m[(j, i)] = -b.value;
            }
        }
        Ok(m)
    }

    /// The same brackets through the Lie–Poisson structure on so(6)* at `a = x ∧ y`.
    pub fn commutation_matrix_lie_poisson(&self, pt: &OrbitPoint) -> Result<DMatrix<C>> {
        let a = pt.a_matrix();
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in i + 1..6 {
                let b = lie_poisson_so6(&self.f_so6[i], &self.f_so6[j], &a)?;
                m[(i, j)] = b;
                m[(j, i)] = -b;
            }
        }
        Ok(m)
    }

    /// The three cleared conditions `P_w(z) = Σ w_i Π_{j≠i}(z − μ_j)` for
    /// `w = x², y², xy`, as ascending coefficient vectors.
    pub fn critical_polynomials(&self, pt: &OrbitPoint) -> [roots::Coeffs; 3] {
        let w = |f: &dyn Fn(usize) -> C| -> Vec<C> { (0..6).map(f).collect() };
        [
            roots::lagrange_combination(&w(&|i| pt.x[i] * pt.x[i]), &self.config.mu),
            roots::lagrange_combination(&w(&|i| pt.y[i] * pt.y[i]), &self.config.mu),
            roots::lagrange_combination(&w(&|i| pt.x[i] * pt.y[i]), &self.config.mu),
        ]
    }

    /// Finite `z` where all three conditions vanish, matched across the root
    /// sets within `tol·(1 + |z|)`. Identically vanishing conditions are
    /// skipped; if all three vanish the input is degenerate.
    pub fn critical_locus(&self, pt: &OrbitPoint, tol: f64) -> Result<Vec<C>> {
        let scale: f64 = pt.coords().iter().map(|c| c.norm_sqr()).sum();
        let weights: [Vec<C>; 3] = [
            pt.x.iter().map(|a| a * a).collect(),
            pt.y.iter().map(|a| a * a).collect(),
            pt.x.iter().zip(&pt.y).map(|(a, b)| a * b).collect(),
        ];
        let polys = self.critical_polynomials(pt);
        let sets: Vec<Vec<C>> = polys
            .iter()
            .zip(&weights)
            .filter(|(_, w)| w.iter().any(|c| c.norm() > 1e-14 * scale))
            .map(|(p, _)| roots::roots(&roots::trim(p, LEADING_TRIM)))
            .collect();
        if sets.is_empty() {
            return Err(Error::DegeneratePolynomials);
        }
        Ok(roots::common_roots(&sets, tol))
    }

    /// Null directions of the fibre-derivative of φ inside the reduced
    /// direction space, at threshold [`LEVI_TOL`].
    pub fn levi_null_directions(&self, pt: &OrbitPoint) -> Result<LeviNull> {
        self.levi_null_directions_with_tol(pt, LEVI_TOL)
    }

    /// The gradients of the `f_i` are restricted to the constraint tangent
    /// space orthogonal to the leaf directions; the reduced direction space is
    /// the Hermitian complement of `span{1, μ, μ²}`, the relation covectors.
    pub fn levi_null_directions_with_tol(&self, pt: &OrbitPoint, tol: f64) -> Result<LeviNull> {
        self.check_admissible(pt, CONSTRAINT_TOL)?;
        let p = pt.coords();
        let mut stack = DMatrix::zeros(5, 12);
        stack.view_mut((0, 0), (3, 12)).copy_from(&self.constraint_jacobian(pt));
        for i in 0..6 {
            stack[(3, 6 + i)] = pt.x[i].conj();
            stack[(4, 6 + i)] = (self.config.mu[i] * pt.x[i]).conj();
        }
        let tangent = null_basis(&stack.adjoint(), 7)?;
        let mut grads = DMatrix::zeros(12, 6);
        for (i, f) in self.f.iter().enumerate() {
            grads.set_column(i, &nalgebra::DVector::from_vec(f.gradient(&p)?));
        }
        let restricted = tangent.transpose() * grads;
        let mu = self.config.mu;
        let relations = DMatrix::from_fn(6, 3, |i, k| mu[i].powi(k as i32));
        let reduced = null_basis(&relations, 3)?;
        let m = &restricted * &reduced;
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
        let basis = (0..3)
            .filter(|&k| singular_values[k] <= tol)
            .map(|k| {
                let v = &reduced * v_t.row(k).adjoint();
                BaseDirection { dmu: std::array::from_fn(|i| v[i]) }
            })
            .collect();
        Ok(LeviNull { basis, singular_values })
    }
}

/// Orthonormal basis (columns) of the Hermitian complement of the column span
/// of `a`, whose dimension must be `expected`.
fn null_basis(a: &DMatrix<C>, expected: usize) -> Result<DMatrix<C>> {
    let n = a.nrows();
    let gram = a.adjoint() * a;
    let proj = DMatrix::<C>::identity(n, n)
        - a * gram.lu().try_inverse().ok_or(Error::DependentConstraints)? * a.adjoint();
    let eig = SymmetricEigen::new((&proj + proj.adjoint()) * C::new(0.5, 0.0));
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    if keep.len() != expected {
        return Err(Error::DependentConstraints);
    }
    Ok(DMatrix::from_fn(n, expected, |r, c| eig.eigenvectors[(r, keep[c])]))
}

/// Levi-null directions in the reduced direction space.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviNull {
    pub basis: Vec<BaseDirection>,
    /// Singular values of the restricted gradient map on the reduced space.
    pub singular_values: Vec<f64>,
}

impl LeviNull {
    pub fn reduced_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degenerate(&self) -> bool {
        !self.basis.is_empty()
    }
}

/// `x` admissible from `seed`, `y = λx`: a point of the critical family.
pub fn critical_point(system: &QuadricSystem, seed: u64, lambda: C) -> Result<OrbitPoint> {
    let base = system.sample_admissible(seed)?;
    Ok(OrbitPoint::new(base.x, base.x.map(|c| c * lambda)))
}

/// Transforms `(config, pt)` by `z ↦ (az + b)/(cz + d)` with
/// `x_i ↦ x_i / √(cμ_i + d)`, `y_i ↦ y_i / √(cμ_i + d)`, under which every
/// `f_i` scales by `1/(ad − bc)`.
pub fn mobius_transform(
    config: &HyperellipticConfig,
    pt: &OrbitPoint,
    m: [C; 4],
) -> Result<(HyperellipticConfig, OrbitPoint)> {
    let moved = config.mobius(m)?;
    let s: [C; 6] = std::array::from_fn(|i| (m[2] * config.mu[i] + m[3]).sqrt());
    let x = std::array::from_fn(|i| pt.x[i] / s[i]);
    let y = std::array::from_fn(|i| pt.y[i] / s[i]);
    Ok((moved, OrbitPoint::new(x, y)))
}

pub fn sample_admissible(config: &HyperellipticConfig, seed: u64) -> Result<OrbitPoint> {
    QuadricSystem::new(config.clone()).sample_admissible(seed)
}

pub fn commutation_matrix(config: &HyperellipticConfig, pt: &OrbitPoint) -> Result<DMatrix<C>> {
    QuadricSystem::new(config.clone()).commutation_matrix(pt)
}

pub fn leaf_invariance(config: &HyperellipticConfig, pt: &OrbitPoint) -> Result<(f64, f64)> {
    QuadricSystem::new(config.clone()).leaf_invariance(pt)
}

pub fn critical_locus(config: &HyperellipticConfig, pt: &OrbitPoint, tol: f64) -> Result<Vec<C>> {
    QuadricSystem::new(config.clone()).critical_locus(pt, tol)
}

pub fn levi_null_directions(config: &HyperellipticConfig, pt: &OrbitPoint) -> Result<LeviNull> {
    QuadricSystem::new(config.clone()).levi_null_directions(pt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn config() -> HyperellipticConfig {
        HyperellipticConfig::new([c(0.3, 0.1), c(-1.2, 0.4), c(0.8, -0.9), c(0.0, 0.0), c(1.0, 0.0), c(2.1, 1.3)])
            .unwrap()
    }

    /// Pairwise expansion with `(x_i y_j)² − 2 x_i y_j x_j y_i + (x_j y_i)²`.
    fn oracle_f(cfg: &HyperellipticConfig, pt: &OrbitPoint) -> [C; 6] {
        let mu = cfg.mu();
        let mut f = [zero(); 6];
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let (xi, xj, yi, yj) = (pt.x[i], pt.x[j], pt.y[i], pt.y[j]);
                let num = xi * xi * yj * yj - 2.0 * xi * yj * xj * yi + xj * xj * yi * yi;
                f[i] -= 4.0 * num / (mu[i] - mu[j]);
            }
        }
        f
    }

    #[test]
    fn rejects_coincident_points() {
        let mu = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)];
        assert!(HyperellipticConfig::new(mu).is_err());
    }

    #[test]
    fn hamiltonians_match_expansion() {
        let cfg = config();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pt = OrbitPoint::random(&mut rng);
            let (a, b) = (hamiltonians(&cfg, &pt), oracle_f(&cfg, &pt));
            for i in 0..6 {
                assert!((a[i] - b[i]).norm() <= 1e-12 * (1.0 + b[i].norm()));
            }
            let poly = QuadricSystem::new(cfg.clone());
            let v = poly.hamiltonian_fields()[2].value(&pt.coords()).unwrap();
            assert!((v - a[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn y_equal_x_kills_everything() {
        let cfg = config();
        let pt = OrbitPoint::new([c(0.4, 0.2); 6], [c(0.4, 0.2); 6]);
        assert!(hamiltonians(&cfg, &pt).iter().all(|f| *f == zero()));
        let r = linear_relations(&cfg, &pt);
        assert_eq!(r.r1, zero());
        assert!(phi_evaluate(&cfg, &pt, &BaseDirection::unit(1)) == zero());
    }

    #[test]
    fn relations_hold_off_the_constraints() {
        let cfg = config();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pt = OrbitPoint::random(&mut rng);
            assert!(linear_relations(&cfg, &pt).max() <= 1e-10);
        }
    }

    #[test]
    fn sampler_is_deterministic_fixed_point() {
        let sys = QuadricSystem::new(config());
        let a = sys.sample_admissible(11).unwrap();
        assert_eq!(a, sys.sample_admissible(11).unwrap());
        let s: f64 = sys.constraint_residuals(&a).iter().map(|r| r.norm()).sum();
        assert!(s <= 1e-12);
        let b = sys.newton_step(&a).unwrap();
        let moved: f64 = a.coords().iter().zip(b.coords()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(moved < 1e-12);
    }

    #[test]
    fn leaf_directions() {
        let sys = QuadricSystem::new(config());
        let pt = sys.sample_admissible(2).unwrap();
        let (r1, r2) = sys.leaf_invariance(&pt).unwrap();
        assert!(r1 <= 1e-10 && r2 <= 1e-10, "{r1} {r2}");
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let (_, n2) = sys.leaf_invariance(&OrbitPoint::random(&mut rng)).unwrap();
        assert!(n2 > 1e-4);
    }

    #[test]
    fn commutation_two_routes() {
        let sys = QuadricSystem::new(config());
        let pt = sys.sample_admissible(4).unwrap();
        let a = sys.commutation_matrix(&pt).unwrap();
        let b = sys.commutation_matrix_lie_poisson(&pt).unwrap();
        assert!(a.iter().all(|v| v.norm() <= 1e-8));
        assert!((&a - &b).iter().all(|v| v.norm() <= 1e-10));
        assert!(a.diagonal().iter().all(|v| *v == zero()));
    }

    #[test]
    fn commutation_requires_admissible_point() {
        let sys = QuadricSystem::new(config());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let pt = OrbitPoint::random(&mut rng);
        assert!(matches!(sys.commutation_matrix(&pt), Err(Error::ConstraintViolation { .. })));
    }

    #[test]
    fn phi_contracts_hamiltonians() {
        let cfg = config();
        let sys = QuadricSystem::new(cfg.clone());
        let pt = sys.sample_admissible(8).unwrap();
        let f = hamiltonians(&cfg, &pt);
        assert_eq!(phi_evaluate(&cfg, &pt, &BaseDirection::unit(4)), f[4]);
        assert_eq!(phi_evaluate(&cfg, &pt, &BaseDirection { dmu: [zero(); 6] }), zero());
    }

    #[test]
    fn critical_family_is_detected_both_ways() {
        let sys = QuadricSystem::new(config());
        let pt = critical_point(&sys, 6, c(0.7, -0.4)).unwrap();
        assert!(!sys.critical_locus(&pt, 1e-6).unwrap().is_empty());
        assert_eq!(sys.levi_null_directions(&pt).unwrap().reduced_dim(), 3);
        let generic = sys.sample_admissible(6).unwrap();
        assert!(sys.critical_locus(&generic, 1e-6).unwrap().is_empty());
        assert_eq!(sys.levi_null_directions(&generic).unwrap().reduced_dim(), 0);
    }

    #[test]
    fn disjoint_supports() {
        let cfg = HyperellipticConfig::from_real([-2.0, -1.0, 0.5, 1.5, 3.0, 4.0]).unwrap();
        let sys = QuadricSystem::new(cfg.clone());
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let pt = OrbitPoint::new(
            [one, i, zero(), zero(), zero(), zero()],
            [zero(), zero(), one, i, zero(), zero()],
        );
        let mut found = sys.critical_locus(&pt, 1e-8).unwrap();
        found.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(found.len(), 2);
        assert!((found[0] - 3.0).norm() < 1e-10 && (found[1] - 4.0).norm() < 1e-10);
    }

    #[test]
    fn zero_point_is_degenerate() {
        let sys = QuadricSystem::new(config());
        let pt = OrbitPoint::new([zero(); 6], [zero(); 6]);
        assert!(matches!(sys.critical_locus(&pt, 1e-6), Err(Error::DegeneratePolynomials)));
    }

    #[test]
    fn mobius_rescales_hamiltonians() {
        let cfg = config();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let pt = OrbitPoint::random(&mut rng);
        let m = [c(1.0, 0.2), c(0.5, 0.0), c(0.3, -0.1), c(1.1, 0.0)];
        let det = m[0] * m[3] - m[1] * m[2];
        let (cfg2, pt2) = mobius_transform(&cfg, &pt, m).unwrap();
        let (f, g) = (hamiltonians(&cfg, &pt), hamiltonians(&cfg2, &pt2));
        for k in 0..6 {
            assert!((g[k] * det - f[k]).norm() < 1e-10 * (1.0 + f[k].norm()));
        }
    }
}
