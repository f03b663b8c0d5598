//! Constant Poisson structures: canonical brackets, Hamiltonian vector fields,
//! the Lie–Poisson bracket on so(6)* and first-class constraint reduction.
//!
//! Conventions, fixed once for the whole crate: for a chart with symplectic
//! matrix `W` (`ω(∂_i, ∂_j) = W_ij`) the Hamiltonian vector field of `h` solves
//! `ω(X_h, ·) = dh`, i.e. `Wᵀ X_h = ∇h`, and
//!
//! ```text
//! {h₁, h₂} = ω(X_h₁, X_h₂) = ∇h₁ᵀ P ∇h₂,   P = W⁻ᵀ,
//! ```
//!
//! so `{x, ξ} = 1` for `ω = dx∧dξ` and `dg(X_h) = {g, h}`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::field::{Field, ScalarField};
use super::forms::FormValue;
use super::jet::{Jet, Scalar};
use super::poly::Polynomial;
use crate::error::{Error, Result};

const STRUCTURE_TOL: f64 = 1e-12;

/// A constant bivector `P`, possibly degenerate (e.g. fibre-only on a product chart).
#[derive(Clone, Debug)]
pub struct PoissonTensor {
    matrix: DMatrix<f64>,
    entries: Arc<Vec<(usize, usize, f64)>>,
}

impl PoissonTensor {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let defect = (&matrix + matrix.transpose()).amax();
        if defect > STRUCTURE_TOL * matrix.amax().max(1.0) {
            return Err(Error::NotAntisymmetric(defect));
        }
        let n = matrix.nrows();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| matrix[(i, j)] != 0.0)
            .map(|(i, j)| (i, j, matrix[(i, j)]))
            .collect();
        Ok(PoissonTensor { matrix, entries: Arc::new(entries) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Embeds into a larger chart whose coordinates `offset..offset+dim` carry this tensor.
    pub fn embedded(&self, total: usize, offset: usize) -> Self {
        let mut m = DMatrix::zeros(total, total);
        m.view_mut((offset, offset), (self.dim(), self.dim())).copy_from(&self.matrix);
        PoissonTensor::new(m).expect("embedding preserves antisymmetry")
    }

    pub fn pair<S: Scalar>(&self, a: &[S], b: &[S]) -> S {
        let mut acc = S::zero();
        for &(i, j, p) in self.entries.iter() {
            acc += a[i] * b[j] * S::from_real(p);
        }
        acc
    }

    /// `P v`.
    pub fn apply<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim()];
        for &(i, j, p) in self.entries.iter() {
            out[i] += v[j] * S::from_real(p);
        }
        out
    }

    pub fn bracket_at<S: Scalar>(&self, h1: &ScalarField<S>, h2: &ScalarField<S>, p: &[S]) -> Result<S> {
        Ok(self.pair(&h1.gradient(p)?, &h2.gradient(p)?))
    }

    /// `{h₁, h₂}` as a field. Exact polynomial when both inputs are polynomials;
    /// otherwise one derivative order below the inputs (at most 1).
    pub fn bracket<S: Scalar>(&self, h1: &ScalarField<S>, h2: &ScalarField<S>) -> ScalarField<S> {
        if let (Some(a), Some(b)) = (h1.as_polynomial(), h2.as_polynomial()) {
            return self.polynomial_bracket(a, b).into_field();
        }
        ScalarField::new(Bracket { tensor: self.clone(), f: h1.clone(), g: h2.clone() })
    }

    pub fn polynomial_bracket<S: Scalar>(&self, a: &Polynomial<S>, b: &Polynomial<S>) -> Polynomial<S> {
        let n = self.dim();
        let da: Vec<_> = (0..n).map(|i| a.derivative(i)).collect();
        let db: Vec<_> = (0..n).map(|i| b.derivative(i)).collect();
        let mut acc = Polynomial::zero(n);
        for &(i, j, p) in self.entries.iter() {
            if da[i].is_zero() || db[j].is_zero() {
                continue;
            }
            acc = &acc + &(&da[i] * &db[j]).scale(S::from_real(p));
        }
        acc
    }
}

struct Bracket<S: Scalar> {
    tensor: PoissonTensor,
    f: ScalarField<S>,
    g: ScalarField<S>,
}

impl<S: Scalar> Field<S> for Bracket<S> {
    fn dim(&self) -> usize {
        self.tensor.dim()
    }
    fn max_order(&self) -> Option<usize> {
        let m = self.f.max_order()?.min(self.g.max_order()?);
        m.checked_sub(1).map(|m| m.min(1))
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let n = self.dim();
        let jf = self.f.jet(point, order + 1).expect("order checked by max_order");
        let jg = self.g.jet(point, order + 1).expect("order checked by max_order");
        let value = self.tensor.pair(&jf.grad, &jg.grad);
        let grad = if order >= 1 {
            let pg = self.tensor.apply(&jg.grad);
            let pf: Vec<S> = {
                // Pᵀ∇f = −P∇f
                self.tensor.apply(&jf.grad).into_iter().map(|v| -v).collect()
            };
            (0..n)
                .map(|k| {
                    let mut acc = S::zero();
                    for i in 0..n {
                        acc += jf.hess_at(i, k) * pg[i] + pf[i] * jg.hess_at(i, k);
                    }
                    acc
                })
                .collect()
        } else {
            Vec::new()
        };
        Jet::from_parts(n, value, grad, Vec::new(), order.min(1))
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        let df = self.f.exact_partial(index)?;
        let dg = self.g.exact_partial(index)?;
        Some(self.tensor.bracket(&df, &self.g).plus(&self.tensor.bracket(&self.f, &dg)))
    }
}

/// Even-dimensional chart with a constant symplectic pairing and optional
/// compatible complex structure.
#[derive(Clone, Debug)]
pub struct PoissonChart {
    omega: DMatrix<f64>,
    tensor: PoissonTensor,
    jmat: Option<DMatrix<f64>>,
}

impl PoissonChart {
    pub fn new(omega: DMatrix<f64>) -> Result<Self> {
        let n = omega.nrows();
        if n == 0 || !n.is_multiple_of(2) || !omega.is_square() {
            return Err(Error::InvalidParameters(format!("symplectic chart needs even positive dimension, got {n}")));
        }
        let defect = (&omega + omega.transpose()).amax();
        if defect > STRUCTURE_TOL * omega.amax().max(1.0) {
            return Err(Error::NotAntisymmetric(defect));
        }
        let p = omega
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::Singular("symplectic matrix".into()))?;
        let p = (&p - p.transpose()) * 0.5;
        Ok(PoissonChart { omega, tensor: PoissonTensor::new(p)?, jmat: None })
    }

    /// `ω = Σ dx_k∧dy_k` in coordinates `(x₁…x_n, y₁…y_n)`.
    pub fn canonical(n: usize) -> Self {
        let mut w = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            w[(k, n + k)] = 1.0;
            w[(n + k, k)] = -1.0;
        }
        Self::new(w).expect("canonical form is symplectic")
    }

    /// `ω = Σ dx_k∧dξ_k` in interleaved coordinates `(x₁, ξ₁, x₂, ξ₂, …)`.
    pub fn darboux_pairs(n: usize) -> Self {
        let mut w = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            w[(2 * k, 2 * k + 1)] = 1.0;
            w[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self::new(w).expect("Darboux form is symplectic")
    }

    /// Attaches a constant complex structure; requires `J² = −1` and `ωᵀJ` symmetric.
    pub fn with_complex_structure(mut self, j: DMatrix<f64>) -> Result<Self> {
        check_complex_structure(&j, self.dim())?;
        let c = self.omega.transpose() * &j;
        let defect = (&c - c.transpose()).amax();
        if defect > 1e-10 {
            return Err(Error::InvalidParameters(format!("complex structure not compatible with ω (defect {defect:.3e})")));
        }
        self.jmat = Some(j);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn omega_form(&self) -> FormValue<f64> {
        FormValue::from_matrix(&self.omega, STRUCTURE_TOL).expect("validated antisymmetric")
    }

    pub fn tensor(&self) -> &PoissonTensor {
        &self.tensor
    }

    pub fn jmat(&self) -> Option<&DMatrix<f64>> {
        self.jmat.as_ref()
    }

    pub fn bracket_at<S: Scalar>(&self, h1: &ScalarField<S>, h2: &ScalarField<S>, p: &[S]) -> Result<S> {
        self.check(h1)?;
        self.check(h2)?;
        self.tensor.bracket_at(h1, h2, p)
    }

    pub fn bracket<S: Scalar>(&self, h1: &ScalarField<S>, h2: &ScalarField<S>) -> ScalarField<S> {
        self.tensor.bracket(h1, h2)
    }

    /// Solves `Wᵀ X = ∇h` at `p`.
    pub fn hamiltonian_vector_field<S: Scalar>(&self, h: &ScalarField<S>, p: &[S]) -> Result<Vec<S>> {
        self.check(h)?;
        let g = DVector::from_vec(h.gradient(p)?);
        let wt = self.omega.transpose().map(S::from_real);
        let x = wt.lu().solve(&g).ok_or_else(|| Error::Singular("symplectic matrix".into()))?;
        Ok(x.iter().copied().collect())
    }

    fn check<S: Scalar>(&self, h: &ScalarField<S>) -> Result<()> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: h.dim() });
        }
        Ok(())
    }
}

pub fn check_complex_structure(j: &DMatrix<f64>, dim: usize) -> Result<()> {
    if j.nrows() != dim || j.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: j.nrows() });
    }
    let defect = (j * j + DMatrix::identity(dim, dim)).amax();
    if defect > 1e-10 {
        return Err(Error::InvalidParameters(format!("J² ≠ −1 (defect {defect:.3e})")));
    }
    Ok(())
}

/// Index of the coordinate `a_ij` (`i < j`) among the 15 coordinates on so(6)*.
pub fn so6_index(i: usize, j: usize) -> usize {
    assert!(i < j && j < 6);
    (0..i).map(|r| 5 - r).sum::<usize>() + (j - i - 1)
}

/// Pairs `(i, j)`, `i < j`, in coordinate order.
pub fn so6_pairs() -> Vec<(usize, usize)> {
    (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect()
}

pub fn so6_coordinates<S: Scalar>(a: &DMatrix<S>) -> Vec<S> {
    so6_pairs().into_iter().map(|(i, j)| a[(i, j)]).collect()
}

/// `a_ij = x_i y_j − x_j y_i` as polynomials on the canonical chart `(x, y) ∈ 𝕂¹²`.
pub fn so6_moment_polynomials<S: Scalar>() -> Vec<Polynomial<S>> {
    let c = |k| Polynomial::<S>::coordinate(12, k);
    so6_pairs()
        .into_iter()
        .map(|(i, j)| &(&c(i) * &c(6 + j)) - &(&c(j) * &c(6 + i)))
        .collect()
}

/// `{F, G}(a)` from the so(6) structure constants
/// `{a_ij, a_kl} = −δ_jk a_il + δ_jl a_ik + δ_ik a_jl − δ_il a_jk`.
pub fn lie_poisson_so6<S: Scalar>(f: &ScalarField<S>, g: &ScalarField<S>, a: &DMatrix<S>) -> Result<S> {
    if a.nrows() != 6 || a.ncols() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, found: a.nrows() });
    }
    let scale = a.iter().map(|c| c.modulus()).fold(1.0, f64::max);
    let defect = (a + a.transpose()).iter().map(|c| c.modulus()).fold(0.0, f64::max);
    if defect > STRUCTURE_TOL * scale {
        return Err(Error::NotAntisymmetric(defect));
    }
    let coords = so6_coordinates(a);
    let gf = f.gradient(&coords)?;
    let gg = g.gradient(&coords)?;
    let pairs = so6_pairs();
    let d = |p: usize, q: usize| if p == q { S::one() } else { S::zero() };
    let mut acc = S::zero();
    for (u, &(i, j)) in pairs.iter().enumerate() {
        if gf[u] == S::zero() {
            continue;
        }
        for (v, &(k, l)) in pairs.iter().enumerate() {
            if gg[v] == S::zero() {
                continue;
            }
            let s = -d(j, k) * a[(i, l)] + d(j, l) * a[(i, k)] + d(i, k) * a[(j, l)] - d(i, l) * a[(j, k)];
            acc += gf[u] * gg[v] * s;
        }
    }
    Ok(acc)
}

/// Constraint functions `c₁ … c_r` on a chart.
#[derive(Clone, Debug)]
pub struct ConstraintSet<S: Scalar> {
    pub constraints: Vec<ScalarField<S>>,
}

impl<S: Scalar> ConstraintSet<S> {
    pub fn new(constraints: Vec<ScalarField<S>>) -> Self {
        ConstraintSet { constraints }
    }

    pub fn empty() -> Self {
        ConstraintSet { constraints: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Constraint values at `p`.
    pub fn values(&self, p: &[S]) -> Result<Vec<S>> {
        self.constraints.iter().map(|c| c.value(p)).collect()
    }

    /// Jacobian rows `∇c_a(p)`.
    pub fn jacobian(&self, p: &[S]) -> Result<DMatrix<S>> {
        let n = p.len();
        let mut m = DMatrix::zeros(self.len(), n);
        for (a, c) in self.constraints.iter().enumerate() {
            let g = c.gradient(p)?;
            m.row_mut(a).copy_from_slice(&g);
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBracket<S> {
    pub value: S,
    /// Largest `|{h_k, c_a}(p)|`: how far the inputs are from constraint-invariant.
    pub invariance_residual: f64,
}

/// Relative singular-value threshold for constraint independence.
pub const RANK_TOL: f64 = 1e-10;

/// Bracket on the coisotropic reduction by first-class constraints.
///
/// Checks that `p` is admissible (`|c_a(p)| ≤ tol`), that the constraint
/// gradients are independent, and that `|{c_a, c_b}(p)| ≤ tol`. For inputs
/// invariant along the constraint flows the ambient bracket equals the
/// reduced one; the invariance residual is reported alongside.
pub fn reduced_bracket<S: Scalar>(
    chart: &PoissonChart,
    h1: &ScalarField<S>,
    h2: &ScalarField<S>,
    constraints: &ConstraintSet<S>,
    p: &[S],
    tol: f64,
) -> Result<ReducedBracket<S>> {
    let value = chart.bracket_at(h1, h2, p)?;
    if constraints.is_empty() {
        return Ok(ReducedBracket { value, invariance_residual: 0.0 });
    }
    for (index, v) in constraints.values(p)?.into_iter().enumerate() {
        if v.modulus() > tol {
            return Err(Error::ConstraintViolation { index, residual: v.modulus() });
        }
    }
    let jac = constraints.jacobian(p)?;
    let sv = jac.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 || sv.min() <= RANK_TOL * smax {
        return Err(Error::DependentConstraints);
    }
    let grads: Vec<Vec<S>> = jac.row_iter().map(|r| r.iter().copied().collect()).collect();
    for i in 0..grads.len() {
        for j in i + 1..grads.len() {
            let b = chart.tensor().pair(&grads[i], &grads[j]).modulus();
            if b > tol {
                return Err(Error::SecondClass { i, j, bracket: b });
            }
        }
    }
    let mut invariance_residual: f64 = 0.0;
    for h in [h1, h2] {
        let gh = h.gradient(p)?;
        for gc in &grads {
            invariance_residual = invariance_residual.max(chart.tensor().pair(&gh, gc).modulus());
        }
    }
    Ok(ReducedBracket { value, invariance_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(n: usize, k: usize) -> ScalarField<f64> {
        ScalarField::coordinate(n, k)
    }

    #[test]
    fn darboux_normalization() {
        let ch = PoissonChart::canonical(1);
        assert_eq!(ch.bracket_at(&c(2, 0), &c(2, 1), &[0.4, -0.2]).unwrap(), 1.0);
        assert_eq!(ch.hamiltonian_vector_field(&c(2, 1), &[0.4, -0.2]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn oscillator_field_is_rotation() {
        let ch = PoissonChart::canonical(1);
        let x = Polynomial::<f64>::coordinate(2, 0);
        let xi = Polynomial::<f64>::coordinate(2, 1);
        let h = (&(&x * &x) + &(&xi * &xi)).scale(0.5).into_field();
        let v = ch.hamiltonian_vector_field(&h, &[0.3, 0.7]).unwrap();
        assert!((v[0] - 0.7).abs() < 1e-15 && (v[1] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_structures() {
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(PoissonChart::new(bad), Err(Error::NotAntisymmetric(_))));
        assert!(matches!(PoissonChart::new(DMatrix::zeros(2, 2)), Err(Error::Singular(_))));
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(PoissonChart::canonical(1).with_complex_structure(j.clone()).is_ok());
        assert!(PoissonChart::canonical(1).with_complex_structure(j * 2.0).is_err());
    }

    #[test]
    fn so6_structure_constants() {
        let one = |i, j| {
            let mut e = vec![0u32; 15];
            e[so6_index(i, j)] = 1;
            Polynomial::<f64>::monomial(15, e, 1.0).into_field()
        };
        let mut a = DMatrix::<f64>::zeros(6, 6);
        for (n, (i, j)) in so6_pairs().into_iter().enumerate() {
            a[(i, j)] = 0.1 * (n as f64 + 1.0);
            a[(j, i)] = -a[(i, j)];
        }
        assert_eq!(lie_poisson_so6(&one(0, 1), &one(2, 3), &a).unwrap(), 0.0);
        assert_eq!(lie_poisson_so6(&one(0, 1), &one(1, 2), &a).unwrap(), -a[(0, 2)]);
        let mut sym = a.clone();
        sym[(1, 0)] = 1.0;
        assert!(matches!(lie_poisson_so6(&one(0, 1), &one(1, 2), &sym), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn reduced_bracket_errors_and_centrality() {
        let ch = PoissonChart::canonical(2);
        let x1 = Polynomial::<f64>::coordinate(4, 0);
        let y1 = Polynomial::<f64>::coordinate(4, 2);
        // c = x₁, first class; h = x₂ y₂ invariant
        let cs = ConstraintSet::new(vec![x1.clone().into_field()]);
        let p = [0.0, 0.5, 0.0, -0.2];
        let r = reduced_bracket(&ch, &cs.constraints[0], &y1.clone().into_field(), &cs, &p, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        let h = (&Polynomial::coordinate(4, 1) * &Polynomial::coordinate(4, 3)).into_field();
        let r = reduced_bracket(&ch, &cs.constraints[0], &h, &cs, &p, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        let off = [0.1, 0.5, 0.0, -0.2];
        assert!(matches!(reduced_bracket(&ch, &h, &h, &cs, &off, 1e-12), Err(Error::ConstraintViolation { index: 0, .. })));
        let second = ConstraintSet::new(vec![x1.clone().into_field(), y1.into_field()]);
        assert!(matches!(reduced_bracket(&ch, &h, &h, &second, &p, 1e-12), Err(Error::SecondClass { .. })));
        let dep = ConstraintSet::new(vec![x1.clone().into_field(), x1.scale(2.0).into_field()]);
        assert!(matches!(reduced_bracket(&ch, &h, &h, &dep, &p, 1e-12), Err(Error::DependentConstraints)));
    }

    #[test]
    fn complex_points_give_holomorphic_brackets() {
        let ch = PoissonChart::canonical(1);
        let x = Polynomial::<Complex64>::coordinate(2, 0);
        let y = Polynomial::<Complex64>::coordinate(2, 1);
        let b = ch.bracket(&(&x * &x).into_field(), &y.into_field());
        let p = [Complex64::new(0.2, 1.1), Complex64::new(-0.4, 0.3)];
        assert!((b.value(&p).unwrap() - p[0] * 2.0).norm() < 1e-15);
    }
}
