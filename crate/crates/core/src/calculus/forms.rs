//! Differential forms at a point and forms with field coefficients.
//!
//! A degree-k form on an n-dimensional chart is stored as one coefficient per
//! increasing index tuple `i₁ < … < i_k`, in lexicographic order. Wedge and
//! evaluation use the determinant convention, so `(dx∧dξ)(∂x, ∂ξ) = 1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::ScalarField;
use super::jet::Scalar;
use crate::error::{Error, Result};

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographic rank of an increasing tuple among all k-subsets of 0..n.
fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut prev = 0;
    for (i, &c) in idx.iter().enumerate() {
        for j in prev..c {
            r += binom(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    r
}

/// All increasing k-tuples of 0..n in lexicographic order.
pub fn basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(n, k, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Sorts `idx` in place and returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormValue<S> {
    dim: usize,
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> FormValue<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormValue { dim, degree, coeffs: vec![S::zero(); binom(dim, degree)] }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        FormValue { dim, degree: 0, coeffs: vec![value] }
    }

    /// `dx_i` as a 1-form.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.coeffs[i] = S::one();
        f
    }

    /// Sum of `c · dx_{i₁}∧…∧dx_{i_k}` over arbitrary (not necessarily sorted) tuples.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(Vec<usize>, S)]) -> Self {
        let mut f = Self::zero(dim, degree);
        for (idx, c) in terms {
            f.add_component(idx, *c);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `dx_{i₁}∧…∧dx_{i_k}` for any tuple, with permutation sign.
    pub fn component(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.degree);
        let mut sorted = idx.to_vec();
        match sort_sign(&mut sorted) {
            0 => S::zero(),
            s => self.coeffs[rank(self.dim, &sorted)] * S::from_real(s as f64),
        }
    }

    pub fn add_component(&mut self, idx: &[usize], c: S) {
        assert_eq!(idx.len(), self.degree);
        let mut sorted = idx.to_vec();
        let s = sort_sign(&mut sorted);
        if s != 0 {
            self.coeffs[rank(self.dim, &sorted)] += c * S::from_real(s as f64);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, S)> + '_ {
        basis(self.dim, self.degree).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn scale(&self, k: S) -> Self {
        FormValue { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect();
        FormValue { dim: self.dim, degree: self.degree, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-S::one()))
    }

    /// Exterior product. A result of degree above the chart dimension is the
    /// (empty) zero form.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        if out.coeffs.is_empty() {
            return Ok(out);
        }
        let bb = basis(other.dim, other.degree);
        for (ia, a) in self.iter() {
            if a == S::zero() {
                continue;
            }
            for (ib, &b) in bb.iter().zip(&other.coeffs) {
                if b == S::zero() {
                    continue;
                }
                let idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                out.add_component(&idx, a * b);
            }
        }
        Ok(out)
    }

    /// k-fold exterior power.
    pub fn power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::scalar(self.dim, S::one());
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Value on tangent vectors `v₁ … v_k`: `Σ_I c_I det(v_r[I_s])`.
    pub fn evaluate(&self, vectors: &[Vec<S>]) -> Result<S> {
        if vectors.len() != self.degree {
            return Err(Error::InvalidParameters(format!(
                "degree-{} form evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let k = self.degree;
        let mut acc = S::zero();
        for (idx, c) in self.iter() {
            if c == S::zero() {
                continue;
            }
            let m = DMatrix::from_fn(k, k, |r, s| vectors[r][idx[s]]);
            acc += c * m.determinant();
        }
        Ok(acc)
    }

    /// Largest coefficient modulus.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    /// Matrix `M_ij = α(∂_i, ∂_j)` of a 2-form.
    pub fn to_matrix(&self) -> DMatrix<S> {
        assert_eq!(self.degree, 2);
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (idx, c) in self.iter() {
            m[(idx[0], idx[1])] = c;
            m[(idx[1], idx[0])] = -c;
        }
        m
    }

    /// 2-form with `α(∂_i, ∂_j) = M_ij`; `M` must be antisymmetric to `tol`.
    pub fn from_matrix(m: &DMatrix<S>, tol: f64) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
        }
        let defect = (m + m.transpose()).iter().map(|c| c.modulus()).fold(0.0, f64::max);
        if defect > tol {
            return Err(Error::NotAntisymmetric(defect));
        }
        let mut f = Self::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                f.coeffs[rank(n, &[i, j])] = m[(i, j)];
            }
        }
        Ok(f)
    }
}

impl FormValue<f64> {
    pub fn to_complex(&self) -> FormValue<Complex64> {
        FormValue {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }
}

/// A differential form whose coefficients are scalar fields on the chart.
#[derive(Clone, Debug)]
pub struct FormField<S: Scalar> {
    dim: usize,
    degree: usize,
    terms: Vec<(Vec<usize>, ScalarField<S>)>,
}

impl<S: Scalar> FormField<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        FormField { dim, degree, terms: Vec::new() }
    }

    /// `Σ c · dx_I`; tuples need not be sorted.
    pub fn new(dim: usize, degree: usize, terms: Vec<(Vec<usize>, ScalarField<S>)>) -> Result<Self> {
        for (idx, c) in &terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(Error::InvalidParameters(format!("bad basis tuple {idx:?}")));
            }
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
            }
        }
        Ok(FormField { dim, degree, terms }.normalized())
    }

    pub fn constant(value: &FormValue<S>) -> Self {
        let terms = value
            .iter()
            .filter(|(_, c)| *c != S::zero())
            .map(|(idx, c)| (idx, ScalarField::constant(value.dim, c)))
            .collect();
        FormField { dim: value.dim, degree: value.degree, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Vec<usize>, ScalarField<S>)] {
        &self.terms
    }

    fn normalized(self) -> Self {
        let mut grouped: BTreeMap<Vec<usize>, Vec<(S, ScalarField<S>)>> = BTreeMap::new();
        for (mut idx, c) in self.terms {
            let s = sort_sign(&mut idx);
            if s != 0 {
                grouped.entry(idx).or_default().push((S::from_real(s as f64), c));
            }
        }
        let terms = grouped
            .into_iter()
            .map(|(idx, parts)| {
                let field = if parts.len() == 1 && parts[0].0 == S::one() {
                    parts.into_iter().next().unwrap().1
                } else {
                    ScalarField::linear_combination(self.dim, parts)
                };
                (idx, field)
            })
            .collect();
        FormField { dim: self.dim, degree: self.degree, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        FormField { dim: self.dim, degree: self.degree, terms }.normalized()
    }

    pub fn scale(&self, k: S) -> Self {
        let terms = self.terms.iter().map(|(i, c)| (i.clone(), c.scale(k))).collect();
        FormField { dim: self.dim, degree: self.degree, terms }
    }

    pub fn eval(&self, point: &[S]) -> Result<FormValue<S>> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        let mut out = FormValue::zero(self.dim, self.degree);
        for (idx, c) in &self.terms {
            out.add_component(idx, c.value(point)?);
        }
        Ok(out)
    }

    /// Exterior derivative `Σ ∂_k c_I dx_k∧dx_I`. Each application costs one
    /// derivative order of the coefficients.
    pub fn d(&self) -> Self {
        let mut terms = Vec::new();
        for (idx, c) in &self.terms {
            for k in 0..self.dim {
                if idx.contains(&k) {
                    continue;
                }
                let mut t = Vec::with_capacity(idx.len() + 1);
                t.push(k);
                t.extend_from_slice(idx);
                terms.push((t, c.partial_derivative(k)));
            }
        }
        FormField { dim: self.dim, degree: self.degree + 1, terms }.normalized()
    }
}

/// `dα` at `p`.
pub fn exterior_derivative<S: Scalar>(form: &FormField<S>, p: &[S]) -> Result<FormValue<S>> {
    form.d().eval(p)
}
