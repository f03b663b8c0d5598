//! Scalar fields on flat charts with exact derivative access.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::jet::{Jet, Scalar};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// A smooth scalar function on a flat coordinate chart.
///
/// Implementors return jets up to `max_order()`; `None` means the field was
/// differentiated past what its representation supports and has no values.
/// Callers go through [`ScalarField::jet`], which validates dimension and order.
pub trait Field<S: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn max_order(&self) -> Option<usize>;
    /// `point.len() == dim()` and `order <= max_order()` are guaranteed.
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S>;
    /// Exact partial derivative as a field, if the representation has one.
    fn partial(&self, _index: usize) -> Option<ScalarField<S>> {
        None
    }
    fn as_polynomial(&self) -> Option<&Polynomial<S>> {
        None
    }
}

#[derive(Clone)]
pub struct ScalarField<S>(Arc<dyn Field<S>>);

impl<S: Scalar> std::fmt::Debug for ScalarField<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarField(dim={}, order={:?})", self.dim(), self.max_order())
    }
}

struct ClosureField<S, F> {
    dim: usize,
    f: F,
    _s: std::marker::PhantomData<fn() -> S>,
}

impl<S: Scalar, F> Field<S> for ClosureField<S, F>
where
    F: Fn(&[Jet<S>]) -> Jet<S> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn max_order(&self) -> Option<usize> {
        Some(2)
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let vars = Jet::seed(point, order);
        (self.f)(&vars).truncate(order)
    }
}

struct Partial<S: Scalar> {
    inner: ScalarField<S>,
    index: usize,
}

impl<S: Scalar> Field<S> for Partial<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn max_order(&self) -> Option<usize> {
        self.inner.max_order()?.checked_sub(1).map(|m| m.min(1))
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let n = self.dim();
        let j = self.inner.0.eval_jet(point, order + 1);
        let value = j.grad[self.index];
        let grad = if order >= 1 { (0..n).map(|k| j.hess_at(self.index, k)).collect() } else { vec![] };
        Jet::from_parts(n, value, grad, Vec::new(), order.min(1))
    }
}

struct Linear<S: Scalar> {
    dim: usize,
    terms: Vec<(S, ScalarField<S>)>,
    offset: S,
}

impl<S: Scalar> Field<S> for Linear<S> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn max_order(&self) -> Option<usize> {
        self.terms.iter().try_fold(usize::MAX, |m, (_, f)| f.max_order().map(|o| o.min(m)))
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let mut acc = Jet::constant(self.dim, self.offset, order);
        for (k, f) in &self.terms {
            acc = acc + f.0.eval_jet(point, order).scale(*k);
        }
        acc
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        let terms = self
            .terms
            .iter()
            .map(|(k, f)| f.0.partial(index).map(|p| (*k, p)))
            .collect::<Option<Vec<_>>>()?;
        Some(ScalarField::linear_combination(self.dim, terms))
    }
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
    Conj,
}

struct PartField<S: Scalar> {
    inner: ScalarField<S>,
    part: Part,
}

impl<S: Scalar> PartField<S> {
    fn map(&self, x: S) -> S {
        match self.part {
            Part::Re => S::from_real(x.real()),
            Part::Im => S::from_real(x.imaginary()),
            Part::Conj => x.conjugate(),
        }
    }
}

impl<S: Scalar> Field<S> for PartField<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn max_order(&self) -> Option<usize> {
        self.inner.max_order()
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let j = self.inner.0.eval_jet(point, order);
        Jet::from_parts(
            j.dim(),
            self.map(j.value),
            j.grad.iter().map(|&g| self.map(g)).collect(),
            j.hess.iter().map(|&h| self.map(h)).collect(),
            j.order,
        )
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        let p = self.inner.0.partial(index)?;
        Some(ScalarField::new(PartField { inner: p, part: self.part }))
    }
}

struct Product<S: Scalar> {
    a: ScalarField<S>,
    b: ScalarField<S>,
}

impl<S: Scalar> Field<S> for Product<S> {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn max_order(&self) -> Option<usize> {
        Some(self.a.max_order()?.min(self.b.max_order()?))
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        self.a.0.eval_jet(point, order) * self.b.0.eval_jet(point, order)
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        let da = self.a.exact_partial(index)?;
        let db = self.b.exact_partial(index)?;
        Some(da.times(&self.b).plus(&self.a.times(&db)))
    }
}

/// A field on `offset..offset+inner.dim()` of a larger chart.
struct Embedded<S: Scalar> {
    inner: ScalarField<S>,
    total: usize,
    offset: usize,
}

impl<S: Scalar> Field<S> for Embedded<S> {
    fn dim(&self) -> usize {
        self.total
    }
    fn max_order(&self) -> Option<usize> {
        self.inner.max_order()
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let n = self.inner.dim();
        let (t, o) = (self.total, self.offset);
        let j = self.inner.0.eval_jet(&point[o..o + n], order);
        let mut out = Jet::constant(t, j.value, j.order);
        if j.order >= 1 {
            out.grad[o..o + n].copy_from_slice(&j.grad);
        }
        if j.order >= 2 {
            for r in 0..n {
                out.hess[(o + r) * t + o..(o + r) * t + o + n].copy_from_slice(&j.hess[r * n..(r + 1) * n]);
            }
        }
        out
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        let n = self.inner.dim();
        if index < self.offset || index >= self.offset + n {
            return Some(ScalarField::constant(self.total, S::zero()));
        }
        Some(self.inner.exact_partial(index - self.offset)?.embed(self.total, self.offset))
    }
}

impl<S: Scalar> ScalarField<S> {
    pub fn new(f: impl Field<S> + 'static) -> Self {
        ScalarField(Arc::new(f))
    }

    /// A field defined by a closure over coordinate jets; supports order 2.
    pub fn from_fn(dim: usize, f: impl Fn(&[Jet<S>]) -> Jet<S> + Send + Sync + 'static) -> Self {
        Self::new(ClosureField { dim, f, _s: std::marker::PhantomData })
    }

    pub fn constant(dim: usize, value: S) -> Self {
        Polynomial::constant(dim, value).into_field()
    }

    pub fn coordinate(dim: usize, index: usize) -> Self {
        Polynomial::coordinate(dim, index).into_field()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial<S>> {
        self.0.as_polynomial()
    }

    /// The representation's own exact partial, if it has one.
    pub fn exact_partial(&self, index: usize) -> Option<ScalarField<S>> {
        self.0.partial(index)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn max_order(&self) -> Option<usize> {
        self.0.max_order()
    }

    pub fn jet(&self, point: &[S], order: usize) -> Result<Jet<S>> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: point.len() });
        }
        match self.max_order() {
            Some(m) if order <= m => Ok(self.0.eval_jet(point, order)),
            available => Err(Error::DerivativeOrder { requested: order, available }),
        }
    }

    pub fn value(&self, point: &[S]) -> Result<S> {
        Ok(self.jet(point, 0)?.value)
    }

    pub fn gradient(&self, point: &[S]) -> Result<Vec<S>> {
        Ok(self.jet(point, 1)?.grad)
    }

    pub fn hessian(&self, point: &[S]) -> Result<DMatrix<S>> {
        let n = self.dim();
        let j = self.jet(point, 2)?;
        Ok(DMatrix::from_row_slice(n, n, &j.hess))
    }

    /// Largest |∂ᵢ∂ⱼh − ∂ⱼ∂ᵢh| at `point`.
    pub fn hessian_symmetry_defect(&self, point: &[S]) -> Result<f64> {
        let h = self.hessian(point)?;
        Ok((&h - h.transpose()).iter().map(|x| x.modulus()).fold(0.0, f64::max))
    }

    /// `∂h/∂x_index` as a field: exact for polynomials, one order lower otherwise.
    pub fn partial_derivative(&self, index: usize) -> ScalarField<S> {
        self.0
            .partial(index)
            .unwrap_or_else(|| Self::new(Partial { inner: self.clone(), index }))
    }

    /// `Σ kᵢ fᵢ`; collapses to a polynomial when every term is one.
    pub fn linear_combination(dim: usize, terms: Vec<(S, ScalarField<S>)>) -> Self {
        if terms.iter().all(|(_, f)| f.as_polynomial().is_some()) {
            let mut acc = Polynomial::zero(dim);
            for (k, f) in &terms {
                acc = &acc + &f.as_polynomial().unwrap().scale(*k);
            }
            return acc.into_field();
        }
        Self::new(Linear { dim, terms, offset: S::zero() })
    }

    pub fn scale(&self, k: S) -> Self {
        Self::linear_combination(self.dim(), vec![(k, self.clone())])
    }

    pub fn plus(&self, other: &ScalarField<S>) -> Self {
        Self::linear_combination(self.dim(), vec![(S::one(), self.clone()), (S::one(), other.clone())])
    }

    pub fn times(&self, other: &ScalarField<S>) -> Self {
        if let (Some(a), Some(b)) = (self.as_polynomial(), other.as_polynomial()) {
            return (a * b).into_field();
        }
        Self::new(Product { a: self.clone(), b: other.clone() })
    }

    /// The same function viewed on a chart of dimension `total`, reading
    /// coordinates `offset..offset + self.dim()`.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        assert!(offset + self.dim() <= total);
        if let Some(p) = self.as_polynomial() {
            return p.embed(total, offset).into_field();
        }
        Self::new(Embedded { inner: self.clone(), total, offset })
    }

    pub fn minus(&self, other: &ScalarField<S>) -> Self {
        Self::linear_combination(self.dim(), vec![(S::one(), self.clone()), (-S::one(), other.clone())])
    }

    fn part(&self, part: Part) -> Self {
        if let Some(p) = self.as_polynomial() {
            let probe = PartField { inner: self.clone(), part };
            return p.map_coeffs(|c| probe.map(c)).into_field();
        }
        Self::new(PartField { inner: self.clone(), part })
    }

    /// Real part. Derivatives are taken along real chart coordinates, so the
    /// result is only meaningful at real points.
    pub fn re(&self) -> Self {
        self.part(Part::Re)
    }

    pub fn im(&self) -> Self {
        self.part(Part::Im)
    }

    pub fn conj(&self) -> Self {
        self.part(Part::Conj)
    }
}

/// Lifts a real point into the scalar type.
pub fn lift<S: Scalar>(point: &[f64]) -> Vec<S> {
    point.iter().map(|&x| S::from_real(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cubic() -> ScalarField<f64> {
        ScalarField::from_fn(2, |v| &(&v[0] * &v[0]) * &v[1] + v[1].powi(3))
    }

    #[test]
    fn closure_field_derivatives() {
        let f = cubic();
        let g = f.gradient(&[1.0, 2.0]).unwrap();
        assert_eq!(g, vec![4.0, 13.0]);
        let h = f.hessian(&[1.0, 2.0]).unwrap();
        assert_eq!(h[(0, 1)], 2.0);
        assert_eq!(h[(1, 1)], 12.0);
        assert_eq!(f.hessian_symmetry_defect(&[0.3, -0.7]).unwrap(), 0.0);
    }

    #[test]
    fn partial_of_closure_loses_one_order() {
        let f = cubic();
        let fx = f.partial_derivative(0);
        assert_eq!(fx.max_order(), Some(1));
        assert_eq!(fx.value(&[1.0, 2.0]).unwrap(), 4.0);
        let fxx = fx.partial_derivative(0);
        assert_eq!(fxx.value(&[1.0, 2.0]).unwrap(), 4.0);
        let fxxx = fxx.partial_derivative(0);
        assert!(matches!(fxxx.value(&[1.0, 2.0]), Err(Error::DerivativeOrder { .. })));
    }

    #[test]
    fn products_and_embeddings() {
        let f = cubic();
        let g = f.times(&f).embed(4, 1);
        let p = [9.0, 1.0, 2.0, -3.0];
        assert_eq!(g.value(&p).unwrap(), 100.0);
        let gr = g.gradient(&p).unwrap();
        assert_eq!(gr, vec![0.0, 80.0, 260.0, 0.0]);
        assert_eq!(g.hessian(&p).unwrap()[(0, 0)], 0.0);
        assert_eq!(g.partial_derivative(3).value(&p).unwrap(), 0.0);
    }

    #[test]
    fn dimension_is_checked() {
        assert!(matches!(cubic().value(&[1.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn parts_of_complex_field() {
        let i = Complex64::i();
        let z2 = ScalarField::<Complex64>::from_fn(2, move |v| {
            let z = &v[0] + &v[1].scale(i);
            &z * &z
        });
        let p = [Complex64::new(0.5, 0.0), Complex64::new(0.25, 0.0)];
        let re = z2.re().value(&p).unwrap();
        let im = z2.im().value(&p).unwrap();
        assert!((re.re - (0.25 - 0.0625)).abs() < 1e-15);
        assert!((im.re - 0.25).abs() < 1e-15);
        assert_eq!(z2.conj().value(&p).unwrap(), Complex64::new(re.re, -im.re));
    }
}
