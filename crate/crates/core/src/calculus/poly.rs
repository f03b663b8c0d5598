//! Sparse multivariate polynomials with exact symbolic derivatives.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, ScalarField};
use super::jet::{Jet, Scalar};

/// `Σ c_e x^e` over a fixed number of variables, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    dim: usize,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    pub fn coordinate(dim: usize, index: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = 1;
        Self::monomial(dim, e, S::one())
    }

    pub fn monomial(dim: usize, exponents: Vec<u32>, c: S) -> Self {
        assert_eq!(exponents.len(), dim);
        let mut p = Self::zero(dim);
        if c != S::zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// All monomials of total degree ≤ `degree`, coefficients drawn from `coeff`.
    pub fn random_dense(dim: usize, degree: u32, mut coeff: impl FnMut() -> S) -> Self {
        let mut p = Self::zero(dim);
        for e in exponents_up_to(dim, degree) {
            let c = coeff();
            if c != S::zero() {
                p.terms.insert(e, c);
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], S)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, k: S) -> Self {
        if k == S::zero() {
            return Self::zero(self.dim);
        }
        Polynomial { dim: self.dim, terms: self.terms.iter().map(|(e, &c)| (e.clone(), c * k)).collect() }
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(S) -> T) -> Polynomial<T> {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (e.clone(), f(c)))
            .filter(|(_, c)| *c != T::zero())
            .collect();
        Polynomial { dim: self.dim, terms }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.dim, S::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, index: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            if e[index] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[index] -= 1;
            out.accumulate(d, c * S::from_real(e[index] as f64));
        }
        out
    }

    /// Substitutes `subs[k]` for variable `k`.
    pub fn compose(&self, subs: &[Polynomial<S>]) -> Polynomial<S> {
        assert_eq!(subs.len(), self.dim);
        let dim = subs.first().map_or(0, |p| p.dim);
        let mut out = Polynomial::zero(dim);
        for (e, &c) in &self.terms {
            let mut term = Polynomial::constant(dim, c);
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    term = &term * &subs[k].powi(ek);
                }
            }
            out = &out + &term;
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (e, &c) in &self.terms {
            let mut v = c;
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    v *= point[k].powi(ek as i32);
                }
            }
            acc += v;
        }
        acc
    }

    pub fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        let n = self.dim;
        let order = order.min(2);
        let mut out = Jet::constant(n, S::zero(), order);
        let pw = |k: usize, p: i64| -> S {
            if p < 0 {
                S::zero()
            } else {
                point[k].powi(p as i32)
            }
        };
        for (e, &c) in &self.terms {
            let support: Vec<usize> = (0..n).filter(|&k| e[k] > 0).collect();
            let prod_except = |skip: &[(usize, i64)]| -> S {
                let mut v = c;
                for &k in &support {
                    let dec = skip.iter().filter(|(s, _)| *s == k).map(|(_, d)| d).sum::<i64>();
                    v *= pw(k, e[k] as i64 - dec);
                }
                v
            };
            out.value += prod_except(&[]);
            if order >= 1 {
                for &k in &support {
                    out.grad[k] += prod_except(&[(k, 1)]) * S::from_real(e[k] as f64);
                }
            }
            if order >= 2 {
                for &k in &support {
                    for &l in &support {
                        let f = if k == l {
                            (e[k] as f64) * (e[k] as f64 - 1.0)
                        } else {
                            (e[k] as f64) * (e[l] as f64)
                        };
                        if f != 0.0 {
                            out.hess[k * n + l] += prod_except(&[(k, 1), (l, 1)]) * S::from_real(f);
                        }
                    }
                }
            }
        }
        out
    }

    /// The same polynomial on `total` variables, reading `offset..offset + dim`.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut f = vec![0; total];
                f[offset..offset + self.dim].copy_from_slice(e);
                (f, c)
            })
            .collect();
        Polynomial { dim: total, terms }
    }

    pub fn into_field(self) -> ScalarField<S> {
        ScalarField::new(self)
    }

    fn accumulate(&mut self, e: Vec<u32>, c: S) {
        let entry = self.terms.entry(e).or_insert(S::zero());
        *entry += c;
        if *entry == S::zero() {
            self.terms.retain(|_, v| *v != S::zero());
        }
    }
}

impl Polynomial<f64> {
    pub fn to_complex(&self) -> Polynomial<num_complex::Complex64> {
        self.map_coeffs(|c| num_complex::Complex64::new(c, 0.0))
    }
}

/// Exponent vectors of total degree ≤ `degree`, in a fixed order.
pub fn exponents_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl<S: Scalar> Field<S> for Polynomial<S> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn max_order(&self) -> Option<usize> {
        Some(usize::MAX)
    }
    fn eval_jet(&self, point: &[S], order: usize) -> Jet<S> {
        Polynomial::eval_jet(self, point, order)
    }
    fn partial(&self, index: usize) -> Option<ScalarField<S>> {
        Some(self.derivative(index).into_field())
    }
    fn as_polynomial(&self) -> Option<&Polynomial<S>> {
        Some(self)
    }
}

impl<S: Scalar> Add for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.accumulate(e.clone(), c);
        }
        out
    }
}

impl<S: Scalar> Sub for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        self + &rhs.scale(-S::one())
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Mul for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = Polynomial::zero(self.dim);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(e, ca * cb);
            }
        }
        out
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: Polynomial<S>) -> Polynomial<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: Polynomial<S>) -> Polynomial<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: Polynomial<S>) -> Polynomial<S> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn xy_cubic() -> Polynomial<f64> {
        let x = Polynomial::coordinate(2, 0);
        let y = Polynomial::coordinate(2, 1);
        &(&x * &x) * &y + y.powi(3)
    }

    #[test]
    fn jet_matches_hand_derivatives() {
        let j = xy_cubic().eval_jet(&[1.0, 2.0], 2);
        assert_eq!(j.value, 10.0);
        assert_eq!(j.grad, vec![4.0, 13.0]);
        assert_eq!(j.hess, vec![4.0, 2.0, 2.0, 12.0]);
    }

    #[test]
    fn third_derivatives_are_exact() {
        let f = xy_cubic().into_field();
        let fyyy = f.partial_derivative(1).partial_derivative(1).partial_derivative(1);
        assert_eq!(fyyy.value(&[0.3, 0.4]).unwrap(), 6.0);
        assert_eq!(fyyy.hessian(&[0.3, 0.4]).unwrap().amax(), 0.0);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = xy_cubic();
        assert!((&p - &p).is_zero());
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn composition_substitutes() {
        // p(u, v) = u v with u = x + y, v = x − y gives x² − y²
        let x = Polynomial::<f64>::coordinate(2, 0);
        let y = Polynomial::<f64>::coordinate(2, 1);
        let uv = &Polynomial::coordinate(2, 0) * &Polynomial::coordinate(2, 1);
        let got = uv.compose(&[&x + &y, &x - &y]);
        assert_eq!(got, &(&x * &x) - &(&y * &y));
    }

    #[test]
    fn complex_evaluation_is_holomorphic() {
        let z = Polynomial::<Complex64>::coordinate(1, 0);
        let p = z.powi(3);
        let pt = [Complex64::new(0.5, -1.5)];
        let j = p.eval_jet(&pt, 2);
        assert!((j.grad[0] - pt[0] * pt[0] * 3.0).norm() < 1e-14);
        assert!((j.hess[0] - pt[0] * 6.0).norm() < 1e-14);
    }

    #[test]
    fn dense_monomial_count() {
        assert_eq!(exponents_up_to(3, 2).len(), 10);
    }
}
