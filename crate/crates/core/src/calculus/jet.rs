//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its gradient and (optionally) its
//! Hessian with respect to a fixed set of chart coordinates. Arithmetic on jets
//! propagates derivatives exactly, so a field written as a closure over jets
//! yields exact first and second partials at any point.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::ComplexField;

/// Scalar type of field values: `f64` or `Complex<f64>`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Value, gradient and Hessian of a scalar function at a point.
///
/// `order` records how many derivative levels are populated: the Hessian is
/// empty when `order < 2` and the gradient is empty when `order == 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    pub value: S,
    pub grad: Vec<S>,
    pub hess: Vec<S>,
    pub order: usize,
    dim: usize,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(dim: usize, value: S, order: usize) -> Self {
        let order = order.min(2);
        Jet {
            value,
            grad: if order >= 1 { vec![S::zero(); dim] } else { Vec::new() },
            hess: if order >= 2 { vec![S::zero(); dim * dim] } else { Vec::new() },
            order,
            dim,
        }
    }

    /// Coordinate `index` seeded with unit derivative.
    pub fn variable(dim: usize, index: usize, value: S, order: usize) -> Self {
        let mut j = Self::constant(dim, value, order);
        if j.order >= 1 {
            j.grad[index] = S::one();
        }
        j
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[S], order: usize) -> Vec<Self> {
        let n = point.len();
        point.iter().enumerate().map(|(i, &v)| Self::variable(n, i, v, order)).collect()
    }

    pub fn from_parts(dim: usize, value: S, grad: Vec<S>, hess: Vec<S>, order: usize) -> Self {
        Jet { value, grad, hess, order, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hess_at(&self, i: usize, j: usize) -> S {
        self.hess[i * self.dim + j]
    }

    /// Truncates to a lower order, dropping derivative data.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < 2 {
            self.hess.clear();
        }
        if order < 1 {
            self.grad.clear();
        }
        self.order = self.order.min(order);
        self
    }

    pub fn scale(&self, k: S) -> Self {
        Jet {
            value: self.value * k,
            grad: self.grad.iter().map(|&g| g * k).collect(),
            hess: self.hess.iter().map(|&h| h * k).collect(),
            order: self.order,
            dim: self.dim,
        }
    }

    pub fn add_scalar(&self, k: S) -> Self {
        let mut out = self.clone();
        out.value += k;
        out
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn chain(&self, f0: S, f1: S, f2: S) -> Self {
        let n = self.dim;
        let grad = self.grad.iter().map(|&g| g * f1).collect();
        let hess = if self.order >= 2 {
            let mut h = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    h.push(self.hess[i * n + j] * f1 + self.grad[i] * self.grad[j] * f2);
                }
            }
            h
        } else {
            Vec::new()
        };
        Jet { value: f0, grad, hess, order: self.order, dim: n }
    }

    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::constant(self.dim, S::one(), self.order),
            1 => self.clone(),
            2 => self * self,
            _ => {
                let v = self.value;
                let kf = S::from_real(k as f64);
                let f0 = v.powi(k);
                let f1 = kf * v.powi(k - 1);
                let f2 = kf * S::from_real((k - 1) as f64) * v.powi(k - 2);
                self.chain(f0, f1, f2)
            }
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        let inv = S::one() / v;
        self.chain(inv, -inv * inv, S::from_real(2.0) * inv * inv * inv)
    }

    pub fn conj(&self) -> Self {
        Jet {
            value: self.value.conjugate(),
            grad: self.grad.iter().map(|g| g.conjugate()).collect(),
            hess: self.hess.iter().map(|h| h.conjugate()).collect(),
            order: self.order,
            dim: self.dim,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let order = self.order.min(other.order);
        let grad = if order >= 1 {
            self.grad.iter().zip(&other.grad).map(|(&a, &b)| f(a, b)).collect()
        } else {
            Vec::new()
        };
        let hess = if order >= 2 {
            self.hess.iter().zip(&other.hess).map(|(&a, &b)| f(a, b)).collect()
        } else {
            Vec::new()
        };
        Jet { value: f(self.value, other.value), grad, hess, order, dim: self.dim }
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        let n = self.dim;
        let order = self.order.min(rhs.order);
        let (a, b) = (self.value, rhs.value);
        let grad = if order >= 1 {
            (0..n).map(|i| self.grad[i] * b + a * rhs.grad[i]).collect()
        } else {
            Vec::new()
        };
        let hess = if order >= 2 {
            let mut h = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    h.push(
                        self.hess[i * n + j] * b
                            + a * rhs.hess[i * n + j]
                            + self.grad[i] * rhs.grad[j]
                            + self.grad[j] * rhs.grad[i],
                    );
                }
            }
            h
        } else {
            Vec::new()
        };
        Jet { value: a * b, grad, hess, order, dim: n }
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.scale(-S::one())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$m(&rhs)
            }
        }
        impl<S: Scalar> $tr<&Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: &Jet<S>) -> Jet<S> {
                (&self).$m(rhs)
            }
        }
        impl<S: Scalar> $tr<Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        (&self).neg()
    }
}

impl<S: Scalar> Mul<S> for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, k: S) -> Jet<S> {
        self.scale(k)
    }
}

impl<S: Scalar> Mul<S> for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, k: S) -> Jet<S> {
        self.scale(k)
    }
}

impl<S: Scalar> Add<S> for Jet<S> {
    type Output = Jet<S>;
    fn add(self, k: S) -> Jet<S> {
        self.add_scalar(k)
    }
}

impl<S: Scalar> Add<S> for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, k: S) -> Jet<S> {
        self.add_scalar(k)
    }
}

/// Sum of an iterator of jets; `dim` and `order` fix the shape of the empty sum.
pub fn sum<S: Scalar>(dim: usize, order: usize, terms: impl IntoIterator<Item = Jet<S>>) -> Jet<S> {
    terms.into_iter().fold(Jet::constant(dim, S::zero(), order), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn product_rule_and_hessian() {
        let v = Jet::seed(&[2.0_f64, 3.0], 2);
        let f = &(&v[0] * &v[0]) * &v[1]; // x^2 y
        assert_eq!(f.value, 12.0);
        assert_eq!(f.grad, vec![12.0, 4.0]);
        assert_eq!(f.hess, vec![6.0, 4.0, 4.0, 0.0]);
    }

    #[test]
    fn recip_and_powi() {
        let v = Jet::seed(&[0.5_f64], 2);
        let r = v[0].recip();
        assert!((r.grad[0] + 4.0).abs() < 1e-14);
        assert!((r.hess[0] - 16.0).abs() < 1e-12);
        let c = v[0].powi(3);
        assert!((c.grad[0] - 0.75).abs() < 1e-15);
        assert!((c.hess[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn order_is_minimum_of_operands() {
        let a = Jet::variable(2, 0, 1.0_f64, 2);
        let b = Jet::variable(2, 1, 1.0_f64, 1);
        let c = &a * &b;
        assert_eq!(c.order, 1);
        assert!(c.hess.is_empty());
    }

    #[test]
    fn complex_jets_differentiate_along_real_coordinates() {
        let i = Complex64::i();
        let v = Jet::seed(&[Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0)], 2);
        let z = &v[0] + &(v[1].scale(i));
        let z2 = &z * &z;
        // d(z^2)/dxi = 2 i z
        let expect = i * z.value * 2.0;
        assert!((z2.grad[1] - expect).norm() < 1e-15);
    }
}
