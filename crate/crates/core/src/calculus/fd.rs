//! Central finite differences, used only to cross-check exact derivatives.

use nalgebra::DMatrix;

use super::field::ScalarField;
use super::jet::Scalar;
use crate::error::Result;

pub const GRADIENT_STEP: f64 = 1e-5;
pub const HESSIAN_STEP: f64 = 1e-4;

fn step(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1.0)
}

fn shifted<S: Scalar>(p: &[S], moves: &[(usize, f64)]) -> Vec<S> {
    let mut q = p.to_vec();
    for &(k, h) in moves {
        q[k] += S::from_real(h);
    }
    q
}

/// Gradient along real coordinate directions, step 1e−5 relative.
pub fn gradient<S: Scalar>(f: &ScalarField<S>, p: &[S]) -> Result<Vec<S>> {
    (0..p.len())
        .map(|k| {
            let h = step(p[k].real(), GRADIENT_STEP);
            let fp = f.value(&shifted(p, &[(k, h)]))?;
            let fm = f.value(&shifted(p, &[(k, -h)]))?;
            Ok((fp - fm) * S::from_real(0.5 / h))
        })
        .collect()
}

/// Hessian from values only (four-point mixed stencil).
pub fn hessian<S: Scalar>(f: &ScalarField<S>, p: &[S]) -> Result<DMatrix<S>> {
    let n = p.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let hi = step(p[i].real(), HESSIAN_STEP);
            let hj = step(p[j].real(), HESSIAN_STEP);
            let v = f.value(&shifted(p, &[(i, hi), (j, hj)]))? - f.value(&shifted(p, &[(i, hi), (j, -hj)]))?
                - f.value(&shifted(p, &[(i, -hi), (j, hj)]))?
                + f.value(&shifted(p, &[(i, -hi), (j, -hj)]))?;
            let v = v * S::from_real(0.25 / (hi * hj));
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_exact_jets() {
        let f = ScalarField::<f64>::from_fn(3, |v| &(&v[0] * &v[1]) * &v[2] + v[0].powi(3) + v[2].recip());
        let p = [0.7, -1.2, 1.9];
        let g = f.gradient(&p).unwrap();
        let gf = gradient(&f, &p).unwrap();
        for k in 0..3 {
            assert!((g[k] - gf[k]).abs() < 1e-8);
        }
        let h = f.hessian(&p).unwrap();
        let hf = hessian(&f, &p).unwrap();
        assert!((h - hf).amax() < 1e-6);
    }
}
