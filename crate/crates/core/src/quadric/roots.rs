//! Univariate complex polynomials: evaluation, simultaneous root finding and
//! root-set clustering.

use num_complex::Complex64;

/// Coefficients in ascending order: `c[0] + c[1] z + …`.
pub type Coeffs = Vec<Complex64>;

pub fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Σ_i w_i Π_{j≠i} (z − μ_j)`.
pub fn lagrange_combination(w: &[Complex64], mu: &[Complex64]) -> Coeffs {
    let n = mu.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut term = vec![w[i]];
        for (j, &m) in mu.iter().enumerate() {
            if j != i {
                term = mul(&term, &[-m, Complex64::new(1.0, 0.0)]);
            }
        }
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    out
}

/// Drops leading coefficients below `rel · max|c|`.
pub fn trim(c: &[Complex64], rel: f64) -> Coeffs {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut out = c.to_vec();
    while out.last().is_some_and(|a| a.norm() <= rel * scale) {
        out.pop();
    }
    out
}

/// All roots of a polynomial with nonzero leading coefficient (Aberth–Ehrlich
/// iteration followed by Newton polishing).
pub fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Coeffs = c.iter().map(|&a| a / lead).collect();
    let radius = 1.0 + monic[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_with_derivative(&monic, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved <= 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(&monic, *zk);
            let step = p / dp;
            if !step.is_finite() || step.norm() > 1e-6 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
        }
    }
    z
}

/// Points `z` that lie within `tol·(1+|z|)` of a root in every root set.
/// Candidates are drawn from the smallest set; matches are averaged.
pub fn common_roots(sets: &[Vec<Complex64>], tol: f64) -> Vec<Complex64> {
    let Some(base) = sets.iter().min_by_key(|s| s.len()) else {
        return Vec::new();
    };
    let mut out: Vec<Complex64> = Vec::new();
    for &z in base {
        let near = |w: &Complex64| (w - z).norm() <= tol * (1.0 + z.norm());
        let mut acc = Vec::with_capacity(sets.len());
        let mut ok = true;
        for s in sets {
            match s.iter().filter(|w| near(w)).min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm())) {
                Some(&w) => acc.push(w),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let mean = acc.iter().sum::<Complex64>() / acc.len() as f64;
        if !out.iter().any(|o| (o - mean).norm() <= tol * (1.0 + mean.norm())) {
            out.push(mean);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn recovers_known_roots() {
        let rs = [c(1.0, 0.0), c(-0.5, 2.0), c(0.3, -0.7), c(3.0, 1.0)];
        let mut p = vec![c(2.0, 1.0)];
        for &r in &rs {
            p = mul(&p, &[-r, c(1.0, 0.0)]);
        }
        let found = roots(&p);
        for r in rs {
            assert!(found.iter().any(|z| (z - r).norm() < 1e-12));
        }
    }

    #[test]
    fn double_roots_cluster() {
        let p = mul(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(-1.0, 0.0), c(1.0, 0.0)]);
        let found = roots(&p);
        assert!(found.iter().all(|z| (z - 1.0).norm() < 1e-7));
        assert_eq!(common_roots(&[found.clone(), found], 1e-6).len(), 1);
    }

    #[test]
    fn lagrange_values_at_nodes() {
        let mu = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)];
        let w = [c(1.0, 1.0), c(-2.0, 0.0), c(0.5, 0.0)];
        let p = lagrange_combination(&w, &mu);
        // P(μ_k) = w_k Π_{j≠k}(μ_k − μ_j)
        let expect = w[1] * (mu[1] - mu[0]) * (mu[1] - mu[2]);
        assert!((eval(&p, mu[1]) - expect).norm() < 1e-14);
    }

    #[test]
    fn trim_drops_small_leading_terms() {
        assert_eq!(trim(&[c(1.0, 0.0), c(2.0, 0.0), c(1e-17, 0.0)], 1e-10).len(), 2);
        assert!(roots(&[c(3.0, 0.0)]).is_empty());
    }
}
