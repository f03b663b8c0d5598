//! Catalogue of synthetic families.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{BaseChart, FamilyModel, FibreComplexStructure};
use crate::calculus::jet::sum;
use crate::calculus::{Jet, PoissonChart, Polynomial, ScalarField};
use crate::quadric::{HyperellipticConfig, QuadricSystem};
use crate::{Error, Result};

type C = Complex64;

/// Names accepted by [`by_name`].
pub const FIXTURE_NAMES: [&str; 7] =
    ["weight2", "weight1", "siegel1", "siegel2", "genus2", "random-poly", "holomorphic"];

pub fn by_name(name: &str, seed: u64) -> Result<FamilyModel> {
    match name {
        "weight2" => weight2(C::new(0.7, -0.4)),
        "weight1" => weight1(C::new(0.7, -0.4)),
        "siegel1" => siegel(1),
        "siegel2" => siegel(2),
        "genus2" => genus2_fed(),
        "random-poly" => random_polynomial(seed),
        "holomorphic" => random_holomorphic(seed, 1),
        other => Err(Error::Usage(format!("unknown family fixture '{other}'"))),
    }
}

fn gaussian_c(rng: &mut impl Rng) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(re, im)
}

fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `J ∂x_k = ∂ξ_k` on the canonical fibre `(x, ξ)`, making `z_k = x_k + iξ_k` holomorphic.
pub fn standard_fibre_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(n + k, k)] = 1.0;
        j[(k, n + k)] = -1.0;
    }
    j
}

fn constant_j(n: usize) -> FibreComplexStructure {
    let j = standard_fibre_j(n);
    Arc::new(move |_| j.clone())
}

/// `z_k = x_k + iξ_k` on a product chart with `m` base and `2n` fibre coordinates.
fn z_poly(m: usize, n: usize, k: usize) -> Polynomial<C> {
    let total = m + 2 * n;
    &Polynomial::coordinate(total, m + k) + &Polynomial::coordinate(total, m + n + k).scale(C::new(0.0, 1.0))
}

/// `f = −Σ|z_k|²/2`, generating `z_k ↦ e^{it} z_k`.
fn rotation_moment(m: usize, n: usize) -> ScalarField<C> {
    let total = m + 2 * n;
    let mut f = Polynomial::zero(total);
    for k in 0..2 * n {
        let c = Polynomial::coordinate(total, m + k);
        f = &f - &(&c * &c).scale(C::new(0.5, 0.0));
    }
    f.into_field()
}

fn one_dim_family(name: &str, phi_s: Polynomial<C>, moment: bool) -> Result<FamilyModel> {
    let phi_t = phi_s.scale(C::new(0.0, 1.0));
    let mut fam = FamilyModel::new(
        name,
        BaseChart::standard(1),
        PoissonChart::canonical(1),
        vec![phi_s.into_field(), phi_t.into_field()],
    )?
    .with_fibre_complex_structure(constant_j(1))
    .with_sampler(Arc::new(|rng| Ok((gaussian_vec(rng, 2), gaussian_vec(rng, 2)))));
    if moment {
        fam = fam.with_moment_map(rotation_moment(2, 1))?;
    }
    Ok(fam)
}

/// `φ = a z² (ds + i dt)` over ℂ with fibre ℂ: weight 2 under `f = −|z|²/2`.
pub fn weight2(a: C) -> Result<FamilyModel> {
    let z = z_poly(2, 1, 0);
    one_dim_family("weight2", (&z * &z).scale(a), true)
}

/// `φ = a z (ds + i dt)`: weight 1, a negative control for equivariance.
pub fn weight1(a: C) -> Result<FamilyModel> {
    one_dim_family("weight1", z_poly(2, 1, 0).scale(a), true)
}

/// `γ(∂s) = c (x² + ξ²)/2` with `β(∂s) = 0`; the horizontal lift along `∂s`
/// rotates the fibre by angle `c/2` per unit length.
pub fn oscillator(c: f64) -> Result<FamilyModel> {
    let x = Polynomial::<C>::coordinate(4, 2);
    let xi = Polynomial::<C>::coordinate(4, 3);
    let h = (&(&x * &x) + &(&xi * &xi)).scale(C::new(0.0, 0.5 * c));
    one_dim_family("oscillator", h, false)
}

/// Random complex cubic `φ(∂s)` in `(s, t, x, ξ)`, `φ(∂t) = iφ(∂s)`.
pub fn random_polynomial(seed: u64) -> Result<FamilyModel> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = Polynomial::random_dense(4, 3, || gaussian_c(&mut rng) * 0.5);
    one_dim_family("random-poly", p, false)
}

/// `φ(∂s) = Σ_e c_e(s,t) z^e` with coefficients affine in the base and random
/// in ℂ, degree ≤ 3 in `z ∈ ℂⁿ`; fibre-holomorphic by construction.
pub fn random_holomorphic(seed: u64, n: usize) -> Result<FamilyModel> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let total = 2 + 2 * n;
    let inner = Polynomial::random_dense(2 + n, 3, || gaussian_c(&mut rng) * 0.5);
    let mut subs = vec![Polynomial::coordinate(total, 0), Polynomial::coordinate(total, 1)];
    subs.extend((0..n).map(|k| z_poly(2, n, k)));
    // keep only terms of degree ≤ 1 in the base
    let mut trimmed = Polynomial::zero(2 + n);
    for (e, c) in inner.terms() {
        if e[0] + e[1] <= 1 {
            trimmed = &trimmed + &Polynomial::monomial(2 + n, e.to_vec(), c);
        }
    }
    let phi_s = trimmed.compose(&subs);
    let phi_t = phi_s.scale(C::new(0.0, 1.0));
    Ok(FamilyModel::new(
        "holomorphic",
        BaseChart::standard(1),
        PoissonChart::canonical(n),
        vec![phi_s.into_field(), phi_t.into_field()],
    )?
    .with_fibre_complex_structure(constant_j(n))
    .with_sampler(Arc::new(move |rng| Ok((gaussian_vec(rng, 2), gaussian_vec(rng, 2 * n))))))
}

/// Index pairs `(a, b)`, `a ≤ b`, of a symmetric `g × g` matrix.
fn sym_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).flat_map(|a| (a..g).map(move |b| (a, b))).collect()
}

/// Builds `S`, `T` (`W = S + iT`) and `(x, ξ)` jets from the product-chart variables.
struct SiegelJets {
    zeta: Vec<Jet<C>>,
    v: Vec<Jet<C>>,
    rho_inv: Vec<Vec<Jet<C>>>,
}

fn siegel_jets(g: usize, vars: &[Jet<C>]) -> SiegelJets {
    let pairs = sym_pairs(g);
    let np = pairs.len();
    let dim = vars[0].dim();
    let order = vars[0].order;
    let mut s = vec![vec![Jet::constant(dim, C::new(0.0, 0.0), order); g]; g];
    let mut t = s.clone();
    for (k, &(a, b)) in pairs.iter().enumerate() {
        s[a][b] = vars[k].clone();
        s[b][a] = vars[k].clone();
        t[a][b] = vars[np + k].clone();
        t[b][a] = vars[np + k].clone();
    }
    let x = &vars[2 * np..2 * np + g];
    let xi = &vars[2 * np + g..2 * np + 2 * g];
    let i = C::new(0.0, 1.0);
    // τ = S − iT, ρ = Im τ = −T
    let zeta: Vec<Jet<C>> = (0..g)
        .map(|a| {
            let terms = (0..g).map(|l| (&s[a][l] - &(&t[a][l] * i)) * &x[l]);
            &xi[a] - &sum(dim, order, terms)
        })
        .collect();
    let rho_inv: Vec<Vec<Jet<C>>> = match g {
        1 => vec![vec![(-&t[0][0]).recip()]],
        2 => {
            let (r11, r12, r22) = (-&t[0][0], -&t[0][1], -&t[1][1]);
            let det_inv = (&(&r11 * &r22) - &(&r12 * &r12)).recip();
            vec![
                vec![&r22 * &det_inv, -(&r12 * &det_inv)],
                vec![-(&r12 * &det_inv), &r11 * &det_inv],
            ]
        }
        _ => unreachable!("genus checked by caller"),
    };
    let v = (0..g).map(|a| sum(dim, order, (0..g).map(|b| &rho_inv[a][b] * &zeta[b]))).collect();
    SiegelJets { zeta, v, rho_inv }
}

/// The Siegel family of genus `g ∈ {1, 2}`: base `W = S + iT` symmetric with
/// `T` negative definite, `τ = W̄`, fibre `ℝ^{2g}` with holomorphic coordinates
/// `ζ = ξ − τx`, moment map `f = −½ ζ̄ᵀ(Im τ)⁻¹ζ`, `β = d_B f` and
/// `γ(Y) = −β(I_B Y)`, so `φ(∂s_ab) = 2∂f/∂W_ab`.
pub fn siegel(g: usize) -> Result<FamilyModel> {
    if !(1..=2).contains(&g) {
        return Err(Error::InvalidParameters(format!("Siegel fixture supports genus 1 or 2, got {g}")));
    }
    let pairs = sym_pairs(g);
    let np = pairs.len();
    let total = 2 * np + 2 * g;
    let i = C::new(0.0, 1.0);
    let mut phi = Vec::with_capacity(2 * np);
    for &(a, b) in &pairs {
        let coef = if a == b { i * 0.5 } else { i };
        phi.push(ScalarField::from_fn(total, move |vars| {
            let sj = siegel_jets(g, vars);
            (&sj.v[a] * &sj.v[b]) * coef
        }));
    }
    for k in 0..np {
        phi.push(phi[k].scale(i));
    }
    let moment = ScalarField::from_fn(total, move |vars| {
        let sj = siegel_jets(g, vars);
        let dim = vars[0].dim();
        let order = vars[0].order;
        let terms = (0..g).flat_map(|a| {
            let sj = &sj;
            (0..g).map(move |b| &(&sj.zeta[a].conj() * &sj.rho_inv[a][b]) * &sj.zeta[b])
        });
        sum(dim, order, terms.collect::<Vec<_>>()) * C::new(-0.5, 0.0)
    });
    let j: FibreComplexStructure = Arc::new(move |base: &[f64]| siegel_fibre_j(g, base));
    let sampler = Arc::new(move |rng: &mut ChaCha20Rng| {
        let mut base = vec![0.0; 2 * np];
        for k in 0..np {
            base[k] = rng.gen_range(-0.5..0.5);
        }
        // T = −(A Aᵀ + I) is negative definite
        let a = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
        let t = -(&a * a.transpose() + DMatrix::identity(g, g));
        for (k, &(p, q)) in pairs.iter().enumerate() {
            base[np + k] = t[(p, q)];
        }
        Ok((base, gaussian_vec(rng, 2 * g)))
    });
    Ok(FamilyModel::new(&format!("siegel{g}"), BaseChart::standard(np), PoissonChart::canonical(g), phi)?
        .with_moment_map(moment)?
        .with_fibre_complex_structure(j)
        .with_sampler(sampler))
}

/// `J` with `dζ ∘ J = i dζ` for `ζ = ξ − τx`, `τ = S − iT`.
pub fn siegel_fibre_j(g: usize, base: &[f64]) -> DMatrix<f64> {
    let pairs = sym_pairs(g);
    let np = pairs.len();
    let mut tau = DMatrix::<C>::zeros(g, g);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let v = C::new(base[k], -base[np + k]);
        tau[(a, b)] = v;
        tau[(b, a)] = v;
    }
    // rows of Λ = [−τ, I]
    let mut lam = DMatrix::<C>::zeros(g, 2 * g);
    lam.view_mut((0, 0), (g, g)).copy_from(&(-&tau));
    for a in 0..g {
        lam[(a, g + a)] = C::new(1.0, 0.0);
    }
    let re = lam.map(|c| c.re);
    let im = lam.map(|c| c.im);
    let mut m = DMatrix::zeros(2 * g, 2 * g);
    let mut n = DMatrix::zeros(2 * g, 2 * g);
    m.view_mut((0, 0), (g, 2 * g)).copy_from(&re);
    m.view_mut((g, 0), (g, 2 * g)).copy_from(&im);
    n.view_mut((0, 0), (g, 2 * g)).copy_from(&(-&im));
    n.view_mut((g, 0), (g, 2 * g)).copy_from(&re);
    m.lu().solve(&n).expect("Im τ is definite")
}

/// Fixed branch points `μ₄, μ₅, μ₆` of the genus-2-fed family.
pub const GENUS2_TAIL: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [-1.5, 0.5]];

/// Real chart `(Re x, Im x, Re y, Im y)` of ℂ¹² with `ω₁ = Re Σ dx_k∧dy_k`.
pub fn realified_chart() -> PoissonChart {
    let mut w = DMatrix::zeros(24, 24);
    for k in 0..6 {
        w[(k, 12 + k)] = 1.0;
        w[(12 + k, k)] = -1.0;
        w[(6 + k, 18 + k)] = -1.0;
        w[(18 + k, 6 + k)] = 1.0;
    }
    PoissonChart::new(w).expect("nondegenerate")
}

/// The quadric Hamiltonians over the base `(μ₁, μ₂, μ₃) ∈ ℂ³` as
/// `φ = Σ_k f_k dμ_k`, on the realified fibre.
pub fn genus2_fed() -> Result<FamilyModel> {
    let total = 6 + 24;
    let tail: [C; 3] = GENUS2_TAIL.map(|[a, b]| C::new(a, b));
    let i = C::new(0.0, 1.0);
    let mut phi = Vec::with_capacity(6);
    for k in 0..3 {
        phi.push(ScalarField::from_fn(total, move |vars| {
            let dim = vars[0].dim();
            let order = vars[0].order;
            let mu: Vec<Jet<C>> = (0..6)
                .map(|j| {
                    if j < 3 {
                        &vars[j] + &(&vars[3 + j] * i)
                    } else {
                        Jet::constant(dim, tail[j - 3], order)
                    }
                })
                .collect();
            let x: Vec<Jet<C>> = (0..6).map(|j| &vars[6 + j] + &(&vars[12 + j] * i)).collect();
            let y: Vec<Jet<C>> = (0..6).map(|j| &vars[18 + j] + &(&vars[24 + j] * i)).collect();
            let terms = (0..6).filter(|&j| j != k).map(|j| {
                let a = &(&x[k] * &y[j]) - &(&x[j] * &y[k]);
                &(&a * &a) * &(&mu[j] - &mu[k]).recip()
            });
            sum(dim, order, terms.collect::<Vec<_>>()) * C::new(4.0, 0.0)
        }));
    }
    for k in 0..3 {
        phi.push(phi[k].scale(i));
    }
    let sampler = Arc::new(move |rng: &mut ChaCha20Rng| -> Result<(Vec<f64>, Vec<f64>)> {
        let (mu, pt) = genus2_sample(rng)?;
        let mut base = vec![0.0; 6];
        for k in 0..3 {
            base[k] = mu[k].re;
            base[3 + k] = mu[k].im;
        }
        let fibre: Vec<f64> = pt.x.iter().map(|c| c.re)
            .chain(pt.x.iter().map(|c| c.im))
            .chain(pt.y.iter().map(|c| c.re))
            .chain(pt.y.iter().map(|c| c.im))
            .collect();
        Ok((base, fibre))
    });
    Ok(FamilyModel::new("genus2", BaseChart::standard(3), realified_chart(), phi)?.with_sampler(sampler))
}

fn genus2_sample(rng: &mut ChaCha20Rng) -> Result<([C; 6], crate::quadric::OrbitPoint)> {
    for _ in 0..32 {
        let mut mu = [C::new(0.0, 0.0); 6];
        for m in mu.iter_mut().take(3) {
            *m = gaussian_c(rng) * std::f64::consts::FRAC_1_SQRT_2 + C::new(2.0, 1.0);
        }
        for (k, t) in GENUS2_TAIL.iter().enumerate() {
            mu[3 + k] = C::new(t[0], t[1]);
        }
        let sep = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).map(|(a, b)| (mu[a] - mu[b]).norm());
        if sep.fold(f64::MAX, f64::min) < 0.1 {
            continue;
        }
        let cfg = HyperellipticConfig::new(mu)?;
        let pt = QuadricSystem::new(cfg).sample_admissible(rng.gen())?;
        return Ok((mu, pt));
    }
    Err(Error::NewtonFailure { attempts: 32 })
}

/// Random base tangent vector of unit scale.
pub fn random_direction(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let v = DVector::from_vec(gaussian_vec(rng, dim));
    let n = v.norm();
    v.iter().map(|c| c / n).collect()
}
