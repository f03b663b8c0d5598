//! Families of fibre Poisson manifolds over a complex base carrying a
//! function-valued (1,0)-form `φ = β + iγ`: the averaged connection
//! `∇_A = d_B − γ/2`, the circle of connections `∇_θ`, Fourier flatness,
//! the structure identities, circle equivariance, the Levi form and the
//! promoted 2-form.
//!
//! Fields live on the product chart with base coordinates first. Connection
//! potentials act on fibre functions by `∇_Y h = Y h + {c(Y), h}`, so the
//! curvature on constant coordinate fields is `F(Y,Z) = Y c(Z) − Z c(Y) + {c(Y), c(Z)}`.
//! Brackets of function-valued 1-forms are `{α, β}(Y,Z) = {α(Y), β(Z)} − {α(Z), β(Y)}`.

pub mod fixtures;
pub mod transport;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::calculus::{lift, FormField, FormValue, PoissonChart, PoissonTensor, ScalarField};
use crate::{Error, Result};

type C = Complex64;

/// Number of equally spaced θ samples on `[0, π)` used for Fourier fitting.
pub const FOURIER_GRID: usize = 16;

/// Fourier constants of `θ ↦ F_θ(Y,Z)` written in `ψ = 2θ`:
/// `F_θ = (F_A + k₀{φ,φ̄}) + k₂ e^{iψ} d_Aφ + k₄ e^{2iψ} {φ,φ} + c.c.`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierConstants {
    pub k0: f64,
    pub k2: [f64; 2],
    pub k4: [f64; 2],
}

pub const FOURIER_CONSTANTS: FourierConstants = FourierConstants { k0: 1.0 / 16.0, k2: [0.0, -0.25], k4: [-1.0 / 32.0, 0.0] };

fn k2() -> C {
    C::new(FOURIER_CONSTANTS.k2[0], FOURIER_CONSTANTS.k2[1])
}

fn k4() -> C {
    C::new(FOURIER_CONSTANTS.k4[0], FOURIER_CONSTANTS.k4[1])
}

/// Identity residuals are bounded by this multiple of the Fourier residuals.
pub const IMPLICATION_CONSTANT: f64 = 2.0;

/// Sign `s` in the promoted form `Ω = ω₁ + s·½ dΓ`, `Γ = Σ_a γ_a db_a`.
pub const PREQUANTUM_SIGN: f64 = 1.0;

/// A flat real chart with a constant complex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseChart {
    i_b: DMatrix<f64>,
}

impl BaseChart {
    pub fn new(i_b: DMatrix<f64>) -> Result<Self> {
        let n = i_b.nrows();
        if i_b.ncols() != n || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameters("base complex structure must be square of even size".into()));
        }
        let defect = (&i_b * &i_b + DMatrix::identity(n, n)).amax();
        if defect > 1e-12 {
            return Err(Error::InvalidParameters(format!("I_B² ≠ −1 (defect {defect:.3e})")));
        }
        Ok(BaseChart { i_b })
    }

    /// Coordinates `(s₁…s_m, t₁…t_m)` with `I_B ∂s_k = ∂t_k`.
    pub fn standard(m: usize) -> Self {
        let mut i_b = DMatrix::zeros(2 * m, 2 * m);
        for k in 0..m {
            i_b[(m + k, k)] = 1.0;
            i_b[(k, m + k)] = -1.0;
        }
        BaseChart { i_b }
    }

    pub fn dim(&self) -> usize {
        self.i_b.nrows()
    }

    pub fn i_b(&self) -> &DMatrix<f64> {
        &self.i_b
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        (&self.i_b * nalgebra::DVector::from_column_slice(y)).iter().copied().collect()
    }
}

/// A complex structure on the fibre as a function of the base point.
pub type FibreComplexStructure = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// Draws `(base point, fibre point)` from a family's natural domain.
pub type PointSampler = Arc<dyn Fn(&mut ChaCha20Rng) -> Result<(Vec<f64>, Vec<f64>)> + Send + Sync>;

#[derive(Clone)]
pub struct FamilyModel {
    name: String,
    base: BaseChart,
    fibre: PoissonChart,
    tensor: PoissonTensor,
    phi: Vec<ScalarField<C>>,
    moment: Option<ScalarField<C>>,
    fibre_j: Option<FibreComplexStructure>,
    sampler: Option<PointSampler>,
}

impl std::fmt::Debug for FamilyModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyModel")
            .field("name", &self.name)
            .field("base_dim", &self.base.dim())
            .field("fibre_dim", &self.fibre.dim())
            .field("moment", &self.moment.is_some())
            .finish()
    }
}

/// A point of the product chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub base: Vec<f64>,
    pub fibre: Vec<f64>,
}

impl FamilyPoint {
    pub fn new(base: Vec<f64>, fibre: Vec<f64>) -> Self {
        FamilyPoint { base, fibre }
    }

    pub fn product(&self) -> Vec<C> {
        let all: Vec<f64> = self.base.iter().chain(&self.fibre).copied().collect();
        lift(&all)
    }
}

/// `c(Y) = Σ_a Y_a c_a`, one fibre function per base coordinate.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub potentials: Vec<ScalarField<C>>,
}

impl ConnectionData {
    pub fn potential(&self, y: &[f64]) -> ScalarField<C> {
        combine(&self.potentials, y)
    }
}

fn combine(fields: &[ScalarField<C>], y: &[f64]) -> ScalarField<C> {
    let dim = fields[0].dim();
    let terms = fields
        .iter()
        .zip(y)
        .filter(|(_, &c)| c != 0.0)
        .map(|(f, &c)| (C::new(c, 0.0), f.clone()))
        .collect();
    ScalarField::linear_combination(dim, terms)
}

fn combine_vec(vs: &[Vec<C>], y: &[f64]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); vs[0].len()];
    for (v, &c) in vs.iter().zip(y) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * c;
        }
    }
    out
}

fn dot_base(g: &[C], y: &[f64]) -> C {
    g.iter().zip(y).map(|(a, &b)| a * b).sum()
}

fn re_vec(v: &[C]) -> Vec<C> {
    v.iter().map(|c| C::new(c.re, 0.0)).collect()
}

fn im_vec(v: &[C]) -> Vec<C> {
    v.iter().map(|c| C::new(c.im, 0.0)).collect()
}

fn conj_vec(v: &[C]) -> Vec<C> {
    v.iter().map(|c| c.conj()).collect()
}

fn scale_vec(v: &[C], k: C) -> Vec<C> {
    v.iter().map(|c| c * k).collect()
}

/// Residuals of the θ-Fourier decomposition of the curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierFlatness {
    /// `|F_A + k₀{φ,φ̄}|` from the fitted constant term.
    pub r0: f64,
    /// `|d_Aφ|` from the fitted first harmonic.
    pub r2: f64,
    /// `|{φ,φ}|` from the fitted second harmonic.
    pub r4: f64,
    /// Largest grid deviation from the fitted trigonometric polynomial.
    pub reconstruction_error: f64,
    /// Differences between the fitted coefficients and the direct expressions.
    pub mismatch: [f64; 3],
}

impl FourierFlatness {
    pub fn max_residual(&self) -> f64 {
        self.r0.max(self.r2).max(self.r4)
    }
}

/// Residuals of the five structure identities and of the decomposition
/// `{φ,φ} = ({β,β} − {γ,γ}) + 2i{β,γ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureIdentities {
    pub beta_beta_minus_gamma_gamma: f64,
    pub beta_gamma: f64,
    pub curvature_gamma: f64,
    pub d_beta: f64,
    pub d_gamma: f64,
    pub decomposition: f64,
}

impl StructureIdentities {
    pub fn max(&self) -> f64 {
        [self.beta_beta_minus_gamma_gamma, self.beta_gamma, self.curvature_gamma, self.d_beta, self.d_gamma]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Gradients of `φ_a` on the product chart at one point.
struct PhiGradients {
    g: Vec<Vec<C>>,
}

impl FamilyModel {
    /// `phi[a]` is `φ(∂_a)` for base coordinate `a`, a field on the product chart.
    pub fn new(name: &str, base: BaseChart, fibre: PoissonChart, phi: Vec<ScalarField<C>>) -> Result<Self> {
        let total = base.dim() + fibre.dim();
        if phi.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: phi.len() });
        }
        if let Some(bad) = phi.iter().find(|f| f.dim() != total) {
            return Err(Error::DimensionMismatch { expected: total, found: bad.dim() });
        }
        let tensor = fibre.tensor().embedded(total, base.dim());
        Ok(FamilyModel {
            name: name.to_string(),
            base,
            fibre,
            tensor,
            phi,
            moment: None,
            fibre_j: None,
            sampler: None,
        })
    }

    pub fn with_moment_map(mut self, f: ScalarField<C>) -> Result<Self> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.dim() });
        }
        self.moment = Some(f);
        Ok(self)
    }

    pub fn with_fibre_complex_structure(mut self, j: FibreComplexStructure) -> Self {
        self.fibre_j = Some(j);
        self
    }

    pub fn with_sampler(mut self, s: PointSampler) -> Self {
        self.sampler = Some(s);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &BaseChart {
        &self.base
    }

    pub fn fibre(&self) -> &PoissonChart {
        &self.fibre
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fibre_dim(&self) -> usize {
        self.fibre.dim()
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.fibre.dim()
    }

    pub fn phi_components(&self) -> &[ScalarField<C>] {
        &self.phi
    }

    pub fn moment_map(&self) -> Option<&ScalarField<C>> {
        self.moment.as_ref()
    }

    /// Fibre bracket on the product chart.
    pub fn tensor(&self) -> &PoissonTensor {
        &self.tensor
    }

    pub fn fibre_complex_structure(&self, base: &[f64]) -> Option<DMatrix<f64>> {
        self.fibre_j.as_ref().map(|j| j(base))
    }

    pub fn sample_point(&self, rng: &mut ChaCha20Rng) -> Result<FamilyPoint> {
        let s = self.sampler.as_ref().ok_or_else(|| Error::InvalidParameters("family has no sampler".into()))?;
        let (b, f) = s(rng)?;
        Ok(FamilyPoint::new(b, f))
    }

    fn check_point(&self, p: &FamilyPoint) -> Result<Vec<C>> {
        if p.base.len() != self.base_dim() {
            return Err(Error::DimensionMismatch { expected: self.base_dim(), found: p.base.len() });
        }
        if p.fibre.len() != self.fibre_dim() {
            return Err(Error::DimensionMismatch { expected: self.fibre_dim(), found: p.fibre.len() });
        }
        Ok(p.product())
    }

    /// `φ(Y)`.
    pub fn phi(&self, y: &[f64]) -> ScalarField<C> {
        combine(&self.phi, y)
    }

    /// `(β(Y), γ(Y)) = (Re φ(Y), Im φ(Y))`.
    pub fn decompose(&self, y: &[f64]) -> (ScalarField<C>, ScalarField<C>) {
        let phi = self.phi(y);
        (phi.re(), phi.im())
    }

    /// `|φ(I_B Y) − i φ(Y)|` at `p`.
    pub fn complex_linearity_defect(&self, p: &FamilyPoint, y: &[f64]) -> Result<f64> {
        let q = self.check_point(p)?;
        let a = self.phi(&self.base.apply(y)).value(&q)?;
        let b = self.phi(y).value(&q)?;
        Ok((a - C::new(0.0, 1.0) * b).norm())
    }

    /// `∇_A = d_B − γ/2`.
    pub fn connection_a(&self) -> ConnectionData {
        let potentials = self.phi.iter().map(|p| p.im().scale(C::new(-0.5, 0.0))).collect();
        ConnectionData { potentials }
    }

    /// `∇_θ = ∇_A − (i/4)(e^{2iθ}φ − e^{−2iθ}φ̄)`; `θ = 0` is the flat product connection.
    pub fn theta_connection(&self, theta: f64) -> ConnectionData {
        let u = C::new(0.0, -0.25) * C::from_polar(1.0, 2.0 * theta);
        let dim = self.dim();
        let potentials = self
            .phi
            .iter()
            .map(|p| {
                ScalarField::linear_combination(
                    dim,
                    vec![(C::new(-0.5, 0.0), p.im()), (u, p.clone()), (u.conj(), p.conj())],
                )
            })
            .collect();
        ConnectionData { potentials }
    }

    /// `F(Y,Z) = Y c(Z) − Z c(Y) + {c(Y), c(Z)}` at `p`.
    pub fn curvature(&self, conn: &ConnectionData, p: &FamilyPoint, y: &[f64], z: &[f64]) -> Result<C> {
        let q = self.check_point(p)?;
        let grads = conn.potentials.iter().map(|c| c.gradient(&q)).collect::<Result<Vec<_>>>()?;
        Ok(self.curvature_from_gradients(&grads, y, z))
    }

    fn curvature_from_gradients(&self, grads: &[Vec<C>], y: &[f64], z: &[f64]) -> C {
        let cy = combine_vec(grads, y);
        let cz = combine_vec(grads, z);
        dot_base(&cz, y) - dot_base(&cy, z) + self.tensor.pair(&cy, &cz)
    }

    fn phi_gradients(&self, q: &[C]) -> Result<PhiGradients> {
        Ok(PhiGradients { g: self.phi.iter().map(|f| f.gradient(q)).collect::<Result<_>>()? })
    }

    /// Direct expressions `(F_A + k₀{φ,φ̄}, d_Aφ, {φ,φ})` on `(Y, Z)`.
    fn direct_terms(&self, pg: &PhiGradients, y: &[f64], z: &[f64]) -> [C; 3] {
        let gy = combine_vec(&pg.g, y);
        let gz = combine_vec(&pg.g, z);
        let cy = scale_vec(&im_vec(&gy), C::new(-0.5, 0.0));
        let cz = scale_vec(&im_vec(&gz), C::new(-0.5, 0.0));
        let pair = |a: &[C], b: &[C]| self.tensor.pair(a, b);
        let f_a = dot_base(&cz, y) - dot_base(&cy, z) + pair(&cy, &cz);
        let phi_phibar = pair(&gy, &conj_vec(&gz)) - pair(&gz, &conj_vec(&gy));
        let d_a_phi = dot_base(&gz, y) - dot_base(&gy, z) + pair(&cy, &gz) - pair(&cz, &gy);
        let phi_phi = 2.0 * pair(&gy, &gz);
        [f_a + FOURIER_CONSTANTS.k0 * phi_phibar, d_a_phi, phi_phi]
    }

    /// Fits `θ ↦ F_θ(Y,Z)` on [`FOURIER_GRID`] points and compares the
    /// coefficients with the direct expressions.
    pub fn fourier_flatness(&self, p: &FamilyPoint, y: &[f64], z: &[f64]) -> Result<FourierFlatness> {
        let q = self.check_point(p)?;
        let n = FOURIER_GRID;
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let theta = std::f64::consts::PI * k as f64 / n as f64;
            samples.push(self.curvature(&self.theta_connection(theta), p, y, z)?);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::FitFailure("non-finite curvature sample".into()));
        }
        let psi = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let coeff = |m: i32| -> C {
            samples.iter().enumerate().map(|(k, s)| s * C::from_polar(1.0, -(m as f64) * psi(k))).sum::<C>() / n as f64
        };
        let c: Vec<(i32, C)> = (-2..=2).map(|m| (m, coeff(m))).collect();
        let reconstruction_error = samples
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let fit: C = c.iter().map(|&(m, cm)| cm * C::from_polar(1.0, m as f64 * psi(k))).sum();
                (s - fit).norm()
            })
            .fold(0.0, f64::max);
        let (c0, c1, c2) = (c[2].1, c[3].1, c[4].1);
        let direct = self.direct_terms(&self.phi_gradients(&q)?, y, z);
        let mismatch = [(c0 - direct[0]).norm(), (c1 - k2() * direct[1]).norm(), (c2 - k4() * direct[2]).norm()];
        Ok(FourierFlatness {
            r0: c0.norm(),
            r2: c1.norm() / k2().norm(),
            r4: c2.norm() / k4().norm(),
            reconstruction_error,
            mismatch,
        })
    }

    /// The five structure identities implied by Fourier flatness, at `(Y, Z)`.
    pub fn structure_identities(&self, p: &FamilyPoint, y: &[f64], z: &[f64]) -> Result<StructureIdentities> {
        let q = self.check_point(p)?;
        let pg = self.phi_gradients(&q)?;
        let gy = combine_vec(&pg.g, y);
        let gz = combine_vec(&pg.g, z);
        let (by, bz, cy, cz) = (re_vec(&gy), re_vec(&gz), im_vec(&gy), im_vec(&gz));
        let pair = |a: &[C], b: &[C]| self.tensor.pair(a, b);
        let bb = 2.0 * pair(&by, &bz);
        let gg = 2.0 * pair(&cy, &cz);
        let bg = pair(&by, &cz) - pair(&bz, &cy);
        let half = C::new(-0.5, 0.0);
        let (ay, az) = (scale_vec(&cy, half), scale_vec(&cz, half));
        let f_a = dot_base(&az, y) - dot_base(&ay, z) + pair(&ay, &az);
        let d_beta = dot_base(&bz, y) - dot_base(&by, z);
        let d_gamma = dot_base(&cz, y) - dot_base(&cy, z);
        let phi_phi = 2.0 * pair(&gy, &gz);
        Ok(StructureIdentities {
            beta_beta_minus_gamma_gamma: (bb - gg).norm(),
            beta_gamma: bg.norm(),
            curvature_gamma: (f_a + gg / 8.0).norm(),
            d_beta: d_beta.norm(),
            d_gamma: (d_gamma - gg / 2.0).norm(),
            decomposition: (phi_phi - (bb - gg) - C::new(0.0, 2.0) * bg).norm(),
        })
    }

    /// `(|{γ(Y), f} − 2β(Y)|, |d_B f(Y) − ½{γ(Y), f}|)` at `p`.
    pub fn equivariance_residuals(&self, p: &FamilyPoint, y: &[f64]) -> Result<(f64, f64)> {
        let f = self.moment.as_ref().ok_or(Error::MissingMomentMap)?;
        let q = self.check_point(p)?;
        let gf = f.gradient(&q)?;
        let g_phi = combine_vec(&self.phi_gradients(&q)?.g, y);
        let gamma = im_vec(&g_phi);
        let beta = self.phi(y).value(&q)?.re;
        let gamma_f = self.tensor.pair(&gamma, &gf);
        let r1 = (gamma_f - 2.0 * beta).norm();
        let r2 = (dot_base(&gf, y) - 0.5 * gamma_f).norm();
        Ok((r1, r2))
    }

    /// Levi form `−(i/8) ∂h ᵀ P ∂h̄` of `h = φ(Y)` on the fibre, which equals
    /// `−F_A(Y, I_B Y)` on Fourier-flat families. Requires `h` fibre-holomorphic.
    pub fn levi_form(&self, p: &FamilyPoint, y: &[f64], tol: f64) -> Result<f64> {
        Ok(self.levi_details(p, y, tol)?.value)
    }

    pub fn levi_details(&self, p: &FamilyPoint, y: &[f64], tol: f64) -> Result<LeviValue> {
        let q = self.check_point(p)?;
        let j = self
            .fibre_complex_structure(&p.base)
            .ok_or_else(|| Error::InvalidParameters("fibre has no complex structure".into()))?;
        let m = self.base_dim();
        let grad = self.phi(y).gradient(&q)?;
        let g = nalgebra::DVector::from_column_slice(&grad[m..]);
        let jt = j.transpose().map(|v| C::new(v, 0.0));
        let jg = &jt * &g;
        let i = C::new(0.0, 1.0);
        let dbar_residual = (&jg - &g * i).norm();
        let scale = 1.0 + g.norm();
        if dbar_residual > tol * scale {
            return Err(Error::NotHolomorphic { residual: dbar_residual });
        }
        let dh = (&g - &jg * i) * C::new(0.5, 0.0);
        let dh_bar: Vec<C> = dh.iter().map(|c| c.conj()).collect();
        let dh_vec: Vec<C> = dh.iter().copied().collect();
        let bracket = self.fibre.tensor().pair(&dh_vec, &dh_bar);
        let value = (C::new(0.0, -0.125) * bracket).re;
        Ok(LeviValue { value, dbar_residual, holomorphic_gradient: dh.norm() })
    }

    /// `Γ = Σ_a γ_a db_a` as a 1-form field on the product chart.
    pub fn gamma_form(&self) -> FormField<C> {
        let terms = self.phi.iter().enumerate().map(|(a, p)| (vec![a], p.im())).collect();
        FormField::new(self.dim(), 1, terms).expect("valid indices")
    }

    fn omega_product(&self) -> DMatrix<f64> {
        let (m, n) = (self.base_dim(), self.fibre_dim());
        let mut w = DMatrix::zeros(m + n, m + n);
        w.view_mut((m, m), (n, n)).copy_from(self.fibre.omega());
        w
    }

    /// `Ω = ω₁ + s·½ dΓ` on the product chart, `s` = [`PREQUANTUM_SIGN`].
    pub fn prequantum_form(&self, p: &FamilyPoint) -> Result<FormValue<C>> {
        let q = self.check_point(p)?;
        let omega = FormValue::from_matrix(&self.omega_product(), 1e-12)?.to_complex();
        let d_gamma = self.gamma_form().d().eval(&q)?;
        Ok(omega.add(&d_gamma.scale(C::new(0.5 * PREQUANTUM_SIGN, 0.0))))
    }

    /// Largest coefficient of `dΩ` at `p`.
    pub fn prequantum_closedness(&self, p: &FamilyPoint) -> Result<f64> {
        let q = self.check_point(p)?;
        Ok(self.gamma_form().d().d().eval(&q)?.norm() * 0.5)
    }

    /// The product complex structure `[[I_B, 0], [V I_B − J V, J]]` with
    /// `V Y = ½ P ∇_F γ(Y)` the vertical part of the horizontal lift.
    pub fn product_complex_structure(&self, p: &FamilyPoint) -> Result<DMatrix<f64>> {
        let q = self.check_point(p)?;
        let j = self
            .fibre_complex_structure(&p.base)
            .ok_or_else(|| Error::InvalidParameters("fibre has no complex structure".into()))?;
        let (m, n) = (self.base_dim(), self.fibre_dim());
        let mut v = DMatrix::zeros(n, m);
        for (a, f) in self.phi.iter().enumerate() {
            let g = f.gradient(&q)?;
            let fib: Vec<f64> = g[m..].iter().map(|c| c.im).collect();
            let col = self.fibre.tensor().apply(&fib);
            for r in 0..n {
                v[(r, a)] = 0.5 * col[r];
            }
        }
        let ib = self.base.i_b();
        let mut out = DMatrix::zeros(m + n, m + n);
        out.view_mut((0, 0), (m, m)).copy_from(ib);
        out.view_mut((m, 0), (n, m)).copy_from(&(&v * ib - &j * &v));
        out.view_mut((m, m), (n, n)).copy_from(&j);
        Ok(out)
    }

    /// `½‖Ω − J_totᵀ Ω J_tot‖`, the size of the (2,0)+(0,2) part of Ω.
    pub fn prequantum_type_residual(&self, p: &FamilyPoint) -> Result<f64> {
        let omega = self.prequantum_form(p)?.to_matrix().map(|c| c.re);
        let jt = self.product_complex_structure(p)?;
        Ok(0.5 * (&omega - jt.transpose() * &omega * &jt).amax())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LeviValue {
    pub value: f64,
    pub dbar_residual: f64,
    /// `‖∂_F φ(Y)‖` at the point.
    pub holomorphic_gradient: f64,
}

#[cfg(test)]
mod tests;
