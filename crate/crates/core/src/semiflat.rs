//! Semiflat hyperkähler 2-form triples built from a prepotential.
//!
//! Total chart coordinates are `(x₁…x_{2m}, ξ₁…ξ_{2m})`. With `H` the Hessian of
//! the prepotential and `Ω` the constant pairing on x-space the triple is
//!
//! ```text
//! ω₂ = Σ H_jk dx_j∧dξ_k              W₂ = [[0, H], [−H, 0]]
//! ω₃ + iω₁ = −½ Σ Ω_jk dz_j∧dz_k      W₃ = [[−Ω, 0], [0, Ω]],  W₁ = [[0, −Ω], [−Ω, 0]]
//! ```
//!
//! with `z_j = x_j + iξ_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::calculus::{FormField, FormValue, Polynomial, ScalarField};
use crate::error::{Error, Result};

/// Singular-Hessian threshold for the build warning.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Prepotential {
    m: usize,
    f: ScalarField<f64>,
    omega: DMatrix<f64>,
    omega_inv: DMatrix<f64>,
}

impl Prepotential {
    pub fn new(f: ScalarField<f64>, omega: DMatrix<f64>) -> Result<Self> {
        let n = omega.nrows();
        if n == 0 || !n.is_multiple_of(2) || !omega.is_square() {
            return Err(Error::InvalidParameters(format!("x-space pairing must be even-dimensional, got {n}")));
        }
        if f.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.dim() });
        }
        let defect = (&omega + omega.transpose()).amax();
        if defect > 1e-12 {
            return Err(Error::NotAntisymmetric(defect));
        }
        let omega_inv = omega.clone().try_inverse().ok_or_else(|| Error::Singular("x-space pairing".into()))?;
        Ok(Prepotential { m: n / 2, f, omega, omega_inv })
    }

    /// `Ω = Σ dx_{2j−1}∧dx_{2j}`.
    pub fn standard_pairing(m: usize) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(2 * m, 2 * m);
        for j in 0..m {
            w[(2 * j, 2 * j + 1)] = 1.0;
            w[(2 * j + 1, 2 * j)] = -1.0;
        }
        w
    }

    /// `½|x|²` with the standard pairing.
    pub fn flat(m: usize) -> Self {
        Self::new(Self::flat_polynomial(m).into_field(), Self::standard_pairing(m)).expect("flat prepotential")
    }

    pub fn flat_polynomial(m: usize) -> Polynomial<f64> {
        let mut p = Polynomial::zero(2 * m);
        for k in 0..2 * m {
            let mut e = vec![0; 2 * m];
            e[k] = 2;
            p = &p + &Polynomial::monomial(2 * m, e, 0.5);
        }
        p
    }

    /// Half-dimension `m` (x-space has dimension 2m, total chart 4m).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn f(&self) -> &ScalarField<f64> {
        &self.f
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.f.hessian(x)
    }

    fn x_part<'a>(&self, p: &'a [f64]) -> Result<&'a [f64]> {
        let n = 2 * self.m;
        match p.len() {
            l if l == n || l == 2 * n => Ok(&p[..n]),
            l => Err(Error::DimensionMismatch { expected: 2 * n, found: l }),
        }
    }
}

/// `Re P(w)` with `w_j = x_{2j−1} + i x_{2j}`, for a complex polynomial `P` in m variables.
pub fn real_part_of_holomorphic(m: usize, p: &Polynomial<Complex64>) -> Polynomial<f64> {
    assert_eq!(p.dim(), m);
    let i = Complex64::i();
    let w: Vec<Polynomial<Complex64>> = (0..m)
        .map(|j| &Polynomial::coordinate(2 * m, 2 * j) + &Polynomial::coordinate(2 * m, 2 * j + 1).scale(i))
        .collect();
    p.compose(&w).map_coeffs(|c| c.re)
}

#[derive(Clone, Debug)]
pub struct HyperkahlerTriple {
    pub omega1: FormValue<f64>,
    pub omega2: FormValue<f64>,
    pub omega3: FormValue<f64>,
    /// Set when the Hessian is (numerically) singular.
    pub warning: Option<String>,
}

impl HyperkahlerTriple {
    pub fn dim(&self) -> usize {
        self.omega2.dim()
    }

    pub fn scale_omega2(&self, k: f64) -> Self {
        HyperkahlerTriple { omega2: self.omega2.scale(k), ..self.clone() }
    }
}

fn block_matrices(h: &DMatrix<f64>, omega: &DMatrix<f64>) -> [DMatrix<f64>; 3] {
    let n = h.nrows();
    let mut w1 = DMatrix::zeros(2 * n, 2 * n);
    let mut w2 = DMatrix::zeros(2 * n, 2 * n);
    let mut w3 = DMatrix::zeros(2 * n, 2 * n);
    w2.view_mut((0, n), (n, n)).copy_from(h);
    w2.view_mut((n, 0), (n, n)).copy_from(&(-h));
    w3.view_mut((0, 0), (n, n)).copy_from(&(-omega));
    w3.view_mut((n, n), (n, n)).copy_from(omega);
    w1.view_mut((0, n), (n, n)).copy_from(&(-omega));
    w1.view_mut((n, 0), (n, n)).copy_from(&(-omega));
    [w1, w2, w3]
}

/// The triple at `p` (an x-point or a total-chart point; ξ does not enter).
pub fn build_triple(prep: &Prepotential, p: &[f64]) -> Result<HyperkahlerTriple> {
    let x = prep.x_part(p)?;
    let h = prep.hessian(x)?;
    let [w1, w2, w3] = block_matrices(&h, &prep.omega);
    let det = h.determinant();
    let warning = (det.abs() <= SINGULAR_TOL * h.amax().max(1.0).powi(h.nrows() as i32))
        .then(|| format!("Hessian is singular (det = {det:.3e}); complex structures will be degenerate"));
    Ok(HyperkahlerTriple {
        omega1: FormValue::from_matrix(&w1, 0.0)?,
        omega2: FormValue::from_matrix(&w2, 1e-12)?,
        omega3: FormValue::from_matrix(&w3, 0.0)?,
        warning,
    })
}

/// `ω₁, ω₂, ω₃` as form fields on the total chart, with exact coefficient fields.
pub fn triple_fields(prep: &Prepotential) -> [FormField<f64>; 3] {
    let n = 2 * prep.m;
    let total = 2 * n;
    let mut t2 = Vec::new();
    for j in 0..n {
        let fj = prep.f.partial_derivative(j);
        for k in 0..n {
            t2.push((vec![j, n + k], fj.partial_derivative(k).embed(total, 0)));
        }
    }
    let zero = DMatrix::zeros(n, n);
    let [w1, _, w3] = block_matrices(&zero, &prep.omega);
    let c1 = FormField::constant(&FormValue::from_matrix(&w1, 0.0).expect("antisymmetric"));
    let c3 = FormField::constant(&FormValue::from_matrix(&w3, 0.0).expect("antisymmetric"));
    let f2 = FormField::new(total, 2, t2).expect("valid basis tuples");
    [c1, f2, c3]
}

/// `max |dω_i|` at `p` for i = 1, 2, 3. Coefficients depend on x only.
pub fn closedness_residuals(prep: &Prepotential, p: &[f64]) -> Result<[f64; 3]> {
    let n = 2 * prep.m;
    let mut pt = prep.x_part(p)?.to_vec();
    pt.resize(2 * n, 0.0);
    let fields = triple_fields(prep);
    let mut out = [0.0; 3];
    for (o, f) in out.iter_mut().zip(fields.iter()) {
        *o = f.d().eval(&pt)?.norm();
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ComplexStructures {
    /// `ω₃⁻¹ω₂`, unnormalized.
    pub i: DMatrix<f64>,
    /// `−I⁻¹K⁻¹`, so that `IJK = −1` holds by construction.
    pub j: DMatrix<f64>,
    /// `ω₁⁻¹ω₂`, unnormalized.
    pub k: DMatrix<f64>,
    /// `I` rescaled so that `tr(I²) = −dim`, when `tr(I²) < 0`.
    pub i_normalized: Option<DMatrix<f64>>,
}

pub fn complex_structures(triple: &HyperkahlerTriple) -> Result<ComplexStructures> {
    let w1 = triple.omega1.to_matrix();
    let w2 = triple.omega2.to_matrix();
    let w3 = triple.omega3.to_matrix();
    let i = w3.lu().solve(&w2).ok_or_else(|| Error::Singular("ω₃".into()))?;
    let k = w1.lu().solve(&w2).ok_or_else(|| Error::Singular("ω₁".into()))?;
    let i_inv = i.clone().try_inverse().ok_or_else(|| Error::Singular("I = ω₃⁻¹ω₂".into()))?;
    let k_inv = k.clone().try_inverse().ok_or_else(|| Error::Singular("K = ω₁⁻¹ω₂".into()))?;
    let j = -(i_inv * k_inv);
    let dim = i.nrows() as f64;
    let tr = (&i * &i).trace();
    let i_normalized = (tr < 0.0).then(|| &i * (-dim / tr).sqrt());
    Ok(ComplexStructures { i, j, k, i_normalized })
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Largest operator norm among `I²+1, J²+1, K²+1, IJK+1` (strict matrices).
pub fn quaternion_residual(triple: &HyperkahlerTriple) -> Result<f64> {
    let cs = complex_structures(triple)?;
    let one = DMatrix::<f64>::identity(cs.i.nrows(), cs.i.nrows());
    let rels = [&cs.i * &cs.i + &one, &cs.j * &cs.j + &one, &cs.k * &cs.k + &one, &cs.i * &cs.j * &cs.k + &one];
    Ok(rels.iter().map(op_norm).fold(0.0, f64::max))
}

/// `ω_ζ = (ω₂ + iω₃)ζ² + 2iω₁ζ + (ω₂ − iω₃)`.
pub fn pencil_form(triple: &HyperkahlerTriple, zeta: Complex64) -> FormValue<Complex64> {
    let i = Complex64::i();
    let (o1, o2, o3) = (triple.omega1.to_complex(), triple.omega2.to_complex(), triple.omega3.to_complex());
    o2.add(&o3.scale(i))
        .scale(zeta * zeta)
        .add(&o1.scale(i * zeta * 2.0))
        .add(&o2.sub(&o3.scale(i)))
}

/// `‖ω_ζ^{n+1}‖`; the total chart must have dimension `4n`.
pub fn pencil_residual(triple: &HyperkahlerTriple, zeta: Complex64, n: usize) -> Result<f64> {
    if triple.dim() != 4 * n {
        return Err(Error::DimensionMismatch { expected: triple.dim() / 4, found: n });
    }
    Ok(pencil_form(triple, zeta).power(n + 1)?.norm())
}

#[derive(Clone, Debug)]
pub struct NonlinearResiduals {
    /// The literal 2-form `Σ Ω^{ij} f_ik f_jl dx_k∧dx_l` on x-space.
    pub strict: FormValue<f64>,
    /// `‖HΩ⁻¹H + Ω‖` (operator norm).
    pub normalized: f64,
}

pub fn nonlinear_residuals(prep: &Prepotential, p: &[f64]) -> Result<NonlinearResiduals> {
    let h = prep.hessian(prep.x_part(p)?)?;
    let m = &h * &prep.omega_inv * &h;
    let strict = FormValue::from_matrix(&(&m - m.transpose()), 1e-12)?;
    let normalized = op_norm(&(&m + &prep.omega));
    Ok(NonlinearResiduals { strict, normalized })
}

#[derive(Clone, Debug)]
pub struct VariationField {
    pub fdot: ScalarField<f64>,
    /// Declared to be the real part of an I-holomorphic function.
    pub holomorphic: bool,
}

#[derive(Clone, Debug)]
pub struct VariationResiduals {
    /// `Σ Ω^{ij}(f_ik ḟ_jl − ḟ_ik f_jl) dx_k∧dx_l`, antisymmetrized.
    pub linearized: FormValue<f64>,
    /// `‖d(I dḟ)‖` at the point.
    pub closedness: f64,
}

impl VariationResiduals {
    pub fn max(&self) -> f64 {
        self.linearized.norm().max(self.closedness)
    }
}

/// Tolerance on the normalized nonlinear residual for a valid background.
pub const BACKGROUND_TOL: f64 = 1e-8;

pub fn variation_check(prep: &Prepotential, v: &VariationField, p: &[f64]) -> Result<VariationResiduals> {
    let x = prep.x_part(p)?;
    let residual = nonlinear_residuals(prep, x)?.normalized;
    if residual > BACKGROUND_TOL {
        return Err(Error::InvalidBackground { residual });
    }
    let n = 2 * prep.m;
    if v.fdot.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.fdot.dim() });
    }
    let h = prep.hessian(x)?;
    let hdot = v.fdot.hessian(x)?;
    let m = &h * &prep.omega_inv * &hdot;
    let linearized = FormValue::from_matrix(&(&m - m.transpose()), 1e-12)?;

    // α_k = Σ_j I_jk ∂_j ḟ with I = Ω⁻¹H as fields
    let second: Vec<Vec<ScalarField<f64>>> = (0..n)
        .map(|l| {
            let fl = prep.f.partial_derivative(l);
            (0..n).map(|k| fl.partial_derivative(k)).collect()
        })
        .collect();
    let dfdot: Vec<ScalarField<f64>> = (0..n).map(|j| v.fdot.partial_derivative(j)).collect();
    let mut terms = Vec::new();
    for k in 0..n {
        let mut parts = Vec::new();
        for j in 0..n {
            let ijk = ScalarField::linear_combination(
                n,
                (0..n).filter(|&l| prep.omega_inv[(j, l)] != 0.0).map(|l| (prep.omega_inv[(j, l)], second[l][k].clone())).collect(),
            );
            parts.push((1.0, ijk.times(&dfdot[j])));
        }
        terms.push((vec![k], ScalarField::linear_combination(n, parts)));
    }
    let alpha = FormField::new(n, 1, terms)?;
    let closedness = alpha.d().eval(x)?.norm();
    Ok(VariationResiduals { linearized, closedness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_triple() -> HyperkahlerTriple {
        build_triple(&Prepotential::flat(1), &[0.3, -0.1]).unwrap()
    }

    #[test]
    fn flat_triple_components() {
        let t = flat_triple();
        // coordinates (x₁, x₂, ξ₁, ξ₂)
        assert_eq!(t.omega2.component(&[0, 2]), 1.0);
        assert_eq!(t.omega2.component(&[1, 3]), 1.0);
        assert_eq!(t.omega2.component(&[0, 3]), 0.0);
        assert_eq!(t.omega3.component(&[0, 1]), -1.0);
        assert_eq!(t.omega3.component(&[2, 3]), 1.0);
        assert_eq!(t.omega1.component(&[0, 3]), -1.0);
        assert_eq!(t.omega1.component(&[2, 1]), -1.0);
        assert!(t.warning.is_none());
    }

    #[test]
    fn zero_prepotential_warns() {
        let prep = Prepotential::new(ScalarField::constant(2, 0.0), Prepotential::standard_pairing(1)).unwrap();
        let t = build_triple(&prep, &[0.0, 0.0]).unwrap();
        assert_eq!(t.omega2.norm(), 0.0);
        assert_eq!(t.omega1, flat_triple().omega1);
        assert!(t.warning.is_some());
        assert!(complex_structures(&t).is_err());
    }

    #[test]
    fn flat_quaternions_and_pencil() {
        let t = flat_triple();
        assert!(quaternion_residual(&t).unwrap() <= 1e-12);
        let cs = complex_structures(&t).unwrap();
        let one = DMatrix::<f64>::identity(4, 4);
        assert!((&cs.i * &cs.i + &one).amax() <= 1e-12);
        for z in [Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0), Complex64::new(10.0, 0.0)] {
            assert!(pencil_residual(&t, z, 1).unwrap() <= 1e-10);
        }
        assert!(pencil_residual(&t, Complex64::new(1.0, 0.0), 2).is_err());
    }

    #[test]
    fn scaling_omega2_scales_i() {
        let t = flat_triple();
        let a = complex_structures(&t).unwrap().i;
        let b = complex_structures(&t.scale_omega2(2.5)).unwrap().i;
        assert!((b - a * 2.5).amax() < 1e-14);
    }

    #[test]
    fn flat_nonlinear_residuals() {
        let prep = Prepotential::flat(1);
        let r = nonlinear_residuals(&prep, &[0.2, 0.4]).unwrap();
        assert!(r.normalized <= 1e-12);
        // literal reading gives −2ω
        assert_eq!(r.strict.component(&[0, 1]), -2.0);
    }

    #[test]
    fn harmonic_variation_vs_negative() {
        let prep = Prepotential::flat(1);
        let w2 = Polynomial::<Complex64>::coordinate(1, 0).powi(2);
        let harmonic = VariationField { fdot: real_part_of_holomorphic(1, &w2).into_field(), holomorphic: true };
        let r = variation_check(&prep, &harmonic, &[0.3, -0.8]).unwrap();
        assert!(r.max() <= 1e-12);
        let x1sq = Polynomial::<f64>::coordinate(2, 0).powi(2);
        let neg = VariationField { fdot: x1sq.into_field(), holomorphic: false };
        let r = variation_check(&prep, &neg, &[0.3, -0.8]).unwrap();
        assert!((r.closedness - 2.0).abs() < 1e-12);
        assert!(r.linearized.norm() >= 1.0);
    }

    #[test]
    fn invalid_background_is_rejected() {
        let f = Prepotential::flat_polynomial(1).scale(3.0);
        let prep = Prepotential::new(f.into_field(), Prepotential::standard_pairing(1)).unwrap();
        let v = VariationField { fdot: ScalarField::constant(2, 1.0), holomorphic: true };
        assert!(matches!(variation_check(&prep, &v, &[0.1, 0.1]), Err(Error::InvalidBackground { .. })));
    }
}
