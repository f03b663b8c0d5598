use super::fixtures::*;
use super::transport::*;
use super::*;
use crate::calculus::Polynomial;
use rand::SeedableRng;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn dirs(fam: &FamilyModel, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    (random_direction(&mut r, fam.base_dim()), random_direction(&mut r, fam.base_dim()))
}

#[test]
fn decomposition_and_complex_linearity() {
    for fam in [weight2(C::new(0.7, -0.4)).unwrap(), siegel(2).unwrap()] {
        let mut r = rng(1);
        let p = fam.sample_point(&mut r).unwrap();
        let (y, _) = dirs(&fam, 2);
        assert!(fam.complex_linearity_defect(&p, &y).unwrap() < 1e-12);
        let (b, g) = fam.decompose(&y);
        let q = p.product();
        let phi = fam.phi(&y).value(&q).unwrap();
        let rebuilt = b.value(&q).unwrap() + C::new(0.0, 1.0) * g.value(&q).unwrap();
        assert!((phi - rebuilt).norm() < 1e-14);
        // decompose at I_B Y is (−γ(Y), β(Y))
        let (bi, gi) = fam.decompose(&fam.base().apply(&y));
        assert!((bi.value(&q).unwrap() + g.value(&q).unwrap()).norm() < 1e-12);
        assert!((gi.value(&q).unwrap() - b.value(&q).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn theta_family_special_values() {
    let fam = random_polynomial(3).unwrap();
    let p = fam.sample_point(&mut rng(4)).unwrap();
    let q = p.product();
    let y = [0.3, -0.8];
    let c0 = fam.theta_connection(0.0).potential(&y).value(&q).unwrap();
    assert!(c0.norm() < 1e-13);
    let cpi = fam.theta_connection(std::f64::consts::PI).potential(&y).value(&q).unwrap();
    assert!(cpi.norm() < 1e-13);
    let chalf = fam.theta_connection(std::f64::consts::FRAC_PI_2).potential(&y).value(&q).unwrap();
    let gamma = fam.decompose(&y).1.value(&q).unwrap();
    assert!((chalf + gamma).norm() < 1e-12);
}

#[test]
fn curvature_hand_oracle() {
    // base (t₁, t₂), fibre (x, ξ); c(∂t₁) = t₂ h, c(∂t₂) = 0 gives F(∂t₁, ∂t₂) = −h
    let fam = weight2(C::new(1.0, 0.0)).unwrap();
    let t2 = Polynomial::<C>::coordinate(4, 1);
    let x = Polynomial::<C>::coordinate(4, 2);
    let xi = Polynomial::<C>::coordinate(4, 3);
    let h = &(&x * &xi) + &x;
    let conn = ConnectionData { potentials: vec![(&t2 * &h).into_field(), Polynomial::zero(4).into_field()] };
    let p = FamilyPoint::new(vec![0.2, -0.4], vec![0.9, 0.5]);
    let f = fam.curvature(&conn, &p, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!((f + h.eval(&p.product())).norm() < 1e-14);
    let flat = ConnectionData { potentials: vec![Polynomial::zero(4).into_field(); 2] };
    assert_eq!(fam.curvature(&flat, &p, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), C::new(0.0, 0.0));
}

#[test]
fn fourier_fit_matches_direct_expressions() {
    for name in ["weight2", "weight1", "siegel1", "siegel2", "random-poly", "holomorphic"] {
        let fam = by_name(name, 5).unwrap();
        let mut r = rng(6);
        for _ in 0..3 {
            let p = fam.sample_point(&mut r).unwrap();
            let y = random_direction(&mut r, fam.base_dim());
            let z = random_direction(&mut r, fam.base_dim());
            let ff = fam.fourier_flatness(&p, &y, &z).unwrap();
            assert!(ff.reconstruction_error <= 1e-10, "{name}: {ff:?}");
            assert!(ff.mismatch.iter().all(|m| *m <= 1e-9), "{name}: {ff:?}");
        }
    }
}

#[test]
fn siegel_families_are_flat() {
    for g in [1, 2] {
        let fam = siegel(g).unwrap();
        let mut r = rng(7);
        for _ in 0..5 {
            let p = fam.sample_point(&mut r).unwrap();
            let y = random_direction(&mut r, fam.base_dim());
            let z = random_direction(&mut r, fam.base_dim());
            let ff = fam.fourier_flatness(&p, &y, &z).unwrap();
            assert!(ff.max_residual() <= 1e-9, "g={g}: {ff:?}");
            let ids = fam.structure_identities(&p, &y, &z).unwrap();
            assert!(ids.max() <= 1e-8, "{ids:?}");
            assert!(ids.decomposition <= 1e-12);
        }
    }
}

#[test]
fn random_polynomials_are_not_flat() {
    let fam = random_polynomial(8).unwrap();
    let p = fam.sample_point(&mut rng(9)).unwrap();
    let ff = fam.fourier_flatness(&p, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!(ff.max_residual() > 1e-3);
    let ids = fam.structure_identities(&p, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!(ids.decomposition <= 1e-12);
}

#[test]
fn genus2_phi_phi_vanishes() {
    let fam = genus2_fed().unwrap();
    let mut r = rng(10);
    let p = fam.sample_point(&mut r).unwrap();
    let y = random_direction(&mut r, 6);
    let z = random_direction(&mut r, 6);
    let ff = fam.fourier_flatness(&p, &y, &z).unwrap();
    assert!(ff.r4 <= 1e-8, "{ff:?}");
    assert!(ff.reconstruction_error <= 1e-10);
}

#[test]
fn equivariance() {
    let mut r = rng(11);
    let w2 = weight2(C::new(0.7, -0.4)).unwrap();
    let p = w2.sample_point(&mut r).unwrap();
    assert!(w2.equivariance_residuals(&p, &[1.0, 0.0]).unwrap().0 <= 1e-10);
    let w1 = weight1(C::new(0.7, -0.4)).unwrap();
    assert!(w1.equivariance_residuals(&p, &[1.0, 0.0]).unwrap().0 >= 1e-2);
    for g in [1, 2] {
        let fam = siegel(g).unwrap();
        let p = fam.sample_point(&mut r).unwrap();
        let y = random_direction(&mut r, fam.base_dim());
        let (r1, r2) = fam.equivariance_residuals(&p, &y).unwrap();
        assert!(r1 <= 1e-8 && r2 <= 1e-8, "{r1} {r2}");
    }
    let none = random_polynomial(1).unwrap();
    assert!(matches!(none.equivariance_residuals(&p, &[1.0, 0.0]), Err(Error::MissingMomentMap)));
}

#[test]
fn levi_of_z_squared() {
    let fam = weight2(C::new(1.0, 0.0)).unwrap();
    let p = FamilyPoint::new(vec![0.0, 0.0], vec![0.6, -0.3]);
    let v = fam.levi_form(&p, &[1.0, 0.0], 1e-10).unwrap();
    assert!((v + 0.45).abs() < 1e-14, "{v}");
    let origin = FamilyPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]);
    assert_eq!(fam.levi_form(&origin, &[1.0, 0.0], 1e-10).unwrap(), 0.0);
    let bad = random_polynomial(2).unwrap();
    assert!(matches!(bad.levi_form(&p, &[1.0, 0.0], 1e-10), Err(Error::NotHolomorphic { .. })));
}

#[test]
fn levi_matches_curvature_on_flat_families() {
    for g in [1, 2] {
        let fam = siegel(g).unwrap();
        let mut r = rng(12);
        let p = fam.sample_point(&mut r).unwrap();
        let y = random_direction(&mut r, fam.base_dim());
        let levi = fam.levi_form(&p, &y, 1e-10).unwrap();
        let f = fam.curvature(&fam.connection_a(), &p, &y, &fam.base().apply(&y)).unwrap();
        assert!(levi < 0.0);
        assert!((levi + f.re).abs() <= 1e-9 * (1.0 + levi.abs()), "{levi} {f}");
    }
}

#[test]
fn prequantum_form_is_closed_and_of_type_11() {
    let fam = random_polynomial(3).unwrap();
    let p = fam.sample_point(&mut rng(13)).unwrap();
    assert!(fam.prequantum_closedness(&p).unwrap() <= 1e-9);
    let omega = fam.prequantum_form(&p).unwrap();
    // fibre restriction equals ω₁ − ½ d_Fγ has only fibre part ω₁ since γ has no fibre legs
    assert!((omega.component(&[2, 3]) - C::new(1.0, 0.0)).norm() < 1e-14);
    for g in [1, 2] {
        let fam = siegel(g).unwrap();
        let p = fam.sample_point(&mut rng(14)).unwrap();
        let res = fam.prequantum_type_residual(&p).unwrap();
        assert!(res <= 1e-9, "g={g}: {res}");
    }
}

#[test]
fn oscillator_transport_closed_form() {
    let c = 1.3;
    let fam = oscillator(c).unwrap();
    let curve = Curve::segment(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
    let u0 = [0.4, -0.7];
    let out = parallel_transport(&fam, &curve, &u0, DEFAULT_STEPS_PER_UNIT).unwrap();
    let a = c / 2.0;
    let expect = [u0[0] * a.cos() + u0[1] * a.sin(), -u0[0] * a.sin() + u0[1] * a.cos()];
    assert!((out.endpoint[0] - expect[0]).abs() < 1e-7 && (out.endpoint[1] - expect[1]).abs() < 1e-7);
    assert!(symplectic_residual(&fam, &out.jacobian) < 1e-12);
}

#[test]
fn zero_gamma_transport_is_identity() {
    let fam = oscillator(0.0).unwrap();
    let curve = Curve::new(vec![vec![0.0, 0.0], vec![0.3, 0.2], vec![-0.1, 0.5]]).unwrap();
    let out = parallel_transport(&fam, &curve, &[0.2, 0.1], 100).unwrap();
    assert_eq!(out.endpoint, vec![0.2, 0.1]);
    assert_eq!(out.jacobian, DMatrix::identity(2, 2));
}

#[test]
fn siegel_transport_properties() {
    let fam = siegel(1).unwrap();
    let p = fam.sample_point(&mut rng(15)).unwrap();
    let curve = Curve::segment(&p.base, &[0.6, -0.3], 1.0).unwrap();
    let out = parallel_transport(&fam, &curve, &p.fibre, DEFAULT_STEPS_PER_UNIT).unwrap();
    assert!(symplectic_residual(&fam, &out.jacobian) <= 1e-6);
    let f = fam.moment_map().unwrap();
    let end = FamilyPoint::new(curve.vertices[1].clone(), out.endpoint.clone());
    let drift = (f.value(&end.product()).unwrap() - f.value(&p.product()).unwrap()).norm();
    assert!(drift <= 1e-6, "{drift}");
    let ratio = order_ratio(&fam, &curve, &p.fibre, 20).unwrap();
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    for eps in [0.1, 0.05] {
        let h = loop_holonomy(&fam, &p, &[1.0, 0.0], &[0.0, 1.0], eps, 2000).unwrap();
        assert!((h.ratio - 1.0).abs() <= 0.1, "{h:?}");
    }
}
