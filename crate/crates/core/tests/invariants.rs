use hvw_core::calculus::forms::FormField;
use hvw_core::calculus::poisson::PoissonChart;
use hvw_core::calculus::poly::Polynomial;
use hvw_core::quadric::{self, HyperellipticConfig, OrbitPoint, QuadricSystem};
use hvw_core::semiflat::{build_triple, quaternion_residual, Prepotential};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn poly(dim: usize, degree: u32, rng: &mut ChaCha20Rng) -> Polynomial<f64> {
    Polynomial::random_dense(dim, degree, || rng.gen_range(-1.0..1.0))
}

fn point(dim: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let chart = PoissonChart::canonical(2);
        let t = chart.tensor();
        let (f, g, h) = (poly(4, 3, &mut rng), poly(4, 3, &mut rng), poly(4, 3, &mut rng));
        let p = point(4, &mut rng);
        let fg = t.polynomial_bracket(&f, &g).eval(&p);
        let gf = t.polynomial_bracket(&g, &f).eval(&p);
        prop_assert!((fg + gf).abs() <= 1e-12 * (1.0 + fg.abs()));
        let jac = t.polynomial_bracket(&f, &t.polynomial_bracket(&g, &h)).eval(&p)
            + t.polynomial_bracket(&g, &t.polynomial_bracket(&h, &f)).eval(&p)
            + t.polynomial_bracket(&h, &t.polynomial_bracket(&f, &g)).eval(&p);
        prop_assert!(jac.abs() <= 1e-9, "jacobiator {jac:e}");
    }

    #[test]
    fn polynomial_and_field_brackets_agree(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let chart = PoissonChart::canonical(2);
        let (f, g) = (poly(4, 3, &mut rng), poly(4, 3, &mut rng));
        let p = point(4, &mut rng);
        let exact = chart.tensor().polynomial_bracket(&f, &g).eval(&p);
        let via_jets = chart.bracket_at(&f.clone().into_field(), &g.clone().into_field(), &p).unwrap();
        prop_assert!((exact - via_jets).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let terms = (0..4).map(|k| (vec![k], poly(4, 3, &mut rng).into_field())).collect();
        let alpha = FormField::new(4, 1, terms).unwrap();
        let p = point(4, &mut rng);
        let dd = alpha.d().d().eval(&p).unwrap();
        prop_assert!(dd.norm() <= 1e-9, "|d²α| = {:e}", dd.norm());
    }

    #[test]
    fn quadric_relations_hold_off_the_constraints(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let cfg = HyperellipticConfig::random(&mut rng);
        let pt = OrbitPoint::random(&mut rng);
        let scale = 1.0 + quadric::hamiltonians(&cfg, &pt).iter().map(|f| f.norm()).fold(0.0, f64::max);
        prop_assert!(quadric::linear_relations(&cfg, &pt).max() <= 1e-10 * scale);
    }

    #[test]
    fn hamiltonians_scale_under_mobius(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let cfg = HyperellipticConfig::random(&mut rng);
        let pt = OrbitPoint::random(&mut rng);
        let m = [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0), Complex64::new(1.0, 0.0)];
        let det = m[0] * m[3] - m[1] * m[2];
        let Ok((moved, mpt)) = quadric::mobius_transform(&cfg, &pt, m) else { return Ok(()) };
        let before = quadric::hamiltonians(&cfg, &pt);
        let after = quadric::hamiltonians(&moved, &mpt);
        for (b, a) in before.iter().zip(after) {
            prop_assert!((a - b / det).norm() <= 1e-8 * (1.0 + b.norm()), "{a} vs {}", b / det);
        }
    }

    #[test]
    fn flat_prepotential_gives_quaternionic_triple(seed in 1u64..u64::MAX) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let prep = Prepotential::flat(2);
        let triple = build_triple(&prep, &point(4, &mut rng)).unwrap();
        prop_assert!(quaternion_residual(&triple).unwrap() <= 1e-12);
    }
}

#[test]
fn hamiltonians_commute_on_admissible_points() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let sys = QuadricSystem::new(HyperellipticConfig::random(&mut rng));
    for _ in 0..5 {
        let pt = sys.sample_admissible(rng.gen()).unwrap();
        let cm = sys.commutation_matrix(&pt).unwrap();
        assert!(cm.iter().all(|c| c.norm() <= 1e-8), "{cm}");
    }
}

#[test]
fn constructed_critical_points_have_a_common_root() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let sys = QuadricSystem::new(HyperellipticConfig::random(&mut rng));
    let pt = quadric::critical_point(&sys, 9, Complex64::new(0.7, -0.3)).unwrap();
    assert!(!sys.critical_locus(&pt, 1e-6).unwrap().is_empty());
    assert!(sys.levi_null_directions(&pt).unwrap().degenerate());
    let generic = sys.sample_admissible(9).unwrap();
    assert!(sys.critical_locus(&generic, 1e-6).unwrap().is_empty());
}
