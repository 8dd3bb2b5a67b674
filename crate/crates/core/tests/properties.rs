use liemetric::homogeneous::{
    go_geodesic_exp, go_geodesic_from, go_geodesic_ode, lift_axiom_report, spray_fiber, EuclideanMotion, GoState,
    SigmaKappa,
};
use liemetric::lie_algebra::{commutator, CATALOG_NAMES};
use liemetric::metrizability::{
    ad_invariant_forms, el_residual, invariant_metrizability, FeasibilityStatus, InvariantLagrangian, SolverConfig,
};
use liemetric::spray::{exp_orbit, horizontal_apply, vertical_apply, GroupPoint, SecondTangentVector};
use liemetric::{catalog, AlgebraElement, LieAlgebra};
use nalgebra::{DMatrix, Vector2};
use proptest::prelude::*;

fn algebra_index() -> impl Strategy<Value = usize> {
    0..CATALOG_NAMES.len()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0_f64, n)
}

fn algebra(idx: usize) -> LieAlgebra {
    catalog(CATALOG_NAMES[idx]).unwrap()
}

/// An algebra together with `k` random elements of it.
fn with_elements(k: usize) -> impl Strategy<Value = (LieAlgebra, Vec<AlgebraElement>)> {
    algebra_index().prop_flat_map(move |idx| {
        let a = algebra(idx);
        let n = a.dim();
        (Just(a), prop::collection::vec(coords(n).prop_map(AlgebraElement::new), k))
    })
}

fn v2() -> impl Strategy<Value = Vector2<f64>> {
    (-2.0..2.0_f64, -2.0..2.0_f64).prop_map(|(x, y)| Vector2::new(x, y))
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric_and_bilinear((a, xs) in with_elements(3), s in -2.0..2.0_f64) {
        let (x, y, z) = (&xs[0], &xs[1], &xs[2]);
        let xy = a.bracket(x, y).unwrap();
        let yx = a.bracket(y, x).unwrap();
        prop_assert!(xy.add(&yx).max_abs() <= 1e-12);
        let lhs = a.bracket(&x.scale(s).add(z), y).unwrap();
        let rhs = xy.scale(s).add(&a.bracket(z, y).unwrap());
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-11);
    }

    #[test]
    fn ad_is_a_representation((a, xs) in with_elements(2)) {
        let (x, y) = (&xs[0], &xs[1]);
        let ad_xy = a.ad_matrix(&a.bracket(x, y).unwrap()).unwrap();
        let comm = commutator(&a.ad_matrix(x).unwrap(), &a.ad_matrix(y).unwrap());
        prop_assert!((ad_xy - comm).amax() <= 1e-11);
    }

    #[test]
    fn matrix_rep_is_a_homomorphism((a, xs) in with_elements(2)) {
        let rep = a.rep().unwrap();
        let (x, y) = (&xs[0], &xs[1]);
        let lhs = rep.embed(&a.bracket(x, y).unwrap()).unwrap();
        let rhs = commutator(&rep.embed(x).unwrap(), &rep.embed(y).unwrap());
        prop_assert!((lhs - rhs).amax() <= 1e-11);
    }

    #[test]
    fn projectors_split_the_double_tangent_space((a, xs) in with_elements(3)) {
        let alpha = &xs[0];
        let w = SecondTangentVector { a: xs[1].clone(), b: xs[2].clone() };
        let hw = horizontal_apply(&a, alpha, &w).unwrap();
        let vw = vertical_apply(&a, alpha, &w).unwrap();
        let hh = horizontal_apply(&a, alpha, &hw).unwrap();
        prop_assert_eq!(&hh, &hw);
        prop_assert!(vertical_apply(&a, alpha, &hw).unwrap().max_abs() <= 1e-14);
        prop_assert!(hw.b.add(&vw).sub(&w.b).max_abs() <= 1e-14);
    }

    #[test]
    fn invariant_forms_annihilate_the_euler_lagrange_pairing(
        (a, xs) in with_elements(2),
        weights in prop::collection::vec(-1.0..1.0_f64, 4),
    ) {
        let forms = ad_invariant_forms(&a);
        let n = a.dim();
        let g = forms.iter().zip(&weights).fold(DMatrix::zeros(n, n), |acc, (b, w)| acc + b * *w);
        let g = (&g + g.transpose()) * 0.5;
        let energy = InvariantLagrangian::quadratic_energy(&g);
        prop_assert!(el_residual(&a, &energy, &xs[0], &xs[1]).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn spray_fiber_is_two_homogeneous(kappa in -2.0..2.0_f64, y in v2(), s in 0.01..3.0_f64) {
        let lhs = spray_fiber(kappa, &(y * s));
        let rhs = spray_fiber(kappa, &y) * (s * s);
        prop_assert!((lhs - rhs).amax() <= 1e-12 * (1.0 + rhs.amax()));
    }

    #[test]
    fn go_geodesics_are_left_invariant(
        kappa in -2.0..2.0_f64,
        p in v2(),
        v in v2(),
        theta in -3.0..3.0_f64,
        b in v2(),
        t in 0.0..3.0_f64,
    ) {
        let g = EuclideanMotion { theta, translation: b };
        let start = GoState::new(p, v);
        let moved = g.apply(&go_geodesic_from(kappa, &start, t));
        let direct = go_geodesic_from(kappa, &g.apply(&start), t);
        prop_assert!((moved.position - direct.position).amax() <= 1e-9);
        prop_assert!((moved.velocity - direct.velocity).amax() <= 1e-9);
    }

    #[test]
    fn go_ode_matches_closed_form(kappa in -2.0..2.0_f64, v in v2(), t in 0.1..3.0_f64) {
        let path = go_geodesic_ode(kappa, &GoState::new(Vector2::zeros(), v), t, 2000).unwrap();
        let exact = go_geodesic_exp(kappa, &v, t);
        prop_assert!((path[2000].position - exact.position).amax() <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flows_are_left_invariant(
        (a, xs) in with_elements(2),
        t in -1.5..1.5_f64,
    ) {
        let m = a.rep().unwrap().size();
        let g = exp_orbit(&a, &GroupPoint::identity(m), &xs[0], 0.5).unwrap();
        let translated = exp_orbit(&a, &g, &xs[1], t).unwrap();
        let at_identity = exp_orbit(&a, &GroupPoint::identity(m), &xs[1], t).unwrap();
        let expected = g.matrix() * at_identity.matrix();
        let scale = 1.0 + expected.amax();
        prop_assert!((translated.matrix() - expected).amax() <= 1e-12 * scale);
    }

    #[test]
    fn verdicts_are_scale_invariant(idx in algebra_index(), s in 0.1..10.0_f64) {
        let a = algebra(idx);
        let config = SolverConfig::default();
        let base = invariant_metrizability(&a, &config).unwrap();
        let scaled = invariant_metrizability(&a.scaled(s), &config).unwrap();
        prop_assert_eq!(base.status, scaled.status);
        prop_assert_eq!(base.subspace_dim, scaled.subspace_dim);
    }

    #[test]
    fn solver_is_deterministic(idx in algebra_index(), seed in any::<u64>()) {
        let a = algebra(idx);
        let config = SolverConfig::with_seed(seed);
        let first = invariant_metrizability(&a, &config).unwrap();
        let second = invariant_metrizability(&a, &config).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_ne!(first.status, FeasibilityStatus::Undetermined);
    }

    #[test]
    fn lift_axioms_hold_for_the_family(kappa in -3.0..3.0_f64, seed in any::<u64>()) {
        let report = lift_axiom_report(&SigmaKappa { kappa }, 50, seed);
        prop_assert!(report.passes(1e-12));
    }
}
