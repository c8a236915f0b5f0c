use matpoisson::poisson::{bracket, bracket_polys, generic_minor_bracket, minor_bracket, MinorSpec};
use matpoisson::polyalg::{
    func_from_json, func_to_json, parse_constant, parse_expr, Func, GaussRat, Monomial, Poly, RationalFn, Shape,
};
use matpoisson::quasiexp::{poly_roots, putzer_exp, QEFun, QETerm};
use matpoisson::weyl::{longest_element, Permutation};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    (1usize..=3, 1usize..=3).prop_map(|(m, n)| Shape::new(m, n))
}

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussRat::from_parts((a, b), (c, d)))
}

fn poly_in(s: Shape, terms: usize, max_degree: usize) -> impl Strategy<Value = Poly> {
    let dim = s.len();
    prop::collection::vec((prop::collection::vec(0..dim, 0..=max_degree), gauss()), 0..=terms).prop_map(move |ts| {
        Poly::from_terms(s, ts.into_iter().map(|(vars, c)| (Monomial::from_pairs(vars.into_iter().map(|v| (v, 1))), c)))
    })
}

fn poly_triple() -> impl Strategy<Value = (Poly, Poly, Poly)> {
    shape().prop_flat_map(|s| (poly_in(s, 4, 3), poly_in(s, 3, 2), poly_in(s, 3, 2)))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Complex64::new(a, b))
}

fn qefun() -> impl Strategy<Value = QEFun> {
    prop::collection::vec((complex(), prop::collection::vec(complex(), 1..=3)), 0..=3)
        .prop_map(|ts| QEFun::from_terms(ts.into_iter().map(|(alpha, coeffs)| QETerm { alpha, coeffs }).collect()))
}

fn minor_case() -> impl Strategy<Value = (Shape, (usize, usize), MinorSpec)> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(m, n)| {
            let r = 1..=m.min(n).min(3);
            (Just(Shape::new(m, n)), 1..=m, 1..=n, r)
        })
        .prop_flat_map(|(s, k, l, r)| {
            let rows = prop::sample::subsequence((1..=s.rows).collect::<Vec<_>>(), r);
            let cols = prop::sample::subsequence((1..=s.cols).collect::<Vec<_>>(), r);
            (Just(s), Just((k, l)), rows, cols)
        })
        .prop_map(|(s, kl, rows, cols)| (s, kl, MinorSpec::new(rows, cols).unwrap()))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric((f, g, _) in poly_triple()) {
        prop_assert!((&bracket_polys(&f, &g) + &bracket_polys(&g, &f)).is_zero());
    }

    #[test]
    fn bracket_is_a_derivation((f, g, h) in poly_triple()) {
        let lhs = bracket_polys(&f, &(&g * &h));
        let rhs = &(&bracket_polys(&f, &g) * &h) + &(&g * &bracket_polys(&f, &h));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_identity((f, g, h) in shape().prop_flat_map(|s| (poly_in(s, 2, 2), poly_in(s, 2, 2), poly_in(s, 2, 1)))) {
        let j = &(&bracket_polys(&f, &bracket_polys(&g, &h)) + &bracket_polys(&g, &bracket_polys(&h, &f)))
            + &bracket_polys(&h, &bracket_polys(&f, &g));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn quotient_bracket_matches_polynomial_bracket((f, g, d) in poly_triple()) {
        prop_assume!(!d.is_zero());
        let q = Func::from_rational(RationalFn::new(f.clone(), d.clone()).unwrap());
        // {f/d, g} = ({f,g} d − f {d,g}) / d²
        let want = RationalFn::new(
            &(&bracket_polys(&f, &g) * &d) - &(&f * &bracket_polys(&d, &g)),
            &d * &d,
        )
        .unwrap();
        let got = bracket(&q, &Func::Poly(g)).unwrap().to_rational();
        prop_assert!(got.sub(&want).is_zero());
    }

    #[test]
    fn minor_formula_matches_expansion((s, kl, spec) in minor_case()) {
        prop_assert_eq!(minor_bracket(s, kl, &spec).unwrap(), generic_minor_bracket(s, kl, &spec).unwrap());
    }

    #[test]
    fn printed_polynomials_parse_back(p in shape().prop_flat_map(|s| poly_in(s, 4, 3))) {
        let q = parse_expr(&p.to_string(), p.shape()).unwrap();
        prop_assert_eq!(q, Func::Poly(p));
    }

    #[test]
    fn printed_constants_parse_back(q in gauss()) {
        prop_assert_eq!(parse_constant(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn func_json_round_trip((f, _, d) in poly_triple()) {
        prop_assume!(!d.is_zero());
        let h = Func::from_rational(RationalFn::new(f, d).unwrap());
        prop_assert_eq!(func_from_json(&func_to_json(&h), h.shape()).unwrap(), h);
    }

    #[test]
    fn qe_eval_matches_naive(f in qefun(), t in complex()) {
        prop_assert!(close(f.eval(t), f.eval_naive(t), 1e-10));
    }

    #[test]
    fn qe_antiderivative_inverts_derivative(f in qefun(), t in complex()) {
        let g = f.antiderivative().derivative();
        prop_assert!(close(g.eval(t), f.eval(t), 1e-8));
    }

    #[test]
    fn qe_product_evaluates_pointwise(f in qefun(), g in qefun(), t in complex()) {
        prop_assert!(close((&f * &g).eval(t), f.eval(t) * g.eval(t), 1e-9));
    }

    #[test]
    fn putzer_exponential_is_a_flow(entries in prop::collection::vec(complex(), 9), s in complex(), t in complex()) {
        let c = DMatrix::from_vec(3, 3, entries);
        let e = putzer_exp(&c).unwrap();
        let lhs = e.eval(s + t);
        let rhs = e.eval(s) * e.eval(t);
        let err = (lhs - &rhs).norm();
        prop_assert!(err <= 1e-8 * (1.0 + rhs.norm()), "{}", err);
        let de = e.derivative().eval(t);
        let want = &c * e.eval(t);
        prop_assert!((de - &want).norm() <= 1e-8 * (1.0 + want.norm()));
    }

    #[test]
    fn roots_reproduce_polynomial(roots in prop::collection::vec(complex(), 1..=5)) {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let found = poly_roots(&coeffs).unwrap();
        prop_assert_eq!(found.iter().map(|c| c.multiplicity).sum::<usize>(), roots.len());
        for r in &roots {
            prop_assert!(found.iter().any(|c| (c.value - r).norm() < 1e-4));
        }
    }

    #[test]
    fn permutation_inverse(images in (1usize..=6).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())) {
        let p = Permutation::new(images).unwrap();
        let n = p.n();
        prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(n));
        prop_assert!(p.length() <= longest_element(n).length());
        prop_assert_eq!(p.inverse().length(), p.length());
    }
}
