//! Algebraic invariants of the polynomial kernel, the denominators and the
//! closed forms, checked on random inputs.

use num_traits::{One, Zero};
use proptest::prelude::*;

use chebgf::chebyshev::{cheb_poly, cheb_table, ChebIndex, ChebKind};
use chebgf::denominator::{build_w, build_w_recursive};
use chebgf::genfun::{chi_closed, chi_series_oracle, GenSpec};
use chebgf::kibble::{kibble_closed_eval, kibble_closed_form, kibble_denominator, kibble_denominator_symbolic, pairs, CorrMatrix};
use chebgf::par::Exec;
use chebgf::poly::{Assignment, Poly, Var};
use chebgf::rational::{self, rat, Rational};

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::X(1)), Just(Var::X(2)), Just(Var::Rho), Just(Var::S(1))]
}

fn poly() -> impl Strategy<Value = Poly> {
    let term = (-6i64..=6, 1i64..=4, prop::collection::vec((var(), 0u16..=3), 0..=3));
    prop::collection::vec(term, 0..=5).prop_map(|ts| {
        ts.into_iter()
            .map(|(n, d, pw)| Poly::monomial(rat(n, d), &pw))
            .fold(Poly::zero(), |a, b| a + b)
    })
}

/// A rational point with `s1² = 1 − x1²`, so evaluation respects the sine reduction.
fn point() -> impl Strategy<Value = Assignment<Rational>> {
    (-5i64..=5, -4i64..=4, -3i64..=3).prop_map(|(t, y, r)| {
        let t = rat(t, 3);
        let den = Rational::one() + &t * &t;
        Assignment::new()
            .with(Var::X(1), (Rational::one() - &t * &t) / &den)
            .with(Var::S(1), (rat(2, 1) * &t) / &den)
            .with(Var::X(2), rat(y, 5))
            .with(Var::Rho, rat(r, 4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
        prop_assert_eq!(-(-&a), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), at in point()) {
        let (va, vb) = (a.eval(&at).unwrap(), b.eval(&at).unwrap());
        prop_assert_eq!((&a * &b).eval(&at).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval(&at).unwrap(), va + vb);
    }

    #[test]
    fn sine_markers_stay_reduced(a in poly(), b in poly()) {
        let p = &a * &b;
        prop_assert!(p.degree_in(Var::S(1)) <= 1);
    }

    #[test]
    fn parallel_product_matches_sequential(a in poly(), b in poly()) {
        prop_assert_eq!(a.mul_with(&b, Exec::Parallel), a.mul_with(&b, Exec::Sequential));
    }

    #[test]
    fn json_round_trip(a in poly()) {
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back = Poly::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn chebyshev_polys_match_recurrence(n in 0i64..=24, x in -1.0f64..=1.0) {
        for kind in [ChebKind::T, ChebKind::U] {
            let idx = if kind == ChebKind::T { ChebIndex::t(n) } else { ChebIndex::u(n) };
            // exact evaluation: the power basis is too ill-conditioned for f64 at n ~ 24
            let at = Assignment::new().with(Var::X(1), rational::from_f64(x).unwrap());
            let p = rational::to_f64(&cheb_poly(idx).eval(&at).unwrap());
            let r = cheb_table(kind, n as usize, x)[n as usize];
            prop_assert!((p - r).abs() <= 1e-12 * (1.0 + r.abs()), "{kind:?} {n} {x}: {p} vs {r}");
        }
        let a = x.acos();
        let t = cheb_table(ChebKind::T, n as usize, x)[n as usize];
        prop_assert!((t - (n as f64 * a).cos()).abs() < 1e-11);
    }

    #[test]
    fn closed_form_matches_series(k in 0usize..=2, n in 0usize..=2, shifts in prop::collection::vec(-2i64..=2, 4),
                                  xs in prop::collection::vec(-1.0f64..=1.0, 4), rho in -0.6f64..=0.6) {
        prop_assume!(k + n >= 1 && k + n <= 3);
        let p = k + n;
        let spec = GenSpec::new(k, n, shifts[..p].to_vec()).unwrap();
        let mut at = Assignment::new().with(Var::Rho, rho);
        for (i, x) in xs[..p].iter().enumerate() {
            at.set(Var::X(i as u8 + 1), *x);
        }
        let (closed, bound) = chi_closed(&spec).unwrap().compile().eval_f64(&at).unwrap();
        let series = chi_series_oracle(&spec, &xs[..p], rho, 240).unwrap();
        prop_assert!(series.tail_bound < 1e-12);
        let err = (closed - series.value).abs();
        prop_assert!(err <= 1e-8 + bound + series.tail_bound, "{}: {closed} vs {}", spec.label(), series.value);
    }

    #[test]
    fn symbolic_kibble_form_matches_angle_form(xs in prop::collection::vec(-0.95f64..=0.95, 3),
                                              r in prop::collection::vec(-0.3f64..=0.3, 3), u in any::<bool>()) {
        let kind = if u { ChebKind::U } else { ChebKind::T };
        let k = CorrMatrix::new(3, r.clone()).unwrap();
        let f = kibble_closed_form(kind, 3).unwrap();
        let mut at = Assignment::new();
        for (i, x) in xs.iter().enumerate() {
            at.set(Var::X(i as u8 + 1), *x);
        }
        for ((i, j), v) in pairs(3).into_iter().zip(&r) {
            at.set(Var::RhoPair(i as u8, j as u8), *v);
        }
        let symbolic = f.compile().value_f64(&at).unwrap();
        let alphas: Vec<f64> = xs.iter().map(|x| x.acos()).collect();
        let angle = kibble_closed_eval(kind, &alphas, &k).unwrap();
        prop_assert!((symbolic - angle).abs() <= 1e-9 * (1.0 + angle.abs()), "{symbolic} vs {angle}");
    }

    #[test]
    fn kibble_denominator_specializes_consistently(num in prop::collection::vec(-4i64..=4, 3)) {
        let exact: Vec<Rational> = num.iter().map(|&v| rat(v, 10)).collect();
        let k = CorrMatrix::from_rationals(3, exact.clone()).unwrap();
        let mut sym = kibble_denominator_symbolic(3).unwrap();
        for ((i, j), r) in pairs(3).into_iter().zip(&exact) {
            sym = sym.substitute(Var::RhoPair(i as u8, j as u8), &Poly::constant(r.clone()));
        }
        prop_assert_eq!(sym, kibble_denominator(&k).unwrap());
    }
}

#[test]
fn denominators_are_symmetric_and_agree() {
    for n in 1..=4 {
        let w = build_w(n).unwrap().poly;
        assert_eq!(build_w_recursive(n).unwrap().poly, w);
        assert_eq!(w.substitute_value(Var::Rho, &Rational::zero()), Poly::one());
        for i in 1..n as u8 {
            assert_eq!(w.swap(Var::X(i), Var::X(i + 1)), w, "w_{n} under x{i} <-> x{}", i + 1);
        }
        assert_eq!(w.degree_in(Var::Rho), 1 << n);
    }
    // V_3 is the product of the three pairwise w_2; x1 sits in two of them.
    let v = kibble_denominator_symbolic(3).unwrap();
    assert_eq!(v.degree_in(Var::X(1)), 4);
    assert_eq!(v.degree_in(Var::RhoPair(1, 2)), 4);
    assert_eq!(v.swap(Var::X(1), Var::X(2)).swap(Var::RhoPair(1, 3), Var::RhoPair(2, 3)), v);
}

#[test]
fn unshifted_forms_are_symmetric_within_a_kind() {
    for (k, n) in [(2, 0), (0, 2), (2, 1), (1, 2), (3, 0)] {
        let f = chi_closed(&GenSpec::unshifted(k, n).unwrap()).unwrap();
        let (a, b) = if k >= 2 { (1, 2) } else { (k as u8 + 1, k as u8 + 2) };
        assert_eq!(f.numerator.swap(Var::X(a), Var::X(b)), f.numerator, "({k},{n})");
        assert_eq!(f.denominator.swap(Var::X(a), Var::X(b)), f.denominator, "({k},{n})");
    }
}
