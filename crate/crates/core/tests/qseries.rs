//! q-side invariants at random rational `q`.

use proptest::prelude::*;

use chebgf::qseries::{
    chi1t_check, d2_coeff, d_coeff, duality_check, fh_normalization, final_identity_numeric, ft_moment_u,
    ft_moment_u_quadrature, idb_check, tn_construct, tn_lower_products, QContext,
};
use chebgf::rational::rat;

fn ctx() -> impl Strategy<Value = QContext> {
    (-4i64..=4, 5i64..=9)
        .prop_filter("q != 0", |(n, _)| *n != 0)
        .prop_map(|(n, d)| QContext::new(rat(n, d)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duality_and_connection(c in ctx(), n in 0usize..=6, k in 0usize..=6) {
        prop_assert!(duality_check(&c, 8).unwrap().holds);
        let r = idb_check(&c, n, k).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn d_routes_agree(c in ctx(), n in 0usize..=8) {
        let d = d_coeff(&c, n).unwrap();
        prop_assert!(d.lemma_holds && d.routes_agree, "{d:?}");
        let d2 = d2_coeff(&c, n.min(6)).unwrap();
        prop_assert!(d2.routes_agree && d2.printed_match != Some(false), "{d2:?}");
    }

    #[test]
    fn numeric_identities(q in -0.7f64..=0.7, t in 0usize..=5, x in -1.0f64..=1.0, y in -1.0f64..=1.0, rho in -0.6f64..=0.6) {
        let r = chi1t_check(t, x, rho, q, 120, 80).unwrap();
        prop_assert!(r.difference <= 1e-9 + r.series_tail_bound + r.product_tail_bound, "{r:?}");
        let f = final_identity_numeric(x, y, rho, q, 160).unwrap();
        prop_assert!(f.difference <= 1e-8, "{f:?}");
    }

    #[test]
    fn h_density_is_normalized(q in -0.8f64..=0.8) {
        let r = fh_normalization(q, 256).unwrap();
        prop_assert!((r.integral - 1.0).abs() < 1e-9, "{r:?}");
        prop_assert!(r.max_product_deviation < 1e-9, "{r:?}");
    }

    #[test]
    fn first_kind_family_is_orthogonal(c in ctx()) {
        let r = tn_construct(&c, 8).unwrap();
        prop_assert!(r.degenerate.is_empty() && r.hu_holds);
        prop_assert!(r.gram.max_off_diagonal_relative < 1e-9, "{:?}", r.gram);
        prop_assert!(tn_lower_products(&c, 8).unwrap().is_empty());
    }

    #[test]
    fn moments_match_quadrature(c in ctx(), n in 0usize..=10) {
        let m = ft_moment_u(&c, n).unwrap();
        let quad = ft_moment_u_quadrature(&c, n, 128).unwrap();
        prop_assert!((m.value_f64 - quad).abs() <= 1e-10 + m.tail_bound, "{n}: {} vs {quad}", m.value_f64);
    }
}
