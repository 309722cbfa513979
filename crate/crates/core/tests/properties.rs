mod common;

use common::props::*;
use proptest::prelude::*;
use qnilp::kacmoody::preset;

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn exchange_mutation_is_an_involution((b, d) in exchange_matrix()) {
        check_exchange_involution(&b, &d)?;
    }

    #[test]
    fn congruence_by_e_matrix_is_skew(
        m in skew_matrix(5),
        col in proptest::collection::vec(-3i64..=3, 5),
        k in 0usize..5,
        plus in any::<bool>(),
    ) {
        let mut col = col;
        col[k] = 0;
        check_congruence_skew(&m, &col, k, if plus { 1 } else { -1 })?;
    }

    #[test]
    fn mutation_walks_stay_compatible(
        which in 0usize..3,
        steps in proptest::collection::vec((0usize..8, any::<bool>()), 1..6),
    ) {
        let seeds = fixture_seeds();
        check_mutation_walk(&seeds[which].1, &steps)?;
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn multiplication_is_associative(
        which in 0usize..ALGEBRAS.len(),
        a in element(6), b in element(6), c in element(6),
    ) {
        let p = preset(ALGEBRAS[which]).unwrap().presentation;
        let n = p.n();
        let cut = |v: &[(Vec<u32>, i64, i64)]| -> Vec<(Vec<u32>, i64, i64)> {
            v.iter().map(|(f, x, e)| (f[..n].to_vec(), *x, *e)).collect()
        };
        check_associative(&p, &realize(n, &cut(&a)), &realize(n, &cut(&b)), &realize(n, &cut(&c)))?;
    }

    #[test]
    fn ordered_products_have_the_predicted_leading_term(
        which in 0usize..ALGEBRAS.len(),
        f in proptest::collection::vec(0u32..=2, 6),
    ) {
        let p = preset(ALGEBRAS[which]).unwrap().presentation;
        check_leading_term(&p, &f[..p.n()])?;
    }
}

#[test]
fn primes_quasi_commute_as_predicted() {
    for name in FIXTURES {
        assert_eq!(y_quasi_commutation_mismatches(name), Vec::<String>::new());
    }
}

#[test]
fn lambda_star_chains() {
    for name in FIXTURES {
        assert_eq!(lambda_star_mismatches(name), Vec::<String>::new());
    }
}
