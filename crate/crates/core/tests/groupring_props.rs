use num_rational::BigRational;
use onerel::groupring::{
    fox_derivative, fox_fundamental_sum, gr_multiply, project_to_quotient, support_lemma_probe,
    GroupRingElement, QuotientContext,
};
use onerel::magnus::{build_solver, ResourceBudget};
use onerel::words::{Alphabet, Letter, ReducedWord};
use onerel::Presentation;
use proptest::prelude::*;

fn word(gens: usize, max: usize) -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec((0..gens, any::<bool>()), 0..=max)
        .prop_map(|ls| ReducedWord::from_letters(ls.into_iter().map(|(g, i)| Letter::new(g, i))))
}

fn element(gens: usize) -> impl Strategy<Value = GroupRingElement> {
    prop::collection::vec((word(gens, 4), -3i64..=3), 0..5)
        .prop_map(GroupRingElement::from_int_terms)
}

fn ab() -> Alphabet {
    Alphabet::from_letters("ab").unwrap()
}

fn mono(w: &ReducedWord) -> GroupRingElement {
    GroupRingElement::monomial(w.clone(), BigRational::from_integer(1.into()))
}

proptest! {
    #[test]
    fn fox_fundamental_identity(w in word(3, 12)) {
        let alpha = Alphabet::from_letters("abc").unwrap();
        let expected = mono(&w).sub(&GroupRingElement::one());
        prop_assert_eq!(fox_fundamental_sum(&w, &alpha), expected);
    }

    #[test]
    fn fox_product_rule(u in word(2, 8), v in word(2, 8), s in 0usize..2) {
        let a = ab();
        let lhs = fox_derivative(&u.mul(&v), s, &a).unwrap();
        let rhs = fox_derivative(&u, s, &a).unwrap()
            .add(&mono(&u).mul_free(&fox_derivative(&v, s, &a).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn free_multiplication_is_associative(x in element(2), y in element(2), z in element(2)) {
        prop_assert_eq!(x.mul_free(&y).mul_free(&z), x.mul_free(&y.mul_free(&z)));
    }

    #[test]
    fn projection_is_a_ring_homomorphism(x in element(2), y in element(2)) {
        let p = Presentation::parse("ab", "aabb").unwrap();
        let ctx = QuotientContext::one_relator(build_solver(&p, ResourceBudget::default()).unwrap());
        let px = project_to_quotient(&x, &ctx).unwrap();
        let py = project_to_quotient(&y, &ctx).unwrap();
        prop_assert_eq!(
            project_to_quotient(&x.add(&y), &ctx).unwrap(),
            project_to_quotient(&px.add(&py), &ctx).unwrap()
        );
        prop_assert_eq!(
            project_to_quotient(&x.mul_free(&y), &ctx).unwrap(),
            gr_multiply(&px, &py, &ctx).unwrap()
        );
    }

    #[test]
    fn support_lemma_holds(x in element(2), y in element(2)) {
        prop_assume!(!x.is_zero() && !y.is_zero());
        prop_assert!(support_lemma_probe(&x, &y));
    }
}
