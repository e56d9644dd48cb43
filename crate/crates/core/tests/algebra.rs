mod common;

use common::arb_poly;
use num_traits::{One, Zero};
use proptest::prelude::*;
use wdvv_core::algebra::*;
use wdvv_core::exprlang::{format_polynomial, parse_polynomial};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn arb_square(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(arb_rational(), n), n)
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in arb_poly(3, 3, 5), b in arb_poly(3, 3, 5), c in arb_poly(3, 3, 5)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(3), a.clone());
    }

    #[test]
    fn mixed_partials_commute(a in arb_poly(3, 4, 6), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(a.partial(i).partial(j), a.partial(j).partial(i));
    }

    #[test]
    fn leibniz_rule(a in arb_poly(2, 3, 4), b in arb_poly(2, 3, 4), i in 0usize..2) {
        prop_assert_eq!((&a * &b).partial(i), &(&a.partial(i) * &b) + &(&a * &b.partial(i)));
    }

    #[test]
    fn inverse_is_two_sided(m in arb_square(4)) {
        if let Some(inv) = invert(&m) {
            let id: Vec<Vec<Rational>> = (0..4)
                .map(|i| (0..4).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect();
            prop_assert_eq!(mat_mul(&m, &inv), id.clone());
            prop_assert_eq!(mat_mul(&inv, &m), id);
        }
    }

    #[test]
    fn signature_invariant_under_congruence(d in prop::collection::vec(prop_oneof![arb_rational()], 3), p in arb_square(3)) {
        prop_assume!(d.iter().all(|x| !x.is_zero()));
        prop_assume!(invert(&p).is_some());
        let diag = ConstSymMatrix::diagonal(&d).unwrap();
        let congruent = mat_mul(&mat_mul(&transpose(&p), diag.entries()), &p);
        let c = ConstSymMatrix::new(congruent).unwrap();
        prop_assert_eq!(c.signature(), diag.signature());
        let positive = d.iter().filter(|x| **x > Rational::zero()).count();
        prop_assert_eq!(diag.signature().positive, positive);
    }

    #[test]
    fn gradient_integrates_back(a in arb_poly(3, 3, 6)) {
        let back = integrate_exact_one_form(&a.gradient()).unwrap();
        prop_assert_eq!(back, a.strip_low_degree(0));
    }

    #[test]
    fn hessian_integrates_back(a in arb_poly(3, 3, 6)) {
        let back = integrate_exact_two_form(&a.hessian()).unwrap();
        prop_assert_eq!(back, a.strip_low_degree(1));
    }

    #[test]
    fn format_parse_round_trip(a in arb_poly(4, 4, 6)) {
        let text = format_polynomial(&a);
        let back = parse_polynomial(&text, 4).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(format_polynomial(&back), text);
    }

    #[test]
    fn parser_rejects_out_of_range_variables(k in 4usize..20) {
        let text = format!("u1 + u{}", k);
        let err = parse_polynomial(&text, 3).unwrap_err();
        prop_assert_eq!(err.position, 5);
    }
}

#[test]
fn non_closed_form_is_reported() {
    let form = vec![Poly::var(2, 1), Poly::zero(2)];
    assert!(integrate_exact_one_form(&form).is_err());
}
