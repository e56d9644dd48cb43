mod common;

use common::*;
use proptest::prelude::*;
use wdvv_core::algebra::{int, ConstSymMatrix, Poly, PolyMatrix};
use wdvv_core::frobenius::Potential;
use wdvv_core::hamop::*;
use wdvv_core::submanifold::*;

fn arb_psi_system() -> impl Strategy<Value = PsiSystem> {
    (prop::collection::vec(arb_poly(2, 3, 4), 2), prop::bool::ANY).prop_map(|(psi, split)| {
        let eta = ConstSymMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        let mu = if split {
            ConstSymMatrix::from_ints(&[&[1, 0], &[0, -1]]).unwrap()
        } else {
            ConstSymMatrix::identity(2)
        };
        PsiSystem::new(eta, mu, psi).unwrap()
    })
}

fn relation<'a>(rs: &'a [Relation], name: &str) -> &'a Relation {
    rs.iter().find(|r| r.name == name).unwrap()
}

fn curvature_is_zero(s: &PsiSystem) -> bool {
    zero_curvature_residual(s, &LaxParams::symbolic())
        .iter()
        .all(|(_, m)| m.is_zero())
}

#[test]
fn zero_curvature_on_corpus() {
    for text in [SOL1, SOL2, "0"] {
        for c in [int(1), int(-1)] {
            let s = reduce_potential(&potential(text), &c).unwrap();
            assert!(curvature_is_zero(&s), "{text}");
        }
    }
    for f in non_solutions(3, 5) {
        let s = reduce_potential(&Potential::with_deformation(&f).unwrap(), &int(1)).unwrap();
        let res = zero_curvature_residual(&s, &LaxParams::symbolic());
        assert!(res.iter().any(|(_, m)| !m.is_zero()));
        let n = s.n();
        for (_, m) in &res {
            assert!(m.entries().iter().all(|p| p.divisible_by_vars(&[n, n + 1])));
        }
    }
}

#[test]
fn reduced_sol1_is_hamiltonian() {
    let h = affinors_from_psi(&reduce_potential(&potential(SOL1), &int(1)).unwrap());
    let rs = check_relations(&h.to_general());
    assert!(is_hamiltonian(&rs));
    assert!(pencil_check(&h).passes());
    let w = h.affinors();
    for a in 0..3 {
        for b in 0..3 {
            assert!(w[a].commutator(&w[b]).is_zero());
        }
    }
}

#[test]
fn constant_operator_is_hamiltonian() {
    let h = FlatHamOp::new(ConstSymMatrix::antidiagonal(3), ConstSymMatrix::identity(0), vec![]).unwrap();
    assert!(is_hamiltonian(&check_relations(&h.to_general())));
    assert!(pencil_check(&h).passes());
}

#[test]
fn hierarchy_flows_of_wrong_size_are_rejected() {
    let a = HydroFlow::new(PolyMatrix::identity(2, 2)).unwrap();
    let b = HydroFlow::new(PolyMatrix::identity(3, 3)).unwrap();
    assert!(flows_commute_residual(&a, &b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_vanishes_iff_gauss_and_ricci(s in arb_psi_system()) {
        let flat = gauss_residual(&s).is_zero() && ricci_residual(&s).is_zero();
        prop_assert_eq!(curvature_is_zero(&s), flat);
        let fixed = LaxParams { lambda: Some(int(0)), rho: Some(int(0)) };
        prop_assert!(zero_curvature_residual(&s, &fixed).iter().all(|(_, m)| m.is_zero()));
        prop_assert!(codazzi_check(&s));
    }

    #[test]
    fn affinors_round_trip(s in arb_psi_system()) {
        let h = affinors_from_psi(&s);
        let back = psi_from_affinors(&h).unwrap();
        let (x, y) = (back.normalized(), s.normalized());
        prop_assert_eq!(x.psi(), y.psi());
    }

    #[test]
    fn relations_match_gauss_and_ricci(s in arb_psi_system()) {
        let rs = check_relations(&affinors_from_psi(&s).to_general());
        prop_assert_eq!(relation(&rs, "affinors-commute").passes(), ricci_residual(&s).is_zero());
        prop_assert_eq!(relation(&rs, "affinor-curvature").passes(), gauss_residual(&s).is_zero());
        prop_assert!(relation(&rs, "metric-curvature").passes());
    }

    #[test]
    fn commute_residual_is_antisymmetric(a in prop::collection::vec(arb_poly(2, 2, 3), 4), b in prop::collection::vec(arb_poly(2, 2, 3), 4)) {
        let mk = |v: Vec<Poly>| HydroFlow::new(PolyMatrix::from_rows(vec![v[..2].to_vec(), v[2..].to_vec()]).unwrap()).unwrap();
        let (fa, fb) = (mk(a), mk(b));
        let ab = flows_commute_residual(&fa, &fb).unwrap();
        let ba = flows_commute_residual(&fb, &fa).unwrap();
        for (x, y) in ab.entries().iter().zip(ba.entries()) {
            prop_assert_eq!(x, &-y.clone());
        }
        prop_assert!(flows_commute_residual(&fa, &fa).unwrap().is_zero());
    }
}
