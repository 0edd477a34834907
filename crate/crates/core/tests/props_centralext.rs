use loopcx::abelcoh::{skew, FinAbGroup};
use loopcx::centralext::{Extension, LoopCocycle};
use loopcx::liegroup::MatrixGroupSpec;
use loopcx::loopspace::{Interval, SampledLoop};
use loopcx::Phase;
use proptest::prelude::*;
use std::sync::Arc;

fn su2() -> Arc<MatrixGroupSpec> {
    Arc::new(MatrixGroupSpec::su2(1.0))
}

fn bump(g: &Arc<MatrixGroupSpec>, n: usize, (a, b): (f64, f64), c: &[f64]) -> SampledLoop {
    SampledLoop::bump(g.clone(), n, Interval::new(a, b).unwrap(), &g.algebra_from_coords(c)).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.8f64..0.8, 3)
}

fn left() -> impl Strategy<Value = (f64, f64)> {
    (0.2f64..1.2).prop_flat_map(|a| (Just(a), a + 1.0..2.9))
}

fn right() -> impl Strategy<Value = (f64, f64)> {
    (3.3f64..4.5).prop_flat_map(|a| (Just(a), a + 1.0..6.0))
}

fn labelled() -> (Extension, FinAbGroup, LoopCocycle) {
    let k = FinAbGroup::parse("3,3").unwrap();
    let c = LoopCocycle::parse_with_labels("label-bilinear(1/3, [[1,1],[2,0]])", Some(&k)).unwrap();
    (Extension::cocycle(su2(), 64, c.clone(), Some(k.clone())), k, c)
}

fn label() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..3, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn labelled_pairing_is_the_skew_of_the_label_cocycle(
        ia in left(), ib in right(), c in coeffs(), d in coeffs(), la in label(), lb in label(), z in -3.0f64..3.0,
    ) {
        let (ext, _, cocycle) = labelled();
        let g = ext.group().clone();
        let (a, b) = (bump(&g, 64, ia, &c), bump(&g, 64, ib, &d));
        let x = ext.lift_labeled(&a, &la).unwrap();
        let y = ext.lift_labeled(&b, &lb).unwrap();
        let p = ext.commutator_phase(&x, &y).unwrap();
        let LoopCocycle::Label(kappa) = cocycle else { unreachable!() };
        let want = Phase::from_root(skew(&kappa).unwrap().eval(&la, &lb));
        prop_assert!((p - want).is_zero_exact());
        // Rotating the lifts changes nothing, exactly.
        let zp = Phase::from_radians(z);
        let q = ext.commutator_phase(&x.rotate(zp), &y.rotate(-zp)).unwrap();
        prop_assert!((q - p).is_zero_exact());
        prop_assert!((ext.commutator_phase(&y, &x).unwrap() + p).is_zero_exact());
    }

    #[test]
    fn labelled_pairing_is_biadditive(
        ia in left(), ib in right(), ic in left(), c in coeffs(), d in coeffs(), e in coeffs(),
        la in label(), lb in label(), lc in label(),
    ) {
        let (ext, _, _) = labelled();
        let g = ext.group().clone();
        let x1 = ext.lift_labeled(&bump(&g, 64, ia, &c), &la).unwrap();
        let x2 = ext.lift_labeled(&bump(&g, 64, ic, &e), &lc).unwrap();
        let y = ext.lift_labeled(&bump(&g, 64, ib, &d), &lb).unwrap();
        let lhs = ext.commutator_phase(&ext.mul(&x1, &x2).unwrap(), &y).unwrap();
        let rhs = ext.commutator_phase(&x1, &y).unwrap() + ext.commutator_phase(&x2, &y).unwrap();
        prop_assert!((lhs - rhs).is_zero_exact());
        let p = ext.project(&ext.mul(&x1, &y).unwrap()).unwrap();
        let q = ext.project(&x1).unwrap().pointwise_mul(&ext.project(&y).unwrap()).unwrap();
        prop_assert_eq!(p.max_deviation(&q).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn path_model_pairing_is_skew_and_biadditive(ia in left(), ib in right(), ic in left(), c in coeffs(), d in coeffs(), e in coeffs()) {
        let g = su2();
        let ext = Extension::path(g.clone(), 32, 32);
        let (a1, a2, b) = (bump(&g, 32, ia, &c), bump(&g, 32, ic, &e), bump(&g, 32, ib, &d));
        let pab = ext.commutator_pairing(&a1, &b).unwrap();
        prop_assert!((pab + ext.commutator_pairing(&b, &a1).unwrap()).abs_angle() < 1e-12);
        let prod = ext.commutator_pairing(&a1.pointwise_mul(&a2).unwrap(), &b).unwrap();
        let sum = pab + ext.commutator_pairing(&a2, &b).unwrap();
        prop_assert!((prod - sum).abs_angle() < 1e-3);
    }
}
