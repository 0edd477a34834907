use loopcx::abelcoh::{
    enumerate_skew_bihoms, lift_alt_to_cocycle, modified_obstruction, random_cocycle, random_skew_bihom, skew,
    Cocycle2, FinAbGroup, RootOfUnity,
};
use loopcx::battery;
use proptest::prelude::*;

/// Every nondecreasing order vector with factors ≥ 2 and |K| ≤ 36.
fn small_groups() -> Vec<FinAbGroup> {
    fn go(prefix: &mut Vec<u64>, lo: u64, out: &mut Vec<FinAbGroup>) {
        let order: u64 = prefix.iter().product();
        if !prefix.is_empty() {
            out.push(FinAbGroup::new(prefix.clone()).unwrap());
        }
        for k in lo..=36 {
            if order * k > 36 {
                break;
            }
            prefix.push(k);
            go(prefix, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 2, &mut out);
    out
}

fn group() -> impl Strategy<Value = FinAbGroup> {
    prop::sample::select(small_groups())
}

#[test]
fn skew_inverts_the_alternating_lift_on_every_small_group() {
    let groups = small_groups();
    assert!(groups.len() > 40);
    for k in groups {
        for b in enumerate_skew_bihoms(&k).unwrap().into_iter().filter(|b| b.is_alternating()) {
            assert_eq!(skew(&lift_alt_to_cocycle(&b).unwrap()).unwrap(), b, "{}", k.label());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skew_is_a_homomorphism(k in group(), seed in any::<u64>()) {
        let mut rng = battery::rng(seed);
        let (a, b) = (random_cocycle(&k, &mut rng).unwrap(), random_cocycle(&k, &mut rng).unwrap());
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(skew(&ab).unwrap(), skew(&a).unwrap().mul(&skew(&b).unwrap()).unwrap());
        // Table and bilinear forms of the same cocycle have the same skew.
        prop_assert_eq!(skew(&ab.to_table().unwrap()).unwrap(), skew(&ab).unwrap());
    }

    #[test]
    fn coboundaries_have_trivial_skew(k in group(), seed in any::<u64>()) {
        let mut rng = battery::rng(seed);
        let rho: Vec<RootOfUnity> = (0..k.order()).map(|_| RootOfUnity::new(rand::Rng::gen_range(&mut rng, 0..12), 12)).collect();
        let c = Cocycle2::coboundary(&k, &rho).unwrap();
        c.cocycle_identity_check().unwrap();
        prop_assert!(skew(&c).unwrap().is_trivial());
    }

    #[test]
    fn skew_bihoms_split_into_alternating_times_diagonal(k in group(), seed in any::<u64>()) {
        let b = random_skew_bihom(&k, &mut battery::rng(seed));
        let (alt, diag) = b.decompose_skew().unwrap();
        prop_assert!(alt.is_alternating_exhaustive().unwrap());
        prop_assert!(diag.is_skew_exhaustive().unwrap());
        for i in 0..k.rank() {
            prop_assert_eq!(diag.entry(i, i).pow(2), RootOfUnity::ONE);
        }
        prop_assert_eq!(alt.mul(&diag).unwrap(), b);
    }

    #[test]
    fn modified_obstruction_divides_by_the_skew(k in group(), seed in any::<u64>()) {
        let mut rng = battery::rng(seed);
        let b = random_skew_bihom(&k, &mut rng);
        let kappa = random_cocycle(&k, &mut rng).unwrap();
        let bp = modified_obstruction(&b, &kappa).unwrap();
        prop_assert!(bp.is_skew());
        prop_assert_eq!(bp.mul(&skew(&kappa).unwrap()).unwrap(), b);
    }

    #[test]
    fn roots_of_unity_reduce_and_round_trip(p in -500i64..500, q in 1u64..200, r in -500i64..500) {
        let x = RootOfUnity::new(p, q);
        prop_assert_eq!(RootOfUnity::parse(&x.to_string()).unwrap(), x);
        prop_assert!(x.mul(x.inv()).is_one());
        prop_assert_eq!(x.pow(q as i64), RootOfUnity::ONE);
        let y = RootOfUnity::new(r, q);
        prop_assert_eq!(x.mul(y), RootOfUnity::new(p + r, q));
        prop_assert!((x.turns() - (p as f64 / q as f64).rem_euclid(1.0)).abs() < 1e-12);
    }
}
