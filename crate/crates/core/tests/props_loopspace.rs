use loopcx::liegroup::{GroupName, MatrixGroupSpec};
use loopcx::loopspace::{cup, rep, res, uncup, Interval, SampledLoop};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn group(i: usize) -> Arc<MatrixGroupSpec> {
    let name = ["su2", "so(3)", "u1", "su(3)"][i];
    Arc::new(MatrixGroupSpec::new(GroupName::parse(name).unwrap(), 1.0))
}

fn bump(g: &Arc<MatrixGroupSpec>, n: usize, a: f64, b: f64, c: &[f64]) -> SampledLoop {
    let x = g.algebra_from_coords(&c[..g.basis().len()]);
    SampledLoop::bump(g.clone(), n, Interval::new(a, b).unwrap(), &x).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.9f64..0.9, 8)
}

/// A support interval of length ≥ 0.5 inside (lo, hi).
fn interval(lo: f64, hi: f64) -> impl Strategy<Value = (f64, f64)> {
    (lo..hi - 0.5).prop_flat_map(move |a| (Just(a), a + 0.5..hi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cup_is_a_homomorphism(i in 0..4usize, (a1, b1) in interval(0.05, 6.2), (a2, b2) in interval(0.05, 6.2), c in coeffs(), d in coeffs()) {
        let g = group(i);
        let (p, q) = (uncup(&bump(&g, 64, a1, b1, &c)).unwrap(), uncup(&bump(&g, 64, a2, b2, &d)).unwrap());
        let lhs = cup(&p.pointwise_mul(&q).unwrap()).unwrap();
        let rhs = cup(&p).unwrap().pointwise_mul(&cup(&q).unwrap()).unwrap();
        prop_assert_eq!(lhs.max_deviation(&rhs).unwrap(), 0.0);
    }

    #[test]
    fn rep_and_res_are_injective_homomorphisms(i in 0..4usize, (a1, b1) in interval(0.05, 3.1), (a2, b2) in interval(0.05, 3.1), c in coeffs(), d in coeffs()) {
        let g = group(i);
        let (x, y) = (bump(&g, 64, a1, b1, &c), bump(&g, 64, a2, b2, &d));
        let (rx, ry) = (res(&x).unwrap(), res(&y).unwrap());
        prop_assert_eq!(res(&x.pointwise_mul(&y).unwrap()).unwrap().max_deviation(&rx.pointwise_mul(&ry).unwrap()).unwrap(), 0.0);
        let lhs = rep(&rx.pointwise_mul(&ry).unwrap()).unwrap();
        prop_assert_eq!(lhs.max_deviation(&rep(&rx).unwrap().pointwise_mul(&rep(&ry).unwrap()).unwrap()).unwrap(), 0.0);
        // Distinct loops stay distinct.
        let dx = x.max_deviation(&y).unwrap();
        prop_assert_eq!(dx == 0.0, rx.max_deviation(&ry).unwrap() == 0.0);
        prop_assert_eq!(dx == 0.0, rep(&rx).unwrap().max_deviation(&rep(&ry).unwrap()).unwrap() == 0.0);
    }

    #[test]
    fn declared_supports_are_sound(i in 0..4usize, (a, b) in interval(0.0, 2.0 * PI), c in coeffs(), n in prop::sample::select(vec![32usize, 64, 128])) {
        let g = group(i);
        let l = bump(&g, n, a, b, &c);
        prop_assert!(l.support_violation().is_none());
        let e = g.identity();
        for (j, s) in l.samples().iter().enumerate() {
            let t = 2.0 * PI * j as f64 / n as f64;
            if !(a < t && t < b) {
                prop_assert!(s.max_abs_diff(&e) == 0.0);
            }
        }
    }

    #[test]
    fn flip_reverses_the_derivative(i in 0..4usize, (a, b) in interval(0.3, 6.0), c in coeffs()) {
        let g = group(i);
        let n = 256;
        let l = bump(&g, n, a, b, &c);
        let f = l.flip();
        let h = 2.0 * PI / n as f64;
        // Central difference through the group: log(γ_{j−1}⁻¹ γ_{j+1}) / 2h.
        let deriv = |x: &SampledLoop, j: usize| {
            let s = x.samples();
            let d = g.log(&g.inverse(&s[(j + n - 1) % n]).matmul(&s[(j + 1) % n])).unwrap();
            d.scale(1.0 / (2.0 * h))
        };
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let lhs = deriv(&f, j);
            let rhs = deriv(&l, (n - j) % n).scale(-1.0);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        prop_assert!(worst <= 10.0 / n as f64, "{}", worst);
    }
}
