use std::f64::consts::PI;

/// Pairwise (cascade) summation; the tree depends only on the length, so the
/// result is the same however the terms were produced.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().fold(0.0, |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Reduces an angle to (−π, π].
pub(crate) fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// C∞ step from 0 to 1 on [0, 1], flat at both ends.
pub(crate) fn flat_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let f = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
    let a = f(u);
    a / (a + f(1.0 - u))
}

/// C∞ bump on (0, 1) with maximum 1 at the midpoint, zero outside.
pub(crate) fn flat_bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let x = 2.0 * u - 1.0;
    (1.0 - 1.0 / (1.0 - x * x)).exp()
}

/// Number of threads requested through `LOOPCX_THREADS`, if any.
pub fn thread_cap() -> Option<usize> {
    std::env::var("LOOPCX_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n: &usize| n > 0)
}

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on. Output order is index order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if n > 1 && thread_cap() != Some(1) {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_idempotent() {
        for x in [-7.0, -PI, -1.0, 0.0, PI, 3.5, 100.0] {
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI);
            assert_eq!(wrap_angle(w), w);
            assert!(((x - w) / (2.0 * PI) - ((x - w) / (2.0 * PI)).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_step_is_symmetric() {
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            assert!((flat_step(u) + flat_step(1.0 - u) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }
}
