//! Point and algebra representations used by the quadrature loops: unit
//! quaternions for SU(2), plain matrices otherwise.

use crate::liegroup::{su2_to_quat, AlgebraVector, CMat, GroupPoint, MatrixGroupSpec, LOG_BRANCH_MARGIN};

pub(crate) trait Chart: Sync {
    type P: Clone + Send + Sync;
    type A: Clone + Send + Sync;

    fn point(&self, g: &GroupPoint) -> Self::P;
    /// Principal log, `None` within the branch margin of −1.
    fn log(&self, p: &Self::P) -> Option<Self::A>;
    /// a⁻¹b.
    fn left_diff(&self, a: &Self::P, b: &Self::P) -> Self::P;
    /// The unnormalized form −Re tr(xy) (per factor conventions).
    fn raw(&self, x: &Self::A, y: &Self::A) -> f64;
    /// a·x + b·y.
    fn lin(&self, a: f64, x: &Self::A, b: f64, y: &Self::A) -> Self::A;
    /// g(ad_l)·v with g(z) = (z − 1 + e^{−z})/z².
    fn g_ad(&self, l: &Self::A, v: &Self::A) -> Self::A;
}

/// Quaternion coordinates in the basis (1, iσ₁, iσ₂, iσ₃). Note that
/// (iσ₁)(iσ₂) = −iσ₃, so the vector part multiplies with a minus cross product.
pub(crate) struct Su2Chart;

pub(crate) type Quat = [f64; 4];
pub(crate) type Vec3 = [f64; 3];

#[inline]
pub(crate) fn qmul(p: &Quat, q: &Quat) -> Quat {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + q[0] * p[1] - (p[2] * q[3] - p[3] * q[2]),
        p[0] * q[2] + q[0] * p[2] - (p[3] * q[1] - p[1] * q[3]),
        p[0] * q[3] + q[0] * p[3] - (p[1] * q[2] - p[2] * q[1]),
    ]
}

#[inline]
pub(crate) fn qconj(p: &Quat) -> Quat {
    [p[0], -p[1], -p[2], -p[3]]
}

#[inline]
fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Quaternion log as a vector, refusing points near −1.
#[inline]
pub(crate) fn qlog(q: &Quat) -> Option<Vec3> {
    let w = q[0];
    if (2.0 * (1.0 + w)).max(0.0).sqrt() < LOG_BRANCH_MARGIN {
        return None;
    }
    let s = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if s == 0.0 {
        return Some([0.0; 3]);
    }
    let f = s.atan2(w) / s;
    Some([q[1] * f, q[2] * f, q[3] * f])
}

#[inline]
pub(crate) fn qexp(v: &Vec3) -> Quat {
    let r = dot(v, v).sqrt();
    if r == 0.0 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let f = r.sin() / r;
    [r.cos(), v[0] * f, v[1] * f, v[2] * f]
}

impl Chart for Su2Chart {
    type P = Quat;
    type A = Vec3;

    fn point(&self, g: &GroupPoint) -> Quat {
        su2_to_quat(g)
    }

    fn log(&self, p: &Quat) -> Option<Vec3> {
        qlog(p)
    }

    fn left_diff(&self, a: &Quat, b: &Quat) -> Quat {
        qmul(&qconj(a), b)
    }

    fn raw(&self, x: &Vec3, y: &Vec3) -> f64 {
        // −Re tr((x·iσ)(y·iσ)) = 2 x·y
        2.0 * dot(x, y)
    }

    fn lin(&self, a: f64, x: &Vec3, b: f64, y: &Vec3) -> Vec3 {
        [a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]
    }

    fn g_ad(&self, l: &Vec3, v: &Vec3) -> Vec3 {
        // ad_l acts as v ↦ −2 l × v: zero along l, rotation by angle 2|l| across it.
        let r2 = dot(l, l);
        let r = r2.sqrt();
        let (c1, c2, c3) = if r < 1e-2 {
            let r4 = r2 * r2;
            (0.5 - r2 / 6.0 + r4 / 45.0, 1.0 / 6.0 - r2 / 45.0 + r4 / 630.0, 1.0 / 3.0 - r2 / 15.0 + 2.0 * r4 / 315.0)
        } else {
            let a = (1.0 - (2.0 * r).cos()) / (4.0 * r2);
            let b = (2.0 * r - (2.0 * r).sin()) / (4.0 * r2);
            (a, (0.5 - a) / r2, b / r)
        };
        let lv = dot(l, v);
        let lxv = cross(l, v);
        [
            c1 * v[0] + c2 * lv * l[0] + c3 * lxv[0],
            c1 * v[1] + c2 * lv * l[1] + c3 * lxv[1],
            c1 * v[2] + c2 * lv * l[2] + c3 * lxv[2],
        ]
    }
}

/// Any group of the library, through its matrices.
pub(crate) struct MatChart<'a>(pub &'a MatrixGroupSpec);

impl Chart for MatChart<'_> {
    type P = CMat;
    type A = CMat;

    fn point(&self, g: &GroupPoint) -> CMat {
        g.clone()
    }

    fn log(&self, p: &CMat) -> Option<CMat> {
        self.0.log(p).ok()
    }

    fn left_diff(&self, a: &CMat, b: &CMat) -> CMat {
        self.0.inverse(a).matmul(b)
    }

    fn raw(&self, x: &CMat, y: &CMat) -> f64 {
        self.0.raw_form(x, y)
    }

    fn lin(&self, a: f64, x: &CMat, b: f64, y: &CMat) -> CMat {
        x.scale(a).axpy(b, y)
    }

    fn g_ad(&self, l: &AlgebraVector, v: &AlgebraVector) -> AlgebraVector {
        // Σ_k (−ad_l)^k v / (k+2)!
        let mut term = v.scale(0.5);
        let mut acc = term.clone();
        for k in 0..80 {
            term = l.commutator(&term).scale(-1.0 / (k as f64 + 3.0));
            acc = &acc + &term;
            if term.norm_fro() <= 1e-18 * (1.0 + acc.norm_fro()) {
                break;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::{quat_to_su2, vec_to_su2_alg};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_quat(rng: &mut ChaCha8Rng) -> Quat {
        let mut q: Quat = [0.0; 4];
        for x in q.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.map(|x| x / n)
    }

    #[test]
    fn quaternion_product_matches_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (p, q) = (rand_quat(&mut rng), rand_quat(&mut rng));
            let m = quat_to_su2(p).matmul(&quat_to_su2(q));
            let r = qmul(&p, &q);
            assert!(quat_to_su2(r).max_abs_diff(&m) < 1e-14);
        }
    }

    #[test]
    fn quaternion_log_matches_group_log() {
        let g = MatrixGroupSpec::su2(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let q = rand_quat(&mut rng);
            let Some(v) = qlog(&q) else { continue };
            let want = g.log(&quat_to_su2(q)).unwrap();
            assert!(vec_to_su2_alg(v).max_abs_diff(&want) < 1e-12);
            let back = qexp(&v);
            assert!((0..4).all(|i| (back[i] - q[i]).abs() < 1e-13));
        }
    }

    #[test]
    fn closed_form_g_matches_series() {
        let g = MatrixGroupSpec::su2(1.0);
        let mc = MatChart(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for scale in [1e-4, 0.005, 0.3, 1.5, 3.0] {
            for _ in 0..5 {
                let l: Vec3 = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0) * scale);
                let v: Vec3 = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
                let fast = Su2Chart.g_ad(&l, &v);
                let slow = mc.g_ad(&vec_to_su2_alg(l), &vec_to_su2_alg(v));
                assert!(vec_to_su2_alg(fast).max_abs_diff(&slow) < 1e-13, "scale {scale}");
            }
        }
    }

    #[test]
    fn raw_form_agrees() {
        let g = MatrixGroupSpec::su2(1.0);
        let x = [0.3, -0.1, 0.7];
        let y = [1.1, 0.4, -0.2];
        assert!((Su2Chart.raw(&x, &y) - g.raw_form(&vec_to_su2_alg(x), &vec_to_su2_alg(y))).abs() < 1e-15);
    }
}
