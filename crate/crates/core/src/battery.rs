//! Seeded sample sets shared by the verification suites, the acceptance
//! tests and the CLI. Every battery is a pure function of its arguments.

use crate::centralext::{CextElement, Extension};
use crate::cocycles::Sheet;
use crate::crossedmod::CrossedModule;
use crate::error::Result;
use crate::liegroup::{su2_to_quat, GroupPoint, MatrixGroupSpec};
use crate::loopspace::{Interval, SampledLoop, SampledPath};
use crate::phase::Phase;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 0x10_0C_C5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_interval_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64, min_len: f64) -> Result<Interval> {
    let a = rng.gen_range(lo..hi - min_len);
    let b = rng.gen_range(a + min_len..hi);
    Interval::new(a, b)
}

/// `count` pairs of bump loops with disjoint supports: the first in (0.1, c), the second in (c + 0.1, 2π − 0.1).
pub fn disjoint_bump_pairs(
    group: &Arc<MatrixGroupSpec>,
    n: usize,
    count: usize,
    scale: f64,
    seed: u64,
) -> Result<Vec<(SampledLoop, SampledLoop)>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let c = r.gen_range(2.2..4.0);
            let i1 = random_interval_in(&mut r, 0.1, c, 1.0)?;
            let i2 = random_interval_in(&mut r, c + 0.1, 2.0 * PI - 0.1, 1.0)?;
            let a = SampledLoop::bump(group.clone(), n, i1, &group.random_algebra(&mut r, scale))?;
            let b = SampledLoop::bump(group.clone(), n, i2, &group.random_algebra(&mut r, scale))?;
            Ok((a, b))
        })
        .collect()
}

/// A bump loop in (0, π) that keeps clear of the sitting windows at 0 and π.
pub fn first_half_bump(group: &Arc<MatrixGroupSpec>, n: usize, r: &mut ChaCha8Rng, scale: f64) -> Result<SampledLoop> {
    let a = r.gen_range(0.40..0.70);
    let b = r.gen_range(2.30..2.60);
    SampledLoop::bump(group.clone(), n, Interval::new(a, b)?, &group.random_algebra(r, scale))
}

/// Pairs (Φ, Ψ) of lifts over overlapping loops in Ω_(0,π)G with random phases.
pub fn peiffer_pairs(ext: &Extension, count: usize, scale: f64, seed: u64) -> Result<Vec<(CextElement, CextElement)>> {
    let mut r = rng(seed);
    let g = ext.group().clone();
    (0..count)
        .map(|_| {
            let a = ext
                .lift(&first_half_bump(&g, ext.n(), &mut r, scale)?)?
                .rotate(Phase::from_radians(r.gen_range(-PI..PI)));
            let b = ext
                .lift(&first_half_bump(&g, ext.n(), &mut r, scale)?)?
                .rotate(Phase::from_radians(r.gen_range(-PI..PI)));
            Ok((a, b))
        })
        .collect()
}

/// Pairs (Φ, Ψ) with Φ over Ω_(0,π)G and Ψ over Ω_(π,2π)G, i.e. in ker(s) and ker(t).
pub fn kernel_pairs(ext: &Extension, count: usize, scale: f64, seed: u64) -> Result<Vec<(CextElement, CextElement)>> {
    let mut r = rng(seed);
    let g = ext.group().clone();
    (0..count)
        .map(|_| {
            let a = ext.lift(&first_half_bump(&g, ext.n(), &mut r, scale)?)?;
            let b = ext.lift(&first_half_bump(&g, ext.n(), &mut r, scale)?.flip())?;
            Ok((a, b))
        })
        .collect()
}

/// Random geodesic paths in P_eG on the half grid of `xm`.
pub fn paths(xm: &CrossedModule, count: usize, scale: f64, seed: u64) -> Result<Vec<SampledPath>> {
    let mut r = rng(seed);
    let g = xm.ext().group().clone();
    (0..count).map(|_| SampledPath::geodesic_to(g.clone(), xm.half(), &g.random_algebra(&mut r, scale))).collect()
}

/// Pairs (γ, Φ) with γ a path and Φ a lift over Ω_(0,π)G.
pub fn action_pairs(
    xm: &CrossedModule,
    count: usize,
    scale: f64,
    seed: u64,
) -> Result<Vec<(SampledPath, CextElement)>> {
    let ps = paths(xm, count, scale, seed)?;
    let phis = peiffer_pairs(xm.ext(), count, scale, seed ^ 0xA5A5)?;
    Ok(ps.into_iter().zip(phis.into_iter().map(|p| p.0)).collect())
}

/// ℝ⁺ bump pairs (γ, η) with s ∈ supp γ, t ∈ supp η and disjoint supports; needs |s − t| > 0.4.
pub fn rplus_pairs(n: usize, s: f64, t: f64, count: usize, seed: u64) -> Result<Vec<(SampledLoop, SampledLoop)>> {
    let g = Arc::new(MatrixGroupSpec::rplus());
    let mut r = rng(seed);
    let half = 0.5 * (s - t).abs();
    let around = |r: &mut ChaCha8Rng, c: f64| -> Result<Interval> {
        let w = r.gen_range(0.5 * half..0.95 * half);
        Interval::new((c - w).max(0.01), (c + w).min(2.0 * PI - 0.01))
    };
    (0..count)
        .map(|_| {
            let a = SampledLoop::bump(g.clone(), n, around(&mut r, s)?, &g.random_algebra(&mut r, 1.0))?;
            let b = SampledLoop::bump(g.clone(), n, around(&mut r, t)?, &g.random_algebra(&mut r, 1.0))?;
            Ok((a, b))
        })
        .collect()
}

/// Centre q = exp(ρ·e₃) of the geodesic sphere swept by [`enclosing_sheet`].
pub fn sphere_centre(group: &MatrixGroupSpec, rho: f64) -> GroupPoint {
    group.exp(&group.algebra_from_coords(&[0.0, 0.0, rho]))
}

/// A closed loop in ΩSU(2) whose points sweep the geodesic sphere of radius ρ about
/// [`sphere_centre`] once. The square [0,1]×[0,2π] is sent smoothly onto a disk, and the
/// disk onto the sphere with its rim at e, so every row is based and rows 0, M are const_e.
pub fn enclosing_sheet(group: &Arc<MatrixGroupSpec>, m: usize, n: usize, rho: f64) -> Result<Sheet> {
    let q = sphere_centre(group, rho);
    let g = group.clone();
    Sheet::from_fn(group.clone(), m, n, move |s, t| {
        if s <= 0.0 || s >= 1.0 || t <= 0.0 {
            return g.identity();
        }
        let (u, v) = (2.0 * s - 1.0, t / PI - 1.0);
        let w = [u * (1.0 - 0.5 * v * v).sqrt(), v * (1.0 - 0.5 * u * u).sqrt()];
        let r = w[0].hypot(w[1]);
        if r >= 1.0 - 1e-15 {
            return g.identity();
        }
        let sinc = if r < 1e-12 { PI } else { (PI * r).sin() / r };
        let x = [rho * sinc * w[0], rho * sinc * w[1], rho * (PI * r).cos()];
        q.matmul(&g.exp(&g.algebra_from_coords(&x)))
    })
}

/// Quaternion of a point, for use as a stereographic pole or winding target.
pub fn quat(g: &GroupPoint) -> [f64; 4] {
    su2_to_quat(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batteries_are_reproducible_and_disjoint() {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let a = disjoint_bump_pairs(&g, 64, 5, 0.8, 3).unwrap();
        let b = disjoint_bump_pairs(&g, 64, 5, 0.8, 3).unwrap();
        assert_eq!(a, b);
        for (x, y) in &a {
            assert!(x.support().unwrap().disjoint(&y.support().unwrap()));
        }
        for (x, y) in rplus_pairs(64, 1.0, 4.5, 5, 1).unwrap() {
            assert!(x.support().unwrap().contains(1.0) && y.support().unwrap().contains(4.5));
        }
    }

    #[test]
    fn enclosing_sheet_is_closed_and_based() {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let sh = enclosing_sheet(&g, 16, 16, 1.4).unwrap();
        assert!(sh.closure_gap() < 1e-14);
        let q = sphere_centre(&g, 1.4);
        for p in sh.points().iter().skip(16).take(16 * 15) {
            if p.max_abs_diff(&g.identity()) > 1e-12 {
                let d = g.log(&g.inverse(&q).matmul(p)).unwrap();
                assert!((g.algebra_coords(&d).iter().map(|c| c * c).sum::<f64>().sqrt() - 1.4).abs() < 1e-9);
            }
        }
    }
}
