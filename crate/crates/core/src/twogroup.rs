//! Strict 2-groups: the semidirect product of a crossed module, the crossed
//! module ker(s) → Γ₀ of a 2-group, the counit between them, the fibre-product
//! group of composable pairs, and the 2-group of a fusion factorization.

use crate::abelcoh::RootOfUnity;
use crate::centralext::{CextElement, Extension};
use crate::crossedmod::{half_extension, path_conjugation_action, r_tilde, ActionLift, CrossedModule};
use crate::error::{Error, Result};
use crate::loopspace::{cup, rep, res, Interval, PathPair, SampledLoop, SampledPath};
use crate::phase::Phase;
use crate::report::Check;
use crate::util::par_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt::Debug;

/// Largest allowed mismatch between s(x) and t(y) in a composition.
pub const COMPOSABLE_TOL: f64 = 1e-10;

pub trait CrossedModuleOps: Sync {
    type H: Clone + Debug + Send + Sync;
    type G: Clone + Debug + Send + Sync;

    fn h_mul(&self, a: &Self::H, b: &Self::H) -> Result<Self::H>;
    fn h_inv(&self, a: &Self::H) -> Result<Self::H>;
    fn h_unit(&self) -> Self::H;
    fn h_gap(&self, a: &Self::H, b: &Self::H) -> Result<f64>;
    fn g_mul(&self, a: &Self::G, b: &Self::G) -> Result<Self::G>;
    fn g_inv(&self, a: &Self::G) -> Result<Self::G>;
    fn g_unit(&self) -> Self::G;
    fn g_gap(&self, a: &Self::G, b: &Self::G) -> Result<f64>;
    fn t(&self, h: &Self::H) -> Result<Self::G>;
    fn act(&self, g: &Self::G, h: &Self::H) -> Result<Self::H>;
    fn random_h(&self, rng: &mut ChaCha8Rng) -> Result<Self::H>;
    fn random_g(&self, rng: &mut ChaCha8Rng) -> Result<Self::G>;
    /// 0 for exact models.
    fn tol(&self) -> f64;
}

pub trait TwoGroup: Sync {
    type Obj: Clone + Debug + Send + Sync;
    type Mor: Clone + Debug + Send + Sync;

    fn s(&self, x: &Self::Mor) -> Result<Self::Obj>;
    fn t(&self, x: &Self::Mor) -> Result<Self::Obj>;
    fn i(&self, g: &Self::Obj) -> Result<Self::Mor>;
    fn obj_mul(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::Obj>;
    fn obj_inv(&self, a: &Self::Obj) -> Result<Self::Obj>;
    fn obj_unit(&self) -> Self::Obj;
    fn obj_gap(&self, a: &Self::Obj, b: &Self::Obj) -> Result<f64>;
    fn mor_mul(&self, a: &Self::Mor, b: &Self::Mor) -> Result<Self::Mor>;
    fn mor_inv(&self, a: &Self::Mor) -> Result<Self::Mor>;
    fn mor_unit(&self) -> Self::Mor;
    fn mor_gap(&self, a: &Self::Mor, b: &Self::Mor) -> Result<f64>;
    fn random_obj(&self, rng: &mut ChaCha8Rng) -> Result<Self::Obj>;
    /// A random morphism with the given source.
    fn random_mor_from(&self, rng: &mut ChaCha8Rng, src: &Self::Obj) -> Result<Self::Mor>;
    fn tol(&self) -> f64;

    /// x ∘ y = x·i(s(x))⁻¹·y, defined when s(x) = t(y).
    fn compose(&self, x: &Self::Mor, y: &Self::Mor) -> Result<Self::Mor> {
        let sx = self.s(x)?;
        let gap = self.obj_gap(&sx, &self.t(y)?)?;
        if gap > COMPOSABLE_TOL {
            return Err(Error::NotComposable(gap));
        }
        self.mor_mul(&self.mor_mul(x, &self.mor_inv(&self.i(&sx)?)?)?, y)
    }

    /// i(s(x))·x⁻¹·i(t(x)).
    fn invert_morphism(&self, x: &Self::Mor) -> Result<Self::Mor> {
        self.mor_mul(&self.mor_mul(&self.i(&self.s(x)?)?, &self.mor_inv(x)?)?, &self.i(&self.t(x)?)?)
    }

    fn random_mor(&self, rng: &mut ChaCha8Rng) -> Result<Self::Mor> {
        let g = self.random_obj(rng)?;
        self.random_mor_from(rng, &g)
    }
}

// ---------------------------------------------------------------------------
// Crossed module → 2-group and back

/// H ⋊_α G with s(h, g) = g, t(h, g) = t(h)g, i(g) = (e, g).
#[derive(Clone, Debug)]
pub struct Semidirect<X>(pub X);

pub fn from_crossed_module<X: CrossedModuleOps>(x: X) -> Semidirect<X> {
    Semidirect(x)
}

impl<X: CrossedModuleOps> TwoGroup for Semidirect<X> {
    type Obj = X::G;
    type Mor = (X::H, X::G);

    fn s(&self, x: &Self::Mor) -> Result<X::G> {
        Ok(x.1.clone())
    }
    fn t(&self, x: &Self::Mor) -> Result<X::G> {
        self.0.g_mul(&self.0.t(&x.0)?, &x.1)
    }
    fn i(&self, g: &X::G) -> Result<Self::Mor> {
        Ok((self.0.h_unit(), g.clone()))
    }
    fn obj_mul(&self, a: &X::G, b: &X::G) -> Result<X::G> {
        self.0.g_mul(a, b)
    }
    fn obj_inv(&self, a: &X::G) -> Result<X::G> {
        self.0.g_inv(a)
    }
    fn obj_unit(&self) -> X::G {
        self.0.g_unit()
    }
    fn obj_gap(&self, a: &X::G, b: &X::G) -> Result<f64> {
        self.0.g_gap(a, b)
    }
    fn mor_mul(&self, a: &Self::Mor, b: &Self::Mor) -> Result<Self::Mor> {
        Ok((self.0.h_mul(&a.0, &self.0.act(&a.1, &b.0)?)?, self.0.g_mul(&a.1, &b.1)?))
    }
    fn mor_inv(&self, a: &Self::Mor) -> Result<Self::Mor> {
        let gi = self.0.g_inv(&a.1)?;
        Ok((self.0.act(&gi, &self.0.h_inv(&a.0)?)?, gi))
    }
    fn mor_unit(&self) -> Self::Mor {
        (self.0.h_unit(), self.0.g_unit())
    }
    fn mor_gap(&self, a: &Self::Mor, b: &Self::Mor) -> Result<f64> {
        Ok(self.0.h_gap(&a.0, &b.0)?.max(self.0.g_gap(&a.1, &b.1)?))
    }
    fn random_obj(&self, rng: &mut ChaCha8Rng) -> Result<X::G> {
        self.0.random_g(rng)
    }
    fn random_mor_from(&self, rng: &mut ChaCha8Rng, src: &X::G) -> Result<Self::Mor> {
        Ok((self.0.random_h(rng)?, src.clone()))
    }
    fn tol(&self) -> f64 {
        self.0.tol()
    }
}

/// ker(s) → Γ₀ with α_g(h) = i(g) h i(g)⁻¹.
#[derive(Debug)]
pub struct KernelXmod<'a, T>(pub &'a T);

impl<T> Clone for KernelXmod<'_, T> {
    fn clone(&self) -> Self {
        KernelXmod(self.0)
    }
}

pub fn to_crossed_module<T: TwoGroup>(g: &T) -> KernelXmod<'_, T> {
    KernelXmod(g)
}

impl<T: TwoGroup> CrossedModuleOps for KernelXmod<'_, T> {
    type H = T::Mor;
    type G = T::Obj;

    fn h_mul(&self, a: &T::Mor, b: &T::Mor) -> Result<T::Mor> {
        self.0.mor_mul(a, b)
    }
    fn h_inv(&self, a: &T::Mor) -> Result<T::Mor> {
        self.0.mor_inv(a)
    }
    fn h_unit(&self) -> T::Mor {
        self.0.mor_unit()
    }
    fn h_gap(&self, a: &T::Mor, b: &T::Mor) -> Result<f64> {
        self.0.mor_gap(a, b)
    }
    fn g_mul(&self, a: &T::Obj, b: &T::Obj) -> Result<T::Obj> {
        self.0.obj_mul(a, b)
    }
    fn g_inv(&self, a: &T::Obj) -> Result<T::Obj> {
        self.0.obj_inv(a)
    }
    fn g_unit(&self) -> T::Obj {
        self.0.obj_unit()
    }
    fn g_gap(&self, a: &T::Obj, b: &T::Obj) -> Result<f64> {
        self.0.obj_gap(a, b)
    }
    fn t(&self, h: &T::Mor) -> Result<T::Obj> {
        self.0.t(h)
    }
    fn act(&self, g: &T::Obj, h: &T::Mor) -> Result<T::Mor> {
        let ig = self.0.i(g)?;
        self.0.mor_mul(&self.0.mor_mul(&ig, h)?, &self.0.mor_inv(&ig)?)
    }
    fn random_h(&self, rng: &mut ChaCha8Rng) -> Result<T::Mor> {
        self.0.random_mor_from(rng, &self.0.obj_unit())
    }
    fn random_g(&self, rng: &mut ChaCha8Rng) -> Result<T::Obj> {
        self.0.random_obj(rng)
    }
    fn tol(&self) -> f64 {
        self.0.tol()
    }
}

/// η_Γ(x) = (x·i(s(x))⁻¹, s(x)).
pub fn counit<T: TwoGroup>(g: &T, x: &T::Mor) -> Result<(T::Mor, T::Obj)> {
    let sx = g.s(x)?;
    Ok((g.mor_mul(x, &g.mor_inv(&g.i(&sx)?)?)?, sx))
}

/// (h, g) ↦ h·i(g).
pub fn counit_inverse<T: TwoGroup>(g: &T, hg: &(T::Mor, T::Obj)) -> Result<T::Mor> {
    g.mor_mul(&hg.0, &g.i(&hg.1)?)
}

// ---------------------------------------------------------------------------
// Fibre product of composable pairs

/// Triples (x, y, z) ∈ ker(s) × ker(s) × Γ₀.
pub struct FibreProduct<'a, T>(pub &'a T);

pub type Triple<T> = (<T as TwoGroup>::Mor, <T as TwoGroup>::Mor, <T as TwoGroup>::Obj);

impl<T: TwoGroup> FibreProduct<'_, T> {
    fn conj_by_i(&self, z: &T::Obj, x: &T::Mor) -> Result<T::Mor> {
        let iz = self.0.i(z)?;
        self.0.mor_mul(&self.0.mor_mul(&iz, x)?, &self.0.mor_inv(&iz)?)
    }

    /// (x₁ i(z₁)x₂i(z₁)⁻¹, y₁x₁ i(z₁)y₂i(z₁)⁻¹ x₁⁻¹, z₁z₂).
    pub fn mul(&self, a: &Triple<T>, b: &Triple<T>) -> Result<Triple<T>> {
        let g = self.0;
        let x = g.mor_mul(&a.0, &self.conj_by_i(&a.2, &b.0)?)?;
        let inner = g.mor_mul(&g.mor_mul(&a.1, &a.0)?, &self.conj_by_i(&a.2, &b.1)?)?;
        let y = g.mor_mul(&inner, &g.mor_inv(&a.0)?)?;
        Ok((x, y, g.obj_mul(&a.2, &b.2)?))
    }

    pub fn unit(&self) -> Triple<T> {
        (self.0.mor_unit(), self.0.mor_unit(), self.0.obj_unit())
    }

    pub fn gap(&self, a: &Triple<T>, b: &Triple<T>) -> Result<f64> {
        Ok(self.0.mor_gap(&a.0, &b.0)?.max(self.0.mor_gap(&a.1, &b.1)?).max(self.0.obj_gap(&a.2, &b.2)?))
    }

    /// f(x, y, z) = x·i(z).
    pub fn f(&self, a: &Triple<T>) -> Result<T::Mor> {
        self.0.mor_mul(&a.0, &self.0.i(&a.2)?)
    }

    /// g(x, y, z) = y·i(t(x)z).
    pub fn g(&self, a: &Triple<T>) -> Result<T::Mor> {
        let tz = self.0.obj_mul(&self.0.t(&a.0)?, &a.2)?;
        self.0.mor_mul(&a.1, &self.0.i(&tz)?)
    }

    /// The inverse of (f, g) on composable pairs (w₁, w₂) with s(w₂) = t(w₁).
    pub fn from_pair(&self, w1: &T::Mor, w2: &T::Mor) -> Result<Triple<T>> {
        let g = self.0;
        let (s1, s2) = (g.s(w1)?, g.s(w2)?);
        let x = g.mor_mul(w1, &g.mor_inv(&g.i(&s1)?)?)?;
        let y = g.mor_mul(w2, &g.mor_inv(&g.i(&s2)?)?)?;
        Ok((x, y, s1))
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> Result<Triple<T>> {
        let e = self.0.obj_unit();
        Ok((self.0.random_mor_from(rng, &e)?, self.0.random_mor_from(rng, &e)?, self.0.random_obj(rng)?))
    }
}

// ---------------------------------------------------------------------------
// Axiom batteries

fn sample_rng(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64))
}

fn worst(name: &str, vals: Vec<Result<f64>>, tol: f64) -> Result<Check> {
    let mut m = (0.0f64, 0usize);
    for (k, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > m.0 || v.is_nan() {
            m = (v, k);
        }
    }
    Ok(Check::at_most(name, m.0, tol).witness_if_failed(|| format!("sample {}", m.1)))
}

/// Interchange, unit laws, associativity of ∘ and the inversion formula on `n` seeded samples each.
pub fn axiom_checks<T: TwoGroup>(g: &T, n: usize, seed: u64) -> Result<Vec<Check>> {
    let tol = g.tol();
    let interchange = par_map(n, |k| -> Result<f64> {
        let mut rng = sample_rng(seed, k);
        let x1 = g.random_mor(&mut rng)?;
        let x2 = g.random_mor_from(&mut rng, &g.t(&x1)?)?;
        let y1 = g.random_mor(&mut rng)?;
        let y2 = g.random_mor_from(&mut rng, &g.t(&y1)?)?;
        let lhs = g.mor_mul(&g.compose(&x2, &x1)?, &g.compose(&y2, &y1)?)?;
        let rhs = g.compose(&g.mor_mul(&x2, &y2)?, &g.mor_mul(&x1, &y1)?)?;
        g.mor_gap(&lhs, &rhs)
    });
    let units = par_map(n, |k| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 1, k);
        let x = g.random_mor(&mut rng)?;
        let r = g.compose(&x, &g.i(&g.s(&x)?)?)?;
        let l = g.compose(&g.i(&g.t(&x)?)?, &x)?;
        Ok(g.mor_gap(&r, &x)?.max(g.mor_gap(&l, &x)?))
    });
    let assoc = par_map(n, |k| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 2, k);
        let z = g.random_mor(&mut rng)?;
        let y = g.random_mor_from(&mut rng, &g.t(&z)?)?;
        let x = g.random_mor_from(&mut rng, &g.t(&y)?)?;
        g.mor_gap(&g.compose(&g.compose(&x, &y)?, &z)?, &g.compose(&x, &g.compose(&y, &z)?)?)
    });
    let inversion = par_map(n, |k| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 3, k);
        let x = g.random_mor(&mut rng)?;
        let xi = g.invert_morphism(&x)?;
        let a = g.mor_gap(&g.compose(&xi, &x)?, &g.i(&g.s(&x)?)?)?;
        let b = g.mor_gap(&g.compose(&x, &xi)?, &g.i(&g.t(&x)?)?)?;
        Ok(a.max(b))
    });
    let st_i = par_map(n, |k| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 4, k);
        let o = g.random_obj(&mut rng)?;
        let io = g.i(&o)?;
        Ok(g.obj_gap(&g.s(&io)?, &o)?.max(g.obj_gap(&g.t(&io)?, &o)?))
    });
    Ok(vec![
        worst("interchange", interchange, tol)?,
        worst("unit laws", units, tol)?,
        worst("associativity of composition", assoc, tol)?,
        worst("inversion formula", inversion, tol)?,
        worst("s∘i = t∘i = id", st_i, COMPOSABLE_TOL)?,
    ])
}

/// η_Γ is a bijection onto H ⋊ G with inverse (h, g) ↦ h·i(g), and commutes with s, t and ∘.
pub fn counit_checks<T: TwoGroup>(g: &T, n: usize, seed: u64) -> Result<Vec<Check>> {
    let k = to_crossed_module(g);
    let sd = from_crossed_module(k.clone());
    let tol = g.tol();
    let round = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 5, j);
        let x = g.random_mor(&mut rng)?;
        let back = counit_inverse(g, &counit(g, &x)?)?;
        let hg = (k.random_h(&mut rng)?, g.random_obj(&mut rng)?);
        let fwd = counit(g, &counit_inverse(g, &hg)?)?;
        Ok(g.mor_gap(&back, &x)?.max(sd.mor_gap(&fwd, &hg)?))
    });
    let st = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 6, j);
        let x = g.random_mor(&mut rng)?;
        let e = counit(g, &x)?;
        Ok(g.obj_gap(&sd.s(&e)?, &g.s(&x)?)?.max(g.obj_gap(&sd.t(&e)?, &g.t(&x)?)?))
    });
    let comp = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 7, j);
        let y = g.random_mor(&mut rng)?;
        let x = g.random_mor_from(&mut rng, &g.t(&y)?)?;
        let lhs = counit(g, &g.compose(&x, &y)?)?;
        let rhs = sd.compose(&counit(g, &x)?, &counit(g, &y)?)?;
        sd.mor_gap(&lhs, &rhs)
    });
    Ok(vec![
        worst("counit bijective", round, tol)?,
        worst("counit commutes with s, t", st, COMPOSABLE_TOL)?,
        worst("counit commutes with composition", comp, tol)?,
    ])
}

/// Associativity of the fibre-product law and the bijection with composable pairs.
pub fn fibre_product_checks<T: TwoGroup>(g: &T, n: usize, seed: u64) -> Result<Vec<Check>> {
    let fp = FibreProduct(g);
    let tol = g.tol();
    let assoc = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 8, j);
        let (a, b, c) = (fp.random(&mut rng)?, fp.random(&mut rng)?, fp.random(&mut rng)?);
        fp.gap(&fp.mul(&fp.mul(&a, &b)?, &c)?, &fp.mul(&a, &fp.mul(&b, &c)?)?)
    });
    let pairs = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 9, j);
        let a = fp.random(&mut rng)?;
        let (f, h) = (fp.f(&a)?, fp.g(&a)?);
        let meet = g.obj_gap(&g.s(&h)?, &g.t(&f)?)?;
        Ok(meet.max(fp.gap(&fp.from_pair(&f, &h)?, &a)?))
    });
    let homs = par_map(n, |j| -> Result<f64> {
        let mut rng = sample_rng(seed ^ 10, j);
        let (a, b) = (fp.random(&mut rng)?, fp.random(&mut rng)?);
        let ab = fp.mul(&a, &b)?;
        let df = g.mor_gap(&fp.f(&ab)?, &g.mor_mul(&fp.f(&a)?, &fp.f(&b)?)?)?;
        let dg = g.mor_gap(&fp.g(&ab)?, &g.mor_mul(&fp.g(&a)?, &fp.g(&b)?)?)?;
        Ok(df.max(dg))
    });
    Ok(vec![
        worst("fibre product associative", assoc, tol)?,
        worst("fibre product ↔ composable pairs", pairs, tol.max(COMPOSABLE_TOL))?,
        worst("f, g homomorphisms", homs, tol)?,
    ])
}

/// π₁(Γ) = ker s ∩ ker t is abelian: sampled as central phases i(e)·z.
pub fn pi1_abelian_check<T: TwoGroup>(g: &T, zs: &[T::Mor]) -> Result<Check> {
    let mut m: f64 = 0.0;
    for a in zs {
        for b in zs {
            m = m.max(g.mor_gap(&g.mor_mul(a, b)?, &g.mor_mul(b, a)?)?);
        }
    }
    Ok(Check::at_most("π₁ abelian", m, g.tol()))
}

// ---------------------------------------------------------------------------
// Finite instances

/// A permutation of {0, 1, 2}.
pub type Perm3 = [u8; 3];

fn pmul(p: &Perm3, q: &Perm3) -> Perm3 {
    [p[q[0] as usize], p[q[1] as usize], p[q[2] as usize]]
}

fn pinv(p: &Perm3) -> Perm3 {
    let mut r = [0u8; 3];
    for (i, &v) in p.iter().enumerate() {
        r[v as usize] = i as u8;
    }
    r
}

pub const S3: [Perm3; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];

/// A normal subgroup H ⊴ S3 included into S3, acted on by conjugation.
#[derive(Clone, Debug)]
pub struct PermXmod {
    h: Vec<Perm3>,
}

impl PermXmod {
    pub fn a3_in_s3() -> Self {
        PermXmod { h: S3[..3].to_vec() }
    }

    /// H trivial: the 2-group is S3 with identity morphisms only.
    pub fn discrete_s3() -> Self {
        PermXmod { h: vec![S3[0]] }
    }

    pub fn s3_in_s3() -> Self {
        PermXmod { h: S3.to_vec() }
    }

    pub fn h_elements(&self) -> &[Perm3] {
        &self.h
    }
}

impl CrossedModuleOps for PermXmod {
    type H = Perm3;
    type G = Perm3;

    fn h_mul(&self, a: &Perm3, b: &Perm3) -> Result<Perm3> {
        Ok(pmul(a, b))
    }
    fn h_inv(&self, a: &Perm3) -> Result<Perm3> {
        Ok(pinv(a))
    }
    fn h_unit(&self) -> Perm3 {
        S3[0]
    }
    fn h_gap(&self, a: &Perm3, b: &Perm3) -> Result<f64> {
        Ok(if a == b { 0.0 } else { 1.0 })
    }
    fn g_mul(&self, a: &Perm3, b: &Perm3) -> Result<Perm3> {
        Ok(pmul(a, b))
    }
    fn g_inv(&self, a: &Perm3) -> Result<Perm3> {
        Ok(pinv(a))
    }
    fn g_unit(&self) -> Perm3 {
        S3[0]
    }
    fn g_gap(&self, a: &Perm3, b: &Perm3) -> Result<f64> {
        Ok(if a == b { 0.0 } else { 1.0 })
    }
    fn t(&self, h: &Perm3) -> Result<Perm3> {
        Ok(*h)
    }
    fn act(&self, g: &Perm3, h: &Perm3) -> Result<Perm3> {
        Ok(pmul(&pmul(g, h), &pinv(g)))
    }
    fn random_h(&self, rng: &mut ChaCha8Rng) -> Result<Perm3> {
        Ok(self.h[rng.gen_range(0..self.h.len())])
    }
    fn random_g(&self, rng: &mut ChaCha8Rng) -> Result<Perm3> {
        Ok(S3[rng.gen_range(0..6)])
    }
    fn tol(&self) -> f64 {
        0.0
    }
}

/// U(1) → {e}: the 2-group BU(1), with exact roots of unity as samples.
#[derive(Clone, Debug)]
pub struct Bu1Xmod {
    /// Random elements are drawn from the q-th roots of unity.
    pub q: u64,
}

impl CrossedModuleOps for Bu1Xmod {
    type H = RootOfUnity;
    type G = ();

    fn h_mul(&self, a: &RootOfUnity, b: &RootOfUnity) -> Result<RootOfUnity> {
        Ok(a.mul(*b))
    }
    fn h_inv(&self, a: &RootOfUnity) -> Result<RootOfUnity> {
        Ok(a.inv())
    }
    fn h_unit(&self) -> RootOfUnity {
        RootOfUnity::ONE
    }
    fn h_gap(&self, a: &RootOfUnity, b: &RootOfUnity) -> Result<f64> {
        Ok(a.div(*b).angle().abs())
    }
    fn g_mul(&self, _: &(), _: &()) -> Result<()> {
        Ok(())
    }
    fn g_inv(&self, _: &()) -> Result<()> {
        Ok(())
    }
    fn g_unit(&self) {}
    fn g_gap(&self, _: &(), _: &()) -> Result<f64> {
        Ok(0.0)
    }
    fn t(&self, _: &RootOfUnity) -> Result<()> {
        Ok(())
    }
    fn act(&self, _: &(), h: &RootOfUnity) -> Result<RootOfUnity> {
        Ok(*h)
    }
    fn random_h(&self, rng: &mut ChaCha8Rng) -> Result<RootOfUnity> {
        Ok(RootOfUnity::new(rng.gen_range(0..self.q as i64), self.q))
    }
    fn random_g(&self, _: &mut ChaCha8Rng) -> Result<()> {
        Ok(())
    }
    fn tol(&self) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Loop-group instances

/// Amplitudes of random samples, small enough that products of a dozen stay off the antipode.
#[derive(Clone, Copy, Debug)]
pub struct SampleScale {
    pub path: f64,
    pub bump: f64,
}

impl Default for SampleScale {
    fn default() -> Self {
        SampleScale { path: 0.25, bump: 0.25 }
    }
}

fn random_path(xm: &CrossedModule, rng: &mut ChaCha8Rng, scale: f64) -> Result<SampledPath> {
    let g = xm.ext().group();
    SampledPath::geodesic_to(g.clone(), xm.half(), &g.random_algebra(rng, scale))
}

/// A random based loop supported in a random subinterval of (0, π), away from the sitting windows.
fn random_first_half_loop(xm: &CrossedModule, rng: &mut ChaCha8Rng, scale: f64) -> Result<SampledLoop> {
    let g = xm.ext().group();
    let a = rng.gen_range(0.40..0.70);
    let b = rng.gen_range(2.30..2.60);
    SampledLoop::bump(g.clone(), xm.ext().n(), Interval::new(a, b)?, &g.random_algebra(rng, scale))
}

/// A root of unity, plus a floating part unless `exact`.
fn random_phase(rng: &mut ChaCha8Rng, exact: bool) -> Phase {
    let z = Phase::from_root(RootOfUnity::new(rng.gen_range(0..8), 8));
    if exact {
        z
    } else {
        z + Phase::from_radians(rng.gen_range(-1.0..1.0))
    }
}

fn path_gap(a: &SampledPath, b: &SampledPath) -> Result<f64> {
    a.max_deviation(b)
}

fn element_gap(ext: &Extension, a: &CextElement, b: &CextElement) -> Result<f64> {
    match ext.equivalent(a, b) {
        Ok(p) => Ok(p.abs_angle()),
        Err(Error::EndpointMismatch(_)) | Err(Error::NotComparable) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// The canonical crossed module as [`CrossedModuleOps`]: H = elements over Ω_(0,π)G, G = P_eG.
#[derive(Clone, Debug)]
pub struct CanonicalOps {
    pub xm: CrossedModule,
    pub scale: SampleScale,
}

impl CrossedModuleOps for CanonicalOps {
    type H = CextElement;
    type G = SampledPath;

    fn h_mul(&self, a: &CextElement, b: &CextElement) -> Result<CextElement> {
        self.xm.ext().normalize(&self.xm.ext().mul(a, b)?)
    }
    fn h_inv(&self, a: &CextElement) -> Result<CextElement> {
        self.xm.ext().normalize(&self.xm.ext().inv(a)?)
    }
    fn h_unit(&self) -> CextElement {
        self.xm.ext().unit()
    }
    fn h_gap(&self, a: &CextElement, b: &CextElement) -> Result<f64> {
        element_gap(self.xm.ext(), a, b)
    }
    fn g_mul(&self, a: &SampledPath, b: &SampledPath) -> Result<SampledPath> {
        a.pointwise_mul(b)
    }
    fn g_inv(&self, a: &SampledPath) -> Result<SampledPath> {
        Ok(a.inverse())
    }
    fn g_unit(&self) -> SampledPath {
        SampledPath::constant_e(self.xm.ext().group().clone(), self.xm.half())
    }
    fn g_gap(&self, a: &SampledPath, b: &SampledPath) -> Result<f64> {
        path_gap(a, b)
    }
    fn t(&self, h: &CextElement) -> Result<SampledPath> {
        self.xm.target(h)
    }
    fn act(&self, g: &SampledPath, h: &CextElement) -> Result<CextElement> {
        self.xm.canonical_action(g, h)
    }
    fn random_h(&self, rng: &mut ChaCha8Rng) -> Result<CextElement> {
        let l = random_first_half_loop(&self.xm, rng, self.scale.bump)?;
        Ok(self.xm.ext().lift(&l)?.rotate(random_phase(rng, !self.xm.ext().is_path())))
    }
    fn random_g(&self, rng: &mut ChaCha8Rng) -> Result<SampledPath> {
        random_path(&self.xm, rng, self.scale.path)
    }
    /// Cocycle-model phases are exact; the loop samples still carry rounding.
    fn tol(&self) -> f64 {
        self.xm.tol()
    }
}

// ---------------------------------------------------------------------------
// Fusion factorizations

/// σ̃(h, z) = (h with every row flipped, z̄).
pub fn sigma_tilde(ext: &Extension, phi: &CextElement) -> Result<CextElement> {
    match phi {
        CextElement::Path { sheet, phase, .. } => ext.lift_sheet(sheet.flip_rows(), -*phase),
        CextElement::Cocycle { .. } => Err(Error::ModelMismatch),
    }
}

/// Phase of w(γ, Φ) = Φ⁻¹σ̃(Φ), for Φ over a loop invariant under the flip.
pub fn w_phase(ext: &Extension, phi: &CextElement) -> Result<Phase> {
    ext.phase_of_central(&ext.mul(&ext.inv(phi)?, &sigma_tilde(ext, phi)?)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionVariant {
    /// The sign branch continued from i(const_e) = unit.
    Canonical,
    /// The canonical i times −1 on every nonconstant path: a ℤ₂-valued perturbation that is not a homomorphism.
    SignSurrogate,
}

#[derive(Clone, Debug)]
pub struct FusionFactorization {
    xm: CrossedModule,
    variant: FusionVariant,
    /// Points of the shrinking homotopy along which the sign branch is continued.
    pub branch_steps: usize,
}

/// Gap below which the two sign branches are not told apart.
pub const BRANCH_AMBIGUITY: f64 = 1e-6;

pub fn build_fusion_factorization(xm: &CrossedModule, variant: FusionVariant) -> Result<FusionFactorization> {
    if !xm.ext().is_path() {
        return Err(Error::ModelMismatch);
    }
    Ok(FusionFactorization { xm: xm.clone(), variant, branch_steps: 8 })
}

impl FusionFactorization {
    pub fn xmod(&self) -> &CrossedModule {
        &self.xm
    }

    pub fn variant(&self) -> FusionVariant {
        self.variant
    }

    /// Lift of γ ∪ γ with w(γ, i(γ)) = 1 on the branch through the unit.
    pub fn i(&self, g: &SampledPath) -> Result<CextElement> {
        let ext = self.xm.ext();
        let mut prev = 0.0;
        let mut last = None;
        for k in 1..=self.branch_steps {
            let gs = g.shrink(k as f64 / self.branch_steps as f64)?;
            let l = self.xm.lift_cup(&gs, ActionLift::Shrinking)?;
            let half = 0.5 * w_phase(ext, &l)?.angle();
            // w(Lz) = w(L) − 2z, so z ∈ {w/2, w/2 + π}
            let cands = [half, crate::util::wrap_angle(half + PI)];
            let d = cands.map(|c| crate::util::wrap_angle(c - prev).abs());
            if (d[0] - d[1]).abs() < BRANCH_AMBIGUITY {
                return Err(Error::SignBranchAmbiguous((d[0] - d[1]).abs()));
            }
            prev = if d[0] < d[1] { cands[0] } else { cands[1] };
            last = Some(l);
        }
        let l = match last {
            Some(l) => l,
            None => self.xm.lift_cup(g, ActionLift::Shrinking)?,
        };
        let mut z = Phase::from_radians(prev);
        if self.variant == FusionVariant::SignSurrogate && !is_constant_e(g) {
            z = z + Phase::from_root(RootOfUnity::MINUS_ONE);
        }
        Ok(l.rotate(z))
    }

    /// max over pairs of the phase gap between i(γ₁γ₂) and i(γ₁)i(γ₂).
    pub fn homomorphism_gap(&self, pairs: &[(SampledPath, SampledPath)]) -> Result<Check> {
        let ext = self.xm.ext();
        let gaps = par_map(pairs.len(), |k| -> Result<f64> {
            let (a, b) = &pairs[k];
            let lhs = self.i(&a.pointwise_mul(b)?)?;
            let rhs = ext.mul(&self.i(a)?, &self.i(b)?)?;
            element_gap(ext, &lhs, &rhs)
        });
        worst("fusion homomorphism", gaps, self.xm.tol())
    }

    /// Exact and near-exact properties: π(i(γ)) = γ∪γ, σ̃∘i = i, i(const_e) = unit.
    pub fn property_checks(&self, paths: &[SampledPath]) -> Result<Vec<Check>> {
        let ext = self.xm.ext();
        let mut proj: f64 = 0.0;
        let mut sig: f64 = 0.0;
        for g in paths {
            let ig = self.i(g)?;
            let l = cup(&PathPair::new(g.clone(), g.clone())?)?;
            proj = proj.max(ext.project(&ig)?.max_deviation(&l)?);
            sig = sig.max(element_gap(ext, &sigma_tilde(ext, &ig)?, &ig)?);
        }
        let e = SampledPath::constant_e(ext.group().clone(), self.xm.half());
        let unit = element_gap(ext, &self.i(&e)?, &ext.unit())?;
        Ok(vec![
            Check::at_most("π(i(γ)) = γ∪γ", proj, 0.0),
            Check::at_most("σ̃∘i = i", sig, 1e-10),
            Check::at_most("i(const_e) = unit", unit, 1e-12),
        ])
    }
}

fn is_constant_e(g: &SampledPath) -> bool {
    let e = g.group().identity();
    g.samples().iter().all(|x| x.max_abs_diff(&e) <= crate::loopspace::SAMPLE_TOL)
}

/// The 2-group with objects P_eG and morphisms the elements over P_eG^{[2]}, identities from `i`.
#[derive(Clone, Debug)]
pub struct FusionTwoGroup {
    pub fusion: FusionFactorization,
    pub scale: SampleScale,
}

pub fn two_group_from_fusion_factorization(fusion: FusionFactorization) -> FusionTwoGroup {
    FusionTwoGroup { fusion, scale: SampleScale::default() }
}

impl FusionTwoGroup {
    fn ext(&self) -> &Extension {
        self.fusion.xm.ext()
    }

    fn xm(&self) -> &CrossedModule {
        &self.fusion.xm
    }

    /// λ(Φ′ ⊗ Φ) = Φ′ ∘ Φ for Φ over (γ₁, γ₂) and Φ′ over (γ₀, γ₁).
    pub fn fusion_product(&self, phi_prime: &CextElement, phi: &CextElement) -> Result<CextElement> {
        self.compose(phi_prime, phi)
    }
}

impl TwoGroup for FusionTwoGroup {
    type Obj = SampledPath;
    type Mor = CextElement;

    fn s(&self, x: &CextElement) -> Result<SampledPath> {
        self.xm().source(x)
    }
    fn t(&self, x: &CextElement) -> Result<SampledPath> {
        self.xm().target(x)
    }
    fn i(&self, g: &SampledPath) -> Result<CextElement> {
        self.fusion.i(g)
    }
    fn obj_mul(&self, a: &SampledPath, b: &SampledPath) -> Result<SampledPath> {
        a.pointwise_mul(b)
    }
    fn obj_inv(&self, a: &SampledPath) -> Result<SampledPath> {
        Ok(a.inverse())
    }
    fn obj_unit(&self) -> SampledPath {
        SampledPath::constant_e(self.ext().group().clone(), self.xm().half())
    }
    fn obj_gap(&self, a: &SampledPath, b: &SampledPath) -> Result<f64> {
        path_gap(a, b)
    }
    fn mor_mul(&self, a: &CextElement, b: &CextElement) -> Result<CextElement> {
        self.ext().normalize(&self.ext().mul(a, b)?)
    }
    fn mor_inv(&self, a: &CextElement) -> Result<CextElement> {
        self.ext().normalize(&self.ext().inv(a)?)
    }
    fn mor_unit(&self) -> CextElement {
        self.ext().unit()
    }
    fn mor_gap(&self, a: &CextElement, b: &CextElement) -> Result<f64> {
        element_gap(self.ext(), a, b)
    }
    fn random_obj(&self, rng: &mut ChaCha8Rng) -> Result<SampledPath> {
        random_path(self.xm(), rng, self.scale.path)
    }
    /// Over γ₁ ∪ src with γ₁ = src·β, β a random bump path returning to e.
    fn random_mor_from(&self, rng: &mut ChaCha8Rng, src: &SampledPath) -> Result<CextElement> {
        let beta = res(&random_first_half_loop(self.xm(), rng, self.scale.bump)?)?;
        let g1 = src.pointwise_mul(&beta)?;
        let l = cup(&PathPair::new(g1, src.clone())?)?;
        Ok(self.ext().lift(&l)?.rotate(random_phase(rng, false)))
    }
    fn tol(&self) -> f64 {
        self.xm().tol()
    }
}

// ---------------------------------------------------------------------------
// Comparison along r = rep∘res

/// Largest gap between the pointwise action of rep(γ) on r̃(Φ) and r̃(α_γ(Φ)), plus the exact
/// homomorphism properties of rep and res.
pub fn check_comparison_hom(xm: &CrossedModule, battery: &[(SampledPath, CextElement)]) -> Result<Vec<Check>> {
    let ext = xm.ext();
    let half = half_extension(ext)?;
    let gaps = par_map(battery.len(), |k| -> Result<f64> {
        let (g, phi) = &battery[k];
        let lhs = path_conjugation_action(&half, &rep(g)?, &r_tilde(ext, &half, phi)?)?;
        let rhs = r_tilde(ext, &half, &xm.canonical_action(g, phi)?)?;
        element_gap(&half, &lhs, &rhs)
    });
    let tol = if ext.is_path() { xm.tol() } else { 1e-12 };
    let mut checks = vec![worst("comparison intertwining", gaps, tol)?];
    let mut rep_gap: f64 = 0.0;
    let mut res_gap: f64 = 0.0;
    for w in battery.windows(2) {
        let (a, b) = (&w[0].0, &w[1].0);
        let lhs = rep(&a.pointwise_mul(b)?)?;
        rep_gap = rep_gap.max(lhs.max_deviation(&rep(a)?.pointwise_mul(&rep(b)?)?)?);
        let (x, y) = (ext.project(&w[0].1)?, ext.project(&w[1].1)?);
        let lhs = res(&x.pointwise_mul(&y)?)?;
        res_gap = res_gap.max(lhs.max_deviation(&res(&x)?.pointwise_mul(&res(&y)?)?)?);
    }
    checks.push(Check::at_most("rep homomorphism", rep_gap, 0.0));
    checks.push(Check::at_most("res homomorphism", res_gap, 0.0));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::MatrixGroupSpec;
    use std::sync::Arc;

    fn fusion_at(n: usize, variant: FusionVariant) -> FusionTwoGroup {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let xm = CrossedModule::new_unchecked(Extension::path(g, n, n)).unwrap();
        two_group_from_fusion_factorization(build_fusion_factorization(&xm, variant).unwrap())
    }

    fn path_pairs(t: &FusionTwoGroup, k: usize, seed: u64) -> Vec<(SampledPath, SampledPath)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k).map(|_| (t.random_obj(&mut rng).unwrap(), t.random_obj(&mut rng).unwrap())).collect()
    }

    #[test]
    fn finite_crossed_modules_are_exact() {
        for xm in [PermXmod::a3_in_s3(), PermXmod::discrete_s3(), PermXmod::s3_in_s3()] {
            let sd = from_crossed_module(xm);
            for c in axiom_checks(&sd, 200, 1).unwrap().into_iter().chain(counit_checks(&sd, 100, 2).unwrap()) {
                assert!(c.pass && c.measured == 0.0, "{c:?}");
            }
            for c in fibre_product_checks(&sd, 100, 3).unwrap() {
                assert!(c.pass && c.measured == 0.0, "{c:?}");
            }
        }
        let bu1 = from_crossed_module(Bu1Xmod { q: 12 });
        assert!(axiom_checks(&bu1, 100, 4).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn composition_requires_matching_ends() {
        let sd = from_crossed_module(PermXmod::s3_in_s3());
        let x = ([1, 2, 0], [0, 1, 2]);
        let y = ([0, 1, 2], [1, 0, 2]);
        assert!(matches!(sd.compose(&x, &y), Err(Error::NotComposable(_))));
    }

    #[test]
    fn kernel_round_trip_recovers_the_action() {
        let sd = from_crossed_module(PermXmod::a3_in_s3());
        let k = to_crossed_module(&sd);
        for g in S3 {
            for h in &S3[..3] {
                let kh = (*h, S3[0]);
                let acted = k.act(&g, &kh).unwrap();
                assert_eq!(acted, (pmul(&pmul(&g, h), &pinv(&g)), S3[0]));
            }
        }
    }

    #[test]
    fn sigma_tilde_is_an_involution() {
        let t = fusion_at(16, FusionVariant::Canonical);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = t.random_mor(&mut rng).unwrap();
        let ext = t.ext();
        let back = sigma_tilde(ext, &sigma_tilde(ext, &x).unwrap()).unwrap();
        assert!(ext.equivalent(&x, &back).unwrap().abs_angle() < 1e-12);
        let triv = Extension::trivial(ext.group().clone(), 16);
        assert!(matches!(sigma_tilde(&triv, &triv.unit()), Err(Error::ModelMismatch)));
    }

    #[test]
    fn fusion_identities_are_a_homomorphism_and_the_surrogate_is_not() {
        let t = fusion_at(32, FusionVariant::Canonical);
        let pairs = path_pairs(&t, 4, 11);
        let h = t.fusion.homomorphism_gap(&pairs).unwrap();
        assert!(h.pass, "{h:?}");
        let paths: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
        for c in t.fusion.property_checks(&paths).unwrap() {
            assert!(c.pass, "{c:?}");
        }
        let s = fusion_at(32, FusionVariant::SignSurrogate);
        let hs = s.fusion.homomorphism_gap(&pairs).unwrap();
        assert!(!hs.pass && (hs.measured - PI).abs() < 0.1, "{hs:?}");
    }

    #[test]
    fn fusion_two_group_axioms_at_a_coarse_grid() {
        let t = fusion_at(32, FusionVariant::Canonical);
        for c in axiom_checks(&t, 6, 5).unwrap() {
            assert!(c.pass, "{c:?}");
        }
        for c in counit_checks(&t, 4, 6).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }
}
