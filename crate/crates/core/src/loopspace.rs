//! Sampled loops on S¹ = ℝ/2πℤ and paths on [0, π] (or [0, 2π]), with support
//! and sitting-instant metadata.
//!
//! A loop on `N` points samples t_j = 2πj/N. A path with `M` intervals samples
//! x_j = span·j/M for j = 0..=M. The cup map glues two paths on `M = N/2`
//! intervals into a loop, so all comparison maps are index maps.

use crate::error::{Error, Result};
use crate::liegroup::{CMat, GroupPoint, MatrixGroupSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Tolerance for identity and equality checks on samples.
pub const SAMPLE_TOL: f64 = 1e-12;

/// Default sitting-instant window, max(2, ⌈0.05·n⌉).
pub fn default_window(n: usize) -> usize {
    2usize.max((0.05 * n as f64).ceil() as usize)
}

/// Window of a path on [0, π] with `m` steps: the loop window of its cup, so both sit still equally long.
pub fn path_window(m: usize) -> usize {
    default_window(2 * m)
}

fn same_group(a: &MatrixGroupSpec, b: &MatrixGroupSpec) -> Result<()> {
    if a.name != b.name {
        return Err(Error::TagMismatch(format!("{} vs {}", a.name.label(), b.name.label())));
    }
    Ok(())
}

fn is_identity(g: &GroupPoint, tol: f64) -> bool {
    g.max_abs_diff(&CMat::identity(g.n())) <= tol
}

/// An open interval (a, b) ⊂ (0, 2π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 2.0 * PI) {
            return Err(Error::BadInterval(format!("({a}, {b})")));
        }
        Ok(Interval { a, b })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a < t && t < self.b
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.a <= o.a && o.b <= self.b
    }

    pub fn disjoint(&self, o: &Interval) -> bool {
        self.b <= o.a || o.b <= self.a
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { a: self.a.min(o.a), b: self.b.max(o.b) }
    }

    /// Image under t ↦ 2π − t.
    pub fn flipped(&self) -> Interval {
        Interval { a: 2.0 * PI - self.b, b: 2.0 * PI - self.a }
    }

    pub fn first_half() -> Interval {
        Interval { a: 0.0, b: PI }
    }
}

#[derive(Clone, Debug)]
pub struct SampledLoop {
    group: Arc<MatrixGroupSpec>,
    samples: Vec<GroupPoint>,
    support: Option<Interval>,
    based: bool,
    window: usize,
}

impl PartialEq for SampledLoop {
    fn eq(&self, o: &Self) -> bool {
        self.group.name == o.group.name && self.samples == o.samples
    }
}

impl SampledLoop {
    /// Builds a loop and checks the based and support invariants.
    pub fn new(
        group: Arc<MatrixGroupSpec>,
        samples: Vec<GroupPoint>,
        support: Option<Interval>,
        based: bool,
        window: usize,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::GridMismatch("a loop needs at least one sample".into()));
        }
        if let Some(bad) = samples.iter().find(|g| g.n() != group.dim()) {
            return Err(Error::TagMismatch(format!("{}x{} sample in a {} loop", bad.n(), bad.n(), group.name.label())));
        }
        let l = SampledLoop { group, samples, support, based, window };
        if based && !is_identity(&l.samples[0], SAMPLE_TOL) {
            return Err(Error::SupportViolation("based loop does not start at e".into()));
        }
        if let Some(j) = l.support_violation() {
            return Err(Error::SupportViolation(format!("sample {j} is not e outside the declared support")));
        }
        Ok(l)
    }

    /// Samples γ(t_j) from a function of t.
    pub fn from_fn(
        group: Arc<MatrixGroupSpec>,
        n: usize,
        support: Option<Interval>,
        f: impl Fn(f64) -> GroupPoint,
    ) -> Result<Self> {
        let samples = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        Self::new(group, samples, support, true, default_window(n))
    }

    pub fn constant_e(group: Arc<MatrixGroupSpec>, n: usize) -> Self {
        let e = group.identity();
        SampledLoop { samples: vec![e; n], group, support: None, based: true, window: default_window(n) }
    }

    /// t ↦ exp(φ(t)·X) with φ a flat bump on `support`.
    pub fn bump(group: Arc<MatrixGroupSpec>, n: usize, support: Interval, x: &GroupPoint) -> Result<Self> {
        let g = group.clone();
        Self::from_fn(group, n, Some(support), |t| {
            let phi = crate::util::flat_bump((t - support.a) / (support.b - support.a));
            if phi == 0.0 {
                g.identity()
            } else {
                g.exp(&x.scale(phi))
            }
        })
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[GroupPoint] {
        &self.samples
    }

    pub fn sample(&self, j: usize) -> &GroupPoint {
        &self.samples[j % self.samples.len()]
    }

    pub fn support(&self) -> Option<Interval> {
        self.support
    }

    pub fn is_based(&self) -> bool {
        self.based
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn time(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n() as f64
    }

    /// Replaces the declared support after checking it.
    pub fn with_support(mut self, support: Option<Interval>) -> Result<Self> {
        self.support = support;
        if let Some(j) = self.support_violation() {
            return Err(Error::SupportViolation(format!("sample {j} is not e outside the declared support")));
        }
        Ok(self)
    }

    pub fn with_window(mut self, w: usize) -> Self {
        self.window = w;
        self
    }

    /// First index outside the declared support whose sample is not e.
    pub fn support_violation(&self) -> Option<usize> {
        let s = self.support?;
        (0..self.n()).find(|&j| !s.contains(self.time(j)) && !is_identity(&self.samples[j], SAMPLE_TOL))
    }

    /// True when every sample outside `iv` is e.
    pub fn is_supported_in(&self, iv: &Interval) -> bool {
        (0..self.n()).all(|j| iv.contains(self.time(j)) || is_identity(&self.samples[j], SAMPLE_TOL))
    }

    /// Smallest grid-aligned interval outside which all samples are e.
    pub fn measured_support(&self) -> Option<Interval> {
        let n = self.n();
        let nontriv: Vec<usize> = (0..n).filter(|&j| !is_identity(&self.samples[j], SAMPLE_TOL)).collect();
        let (lo, hi) = (*nontriv.first()?, *nontriv.last()?);
        Some(Interval { a: self.time(lo.saturating_sub(1)), b: if hi + 1 >= n { 2.0 * PI } else { self.time(hi + 1) } })
    }

    pub fn is_constant_e(&self, tol: f64) -> bool {
        self.samples.iter().all(|g| is_identity(g, tol))
    }

    /// Largest sample-wise distance between two loops on the same grid.
    pub fn max_deviation(&self, o: &SampledLoop) -> Result<f64> {
        self.check_compatible(o)?;
        Ok(self.samples.iter().zip(&o.samples).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }

    fn check_compatible(&self, o: &SampledLoop) -> Result<()> {
        same_group(&self.group, &o.group)?;
        if self.n() != o.n() {
            return Err(Error::GridMismatch(format!("N = {} vs {}", self.n(), o.n())));
        }
        Ok(())
    }

    /// Samples constant on `w` steps on each side of index `p`.
    pub fn is_flat_at(&self, p: usize, w: usize) -> bool {
        let n = self.n();
        let c = &self.samples[p % n];
        (1..=w).all(|k| {
            self.samples[(p + k) % n].max_abs_diff(c) <= SAMPLE_TOL
                && self.samples[(p + n - k % n) % n].max_abs_diff(c) <= SAMPLE_TOL
        })
    }

    /// Sample-wise product.
    pub fn pointwise_mul(&self, o: &SampledLoop) -> Result<SampledLoop> {
        self.check_compatible(o)?;
        let samples = self.samples.iter().zip(&o.samples).map(|(a, b)| a.matmul(b)).collect();
        let support = match (self.support, o.support) {
            (Some(a), Some(b)) => Some(a.hull(&b)),
            _ => None,
        };
        Ok(SampledLoop {
            group: self.group.clone(),
            samples,
            support,
            based: self.based && o.based,
            window: self.window.min(o.window),
        })
    }

    pub fn inverse(&self) -> SampledLoop {
        SampledLoop { samples: self.samples.iter().map(|g| self.group.inverse(g)).collect(), ..self.clone() }
    }

    /// t ↦ γ(−t): sample j goes to sample (N − j) mod N.
    pub fn flip(&self) -> SampledLoop {
        let n = self.n();
        let samples = (0..n).map(|j| self.samples[(n - j) % n].clone()).collect();
        SampledLoop { samples, support: self.support.map(|s| s.flipped()), ..self.clone() }
    }

    /// Applies a sample-wise map, keeping the metadata.
    pub fn map(&self, f: impl Fn(&GroupPoint) -> GroupPoint) -> SampledLoop {
        SampledLoop { samples: self.samples.iter().map(f).collect(), ..self.clone() }
    }

    /// Like [`SampledLoop::map`] with the sample index.
    pub fn map_indexed(&self, f: impl Fn(usize, &GroupPoint) -> GroupPoint) -> SampledLoop {
        SampledLoop { samples: self.samples.iter().enumerate().map(|(j, g)| f(j, g)).collect(), ..self.clone() }
    }

    /// Linear interpolation of log γ at an arbitrary time (for scalar groups).
    pub fn log_at(&self, t: f64) -> Result<crate::liegroup::AlgebraVector> {
        let n = self.n();
        let x = (t.rem_euclid(2.0 * PI)) * n as f64 / (2.0 * PI);
        let k = x.floor() as usize % n;
        let frac = x - x.floor();
        let a = self.group.log(&self.samples[k])?;
        if frac == 0.0 {
            return Ok(a);
        }
        let b = self.group.log(&self.samples[(k + 1) % n])?;
        Ok(a.axpy(frac, &(&b - &a)))
    }
}

/// Parameter span of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Span {
    Pi,
    TwoPi,
}

impl Span {
    pub fn length(self) -> f64 {
        match self {
            Span::Pi => PI,
            Span::TwoPi => 2.0 * PI,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampledPath {
    group: Arc<MatrixGroupSpec>,
    span: Span,
    samples: Vec<GroupPoint>,
    starts_at_e: bool,
    window: usize,
}

impl PartialEq for SampledPath {
    fn eq(&self, o: &Self) -> bool {
        self.group.name == o.group.name && self.span == o.span && self.samples == o.samples
    }
}

impl SampledPath {
    pub fn new(
        group: Arc<MatrixGroupSpec>,
        span: Span,
        samples: Vec<GroupPoint>,
        starts_at_e: bool,
        window: usize,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::GridMismatch("a path needs at least two samples".into()));
        }
        if let Some(bad) = samples.iter().find(|g| g.n() != group.dim()) {
            return Err(Error::TagMismatch(format!("{}x{} sample in a {} path", bad.n(), bad.n(), group.name.label())));
        }
        if starts_at_e && !is_identity(&samples[0], SAMPLE_TOL) {
            return Err(Error::SupportViolation("path does not start at e".into()));
        }
        Ok(SampledPath { group, span, samples, starts_at_e, window })
    }

    /// Samples γ(x_j), x_j = π·j/M.
    pub fn from_fn(group: Arc<MatrixGroupSpec>, m: usize, f: impl Fn(f64) -> GroupPoint) -> Result<Self> {
        let samples = (0..=m).map(|j| f(PI * j as f64 / m as f64)).collect();
        Self::new(group, Span::Pi, samples, true, path_window(m))
    }

    pub fn constant_e(group: Arc<MatrixGroupSpec>, m: usize) -> Self {
        let e = group.identity();
        SampledPath { samples: vec![e; m + 1], group, span: Span::Pi, starts_at_e: true, window: path_window(m) }
    }

    /// x ↦ exp(β(x/π)·X) with β a flat step that sits still on the first and last windows.
    pub fn geodesic_to(group: Arc<MatrixGroupSpec>, m: usize, x: &GroupPoint) -> Result<Self> {
        let w = path_window(m);
        let g = group.clone();
        let samples = (0..=m)
            .map(|j| {
                let u = (j as f64 - w as f64) / (m as f64 - 2.0 * w as f64);
                let b = crate::util::flat_step(u);
                if b == 0.0 {
                    g.identity()
                } else {
                    g.exp(&x.scale(b))
                }
            })
            .collect();
        Self::new(group, Span::Pi, samples, true, w)
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        &self.group
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn samples(&self) -> &[GroupPoint] {
        &self.samples
    }

    pub fn start(&self) -> &GroupPoint {
        &self.samples[0]
    }

    pub fn end(&self) -> &GroupPoint {
        &self.samples[self.m()]
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn starts_at_e(&self) -> bool {
        self.starts_at_e
    }

    /// Constant on the first and last `w` steps.
    pub fn is_flat(&self, w: usize) -> bool {
        let m = self.m();
        w <= m
            && (1..=w).all(|k| {
                self.samples[k].max_abs_diff(&self.samples[0]) <= SAMPLE_TOL
                    && self.samples[m - k].max_abs_diff(&self.samples[m]) <= SAMPLE_TOL
            })
    }

    pub fn max_deviation(&self, o: &SampledPath) -> Result<f64> {
        self.check_compatible(o)?;
        Ok(self.samples.iter().zip(&o.samples).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }

    fn check_compatible(&self, o: &SampledPath) -> Result<()> {
        same_group(&self.group, &o.group)?;
        if self.m() != o.m() || self.span != o.span {
            return Err(Error::GridMismatch(format!("M = {} vs {}", self.m(), o.m())));
        }
        Ok(())
    }

    pub fn pointwise_mul(&self, o: &SampledPath) -> Result<SampledPath> {
        self.check_compatible(o)?;
        let samples = self.samples.iter().zip(&o.samples).map(|(a, b)| a.matmul(b)).collect();
        Ok(SampledPath {
            group: self.group.clone(),
            span: self.span,
            samples,
            starts_at_e: self.starts_at_e && o.starts_at_e,
            window: self.window.min(o.window),
        })
    }

    pub fn inverse(&self) -> SampledPath {
        SampledPath { samples: self.samples.iter().map(|g| self.group.inverse(g)).collect(), ..self.clone() }
    }

    /// x ↦ γ(s·x), interpolating geodesically between samples; exact on grid points.
    pub fn shrink(&self, s: f64) -> Result<SampledPath> {
        let m = self.m();
        let samples = (0..=m)
            .map(|j| {
                let pos = s * j as f64;
                let k = (pos.floor() as usize).min(m);
                let frac = pos - k as f64;
                if frac <= 0.0 || k == m {
                    return Ok(self.samples[k].clone());
                }
                let a = &self.samples[k];
                let step = self.group.log(&self.group.inverse(a).matmul(&self.samples[k + 1]))?;
                Ok(a.matmul(&self.group.exp(&step.scale(frac))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledPath { samples, ..self.clone() })
    }

    /// Treats a closed path on [0, 2π] as a loop with N = M points.
    pub fn to_loop(&self) -> Result<SampledLoop> {
        let gap = self.end().max_abs_diff(self.start());
        if gap > 1e-10 {
            return Err(Error::EndpointMismatch(gap));
        }
        let n = self.m();
        SampledLoop::new(self.group.clone(), self.samples[..n].to_vec(), None, self.starts_at_e, self.window)
    }
}

/// Two paths with a common end point.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPair {
    pub first: SampledPath,
    pub second: SampledPath,
}

impl PathPair {
    pub fn new(first: SampledPath, second: SampledPath) -> Result<Self> {
        first.check_compatible(&second)?;
        let gap = first.end().max_abs_diff(second.end());
        if gap > 1e-10 {
            return Err(Error::EndpointMismatch(gap));
        }
        Ok(PathPair { first, second })
    }

    /// Component-wise product in the fibre product group.
    pub fn pointwise_mul(&self, o: &PathPair) -> Result<PathPair> {
        PathPair::new(self.first.pointwise_mul(&o.first)?, self.second.pointwise_mul(&o.second)?)
    }
}

/// γ₁ on [0, π] followed by γ₂ run backwards on [π, 2π].
pub fn cup(p: &PathPair) -> Result<SampledLoop> {
    let m = p.first.m();
    if p.second.m() != m || p.first.span != Span::Pi {
        return Err(Error::GridMismatch("cup needs two paths on [0, π] with equal M".into()));
    }
    let gap = p.first.end().max_abs_diff(p.second.end());
    if gap > 1e-10 {
        return Err(Error::EndpointMismatch(gap));
    }
    let n = 2 * m;
    let samples =
        (0..n).map(|j| if j <= m { p.first.samples[j].clone() } else { p.second.samples[n - j].clone() }).collect();
    SampledLoop::new(p.first.group.clone(), samples, None, true, p.first.window.min(p.second.window))
}

/// Splits a loop flat at 0 and π back into (γ₁, γ₂) with γ₁ ∪ γ₂ = γ.
pub fn uncup(l: &SampledLoop) -> Result<PathPair> {
    let n = l.n();
    if n % 2 != 0 {
        return Err(Error::GridMismatch("uncup needs an even N".into()));
    }
    let m = n / 2;
    let first = (0..=m).map(|j| l.samples[j].clone()).collect();
    let second = (0..=m).map(|j| l.samples[(n - j) % n].clone()).collect();
    let mk = |s| SampledPath::new(l.group.clone(), Span::Pi, s, true, l.window);
    PathPair::new(mk(first)?, mk(second)?)
}

/// rep(γ)(x) = γ(x/2): the same samples read on [0, 2π].
pub fn rep(p: &SampledPath) -> Result<SampledPath> {
    if p.span != Span::Pi {
        return Err(Error::GridMismatch("rep expects a path on [0, π]".into()));
    }
    Ok(SampledPath { span: Span::TwoPi, ..p.clone() })
}

/// Restriction of a loop supported in (0, π) to [0, π].
pub fn res(l: &SampledLoop) -> Result<SampledPath> {
    let n = l.n();
    if n % 2 != 0 {
        return Err(Error::GridMismatch("res needs an even N".into()));
    }
    if !l.is_supported_in(&Interval::first_half()) {
        return Err(Error::SupportViolation("loop is not supported in (0, π)".into()));
    }
    let m = n / 2;
    SampledPath::new(l.group.clone(), Span::Pi, l.samples[..=m].to_vec(), true, l.window)
}

/// Restriction to [0, π] without the support precondition (the target map t).
pub fn first_half(l: &SampledLoop) -> Result<SampledPath> {
    let m = l.n() / 2;
    SampledPath::new(l.group.clone(), Span::Pi, l.samples[..=m].to_vec(), l.based, l.window)
}

/// r = rep∘res, read as a loop with N/2 points.
pub fn r(l: &SampledLoop) -> Result<SampledLoop> {
    let p = rep(&res(l)?)?;
    let lp = p.to_loop()?;
    Ok(lp.with_support(l.support.map(|s| Interval { a: 2.0 * s.a, b: (2.0 * s.b).min(2.0 * PI) }))?)
}

/// Discrete (★): the largest n ≤ `max_order` such that for every m ≤ n, |f(t_i)| ≤ t_iᵐ
/// on the first `min_run` positive grid points, with a relative slack of 1e-12 for rounding.
pub fn star_order(values: &[f64], ts: &[f64], max_order: u32, min_run: usize) -> u32 {
    let run = min_run.min(values.len().saturating_sub(1)).max(1);
    for n in 0..=max_order {
        let ok = (1..=run).all(|i| values[i].abs() <= ts[i].powi(n as i32) * (1.0 + 1e-12));
        if !ok {
            return n.saturating_sub(1);
        }
    }
    max_order
}

/// Output of [`flat_factorize`].
#[derive(Clone, Debug)]
pub struct FlatFactorization {
    pub ts: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub envelope: Vec<f64>,
    /// ε_n for n = 0..=n_max (ε₀ = a).
    pub eps: Vec<f64>,
}

/// Writes a function on [0, a] that is flat at zero as a product of two such
/// functions, f = g₁g₂ with g₂ = √h and g₁ = f/√h for an envelope h ≥ |f|.
///
/// `values[j]` samples f at t_j = a·j/K. ε_n is the largest grid point up to which
/// |f(t)| ≤ tⁿ holds; on [ε_{n+1}, ε_n] the envelope is t^{e(t)} with the exponent
/// blended monotonically (cubic smoothstep) from n + 1 to n.
pub fn flat_factorize(values: &[f64], a: f64, n_max: u32) -> Result<FlatFactorization> {
    let k = values.len() - 1;
    if k < 2 || a <= 0.0 {
        return Err(Error::GridMismatch("need at least three samples on a positive interval".into()));
    }
    let ts: Vec<f64> = (0..=k).map(|j| a * j as f64 / k as f64).collect();
    if values[0] != 0.0 {
        return Err(Error::NotFlat { order: 0 });
    }
    let mut eps = vec![a];
    let mut eps_idx = vec![k];
    for n in 1..=n_max {
        let mut last = 0;
        for j in 1..=k {
            if values[j].abs() <= ts[j].powi(n as i32) && ts[j] <= 1.0 {
                last = j;
            } else {
                break;
            }
        }
        let last = last.min(*eps_idx.last().unwrap());
        if last == 0 {
            return Err(Error::NotFlat { order: n });
        }
        eps.push(ts[last]);
        eps_idx.push(last);
    }
    let smooth = |u: f64| {
        let u = u.clamp(0.0, 1.0);
        u * u * (3.0 - 2.0 * u)
    };
    let exponent = |t: f64| -> f64 {
        if t <= eps[n_max as usize] {
            return n_max as f64;
        }
        for n in (0..n_max as usize).rev() {
            let (lo, hi) = (eps[n + 1], eps[n]);
            if t <= hi {
                if hi <= lo {
                    return n as f64;
                }
                return n as f64 + 1.0 - smooth((t - lo) / (hi - lo));
            }
        }
        0.0
    };
    let envelope: Vec<f64> = ts.iter().map(|&t| if t == 0.0 { 0.0 } else { t.powf(exponent(t)) }).collect();
    let g2: Vec<f64> = envelope.iter().map(|h| h.sqrt()).collect();
    let g1: Vec<f64> = values.iter().zip(&g2).map(|(f, s)| if *s == 0.0 { 0.0 } else { f / s }).collect();
    Ok(FlatFactorization { ts, g1, g2, envelope, eps })
}
