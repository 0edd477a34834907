//! The loop-algebra cocycle ω(X, Y) = ∫ b(X, Y′) dt, integrals of the
//! left-invariant 2-form it defines on ΩG, holonomies of closed sheets and
//! period integrals over 2-cycles.
//!
//! A [`Sheet`] is a path s ↦ h(s) in ΩG sampled on an (M+1)×N grid. Its
//! integral is taken over the cone u ↦ exp(u·log h(s)), which for each s-step
//! can be summed in closed form along u. Three-parameter families
//! ([`Membrane`]) are integrated cell by cell.

mod chart;

use crate::error::{Error, Result};
use crate::liegroup::{quat_to_su2, AlgebraVector, GroupPoint, MatrixGroupSpec};
use crate::loopspace::{SampledLoop, SAMPLE_TOL};
use crate::phase::Phase;
use crate::util::{pairwise_sum, par_map};
use chart::{qconj, qexp, qmul, Chart, MatChart, Quat, Su2Chart};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

/// Finite-difference stencil for Y′ in ω(X, Y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Stencil {
    #[default]
    Central2,
    Central4,
}

/// ω(X, Y) = ∫₀^{2π} b(X(t), Y′(t)) dt by the periodic trapezoid rule.
#[derive(Clone, Debug)]
pub struct LieCocycle {
    group: Arc<MatrixGroupSpec>,
    stencil: Stencil,
}

impl LieCocycle {
    pub fn new(group: Arc<MatrixGroupSpec>, stencil: Stencil) -> Self {
        LieCocycle { group, stencil }
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        &self.group
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// λ times the basic constant.
    pub fn scale(&self) -> f64 {
        self.group.form_scale()
    }

    pub fn omega_eval(&self, x: &[AlgebraVector], y: &[AlgebraVector]) -> Result<f64> {
        let n = x.len();
        if n != y.len() || n == 0 {
            return Err(Error::GridMismatch(format!("{} vs {} samples", x.len(), y.len())));
        }
        let h = 2.0 * PI / n as f64;
        let at = |j: isize| &y[j.rem_euclid(n as isize) as usize];
        let terms: Vec<f64> = (0..n as isize)
            .map(|j| {
                let dy = match self.stencil {
                    Stencil::Central2 => (at(j + 1) - at(j - 1)).scale(0.5 / h),
                    Stencil::Central4 => {
                        let a = (at(j + 1) - at(j - 1)).scale(8.0);
                        let b = at(j + 2) - at(j - 2);
                        (&a - &b).scale(1.0 / (12.0 * h))
                    }
                };
                self.group.raw_form(&x[j as usize], &dy)
            })
            .collect();
        Ok(self.scale() * h * pairwise_sum(&terms))
    }
}

/// A path in ΩG: rows h[0..=M], each a loop sampled at N points.
#[derive(Clone, Debug)]
pub struct Sheet {
    group: Arc<MatrixGroupSpec>,
    n: usize,
    points: Vec<GroupPoint>,
}

impl PartialEq for Sheet {
    fn eq(&self, o: &Self) -> bool {
        self.group.name == o.group.name && self.n == o.n && self.points == o.points
    }
}

impl Sheet {
    /// Checks that row 0 is constant e and every row is based.
    pub fn new(group: Arc<MatrixGroupSpec>, rows: Vec<Vec<GroupPoint>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::GridMismatch("a sheet needs at least two rows".into()));
        }
        let n = rows[0].len();
        if n < 4 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::GridMismatch("rows of unequal or tiny length".into()));
        }
        let e = group.identity();
        for (i, r) in rows.iter().enumerate() {
            if r.iter().any(|g| g.n() != group.dim()) {
                return Err(Error::TagMismatch(format!("row {i} has the wrong matrix size")));
            }
            let d = r[0].max_abs_diff(&e);
            if d > SAMPLE_TOL {
                return Err(Error::SupportViolation(format!("row {i} is not based (gap {d:.2e})")));
            }
        }
        if let Some(d) = rows[0].iter().map(|g| g.max_abs_diff(&e)).find(|&d| d > SAMPLE_TOL) {
            return Err(Error::SupportViolation(format!("row 0 is not constant e (gap {d:.2e})")));
        }
        Ok(Sheet { group, n, points: rows.into_iter().flatten().collect() })
    }

    /// Samples h(s, t) for s = i/M, t = 2πj/N.
    pub fn from_fn(
        group: Arc<MatrixGroupSpec>,
        m: usize,
        n: usize,
        f: impl Fn(f64, f64) -> GroupPoint + Sync + Send,
    ) -> Result<Self> {
        let rows = par_map(m + 1, |i| {
            let s = i as f64 / m as f64;
            (0..n).map(|j| f(s, 2.0 * PI * j as f64 / n as f64)).collect()
        });
        Self::new(group, rows)
    }

    /// The constant sheet at const_e.
    pub fn constant(group: Arc<MatrixGroupSpec>, m: usize, n: usize) -> Self {
        let e = group.identity();
        Sheet { n, points: vec![e; (m + 1) * n], group }
    }

    /// Rows interpolating const_e to `target`.
    pub fn from_rows(group: Arc<MatrixGroupSpec>, rows: &[SampledLoop]) -> Result<Self> {
        Self::new(group, rows.iter().map(|l| l.samples().to_vec()).collect())
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        &self.group
    }

    /// Number of s-steps (rows − 1).
    pub fn m(&self) -> usize {
        self.points.len() / self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[GroupPoint] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn point(&self, i: usize, j: usize) -> &GroupPoint {
        &self.points[i * self.n + j % self.n]
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn top(&self) -> &[GroupPoint] {
        self.row(self.m())
    }

    pub fn top_loop(&self) -> SampledLoop {
        SampledLoop::new(self.group.clone(), self.top().to_vec(), None, false, 0).expect("rows have the group's size")
    }

    fn row_gap_to_e(&self, i: usize) -> f64 {
        let e = self.group.identity();
        self.row(i).iter().map(|g| g.max_abs_diff(&e)).fold(0.0, f64::max)
    }

    /// Largest deviation from e over the first and last rows.
    pub fn closure_gap(&self) -> f64 {
        self.row_gap_to_e(0).max(self.row_gap_to_e(self.m()))
    }

    /// Every second row and column; M and N must be even.
    pub fn coarsen(&self) -> Result<Sheet> {
        let (m, n) = (self.m(), self.n);
        if m % 2 != 0 || n % 2 != 0 || n < 8 {
            return Err(Error::GridMismatch(format!("cannot halve a {m}×{n} sheet")));
        }
        let points = (0..=m).step_by(2).flat_map(|i| self.row(i).iter().step_by(2).cloned()).collect();
        Ok(Sheet { group: self.group.clone(), n: n / 2, points })
    }

    /// Rows of `self` followed by rows 1.. of `o`; the top of `self` must be the bottom of `o`.
    pub fn concat(&self, o: &Sheet) -> Result<Sheet> {
        self.check_compatible(o)?;
        let gap = self.top().iter().zip(o.row(0)).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
        if gap > 1e-10 {
            return Err(Error::EndpointMismatch(gap));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&o.points[o.n..]);
        Ok(Sheet { group: self.group.clone(), n: self.n, points })
    }

    fn check_compatible(&self, o: &Sheet) -> Result<()> {
        if self.group.name != o.group.name {
            return Err(Error::TagMismatch(format!("{} vs {}", self.group.name.label(), o.group.name.label())));
        }
        if self.n != o.n {
            return Err(Error::GridMismatch(format!("N = {} vs {}", self.n, o.n)));
        }
        Ok(())
    }

    /// Every row multiplied on the left by the loop `g`.
    pub fn left_translate(&self, g: &[GroupPoint]) -> Result<Sheet> {
        if g.len() != self.n {
            return Err(Error::GridMismatch(format!("N = {} vs {}", g.len(), self.n)));
        }
        let points = self.points.iter().enumerate().map(|(k, p)| g[k % self.n].matmul(p)).collect();
        Ok(Sheet { group: self.group.clone(), n: self.n, points })
    }

    /// Row order reversed (s ↦ 1 − s).
    pub fn reverse(&self) -> Sheet {
        let m = self.m();
        let points = (0..=m).rev().flat_map(|i| self.row(i).to_vec()).collect();
        Sheet { group: self.group.clone(), n: self.n, points }
    }

    /// Each row flipped, t ↦ −t.
    pub fn flip_rows(&self) -> Sheet {
        let n = self.n;
        let points = (0..=self.m())
            .flat_map(|i| (0..n).map(move |j| (i, (n - j) % n)))
            .map(|(i, j)| self.point(i, j).clone())
            .collect();
        Sheet { group: self.group.clone(), n, points }
    }

    pub fn pointwise_inverse(&self) -> Sheet {
        Sheet {
            group: self.group.clone(),
            n: self.n,
            points: self.points.iter().map(|g| self.group.inverse(g)).collect(),
        }
    }

    /// Applies `f(i, j, h[i][j])` to every point.
    pub fn map(&self, f: impl Fn(usize, usize, &GroupPoint) -> GroupPoint) -> Sheet {
        let n = self.n;
        let points = self.points.iter().enumerate().map(|(k, p)| f(k / n, k % n, p)).collect();
        Sheet { group: self.group.clone(), n, points }
    }

    /// Keeps rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Sheet {
        let points = idx.iter().flat_map(|&i| self.row(i).to_vec()).collect();
        Sheet { group: self.group.clone(), n: self.n, points }
    }
}

// ---------------------------------------------------------------------------
// Cone integral

fn cone_step<C: Chart>(c: &C, a: &[C::A], b: &[C::A]) -> f64 {
    let n = a.len();
    let mid: Vec<C::A> = a.iter().zip(b).map(|(x, y)| c.lin(0.5, x, 0.5, y)).collect();
    let y: Vec<C::A> = (0..n).map(|t| c.g_ad(&mid[t], &c.lin(1.0, &b[t], -1.0, &a[t]))).collect();
    let terms: Vec<f64> =
        (0..n).map(|t| c.raw(&mid[t], &c.lin(0.5, &y[(t + 1) % n], -0.5, &y[(t + n - 1) % n]))).collect();
    pairwise_sum(&terms)
}

fn cone_raw_with<C: Chart>(c: &C, sh: &Sheet, from: usize, to: usize) -> Result<f64> {
    let n = sh.n();
    let logs: Vec<Result<Vec<C::A>>> = par_map(to - from + 1, |k| {
        let i = from + k;
        (0..n).map(|j| c.log(&c.point(sh.point(i, j))).ok_or(Error::DegenerateCell { row: i, col: j })).collect()
    });
    let logs = logs.into_iter().collect::<Result<Vec<_>>>()?;
    let steps = par_map(to - from, |k| {
        if sh.row(from + k) == sh.row(from + k + 1) {
            0.0
        } else {
            cone_step(c, &logs[k], &logs[k + 1])
        }
    });
    Ok(pairwise_sum(&steps))
}

/// Unscaled cone integral over the s-steps `from..to` of a sheet.
pub(crate) fn cone_raw_range(sh: &Sheet, from: usize, to: usize) -> Result<f64> {
    if to <= from {
        return Ok(0.0);
    }
    if sh.group().is_su2() {
        cone_raw_with(&Su2Chart, sh, from, to)
    } else {
        cone_raw_with(&MatChart(sh.group()), sh, from, to)
    }
}

/// ∫ ω̄ over the cone spanned by the sheet.
///
/// Additive under [`Sheet::concat`] and odd under [`Sheet::reverse`], both to rounding.
pub fn surface_integral(sh: &Sheet, omega: &LieCocycle) -> Result<f64> {
    if sh.group().name != omega.group().name {
        return Err(Error::TagMismatch("sheet and cocycle groups differ".into()));
    }
    Ok(omega.scale() * cone_raw_range(sh, 0, sh.m())?)
}

/// exp(−i ∫ ω̄) for a sheet whose first and last rows are const_e.
pub fn c_holonomy(sh: &Sheet, omega: &LieCocycle) -> Result<Phase> {
    let gap = sh.closure_gap();
    if gap > 1e-10 {
        return Err(Error::EndpointMismatch(gap));
    }
    Ok(Phase::from_radians(-surface_integral(sh, omega)?))
}

/// [`surface_integral`] on the sheet and on its [`Sheet::coarsen`], combined by [`richardson`].
pub fn surface_integral_extrapolated(sh: &Sheet, omega: &LieCocycle) -> Result<f64> {
    Ok(richardson(surface_integral(&sh.coarsen()?, omega)?, surface_integral(sh, omega)?))
}

/// Scaled integral over the stereographic membrane from `pole`, extrapolated the same way;
/// the coarse membrane uses u_cells/2.
pub fn stereographic_integral_extrapolated(sh: &Sheet, omega: &LieCocycle, pole: Quat, u_cells: usize) -> Result<f64> {
    let raw = |s: &Sheet, k| membrane_raw(&stereographic_membrane(s, pole, k)?);
    Ok(omega.scale() * richardson(raw(&sh.coarsen()?, (u_cells / 2).max(1))?, raw(sh, u_cells)?))
}

/// How a closed sheet was contracted by [`c_holonomy_robust`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Contraction {
    /// Geodesic cone from e.
    Cone,
    /// Straight-line contraction in a stereographic chart whose pole avoids the sheet.
    Stereographic { pole: [f64; 4], clearance: f64 },
}

/// Like [`c_holonomy`], but when the cone meets the antipode of e (SU(2) only)
/// falls back to a stereographic contraction from a pole chosen away from the
/// sheet. The returned [`Contraction`] flags which route was taken.
pub fn c_holonomy_robust(sh: &Sheet, omega: &LieCocycle, u_cells: usize) -> Result<(Phase, Contraction)> {
    match c_holonomy(sh, omega) {
        Err(Error::DegenerateCell { .. }) if sh.group().is_su2() => {
            let (pole, clearance) = best_pole(sh);
            if clearance < 1e-2 {
                return Err(Error::AntipodeDegenerate(clearance));
            }
            let m = stereographic_membrane(sh, pole, u_cells)?;
            let v = omega.scale() * membrane_raw(&m)?;
            Ok((Phase::from_radians(-v), Contraction::Stereographic { pole, clearance }))
        }
        other => other.map(|p| (p, Contraction::Cone)),
    }
}

/// Among poles near −e, the one farthest from every sheet point.
fn best_pole(sh: &Sheet) -> (Quat, f64) {
    let pts: Vec<Quat> = sh.points().iter().map(crate::liegroup::su2_to_quat).collect();
    let mut best = ([-1.0, 0.0, 0.0, 0.0], 0.0);
    for k in 0..64 {
        // Fibonacci directions on S², tilted away from −e by a fixed angle.
        let z = 1.0 - (2.0 * k as f64 + 1.0) / 64.0;
        let r = (1.0 - z * z).sqrt();
        let ph = k as f64 * PI * (3.0 - 5f64.sqrt());
        for tilt in [0.0f64, 0.15, 0.3, 0.6] {
            let p = [-tilt.cos(), tilt.sin() * r * ph.cos(), tilt.sin() * r * ph.sin(), tilt.sin() * z];
            let clear = pts.iter().map(|q| qdist(q, &p)).fold(f64::INFINITY, f64::min);
            if clear > best.1 {
                best = (p, clear);
            }
        }
    }
    best
}

fn qdist(a: &Quat, b: &Quat) -> f64 {
    (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Three-parameter families

type PointFn<'a> = dyn Fn(usize, usize, usize) -> GroupPoint + Send + Sync + 'a;

/// A map (u, s, t) ↦ M(u, s, t) ∈ G on a grid of `u_cells × s_cells × n`
/// cells, t periodic and s optionally periodic.
pub struct Membrane<'a> {
    group: Arc<MatrixGroupSpec>,
    u_cells: usize,
    s_cells: usize,
    n: usize,
    s_periodic: bool,
    f: Box<PointFn<'a>>,
}

impl<'a> Membrane<'a> {
    pub fn new(
        group: Arc<MatrixGroupSpec>,
        u_cells: usize,
        s_cells: usize,
        n: usize,
        s_periodic: bool,
        f: impl Fn(usize, usize, usize) -> GroupPoint + Send + Sync + 'a,
    ) -> Self {
        Membrane { group, u_cells, s_cells, n, s_periodic, f: Box::new(f) }
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        &self.group
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.u_cells, self.s_cells, self.n)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> GroupPoint {
        (self.f)(i, j, k)
    }

    fn s_rows(&self) -> usize {
        if self.s_periodic {
            self.s_cells
        } else {
            self.s_cells + 1
        }
    }

    /// Largest variation across s of the faces u = 0 and u = 1; zero when both collapse.
    pub fn pole_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for i in [0, self.u_cells] {
            for k in 0..self.n {
                let p0 = self.point(i, 0, k);
                for j in 1..self.s_rows() {
                    gap = gap.max(self.point(i, j, k).max_abs_diff(&p0));
                }
            }
        }
        gap
    }

    /// The cone over a sheet: (u, s, t) ↦ exp(u·log h(s, t)).
    pub fn cone(sh: &'a Sheet, u_cells: usize) -> Result<Membrane<'a>> {
        let g = sh.group().clone();
        let logs = sh
            .points()
            .iter()
            .enumerate()
            .map(|(k, p)| g.log(p).map_err(|_| Error::DegenerateCell { row: k / sh.n(), col: k % sh.n() }))
            .collect::<Result<Vec<_>>>()?;
        let n = sh.n();
        let gg = g.clone();
        Ok(Membrane::new(g, u_cells, sh.m(), n, false, move |i, j, k| {
            gg.exp(&logs[j * n + k].scale(i as f64 / u_cells as f64))
        }))
    }
}

fn membrane_raw_with<C: Chart>(c: &C, m: &Membrane) -> Result<f64> {
    let (uc, sc, n) = m.dims();
    let sr = m.s_rows();
    let slab = |i: usize| -> Vec<Vec<C::P>> { par_map(sr, |j| (0..n).map(|k| c.point(&m.point(i, j, k))).collect()) };
    let log_of = |p: &C::P, i: usize, j: usize| c.log(p).ok_or(Error::DegenerateCell { row: i, col: j });
    let s_edges = |pts: &Vec<Vec<C::P>>, i: usize| -> Result<Vec<Vec<C::A>>> {
        par_map(sc, |j| {
            let jn = (j + 1) % sr;
            (0..n).map(|k| log_of(&c.left_diff(&pts[j][k], &pts[jn][k]), i, j)).collect()
        })
        .into_iter()
        .collect()
    };
    let mut prev = slab(0);
    let mut prev_s = s_edges(&prev, 0)?;
    let mut slabs = Vec::with_capacity(uc);
    for i in 0..uc {
        let next = slab(i + 1);
        let next_s = s_edges(&next, i + 1)?;
        let u_edges: Vec<Vec<C::A>> = par_map(sr, |j| {
            (0..n).map(|k| log_of(&c.left_diff(&prev[j][k], &next[j][k]), i, j)).collect::<Result<Vec<_>>>()
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let cells = par_map(sc, |j| {
            let jn = (j + 1) % sr;
            let a: Vec<C::A> = (0..n).map(|k| c.lin(0.5, &u_edges[j][k], 0.5, &u_edges[jn][k])).collect();
            let b: Vec<C::A> = (0..n).map(|k| c.lin(0.5, &prev_s[j][k], 0.5, &next_s[j][k])).collect();
            let terms: Vec<f64> =
                (0..n).map(|k| c.raw(&a[k], &c.lin(0.5, &b[(k + 1) % n], -0.5, &b[(k + n - 1) % n]))).collect();
            pairwise_sum(&terms)
        });
        slabs.push(pairwise_sum(&cells));
        prev = next;
        prev_s = next_s;
    }
    Ok(pairwise_sum(&slabs))
}

/// Unscaled ∫∫ du ds ω(M⁻¹∂_uM, M⁻¹∂_sM).
pub fn membrane_raw(m: &Membrane) -> Result<f64> {
    if m.group().is_su2() {
        membrane_raw_with(&Su2Chart, m)
    } else {
        membrane_raw_with(&MatChart(m.group()), m)
    }
}

pub fn membrane_integral(m: &Membrane, omega: &LieCocycle) -> Result<f64> {
    if m.group().name != omega.group().name {
        return Err(Error::TagMismatch("membrane and cocycle groups differ".into()));
    }
    Ok(omega.scale() * membrane_raw(m)?)
}

/// The integral of ω̄ over a 2-cycle in ΩG given as an s-periodic membrane
/// whose faces u = 0 and u = 1 collapse to single loops.
pub fn period_integral(m: &Membrane, omega: &LieCocycle) -> Result<f64> {
    if !m.s_periodic {
        return Err(Error::GridMismatch("a 2-cycle needs a periodic s direction".into()));
    }
    let gap = m.pole_gap();
    if gap > 1e-10 {
        return Err(Error::EndpointMismatch(gap));
    }
    membrane_integral(m, omega)
}

// ---------------------------------------------------------------------------
// Generators of π₂(ΩSU(2))

/// Which representative of the generating 2-cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleKind {
    /// n ↦ (t ↦ exp(t/2·n)·exp(−t/2·n₀)), degree one.
    Basic,
    /// n ↦ (t ↦ exp(t·n)), twice the generator.
    Double,
}

fn unit_sphere(i: usize, j: usize, u_cells: usize, s_cells: usize) -> [f64; 3] {
    let th = PI * i as f64 / u_cells as f64;
    // The s direction runs clockwise so that the basic cycle has positive period.
    let ph = -2.0 * PI * j as f64 / s_cells as f64;
    [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
}

/// The SU(2) 2-cycle of the given kind on a grid of `grid/2 × grid × grid` cells.
pub fn generator_cycle(group: Arc<MatrixGroupSpec>, grid: usize, kind: CycleKind) -> Membrane<'static> {
    let (uc, sc, n) = (grid / 2, grid, grid);
    let n0 = [0.0, 0.0, 1.0];
    Membrane::new(group, uc, sc, n, true, move |i, j, k| {
        let v = unit_sphere(i, j, uc, sc);
        let t = 2.0 * PI * k as f64 / n as f64;
        let q = match kind {
            CycleKind::Basic => {
                let a = qexp(&v.map(|x| 0.5 * t * x));
                let b = qexp(&n0.map(|x| -0.5 * t * x));
                qmul(&a, &b)
            }
            CycleKind::Double => qexp(&v.map(|x| t * x)),
        };
        quat_to_su2(q)
    })
}

/// Grids used to calibrate the basic form.
pub const CALIBRATION_GRIDS: (usize, usize) = (48, 96);

/// Result of calibrating the level-one form on the basic 2-cycle.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Calibration {
    pub coarse: f64,
    pub fine: f64,
    /// Richardson value (4·fine − coarse)/3.
    pub extrapolated: f64,
    /// 2π / extrapolated.
    pub constant: f64,
}

pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Unscaled period of a generator cycle at the given grid.
pub fn raw_period(grid: usize, kind: CycleKind) -> f64 {
    let g = Arc::new(MatrixGroupSpec::su2(1.0));
    membrane_raw(&generator_cycle(g, grid, kind)).expect("generator cycles stay off the branch cut")
}

static CALIBRATION: OnceLock<Calibration> = OnceLock::new();

pub fn calibration() -> &'static Calibration {
    CALIBRATION.get_or_init(|| {
        let (a, b) = CALIBRATION_GRIDS;
        let coarse = raw_period(a, CycleKind::Basic);
        let fine = raw_period(b, CycleKind::Basic);
        let extrapolated = richardson(coarse, fine);
        Calibration { coarse, fine, extrapolated, constant: 2.0 * PI / extrapolated }
    })
}

/// Constant c in b(X, Y) = −c·tr(XY) at level one, fixed so that the basic
/// 2-cycle has period 2π. Computed once per process.
pub fn basic_constant() -> f64 {
    calibration().constant
}

// ---------------------------------------------------------------------------
// Stereographic contraction and winding

/// Stereographic chart of S³ ≅ SU(2) from `pole`: q ↦ vec(q′)/(1 + q′₀), q′ = −p̄q.
fn stereo(pole: &Quat, q: &Quat) -> Option<[f64; 3]> {
    let qp = qmul(&qconj(pole), q).map(|x| -x);
    let d = 1.0 + qp[0];
    if d < 1e-12 {
        return None;
    }
    Some([qp[1] / d, qp[2] / d, qp[3] / d])
}

fn stereo_inv(pole: &Quat, x: &[f64; 3]) -> Quat {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let qp = [(1.0 - r2) / (1.0 + r2), 2.0 * x[0] / (1.0 + r2), 2.0 * x[1] / (1.0 + r2), 2.0 * x[2] / (1.0 + r2)];
    qmul(pole, &qp).map(|x| -x)
}

/// Contracts a closed sheet along straight lines towards the image of e in
/// the stereographic chart from `pole`.
pub fn stereographic_membrane(sh: &Sheet, pole: [f64; 4], u_cells: usize) -> Result<Membrane<'static>> {
    if !sh.group().is_su2() {
        return Err(Error::GroupMismatch("stereographic contraction is for SU(2)".into()));
    }
    let e = [1.0, 0.0, 0.0, 0.0];
    let pe = stereo(&pole, &e).ok_or(Error::AntipodeDegenerate(qdist(&pole, &e)))?;
    let (n, m) = (sh.n(), sh.m());
    let xs = sh
        .points()
        .iter()
        .map(|p| {
            let q = crate::liegroup::su2_to_quat(p);
            stereo(&pole, &q).ok_or(Error::AntipodeDegenerate(qdist(&pole, &q)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Membrane::new(sh.group().clone(), u_cells, m, n, false, move |i, j, k| {
        let u = i as f64 / u_cells as f64;
        let x = xs[j * n + k];
        let y = [0, 1, 2].map(|c| pe[c] + u * (x[c] - pe[c]));
        quat_to_su2(stereo_inv(&pole, &y))
    }))
}

/// Degree of a closed sheet around the point `target` of S³, counted as the
/// total solid angle of its stereographic image (from `pole`) seen from the
/// image of `target`, divided by 4π.
pub fn winding_number(sh: &Sheet, pole: [f64; 4], target: [f64; 4]) -> Result<f64> {
    if !sh.group().is_su2() {
        return Err(Error::GroupMismatch("winding numbers are computed for SU(2)".into()));
    }
    let c = stereo(&pole, &target).ok_or(Error::AntipodeDegenerate(qdist(&pole, &target)))?;
    let (n, m) = (sh.n(), sh.m());
    let xs = sh
        .points()
        .iter()
        .map(|p| {
            let q = crate::liegroup::su2_to_quat(p);
            stereo(&pole, &q)
                .map(|x| [x[0] - c[0], x[1] - c[1], x[2] - c[2]])
                .ok_or(Error::AntipodeDegenerate(qdist(&pole, &q)))
        })
        .collect::<Result<Vec<_>>>()?;
    let at = |i: usize, j: usize| &xs[i * n + j % n];
    let angles = par_map(m, |i| {
        let v: Vec<f64> = (0..n)
            .map(|j| {
                let (a, b, cc, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                solid_angle(a, b, cc) + solid_angle(a, cc, d)
            })
            .collect();
        pairwise_sum(&v)
    });
    Ok(pairwise_sum(&angles) / (4.0 * PI))
}

/// Signed solid angle of a triangle seen from the origin.
fn solid_angle(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let dot = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let (la, lb, lc) = (dot(a, a).sqrt(), dot(b, b).sqrt(), dot(c, c).sqrt());
    let triple =
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
    2.0 * triple.atan2(den)
}

// ---------------------------------------------------------------------------
// Differentiating a group cocycle

/// A U(1)-valued function of two loops.
pub type GroupCocycleFn<'a> = dyn Fn(&SampledLoop, &SampledLoop) -> Result<Phase> + 'a;

/// The Lie-algebra cocycle of a group 2-cocycle c at (X, Y): the mixed second
/// derivative at 0 of arg c(e^{sX}, e^{tY}) − arg c(e^{tY}, e^{sX}), by central differences.
pub fn lie_cocycle_from_group_cocycle(
    group: &Arc<MatrixGroupSpec>,
    c: &GroupCocycleFn,
    x: &[AlgebraVector],
    y: &[AlgebraVector],
    step: f64,
) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", x.len(), y.len())));
    }
    if !(step > 0.0) || !(4.0 * step * step).is_normal() {
        return Err(Error::StepUnderflow);
    }
    let one_param = |v: &[AlgebraVector], s: f64| {
        SampledLoop::new(group.clone(), v.iter().map(|a| group.exp(&a.scale(s))).collect(), None, false, 0)
    };
    let f = |s: f64, t: f64| -> Result<f64> {
        let (a, b) = (one_param(x, s)?, one_param(y, t)?);
        Ok(c(&a, &b)?.angle() - c(&b, &a)?.angle())
    };
    let h = step;
    Ok((f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h))
}

/// Unscaled cone integral of a sheet with a chosen row range, exposed for the
/// path model's cached integrals.
pub fn sheet_raw(sh: &Sheet) -> Result<f64> {
    cone_raw_range(sh, 0, sh.m())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su2() -> Arc<MatrixGroupSpec> {
        Arc::new(MatrixGroupSpec::su2(1.0))
    }

    #[test]
    fn generator_orientation_is_positive() {
        let p = raw_period(24, CycleKind::Basic);
        assert!(p > 0.0, "raw period {p}");
    }

    #[test]
    fn winding_of_basic_cycle_faces() {
        // A small closed sheet around nothing has winding 0.
        let g = su2();
        let sh = Sheet::from_fn(g.clone(), 16, 16, |s, t| {
            let a = (PI * s).sin() * 0.4;
            g.exp(&g.algebra_from_coords(&[a * t.sin(), a * (1.0 - t.cos()), 0.0]))
        })
        .unwrap();
        let w = winding_number(&sh, [-1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(w.abs() < 1e-9, "{w}");
    }

    #[test]
    fn stereographic_round_trip() {
        let p = [-0.9, 0.1, 0.3, (1.0f64 - 0.81 - 0.01 - 0.09).sqrt()];
        let q = [0.5, 0.5, -0.5, 0.5];
        let x = stereo(&p, &q).unwrap();
        let back = stereo_inv(&p, &x);
        assert!(qdist(&q, &back) < 1e-14);
        let xe = stereo(&[-1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((xe[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cone_matches_membrane_on_smooth_sheet() {
        let g = su2();
        let sh = Sheet::from_fn(g.clone(), 24, 32, |s, t| {
            let a = (PI * s).sin();
            g.exp(&g.algebra_from_coords(&[a * t.sin(), 0.6 * a * (1.0 - t.cos()), 0.3 * s * (2.0 * t).sin()]))
        })
        .unwrap();
        let cone = cone_raw_range(&sh, 0, sh.m()).unwrap();
        let mem = membrane_raw(&Membrane::cone(&sh, 64).unwrap()).unwrap();
        assert!((cone - mem).abs() < 1e-3 * (1.0 + cone.abs()), "{cone} vs {mem}");
    }
}
