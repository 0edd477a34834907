//! Matrix Lie groups: SU(2), SU(n), SO(n), U(1), the positive reals and finite
//! products of these, realized as block-diagonal complex matrices.
//!
//! Group elements and Lie algebra elements are both plain [`CMat`] values; the
//! group they belong to is carried by the container (loop, sheet, spec) rather
//! than by every matrix.

mod mat;

pub use mat::CMat;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// An element of a matrix group.
pub type GroupPoint = CMat;
/// An element of a matrix Lie algebra.
pub type AlgebraVector = CMat;

/// Eigenvalues closer than this to −1 make the logarithm refuse.
pub const LOG_BRANCH_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupName {
    Su2,
    Sun(usize),
    Son(usize),
    U1,
    Rplus,
    Product(Vec<GroupName>),
}

impl GroupName {
    /// Parses names such as `su2`, `su(3)`, `so(4)`, `u1`, `rplus`, `su2*su2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s.contains('*') {
            let parts = s.split('*').map(GroupName::parse).collect::<Result<Vec<_>>>()?;
            return Ok(GroupName::Product(parts));
        }
        let num = |prefix: &str| -> Option<usize> {
            let rest = s.strip_prefix(prefix)?;
            let rest = rest.trim_start_matches('(').trim_end_matches(')');
            rest.parse().ok()
        };
        match s.as_str() {
            "su2" | "su(2)" => Ok(GroupName::Su2),
            "u1" | "u(1)" => Ok(GroupName::U1),
            "rplus" | "r+" => Ok(GroupName::Rplus),
            _ => {
                if let Some(n) = num("su") {
                    if n == 2 {
                        return Ok(GroupName::Su2);
                    }
                    if n >= 2 {
                        return Ok(GroupName::Sun(n));
                    }
                }
                if let Some(n) = num("so") {
                    if n >= 2 {
                        return Ok(GroupName::Son(n));
                    }
                }
                Err(Error::Parse(format!("unknown group '{s}'")))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            GroupName::Su2 => "su2".into(),
            GroupName::Sun(n) => format!("su({n})"),
            GroupName::Son(n) => format!("so({n})"),
            GroupName::U1 => "u1".into(),
            GroupName::Rplus => "rplus".into(),
            GroupName::Product(v) => v.iter().map(|g| g.label()).collect::<Vec<_>>().join("*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Simple {
    Su(usize),
    So(usize),
    U1,
    Rplus,
}

impl Simple {
    fn dim(self) -> usize {
        match self {
            Simple::Su(n) | Simple::So(n) => n,
            Simple::U1 | Simple::Rplus => 1,
        }
    }

    /// Factor multiplying −Re tr(XY) in the unnormalized form.
    fn trace_factor(self) -> f64 {
        match self {
            Simple::Su(_) | Simple::U1 => 1.0,
            Simple::So(_) => 0.5,
            Simple::Rplus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Block {
    kind: Simple,
    offset: usize,
}

/// A matrix group together with the level λ of its invariant form.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGroupSpec {
    pub name: GroupName,
    pub level: f64,
    dim: usize,
    blocks: Vec<Block>,
    basis: Vec<AlgebraVector>,
}

fn flatten(name: &GroupName, out: &mut Vec<Simple>) {
    match name {
        GroupName::Su2 => out.push(Simple::Su(2)),
        GroupName::Sun(n) => out.push(Simple::Su(*n)),
        GroupName::Son(n) => out.push(Simple::So(*n)),
        GroupName::U1 => out.push(Simple::U1),
        GroupName::Rplus => out.push(Simple::Rplus),
        GroupName::Product(v) => v.iter().for_each(|g| flatten(g, out)),
    }
}

fn simple_basis(kind: Simple) -> Vec<AlgebraVector> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    match kind {
        Simple::U1 => vec![CMat::scalar(i)],
        Simple::Rplus => vec![CMat::scalar(one)],
        Simple::Su(n) => {
            let mut v = Vec::new();
            if n == 2 {
                // i·σ₁, i·σ₂, i·σ₃
                let z = C64::new(0.0, 0.0);
                v.push(CMat::from_row_major(2, &[z, i, i, z]));
                v.push(CMat::from_row_major(2, &[z, one, -one, z]));
                v.push(CMat::from_row_major(2, &[i, z, z, -i]));
                return v;
            }
            for j in 0..n {
                for k in j + 1..n {
                    let mut a = CMat::zeros(n);
                    a.set(j, k, i);
                    a.set(k, j, i);
                    v.push(a);
                    let mut b = CMat::zeros(n);
                    b.set(j, k, one);
                    b.set(k, j, -one);
                    v.push(b);
                }
            }
            for d in 1..n {
                let norm = (2.0 / (d * (d + 1)) as f64).sqrt();
                let mut h = CMat::zeros(n);
                for k in 0..d {
                    h.set(k, k, i * norm);
                }
                h.set(d, d, -i * norm * d as f64);
                v.push(h);
            }
            v
        }
        Simple::So(n) => {
            let mut v = Vec::new();
            for j in 0..n {
                for k in j + 1..n {
                    let mut a = CMat::zeros(n);
                    a.set(j, k, one);
                    a.set(k, j, -one);
                    v.push(a);
                }
            }
            v
        }
    }
}

impl MatrixGroupSpec {
    pub fn new(name: GroupName, level: f64) -> Self {
        let mut kinds = Vec::new();
        flatten(&name, &mut kinds);
        let mut blocks = Vec::new();
        let mut off = 0;
        for k in &kinds {
            blocks.push(Block { kind: *k, offset: off });
            off += k.dim();
        }
        let dim = off;
        let mut basis = Vec::new();
        for b in &blocks {
            for e in simple_basis(b.kind) {
                let mut m = CMat::zeros(dim);
                let s = b.kind.dim();
                for r in 0..s {
                    for c in 0..s {
                        m.set(b.offset + r, b.offset + c, e.get(r, c));
                    }
                }
                basis.push(m);
            }
        }
        MatrixGroupSpec { name, level, dim, blocks, basis }
    }

    pub fn su2(level: f64) -> Self {
        Self::new(GroupName::Su2, level)
    }

    pub fn rplus() -> Self {
        Self::new(GroupName::Rplus, 1.0)
    }

    pub fn u1(level: f64) -> Self {
        Self::new(GroupName::U1, level)
    }

    pub fn with_level(&self, level: f64) -> Self {
        MatrixGroupSpec { level, ..self.clone() }
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[AlgebraVector] {
        &self.basis
    }

    pub fn is_su2(&self) -> bool {
        self.blocks.len() == 1 && self.blocks[0].kind == Simple::Su(2)
    }

    pub fn is_abelian(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b.kind, Simple::U1 | Simple::Rplus))
    }

    pub fn is_simply_connected(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b.kind, Simple::Su(_) | Simple::Rplus))
    }

    pub fn identity(&self) -> GroupPoint {
        CMat::identity(self.dim)
    }

    pub fn zero(&self) -> AlgebraVector {
        CMat::zeros(self.dim)
    }

    fn check_dim(&self, m: &CMat) -> Result<()> {
        if m.n() != self.dim {
            return Err(Error::TagMismatch(format!("{}x{} matrix for {}", m.n(), m.n(), self.name.label())));
        }
        Ok(())
    }

    /// Linear combination of basis vectors.
    pub fn algebra_from_coords(&self, coords: &[f64]) -> AlgebraVector {
        assert_eq!(coords.len(), self.basis.len());
        let mut x = self.zero();
        for (c, e) in coords.iter().zip(&self.basis) {
            x = x.axpy(*c, e);
        }
        x
    }

    /// Coordinates of an algebra element in the basis (least squares via the trace pairing).
    pub fn algebra_coords(&self, x: &AlgebraVector) -> Vec<f64> {
        let k = self.basis.len();
        let mut g = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for a in 0..k {
            for b in 0..k {
                g[a][b] = self.basis[a].adjoint().re_trace_product(&self.basis[b]);
            }
            rhs[a] = self.basis[a].adjoint().re_trace_product(x);
        }
        solve_dense(g, rhs)
    }

    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> AlgebraVector {
        let coords: Vec<f64> = (0..self.basis.len()).map(|_| rng.gen_range(-1.0..1.0) * scale).collect();
        self.algebra_from_coords(&coords)
    }

    /// Distance of a matrix from the group: unitarity (or positivity) and determinant defects.
    pub fn point_defect(&self, g: &GroupPoint) -> f64 {
        if g.n() != self.dim {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let m = g.block(b.offset, b.kind.dim());
            let d = match b.kind {
                Simple::Rplus => {
                    let z = m.get(0, 0);
                    if z.re > 0.0 {
                        z.im.abs()
                    } else {
                        f64::INFINITY
                    }
                }
                Simple::U1 => (m.get(0, 0).norm() - 1.0).abs(),
                Simple::Su(_) => {
                    let u = m.adjoint().matmul(&m).max_abs_diff(&CMat::identity(m.n()));
                    u.max((m.det() - C64::new(1.0, 0.0)).norm())
                }
                Simple::So(_) => {
                    let u = m.adjoint().matmul(&m).max_abs_diff(&CMat::identity(m.n()));
                    let im = m.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                    u.max(im).max((m.det() - C64::new(1.0, 0.0)).norm())
                }
            };
            worst = worst.max(d);
        }
        // off-block entries must vanish
        worst.max(self.off_block_size(g))
    }

    fn off_block_size(&self, m: &CMat) -> f64 {
        let mut owner = vec![0usize; self.dim];
        for (k, b) in self.blocks.iter().enumerate() {
            for r in 0..b.kind.dim() {
                owner[b.offset + r] = k;
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if owner[i] != owner[j] {
                    worst = worst.max(m.get(i, j).norm());
                }
            }
        }
        worst
    }

    /// Distance of a matrix from the Lie algebra.
    pub fn algebra_defect(&self, x: &AlgebraVector) -> f64 {
        if x.n() != self.dim {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let m = x.block(b.offset, b.kind.dim());
            let d = match b.kind {
                Simple::Rplus => m.get(0, 0).im.abs(),
                Simple::U1 => m.get(0, 0).re.abs(),
                Simple::Su(_) => (&m.adjoint() + &m).norm_fro().max(m.trace().norm()),
                Simple::So(_) => {
                    let im = m.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                    (&m.adjoint() + &m).norm_fro().max(im)
                }
            };
            worst = worst.max(d);
        }
        worst.max(self.off_block_size(x))
    }

    /// Verifies that the basis lies in the algebra and is linearly independent.
    pub fn validate_basis(&self) -> bool {
        if self.basis.iter().any(|e| self.algebra_defect(e) > 1e-12) {
            return false;
        }
        let k = self.basis.len();
        let g: Vec<Vec<f64>> = (0..k)
            .map(|a| (0..k).map(|b| self.basis[a].adjoint().re_trace_product(&self.basis[b])).collect())
            .collect();
        gram_rank(g, 1e-12) == k
    }

    /// Matrix exponential.
    pub fn exp(&self, x: &AlgebraVector) -> GroupPoint {
        if self.blocks.len() == 1 {
            return exp_simple(self.blocks[0].kind, x);
        }
        let parts: Vec<CMat> =
            self.blocks.iter().map(|b| exp_simple(b.kind, &x.block(b.offset, b.kind.dim()))).collect();
        CMat::block_diag(&parts)
    }

    /// Principal logarithm, refusing points whose spectrum comes within
    /// [`LOG_BRANCH_MARGIN`] of −1.
    pub fn log(&self, g: &GroupPoint) -> Result<AlgebraVector> {
        self.check_dim(g)?;
        if self.blocks.len() == 1 {
            return log_simple(self.blocks[0].kind, g);
        }
        let parts = self
            .blocks
            .iter()
            .map(|b| log_simple(b.kind, &g.block(b.offset, b.kind.dim())))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMat::block_diag(&parts))
    }

    /// Distance of the spectrum of `g` from −1 (infinite for the positive reals).
    pub fn antipode_distance(&self, g: &GroupPoint) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let m = g.block(b.offset, b.kind.dim());
                match b.kind {
                    Simple::Rplus => f64::INFINITY,
                    Simple::U1 => (m.get(0, 0) / m.get(0, 0).norm() + 1.0).norm(),
                    Simple::Su(2) if su2_shaped(&m) => {
                        let c = m.get(0, 0).re.clamp(-1.0, 1.0);
                        // eigenvalues e^{±iθ}, |e^{iθ}+1| = 2 cos(θ/2)
                        (2.0 * (1.0 + c)).max(0.0).sqrt()
                    }
                    _ => (&m + &CMat::identity(m.n())).min_singular_value(),
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The unnormalized form −Re tr(XY) (with the per-factor conventions), without level or basic constant.
    pub fn raw_form(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        if self.blocks.len() == 1 {
            return -self.blocks[0].kind.trace_factor() * x.re_trace_product(y);
        }
        self.blocks
            .iter()
            .map(|b| {
                let s = b.kind.dim();
                -b.kind.trace_factor() * x.block(b.offset, s).re_trace_product(&y.block(b.offset, s))
            })
            .sum()
    }

    /// The scale multiplying [`Self::raw_form`]: level times the calibrated basic constant.
    pub fn form_scale(&self) -> f64 {
        self.level * crate::cocycles::basic_constant()
    }

    /// Invariant symmetric bilinear form b at this level.
    pub fn bform(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.level * (crate::cocycles::basic_constant() * self.raw_form(x, y)))
    }

    /// ν(x, y, z) = b([x, y], z).
    pub fn wz_three_form(&self, x: &AlgebraVector, y: &AlgebraVector, z: &AlgebraVector) -> Result<f64> {
        self.check_dim(x)?;
        self.bform(&x.commutator(y), z)
    }

    /// Ad_g x = g x g⁻¹.
    pub fn adjoint_action(&self, g: &GroupPoint, x: &AlgebraVector) -> AlgebraVector {
        g.matmul(x).matmul(&self.inverse(g))
    }

    /// Group inverse; adjoint for the compact factors.
    pub fn inverse(&self, g: &GroupPoint) -> GroupPoint {
        if self.blocks.iter().all(|b| !matches!(b.kind, Simple::Rplus)) {
            g.adjoint()
        } else {
            g.inverse().expect("group elements are invertible")
        }
    }
}

fn su2_shaped(m: &CMat) -> bool {
    m.n() == 2
        && (m.get(1, 1) - m.get(0, 0).conj()).norm() < 1e-9
        && (m.get(1, 0) + m.get(0, 1).conj()).norm() < 1e-9
        && ((m.get(0, 0).norm_sqr() + m.get(0, 1).norm_sqr()) - 1.0).abs() < 1e-9
}

fn su2_alg_shaped(x: &CMat) -> bool {
    x.n() == 2
        && x.get(0, 0).re.abs() < 1e-12
        && (x.get(1, 1) + x.get(0, 0)).norm() < 1e-12
        && (x.get(1, 0) + x.get(0, 1).conj()).norm() < 1e-12
}

/// Quaternion coordinates (a₀, a₁, a₂, a₃) of an SU(2)-shaped matrix a₀ + Σ aₖ iσₖ.
pub fn su2_to_quat(m: &CMat) -> [f64; 4] {
    let (al, be) = (m.get(0, 0), m.get(0, 1));
    [al.re, be.im, be.re, al.im]
}

pub fn quat_to_su2(q: [f64; 4]) -> CMat {
    let al = C64::new(q[0], q[3]);
    let be = C64::new(q[2], q[1]);
    CMat::from_row_major(2, &[al, be, -be.conj(), al.conj()])
}

/// Coordinates of x = Σ xₖ iσₖ.
pub(crate) fn su2_alg_to_vec(x: &CMat) -> [f64; 3] {
    let (a, b) = (x.get(0, 0), x.get(0, 1));
    [b.im, b.re, a.im]
}

pub(crate) fn vec_to_su2_alg(v: [f64; 3]) -> CMat {
    let a = C64::new(0.0, v[2]);
    let b = C64::new(v[1], v[0]);
    CMat::from_row_major(2, &[a, b, -b.conj(), -a])
}

fn exp_simple(kind: Simple, x: &CMat) -> CMat {
    match kind {
        Simple::U1 | Simple::Rplus => CMat::scalar(x.get(0, 0).exp()),
        Simple::Su(2) if su2_alg_shaped(x) => {
            let v = su2_alg_to_vec(x);
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if r == 0.0 {
                return CMat::identity(2);
            }
            let s = r.sin() / r;
            quat_to_su2([r.cos(), s * v[0], s * v[1], s * v[2]])
        }
        _ => expm_pade(x),
    }
}

fn log_simple(kind: Simple, g: &CMat) -> Result<CMat> {
    match kind {
        Simple::Rplus => {
            let z = g.get(0, 0);
            if z.re <= 0.0 {
                return Err(Error::BranchCutProximity { distance: 0.0 });
            }
            Ok(CMat::real_scalar(z.re.ln()))
        }
        Simple::U1 => {
            let z = g.get(0, 0);
            let d = (z / z.norm() + 1.0).norm();
            if d < LOG_BRANCH_MARGIN {
                return Err(Error::BranchCutProximity { distance: d });
            }
            Ok(CMat::scalar(C64::new(0.0, z.arg())))
        }
        Simple::Su(2) if su2_shaped(g) => {
            if g.is_identity_exact() {
                return Ok(CMat::zeros(2));
            }
            let q = su2_to_quat(g);
            let s = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
            let th = s.atan2(q[0]);
            let d = 2.0 * (th / 2.0).cos();
            if d < LOG_BRANCH_MARGIN {
                return Err(Error::BranchCutProximity { distance: d });
            }
            let f = if s < 1e-8 { 1.0 + th * th / 6.0 } else { th / s };
            Ok(vec_to_su2_alg([f * q[1], f * q[2], f * q[3]]))
        }
        _ => {
            if g.is_identity_exact() {
                return Ok(CMat::zeros(g.n()));
            }
            let d = (g + &CMat::identity(g.n())).min_singular_value();
            if d < LOG_BRANCH_MARGIN {
                return Err(Error::BranchCutProximity { distance: d });
            }
            Ok(logm_iss(g))
        }
    }
}

/// Scaling and squaring with a diagonal [6/6] Padé approximant.
pub fn expm_pade(x: &CMat) -> CMat {
    let n = x.n();
    let norm = x.norm_one();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = x.scale(0.5f64.powi(s));
    // c_k = (2q−k)! q! / ((2q)! k! (q−k)!), q = 6
    let q = 6usize;
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    let c: Vec<f64> = (0..=q).map(|k| fact(2 * q - k) * fact(q) / (fact(2 * q) * fact(k) * fact(q - k))).collect();
    let mut num = CMat::zeros(n);
    let mut den = CMat::zeros(n);
    let mut pw = CMat::identity(n);
    for (k, ck) in c.iter().enumerate() {
        num = num.axpy(*ck, &pw);
        den = den.axpy(if k % 2 == 0 { *ck } else { -*ck }, &pw);
        pw = pw.matmul(&a);
    }
    let mut r = den.inverse().expect("Padé denominator is invertible for small norm").matmul(&num);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}

/// Inverse scaling and squaring: repeated Denman–Beavers square roots followed
/// by the atanh series log A = 2 Σ Z^{2k+1}/(2k+1), Z = (A−I)(A+I)⁻¹.
pub fn logm_iss(g: &CMat) -> CMat {
    let n = g.n();
    let id = CMat::identity(n);
    let mut a = g.clone();
    let mut k = 0;
    while (&a - &id).norm_fro() > 0.25 && k < 64 {
        let mut y = a.clone();
        let mut z = id.clone();
        for _ in 0..100 {
            let yi = y.inverse().expect("square-root iterate invertible");
            let zi = z.inverse().expect("square-root iterate invertible");
            let ny = (&y + &zi).scale(0.5);
            let nz = (&z + &yi).scale(0.5);
            let done = ny.max_abs_diff(&y) < 1e-15 * ny.norm_fro().max(1.0);
            y = ny;
            z = nz;
            if done {
                break;
            }
        }
        a = y;
        k += 1;
    }
    let zm = (&a - &id).matmul(&(&a + &id).inverse().expect("A + I invertible near identity"));
    let z2 = zm.matmul(&zm);
    let mut term = zm.clone();
    let mut acc = zm.clone();
    let mut j = 1;
    loop {
        term = term.matmul(&z2);
        j += 2;
        let t = term.scale(1.0 / j as f64);
        acc = &acc + &t;
        if t.norm_fro() < 1e-18 || j > 200 {
            break;
        }
    }
    acc.scale(2.0 * 2f64.powi(k))
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        let piv = a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / piv;
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn gram_rank(mut a: Vec<Vec<f64>>, tol: f64) -> usize {
    let n = a.len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n {
        if row >= n {
            break;
        }
        let p = (row..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        if a[p][col].abs() <= tol {
            continue;
        }
        a.swap(row, p);
        for i in row + 1..n {
            let f = a[i][col] / a[row][col];
            for j in col..n {
                a[i][j] -= f * a[row][j];
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}
