//! Central extensions U(1) → L̃ → ΩG in two models.
//!
//! * The cocycle model stores (γ, z, label) and multiplies phases through an
//!   explicit group 2-cocycle c(γ, η), optionally read through component labels.
//! * The path model stores (h, z) with h a [`Sheet`] from const_e up to γ.
//!   Two elements over the same loop are identified when z₂/z₁ equals the
//!   holonomy of the closed sheet h₁ ∪ h₂; concretely each element carries the
//!   invariant Θ = z − λ·S(h), S the cone integral.

use crate::abelcoh::{Cocycle2, Element, FinAbGroup, RootOfUnity};
use crate::cocycles::{cone_raw_range, Sheet};
use crate::error::{Error, Result};
use crate::liegroup::{AlgebraVector, GroupPoint, MatrixGroupSpec};
use crate::loopspace::{Interval, SampledLoop, SAMPLE_TOL};
use crate::phase::Phase;
use crate::util::{flat_step, par_map};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Equality tolerance for path-model phases at a given grid.
pub fn tol_equal(grid: usize) -> f64 {
    10.0 / (grid * grid) as f64
}

/// A U(1)-valued 2-cocycle on a loop group, possibly read through labels.
#[derive(Clone, Debug, PartialEq)]
pub enum LoopCocycle {
    Trivial,
    /// c(γ, η) = exp(i log γ(s)·log η(t)) on the positive reals.
    RPlus {
        s: f64,
        t: f64,
    },
    /// c(γ, η) = κ(cl γ, cl η).
    Label(Cocycle2),
    /// Complex conjugate.
    Dual(Box<LoopCocycle>),
    Product(Box<LoopCocycle>, Box<LoopCocycle>),
}

impl LoopCocycle {
    /// Parses `trivial` or `rplus(s,t)`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with_labels(s, None)
    }

    /// Also accepts `label-bilinear(ξ, [[m11, m12], ...])`, meaning κ(g, h) = ∏ ξ^(m_ij g_i h_j)
    /// on the label group, with ξ written "p/q".
    pub fn parse_with_labels(s: &str, labels: Option<&FinAbGroup>) -> Result<Self> {
        let s = s.trim();
        if s == "trivial" {
            return Ok(LoopCocycle::Trivial);
        }
        if let Some(body) = s.strip_prefix("rplus(").and_then(|b| b.strip_suffix(')')) {
            let v: Vec<f64> = body
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{x}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 2 {
                return Err(Error::Parse("rplus takes two evaluation points".into()));
            }
            return Ok(LoopCocycle::RPlus { s: v[0], t: v[1] });
        }
        if let Some(body) = s.strip_prefix("label-bilinear(").and_then(|b| b.strip_suffix(')')) {
            let k = labels.ok_or(Error::NoLabels)?;
            let (xi, matrix) = body.split_once(',').ok_or_else(|| Error::Parse("label-bilinear(ξ, matrix)".into()))?;
            let xi = RootOfUnity::parse(xi.trim())?;
            let m: Vec<Vec<i64>> = serde_json::from_str(matrix.trim())?;
            let r = k.rank();
            if m.len() != r || m.iter().any(|row| row.len() != r) {
                return Err(Error::GroupMismatch(format!("exponent matrix must be {r}×{r}")));
            }
            let zeta = m.iter().map(|row| row.iter().map(|&e| xi.pow(e)).collect()).collect();
            return Ok(LoopCocycle::Label(Cocycle2::bilinear(k.clone(), zeta)?));
        }
        Err(Error::Parse(format!("unknown cocycle '{s}'")))
    }

    pub fn eval(&self, a: &SampledLoop, la: Option<&[u64]>, b: &SampledLoop, lb: Option<&[u64]>) -> Result<Phase> {
        Ok(match self {
            LoopCocycle::Trivial => Phase::ZERO,
            LoopCocycle::RPlus { s, t } => {
                let x = a.log_at(*s)?.get(0, 0).re;
                let y = b.log_at(*t)?.get(0, 0).re;
                Phase::from_radians(x * y)
            }
            LoopCocycle::Label(k) => match (la, lb) {
                (Some(g), Some(h)) => Phase::from_root(k.eval(g, h)),
                _ => return Err(Error::NoLabels),
            },
            LoopCocycle::Dual(c) => -c.eval(a, la, b, lb)?,
            LoopCocycle::Product(c, d) => c.eval(a, la, b, lb)? + d.eval(a, la, b, lb)?,
        })
    }
}

/// How the path model lifts a loop to a sheet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LiftKind {
    /// Rows exp(β(s)·log γ), β a flat step.
    Geodesic,
    /// Rows exp(β(s)·log γ + a·sin²(πβ(s))·Z) with Z a seeded low-mode loop, Z(0) = 0.
    /// These sheets leave the support of γ.
    Detour { amplitude: f64, seed: u64 },
}

/// Extension of ΩG given by an explicit cocycle.
#[derive(Clone, Debug)]
pub struct CocycleModelExt {
    pub group: Arc<MatrixGroupSpec>,
    pub n: usize,
    pub cocycle: LoopCocycle,
    pub labels: Option<FinAbGroup>,
    pub restriction: Option<Interval>,
}

/// Extension of ΩG for simply connected G given by sheets and holonomies.
#[derive(Clone, Debug)]
pub struct PathModelExt {
    /// Carries the level λ.
    pub group: Arc<MatrixGroupSpec>,
    pub m: usize,
    pub n: usize,
    pub restriction: Option<Interval>,
}

impl PathModelExt {
    /// No level check.
    pub fn new(group: Arc<MatrixGroupSpec>, m: usize, n: usize) -> Self {
        PathModelExt { group, m, n, restriction: None }
    }

    /// Requires a simply connected group and a level within 1e-9 of an integer,
    /// so that all periods lie in 2πℤ.
    pub fn checked(group: Arc<MatrixGroupSpec>, m: usize, n: usize) -> Result<Self> {
        if !group.is_simply_connected() {
            return Err(Error::GroupMismatch(format!("{} is not simply connected", group.name.label())));
        }
        if (group.level - group.level.round()).abs() > 1e-9 {
            return Err(Error::ChecksFailed(format!("level {} gives non-integral periods", group.level)));
        }
        Ok(Self::new(group, m, n))
    }

    pub fn scale(&self) -> f64 {
        self.group.form_scale()
    }
}

#[derive(Clone, Debug)]
pub enum Extension {
    Cocycle(CocycleModelExt),
    Path(PathModelExt),
}

/// An element of an extension.
#[derive(Clone, Debug)]
pub enum CextElement {
    Cocycle {
        base: SampledLoop,
        phase: Phase,
        label: Option<Element>,
    },
    /// `raw` is the unscaled cone integral of the sheet.
    Path {
        sheet: Arc<Sheet>,
        phase: Phase,
        raw: f64,
    },
}

impl CextElement {
    pub fn phase(&self) -> Phase {
        match self {
            CextElement::Cocycle { phase, .. } | CextElement::Path { phase, .. } => *phase,
        }
    }

    /// Multiplies by the central element z.
    pub fn rotate(&self, z: Phase) -> CextElement {
        let mut c = self.clone();
        match &mut c {
            CextElement::Cocycle { phase, .. } | CextElement::Path { phase, .. } => *phase = *phase + z,
        }
        c
    }

    /// Samples of the underlying loop.
    pub fn base_samples(&self) -> &[GroupPoint] {
        match self {
            CextElement::Cocycle { base, .. } => base.samples(),
            CextElement::Path { sheet, .. } => sheet.top(),
        }
    }

    pub fn label(&self) -> Option<&[u64]> {
        match self {
            CextElement::Cocycle { label, .. } => label.as_deref(),
            _ => None,
        }
    }

    pub fn sheet(&self) -> Option<&Sheet> {
        match self {
            CextElement::Path { sheet, .. } => Some(sheet),
            _ => None,
        }
    }
}

/// Outcome of a disjoint-commutativity scan.
#[derive(Clone, Debug, Serialize)]
pub struct DisjointReport {
    pub phases: Vec<f64>,
    pub max: f64,
    pub witness: Option<usize>,
    pub tol: f64,
    pub pass: bool,
}

fn max_gap(a: &[GroupPoint], b: &[GroupPoint]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

fn low_mode_loop(group: &MatrixGroupSpec, seed: u64) -> impl Fn(f64) -> AlgebraVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<(AlgebraVector, AlgebraVector)> =
        (0..2).map(|_| (group.random_algebra(&mut rng, 1.0), group.random_algebra(&mut rng, 1.0))).collect();
    let zero = group.zero();
    move |t: f64| {
        coef.iter().enumerate().fold(zero.clone(), |acc, (k, (a, b))| {
            let k = (k + 1) as f64;
            acc.axpy((k * t).sin(), a).axpy(1.0 - (k * t).cos(), b)
        })
    }
}

impl Extension {
    pub fn trivial(group: Arc<MatrixGroupSpec>, n: usize) -> Self {
        Extension::Cocycle(CocycleModelExt { group, n, cocycle: LoopCocycle::Trivial, labels: None, restriction: None })
    }

    pub fn cocycle(group: Arc<MatrixGroupSpec>, n: usize, cocycle: LoopCocycle, labels: Option<FinAbGroup>) -> Self {
        Extension::Cocycle(CocycleModelExt { group, n, cocycle, labels, restriction: None })
    }

    /// The ℝ⁺ example with evaluation points s, t.
    pub fn rplus(n: usize, s: f64, t: f64) -> Self {
        Self::cocycle(Arc::new(MatrixGroupSpec::rplus()), n, LoopCocycle::RPlus { s, t }, None)
    }

    pub fn path(group: Arc<MatrixGroupSpec>, m: usize, n: usize) -> Self {
        Extension::Path(PathModelExt::new(group, m, n))
    }

    pub fn group(&self) -> &Arc<MatrixGroupSpec> {
        match self {
            Extension::Cocycle(c) => &c.group,
            Extension::Path(p) => &p.group,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Extension::Cocycle(c) => c.n,
            Extension::Path(p) => p.n,
        }
    }

    /// Smallest grid dimension, which sets the path-model tolerances.
    pub fn grid(&self) -> usize {
        match self {
            Extension::Cocycle(c) => c.n,
            Extension::Path(p) => p.m.min(p.n),
        }
    }

    pub fn is_path(&self) -> bool {
        matches!(self, Extension::Path(_))
    }

    pub fn restriction(&self) -> Option<Interval> {
        match self {
            Extension::Cocycle(c) => c.restriction,
            Extension::Path(p) => p.restriction,
        }
    }

    pub fn labels(&self) -> Option<&FinAbGroup> {
        match self {
            Extension::Cocycle(c) => c.labels.as_ref(),
            Extension::Path(_) => None,
        }
    }

    /// Equality tolerance for phases: 0 for the cocycle model.
    pub fn tol(&self) -> f64 {
        match self {
            Extension::Cocycle(_) => 0.0,
            Extension::Path(p) => tol_equal(p.m.min(p.n)),
        }
    }

    pub fn unit(&self) -> CextElement {
        match self {
            Extension::Cocycle(c) => CextElement::Cocycle {
                base: SampledLoop::constant_e(c.group.clone(), c.n),
                phase: Phase::ZERO,
                label: c.labels.as_ref().map(|k| k.zero()),
            },
            Extension::Path(p) => CextElement::Path {
                sheet: Arc::new(Sheet::constant(p.group.clone(), 1, p.n)),
                phase: Phase::ZERO,
                raw: 0.0,
            },
        }
    }

    /// The central element z.
    pub fn central(&self, z: Phase) -> CextElement {
        self.unit().rotate(z)
    }

    fn check_loop(&self, g: &SampledLoop) -> Result<()> {
        if g.group().name != self.group().name {
            return Err(Error::TagMismatch(format!(
                "{} loop in a {} extension",
                g.group().name.label(),
                self.group().name.label()
            )));
        }
        if g.n() != self.n() {
            return Err(Error::GridMismatch(format!("N = {} vs {}", g.n(), self.n())));
        }
        if !g.is_based() {
            return Err(Error::SupportViolation("loop is not based".into()));
        }
        if let Some(iv) = self.restriction() {
            if !g.is_supported_in(&iv) {
                return Err(Error::SupportViolation(format!("loop leaves ({:.4}, {:.4})", iv.a, iv.b)));
            }
        }
        Ok(())
    }

    fn check_element(&self, a: &CextElement) -> Result<()> {
        match (self, a) {
            (Extension::Cocycle(_), CextElement::Cocycle { .. }) | (Extension::Path(_), CextElement::Path { .. }) => {}
            _ => return Err(Error::ModelMismatch),
        }
        if a.base_samples().len() != self.n() {
            return Err(Error::GridMismatch(format!(
                "element on N = {} in an extension on N = {}",
                a.base_samples().len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Lift with phase 0 (zero label in a labelled extension).
    pub fn lift(&self, g: &SampledLoop) -> Result<CextElement> {
        self.lift_with(g, LiftKind::Geodesic)
    }

    pub fn lift_labeled(&self, g: &SampledLoop, label: &[u64]) -> Result<CextElement> {
        match self {
            Extension::Cocycle(c) => {
                self.check_loop(g)?;
                let k = c.labels.as_ref().ok_or(Error::NoLabels)?;
                if !k.contains(label) {
                    return Err(Error::GroupMismatch(format!("{label:?} is not an element of {}", k.label())));
                }
                Ok(CextElement::Cocycle { base: g.clone(), phase: Phase::ZERO, label: Some(label.to_vec()) })
            }
            Extension::Path(_) => Err(Error::NoLabels),
        }
    }

    pub fn lift_with(&self, g: &SampledLoop, kind: LiftKind) -> Result<CextElement> {
        self.check_loop(g)?;
        match self {
            Extension::Cocycle(c) => Ok(CextElement::Cocycle {
                base: g.clone(),
                phase: Phase::ZERO,
                label: c.labels.as_ref().map(|k| k.zero()),
            }),
            Extension::Path(p) => {
                let sheet = lift_sheet(p, g.samples(), kind)?;
                let raw = cone_raw_range(&sheet, 0, sheet.m())?;
                Ok(CextElement::Path { sheet: Arc::new(sheet), phase: Phase::ZERO, raw })
            }
        }
    }

    /// Lift multiplied by the exact phase `z`.
    pub fn lift_with_phase(&self, g: &SampledLoop, kind: LiftKind, z: RootOfUnity) -> Result<CextElement> {
        Ok(self.lift_with(g, kind)?.rotate(Phase::from_root(z)))
    }

    /// Lift over a sheet chosen by the caller.
    pub fn lift_sheet(&self, sheet: Sheet, phase: Phase) -> Result<CextElement> {
        match self {
            Extension::Path(p) => {
                if sheet.n() != p.n || sheet.group().name != p.group.name {
                    return Err(Error::GridMismatch("sheet does not match the extension".into()));
                }
                let raw = cone_raw_range(&sheet, 0, sheet.m())?;
                Ok(CextElement::Path { sheet: Arc::new(sheet), phase, raw })
            }
            Extension::Cocycle(_) => Err(Error::ModelMismatch),
        }
    }

    /// The underlying loop.
    pub fn project(&self, a: &CextElement) -> Result<SampledLoop> {
        self.check_element(a)?;
        match a {
            CextElement::Cocycle { base, .. } => Ok(base.clone()),
            CextElement::Path { sheet, .. } => SampledLoop::new(
                self.group().clone(),
                sheet.top().to_vec(),
                None,
                true,
                crate::loopspace::default_window(self.n()),
            ),
        }
    }

    /// Θ = z − λ·S(h); the phase carried by the cocycle model.
    pub fn invariant(&self, a: &CextElement) -> Result<Phase> {
        self.check_element(a)?;
        Ok(match (self, a) {
            (Extension::Path(p), CextElement::Path { phase, raw, .. }) => {
                *phase + Phase::from_radians(-p.scale() * raw)
            }
            _ => a.phase(),
        })
    }

    pub fn mul(&self, a: &CextElement, b: &CextElement) -> Result<CextElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        match (self, a, b) {
            (
                Extension::Cocycle(c),
                CextElement::Cocycle { base: ga, phase: za, label: la },
                CextElement::Cocycle { base: gb, phase: zb, label: lb },
            ) => {
                let w = c.cocycle.eval(ga, la.as_deref(), gb, lb.as_deref())?;
                let label = match (&c.labels, la, lb) {
                    (Some(k), Some(x), Some(y)) => Some(k.add(x, y)),
                    _ => None,
                };
                Ok(CextElement::Cocycle { base: ga.pointwise_mul(gb)?, phase: *za + *zb + w, label })
            }
            (
                Extension::Path(_),
                CextElement::Path { sheet: ha, phase: za, raw: ra },
                CextElement::Path { sheet: hb, phase: zb, raw: rb },
            ) => {
                let _ = rb;
                let tr = hb.left_translate(ha.top())?;
                let joined = ha.concat(&tr)?;
                let extra = cone_raw_range(&joined, ha.m(), joined.m())?;
                Ok(CextElement::Path { sheet: Arc::new(joined), phase: *za + *zb, raw: ra + extra })
            }
            _ => Err(Error::ModelMismatch),
        }
    }

    pub fn inv(&self, a: &CextElement) -> Result<CextElement> {
        self.check_element(a)?;
        match (self, a) {
            (Extension::Cocycle(c), CextElement::Cocycle { base, phase, label }) => {
                let gi = base.inverse();
                let li = match (&c.labels, label) {
                    (Some(k), Some(x)) => Some(k.neg(x)),
                    _ => None,
                };
                let w = c.cocycle.eval(base, label.as_deref(), &gi, li.as_deref())?;
                Ok(CextElement::Cocycle { base: gi, phase: -(*phase) - w, label: li })
            }
            (Extension::Path(p), CextElement::Path { sheet, phase, raw }) => {
                let hi = sheet.pointwise_inverse();
                let tr = hi.left_translate(sheet.top())?;
                let joined = sheet.concat(&tr)?;
                let raw_prod = raw + cone_raw_range(&joined, sheet.m(), joined.m())?;
                let raw_inv = cone_raw_range(&hi, 0, hi.m())?;
                // Θ(a·a⁻¹) = 0
                let z = -(*phase) + Phase::from_radians(p.scale() * raw_prod);
                Ok(CextElement::Path { sheet: Arc::new(hi), phase: z, raw: raw_inv })
            }
            _ => Err(Error::ModelMismatch),
        }
    }

    /// The ratio b/a as a phase: zero iff a and b are equivalent.
    pub fn equivalent(&self, a: &CextElement, b: &CextElement) -> Result<Phase> {
        self.check_element(a)?;
        self.check_element(b)?;
        let gap = max_gap(a.base_samples(), b.base_samples());
        match self {
            Extension::Cocycle(_) => {
                if gap > SAMPLE_TOL || a.label() != b.label() {
                    return Err(Error::NotComparable);
                }
            }
            Extension::Path(_) => {
                if gap > 1e-10 {
                    return Err(Error::EndpointMismatch(gap));
                }
            }
        }
        Ok(self.invariant(b)? - self.invariant(a)?)
    }

    /// Phase of an element over const_e.
    pub fn phase_of_central(&self, a: &CextElement) -> Result<Phase> {
        self.check_element(a)?;
        let e = self.group().identity();
        let dev = a.base_samples().iter().map(|g| g.max_abs_diff(&e)).fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::NotCentral(dev));
        }
        if let Some(l) = a.label() {
            if l.iter().any(|&x| x != 0) {
                return Err(Error::NotCentral(0.0));
            }
        }
        self.invariant(a)
    }

    /// a b a⁻¹ b⁻¹.
    pub fn commutator(&self, a: &CextElement, b: &CextElement) -> Result<CextElement> {
        let ab = self.mul(a, b)?;
        let ai = self.inv(a)?;
        let bi = self.inv(b)?;
        self.mul(&self.mul(&ab, &ai)?, &bi)
    }

    /// Phase of the commutator of two elements whose base loops have disjoint supports.
    pub fn commutator_phase(&self, a: &CextElement, b: &CextElement) -> Result<Phase> {
        let (ga, gb) = (self.project(a)?, self.project(b)?);
        check_disjoint(&ga, &gb)?;
        self.phase_of_central(&self.commutator(a, b)?)
    }

    /// Commutator of geodesic lifts of loops with disjoint supports.
    pub fn commutator_pairing(&self, g: &SampledLoop, h: &SampledLoop) -> Result<Phase> {
        self.commutator_pairing_with(g, h, LiftKind::Geodesic)
    }

    pub fn commutator_pairing_with(&self, g: &SampledLoop, h: &SampledLoop, kind: LiftKind) -> Result<Phase> {
        check_disjoint(g, h)?;
        self.commutator_phase(&self.lift_with(g, kind)?, &self.lift_with(h, kind)?)
    }

    /// Largest commutator phase over pairs of elements; passes when it is at most `tol`.
    pub fn is_disjoint_commutative(&self, pairs: &[(CextElement, CextElement)], tol: f64) -> Result<DisjointReport> {
        let phases = par_map(pairs.len(), |k| self.commutator_phase(&pairs[k].0, &pairs[k].1).map(|p| p.angle()));
        let phases = phases.into_iter().collect::<Result<Vec<_>>>()?;
        let (mut max, mut witness) = (0.0, None);
        for (k, p) in phases.iter().enumerate() {
            if p.abs() > max {
                max = p.abs();
                witness = Some(k);
            }
        }
        Ok(DisjointReport { pass: max <= tol, witness: if max > tol { witness } else { None }, phases, max, tol })
    }

    /// c′(γ, η) = c(γ, η)·κ(cl γ, cl η).
    pub fn modify_product(&self, kappa: &Cocycle2) -> Result<Extension> {
        match self {
            Extension::Cocycle(c) => {
                let k = c.labels.as_ref().ok_or(Error::NoLabels)?;
                if kappa.group() != k {
                    return Err(Error::GroupMismatch(format!("{} vs {}", kappa.group().label(), k.label())));
                }
                if !kappa.is_normalized() {
                    return Err(Error::NotNormalized);
                }
                let cocycle = match &c.cocycle {
                    LoopCocycle::Trivial => LoopCocycle::Label(kappa.clone()),
                    other => LoopCocycle::Product(Box::new(other.clone()), Box::new(LoopCocycle::Label(kappa.clone()))),
                };
                Ok(Extension::Cocycle(CocycleModelExt { cocycle, ..c.clone() }))
            }
            Extension::Path(_) => Err(Error::NoLabels),
        }
    }

    /// Conjugate cocycle, resp. negated level.
    pub fn dual(&self) -> Extension {
        match self {
            Extension::Cocycle(c) => {
                let cocycle = match &c.cocycle {
                    LoopCocycle::Trivial => LoopCocycle::Trivial,
                    LoopCocycle::Dual(inner) => (**inner).clone(),
                    other => LoopCocycle::Dual(Box::new(other.clone())),
                };
                Extension::Cocycle(CocycleModelExt { cocycle, ..c.clone() })
            }
            Extension::Path(p) => {
                Extension::Path(PathModelExt { group: Arc::new(p.group.with_level(-p.group.level)), ..p.clone() })
            }
        }
    }

    /// Product of cocycles, resp. sum of levels.
    pub fn tensor(&self, o: &Extension) -> Result<Extension> {
        match (self, o) {
            (Extension::Cocycle(a), Extension::Cocycle(b)) => {
                if a.group.name != b.group.name || a.n != b.n || a.labels != b.labels {
                    return Err(Error::GroupMismatch("extensions of different loop groups".into()));
                }
                let cocycle = LoopCocycle::Product(Box::new(a.cocycle.clone()), Box::new(b.cocycle.clone()));
                Ok(Extension::Cocycle(CocycleModelExt { cocycle, ..a.clone() }))
            }
            (Extension::Path(a), Extension::Path(b)) => {
                if a.group.name != b.group.name || a.n != b.n || a.m != b.m {
                    return Err(Error::GroupMismatch("extensions of different loop groups".into()));
                }
                Ok(Extension::Path(PathModelExt {
                    group: Arc::new(a.group.with_level(a.group.level + b.group.level)),
                    ..a.clone()
                }))
            }
            _ => Err(Error::ModelMismatch),
        }
    }

    /// Φ ↦ φ(cl Φ)·Φ for a character φ of the label group, given by its values on generators.
    pub fn twist(&self, phi: &[RootOfUnity], a: &CextElement) -> Result<CextElement> {
        self.check_element(a)?;
        let k = self.labels().ok_or(Error::NoLabels)?;
        if phi.len() != k.rank() || phi.iter().zip(k.orders()).any(|(z, &n)| !z.pow(n as i64).is_one()) {
            return Err(Error::GroupMismatch("not a character of the label group".into()));
        }
        let l = a.label().ok_or(Error::NoLabels)?;
        let v = l.iter().zip(phi).fold(RootOfUnity::ONE, |acc, (&x, z)| acc.mul(z.pow(x as i64)));
        Ok(a.rotate(Phase::from_root(v)))
    }

    /// The same extension with the support of every element confined to `iv`.
    pub fn restrict(&self, iv: Interval) -> Result<Extension> {
        let n = self.n() as f64;
        let aligned = |x: f64| {
            let k = x * n / (2.0 * PI);
            (k - k.round()).abs() < 1e-9
        };
        if !(iv.a >= 0.0 && iv.b <= 2.0 * PI && iv.a < iv.b) || !aligned(iv.a) || !aligned(iv.b) {
            return Err(Error::BadInterval(format!(
                "({}, {}) is not a grid-aligned subinterval of (0, 2π)",
                iv.a, iv.b
            )));
        }
        if iv.a == 0.0 && (iv.b - 2.0 * PI).abs() < 1e-12 {
            return Ok(self.clone());
        }
        if let Some(old) = self.restriction() {
            if !old.contains_interval(&iv) {
                return Err(Error::BadInterval("restriction must shrink the support".into()));
            }
        }
        let mut e = self.clone();
        match &mut e {
            Extension::Cocycle(c) => c.restriction = Some(iv),
            Extension::Path(p) => p.restriction = Some(iv),
        }
        Ok(e)
    }

    /// Same element on the geodesic sheet (path model); identity otherwise.
    pub fn normalize(&self, a: &CextElement) -> Result<CextElement> {
        self.check_element(a)?;
        match (self, a) {
            (Extension::Path(p), CextElement::Path { sheet, .. }) => {
                let theta = self.invariant(a)?;
                let geo = lift_sheet(p, sheet.top(), LiftKind::Geodesic)?;
                let raw = cone_raw_range(&geo, 0, geo.m())?;
                Ok(CextElement::Path { sheet: Arc::new(geo), phase: theta + Phase::from_radians(p.scale() * raw), raw })
            }
            _ => Ok(a.clone()),
        }
    }
}

fn declared_or_measured(g: &SampledLoop) -> Option<Interval> {
    g.support().or_else(|| g.measured_support())
}

/// Errors with `SupportsOverlap` unless the supports (declared, else measured) are disjoint.
pub fn check_disjoint(g: &SampledLoop, h: &SampledLoop) -> Result<()> {
    match (declared_or_measured(g), declared_or_measured(h)) {
        (Some(a), Some(b)) if !a.disjoint(&b) => {
            Err(Error::SupportsOverlap(format!("({:.4}, {:.4}) and ({:.4}, {:.4})", a.a, a.b, b.a, b.b)))
        }
        _ => Ok(()),
    }
}

/// Rows interpolating const_e to the loop `top`; the last row is `top` itself.
fn lift_sheet(p: &PathModelExt, top: &[GroupPoint], kind: LiftKind) -> Result<Sheet> {
    let g = &p.group;
    let m = p.m;
    let logs = top
        .iter()
        .map(|x| g.log(x).map_err(|_| Error::AntipodeDegenerate(g.antipode_distance(x))))
        .collect::<Result<Vec<_>>>()?;
    let detour = match kind {
        LiftKind::Geodesic => None,
        LiftKind::Detour { amplitude, seed } => {
            let z = low_mode_loop(g, seed);
            Some((amplitude, (0..top.len()).map(|j| z(2.0 * PI * j as f64 / top.len() as f64)).collect::<Vec<_>>()))
        }
    };
    let rows = par_map(m + 1, |i| {
        if i == m {
            return top.to_vec();
        }
        let b = flat_step(i as f64 / m as f64);
        logs.iter()
            .enumerate()
            .map(|(j, l)| {
                let mut x = l.scale(b);
                if let Some((amp, zs)) = &detour {
                    let w = amp * (PI * b).sin().powi(2);
                    if w != 0.0 {
                        x = x.axpy(w, &zs[j]);
                    }
                }
                if x.is_zero_exact() {
                    g.identity()
                } else {
                    g.exp(&x)
                }
            })
            .collect()
    });
    Sheet::new(g.clone(), rows)
}
