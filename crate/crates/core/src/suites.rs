//! Verification suites, one per module, each producing a [`Report`].

use crate::abelcoh::{
    enumerate_skew_bihoms, lift_alt_to_cocycle, modified_obstruction, quotient_order_by_enumeration, random_cocycle,
    random_skew_bihom, skew, so_parity_pairing, two_torsion_quotient, FinAbGroup,
};
use crate::battery;
use crate::centralext::{tol_equal, CextElement, Extension, LiftKind, LoopCocycle};
use crate::cocycles::{
    c_holonomy, calibration, membrane_raw, raw_period, richardson, stereographic_integral_extrapolated,
    stereographic_membrane, surface_integral, surface_integral_extrapolated, winding_number, CycleKind, LieCocycle,
    Sheet, Stencil,
};
use crate::crossedmod::{ActionLift, CrossedModule};
use crate::error::{Error, Result};
use crate::liegroup::{GroupName, MatrixGroupSpec};
use crate::loopspace::{cup, rep, res, uncup, SampledLoop};
use crate::phase::Phase;
use crate::report::{Check, Report};
use crate::twogroup::{
    axiom_checks, build_fusion_factorization, counit_checks, fibre_product_checks, from_crossed_module,
    two_group_from_fusion_factorization, Bu1Xmod, CanonicalOps, FusionVariant, PermXmod, SampleScale,
};
use crate::util::wrap_angle;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Loopspace,
    Cocycles,
    Centralext,
    Abelcoh,
    Xmod,
    Twogroup,
    Fusion,
    Comparison,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Loopspace,
        Suite::Cocycles,
        Suite::Centralext,
        Suite::Abelcoh,
        Suite::Xmod,
        Suite::Twogroup,
        Suite::Fusion,
        Suite::Comparison,
    ];

    /// A suite name, or `all`.
    pub fn parse_selection(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| vec![*x])
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Loopspace => "loopspace",
            Suite::Cocycles => "cocycles",
            Suite::Centralext => "centralext",
            Suite::Abelcoh => "abelcoh",
            Suite::Xmod => "xmod",
            Suite::Twogroup => "twogroup",
            Suite::Fusion => "fusion",
            Suite::Comparison => "comparison",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which extension model a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Cocycle,
    Path,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub group: String,
    pub level: f64,
    /// (M, N): sheet rows and loop samples.
    pub grid: (usize, usize),
    pub seed: u64,
    pub samples: usize,
    /// Forces a model; by default a cocycle selects the cocycle model and
    /// otherwise simply connected nonabelian groups get the path model.
    pub model: Option<Model>,
    /// A cocycle expression such as `rplus(1,4.5)` or `label-bilinear(1/2, [[0,1],[0,0]])`.
    pub cocycle: Option<String>,
    /// Label group for π₁ labels, as "2,2".
    pub labels: Option<String>,
    /// Replacement tolerances keyed by check name.
    pub tol: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            group: "su2".into(),
            level: 1.0,
            grid: (64, 64),
            seed: battery::DEFAULT_SEED,
            samples: 20,
            model: None,
            cocycle: None,
            labels: None,
            tol: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    /// Grids are powers of two ≥ 32, level finite, at least one sample.
    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.grid;
        for g in [m, n] {
            if g < 32 || !g.is_power_of_two() {
                return Err(Error::Parse(format!("grid {g} is not a power of two ≥ 32")));
            }
        }
        if !self.level.is_finite() {
            return Err(Error::Parse("level must be finite".into()));
        }
        if self.samples == 0 {
            return Err(Error::Parse("samples must be positive".into()));
        }
        GroupName::parse(&self.group)?;
        self.extension().map(|_| ())
    }

    pub fn label_group(&self) -> Result<Option<FinAbGroup>> {
        self.labels.as_deref().map(FinAbGroup::parse).transpose()
    }

    pub fn loop_cocycle(&self) -> Result<Option<LoopCocycle>> {
        let labels = self.label_group()?;
        self.cocycle.as_deref().map(|c| LoopCocycle::parse_with_labels(c, labels.as_ref())).transpose()
    }

    pub fn group_spec(&self) -> Result<Arc<MatrixGroupSpec>> {
        Ok(Arc::new(MatrixGroupSpec::new(GroupName::parse(&self.group)?, self.level)))
    }

    /// The extension this configuration describes; see [`SuiteConfig::model`].
    pub fn extension(&self) -> Result<Extension> {
        let g = self.group_spec()?;
        let (m, n) = self.grid;
        let cocycle = self.loop_cocycle()?;
        let path_ok = g.is_simply_connected() && !g.is_abelian();
        let model = self.model.unwrap_or(if cocycle.is_none() && path_ok { Model::Path } else { Model::Cocycle });
        match model {
            Model::Path if cocycle.is_some() => Err(Error::Parse("the path model takes no cocycle".into())),
            Model::Path if !path_ok => Err(Error::Parse(format!(
                "the path model needs a simply connected nonabelian group, not {}",
                self.group
            ))),
            Model::Path => Ok(Extension::path(g, m, n)),
            Model::Cocycle => {
                Ok(Extension::cocycle(g, n, cocycle.unwrap_or(LoopCocycle::Trivial), self.label_group()?))
            }
        }
    }

    pub fn min_grid(&self) -> usize {
        self.grid.0.min(self.grid.1)
    }

    fn apply_overrides(&self, mut r: Report) -> Report {
        for c in &mut r.checks {
            if let Some(&t) = self.tol.get(&c.name) {
                c.tol = t;
                c.pass = c.measured <= t;
            }
        }
        r
    }
}

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let r = match suite {
        Suite::Loopspace => loopspace_suite(cfg),
        Suite::Cocycles => cocycles_suite(cfg),
        Suite::Centralext => centralext_suite(cfg),
        Suite::Abelcoh => abelcoh_suite(cfg),
        Suite::Xmod => xmod_suite(cfg),
        Suite::Twogroup => twogroup_suite(cfg),
        Suite::Fusion => fusion_suite(cfg),
        Suite::Comparison => comparison_suite(cfg),
    }?;
    Ok(cfg.apply_overrides(r))
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        m = m.max(v?);
    }
    Ok(m)
}

// ---------------------------------------------------------------------------

fn loopspace_suite(cfg: &SuiteConfig) -> Result<Report> {
    let g = cfg.group_spec()?;
    let n = cfg.grid.1;
    let mut r = Report::new("loopspace");
    let mut rng = battery::rng(cfg.seed);
    let loops: Vec<SampledLoop> =
        (0..cfg.samples).map(|_| battery::first_half_bump(&g, n, &mut rng, 0.8)).collect::<Result<_>>()?;
    let res_gap = max_of(loops.windows(2).map(|w| {
        let lhs = res(&w[0].pointwise_mul(&w[1])?)?;
        lhs.max_deviation(&res(&w[0])?.pointwise_mul(&res(&w[1])?)?)
    }))?;
    r.push(Check::at_most("res homomorphism", res_gap, 0.0));
    let rep_gap = max_of(loops.windows(2).map(|w| {
        let (a, b) = (res(&w[0])?, res(&w[1])?);
        rep(&a.pointwise_mul(&b)?)?.max_deviation(&rep(&a)?.pointwise_mul(&rep(&b)?)?)
    }))?;
    r.push(Check::at_most("rep homomorphism", rep_gap, 0.0));
    let support = loops.iter().filter(|l| l.support_violation().is_some()).count();
    r.push(Check::at_most("declared supports are sound", support as f64, 0.0));
    let flip = max_of(loops.iter().map(|l| l.flip().flip().max_deviation(l)))?;
    r.push(Check::at_most("flip is an involution", flip, 0.0));
    let round = max_of(loops.iter().map(|l| cup(&uncup(l)?)?.max_deviation(l)))?;
    r.push(Check::at_most("cup ∘ uncup = id", round, 0.0));
    let pairs = battery::disjoint_bump_pairs(&g, n, cfg.samples, 0.8, cfg.seed ^ 1)?;
    let commute = max_of(pairs.iter().map(|(a, b)| a.pointwise_mul(b)?.max_deviation(&b.pointwise_mul(a)?)))?;
    r.push(Check::at_most("disjoint loops commute pointwise", commute, 0.0));
    Ok(r)
}

// ---------------------------------------------------------------------------

/// C of one closed loop in ΩSU(2) computed through two fillings.
#[derive(Clone, Debug, Serialize)]
pub struct HolonomyPair {
    pub level: f64,
    pub grid: usize,
    /// ∫ω̄ over the geodesic cone from e, Richardson-extrapolated from grid and grid/2.
    pub cone: f64,
    /// ∫ω̄ over a stereographic contraction from the pole, extrapolated the same way.
    pub stereo: f64,
    /// Winding of the sheet about the pole, seen from e's antipode.
    pub winding: f64,
    /// |arg(C_cone / C_stereo) − 2π·λ·m|, m the rounded winding.
    pub gap: f64,
    /// The same gap from the unextrapolated grid values.
    pub raw_gap: f64,
}

/// Radius of the geodesic sphere swept by the test loop.
pub const HOLONOMY_RHO: f64 = 1.4;

/// Cone vs stereographic filling of [`battery::enclosing_sheet`] at the given level and grid,
/// with the pole at the sphere's centre (`enclosed`) or on the far side of e.
pub fn holonomy_pair(level: f64, grid: usize, enclosed: bool) -> Result<HolonomyPair> {
    let g = Arc::new(MatrixGroupSpec::su2(level));
    let om = LieCocycle::new(g.clone(), Stencil::Central2);
    let sh = battery::enclosing_sheet(&g, grid, grid, HOLONOMY_RHO)?;
    let pole = battery::quat(&battery::sphere_centre(&g, if enclosed { HOLONOMY_RHO } else { -1.0 }));
    let cone = surface_integral_extrapolated(&sh, &om)?;
    let stereo = stereographic_integral_extrapolated(&sh, &om, pole, grid / 2)?;
    let raw_cone = surface_integral(&sh, &om)?;
    let raw_stereo = om.scale() * membrane_raw(&stereographic_membrane(&sh, pole, grid / 2)?)?;
    let winding = winding_number(&sh, [-1.0, 0.0, 0.0, 0.0], pole)?;
    let m = winding.round();
    let gap = wrap_angle(cone - stereo - 2.0 * PI * level * m).abs();
    let raw_gap = wrap_angle(raw_cone - raw_stereo - 2.0 * PI * level * m).abs();
    Ok(HolonomyPair { level, grid, cone, stereo, winding, gap, raw_gap })
}

/// Period of a generator 2-cycle at two grids with the Richardson value.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub level: f64,
    pub kind: CycleKind,
    pub grids: (usize, usize),
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
    /// extrapolated / 2π.
    pub multiple: f64,
    pub nearest: f64,
    /// |extrapolated − 2π·nearest| / max(2π·|nearest|, 2π).
    pub relative_gap: f64,
    /// (coarse − extrapolated)/(fine − extrapolated), NaN when both are exact.
    pub ratio: f64,
    pub integral: bool,
}

pub fn period_report(level: f64, kind: CycleKind, grids: (usize, usize)) -> PeriodReport {
    let c = level * calibration().constant;
    let coarse = c * raw_period(grids.0, kind);
    let fine = c * raw_period(grids.1, kind);
    let extrapolated = richardson(coarse, fine);
    let multiple = extrapolated / (2.0 * PI);
    let nearest = multiple.round();
    let relative_gap = (extrapolated - 2.0 * PI * nearest).abs() / (2.0 * PI * nearest.abs()).max(2.0 * PI);
    let ratio = (coarse - extrapolated) / (fine - extrapolated);
    PeriodReport {
        level,
        kind,
        grids,
        coarse,
        fine,
        extrapolated,
        multiple,
        nearest,
        relative_gap,
        ratio,
        integral: relative_gap < 0.01,
    }
}

fn cocycles_suite(cfg: &SuiteConfig) -> Result<Report> {
    let g = cfg.group_spec()?;
    let mut r = Report::new("cocycles");
    let om = LieCocycle::new(g.clone(), Stencil::Central2);
    let n = 256;
    let a = g.basis()[0].clone();
    let baa = om.scale() * g.raw_form(&a, &a);
    let xs: Vec<_> = (0..n).map(|j| a.scale((2.0 * PI * j as f64 / n as f64).sin())).collect();
    let ys: Vec<_> = (0..n).map(|j| a.scale((2.0 * PI * j as f64 / n as f64).cos())).collect();
    if baa.abs() > 0.0 {
        let w = LieCocycle::new(g.clone(), Stencil::Central4).omega_eval(&xs, &ys)? / baa;
        r.push(Check::at_most("ω(a sin, a cos) = −π·b(a,a)", (w + PI).abs(), 1e-6));
    }
    r.push(Check::at_most("ω(X, X) = 0", om.omega_eval(&xs, &xs)?.abs(), 1e-8));

    let (m, n) = cfg.grid;
    let mut rng = battery::rng(cfg.seed);
    let loops: Vec<SampledLoop> =
        (0..3).map(|_| battery::first_half_bump(&g, n, &mut rng, 0.8)).collect::<Result<_>>()?;
    let ext = Extension::path(g.clone(), m, n);
    let sheets: Vec<Sheet> =
        loops.iter().map(|l| ext.lift(l).map(|x| x.sheet().cloned().expect("path model"))).collect::<Result<_>>()?;
    let back = max_of(sheets.iter().map(|s| Ok(c_holonomy(&s.concat(&s.reverse())?, &om)?.abs_angle())))?;
    r.push(Check::at_most("sheet ∘ reversed sheet has C = 1", back, 1e-8));
    if g.is_su2() {
        let grid = cfg.min_grid().max(128);
        let a = holonomy_pair(cfg.level, grid, false)?;
        let b = holonomy_pair(cfg.level, grid, true)?;
        let note = |p: &HolonomyPair| format!("winding {:.3}, unextrapolated gap {:.2e}", p.winding, p.raw_gap);
        r.push(Check::at_most("two fillings agree (m = 0)", a.gap, 1e-3).with_witness(note(&a)));
        r.push(Check::at_most("two fillings differ by exp(2πiλm)", b.gap, 1e-2).with_witness(note(&b)));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------

fn lifts(ext: &Extension, pairs: &[(SampledLoop, SampledLoop)]) -> Result<Vec<(CextElement, CextElement)>> {
    pairs.iter().map(|(a, b)| Ok((ext.lift(a)?, ext.lift(b)?))).collect()
}

/// Disjoint commutativity on a battery at grid n and n/2, with the coarse/fine ratio.
pub fn disjoint_commutativity(cfg: &SuiteConfig) -> Result<Check> {
    let ext = cfg.extension()?;
    let g = ext.group().clone();
    let (m, n) = cfg.grid;
    let rplus = match cfg.loop_cocycle()? {
        Some(LoopCocycle::RPlus { s, t }) => Some((s, t)),
        _ => None,
    };
    let pairs = match rplus {
        Some((s, t)) => battery::rplus_pairs(n, s, t, cfg.samples, cfg.seed)?,
        None => battery::disjoint_bump_pairs(&g, n, cfg.samples, 0.8, cfg.seed)?,
    };
    let tol = if ext.is_path() { tol_equal(cfg.min_grid()) } else { 1e-12 };
    let rep = ext.is_disjoint_commutative(&lifts(&ext, &pairs)?, tol)?;
    let mut c = Check::at_most("disjoint commutativity", rep.max, tol);
    if let Some(k) = rep.witness {
        c = c.with_witness(format!("pair {k}, phase {:.6e}", rep.phases[k]));
    }
    if ext.is_path() {
        let coarse = Extension::path(g.clone(), m / 2, n / 2);
        let cp = battery::disjoint_bump_pairs(&g, n / 2, cfg.samples, 0.8, cfg.seed)?;
        let cr = coarse.is_disjoint_commutative(&lifts(&coarse, &cp)?, f64::INFINITY)?;
        c = c.with_ratio(cr.max / rep.max);
    }
    Ok(c)
}

fn centralext_suite(cfg: &SuiteConfig) -> Result<Report> {
    let ext = cfg.extension()?;
    let g = ext.group().clone();
    let n = ext.n();
    let mut r = Report::new("centralext");
    r.push(disjoint_commutativity(cfg)?);

    let mut rng = battery::rng(cfg.seed ^ 7);
    let k = cfg.samples.min(6);
    let xs: Vec<CextElement> =
        (0..k).map(|_| ext.lift(&battery::first_half_bump(&g, n, &mut rng, 0.6)?)).collect::<Result<_>>()?;
    let tol = ext.tol();
    let inv = max_of(xs.iter().map(|x| Ok(ext.phase_of_central(&ext.mul(x, &ext.inv(x)?)?)?.abs_angle())))?;
    r.push(Check::at_most("a·a⁻¹ = 1", inv, tol));
    let assoc = max_of(xs.windows(3).map(|w| {
        let l = ext.mul(&ext.mul(&w[0], &w[1])?, &w[2])?;
        let rr = ext.mul(&w[0], &ext.mul(&w[1], &w[2])?)?;
        Ok(ext.equivalent(&l, &rr)?.abs_angle())
    }))?;
    r.push(Check::at_most("associativity", assoc, tol));
    let proj = max_of(xs.windows(2).map(|w| {
        let p = ext.project(&ext.mul(&w[0], &w[1])?)?;
        p.max_deviation(&ext.project(&w[0])?.pointwise_mul(&ext.project(&w[1])?)?)
    }))?;
    r.push(Check::at_most("projection is a homomorphism", proj, 0.0));

    let pairs = battery::disjoint_bump_pairs(&g, n, k, 0.8, cfg.seed ^ 9)?;
    let phase_indep = max_of(pairs.iter().enumerate().map(|(i, (a, b))| {
        let (x, y) = (ext.lift(a)?, ext.lift(b)?);
        let z = Phase::from_radians(0.37 * i as f64 + 0.1);
        let p0 = ext.commutator_phase(&x, &y)?;
        let p1 = ext.commutator_phase(&x.rotate(z), &y.rotate(-z - z))?;
        Ok((p1 - p0).abs_angle())
    }))?;
    r.push(Check::at_most("pairing independent of lift phases", phase_indep, 1e-12));
    let skewness = max_of(pairs.iter().map(|(a, b)| {
        let (x, y) = (ext.lift(a)?, ext.lift(b)?);
        Ok((ext.commutator_phase(&x, &y)? + ext.commutator_phase(&y, &x)?).abs_angle())
    }))?;
    r.push(Check::at_most("pairing is skew", skewness, 1e-12));
    if ext.is_path() {
        let detour = LiftKind::Detour { amplitude: 0.5, seed: cfg.seed };
        let d = max_of(pairs.iter().map(|(a, b)| Ok(ext.commutator_pairing_with(a, b, detour)?.abs_angle())))?;
        r.push(Check::at_most("disjoint commutativity (detour lifts)", d, tol_equal(cfg.min_grid())));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------

/// The exact battery: (ℤ₂)², ℤ₄⊕ℤ₆, ℤ₃⊕ℤ₉.
pub fn abelcoh_groups() -> Vec<FinAbGroup> {
    ["2,2", "4,6", "3,9"].iter().map(|s| FinAbGroup::parse(s).expect("fixed groups")).collect()
}

fn abelcoh_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut r = Report::new("abelcoh");
    let mut lift_fail = 0usize;
    let mut quotient_fail = Vec::new();
    let mut obstruction_fail = 0usize;
    let mut rng = battery::rng(cfg.seed);
    for k in abelcoh_groups() {
        for b in enumerate_skew_bihoms(&k)?.into_iter().filter(|b| b.is_alternating()) {
            if skew(&lift_alt_to_cocycle(&b)?)? != b {
                lift_fail += 1;
            }
        }
        let q = two_torsion_quotient(&k);
        let expected: u64 = k.two_torsion_orders().iter().map(|&o| o.min(2)).product();
        let by_enum = quotient_order_by_enumeration(&k)?;
        if by_enum != 1u64 << q.orders.len() || by_enum != expected {
            quotient_fail.push(k.label());
        }
        for _ in 0..100 {
            let b = random_skew_bihom(&k, &mut rng);
            let kappa = random_cocycle(&k, &mut rng)?;
            let bp = modified_obstruction(&b, &kappa)?;
            if bp.mul(&skew(&kappa)?)? != b {
                obstruction_fail += 1;
            }
        }
    }
    r.push(Check::at_most("skew ∘ lift = id on alternating bihoms", lift_fail as f64, 0.0));
    r.push(
        Check::at_most("Skew²/Alt² = 2-torsion", quotient_fail.len() as f64, 0.0)
            .witness_if_failed(|| quotient_fail.join(", ")),
    );
    r.push(Check::at_most("b′·skew(κ) = b", obstruction_fail as f64, 0.0));
    let parity: Vec<i64> = (-6..=6).filter(|&k| so_parity_pairing(k).is_trivial() != (k % 2 == 0)).collect();
    r.push(
        Check::at_most("level-k parity pairing trivial iff k even", parity.len() as f64, 0.0)
            .witness_if_failed(|| format!("{parity:?}")),
    );
    Ok(r)
}

// ---------------------------------------------------------------------------

fn xmod_for(cfg: &SuiteConfig) -> Result<CrossedModule> {
    let mut ext = cfg.extension()?;
    if ext.n() % 2 != 0 {
        return Err(Error::GridMismatch("N must be even".into()));
    }
    if let Extension::Path(_) = &ext {
        ext = Extension::path(ext.group().clone(), cfg.grid.0, cfg.grid.1);
    }
    CrossedModule::new_unchecked(ext)
}

fn peiffer_check(xm: &CrossedModule, cfg: &SuiteConfig) -> Result<Check> {
    let ext = xm.ext();
    let pairs = battery::peiffer_pairs(ext, cfg.samples, 0.6, cfg.seed)?;
    let gaps = xm.peiffer_gaps(&pairs)?;
    let (k, worst) =
        gaps.iter().enumerate().fold((0, 0.0f64), |a, (i, g)| if g.abs() > a.1 { (i, g.abs()) } else { a });
    let mut c = Check::at_most("Peiffer identity", worst, xm.tol())
        .witness_if_failed(|| format!("pair {k}, gap {:.6e}", gaps[k]));
    if ext.is_path() {
        let coarse =
            CrossedModule::new_unchecked(Extension::path(ext.group().clone(), cfg.grid.0 / 2, cfg.grid.1 / 2))?;
        let cp = battery::peiffer_pairs(coarse.ext(), cfg.samples, 0.6, cfg.seed)?;
        let cw = coarse.peiffer_gaps(&cp)?.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        c = c.with_ratio(cw / worst);
    }
    Ok(c)
}

fn xmod_suite(cfg: &SuiteConfig) -> Result<Report> {
    let xm = xmod_for(cfg)?;
    let mut r = Report::new("xmod");
    r.push(peiffer_check(&xm, cfg)?);
    let acts = battery::action_pairs(&xm, cfg.samples.min(8), 0.3, cfg.seed)?;
    r.push(xm.check_equivariance(&acts)?);
    let zs: Vec<_> =
        acts.iter().enumerate().map(|(i, (p, _))| (p.clone(), Phase::from_radians(0.3 + i as f64))).collect();
    r.push(xm.check_central(&zs)?);
    r.push(xm.check_kernels_commute(&battery::kernel_pairs(xm.ext(), cfg.samples.min(8), 0.6, cfg.seed ^ 3)?)?);
    let pairs = battery::peiffer_pairs(xm.ext(), cfg.samples.min(8), 0.6, cfg.seed ^ 5)?;
    if xm.ext().is_path() {
        let alt = ActionLift::Other(LiftKind::Detour { amplitude: 0.6, seed: cfg.seed });
        let etas: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
        let mut worst: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for (gam, _) in acts.iter().take(4) {
            let w = xm.uniqueness_witness(alt, gam, &etas)?;
            worst = worst.max(w.max);
            defect = defect.max(w.hom_defect);
        }
        r.push(Check::at_most("uniqueness witness κ vanishes", worst, xm.tol()));
        r.push(Check::at_most("κ is a homomorphism", defect, xm.tol()));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------

/// Axioms, counit and fibre product for the canonical crossed module's 2-group and the finite models.
pub fn twogroup_checks(cfg: &SuiteConfig, samples: usize, triples: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tag = |prefix: &str, cs: Vec<Check>| -> Vec<Check> {
        cs.into_iter()
            .map(|mut c| {
                c.name = format!("{prefix}: {}", c.name);
                c
            })
            .collect()
    };
    for (name, xm) in
        [("A3⊂S3", PermXmod::a3_in_s3()), ("S3 discrete", PermXmod::discrete_s3()), ("S3⊂S3", PermXmod::s3_in_s3())]
    {
        let sd = from_crossed_module(xm);
        out.extend(tag(name, axiom_checks(&sd, samples, cfg.seed)?));
        out.extend(tag(name, counit_checks(&sd, samples, cfg.seed)?));
        out.extend(tag(name, fibre_product_checks(&sd, triples, cfg.seed)?));
    }
    let bu1 = from_crossed_module(Bu1Xmod { q: 24 });
    out.extend(tag("BU(1)", axiom_checks(&bu1, samples, cfg.seed)?));
    let xm = xmod_for(cfg)?;
    let model = if xm.ext().is_path() { "path model" } else { "cocycle model" };
    let sd = from_crossed_module(CanonicalOps { xm, scale: SampleScale::default() });
    out.extend(tag(model, axiom_checks(&sd, samples, cfg.seed)?));
    out.extend(tag(model, counit_checks(&sd, samples, cfg.seed)?));
    out.extend(tag(model, fibre_product_checks(&sd, triples, cfg.seed)?));
    Ok(out)
}

fn twogroup_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut r = Report::new("twogroup");
    r.extend(twogroup_checks(cfg, cfg.samples, cfg.samples)?);
    Ok(r)
}

// ---------------------------------------------------------------------------

fn fusion_suite(cfg: &SuiteConfig) -> Result<Report> {
    let xm = xmod_for(cfg)?;
    let mut r = Report::new("fusion");
    if !xm.ext().is_path() {
        return Err(Error::ModelMismatch);
    }
    let f = build_fusion_factorization(&xm, FusionVariant::Canonical)?;
    let ps = battery::paths(&xm, 2 * cfg.samples.min(10), 0.25, cfg.seed)?;
    let pairs: Vec<_> = ps.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    r.push(f.homomorphism_gap(&pairs)?);
    r.extend(f.property_checks(&ps)?);
    let s = build_fusion_factorization(&xm, FusionVariant::SignSurrogate)?;
    let sg = s.homomorphism_gap(&pairs)?;
    r.push(Check::verdict("sign surrogate detected", sg.measured, xm.tol(), !sg.pass));
    let t = two_group_from_fusion_factorization(f);
    r.extend(axiom_checks(&t, cfg.samples.min(10), cfg.seed)?);
    Ok(r)
}

fn comparison_suite(cfg: &SuiteConfig) -> Result<Report> {
    let xm = xmod_for(cfg)?;
    let mut r = Report::new("comparison");
    let battery = battery::action_pairs(&xm, cfg.samples.min(10), 0.3, cfg.seed)?;
    r.extend(crate::twogroup::check_comparison_hom(&xm, &battery)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { grid: (32, 32), samples: 4, ..Default::default() }
    }

    #[test]
    fn exact_suites_pass() {
        for s in [Suite::Loopspace, Suite::Abelcoh] {
            let r = run(s, &small()).unwrap();
            assert!(r.pass(), "{}", r.to_json());
        }
    }

    #[test]
    fn rplus_xmod_fails_with_a_witness() {
        let cfg = SuiteConfig { group: "rplus".into(), cocycle: Some("rplus(1.0,4.5)".into()), ..small() };
        let r = run(Suite::Xmod, &cfg).unwrap();
        let p = r.checks.iter().find(|c| c.name == "Peiffer identity").unwrap();
        assert!(!p.pass && p.witness.is_some());
    }

    #[test]
    fn overrides_replace_tolerances() {
        let mut cfg = small();
        cfg.tol.insert("rep homomorphism".into(), -1.0);
        let r = run(Suite::Loopspace, &cfg).unwrap();
        assert!(!r.pass());
    }

    #[test]
    fn selection_parses() {
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 8);
        assert!(Suite::parse_selection("nope").is_err());
        assert!(SuiteConfig { grid: (48, 64), ..small() }.validate().is_err());
    }
}
