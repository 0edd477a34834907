//! The canonical crossed module Ω̃_{(0,π)}G → P_eG of a disjoint-commutative
//! extension: source/target maps, the conjugation action through lifts of
//! γ ∪ γ, and the crossed-module checkers.
//!
//! Also holds the pullback r̃ along r = rep∘res and the pointwise action on the
//! [0, 2π]-parametrized side used by the comparison check.

use crate::centralext::{CextElement, Extension, LiftKind};
use crate::cocycles::Sheet;
use crate::error::{Error, Result};
use crate::liegroup::GroupPoint;
use crate::loopspace::{cup, uncup, Interval, PathPair, SampledLoop, SampledPath, Span};
use crate::phase::Phase;
use crate::report::Check;
use crate::util::{flat_step, pairwise_sum};

/// Tolerance for crossed-module identities in the path model.
pub fn tol_xmod(grid: usize) -> f64 {
    50.0 / (grid * grid) as f64
}

/// How γ ∪ γ is lifted when acting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActionLift {
    /// Rows γ_s ∪ γ_s with γ_s(x) = γ(s·x).
    Shrinking,
    /// Any other sheet; used for the uniqueness witness.
    Other(LiftKind),
}

#[derive(Clone, Debug)]
pub struct CrossedModule {
    ext: Extension,
}

impl CrossedModule {
    /// No disjoint-commutativity check; see [`build_canonical_xmod`].
    pub fn new_unchecked(ext: Extension) -> Result<Self> {
        if ext.n() % 2 != 0 {
            return Err(Error::GridMismatch("the crossed module needs an even N".into()));
        }
        Ok(CrossedModule { ext })
    }

    pub fn ext(&self) -> &Extension {
        &self.ext
    }

    /// Number of steps of the paths in P_eG.
    pub fn half(&self) -> usize {
        self.ext.n() / 2
    }

    /// Identity tolerance: the xmod schedule for the path model, 1e-12 for cocycle models.
    pub fn tol(&self) -> f64 {
        if self.ext.is_path() {
            tol_xmod(self.ext.grid())
        } else {
            1e-12
        }
    }

    fn check_path(&self, g: &SampledPath) -> Result<()> {
        if g.m() != self.half() || g.span() != Span::Pi {
            return Err(Error::GridMismatch(format!("path with M = {} for N = {}", g.m(), self.ext.n())));
        }
        if g.group().name != self.ext.group().name {
            return Err(Error::TagMismatch("path in a different group".into()));
        }
        Ok(())
    }

    /// Lift of γ ∪ γ with phase 0.
    pub fn lift_cup(&self, g: &SampledPath, how: ActionLift) -> Result<CextElement> {
        self.check_path(g)?;
        let l = cup(&PathPair::new(g.clone(), g.clone())?)?;
        match (&self.ext, how) {
            (Extension::Path(p), ActionLift::Shrinking) => {
                let rows = (0..=p.m)
                    .map(|i| {
                        let gs = g.shrink(flat_step(i as f64 / p.m as f64))?;
                        Ok(cup(&PathPair::new(gs.clone(), gs)?)?.samples().to_vec())
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.ext.lift_sheet(Sheet::new(p.group.clone(), rows)?, Phase::ZERO)
            }
            (Extension::Path(_), ActionLift::Other(kind)) => self.ext.lift_with(&l, kind),
            (Extension::Cocycle(_), _) => self.ext.lift(&l),
        }
    }

    /// (s, t) = (γ₂, γ₁) for π(Φ) = γ₁ ∪ γ₂.
    pub fn st_maps(&self, phi: &CextElement) -> Result<(SampledPath, SampledPath)> {
        let l = self.ext.project(phi)?;
        let w = l.window().max(1);
        if !l.is_flat_at(0, w) || !l.is_flat_at(l.n() / 2, w) {
            return Err(Error::NotFlatAtPi);
        }
        let p = uncup(&l)?;
        Ok((p.second, p.first))
    }

    pub fn source(&self, phi: &CextElement) -> Result<SampledPath> {
        Ok(self.st_maps(phi)?.0)
    }

    pub fn target(&self, phi: &CextElement) -> Result<SampledPath> {
        Ok(self.st_maps(phi)?.1)
    }

    fn check_first_half(&self, phi: &CextElement) -> Result<SampledLoop> {
        let l = self.ext.project(phi)?;
        if !l.is_supported_in(&Interval::first_half()) {
            return Err(Error::SupportViolation("element is not over Ω_(0,π)G".into()));
        }
        Ok(l)
    }

    /// α_γ(Φ) = L Φ L⁻¹ with L the shrinking lift of γ ∪ γ, brought back to a geodesic sheet.
    pub fn canonical_action(&self, g: &SampledPath, phi: &CextElement) -> Result<CextElement> {
        self.action_with(ActionLift::Shrinking, g, phi)
    }

    pub fn action_with(&self, how: ActionLift, g: &SampledPath, phi: &CextElement) -> Result<CextElement> {
        self.check_first_half(phi)?;
        let l = self.lift_cup(g, how)?;
        let c = self.ext.mul(&self.ext.mul(&l, phi)?, &self.ext.inv(&l)?)?;
        self.ext.normalize(&c)
    }

    /// max over samples of |t(α_γ(Φ)) − γ·t(Φ)·γ⁻¹|.
    pub fn check_equivariance(&self, samples: &[(SampledPath, CextElement)]) -> Result<Check> {
        let mut worst = (0.0, None);
        for (k, (g, phi)) in samples.iter().enumerate() {
            let lhs = self.target(&self.canonical_action(g, phi)?)?;
            let rhs = g.pointwise_mul(&self.target(phi)?)?.pointwise_mul(&g.inverse())?;
            let d = lhs.max_deviation(&rhs)?;
            if d > worst.0 {
                worst = (d, Some(k));
            }
        }
        Ok(Check::at_most("equivariance", worst.0, 1e-10)
            .witness_if_failed(|| format!("sample {}", worst.1.unwrap_or(0))))
    }

    /// Phase gap between α_{t(Ψ)}(Φ) and Ψ Φ Ψ⁻¹, largest over pairs (Φ, Ψ).
    pub fn peiffer_gaps(&self, pairs: &[(CextElement, CextElement)]) -> Result<Vec<f64>> {
        pairs
            .iter()
            .map(|(phi, psi)| {
                self.check_first_half(psi)?;
                let lhs = self.canonical_action(&self.target(psi)?, phi)?;
                let rhs = self.ext.mul(&self.ext.mul(psi, phi)?, &self.ext.inv(psi)?)?;
                Ok(self.ext.equivalent(&lhs, &rhs)?.angle())
            })
            .collect()
    }

    pub fn check_peiffer(&self, pairs: &[(CextElement, CextElement)]) -> Result<Check> {
        Ok(max_check("peiffer", &self.peiffer_gaps(pairs)?, self.tol()))
    }

    /// α_γ(z) = z on central elements.
    pub fn check_central(&self, samples: &[(SampledPath, Phase)]) -> Result<Check> {
        let gaps = samples
            .iter()
            .map(|(g, z)| {
                let zc = self.ext.central(*z);
                Ok(self.ext.equivalent(&zc, &self.canonical_action(g, &zc)?)?.angle())
            })
            .collect::<Result<Vec<_>>>()?;
        let tol = if self.ext.is_path() { 1e-12 } else { 0.0 };
        Ok(max_check("central", &gaps, tol))
    }

    /// Elements over Ω_(0,π)G commute with elements over Ω_(π,2π)G.
    pub fn check_kernels_commute(&self, pairs: &[(CextElement, CextElement)]) -> Result<Check> {
        let tol = if self.ext.is_path() { self.tol() } else { 0.0 };
        let r = self.ext.is_disjoint_commutative(pairs, tol)?;
        Ok(max_check("ker(s) and ker(t) commute", &r.phases, tol))
    }

    /// κ_γ(η) = α′_γ(η)·α_γ(η)⁻¹ for an alternative lift, with its homomorphism defect in η.
    pub fn uniqueness_witness(
        &self,
        alt: ActionLift,
        g: &SampledPath,
        etas: &[CextElement],
    ) -> Result<UniquenessWitness> {
        let kappa = |eta: &CextElement| -> Result<Phase> {
            let a = self.canonical_action(g, eta)?;
            let b = self.action_with(alt, g, eta)?;
            self.ext.equivalent(&a, &b)
        };
        let values = etas.iter().map(&kappa).collect::<Result<Vec<_>>>()?;
        let mut defect: f64 = 0.0;
        for k in 0..etas.len().saturating_sub(1) {
            let prod = self.ext.mul(&etas[k], &etas[k + 1])?;
            let d = kappa(&prod)? - values[k] - values[k + 1];
            defect = defect.max(d.abs_angle());
        }
        let values: Vec<f64> = values.iter().map(|v| v.angle()).collect();
        let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(UniquenessWitness { values, max, hom_defect: defect })
    }
}

#[derive(Clone, Debug)]
pub struct UniquenessWitness {
    pub values: Vec<f64>,
    pub max: f64,
    pub hom_defect: f64,
}

fn max_check(name: &str, gaps: &[f64], tol: f64) -> Check {
    let (mut m, mut arg) = (0.0f64, 0);
    for (k, g) in gaps.iter().enumerate() {
        if g.abs() > m {
            m = g.abs();
            arg = k;
        }
    }
    Check::at_most(name, m, tol).witness_if_failed(|| format!("sample {arg}: {:.6e}", gaps[arg]))
}

/// Checks disjoint commutativity on `pairs` and wraps the extension.
pub fn build_canonical_xmod(ext: Extension, pairs: &[(CextElement, CextElement)]) -> Result<CrossedModule> {
    let tol = if ext.is_path() { tol_xmod(ext.grid()) } else { 1e-12 };
    let r = ext.is_disjoint_commutative(pairs, tol)?;
    if !r.pass {
        let k = r.witness.unwrap_or(0);
        return Err(Error::NotDisjointCommutative(format!("pair {k}: commutator phase {:.6e}", r.phases[k])));
    }
    CrossedModule::new_unchecked(ext)
}

/// The same model over loops on N/2 points, the home of r̃.
pub fn half_extension(ext: &Extension) -> Result<Extension> {
    if ext.n() % 2 != 0 {
        return Err(Error::GridMismatch("N must be even".into()));
    }
    Ok(match ext {
        Extension::Path(p) => {
            Extension::Path(crate::centralext::PathModelExt { n: p.n / 2, restriction: None, ..p.clone() })
        }
        Extension::Cocycle(c) => {
            Extension::Cocycle(crate::centralext::CocycleModelExt { n: c.n / 2, restriction: None, ..c.clone() })
        }
    })
}

/// r̃: an element over Ω_(0,π)G read in the extension `half` on N/2 points.
pub fn r_tilde(ext: &Extension, half: &Extension, phi: &CextElement) -> Result<CextElement> {
    let l = ext.project(phi)?;
    if !l.is_supported_in(&Interval::first_half()) {
        return Err(Error::SupportViolation("r̃ needs an element over Ω_(0,π)G".into()));
    }
    if half.n() * 2 != ext.n() {
        return Err(Error::GridMismatch("the pullback lives on N/2 points".into()));
    }
    match ext.normalize(phi)? {
        CextElement::Path { sheet, phase, .. } => {
            let rows = (0..=sheet.m()).map(|i| sheet.row(i)[..half.n()].to_vec()).collect();
            half.lift_sheet(Sheet::new(sheet.group().clone(), rows)?, phase)
        }
        CextElement::Cocycle { base, phase, .. } => Ok(half.lift(&crate::loopspace::r(&base)?)?.rotate(phase)),
    }
}

/// Left-trivialized line integral Σ_s Σ_t b(p⁻¹ṗ, h_s⁻¹ h_{s+1}) of the conjugating path along a sheet.
fn conjugation_line_integral(half: &Extension, p: &SampledPath, sheet: &Sheet) -> Result<f64> {
    let g = half.group();
    let n = sheet.n();
    let pinv: Vec<GroupPoint> = p.samples().iter().map(|x| g.inverse(x)).collect();
    let a: Vec<GroupPoint> = (0..n)
        .map(|t| {
            if t == 0 {
                return g.zero();
            }
            pinv[t].matmul(&(&p.samples()[t + 1] - &p.samples()[t - 1])).scale(0.5)
        })
        .collect();
    let mut terms = Vec::with_capacity(sheet.m() * n);
    for i in 0..sheet.m() {
        for t in 1..n {
            let d = g.inverse(sheet.point(i, t)).matmul(sheet.point(i + 1, t));
            let x = g.log(&d).map_err(|_| Error::DegenerateCell { row: i, col: t })?;
            terms.push(g.raw_form(&a[t], &x));
        }
    }
    Ok(pairwise_sum(&terms) * g.form_scale())
}

/// Pointwise action of a path p on [0, 2π] (p(0) = e) on the extension over loops on N/2 points:
/// rows conjugated by p, phase shifted by the line integral of p⁻¹ṗ.
pub fn path_conjugation_action(half: &Extension, p: &SampledPath, phi: &CextElement) -> Result<CextElement> {
    if p.span() != Span::TwoPi || p.m() != half.n() {
        return Err(Error::GridMismatch("conjugating path must have N/2 steps on [0, 2π]".into()));
    }
    let g = half.group();
    match half.normalize(phi)? {
        CextElement::Path { sheet, phase, .. } => {
            let shift = conjugation_line_integral(half, p, &sheet)?;
            let conj = sheet.map(|_, j, x| p.samples()[j].matmul(x).matmul(&g.inverse(&p.samples()[j])));
            half.lift_sheet(conj, phase + Phase::from_radians(shift))
        }
        CextElement::Cocycle { base, phase, label } => {
            let l = base.map_indexed(|j, x| p.samples()[j].matmul(x).matmul(&g.inverse(&p.samples()[j])));
            let lifted = match label {
                Some(lb) => half.lift_labeled(&l, &lb)?,
                None => half.lift(&l)?,
            };
            Ok(lifted.rotate(phase))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::MatrixGroupSpec;
    use crate::loopspace::rep;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn su2() -> Arc<MatrixGroupSpec> {
        Arc::new(MatrixGroupSpec::su2(1.0))
    }

    fn bump(g: &Arc<MatrixGroupSpec>, n: usize, a: f64, b: f64, c: &[f64]) -> SampledLoop {
        SampledLoop::bump(g.clone(), n, Interval::new(a, b).unwrap(), &g.algebra_from_coords(c)).unwrap()
    }

    fn path(g: &Arc<MatrixGroupSpec>, m: usize, c: &[f64]) -> SampledPath {
        SampledPath::geodesic_to(g.clone(), m, &g.algebra_from_coords(c)).unwrap()
    }

    fn gaps_at(n: usize) -> (f64, f64, f64) {
        let g = su2();
        let ext = Extension::path(g.clone(), n, n);
        let xm = CrossedModule::new_unchecked(ext.clone()).unwrap();
        let phi = ext.lift(&bump(&g, n, 0.4, 2.6, &[0.5, -0.3, 0.7])).unwrap();
        let psi = ext.lift(&bump(&g, n, 0.5, 2.7, &[-0.6, 0.4, 0.2])).unwrap();
        let peiffer = xm.peiffer_gaps(&[(phi.clone(), psi.clone())]).unwrap()[0].abs();
        let gam = path(&g, n / 2, &[0.3, 0.8, -0.5]);
        let alt = ActionLift::Other(LiftKind::Detour { amplitude: 0.6, seed: 5 });
        let w = xm.uniqueness_witness(alt, &gam, &[phi.clone(), psi]).unwrap();
        let half = Extension::path(g.clone(), n, n / 2);
        let lhs = path_conjugation_action(&half, &rep(&gam).unwrap(), &r_tilde(&ext, &half, &phi).unwrap()).unwrap();
        let rhs = r_tilde(&ext, &half, &xm.canonical_action(&gam, &phi).unwrap()).unwrap();
        (peiffer, w.max.max(w.hom_defect), half.equivalent(&lhs, &rhs).unwrap().abs_angle())
    }

    #[test]
    fn peiffer_uniqueness_and_comparison_converge() {
        let (a, b) = (gaps_at(32), gaps_at(64));
        for (name, c, f) in [("peiffer", a.0, b.0), ("uniqueness", a.1, b.1), ("comparison", a.2, b.2)] {
            assert!(f < tol_xmod(64), "{name}: {f}");
            assert!((3.0..5.0).contains(&(c / f)), "{name}: {c} -> {f}");
        }
    }

    #[test]
    fn equivariance_is_exact() {
        let g = su2();
        let ext = Extension::path(g.clone(), 16, 32);
        let xm = CrossedModule::new_unchecked(ext.clone()).unwrap();
        let phi = ext.lift(&bump(&g, 32, 0.4, 2.6, &[0.5, -0.3, 0.7])).unwrap();
        let samples =
            vec![(path(&g, 16, &[0.3, 0.8, -0.5]), phi.clone()), (SampledPath::constant_e(g.clone(), 16), phi)];
        let c = xm.check_equivariance(&samples).unwrap();
        assert!(c.pass && c.measured < 1e-12, "{c:?}");
        let zs = vec![(path(&g, 16, &[0.3, 0.8, -0.5]), Phase::from_radians(0.7))];
        assert!(xm.check_central(&zs).unwrap().pass);
    }

    #[test]
    fn st_maps_follow_the_cup_index() {
        let g = su2();
        let ext = Extension::path(g.clone(), 8, 32);
        let xm = CrossedModule::new_unchecked(ext.clone()).unwrap();
        let a = path(&g, 16, &[0.3, 0.8, -0.5]);
        let b = a.pointwise_mul(&crate::loopspace::res(&bump(&g, 32, 0.4, 2.6, &[0.2, 0.1, 0.0])).unwrap()).unwrap();
        let phi = ext.lift(&cup(&PathPair::new(a.clone(), b.clone()).unwrap()).unwrap()).unwrap();
        let (s, t) = xm.st_maps(&phi).unwrap();
        assert_eq!(s.max_deviation(&b).unwrap(), 0.0);
        assert_eq!(t.max_deviation(&a).unwrap(), 0.0);
        let (s, t) = xm.st_maps(&ext.unit()).unwrap();
        assert!(s.max_deviation(&SampledPath::constant_e(g.clone(), 16)).unwrap() == 0.0 && t == s);
        let bad = ext.lift(&bump(&g, 32, 1.0, 3.1, &[0.4, 0.0, 0.0])).unwrap();
        assert!(matches!(xm.st_maps(&bad), Err(Error::NotFlatAtPi)));
    }

    #[test]
    fn rplus_fails_peiffer_by_the_skew_phase() {
        let (n, s, t) = (64, 1.0, 4.5);
        let ext = Extension::rplus(n, s, t);
        let g = ext.group().clone();
        let (fl, pl) = (bump(&g, n, 0.4, 2.6, &[0.8]), bump(&g, n, 0.5, 2.7, &[-0.6]));
        let (phi, psi) = (ext.lift(&fl).unwrap(), ext.lift(&pl).unwrap());
        let xm = CrossedModule::new_unchecked(ext.clone()).unwrap();
        let gap = xm.peiffer_gaps(&[(phi, psi)]).unwrap()[0];
        let want = fl.log_at(s).unwrap().get(0, 0).re * pl.log_at(2.0 * PI - t).unwrap().get(0, 0).re;
        assert!(want.abs() > 0.05);
        assert!((gap - want).abs() < 1e-10, "{gap} vs {want}");
        let a = bump(&g, n, 0.4, 2.6, &[0.8]);
        let b = bump(&g, n, 3.6, 5.8, &[0.5]);
        let pairs = vec![(ext.lift(&a).unwrap(), ext.lift(&b).unwrap())];
        assert!(matches!(build_canonical_xmod(ext, &pairs), Err(Error::NotDisjointCommutative(_))));
    }

    #[test]
    fn trivial_extension_builds_with_exact_checks() {
        let g = su2();
        let ext = Extension::trivial(g.clone(), 32);
        let a = bump(&g, 32, 0.4, 2.6, &[0.5, -0.3, 0.7]);
        let b = bump(&g, 32, 3.6, 5.8, &[0.1, 0.3, 0.2]);
        let pairs = vec![(ext.lift(&a).unwrap(), ext.lift(&b).unwrap())];
        let xm = build_canonical_xmod(ext.clone(), &pairs).unwrap();
        let psi = ext.lift(&bump(&g, 32, 0.5, 2.7, &[-0.6, 0.4, 0.2])).unwrap();
        let c = xm.check_peiffer(&[(pairs[0].0.clone(), psi)]).unwrap();
        assert_eq!(c.measured, 0.0);
        assert_eq!(xm.check_kernels_commute(&pairs).unwrap().measured, 0.0);
    }
}
