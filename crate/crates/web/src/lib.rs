//! Browser bindings for three small loopcx computations. Each returns a JSON string,
//! `{"error": ...}` on bad input.

use loopcx::abelcoh::{enumerate_skew_bihoms, two_torsion_quotient, FinAbGroup};
use loopcx::centralext::Extension;
use loopcx::liegroup::MatrixGroupSpec;
use loopcx::loopspace::{Interval, SampledLoop};
use loopcx::suites::holonomy_pair;
use serde_json::{json, Value};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use wasm_bindgen::prelude::wasm_bindgen;

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Skew²/Alt² for a group such as "4,6", with the counts behind it.
pub fn torsion_json(orders: &str) -> Result<Value, String> {
    let k = FinAbGroup::parse(orders).map_err(|e| e.to_string())?;
    let skews = enumerate_skew_bihoms(&k).map_err(|e| e.to_string())?;
    let alternating = skews.iter().filter(|b| b.is_alternating()).count();
    let q = two_torsion_quotient(&k);
    Ok(json!({
        "group": k.label(),
        "skew": skews.len(),
        "alternating": alternating,
        "quotient": q.describe(),
        "generators": q.generators.iter().map(|b| b.matrix().iter().map(|r| r.iter().map(|z| z.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

/// Commutator phase of lifts of two ℝ⁺ bumps, peaks e^x at s and e^y at t, against
/// the closed form x·y. Supports are (s ± w) and (t ± w) with w = |s − t|/3.
pub fn rplus_json(s: f64, t: f64, x: f64, y: f64) -> Result<Value, String> {
    let n = 256;
    let snap = |v: f64| (v.rem_euclid(TAU) / TAU * n as f64).round() as usize % n;
    let (js, jt) = (snap(s), snap(t));
    let (s, t) = (TAU * js as f64 / n as f64, TAU * jt as f64 / n as f64);
    let w = (s - t).abs() / 3.0;
    if w < 0.15 {
        return Err("s and t must be at least 0.45 apart".into());
    }
    let g = Arc::new(MatrixGroupSpec::rplus());
    let bump = |c: f64, amp: f64| -> Result<SampledLoop, String> {
        let iv = Interval::new((c - w).max(0.0), (c + w).min(TAU)).map_err(|e| e.to_string())?;
        let l = SampledLoop::bump(g.clone(), n, iv, &g.algebra_from_coords(&[amp])).map_err(|e| e.to_string())?;
        Ok(l)
    };
    let (a, b) = (bump(s, x)?, bump(t, y)?);
    let ext = Extension::rplus(n, s, t);
    let lift = |l: &SampledLoop| ext.lift(l).map_err(|e| e.to_string());
    let phase = ext.commutator_phase(&lift(&a)?, &lift(&b)?).map_err(|e| e.to_string())?.angle();
    let log = |l: &SampledLoop, j: usize| l.samples()[j].get(0, 0).re.ln();
    let closed = (log(&a, js) * log(&b, jt) + PI).rem_euclid(TAU) - PI;
    Ok(json!({ "s": s, "t": t, "phase": phase, "closed_form": closed, "gap": (phase - closed).abs() }))
}

/// Two fillings of a loop whose sheet encloses the sphere centre, at a small grid.
pub fn holonomy_json(level: f64, grid: usize) -> Result<Value, String> {
    if !(16..=128).contains(&grid) || !grid.is_power_of_two() {
        return Err("grid must be a power of two in 16..128".into());
    }
    if !level.is_finite() {
        return Err("level must be finite".into());
    }
    let p = holonomy_pair(level, grid, true).map_err(|e| e.to_string())?;
    let diff = ((p.cone - p.stereo) + PI).rem_euclid(TAU) - PI;
    Ok(json!({
        "level": level,
        "grid": grid,
        "winding": p.winding,
        "cone": p.cone,
        "stereographic": p.stereo,
        "difference": diff,
        "expected": ((TAU * level * p.winding.round()) + PI).rem_euclid(TAU) - PI,
        "gap": p.gap,
    }))
}

#[wasm_bindgen]
pub fn torsion(orders: &str) -> String {
    respond(torsion_json(orders))
}

#[wasm_bindgen]
pub fn rplus_commutator(s: f64, t: f64, x: f64, y: f64) -> String {
    respond(rplus_json(s, t, x, y))
}

#[wasm_bindgen]
pub fn holonomy(level: f64, grid: usize) -> String {
    respond(holonomy_json(level, grid))
}
