//! File formats.
//!
//! * Group blocks `{name, n, level}`; matrices as row-major `[re, im]` pairs.
//! * Loop-pair files in JSON, or CSV for the scalar groups ℝ⁺ and U(1).
//! * Sheets: one JSON header line `{M, N, group}` followed by the points as
//!   little-endian f64 `re, im` pairs, row by row.
//! * Bihomomorphisms and 2-cocycles as matrices (or tables) of "p/q" strings.
//! * Reports and commutator tables as JSON or CSV.

use crate::abelcoh::{Bihom, Cocycle2, FinAbGroup, RootOfUnity};
use crate::cocycles::Sheet;
use crate::error::{Error, Result};
use crate::liegroup::{GroupName, GroupPoint, MatrixGroupSpec, C64};
use crate::loopspace::{default_window, Interval, SampledLoop};
use crate::report::Report;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// A group spec as it appears in files: name, matrix size and level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupBlock {
    pub name: String,
    pub n: usize,
    pub level: f64,
}

impl GroupBlock {
    pub fn of(g: &MatrixGroupSpec) -> Self {
        GroupBlock { name: g.name.label(), n: g.dim(), level: g.level }
    }

    pub fn spec(&self) -> Result<Arc<MatrixGroupSpec>> {
        let g = MatrixGroupSpec::new(GroupName::parse(&self.name)?, self.level);
        if g.dim() != self.n {
            return Err(Error::TagMismatch(format!(
                "{} has matrix size {}, header says {}",
                self.name,
                g.dim(),
                self.n
            )));
        }
        Ok(Arc::new(g))
    }
}

pub fn matrix_to_pairs(m: &GroupPoint) -> Vec<[f64; 2]> {
    m.entries().iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_from_pairs(n: usize, v: &[[f64; 2]]) -> Result<GroupPoint> {
    if v.len() != n * n {
        return Err(Error::Parse(format!("expected {} entries, found {}", n * n, v.len())));
    }
    Ok(GroupPoint::from_row_major(n, &v.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    /// Declared support (a, b), if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    #[serde(default = "yes")]
    pub based: bool,
    pub samples: Vec<Vec<[f64; 2]>>,
}

fn yes() -> bool {
    true
}

impl LoopRecord {
    pub fn of(l: &SampledLoop) -> Self {
        LoopRecord {
            support: l.support().map(|s| [s.a, s.b]),
            based: l.is_based(),
            samples: l.samples().iter().map(matrix_to_pairs).collect(),
        }
    }

    pub fn to_loop(&self, g: &Arc<MatrixGroupSpec>) -> Result<SampledLoop> {
        let samples = self.samples.iter().map(|s| matrix_from_pairs(g.dim(), s)).collect::<Result<Vec<_>>>()?;
        let support = self.support.map(|[a, b]| Interval::new(a, b)).transpose()?;
        let n = samples.len();
        SampledLoop::new(g.clone(), samples, support, self.based, default_window(n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopPairRecord {
    pub id: String,
    pub a: LoopRecord,
    pub b: LoopRecord,
}

/// A set of loop pairs over one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopPairFile {
    pub group: GroupBlock,
    #[serde(rename = "N")]
    pub n: usize,
    pub pairs: Vec<LoopPairRecord>,
}

#[derive(Clone, Debug)]
pub struct LoopPair {
    pub id: String,
    pub a: SampledLoop,
    pub b: SampledLoop,
}

impl LoopPairFile {
    pub fn new(group: &MatrixGroupSpec, n: usize, pairs: &[LoopPair]) -> Self {
        LoopPairFile {
            group: GroupBlock::of(group),
            n,
            pairs: pairs
                .iter()
                .map(|p| LoopPairRecord { id: p.id.clone(), a: LoopRecord::of(&p.a), b: LoopRecord::of(&p.b) })
                .collect(),
        }
    }

    pub fn loops(&self) -> Result<(Arc<MatrixGroupSpec>, Vec<LoopPair>)> {
        let g = self.group.spec()?;
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                let (a, b) = (p.a.to_loop(&g)?, p.b.to_loop(&g)?);
                if a.n() != self.n || b.n() != self.n {
                    return Err(Error::GridMismatch(format!("pair {} does not have N = {}", p.id, self.n)));
                }
                Ok(LoopPair { id: p.id.clone(), a, b })
            })
            .collect::<Result<_>>()?;
        Ok((g, pairs))
    }
}

/// Reads loop pairs from JSON; blank input is an empty set over `fallback`.
pub fn read_loop_pairs_json(
    text: &str,
    fallback: &Arc<MatrixGroupSpec>,
) -> Result<(Arc<MatrixGroupSpec>, Vec<LoopPair>)> {
    if text.trim().is_empty() {
        return Ok((fallback.clone(), vec![]));
    }
    serde_json::from_str::<LoopPairFile>(text)?.loops()
}

fn scalar_group(g: &MatrixGroupSpec) -> Result<bool> {
    match g.name {
        GroupName::Rplus => Ok(true),
        GroupName::U1 => Ok(false),
        _ => Err(Error::Parse(format!("CSV loops need a scalar group (rplus or u1), not {}", g.name.label()))),
    }
}

/// Scalar loop pairs as CSV rows `id,side,a,b,v0,…,v_{N−1}`, with side `a` or `b`, an empty
/// support meaning none, and v the value (ℝ⁺) or the angle in radians (U(1)).
pub fn read_loop_pairs_csv(text: &str, g: &Arc<MatrixGroupSpec>) -> Result<Vec<LoopPair>> {
    let rplus = scalar_group(g)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let mut pending: Vec<(String, Option<SampledLoop>, Option<SampledLoop>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() < 5 {
            return Err(Error::Parse(format!("row {:?} has no samples", rec.position().map(|p| p.line()))));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
        let support = match (rec[2].trim(), rec[3].trim()) {
            ("", "") => None,
            (a, b) => Some(Interval::new(num(a)?, num(b)?)?),
        };
        let samples = (4..rec.len())
            .map(|k| {
                let v = num(&rec[k])?;
                Ok(if rplus { GroupPoint::real_scalar(v) } else { GroupPoint::scalar(C64::from_polar(1.0, v)) })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = samples.len();
        let l = SampledLoop::new(g.clone(), samples, support, true, default_window(n))?;
        let id = rec[0].trim().to_string();
        let slot = match pending.iter().position(|p| p.0 == id) {
            Some(i) => i,
            None => {
                pending.push((id.clone(), None, None));
                pending.len() - 1
            }
        };
        match rec[1].trim() {
            "a" => pending[slot].1 = Some(l),
            "b" => pending[slot].2 = Some(l),
            s => return Err(Error::Parse(format!("side must be a or b, not '{s}'"))),
        }
    }
    pending
        .into_iter()
        .map(|(id, a, b)| match (a, b) {
            (Some(a), Some(b)) => Ok(LoopPair { id, a, b }),
            _ => Err(Error::Parse(format!("pair {id} needs both sides"))),
        })
        .collect()
}

pub fn write_loop_pairs_csv(pairs: &[LoopPair]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(vec![]);
    let n = pairs.first().map(|p| p.a.n()).unwrap_or(0);
    let mut header = vec!["id".to_string(), "side".into(), "a".into(), "b".into()];
    header.extend((0..n).map(|k| format!("v{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for p in pairs {
        let rplus = scalar_group(p.a.group())?;
        for (side, l) in [("a", &p.a), ("b", &p.b)] {
            let (a, b) = l.support().map(|s| (s.a.to_string(), s.b.to_string())).unwrap_or_default();
            let mut row = vec![p.id.clone(), side.into(), a, b];
            row.extend(l.samples().iter().map(|m| {
                let z = m.get(0, 0);
                if rplus { z.re } else { z.arg() }.to_string()
            }));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SheetHeader {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    group: GroupBlock,
}

pub fn write_sheet(w: &mut impl Write, sh: &Sheet) -> Result<()> {
    let header = SheetHeader { m: sh.m(), n: sh.n(), group: GroupBlock::of(sh.group()) };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for p in sh.points() {
        for z in p.entries() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_sheet(r: &mut impl BufRead) -> Result<Sheet> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let h: SheetHeader = serde_json::from_str(line.trim_end())?;
    let g = h.group.spec()?;
    let d = g.dim();
    let mut buf = vec![0u8; 16 * d * d];
    let mut rows = Vec::with_capacity(h.m + 1);
    for _ in 0..=h.m {
        let mut row = Vec::with_capacity(h.n);
        for _ in 0..h.n {
            r.read_exact(&mut buf).map_err(|e| Error::Io(format!("sheet body too short: {e}")))?;
            let f = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().expect("8 bytes"));
            let z: Vec<C64> = (0..d * d).map(|k| C64::new(f(2 * k), f(2 * k + 1))).collect();
            row.push(GroupPoint::from_row_major(d, &z));
        }
        rows.push(row);
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Io("trailing bytes after the sheet body".into()));
    }
    Sheet::new(g, rows)
}

// ---------------------------------------------------------------------------

/// A bihomomorphism, or a bilinear 2-cocycle, by its matrix ζ_ij; or a 2-cocycle by its
/// full table indexed as `elements()` × `elements()` in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactFile {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RootOfUnity>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<RootOfUnity>>,
}

impl ExactFile {
    pub fn of_bihom(b: &Bihom) -> Self {
        ExactFile { group: b.group().orders_string(), matrix: Some(b.matrix().to_vec()), table: None }
    }

    pub fn bihom(&self) -> Result<Bihom> {
        let m = self.matrix.clone().ok_or_else(|| Error::Parse("a bihomomorphism needs a matrix".into()))?;
        Bihom::new(FinAbGroup::parse(&self.group)?, m)
    }

    pub fn cocycle(&self) -> Result<Cocycle2> {
        let k = FinAbGroup::parse(&self.group)?;
        match (&self.matrix, &self.table) {
            (Some(m), None) => Cocycle2::bilinear(k, m.clone()),
            (None, Some(t)) => Cocycle2::table(k, t.clone()),
            _ => Err(Error::Parse("give exactly one of matrix or table".into())),
        }
    }
}

/// Rows `g,h,value` over all pairs of elements, elements written "(a b …)".
pub fn pairing_table_csv(k: &FinAbGroup, f: impl Fn(&[u64], &[u64]) -> RootOfUnity) -> Result<String> {
    let els = k.elements()?;
    let fmt = |e: &[u64]| format!("({})", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["g", "h", "value"]).map_err(csv_err)?;
    for g in &els {
        for h in &els {
            w.write_record([fmt(g), fmt(h), f(g, h).to_string()]).map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

// ---------------------------------------------------------------------------

/// Rows `suite,name,measured,tol,pass,witness`.
pub fn reports_csv(reports: &[Report]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["suite", "name", "measured", "tol", "pass", "witness"]).map_err(csv_err)?;
    for r in reports {
        for c in &r.checks {
            let row = [
                r.suite.clone(),
                c.name.clone(),
                format!("{:e}", c.measured),
                format!("{:e}", c.tol),
                c.pass.to_string(),
                c.witness.clone().unwrap_or_default(),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

/// One line of a commutator table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub pair: String,
    pub phase: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

/// The JSON form `{pairs: [...], phases: [...]}`, with the per-pair verdicts alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingTable {
    pub pairs: Vec<String>,
    pub phases: Vec<f64>,
    pub rows: Vec<PairingRow>,
}

impl PairingTable {
    pub fn new(rows: Vec<PairingRow>) -> Self {
        PairingTable {
            pairs: rows.iter().map(|r| r.pair.clone()).collect(),
            phases: rows.iter().map(|r| r.phase).collect(),
            rows,
        }
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["pair", "phase", "expected", "tol", "pass"]).map_err(csv_err)?;
        for r in &self.rows {
            let row = [
                r.pair.clone(),
                format!("{:e}", r.phase),
                format!("{:e}", r.expected),
                format!("{:e}", r.tol),
                r.pass.to_string(),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
        finish_csv(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery;

    #[test]
    fn loop_pairs_round_trip_through_json_and_csv() {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let pairs: Vec<LoopPair> = battery::disjoint_bump_pairs(&g, 32, 3, 0.7, 5)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(k, (a, b))| LoopPair { id: format!("p{k}"), a, b })
            .collect();
        let text = serde_json::to_string(&LoopPairFile::new(&g, 32, &pairs)).unwrap();
        let (g2, back) = read_loop_pairs_json(&text, &g).unwrap();
        assert_eq!(*g2, *g);
        for (x, y) in pairs.iter().zip(&back) {
            assert!(x.id == y.id && x.a == y.a && x.b == y.b, "pair {} changed", x.id);
        }

        let r = Arc::new(MatrixGroupSpec::rplus());
        let rp: Vec<LoopPair> = battery::rplus_pairs(32, 1.0, 4.5, 2, 1)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(k, (a, b))| LoopPair { id: format!("r{k}"), a, b })
            .collect();
        let back = read_loop_pairs_csv(&write_loop_pairs_csv(&rp).unwrap(), &r).unwrap();
        for (x, y) in rp.iter().zip(&back) {
            assert_eq!(x.a.max_deviation(&y.a).unwrap(), 0.0);
            assert_eq!(x.b.support(), y.b.support());
        }
        assert!(read_loop_pairs_json("  \n", &g).unwrap().1.is_empty());
    }

    #[test]
    fn sheets_round_trip_bit_for_bit() {
        let g = Arc::new(MatrixGroupSpec::su2(1.0));
        let sh = battery::enclosing_sheet(&g, 8, 8, 1.4).unwrap();
        let mut buf = vec![];
        write_sheet(&mut buf, &sh).unwrap();
        assert_eq!(buf.len() - buf.iter().position(|&b| b == b'\n').unwrap() - 1, 9 * 8 * 4 * 16);
        assert_eq!(read_sheet(&mut buf.as_slice()).unwrap(), sh);
        buf.pop();
        assert!(read_sheet(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn exact_files_parse_p_over_q() {
        let f: ExactFile =
            serde_json::from_str(r#"{"group": "2,2", "matrix": [["0/1", "1/2"], ["0/1", "0/1"]]}"#).unwrap();
        let k = f.cocycle().unwrap();
        let s = crate::abelcoh::skew(&k).unwrap();
        assert_eq!(s.entry(0, 1), RootOfUnity::new(1, 2));
        assert_eq!(s.entry(1, 0), RootOfUnity::new(1, 2));
        let back: ExactFile = serde_json::from_str(&serde_json::to_string(&ExactFile::of_bihom(&s)).unwrap()).unwrap();
        assert_eq!(back.bihom().unwrap(), s);
    }
}
