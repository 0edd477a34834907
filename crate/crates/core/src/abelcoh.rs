//! Exact U(1)-valued bihomomorphisms and 2-cocycles on finite abelian groups
//! ℤ_{n₁} ⊕ … ⊕ ℤ_{n_ℓ}.
//!
//! Values are roots of unity stored as reduced fractions of a full turn, so every
//! identity in this module is checked exactly. Anything that enumerates the group
//! refuses groups of order above [`ENUMERATION_GUARD`].

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const ENUMERATION_GUARD: u64 = 1000;
/// Largest number of candidate bihomomorphisms we are willing to enumerate.
pub const BIHOM_ENUMERATION_GUARD: u64 = 2_000_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// e^{2πi p/q} with 0 ≤ p < q and gcd(p, q) = 1 (or p = 0, q = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    p: u64,
    q: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { p: 0, q: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { p: 1, q: 2 };

    /// e^{2πi p/q} for any integer p and q ≥ 1.
    pub fn new(p: i64, q: u64) -> Self {
        assert!(q >= 1, "denominator must be positive");
        let pm = (p as i128).rem_euclid(q as i128) as u64;
        if pm == 0 {
            return Self::ONE;
        }
        let g = gcd(pm, q);
        RootOfUnity { p: pm / g, q: q / g }
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn is_one(&self) -> bool {
        self.p == 0
    }

    pub fn mul(self, o: Self) -> Self {
        let l = self.q / gcd(self.q, o.q) * o.q;
        let a = self.p as i128 * (l / self.q) as i128 + o.p as i128 * (l / o.q) as i128;
        Self::new((a % l as i128) as i64, l)
    }

    pub fn inv(self) -> Self {
        Self::new(-(self.p as i64), self.q)
    }

    pub fn div(self, o: Self) -> Self {
        self.mul(o.inv())
    }

    pub fn pow(self, k: i64) -> Self {
        let e = (k as i128).rem_euclid(self.q as i128);
        Self::new(((self.p as i128 * e) % self.q as i128) as i64, self.q)
    }

    /// Fraction of a full turn in [0, 1).
    pub fn turns(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Angle in radians, in [0, 2π).
    pub fn angle(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.turns()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let p: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
            let q: u64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(Self::new(p, q))
        } else {
            let p: i64 = s.parse().map_err(|_| Error::Parse(format!("bad root of unity '{s}'")))?;
            Ok(Self::new(p, 1))
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RootOfUnity::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// ℤ_{n₁} ⊕ … ⊕ ℤ_{n_ℓ}; elements are vectors of residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

pub type Element = Vec<u64>;

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::GroupMismatch(
                "cyclic orders must be positive; infinite factors are not supported".into(),
            ));
        }
        Ok(FinAbGroup { orders })
    }

    /// Parses a comma list such as `"2,4,6"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(vec![]);
        }
        let orders = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad cyclic order '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(orders)
    }

    pub fn trivial() -> Self {
        FinAbGroup { orders: vec![] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1 % self.orders[i];
        e
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), n)| (x + y) % n).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        a.iter().zip(&self.orders).map(|(x, n)| (n - x % n) % n).collect()
    }

    pub fn contains(&self, a: &[u64]) -> bool {
        a.len() == self.rank() && a.iter().zip(&self.orders).all(|(x, n)| x < n)
    }

    pub fn index_of(&self, a: &[u64]) -> usize {
        let mut idx = 0u64;
        for (x, n) in a.iter().zip(&self.orders) {
            idx = idx * n + x;
        }
        idx as usize
    }

    /// All elements in mixed-radix order, guarded by [`ENUMERATION_GUARD`].
    pub fn elements(&self) -> Result<Vec<Element>> {
        let ord = self.order();
        if ord > ENUMERATION_GUARD {
            return Err(Error::GroupTooLarge(ord));
        }
        let mut out = Vec::with_capacity(ord as usize);
        let mut cur = self.zero();
        for _ in 0..ord {
            out.push(cur.clone());
            for i in (0..self.rank()).rev() {
                cur[i] += 1;
                if cur[i] < self.orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
        Ok(out)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        self.orders.iter().map(|&n| rng.gen_range(0..n)).collect()
    }

    /// Orders of the 2-torsion subgroup {g : 2g = 0}, one ℤ₂ per even factor.
    pub fn two_torsion_orders(&self) -> Vec<u64> {
        self.orders.iter().filter(|&&n| n % 2 == 0).map(|_| 2).collect()
    }

    /// The comma list accepted by [`FinAbGroup::parse`].
    pub fn orders_string(&self) -> String {
        self.orders.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn label(&self) -> String {
        if self.orders.is_empty() {
            return "trivial".into();
        }
        self.orders.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("+")
    }
}

fn product_of_powers(z: &[Vec<RootOfUnity>], g: &[u64], h: &[u64], upper_only: bool) -> RootOfUnity {
    let mut acc = RootOfUnity::ONE;
    for (i, row) in z.iter().enumerate() {
        if g[i] == 0 {
            continue;
        }
        for (j, zij) in row.iter().enumerate() {
            if upper_only && j <= i {
                continue;
            }
            if h[j] == 0 || zij.is_one() {
                continue;
            }
            acc = acc.mul(zij.pow((g[i] * h[j]) as i64));
        }
    }
    acc
}

/// A bihomomorphism K × K → U(1), b(g, h) = ∏ ζ_ij^{g_i h_j}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bihom {
    group: FinAbGroup,
    matrix: Vec<Vec<RootOfUnity>>,
}

impl Bihom {
    /// Checks ζ_ij^{n_i} = ζ_ij^{n_j} = 1.
    pub fn new(group: FinAbGroup, matrix: Vec<Vec<RootOfUnity>>) -> Result<Self> {
        let l = group.rank();
        if matrix.len() != l || matrix.iter().any(|r| r.len() != l) {
            return Err(Error::GroupMismatch(format!("expected a {l}x{l} matrix")));
        }
        for i in 0..l {
            for j in 0..l {
                let z = matrix[i][j];
                if !z.pow(group.orders[i] as i64).is_one() || !z.pow(group.orders[j] as i64).is_one() {
                    return Err(Error::GroupMismatch(format!(
                        "entry ({i},{j}) = {z} is not compatible with the orders"
                    )));
                }
            }
        }
        Ok(Bihom { group, matrix })
    }

    pub fn trivial(group: &FinAbGroup) -> Self {
        let l = group.rank();
        Bihom { group: group.clone(), matrix: vec![vec![RootOfUnity::ONE; l]; l] }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<RootOfUnity>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> RootOfUnity {
        self.matrix[i][j]
    }

    pub fn eval(&self, g: &[u64], h: &[u64]) -> RootOfUnity {
        product_of_powers(&self.matrix, g, h, false)
    }

    fn zip_with(&self, o: &Bihom, f: impl Fn(RootOfUnity, RootOfUnity) -> RootOfUnity) -> Result<Bihom> {
        if self.group != o.group {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group.label(), o.group.label())));
        }
        let matrix =
            self.matrix.iter().zip(&o.matrix).map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()).collect();
        Ok(Bihom { group: self.group.clone(), matrix })
    }

    pub fn mul(&self, o: &Bihom) -> Result<Bihom> {
        self.zip_with(o, |a, b| a.mul(b))
    }

    pub fn inv(&self) -> Bihom {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|z| z.inv()).collect()).collect();
        Bihom { group: self.group.clone(), matrix }
    }

    pub fn pow(&self, k: i64) -> Bihom {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|z| z.pow(k)).collect()).collect();
        Bihom { group: self.group.clone(), matrix }
    }

    pub fn is_trivial(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|z| z.is_one()))
    }

    /// b(g, h) = b(h, g)⁻¹ for all g, h; for a bihomomorphism this is ζ_ji = ζ_ij⁻¹.
    pub fn is_skew(&self) -> bool {
        let l = self.group.rank();
        (0..l).all(|i| (0..l).all(|j| self.matrix[j][i] == self.matrix[i][j].inv()))
    }

    /// Skew and b(g, g) = 1; equivalently ζ_ii = 1 on top of skewness.
    pub fn is_alternating(&self) -> bool {
        self.is_skew() && (0..self.group.rank()).all(|i| self.matrix[i][i].is_one())
    }

    /// Exhaustive versions of the two predicates, straight from the definitions.
    pub fn is_skew_exhaustive(&self) -> Result<bool> {
        let els = self.group.elements()?;
        Ok(els.iter().all(|g| els.iter().all(|h| self.eval(g, h) == self.eval(h, g).inv())))
    }

    pub fn is_alternating_exhaustive(&self) -> Result<bool> {
        let els = self.group.elements()?;
        Ok(self.is_skew_exhaustive()? && els.iter().all(|g| self.eval(g, g).is_one()))
    }

    /// Exhaustive check that the matrix formula is biadditive on the whole group.
    pub fn is_bihomomorphism_exhaustive(&self) -> Result<bool> {
        let els = self.group.elements()?;
        for a in &els {
            for b in &els {
                let ab = self.group.add(a, b);
                for c in &els {
                    if self.eval(&ab, c) != self.eval(a, c).mul(self.eval(b, c)) {
                        return Ok(false);
                    }
                    if self.eval(c, &ab) != self.eval(c, a).mul(self.eval(c, b)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Splits a skew bihom as (alternating part, diagonal sign part) with b = alt · diag.
    pub fn decompose_skew(&self) -> Result<(Bihom, Bihom)> {
        if !self.is_skew() {
            return Err(Error::NotAlternating("input is not skew".into()));
        }
        let l = self.group.rank();
        let mut diag = Bihom::trivial(&self.group);
        for i in 0..l {
            diag.matrix[i][i] = self.matrix[i][i];
        }
        let alt = self.mul(&diag.inv())?;
        Ok((alt, diag))
    }
}

/// A normalized-or-not U(1)-valued 2-cocycle on a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum Cocycle2 {
    /// κ(g, h) = ∏ ζ_ij^{g_i h_j}; always a normalized cocycle.
    Bilinear { group: FinAbGroup, matrix: Vec<Vec<RootOfUnity>> },
    /// Full table indexed by (index(g), index(h)).
    Table { group: FinAbGroup, values: Vec<RootOfUnity> },
}

impl Cocycle2 {
    pub fn bilinear(group: FinAbGroup, matrix: Vec<Vec<RootOfUnity>>) -> Result<Self> {
        // same compatibility condition as for bihomomorphisms
        let b = Bihom::new(group, matrix)?;
        Ok(Cocycle2::Bilinear { group: b.group, matrix: b.matrix })
    }

    pub fn trivial(group: &FinAbGroup) -> Self {
        let l = group.rank();
        Cocycle2::Bilinear { group: group.clone(), matrix: vec![vec![RootOfUnity::ONE; l]; l] }
    }

    pub fn table(group: FinAbGroup, values: Vec<RootOfUnity>) -> Result<Self> {
        let ord = group.order();
        if ord > ENUMERATION_GUARD {
            return Err(Error::GroupTooLarge(ord));
        }
        if values.len() as u64 != ord * ord {
            return Err(Error::GroupMismatch(format!("table needs {} entries", ord * ord)));
        }
        Ok(Cocycle2::Table { group, values })
    }

    /// The coboundary dρ(g, h) = ρ(g) ρ(h) ρ(g+h)⁻¹ of a function given on elements in index order.
    pub fn coboundary(group: &FinAbGroup, rho: &[RootOfUnity]) -> Result<Self> {
        let els = group.elements()?;
        if rho.len() != els.len() {
            return Err(Error::GroupMismatch("ρ must have one value per element".into()));
        }
        let mut values = Vec::with_capacity(els.len() * els.len());
        for g in &els {
            for h in &els {
                let gh = group.add(g, h);
                values.push(rho[group.index_of(g)].mul(rho[group.index_of(h)]).div(rho[group.index_of(&gh)]));
            }
        }
        Self::table(group.clone(), values)
    }

    /// The example κ((k₁,k₂),(l₁,l₂)) = ξ^{k₁ l₂} on ℤ_p ⊕ ℤ_q with ξ a root of unity of order dividing gcd(p, q).
    pub fn xi_example(p: u64, q: u64, xi: RootOfUnity) -> Result<Self> {
        let group = FinAbGroup::new(vec![p, q])?;
        Self::bilinear(group, vec![vec![RootOfUnity::ONE, xi], vec![RootOfUnity::ONE, RootOfUnity::ONE]])
    }

    pub fn group(&self) -> &FinAbGroup {
        match self {
            Cocycle2::Bilinear { group, .. } | Cocycle2::Table { group, .. } => group,
        }
    }

    pub fn eval(&self, g: &[u64], h: &[u64]) -> RootOfUnity {
        match self {
            Cocycle2::Bilinear { matrix, .. } => product_of_powers(matrix, g, h, false),
            Cocycle2::Table { group, values } => {
                let n = group.order() as usize;
                values[group.index_of(g) * n + group.index_of(h)]
            }
        }
    }

    pub fn to_table(&self) -> Result<Cocycle2> {
        let group = self.group().clone();
        let els = group.elements()?;
        let values = els.iter().flat_map(|g| els.iter().map(move |h| (g, h))).map(|(g, h)| self.eval(g, h)).collect();
        Self::table(group, values)
    }

    /// Pointwise product κ₁κ₂.
    pub fn mul(&self, o: &Cocycle2) -> Result<Cocycle2> {
        if self.group() != o.group() {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group().label(), o.group().label())));
        }
        if let (Cocycle2::Bilinear { group, matrix: a }, Cocycle2::Bilinear { matrix: b, .. }) = (self, o) {
            let matrix = a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.mul(*y)).collect()).collect();
            return Ok(Cocycle2::Bilinear { group: group.clone(), matrix });
        }
        let (a, b) = (self.to_table()?, o.to_table()?);
        match (a, b) {
            (Cocycle2::Table { group, values: va }, Cocycle2::Table { values: vb, .. }) => {
                Self::table(group, va.iter().zip(&vb).map(|(x, y)| x.mul(*y)).collect())
            }
            _ => unreachable!(),
        }
    }

    /// Exhaustive exact check of κ(g,h)κ(g+h,k) = κ(g,h+k)κ(h,k).
    pub fn cocycle_identity_check(&self) -> Result<()> {
        if matches!(self, Cocycle2::Bilinear { .. }) {
            return Ok(());
        }
        let grp = self.group();
        let els = grp.elements()?;
        for g in &els {
            for h in &els {
                let gh = grp.add(g, h);
                for k in &els {
                    let lhs = self.eval(g, h).mul(self.eval(&gh, k));
                    let rhs = self.eval(g, &grp.add(h, k)).mul(self.eval(h, k));
                    if lhs != rhs {
                        return Err(Error::NotACocycle(format!("({g:?},{h:?},{k:?})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        let z = self.group().zero();
        match self {
            Cocycle2::Bilinear { .. } => true,
            Cocycle2::Table { group, .. } => match group.elements() {
                Ok(els) => els.iter().all(|g| self.eval(g, &z).is_one() && self.eval(&z, g).is_one()),
                Err(_) => false,
            },
        }
    }

    /// Divides by the constant coboundary κ(e, e), which makes κ(g, e) = κ(e, g) = 1.
    pub fn normalize(&self) -> Result<Cocycle2> {
        match self {
            Cocycle2::Bilinear { .. } => Ok(self.clone()),
            Cocycle2::Table { group, values } => {
                let c = self.eval(&group.zero(), &group.zero());
                Self::table(group.clone(), values.iter().map(|v| v.div(c)).collect())
            }
        }
    }
}

/// skew κ(g, h) = κ(g, h) κ(h, g)⁻¹, returned as a bihomomorphism after an exhaustive check.
pub fn skew(kappa: &Cocycle2) -> Result<Bihom> {
    let group = kappa.group().clone();
    let l = group.rank();
    match kappa {
        Cocycle2::Bilinear { matrix, .. } => {
            let m = (0..l).map(|i| (0..l).map(|j| matrix[i][j].div(matrix[j][i])).collect()).collect();
            Bihom::new(group, m)
        }
        Cocycle2::Table { .. } => {
            kappa.cocycle_identity_check()?;
            let m: Vec<Vec<RootOfUnity>> = (0..l)
                .map(|i| {
                    (0..l)
                        .map(|j| {
                            let (gi, gj) = (group.generator(i), group.generator(j));
                            kappa.eval(&gi, &gj).div(kappa.eval(&gj, &gi))
                        })
                        .collect()
                })
                .collect();
            let b = Bihom::new(group.clone(), m).map_err(|e| Error::NotACocycle(format!("skew matrix: {e}")))?;
            let els = group.elements()?;
            for g in &els {
                for h in &els {
                    if kappa.eval(g, h).div(kappa.eval(h, g)) != b.eval(g, h) {
                        return Err(Error::NotACocycle(format!("skew not biadditive at ({g:?},{h:?})")));
                    }
                }
            }
            Ok(b)
        }
    }
}

/// κ(g, h) = ∏_{i<j} ζ_ij^{g_i h_j}, whose skew is the alternating input.
pub fn lift_alt_to_cocycle(b: &Bihom) -> Result<Cocycle2> {
    if !b.is_alternating() {
        return Err(Error::NotAlternating(format!("{:?}", b.matrix)));
    }
    let l = b.group.rank();
    let matrix =
        (0..l).map(|i| (0..l).map(|j| if i < j { b.matrix[i][j] } else { RootOfUnity::ONE }).collect()).collect();
    Cocycle2::bilinear(b.group.clone(), matrix)
}

/// b′ = b · skew(κ)⁻¹.
pub fn modified_obstruction(b: &Bihom, kappa: &Cocycle2) -> Result<Bihom> {
    if b.group() != kappa.group() {
        return Err(Error::GroupMismatch(format!("{} vs {}", b.group().label(), kappa.group().label())));
    }
    b.mul(&skew(kappa)?.inv())
}

/// Level-k pairing (−1)^{k k₁ k₂} on ℤ₂.
pub fn so_parity_pairing(k: i64) -> Bihom {
    let g = FinAbGroup::new(vec![2]).unwrap();
    Bihom::new(g, vec![vec![RootOfUnity::MINUS_ONE.pow(k)]]).unwrap()
}

/// Structure of Skew²/Alt² with one diagonal sign generator per even cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionQuotient {
    pub group: FinAbGroup,
    /// Orders of the cyclic factors of the quotient (all equal to 2).
    pub orders: Vec<u64>,
    pub generators: Vec<Bihom>,
}

impl TorsionQuotient {
    pub fn describe(&self) -> String {
        if self.orders.is_empty() {
            "trivial".into()
        } else {
            self.orders.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("x")
        }
    }
}

pub fn two_torsion_quotient(k: &FinAbGroup) -> TorsionQuotient {
    let mut generators = Vec::new();
    for (i, &n) in k.orders().iter().enumerate() {
        if n % 2 == 0 {
            let mut b = Bihom::trivial(k);
            b.matrix[i][i] = RootOfUnity::MINUS_ONE;
            generators.push(b);
        }
    }
    TorsionQuotient { group: k.clone(), orders: vec![2; generators.len()], generators }
}

fn enumerate_with(k: &FinAbGroup, choices: Vec<Vec<RootOfUnity>>) -> Result<Vec<Vec<RootOfUnity>>> {
    let count: u64 = choices.iter().map(|c| c.len() as u64).product();
    if count > BIHOM_ENUMERATION_GUARD || k.order() > ENUMERATION_GUARD {
        return Err(Error::GroupTooLarge(k.order()));
    }
    let mut out = vec![vec![]];
    for c in &choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for z in c {
                let mut p = prefix.clone();
                p.push(*z);
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

fn roots(order: u64) -> Vec<RootOfUnity> {
    (0..order).map(|p| RootOfUnity::new(p as i64, order)).collect()
}

/// Every skew bihomomorphism: ζ_ii ∈ μ₂ ∩ μ_{n_i}, ζ_ij ∈ μ_{gcd(n_i,n_j)} for i<j, ζ_ji = ζ_ij⁻¹.
pub fn enumerate_skew_bihoms(k: &FinAbGroup) -> Result<Vec<Bihom>> {
    let l = k.rank();
    let n = k.orders();
    let mut slots = Vec::new();
    let mut choices = Vec::new();
    for i in 0..l {
        slots.push((i, i));
        choices.push(roots(gcd(n[i], 2)));
        for j in i + 1..l {
            slots.push((i, j));
            choices.push(roots(gcd(n[i], n[j])));
        }
    }
    let combos = enumerate_with(k, choices)?;
    combos
        .into_iter()
        .map(|vals| {
            let mut m = vec![vec![RootOfUnity::ONE; l]; l];
            for ((i, j), z) in slots.iter().zip(vals) {
                m[*i][*j] = z;
                m[*j][*i] = z.inv();
            }
            Bihom::new(k.clone(), m)
        })
        .collect()
}

/// Every bihomomorphism, with no symmetry constraint.
pub fn enumerate_bihoms(k: &FinAbGroup) -> Result<Vec<Bihom>> {
    let l = k.rank();
    let n = k.orders();
    let choices = (0..l * l).map(|s| roots(gcd(n[s / l], n[s % l]))).collect();
    let combos = enumerate_with(k, choices)?;
    combos
        .into_iter()
        .map(|vals| Bihom::new(k.clone(), vals.chunks(l.max(1)).map(|c| c.to_vec()).collect::<Vec<_>>()[..l].to_vec()))
        .collect()
}

/// Brute-force order of Skew²/Alt²: enumerates both subgroups and divides.
pub fn quotient_order_by_enumeration(k: &FinAbGroup) -> Result<u64> {
    let all = enumerate_bihoms(k)?;
    let skew_count = all.iter().filter(|b| b.is_skew()).count() as u64;
    let alt_count = all.iter().filter(|b| b.is_alternating()).count() as u64;
    Ok(skew_count / alt_count)
}

/// Random element of the skew group, for fuzzing.
pub fn random_skew_bihom<R: Rng + ?Sized>(k: &FinAbGroup, rng: &mut R) -> Bihom {
    let l = k.rank();
    let n = k.orders();
    let mut m = vec![vec![RootOfUnity::ONE; l]; l];
    for i in 0..l {
        let d = gcd(n[i], 2);
        m[i][i] = RootOfUnity::new(rng.gen_range(0..d) as i64, d);
        for j in i + 1..l {
            let d = gcd(n[i], n[j]);
            let z = RootOfUnity::new(rng.gen_range(0..d) as i64, d);
            m[i][j] = z;
            m[j][i] = z.inv();
        }
    }
    Bihom::new(k.clone(), m).expect("entries respect the orders")
}

/// Random normalized cocycle: a random bilinear form times a random normalized coboundary.
pub fn random_cocycle<R: Rng + ?Sized>(k: &FinAbGroup, rng: &mut R) -> Result<Cocycle2> {
    let l = k.rank();
    let n = k.orders();
    let m = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let d = gcd(n[i], n[j]);
                    RootOfUnity::new(rng.gen_range(0..d) as i64, d)
                })
                .collect()
        })
        .collect();
    let bil = Cocycle2::bilinear(k.clone(), m)?;
    let ord = k.order() as usize;
    let mut rho: Vec<RootOfUnity> = (0..ord).map(|_| RootOfUnity::new(rng.gen_range(0..12), 12)).collect();
    rho[0] = RootOfUnity::ONE;
    bil.mul(&Cocycle2::coboundary(k, &rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grp(v: &[u64]) -> FinAbGroup {
        FinAbGroup::new(v.to_vec()).unwrap()
    }

    #[test]
    fn root_arithmetic_is_exact() {
        let a = RootOfUnity::new(1, 3);
        let b = RootOfUnity::new(1, 6);
        assert_eq!(a.mul(b), RootOfUnity::MINUS_ONE);
        assert_eq!(a.pow(3), RootOfUnity::ONE);
        assert_eq!(a.inv(), RootOfUnity::new(2, 3));
        assert_eq!(RootOfUnity::new(-3, 6), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::parse("4/8").unwrap().to_string(), "1/2");
        assert_eq!(RootOfUnity::ONE.to_string(), "0/1");
    }

    #[test]
    fn skew_of_trivial_is_trivial() {
        let k = grp(&[2, 4]);
        assert!(skew(&Cocycle2::trivial(&k)).unwrap().is_trivial());
    }

    #[test]
    fn skew_of_xi_example() {
        for (p, q, xi) in
            [(2, 2, RootOfUnity::MINUS_ONE), (3, 6, RootOfUnity::new(1, 3)), (4, 4, RootOfUnity::new(1, 4))]
        {
            let kappa = Cocycle2::xi_example(p, q, xi).unwrap();
            let s = skew(&kappa).unwrap();
            let k = kappa.group().clone();
            for g in k.elements().unwrap() {
                for h in k.elements().unwrap() {
                    let e = g[0] as i64 * h[1] as i64 - g[1] as i64 * h[0] as i64;
                    assert_eq!(s.eval(&g, &h), xi.pow(e));
                }
            }
        }
    }

    #[test]
    fn skew_of_every_coboundary_on_klein_four_vanishes() {
        let k = grp(&[2, 2]);
        // ρ(0) = 1 and ρ of the other three elements ranges over μ₄
        for code in 0..64u64 {
            let mut rho = vec![RootOfUnity::ONE];
            for s in 0..3 {
                rho.push(RootOfUnity::new(((code >> (2 * s)) & 3) as i64, 4));
            }
            let kappa = Cocycle2::coboundary(&k, &rho).unwrap();
            kappa.cocycle_identity_check().unwrap();
            assert!(skew(&kappa).unwrap().is_trivial());
        }
    }

    #[test]
    fn lift_on_klein_four() {
        let k = grp(&[2, 2]);
        let m = vec![vec![RootOfUnity::ONE, RootOfUnity::MINUS_ONE], vec![RootOfUnity::MINUS_ONE, RootOfUnity::ONE]];
        let b = Bihom::new(k.clone(), m).unwrap();
        let kappa = lift_alt_to_cocycle(&b).unwrap();
        let s = skew(&kappa).unwrap();
        let els = k.elements().unwrap();
        let mut pairs = 0;
        for g in &els {
            for h in &els {
                assert_eq!(s.eval(g, h), b.eval(g, h));
                pairs += 1;
            }
        }
        assert_eq!(pairs, 16);
        assert!(
            lift_alt_to_cocycle(&Bihom::trivial(&k)).unwrap().to_table().unwrap()
                == Cocycle2::trivial(&k).to_table().unwrap()
        );
    }

    #[test]
    fn lift_rejects_non_alternating() {
        let b = so_parity_pairing(1);
        assert!(b.is_skew() && !b.is_alternating());
        assert!(matches!(lift_alt_to_cocycle(&b), Err(Error::NotAlternating(_))));
    }

    #[test]
    fn torsion_quotients() {
        assert!(two_torsion_quotient(&grp(&[3])).orders.is_empty());
        assert_eq!(two_torsion_quotient(&grp(&[2, 2])).describe(), "Z2xZ2");
        assert_eq!(two_torsion_quotient(&grp(&[4, 6])).describe(), "Z2xZ2");
        for v in [&[3][..], &[2, 2], &[4, 6], &[3, 9], &[2, 4, 6]] {
            let k = grp(v);
            assert_eq!(quotient_order_by_enumeration(&k).unwrap(), 1 << k.two_torsion_orders().len());
        }
    }

    #[test]
    fn modified_obstruction_examples() {
        let kappa = Cocycle2::xi_example(3, 3, RootOfUnity::new(1, 3)).unwrap();
        let k = kappa.group().clone();
        assert_eq!(modified_obstruction(&Bihom::trivial(&k), &kappa).unwrap(), skew(&kappa).unwrap().inv());
        let b = random_skew_bihom(&k, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(modified_obstruction(&b, &Cocycle2::trivial(&k)).unwrap(), b);
        for lev in 0..6 {
            assert_eq!(so_parity_pairing(lev).is_trivial(), lev % 2 == 0);
        }
    }

    #[test]
    fn alternating_implies_skew_on_klein_four() {
        for b in enumerate_bihoms(&grp(&[2, 2])).unwrap() {
            if b.is_alternating_exhaustive().unwrap() {
                assert!(b.is_skew_exhaustive().unwrap());
            }
            assert_eq!(b.is_skew(), b.is_skew_exhaustive().unwrap());
            assert_eq!(b.is_alternating(), b.is_alternating_exhaustive().unwrap());
        }
    }

    #[test]
    fn normalize_keeps_skew() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = grp(&[2, 2]);
        for _ in 0..20 {
            let base = random_cocycle(&k, &mut rng).unwrap();
            let shift = RootOfUnity::new(rng.gen_range(0..8), 8);
            let values = match base.to_table().unwrap() {
                Cocycle2::Table { values, .. } => values.into_iter().map(|v| v.mul(shift)).collect(),
                _ => unreachable!(),
            };
            let kappa = Cocycle2::table(k.clone(), values).unwrap();
            kappa.cocycle_identity_check().unwrap();
            let n = kappa.normalize().unwrap();
            assert!(n.is_normalized());
            assert_eq!(skew(&n).unwrap(), skew(&kappa).unwrap());
        }
    }

    #[test]
    fn broken_table_is_rejected() {
        // On Z3, changing only κ(1,1) breaks the identity at (1, 1, 2).
        let k = grp(&[3]);
        let mut v = vec![RootOfUnity::ONE; 9];
        v[4] = RootOfUnity::new(1, 4);
        let t = Cocycle2::table(k, v).unwrap();
        assert!(matches!(skew(&t), Err(Error::NotACocycle(_))));
    }

    #[test]
    fn guard_refuses_large_groups() {
        assert!(matches!(grp(&[11, 101]).elements(), Err(Error::GroupTooLarge(1111))));
    }
}
