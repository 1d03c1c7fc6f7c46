//! Eisenstein-Jacobi integers `x + y*rho`, `rho = (1 + sqrt(-3)) / 2`, and
//! the Cayley graphs `EJ_alpha` on `Z[rho] / (alpha)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::circulant::FrobeniusCirculant;
use crate::error::{Error, Result};
use crate::graph::{Topology, MATERIALIZE_BOUND};
use crate::numtheory::{gcd, inv_mod, reduce_signed};

/// `x + y*rho`. Arithmetic uses `rho^2 = rho - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EjInt {
    pub x: i64,
    pub y: i64,
}

/// `rho^0, ..., rho^5` = `1, rho, -1+rho, -1, -rho, 1-rho`.
pub const UNITS: [EjInt; 6] = [
    EjInt { x: 1, y: 0 },
    EjInt { x: 0, y: 1 },
    EjInt { x: -1, y: 1 },
    EjInt { x: -1, y: 0 },
    EjInt { x: 0, y: -1 },
    EjInt { x: 1, y: -1 },
];

impl EjInt {
    pub const ZERO: EjInt = EjInt { x: 0, y: 0 };
    pub const ONE: EjInt = EjInt { x: 1, y: 0 };
    pub const RHO: EjInt = EjInt { x: 0, y: 1 };

    pub const fn new(x: i64, y: i64) -> Self {
        EjInt { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// `x^2 + xy + y^2`.
    pub fn norm(self) -> i128 {
        let (x, y) = (self.x as i128, self.y as i128);
        x * x + x * y + y * y
    }

    /// Complex conjugate: `conj(rho) = 1 - rho`.
    pub fn conj(self) -> Self {
        EjInt::new(self.x + self.y, -self.y)
    }

    /// `c + d*rho -> d + c*rho`.
    pub fn swap(self) -> Self {
        EjInt::new(self.y, self.x)
    }

    pub fn checked_mul(self, o: EjInt) -> Option<EjInt> {
        let (x1, y1, x2, y2) = (self.x as i128, self.y as i128, o.x as i128, o.y as i128);
        let x = x1 * x2 - y1 * y2;
        let y = x1 * y2 + x2 * y1 + y1 * y2;
        Some(EjInt::new(i64::try_from(x).ok()?, i64::try_from(y).ok()?))
    }

    pub fn scale(self, k: i64) -> Self {
        EjInt::new(self.x * k, self.y * k)
    }

    /// `self * rho^k`.
    pub fn rotate(self, k: usize) -> Self {
        self * UNITS[k % 6]
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    /// Division with remainder: `u = q v + r`, `N(r) <= 3/4 N(v)`.
    ///
    /// `u conj(v) / N(v)` is rounded coordinate-wise to the nearest integer,
    /// halves going toward negative infinity. Since the quotient of `u + w v`
    /// is exactly `q + w`, the remainder depends only on `u mod v`.
    pub fn divmod(self, v: EjInt) -> Result<(EjInt, EjInt)> {
        if v.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nv = v.norm();
        let vc = v.conj();
        let (ux, uy, cx, cy) = (self.x as i128, self.y as i128, vc.x as i128, vc.y as i128);
        let px = ux * cx - uy * cy;
        let py = ux * cy + cx * uy + uy * cy;
        let round = |p: i128| -> i128 {
            // ceil((2p - N) / 2N)
            let num = 2 * p - nv;
            let den = 2 * nv;
            num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0)
        };
        let (qx, qy) = (round(px), round(py));
        let q = EjInt::new(
            i64::try_from(qx).map_err(|_| Error::InvalidEj("quotient overflow".into()))?,
            i64::try_from(qy).map_err(|_| Error::InvalidEj("quotient overflow".into()))?,
        );
        let qv = q
            .checked_mul(v)
            .ok_or_else(|| Error::InvalidEj("product overflow".into()))?;
        Ok((q, self - qv))
    }

    /// Canonical remainder of `self` modulo `v`.
    #[allow(clippy::should_implement_trait)] // fallible, so not `Rem`
    pub fn rem(self, v: EjInt) -> Result<EjInt> {
        Ok(self.divmod(v)?.1)
    }

    /// Whether `v` divides `self`.
    pub fn divisible_by(self, v: EjInt) -> Result<bool> {
        Ok(self.rem(v)?.is_zero())
    }

    /// The associate `rho^j * self` with `x > 0`, `y >= 0`.
    pub fn canonical_associate(self) -> Result<EjInt> {
        if self.is_zero() {
            return Err(Error::InvalidEj("zero has no canonical associate".into()));
        }
        Ok((0..6)
            .map(|k| self.rotate(k))
            .find(|z| z.x > 0 && z.y >= 0)
            .expect("every nonzero element has an associate in the first sextant"))
    }

    /// The representative `(c, d)`, `c >= d >= 0`, of the class of `self`
    /// under associates and `c + d rho <-> d + c rho`. Ties go to the
    /// lexicographically largest pair.
    pub fn canonicalize(self) -> Result<(i64, i64)> {
        if self.is_zero() {
            return Err(Error::InvalidEj("cannot canonicalize zero".into()));
        }
        (0..6)
            .flat_map(|k| [self.rotate(k), self.swap().rotate(k)])
            .filter(|z| z.x >= z.y && z.y >= 0)
            .map(|z| (z.x, z.y))
            .max()
            .ok_or_else(|| Error::Invariant(format!("no canonical form for {self}")))
    }
}

impl fmt::Display for EjInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y < 0 {
            write!(f, "{}-{}ρ", self.x, -self.y)
        } else {
            write!(f, "{}+{}ρ", self.x, self.y)
        }
    }
}

impl From<i64> for EjInt {
    fn from(x: i64) -> Self {
        EjInt::new(x, 0)
    }
}

impl Add for EjInt {
    type Output = EjInt;
    fn add(self, o: EjInt) -> EjInt {
        EjInt::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for EjInt {
    type Output = EjInt;
    fn sub(self, o: EjInt) -> EjInt {
        EjInt::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for EjInt {
    type Output = EjInt;
    fn neg(self) -> EjInt {
        EjInt::new(-self.x, -self.y)
    }
}

impl Mul for EjInt {
    type Output = EjInt;
    fn mul(self, o: EjInt) -> EjInt {
        EjInt::new(
            self.x * o.x - self.y * o.y,
            self.x * o.y + o.x * self.y + self.y * o.y,
        )
    }
}

/// Greatest common divisor in canonical associate form.
pub fn ej_gcd(u: EjInt, v: EjInt) -> Result<EjInt> {
    if u.is_zero() && v.is_zero() {
        return Err(Error::InvalidEj("gcd(0, 0) is undefined".into()));
    }
    let (mut a, mut b) = (u, v);
    while !b.is_zero() {
        let r = a.rem(b)?;
        a = b;
        b = r;
    }
    a.canonical_associate()
}

/// Canonical remainders of every class of `Z[rho]/(modulus)`, in BFS order
/// from 0 under unit steps.
pub fn residue_system(modulus: EjInt) -> Result<Vec<EjInt>> {
    if modulus.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = modulus.norm();
    if n > MATERIALIZE_BOUND as i128 {
        return Err(Error::BoundExceeded {
            n: n as u64,
            bound: MATERIALIZE_BOUND as u64,
        });
    }
    let mut out = vec![EjInt::ZERO];
    let mut seen = std::collections::HashSet::from([EjInt::ZERO]);
    let mut head = 0;
    while head < out.len() {
        let z = out[head];
        head += 1;
        for e in UNITS {
            let w = (z + e).rem(modulus)?;
            if seen.insert(w) {
                out.push(w);
            }
        }
    }
    if out.len() as i128 != n {
        return Err(Error::Invariant(format!(
            "residue system of {modulus} has {} classes, expected {n}",
            out.len()
        )));
    }
    Ok(out)
}

/// The Cayley graph on `Z[rho]/(alpha)` with the six units as connection set.
///
/// Vertices are the canonical remainders modulo `alpha`, numbered in BFS
/// order from 0; neighbour `k` of a vertex is the vertex plus `rho^k`.
#[derive(Debug, Clone)]
pub struct EjGraph {
    alpha: EjInt,
    canonical_cd: (i64, i64),
    vertices: Vec<EjInt>,
    index: HashMap<EjInt, usize>,
    adj: Vec<[u32; 6]>,
}

impl EjGraph {
    pub fn new(alpha: EjInt) -> Result<Self> {
        let canonical_cd = alpha.canonicalize()?;
        let n = alpha.norm();
        if n < 7 {
            return Err(Error::OrderTooSmall {
                got: n as u64,
                min: 7,
            });
        }
        if n > MATERIALIZE_BOUND as i128 {
            return Err(Error::BoundExceeded {
                n: n as u64,
                bound: MATERIALIZE_BOUND as u64,
            });
        }
        let n = n as usize;
        let mut vertices = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        let mut queue = VecDeque::new();
        vertices.push(EjInt::ZERO);
        index.insert(EjInt::ZERO, 0);
        queue.push_back(0usize);
        let mut adj = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            let z = vertices[v];
            let mut row = [0u32; 6];
            for (k, e) in UNITS.iter().enumerate() {
                let w = (z + *e).rem(alpha)?;
                let id = *index.entry(w).or_insert_with(|| {
                    vertices.push(w);
                    queue.push_back(vertices.len() - 1);
                    vertices.len() - 1
                });
                row[k] = id as u32;
            }
            adj.push(row);
        }
        if vertices.len() != n {
            return Err(Error::Invariant(format!(
                "residue system of {alpha} has {} classes, expected {n}",
                vertices.len()
            )));
        }
        Ok(EjGraph {
            alpha,
            canonical_cd,
            vertices,
            index,
            adj,
        })
    }

    pub fn alpha(&self) -> EjInt {
        self.alpha
    }

    pub fn n(&self) -> u64 {
        self.vertices.len() as u64
    }

    pub fn canonical_cd(&self) -> (i64, i64) {
        self.canonical_cd
    }

    pub fn vertices(&self) -> &[EjInt] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> EjInt {
        self.vertices[id]
    }

    /// Vertex id of the class of `z`.
    pub fn index_of(&self, z: EjInt) -> Result<usize> {
        let r = z.rem(self.alpha)?;
        self.index
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Invariant(format!("{z} reduced to unknown residue {r}")))
    }
}

impl Topology for EjGraph {
    fn order(&self) -> usize {
        self.vertices.len()
    }
    fn neighbors(&self, v: usize) -> [usize; 6] {
        self.adj[v].map(|w| w as usize)
    }
    fn label(&self, v: usize) -> String {
        let z = self.vertices[v];
        format!("({},{})", z.x, z.y)
    }
}

/// `gcd(n, a - rho)`: the generator of the kernel of `x + y rho -> x + y a mod n`.
pub fn circulant_to_ej(g: &FrobeniusCirculant) -> Result<EjInt> {
    let n = i64::try_from(g.n()).map_err(|_| Error::ModulusTooLarge(g.n()))?;
    let alpha = ej_gcd(EjInt::from(n), EjInt::new(g.a() as i64, -1))?;
    if alpha.norm() != n as i128 {
        return Err(Error::Invariant(format!(
            "kernel generator {alpha} of TL_{n}({}) has norm {}",
            g.a(),
            alpha.norm()
        )));
    }
    Ok(alpha)
}

/// `TL_n(a, a-1, 1)` with `n = N(alpha)`, `a = -c d^{-1} mod n`, returned
/// with its canonical generator.
pub fn ej_to_circulant(alpha: EjInt) -> Result<FrobeniusCirculant> {
    Ok(kernel_circulant(alpha)?.canonical())
}

/// As [`ej_to_circulant`] but keeping `a = -c d^{-1}`, the generator for
/// which `x + y rho -> x + y a mod n` has kernel exactly `(alpha)`.
pub fn kernel_circulant(alpha: EjInt) -> Result<FrobeniusCirculant> {
    let (c, d) = (alpha.x, alpha.y);
    if gcd(c.unsigned_abs(), d.unsigned_abs()) != 1 {
        return Err(Error::InvalidEj(format!("gcd({c}, {d}) != 1")));
    }
    let n = alpha.norm();
    if n % 6 != 1 {
        return Err(Error::InvalidEj(format!("norm {n} is not 1 mod 6")));
    }
    if n < 7 {
        return Err(Error::OrderTooSmall {
            got: n as u64,
            min: 7,
        });
    }
    let n = u64::try_from(n).map_err(|_| Error::ModulusTooLarge(u64::MAX))?;
    let dm = reduce_signed(d as i128, n);
    let g = inv_mod(dm, n).ok_or(Error::NotAUnit { m: dm, n })?;
    let a = reduce_signed(-(c as i128) * g as i128, n);
    FrobeniusCirculant::new(n, a)
}

/// Check that `(g, alpha)` are compatible: `N(alpha) = n` and `a` reduces to a
/// unit modulo `alpha`, so that `u -> [lambda u]_alpha` maps `S` onto the units.
fn check_compatible(g: &FrobeniusCirculant, alpha: EjInt) -> Result<()> {
    if alpha.norm() != g.n() as i128 {
        return Err(Error::Incompatible(format!(
            "N({alpha}) = {} but n = {}",
            alpha.norm(),
            g.n()
        )));
    }
    let ar = EjInt::from(g.a() as i64).rem(alpha)?;
    if !UNITS.iter().any(|&e| e.rem(alpha).ok() == Some(ar)) {
        return Err(Error::Incompatible(format!(
            "{} is not congruent to a unit modulo {alpha}",
            g.a()
        )));
    }
    Ok(())
}

/// The isomorphism `Z_n -> Z[rho]/(alpha)`, `u -> [u]_alpha`, as a table of
/// canonical remainders.
pub fn iso_map(g: &FrobeniusCirculant, alpha: EjInt) -> Result<Vec<EjInt>> {
    iso_map_with_unit(g, alpha, EjInt::ONE)
}

/// As [`iso_map`] with `u -> [lambda u]_alpha` for a unit `lambda`.
pub fn iso_map_with_unit(
    g: &FrobeniusCirculant,
    alpha: EjInt,
    lambda: EjInt,
) -> Result<Vec<EjInt>> {
    if !lambda.is_unit() {
        return Err(Error::InvalidEj(format!("{lambda} is not a unit")));
    }
    check_compatible(g, alpha)?;
    // u -> [lambda u] is additive, so build it by repeated addition of [lambda]
    let step = lambda.rem(alpha)?;
    let mut out = Vec::with_capacity(g.n() as usize);
    let mut z = EjInt::ZERO;
    for _ in 0..g.n() {
        out.push(z);
        z = (z + step).rem(alpha)?;
    }
    Ok(out)
}

/// Check that `map` is a bijection onto the vertices of `ej` carrying every
/// circulant edge to an EJ edge.
pub fn verify_iso(g: &FrobeniusCirculant, ej: &EjGraph, map: &[EjInt]) -> Result<bool> {
    let n = g.n() as usize;
    if map.len() != n || ej.order() != n {
        return Ok(false);
    }
    let mut ids = Vec::with_capacity(n);
    let mut hit = vec![false; n];
    for &z in map {
        let Some(&id) = ej.index.get(&z) else {
            return Ok(false);
        };
        if std::mem::replace(&mut hit[id], true) {
            return Ok(false);
        }
        ids.push(id);
    }
    Ok((0..n).all(|u| {
        g.neighbors(u)
            .iter()
            .all(|&v| ej.is_adjacent(ids[u], ids[v]))
    }))
}

/// `W_0, ..., W_D` for `EJ_alpha` from the canonical pair `(c, d)`.
pub fn distance_distribution(alpha: EjInt) -> Result<Vec<u64>> {
    let (c, d) = alpha.canonicalize()?;
    let (c, d) = (c as i128, d as i128);
    let n = alpha.norm();
    let diam = (2 * c + d) / 3;
    let mut w = vec![0i128; diam as usize + 1];
    let mut midpoint = None;
    for t in 0..=diam {
        w[t as usize] = if t == 0 {
            1
        } else if 2 * t == c + d {
            midpoint = Some(t as usize);
            0
        } else if 2 * t < c + d {
            6 * t
        } else if 3 * t < 2 * c + d {
            6 * (2 * c + d) - 18 * t
        } else {
            2
        };
    }
    if let Some(t) = midpoint {
        w[t] = n - w.iter().sum::<i128>();
    }
    if w.iter().any(|&x| x <= 0) || w.iter().sum::<i128>() != n {
        return Err(Error::Invariant(format!(
            "distance distribution {w:?} for ({c},{d}) does not sum to {n}"
        )));
    }
    Ok(w.into_iter().map(|x| x as u64).collect())
}

/// Which of the three parametrised forms a witness realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    /// `alpha = (rn + m) + (sn - ma) rho`
    MinusA,
    /// `alpha = (rn + m) + (sn + m(a-1)) rho`
    AMinusOne,
    /// `alpha = (rn + ma) + (sn - m(a-1)) rho`
    ALead,
}

/// A solution `(m, r, s)` of one of the quadratic Diophantine equations that
/// parametrise the EJ generators of `TL_n(a, a-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophantineWitness {
    pub case: WitnessCase,
    pub m: i64,
    pub r: i64,
    pub s: i64,
    /// The generator realising the form; an associate or swap of the input.
    pub alpha: EjInt,
}

impl DiophantineWitness {
    /// Left-hand side of the case equation; equals 1 for a valid witness.
    pub fn evaluate(&self, n: u64, a: u64) -> i128 {
        let (n, a) = (n as i128, a as i128);
        let k = (a * a - a + 1) / n;
        let (m, r, s) = (self.m as i128, self.r as i128, self.s as i128);
        let lin = match self.case {
            WitnessCase::MinusA => -((a - 2) * r + (2 * a - 1) * s),
            WitnessCase::AMinusOne => (a + 1) * r + (2 * a - 1) * s,
            WitnessCase::ALead => (a + 1) * r - (a - 2) * s,
        };
        k * m * m + lin * m + (r * r + r * s + s * s) * n
    }

    /// The generator `c + d rho` named by the case form.
    pub fn form(&self, n: u64, a: u64) -> EjInt {
        let (n, a) = (n as i64, a as i64);
        let (m, r, s) = (self.m, self.r, self.s);
        match self.case {
            WitnessCase::MinusA => EjInt::new(r * n + m, s * n - m * a),
            WitnessCase::AMinusOne => EjInt::new(r * n + m, s * n + m * (a - 1)),
            WitnessCase::ALead => EjInt::new(r * n + m * a, s * n - m * (a - 1)),
        }
    }
}

fn witness_for(alpha: EjInt, n: i64, a: i64, bound: i64) -> Option<DiophantineWitness> {
    let (c, d) = (alpha.x as i128, alpha.y as i128);
    let (n1, a1) = (n as i128, a as i128);
    let offsets = std::iter::once(0).chain((1..=bound).flat_map(|k| [k, -k]));
    let check = |w: DiophantineWitness| {
        let ok = w.form(n as u64, a as u64) == alpha
            && w.evaluate(n as u64, a as u64) == 1
            && gcd(w.m.unsigned_abs(), n as u64) == 1;
        ok.then_some(w)
    };
    for case in [
        WitnessCase::MinusA,
        WitnessCase::AMinusOne,
        WitnessCase::ALead,
    ] {
        for r in offsets.clone() {
            let r1 = r as i128;
            let (m, s_num) = match case {
                WitnessCase::MinusA => {
                    let m = c - r1 * n1;
                    (m, d + m * a1)
                }
                WitnessCase::AMinusOne => {
                    let m = c - r1 * n1;
                    (m, d - m * (a1 - 1))
                }
                WitnessCase::ALead => {
                    // m = c a^{-1} mod n, shifted so that c - m a = r n
                    let ainv = inv_mod(a as u64, n as u64)? as i128;
                    let m0 = (c * ainv).rem_euclid(n1);
                    let base_r = (c - m0 * a1).div_euclid(n1);
                    // each +1 on m lowers r by a; pick the k giving this r
                    if (base_r - r1) % a1 != 0 {
                        continue;
                    }
                    let m = m0 + ((base_r - r1) / a1) * n1;
                    (m, d + m * (a1 - 1))
                }
            };
            if s_num % n1 != 0 {
                // the residue condition fails for every r in this case
                break;
            }
            let s = s_num / n1;
            let (Ok(m), Ok(s)) = (i64::try_from(m), i64::try_from(s)) else {
                continue;
            };
            if s.abs() > bound {
                continue;
            }
            if let Some(w) = check(DiophantineWitness {
                case,
                m,
                r,
                s,
                alpha,
            }) {
                return Some(w);
            }
        }
    }
    None
}

/// Search `(case, m, r, s)` with `|r|, |s| <= 2 + ceil(sqrt n)` for `alpha`,
/// then for its associates and swaps.
pub fn find_witness(g: &FrobeniusCirculant, alpha: EjInt) -> Result<DiophantineWitness> {
    let n = g.n() as i64;
    let a = g.a() as i64;
    if alpha.norm() != n as i128 {
        return Err(Error::Incompatible(format!("N({alpha}) != {n}")));
    }
    let bound = 2 + (n as f64).sqrt().ceil() as i64;
    let candidates = std::iter::once(alpha)
        .chain((1..6).map(|k| alpha.rotate(k)))
        .chain((0..6).map(|k| alpha.swap().rotate(k)));
    for cand in candidates {
        if let Some(w) = witness_for(cand, n, a, bound) {
            return Ok(w);
        }
    }
    Err(Error::NoWitness { bound })
}

/// Whether translations and multiplication by units act transitively on the
/// arcs of `EJ_alpha`, by an orbit computation from the arc `(0, 1)`.
pub fn verify_arc_transitive(alpha: EjInt, bound: u64) -> Result<bool> {
    let n = alpha.norm();
    if n > bound as i128 {
        return Err(Error::BoundExceeded { n: n as u64, bound });
    }
    let g = EjGraph::new(alpha)?;
    let n = g.order();
    // multiplication by rho as a vertex permutation
    let times_rho: Vec<usize> = g
        .vertices
        .iter()
        .map(|&z| g.index_of(z * EjInt::RHO))
        .collect::<Result<_>>()?;
    // arc id = 6 * tail + k for the arc (v, v + rho^k)
    let mut seen = vec![false; 6 * n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(id) = stack.pop() {
        let (v, k) = (id / 6, id % 6);
        let images = [
            6 * g.adj[v][0] as usize + k,
            6 * g.adj[v][1] as usize + k,
            // rho (v + rho^k) = rho v + rho^{k+1}
            6 * times_rho[v] + (k + 1) % 6,
        ];
        for img in images {
            if !seen[img] {
                seen[img] = true;
                count += 1;
                stack.push(img);
            }
        }
    }
    Ok(count == 6 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::all_generators;
    use crate::graph::distance_profile;
    use proptest::prelude::*;

    fn e(x: i64, y: i64) -> EjInt {
        EjInt::new(x, y)
    }

    #[test]
    fn unit_powers() {
        let rho = EjInt::RHO;
        assert_eq!(rho * rho, e(-1, 1));
        assert_eq!(rho * rho * rho, e(-1, 0));
        let mut z = EjInt::ONE;
        for u in UNITS {
            assert_eq!(z, u);
            z = z * rho;
        }
        assert_eq!(z, EjInt::ONE);
        assert_eq!(e(5, 3).norm(), 49);
    }

    #[test]
    fn divmod_examples() {
        let (q, r) = EjInt::from(7).divmod(e(1, 2)).unwrap();
        assert!(r.norm() < 7);
        assert_eq!(q * e(1, 2) + r, EjInt::from(7));
        assert_eq!(e(5, 3).divmod(e(5, 3)).unwrap(), (EjInt::ONE, EjInt::ZERO));
        assert_eq!(
            EjInt::ZERO.divmod(e(5, 3)).unwrap(),
            (EjInt::ZERO, EjInt::ZERO)
        );
        assert_eq!(e(1, 1).divmod(EjInt::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        let g = ej_gcd(EjInt::from(49), e(31, -1)).unwrap();
        assert_eq!(g.norm(), 49);
        assert_eq!(g.canonicalize().unwrap(), (5, 3));
        assert!(EjInt::from(49).divisible_by(g).unwrap());
        assert!(e(31, -1).divisible_by(g).unwrap());
        assert_eq!(ej_gcd(e(3, 5), EjInt::ZERO).unwrap(), e(3, 5));
        let g7 = ej_gcd(EjInt::from(7), e(3, -1)).unwrap();
        assert_eq!(g7.norm(), 7);
        // 1 + 2 rho is in the kernel of x + 3y mod 7, so it is an associate
        assert!(e(1, 2).divisible_by(g7).unwrap() && g7.divisible_by(e(1, 2)).unwrap());
        assert!(ej_gcd(EjInt::ZERO, EjInt::ZERO).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(e(7, -6).canonicalize().unwrap(), (6, 1));
        assert_eq!(e(3, 5).canonicalize().unwrap(), (5, 3));
        assert_eq!(e(5, 3).canonicalize().unwrap(), (5, 3));
        assert_eq!(e(0, 4).canonicalize().unwrap(), (4, 0));
        assert_eq!(e(-2, 4).canonicalize().unwrap(), (2, 2));
        assert!(EjInt::ZERO.canonicalize().is_err());
    }

    #[test]
    fn circulant_to_ej_examples() {
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        let alpha = circulant_to_ej(&g).unwrap();
        assert_eq!(alpha.canonicalize().unwrap(), (5, 3));
        let g7 = FrobeniusCirculant::new(7, 3).unwrap();
        assert_eq!(
            circulant_to_ej(&g7).unwrap().canonicalize().unwrap(),
            (2, 1)
        );
        // n_k = 3k^2 + 3k + 1 with generator 3k + 2
        for k in 2..30i64 {
            let n = (3 * k * k + 3 * k + 1) as u64;
            let g = FrobeniusCirculant::new(n, (3 * k + 2) as u64).unwrap();
            assert_eq!(
                circulant_to_ej(&g).unwrap().canonicalize().unwrap(),
                (k + 1, k)
            );
        }
    }

    #[test]
    fn ej_to_circulant_examples() {
        assert_eq!(ej_to_circulant(e(3, 5)).unwrap().a(), 19);
        assert_eq!(ej_to_circulant(e(1, 2)).unwrap().a(), 3);
        assert!(ej_to_circulant(e(2, 2)).is_err());
        assert!(ej_to_circulant(e(2, 1)).is_ok());
        // 4 + 1 rho has norm 21
        assert!(ej_to_circulant(e(4, 1)).is_err());
    }

    #[test]
    fn round_trip_small() {
        for n in (7..=3000).step_by(6) {
            for g in all_generators(n).unwrap() {
                let alpha = circulant_to_ej(&g).unwrap();
                let (c, d) = (alpha.x, alpha.y);
                assert_eq!(gcd(c.unsigned_abs(), d.unsigned_abs()), 1);
                assert_eq!(ej_to_circulant(alpha).unwrap().a(), g.canonical_generator());
            }
        }
    }

    #[test]
    fn iso_maps() {
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        let alpha = circulant_to_ej(&g).unwrap();
        let ej = EjGraph::new(alpha).unwrap();
        let map = iso_map(&g, alpha).unwrap();
        assert_eq!(map[0], EjInt::ZERO);
        assert!(verify_iso(&g, &ej, &map).unwrap());

        // u -> [-u rho] onto EJ_{3 + 5 rho}
        let alpha = e(3, 5);
        let lambda = -EjInt::RHO;
        let map = iso_map_with_unit(&g, alpha, lambda).unwrap();
        assert_eq!(map[1], lambda.rem(alpha).unwrap());
        assert!(verify_iso(&g, &EjGraph::new(alpha).unwrap(), &map).unwrap());

        // 7 + 0 rho has norm 49 but is not a kernel generator
        assert!(iso_map(&g, EjInt::from(7)).is_err());
        // a broken map is rejected
        let mut bad = iso_map(&g, e(3, 5)).unwrap();
        bad.swap(1, 2);
        assert!(!verify_iso(&g, &EjGraph::new(e(3, 5)).unwrap(), &bad).unwrap());
    }

    #[test]
    fn distance_distribution_examples() {
        assert_eq!(
            distance_distribution(e(5, 3)).unwrap(),
            vec![1, 6, 12, 18, 12]
        );
        assert_eq!(distance_distribution(e(2, 1)).unwrap(), vec![1, 6]);
        assert_eq!(distance_distribution(e(6, 1)).unwrap().len() - 1, 4);
    }

    #[test]
    fn distance_distribution_matches_bfs() {
        for c in 1..=60i64 {
            for d in 0..=c {
                let alpha = e(c, d);
                if alpha.norm() < 7 || alpha.norm() > 1500 {
                    continue;
                }
                let g = EjGraph::new(alpha).unwrap();
                assert_eq!(
                    distance_distribution(alpha).unwrap(),
                    distance_profile(&g, 0),
                    "({c},{d})"
                );
            }
        }
    }

    #[test]
    fn witness_examples() {
        // n = a^2 - a + 1
        for a in [3u64, 4, 6, 7, 9] {
            let n = a * a - a + 1;
            let Ok(g) = FrobeniusCirculant::new(n, a) else {
                continue;
            };
            let alpha = e(1, -(a as i64));
            let w = find_witness(&g, alpha).unwrap();
            assert_eq!((w.case, w.m, w.r, w.s), (WitnessCase::MinusA, 1, 0, 0));
        }
        // n = 12 g^2 + 1
        for gg in 1..=6i64 {
            let n = (12 * gg * gg + 1) as u64;
            let a = (6 * gg * gg + 3 * gg + 1) as u64;
            let Ok(g) = FrobeniusCirculant::new(n, a) else {
                continue;
            };
            let w = find_witness(&g, e(2 * gg - 1, 2 * gg + 1)).unwrap();
            assert_eq!(
                (w.case, w.m, w.r, w.s),
                (WitnessCase::MinusA, 2 * gg - 1, 0, gg)
            );
            let w = find_witness(&g, e(2 * gg - 1, -4 * gg)).unwrap();
            assert_eq!(
                (w.case, w.m, w.r, w.s),
                (WitnessCase::AMinusOne, 2 * gg - 1, 0, -gg)
            );
        }
    }

    #[test]
    fn witness_for_every_small_graph() {
        for n in (7..=2000).step_by(6) {
            for g in all_generators(n).unwrap() {
                let alpha = circulant_to_ej(&g).unwrap();
                let w = find_witness(&g, alpha).unwrap();
                assert_eq!(w.evaluate(g.n(), g.a()), 1);
                assert_eq!(w.form(g.n(), g.a()), w.alpha);
                assert_eq!(w.alpha.canonicalize(), alpha.canonicalize());
            }
        }
    }

    #[test]
    fn arc_transitivity_examples() {
        assert!(verify_arc_transitive(e(5, 3), 2000).unwrap());
        assert!(verify_arc_transitive(e(2, 1), 2000).unwrap());
        assert!(verify_arc_transitive(e(6, 2), 2000).unwrap());
        assert!(verify_arc_transitive(e(50, 50), 2000).is_err());
    }

    #[test]
    fn serde_shape() {
        assert_eq!(
            serde_json::to_string(&e(5, -3)).unwrap(),
            r#"{"x":5,"y":-3}"#
        );
        let z: EjInt = serde_json::from_str(r#"{"x":2,"y":1}"#).unwrap();
        assert_eq!(z, e(2, 1));
    }

    fn small() -> impl Strategy<Value = EjInt> {
        (-10_000i64..10_000, -10_000i64..10_000).prop_map(|(x, y)| e(x, y))
    }

    proptest! {
        #[test]
        fn ring_laws(u in small(), v in small(), w in small()) {
            prop_assert_eq!(u * v, v * u);
            prop_assert_eq!((u * v) * w, u * (v * w));
            prop_assert_eq!(u * (v + w), u * v + u * w);
            prop_assert_eq!((u * v).norm(), u.norm() * v.norm());
            prop_assert_eq!(u * u.conj(), EjInt::from(u.norm() as i64));
        }

        #[test]
        fn divmod_contract(u in small(), v in small()) {
            prop_assume!(!v.is_zero());
            let (q, r) = u.divmod(v).unwrap();
            prop_assert_eq!(q * v + r, u);
            prop_assert!(4 * r.norm() <= 3 * v.norm());
            // remainder is a class invariant
            prop_assert_eq!((u + v * e(3, -7)).rem(v).unwrap(), r);
        }

        #[test]
        fn gcd_divides(u in small(), v in small(), t in small()) {
            prop_assume!(!u.is_zero() || !v.is_zero());
            let g = ej_gcd(u, v).unwrap();
            prop_assert!(u.divisible_by(g).unwrap());
            prop_assert!(v.divisible_by(g).unwrap());
            // a common factor of both divides the gcd
            let t = e(t.x % 50, t.y % 50);
            prop_assume!(!t.is_zero());
            let g2 = ej_gcd(u * t, v * t).unwrap();
            prop_assert!(g2.divisible_by(t).unwrap());
        }

        #[test]
        fn canonical_is_class_invariant(u in small(), k in 0usize..6, sw in any::<bool>()) {
            prop_assume!(!u.is_zero());
            let v = if sw { u.swap().rotate(k) } else { u.rotate(k) };
            prop_assert_eq!(u.canonicalize().unwrap(), v.canonicalize().unwrap());
            let (c, d) = u.canonicalize().unwrap();
            prop_assert!(c >= d && d >= 0);
            prop_assert_eq!(e(c, d).norm(), u.norm());
        }
    }
}
