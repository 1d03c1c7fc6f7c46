//! Covering maps between Frobenius circulants and EJ graphs.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circulant::FrobeniusCirculant;
use crate::eisenstein::{kernel_circulant, residue_system, EjGraph, EjInt, UNITS};
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::numtheory::{gcd, reduce_signed};

/// A vertex map from a covering graph onto a base graph.
///
/// Serializes as the bare projection array, indexed by total-graph vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct CoverMap {
    pub total_order: usize,
    pub base_order: usize,
    pub fold: usize,
    pub projection: Vec<usize>,
}

impl CoverMap {
    pub fn new(projection: Vec<usize>) -> Self {
        let total_order = projection.len();
        let base_order = projection.iter().max().map_or(0, |&m| m + 1);
        let fold = total_order.checked_div(base_order).unwrap_or(0);
        CoverMap {
            total_order,
            base_order,
            fold,
            projection,
        }
    }

    /// `other ∘ self`: first project with `self`, then with `other`.
    pub fn then(&self, other: &CoverMap) -> Result<CoverMap> {
        if self.base_order != other.total_order {
            return Err(Error::InvalidInput(format!(
                "cannot compose a map onto {} vertices with one from {}",
                self.base_order, other.total_order
            )));
        }
        Ok(CoverMap::new(
            self.projection
                .iter()
                .map(|&v| other.projection[v])
                .collect(),
        ))
    }
}

impl From<Vec<usize>> for CoverMap {
    fn from(p: Vec<usize>) -> Self {
        CoverMap::new(p)
    }
}

impl From<CoverMap> for Vec<usize> {
    fn from(m: CoverMap) -> Self {
        m.projection
    }
}

/// The first way in which a map fails to be a cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverViolation {
    OrderMismatch {
        total: usize,
        base: usize,
        map: usize,
    },
    OutOfRange {
        vertex: usize,
        image: usize,
    },
    FiberSize {
        base_vertex: usize,
        size: usize,
        expected: usize,
    },
    NotLocalBijection {
        vertex: usize,
    },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::OrderMismatch { total, base, map } => write!(
                f,
                "orders do not match: total {total}, base {base}, map covers {map} vertices"
            ),
            CoverViolation::OutOfRange { vertex, image } => {
                write!(f, "vertex {vertex} maps to nonexistent base vertex {image}")
            }
            CoverViolation::FiberSize {
                base_vertex,
                size,
                expected,
            } => write!(
                f,
                "fiber over {base_vertex} has {size} vertices, expected {expected}"
            ),
            CoverViolation::NotLocalBijection { vertex } => write!(
                f,
                "neighbourhood of {vertex} does not map bijectively onto the base neighbourhood"
            ),
        }
    }
}

/// Surjectivity, uniform fibers, and a neighbourhood bijection at every vertex.
pub fn check_cover<T, B>(
    map: &CoverMap,
    total: &T,
    base: &B,
) -> std::result::Result<(), CoverViolation>
where
    T: Topology + Sync + ?Sized,
    B: Topology + Sync + ?Sized,
{
    let (nt, nb) = (total.order(), base.order());
    if map.projection.len() != nt || nb == 0 || nt % nb != 0 {
        return Err(CoverViolation::OrderMismatch {
            total: nt,
            base: nb,
            map: map.projection.len(),
        });
    }
    let mut fiber = vec![0usize; nb];
    for (v, &p) in map.projection.iter().enumerate() {
        if p >= nb {
            return Err(CoverViolation::OutOfRange {
                vertex: v,
                image: p,
            });
        }
        fiber[p] += 1;
    }
    let expected = nt / nb;
    if let Some((b, &size)) = fiber.iter().enumerate().find(|(_, &s)| s != expected) {
        return Err(CoverViolation::FiberSize {
            base_vertex: b,
            size,
            expected,
        });
    }
    let bad = (0..nt).into_par_iter().find_first(|&u| {
        let mut image = total.neighbors(u).map(|w| map.projection[w]);
        let mut want = base.neighbors(map.projection[u]);
        image.sort_unstable();
        want.sort_unstable();
        image != want || want.windows(2).any(|w| w[0] == w[1])
    });
    match bad {
        Some(vertex) => Err(CoverViolation::NotLocalBijection { vertex }),
        None => Ok(()),
    }
}

pub fn verify_cover<T, B>(map: &CoverMap, total: &T, base: &B) -> bool
where
    T: Topology + Sync + ?Sized,
    B: Topology + Sync + ?Sized,
{
    check_cover(map, total, base).is_ok()
}

/// The quotient of `g` by the subgroup generated by `m`: `TL_m(a mod m, ..)`
/// with projection `v -> v mod m`.
pub fn quotient_circulant(
    g: &FrobeniusCirculant,
    m: u64,
) -> Result<(FrobeniusCirculant, CoverMap)> {
    let n = g.n();
    if m <= 1 || m >= n || !n.is_multiple_of(m) {
        return Err(Error::BadDivisor { n, m });
    }
    let base = FrobeniusCirculant::new(m, g.a() % m)?;
    let projection = (0..n).map(|v| (v % m) as usize).collect();
    Ok((base, CoverMap::new(projection)))
}

/// `EJ_{alpha beta}` assembled from `EJ_alpha` by lifting every base edge
/// to the fibers, together with its projection onto `EJ_alpha`.
///
/// The lifted graph is compared against a direct construction of
/// `EJ_{alpha beta}` and returned only if they coincide.
pub fn ej_cover_expand(alpha: EjInt, beta: EjInt) -> Result<(EjGraph, CoverMap)> {
    if alpha.norm() < 7 {
        return Err(Error::OrderTooSmall {
            got: alpha.norm() as u64,
            min: 7,
        });
    }
    if beta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let base = EjGraph::new(alpha)?;
    let prod = alpha
        .checked_mul(beta)
        .ok_or_else(|| Error::InvalidEj("alpha * beta overflows".into()))?;
    let direct = EjGraph::new(prod)?;
    let deltas = residue_system(beta)?;
    let n = direct.order();

    // vertex alpha*delta + xi lies in the fiber over xi
    let mut projection = vec![usize::MAX; n];
    let mut lifted: Vec<[usize; 6]> = vec![[usize::MAX; 6]; n];
    for (xi_id, &xi) in base.vertices().iter().enumerate() {
        for &delta in &deltas {
            let z = direct.index_of(alpha * delta + xi)?;
            projection[z] = xi_id;
            for (k, xi2_id) in base.neighbors(xi_id).into_iter().enumerate() {
                let xi2 = base.vertex(xi2_id);
                // xi2 = xi + rho^k mod alpha, so xi - xi2 = alpha*eta + eps with eps = -rho^k
                let eps = UNITS[(k + 3) % 6];
                let diff = xi - xi2 - eps;
                let (eta, r) = diff.divmod(alpha)?;
                if !r.is_zero() {
                    return Err(Error::Invariant(format!(
                        "{xi} and {xi2} are not separated by the unit {eps} modulo {alpha}"
                    )));
                }
                lifted[z][k] = direct.index_of(alpha * (delta + eta) + xi2)?;
            }
        }
    }
    if projection.contains(&usize::MAX) {
        return Err(Error::Invariant(
            "fibers do not cover the product residue system".into(),
        ));
    }
    for (v, row) in lifted.iter().enumerate() {
        let mut a = *row;
        let mut b = direct.neighbors(v);
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::Invariant(format!(
                "lifted neighbourhood of {} differs from the direct construction",
                direct.label(v)
            )));
        }
    }
    Ok((direct, CoverMap::new(projection)))
}

/// For `alpha = l * alpha'` with `l = gcd(c, d)`: the circulant isomorphic to
/// `EJ_{alpha'}` and the `l^2`-fold cover `EJ_alpha -> TL_{N(alpha')}`,
/// `x + y rho -> x + y a' mod N(alpha')`.
pub fn frobenius_reduction(alpha: EjInt) -> Result<(FrobeniusCirculant, CoverMap)> {
    let norm = alpha.norm();
    if norm % 6 != 1 {
        return Err(Error::InvalidEj(format!("norm {norm} is not 1 mod 6")));
    }
    if norm < 7 {
        return Err(Error::OrderTooSmall {
            got: norm as u64,
            min: 7,
        });
    }
    let (_, d) = alpha.canonicalize()?;
    if d == 0 {
        return Err(Error::InvalidEj(format!(
            "{alpha} is an associate of a real integer"
        )));
    }
    let l = gcd(alpha.x.unsigned_abs(), alpha.y.unsigned_abs()) as i64;
    let reduced = EjInt::new(alpha.x / l, alpha.y / l);
    let base = kernel_circulant(reduced)?;
    let total = EjGraph::new(alpha)?;
    let (n, a) = (base.n(), base.a());
    let projection = total
        .vertices()
        .iter()
        .map(|z| reduce_signed(z.x as i128 + z.y as i128 * a as i128, n) as usize)
        .collect();
    Ok((base, CoverMap::new(projection)))
}
