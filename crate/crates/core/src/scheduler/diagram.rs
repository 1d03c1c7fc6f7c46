//! Minimum distance diagrams: the sector `Y` of the hexagonal tessellation
//! and its row profile `(i_0, ..., i_r)`.

use serde::{Deserialize, Serialize};

use crate::circulant::FrobeniusCirculant;
use crate::error::{Error, Result};
use crate::numtheory::mul_mod;

/// A lattice cell `(i, j)` of the first sector and the residue `i + j a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub i: u64,
    pub j: u64,
    pub residue: u64,
}

/// A cell `(i, j, k)` of the full diagram `X`, labelled `(i + j a) a^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexCell {
    pub i: u64,
    pub j: u64,
    pub k: u8,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceDiagram {
    pub n: u64,
    pub a: u64,
    pub r: u64,
    /// `i_0, ..., i_r`.
    pub profile: Vec<u64>,
    /// Cells of `Y`, sorted by `(j, i)`.
    pub y: Vec<Cell>,
}

/// Run the ring-by-ring sweep that builds the diagram.
///
/// Ring `l` examines cells `(l, 0), (l-1, 1), ..., (1, l-1)` in that order
/// and adds the whole `H`-orbit of `i + (l-i) a` when it is new.
pub fn build_diagram(g: &FrobeniusCirculant) -> Result<DistanceDiagram> {
    let (n, a) = (g.n(), g.a());
    if n > usize::MAX as u64 / 2 {
        return Err(Error::ModulusTooLarge(n));
    }
    let h = g.h_powers();
    let mut seen = vec![false; n as usize];
    seen[0] = true;
    let mut covered = 0u64;
    let mut y = Vec::new();
    let mut l = 1u64;
    'rings: while covered < n - 1 {
        for i in (1..=l).rev() {
            let j = l - i;
            let w = (i % n + mul_mod(j % n, a, n)) % n;
            if w == 0 || seen[w as usize] {
                continue;
            }
            for &x in &h {
                let v = mul_mod(w, x, n) as usize;
                if seen[v] {
                    return Err(Error::Invariant(format!(
                        "H-orbit of {w} meets the diagram twice in TL_{n}({a})"
                    )));
                }
                seen[v] = true;
            }
            covered += 6;
            y.push(Cell { i, j, residue: w });
            if covered == n - 1 {
                break 'rings;
            }
        }
        l += 1;
    }
    y.sort_by_key(|c| (c.j, c.i));

    let r = y
        .iter()
        .filter(|c| c.j == 0)
        .map(|c| c.i)
        .max()
        .unwrap_or(0);
    let mut profile = vec![0u64; r as usize + 1];
    for c in &y {
        if c.j > r {
            return Err(Error::Invariant(format!(
                "cell ({}, {}) lies beyond row bound {r}",
                c.i, c.j
            )));
        }
        profile[c.j as usize] = profile[c.j as usize].max(c.i);
    }
    let d = DistanceDiagram {
        n,
        a,
        r,
        profile,
        y,
    };
    d.check()?;
    Ok(d)
}

impl DistanceDiagram {
    /// Structural checks: monotone profile, staircase shape, orbit count.
    fn check(&self) -> Result<()> {
        let p = &self.profile;
        if p[0] != self.r || p.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invariant(format!("profile {p:?} is not monotone")));
        }
        let total: u64 = p.iter().sum();
        if total != (self.n - 1) / 6 || total != self.y.len() as u64 {
            return Err(Error::Invariant(format!(
                "profile {p:?} sums to {total}, expected {}",
                (self.n - 1) / 6
            )));
        }
        // distinct cells inside the staircase, and as many as it holds
        if self.y.iter().any(|c| c.i == 0 || c.i > p[c.j as usize]) {
            return Err(Error::Invariant("sector Y is not a staircase".into()));
        }
        Ok(())
    }

    /// `D = max(i_j + j)`.
    pub fn diameter(&self) -> u64 {
        self.profile
            .iter()
            .enumerate()
            .map(|(j, &i)| i + j as u64)
            .max()
            .unwrap_or(0)
    }

    /// Residues of `Y` in `(j, i)` order.
    pub fn y_residues(&self) -> Vec<u64> {
        self.y.iter().map(|c| c.residue).collect()
    }

    /// Residue at cell `(i, j)` if it belongs to `Y`.
    pub fn cell(&self, i: u64, j: u64) -> Option<&Cell> {
        if i == 0 || j > self.r || i > self.profile[j as usize] {
            return None;
        }
        // rows are contiguous in (j, i) order
        let offset: u64 = self.profile[..j as usize].iter().sum();
        self.y.get((offset + i - 1) as usize)
    }

    /// `n_1, ..., n_D`: number of `Y` cells with `i + j = t`.
    pub fn type_vector(&self) -> Vec<u64> {
        let dmax = self.diameter() as usize;
        let mut out = vec![0u64; dmax];
        for c in &self.y {
            out[(c.i + c.j - 1) as usize] += 1;
        }
        out
    }

    /// `sum_j i_j (i_j + 2j + 1)`.
    pub fn forwarding_index(&self) -> u128 {
        self.profile
            .iter()
            .enumerate()
            .map(|(j, &i)| i as u128 * (i as u128 + 2 * j as u128 + 1))
            .sum()
    }

    /// All of `X` with hexagonal coordinates, sector by sector.
    pub fn hex_cells(&self) -> Vec<HexCell> {
        let g = FrobeniusCirculant::new(self.n, self.a).expect("diagram built from a valid graph");
        let h = g.h_powers();
        (0..6u8)
            .flat_map(|k| {
                self.y.iter().map(move |c| HexCell {
                    i: c.i,
                    j: c.j,
                    k,
                    residue: mul_mod(c.residue, h[k as usize], self.n),
                })
            })
            .collect()
    }
}

/// `n_1, ..., n_D` from the canonical EJ pair, via the closed-form distance
/// distribution divided by six.
pub fn type_vector_closed_form(g: &FrobeniusCirculant) -> Result<Vec<u64>> {
    let alpha = crate::eisenstein::circulant_to_ej(g)?;
    let w = crate::eisenstein::distance_distribution(alpha)?;
    w[1..]
        .iter()
        .map(|&x| {
            if x % 6 == 0 {
                Ok(x / 6)
            } else {
                Err(Error::Invariant(format!(
                    "sphere size {x} of TL_{}({}) is not a multiple of 6",
                    g.n(),
                    g.a()
                )))
            }
        })
        .collect()
}
