//! Circulant graphs `TL_n(a, b, c)` and the first-kind Frobenius family
//! `TL_n(a, a-1, 1)` with `a^2 - a + 1 = 0 (mod n)`.
//!
//! Graphs are stored implicitly as `(n, a)`; neighbours are computed on
//! demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::numtheory::{gcd, mul_mod, MAX_MODULUS};

/// A 6-valent connected circulant `Cay(Z_n, {+-a, +-b, +-c})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circulant {
    n: u64,
    steps: [u64; 3],
}

impl Circulant {
    pub fn new(n: u64, steps: [u64; 3]) -> Result<Self> {
        if n < 7 {
            return Err(Error::OrderTooSmall { got: n, min: 7 });
        }
        if n > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(n));
        }
        let steps = steps.map(|s| s % n);
        let mut set: Vec<u64> = steps.iter().flat_map(|&s| [s, (n - s) % n]).collect();
        set.sort_unstable();
        set.dedup();
        if set.len() != 6 || set[0] == 0 {
            return Err(Error::InvalidCirculant(format!(
                "steps {steps:?} do not give six distinct nonzero differences mod {n}"
            )));
        }
        if gcd(gcd(gcd(steps[0], steps[1]), steps[2]), n) != 1 {
            return Err(Error::InvalidCirculant(format!(
                "steps {steps:?} do not generate Z_{n}"
            )));
        }
        Ok(Circulant { n, steps })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn steps(&self) -> [u64; 3] {
        self.steps
    }

    /// `{+a, -a, +b, -b, +c, -c}` reduced mod `n`.
    pub fn connection_set(&self) -> [u64; 6] {
        let n = self.n;
        let [a, b, c] = self.steps;
        [a, n - a, b, n - b, c, n - c]
    }
}

impl Topology for Circulant {
    fn order(&self) -> usize {
        self.n as usize
    }
    fn neighbors(&self, v: usize) -> [usize; 6] {
        let n = self.n;
        self.connection_set().map(|s| ((v as u64 + s) % n) as usize)
    }
}

/// A 6-valent first-kind Frobenius circulant `TL_n(a, a-1, 1)`.
///
/// The connection set equals the cyclic group `H = <a> = {+-1, +-a, +-a^2}`
/// of order 6 in `Z_n^*`, and `a^2 = a - 1 (mod n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusCirculant {
    n: u64,
    a: u64,
}

impl FrobeniusCirculant {
    /// Validate `(n, a)` and check every structural invariant eagerly.
    pub fn new(n: u64, a: u64) -> Result<Self> {
        if n < 7 {
            return Err(Error::OrderTooSmall { got: n, min: 7 });
        }
        if n > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(n));
        }
        let a = a % n;
        let f = (a as u128 * a as u128 + 1 - a as u128) % n as u128;
        if f != 0 {
            return Err(Error::NotASolution { n, a });
        }
        if n % 6 != 1 {
            return Err(Error::InvalidCirculant(format!("order {n} is not 1 mod 6")));
        }
        let g = FrobeniusCirculant { n, a };
        let h = g.h_powers();
        // H is closed under multiplication by a and has six distinct elements
        let mut sorted = h;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || mul_mod(h[5], a, n) != 1 {
            return Err(Error::Invariant(format!(
                "<{a}> mod {n} does not have order 6"
            )));
        }
        // semiregularity: h - 1 is a unit for every h != 1
        if let Some(&bad) = h[1..].iter().find(|&&x| gcd(x + n - 1, n) != 1) {
            return Err(Error::InvalidCirculant(format!(
                "H is not semiregular on Z_{n} \\ {{0}}: gcd({bad} - 1, {n}) != 1"
            )));
        }
        Ok(g)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    /// `[a^0, a^1, ..., a^5] = [1, a, a-1, -1, -a, 1-a]`.
    pub fn h_powers(&self) -> [u64; 6] {
        let (n, a) = (self.n, self.a);
        let a2 = (a + n - 1) % n;
        [1, a, a2, n - 1, n - a, (n - a2) % n]
    }

    /// The connection set `S = H`, sorted.
    pub fn connection_set(&self) -> [u64; 6] {
        let mut s = self.h_powers();
        s.sort_unstable();
        s
    }

    pub fn as_circulant(&self) -> Circulant {
        Circulant {
            n: self.n,
            steps: [self.a, (self.a + self.n - 1) % self.n, 1],
        }
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbor_list(&self, v: u64) -> Result<[u64; 6]> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { v, n: self.n });
        }
        let mut out = self.h_powers().map(|s| (v + s) % self.n);
        out.sort_unstable();
        Ok(out)
    }

    /// The `H`-orbit `{x h : h in H}` of a nonzero residue, sorted.
    pub fn h_orbit(&self, x: u64) -> Result<[u64; 6]> {
        if x == 0 || x >= self.n {
            return Err(Error::InvalidInput(format!(
                "orbit representative must lie in [1, {}), got {x}",
                self.n
            )));
        }
        let mut out = self.h_powers().map(|h| mul_mod(x, h, self.n));
        out.sort_unstable();
        Ok(out)
    }

    /// Upper bound on the diameter: `ceil((1 + sqrt(12n - 3)) / 3)`.
    pub fn diameter_upper_bound(&self) -> u64 {
        let disc = 12 * self.n as u128 - 3;
        let mut s = (disc as f64).sqrt() as u128;
        while s * s > disc {
            s -= 1;
        }
        while (s + 1) * (s + 1) <= disc {
            s += 1;
        }
        // ceil((1 + sqrt)/3) >= ceil((1 + floor sqrt)/3); add one when sqrt is irrational
        let exact = s * s == disc;
        let num = 1 + s + u128::from(!exact);
        num.div_ceil(3) as u64
    }

    /// Graph distance from 0 to `u` via the hexagonal-lattice formula
    /// `min { i + j : u = (i + j a) a^k (mod n), i, j >= 0 }`.
    pub fn distance_closed_form(&self, u: u64) -> Result<u64> {
        self.distance_closed_form_bounded(u, self.diameter_upper_bound())
    }

    /// As [`Self::distance_closed_form`] with an explicit search bound on `i + j`.
    pub fn distance_closed_form_bounded(&self, u: u64, bound: u64) -> Result<u64> {
        let (n, a) = (self.n, self.a);
        if u >= n {
            return Err(Error::VertexOutOfRange { v: u, n });
        }
        if u == 0 {
            return Ok(0);
        }
        let h = self.h_powers();
        let mut best = u64::MAX;
        for k in 0..6 {
            // u a^{-k} = u a^{6-k}
            let w = mul_mod(u, h[(6 - k) % 6], n);
            for j in 0..=bound.min(best) {
                let i = (w + n - mul_mod(j, a, n)) % n;
                best = best.min(i + j);
            }
        }
        if best > bound {
            return Err(Error::Invariant(format!(
                "no lattice representative of {u} within distance {bound} in TL_{n}({a})"
            )));
        }
        Ok(best)
    }

    /// Whether multiplication by `m` fixes `S` and permutes it as one 6-cycle.
    pub fn is_complete_rotation(&self, m: u64) -> Result<bool> {
        let n = self.n;
        let m = m % n;
        if gcd(m, n) != 1 {
            return Err(Error::NotAUnit { m, n });
        }
        let s = self.connection_set();
        let mut image = s.map(|x| mul_mod(x, m, n));
        image.sort_unstable();
        if image != s {
            return Ok(false);
        }
        let mut x = 1u64;
        for step in 1..=6 {
            x = mul_mod(x, m, n);
            if x == 1 {
                return Ok(step == 6);
            }
        }
        Ok(false)
    }

    /// Three edge-disjoint Hamilton cycles, stepping by `1`, `a` and `a - 1`.
    pub fn hamilton_decomposition(&self) -> [Vec<u64>; 3] {
        let n = self.n;
        let steps = [1, self.a, (self.a + n - 1) % n];
        steps.map(|s| {
            let mut cycle = Vec::with_capacity(n as usize);
            let mut v = 0u64;
            for _ in 0..n {
                cycle.push(v);
                v = (v + s) % n;
            }
            cycle
        })
    }

    /// `min(a, -a^2 mod n)`: one representative per isomorphism class.
    pub fn canonical_generator(&self) -> u64 {
        let n = self.n;
        let minus_a2 = (n - mul_mod(self.a, self.a, n)) % n;
        self.a.min(minus_a2)
    }

    /// The same graph, relabelled with its canonical generator.
    pub fn canonical(&self) -> Self {
        FrobeniusCirculant {
            n: self.n,
            a: self.canonical_generator(),
        }
    }
}

impl Topology for FrobeniusCirculant {
    fn order(&self) -> usize {
        self.n as usize
    }
    fn neighbors(&self, v: usize) -> [usize; 6] {
        let n = self.n;
        self.h_powers().map(|s| ((v as u64 + s) % n) as usize)
    }
}

/// `min(a, -a^2 mod n)` for a validated root `a`.
pub fn canonical_generator(n: u64, a: u64) -> Result<u64> {
    Ok(FrobeniusCirculant::new(n, a)?.canonical_generator())
}

/// Every constructible Frobenius circulant of order `n`, one per generator
/// root (so each isomorphism class appears twice, as `a` and `-a^2`).
pub fn all_generators(n: u64) -> Result<Vec<FrobeniusCirculant>> {
    if n < 7 || n % 6 != 1 {
        return Ok(Vec::new());
    }
    crate::numtheory::solve_frobenius_eq(n)?
        .into_iter()
        .map(|a| FrobeniusCirculant::new(n, a))
        .collect()
}

/// One graph per isomorphism class of order `n`, with canonical generators.
pub fn isomorphism_classes(n: u64) -> Result<Vec<FrobeniusCirculant>> {
    let mut out: Vec<FrobeniusCirculant> = all_generators(n)?
        .into_iter()
        .filter(|g| g.canonical_generator() == g.a())
        .collect();
    out.sort_by_key(|g| g.a());
    Ok(out)
}
