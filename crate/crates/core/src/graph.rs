//! The 6-regular graph interface shared by circulants and EJ graphs, plus
//! BFS oracles and DOT / edge-list export.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the order of graphs whose adjacency is materialized.
pub const MATERIALIZE_BOUND: usize = 1_000_000;

/// A finite 6-regular graph on vertices `0..order()`.
pub trait Topology {
    fn order(&self) -> usize;

    /// The six neighbours of `v`, in a fixed per-graph direction order.
    fn neighbors(&self, v: usize) -> [usize; 6];

    fn label(&self, v: usize) -> String {
        v.to_string()
    }

    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).contains(&v)
    }
}

impl<T: Topology + ?Sized> Topology for &T {
    fn order(&self) -> usize {
        (**self).order()
    }
    fn neighbors(&self, v: usize) -> [usize; 6] {
        (**self).neighbors(v)
    }
    fn label(&self, v: usize) -> String {
        (**self).label(v)
    }
}

/// An ordered pair of adjacent vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub fn new(tail: usize, head: usize) -> Self {
        Arc { tail, head }
    }
}

/// Exact distances from `source`; `u32::MAX` marks unreachable vertices.
pub fn bfs_distances<G: Topology + ?Sized>(g: &G, source: usize) -> Vec<u32> {
    let n = g.order();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        for w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Multi-source BFS from every vertex flagged in `sources`.
pub fn bfs_from_set<G: Topology + ?Sized>(
    g: &G,
    sources: impl IntoIterator<Item = usize>,
) -> Vec<u32> {
    let n = g.order();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        for w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Counts `W_t` of vertices at each distance `t` from `source`.
pub fn distance_profile<G: Topology + ?Sized>(g: &G, source: usize) -> Vec<u64> {
    let dist = bfs_distances(g, source);
    let max = dist
        .iter()
        .copied()
        .filter(|&d| d != u32::MAX)
        .max()
        .unwrap_or(0);
    let mut counts = vec![0u64; max as usize + 1];
    for d in dist.into_iter().filter(|&d| d != u32::MAX) {
        counts[d as usize] += 1;
    }
    counts
}

/// Adjacency materialized into a table; used where repeated lookups dominate.
#[derive(Debug, Clone)]
pub struct Materialized {
    adj: Vec<[u32; 6]>,
}

impl Materialized {
    pub fn new<G: Topology + ?Sized>(g: &G) -> Result<Self> {
        let n = g.order();
        if n > MATERIALIZE_BOUND {
            return Err(Error::BoundExceeded {
                n: n as u64,
                bound: MATERIALIZE_BOUND as u64,
            });
        }
        let adj = (0..n).map(|v| g.neighbors(v).map(|w| w as u32)).collect();
        Ok(Materialized { adj })
    }

    /// Position of `head` in the neighbour list of `tail`.
    #[inline]
    pub fn direction(&self, tail: usize, head: usize) -> Option<usize> {
        self.adj[tail].iter().position(|&w| w as usize == head)
    }
}

impl Topology for Materialized {
    fn order(&self) -> usize {
        self.adj.len()
    }
    fn neighbors(&self, v: usize) -> [usize; 6] {
        self.adj[v].map(|w| w as usize)
    }
}

/// Unordered edges `{u, v}` with `u < v` in index order.
pub fn edges<G: Topology + ?Sized>(g: &G) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(3 * g.order());
    for u in 0..g.order() {
        for v in g.neighbors(u) {
            if u < v {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn to_dot<G: Topology + ?Sized>(g: &G, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph \"{name}\" {{");
    for (u, v) in edges(g) {
        let _ = writeln!(s, "  \"{}\" -- \"{}\";", g.label(u), g.label(v));
    }
    s.push_str("}\n");
    s
}

pub fn to_edge_list<G: Topology + ?Sized>(g: &G) -> String {
    let mut s = String::new();
    for (u, v) in edges(g) {
        let _ = writeln!(s, "{} {}", g.label(u), g.label(v));
    }
    s
}
