//! Shortest-path spanning tree rooted at 0 and the routing it induces.

use serde::{Deserialize, Serialize};

use super::diagram::DistanceDiagram;
use crate::circulant::FrobeniusCirculant;
use crate::error::{Error, Result};
use crate::graph::Arc;
use crate::numtheory::mul_mod;

/// The six arcs `(u a^k, v a^k)` added for one `Y` cell `v` with tree parent `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcGroup {
    /// Distance of `head` from 0.
    pub phase: u64,
    pub i: u64,
    pub j: u64,
    pub tail: u64,
    pub head: u64,
}

impl ArcGroup {
    /// The arcs for origin 0, `k = 0..5`.
    pub fn arcs(&self, h: &[u64; 6], n: u64) -> [Arc; 6] {
        std::array::from_fn(|k| {
            Arc::new(
                mul_mod(self.tail, h[k], n) as usize,
                mul_mod(self.head, h[k], n) as usize,
            )
        })
    }
}

#[derive(Debug, Clone)]
pub struct SpanningTree {
    n: u64,
    h: [u64; 6],
    parent: Vec<u32>,
    level: Vec<u32>,
    groups: Vec<ArcGroup>,
}

/// Choose a parent for every `Y` cell and rotate the choice into all six
/// sectors.
///
/// Cell `(i, j)` takes the first of `(i-1, j)` (when `i >= 2`), `(i, j-1)`,
/// `(i+1, j-1)` that lies in `Y`; cell `(1, 0)` hangs off the root.
pub fn build_spanning_tree(g: &FrobeniusCirculant, d: &DistanceDiagram) -> Result<SpanningTree> {
    let n = g.n();
    if d.n != n || d.a != g.a() {
        return Err(Error::InvalidInput(
            "diagram belongs to a different graph".into(),
        ));
    }
    if n > u32::MAX as u64 {
        return Err(Error::ModulusTooLarge(n));
    }
    let h = g.h_powers();
    let mut parent = vec![u32::MAX; n as usize];
    let mut level = vec![u32::MAX; n as usize];
    parent[0] = 0;
    level[0] = 0;
    let mut groups = Vec::with_capacity(d.y.len());
    for c in &d.y {
        let tail = if (c.i, c.j) == (1, 0) {
            0
        } else {
            let candidates = [
                (c.i >= 2).then(|| d.cell(c.i - 1, c.j)).flatten(),
                (c.j >= 1).then(|| d.cell(c.i, c.j - 1)).flatten(),
                (c.j >= 1).then(|| d.cell(c.i + 1, c.j - 1)).flatten(),
            ];
            candidates
                .into_iter()
                .flatten()
                .next()
                .ok_or_else(|| {
                    Error::Invariant(format!("cell ({}, {}) has no parent in Y", c.i, c.j))
                })?
                .residue
        };
        for &x in &h {
            let v = mul_mod(c.residue, x, n) as usize;
            parent[v] = mul_mod(tail, x, n) as u32;
            level[v] = (c.i + c.j) as u32;
        }
        groups.push(ArcGroup {
            phase: c.i + c.j,
            i: c.i,
            j: c.j,
            tail,
            head: c.residue,
        });
    }
    if level.contains(&u32::MAX) {
        return Err(Error::Invariant(
            "spanning tree does not reach every vertex".into(),
        ));
    }
    groups.sort_by_key(|g| (g.phase, g.j, g.i));
    Ok(SpanningTree {
        n,
        h,
        parent,
        level,
        groups,
    })
}

impl SpanningTree {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h_powers(&self) -> [u64; 6] {
        self.h
    }

    /// Parent of `v`; the root is its own parent.
    pub fn parent(&self, v: u64) -> u64 {
        self.parent[v as usize] as u64
    }

    pub fn level(&self, v: u64) -> u64 {
        self.level[v as usize] as u64
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    /// Arc groups in schedule order: by phase, then `(j, i)`.
    pub fn groups(&self) -> &[ArcGroup] {
        &self.groups
    }

    /// Tree path `0 -> v`.
    pub fn path_from_root(&self, v: u64) -> Vec<u64> {
        let mut path = vec![v];
        let mut x = v;
        while x != 0 {
            x = self.parent(x);
            path.push(x);
        }
        path.reverse();
        path
    }

    /// Number of vertices in the subtree below each vertex, itself included.
    pub fn subtree_sizes(&self) -> Vec<u64> {
        let n = self.n as usize;
        let maxl = *self.level.iter().max().unwrap_or(&0) as usize;
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); maxl + 1];
        for v in 0..n {
            by_level[self.level[v] as usize].push(v);
        }
        let mut size = vec![1u64; n];
        for l in (1..=maxl).rev() {
            for &v in &by_level[l] {
                let p = self.parent[v] as usize;
                size[p] += size[v];
            }
        }
        size
    }
}

/// Loads induced by routing every ordered pair along translated tree paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcLoads {
    /// Load on each arc `(x, x + s)`, indexed like the connection set
    /// `1, a, a^2, -1, -a, -a^2`; independent of `x`.
    pub per_direction: [u64; 6],
    pub arc_uniform: bool,
    pub edge_uniform: bool,
    /// Maximum arc load.
    pub arc_load: u64,
    /// Maximum edge load, both directions counted.
    pub edge_load: u64,
}

/// The routing `P_uv = u + (tree path 0 -> v - u)`.
#[derive(Debug, Clone)]
pub struct RoutingTable {
    tree: SpanningTree,
}

impl RoutingTable {
    pub fn new(tree: SpanningTree) -> Self {
        RoutingTable { tree }
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn path(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        let n = self.tree.n;
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { v: x, n });
            }
        }
        let z = (v + n - u) % n;
        Ok(self
            .tree
            .path_from_root(z)
            .into_iter()
            .map(|x| (x + u) % n)
            .collect())
    }

    fn direction(&self, s: u64) -> usize {
        self.tree
            .h
            .iter()
            .position(|&x| x == s)
            .expect("tree arcs follow connection-set directions")
    }

    /// Loads from subtree sizes.
    ///
    /// The arc `(x, x + s)` lies on `P_{u, u+w}` exactly when the tree arc
    /// `(x - u, x - u + s)` lies on the root path of `w`. Summing over `u`
    /// gives `load(x, x + s) = sum of subtree sizes of tree vertices z with
    /// z - parent(z) = s`, the same for every `x`.
    pub fn arc_loads(&self) -> ArcLoads {
        let n = self.tree.n;
        let size = self.tree.subtree_sizes();
        let mut per = [0u64; 6];
        for z in 1..n {
            let s = (z + n - self.tree.parent(z)) % n;
            per[self.direction(s)] += size[z as usize];
        }
        Self::summarize(per, true)
    }

    /// Loads by walking all `n (n - 1)` paths; a quadratic oracle for the
    /// subtree computation.
    pub fn arc_loads_enumerated(&self, bound: u64) -> Result<(Vec<[u64; 6]>, ArcLoads)> {
        let n = self.tree.n;
        if n > bound {
            return Err(Error::BoundExceeded { n, bound });
        }
        let mut load = vec![[0u64; 6]; n as usize];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let p = self.path(u, v)?;
                for w in p.windows(2) {
                    let s = (w[1] + n - w[0]) % n;
                    load[w[0] as usize][self.direction(s)] += 1;
                }
            }
        }
        let first = load[0];
        let same = load.iter().all(|l| *l == first);
        Ok((load.clone(), Self::summarize(first, same)))
    }

    fn summarize(per: [u64; 6], translation_invariant: bool) -> ArcLoads {
        // direction k and k + 3 are opposite
        let edge: Vec<u64> = (0..3).map(|k| per[k] + per[k + 3]).collect();
        ArcLoads {
            per_direction: per,
            arc_uniform: translation_invariant && per.iter().all(|&x| x == per[0]),
            edge_uniform: translation_invariant && edge.iter().all(|&x| x == edge[0]),
            arc_load: *per.iter().max().unwrap(),
            edge_load: *edge.iter().max().unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::all_generators;
    use crate::graph::{bfs_distances, Topology};
    use crate::scheduler::diagram::build_diagram;

    fn tree(n: u64, a: u64) -> SpanningTree {
        let g = FrobeniusCirculant::new(n, a).unwrap();
        let d = build_diagram(&g).unwrap();
        build_spanning_tree(&g, &d).unwrap()
    }

    #[test]
    fn examples() {
        let t = tree(49, 31);
        assert_eq!(t.parent(34), 33);
        assert_eq!(t.parent(1), 0);
        assert_eq!(t.groups().len(), 8);
        let t7 = tree(7, 3);
        assert!((1..7).all(|v| t7.parent(v) == 0));
        let rt = RoutingTable::new(tree(49, 31));
        assert_eq!(rt.path(0, 1).unwrap(), vec![0, 1]);
        assert_eq!(rt.path(5, 39).unwrap().len(), 5);
    }

    #[test]
    fn groups_are_rotation_matchings() {
        for (n, a) in [(49, 31), (91, 17), (91, 10), (343, 325), (403, 94)] {
            let Ok(g) = FrobeniusCirculant::new(n, a) else {
                continue;
            };
            let d = build_diagram(&g).unwrap();
            let t = build_spanning_tree(&g, &d).unwrap();
            for grp in t.groups() {
                let arcs = grp.arcs(&g.h_powers(), n);
                let mut ends: Vec<usize> = arcs.iter().flat_map(|a| [a.tail, a.head]).collect();
                ends.sort_unstable();
                ends.dedup();
                if grp.phase >= 2 {
                    assert_eq!(ends.len(), 12, "group {grp:?} is not a matching");
                }
                for arc in arcs {
                    assert_eq!(t.level(arc.head as u64), t.level(arc.tail as u64) + 1);
                }
            }
        }
    }

    #[test]
    fn depth_is_distance() {
        for n in (7..=2500).step_by(6) {
            for g in all_generators(n).unwrap() {
                let d = build_diagram(&g).unwrap();
                let t = build_spanning_tree(&g, &d).unwrap();
                let dist = bfs_distances(&g, 0);
                for v in 0..n {
                    assert_eq!(t.level(v), dist[v as usize] as u64);
                    if v > 0 {
                        assert!(g.is_adjacent(v as usize, t.parent(v) as usize));
                    }
                }
            }
        }
    }

    #[test]
    fn loads_match_enumeration() {
        for (n, a) in [(7, 3), (13, 4), (49, 31), (91, 17), (91, 10), (133, 31)] {
            let rt = RoutingTable::new(tree(n, a));
            let fast = rt.arc_loads();
            let (_, slow) = rt.arc_loads_enumerated(1000).unwrap();
            assert_eq!(fast, slow);
            assert!(fast.arc_uniform && fast.edge_uniform);
        }
        let l = RoutingTable::new(tree(49, 31)).arc_loads();
        assert_eq!((l.arc_load, l.edge_load), (22, 44));
    }
}
