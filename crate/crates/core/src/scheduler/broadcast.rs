//! One-to-all broadcasting in the single-port model: the constructive scheme
//! with horizon `D + 2` or `D + 3`, and an exact branch-and-bound search for
//! small orders.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::diagram::DistanceDiagram;
use crate::circulant::FrobeniusCirculant;
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Topology};
use crate::numtheory::mul_mod;
use crate::simulator::run_broadcast;

/// Largest order for which [`broadcast_time`] runs the exact search.
pub const EXACT_SEARCH_BOUND: u64 = 200;
/// Default cap on search nodes before the search reports `Unknown`.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

/// `vertex` receives the message at `time` from `sender`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastEntry {
    pub vertex: u64,
    pub time: u64,
    pub sender: u64,
}

/// A broadcast schedule; serializes as the bare array of entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<BroadcastEntry>", into = "Vec<BroadcastEntry>")]
pub struct BroadcastSchedule {
    entries: Vec<BroadcastEntry>,
    source: u64,
    horizon: u64,
}

impl From<Vec<BroadcastEntry>> for BroadcastSchedule {
    fn from(mut entries: Vec<BroadcastEntry>) -> Self {
        entries.sort_by_key(|e| (e.time, e.vertex));
        let horizon = entries.last().map_or(0, |e| e.time);
        let source = entries.first().map_or(0, |e| e.sender);
        BroadcastSchedule {
            entries,
            source,
            horizon,
        }
    }
}

impl From<BroadcastSchedule> for Vec<BroadcastEntry> {
    fn from(s: BroadcastSchedule) -> Self {
        s.entries
    }
}

impl BroadcastSchedule {
    pub fn entries(&self) -> &[BroadcastEntry] {
        &self.entries
    }

    pub fn source(&self) -> u64 {
        self.source
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// The same schedule started from `source` instead of 0.
    pub fn translate(&self, source: u64, n: u64) -> Self {
        let shift = |x: u64| (x + source) % n;
        let entries = self
            .entries
            .iter()
            .map(|e| BroadcastEntry {
                vertex: shift(e.vertex),
                time: e.time,
                sender: shift(e.sender),
            })
            .collect();
        BroadcastSchedule {
            entries,
            source: shift(self.source),
            horizon: self.horizon,
        }
    }
}

/// The explicit scheme from source 0, validated before it is returned.
pub fn broadcast_schedule(
    g: &FrobeniusCirculant,
    d: &DistanceDiagram,
) -> Result<BroadcastSchedule> {
    let n = g.n();
    if d.n != n || d.a != g.a() {
        return Err(Error::InvalidInput(
            "diagram belongs to a different graph".into(),
        ));
    }
    let h = g.h_powers();
    let r = d.r;
    let mut entries = vec![
        (h[0], 1, 0),
        (h[1], 2, h[0]),
        (h[3], 2, 0),
        (h[2], 3, h[1]),
        (h[4], 3, h[3]),
        (h[5], 3, 0),
    ];
    let res = |i: u64, j: u64| d.cell(i, j).map(|c| c.residue);
    for c in &d.y {
        let (i, j) = (c.i, c.j);
        let (time, sender) = if j == 0 {
            if i == 1 {
                continue;
            }
            (i + 2, res(i - 1, 0))
        } else if i < r {
            (i + j + 3, res(i, j - 1))
        } else {
            (r + j + 2, res(r, j - 1))
        };
        let sender = sender
            .ok_or_else(|| Error::Invariant(format!("cell ({i}, {j}) has no predecessor in Y")))?;
        for &x in &h {
            entries.push((mul_mod(c.residue, x, n), time, mul_mod(sender, x, n)));
        }
    }
    let schedule = BroadcastSchedule::from(
        entries
            .into_iter()
            .map(|(vertex, time, sender)| BroadcastEntry {
                vertex,
                time,
                sender,
            })
            .collect::<Vec<_>>(),
    );
    let report = run_broadcast(g, &schedule, 0);
    if !report.valid {
        return Err(Error::Invariant(format!(
            "broadcast scheme for TL_{n}({}) is invalid: {:?}",
            g.a(),
            report.violations
        )));
    }
    Ok(schedule)
}

/// Outcome of the exact search for one horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(BroadcastSchedule),
    Infeasible,
    /// The node budget ran out.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BroadcastStatus {
    /// `exact` holds the broadcast time, certified by search.
    Exact,
    /// Only the bracket `[lower, scheme_horizon]` is known.
    Bracket,
}

#[derive(Debug, Clone, Serialize)]
pub struct BroadcastTime {
    pub diameter: u64,
    pub lower: u64,
    pub scheme_horizon: u64,
    pub exact: Option<u64>,
    pub status: BroadcastStatus,
    pub search_nodes: u64,
    /// A schedule beating the constructive scheme, when the search finds one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<BroadcastSchedule>,
}

impl BroadcastTime {
    /// The best known value: exact if certified, else the scheme horizon.
    pub fn value(&self) -> u64 {
        self.exact.unwrap_or(self.scheme_horizon)
    }
}

/// Broadcast time from the scheme, certified by exact search when
/// `n <= bound`.
pub fn broadcast_time(
    g: &FrobeniusCirculant,
    d: &DistanceDiagram,
    bound: u64,
    budget: u64,
) -> Result<BroadcastTime> {
    let diameter = d.diameter();
    let scheme = broadcast_schedule(g, d)?;
    let horizon = scheme.horizon();
    if horizon != diameter + 2 && horizon != diameter + 3 {
        return Err(Error::Invariant(format!(
            "scheme horizon {horizon} outside [D+2, D+3] for D = {diameter}"
        )));
    }
    let mut out = BroadcastTime {
        diameter,
        lower: diameter + 2,
        scheme_horizon: horizon,
        exact: None,
        status: BroadcastStatus::Bracket,
        search_nodes: 0,
        certificate: None,
    };
    if g.n() > bound || g.n() > 256 {
        return Ok(out);
    }
    // Decide whether one step less than the scheme is possible.
    let (verdict, nodes) = broadcast_feasible(g, horizon - 1, budget)?;
    out.search_nodes = nodes;
    match verdict {
        Feasibility::Unknown => {}
        Feasibility::Infeasible => {
            out.exact = Some(horizon);
            out.status = BroadcastStatus::Exact;
        }
        Feasibility::Feasible(s) => {
            if horizon - 1 < diameter + 2 {
                return Err(Error::Invariant(format!(
                    "search broadcasts in {} < D + 2 steps",
                    horizon - 1
                )));
            }
            // horizon - 1 = D + 2 is the lower bound, so it is exact
            out.exact = Some(horizon - 1);
            out.status = BroadcastStatus::Exact;
            out.certificate = Some(s);
        }
    }
    Ok(out)
}

type Set = [u64; 4];

#[inline]
fn has(s: &Set, v: usize) -> bool {
    s[v >> 6] >> (v & 63) & 1 == 1
}

#[inline]
fn put(s: &mut Set, v: usize) {
    s[v >> 6] |= 1 << (v & 63);
}

fn members(s: &Set) -> impl Iterator<Item = usize> + '_ {
    s.iter().enumerate().flat_map(|(w, &bits)| {
        let mut b = bits;
        std::iter::from_fn(move || {
            if b == 0 {
                return None;
            }
            let t = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(w * 64 + t)
        })
    })
}

/// Can a message from vertex 0 reach every vertex within `horizon` steps?
///
/// Depth-first search over informed sets, one level per step. Each level
/// branches over the maximal receiver sets of one step, which dominate all
/// others since informing more vertices never hurts. A node is cut when
/// - the informed count cannot double up to `n` in the remaining steps,
///   with every idle sender costing half of its remaining potential,
/// - some vertex is farther than the remaining steps from the informed set,
/// - the outer distance shells do not fit the per-source slot counts (an
///   informed vertex completes at most `C(rem, m)` vertices after exactly
///   `m` hops, so it feeds at most one vertex at the full remaining
///   distance), or
/// - the set, up to the rotations `x -> x a^k` fixing 0, already failed.
pub fn broadcast_feasible(
    g: &FrobeniusCirculant,
    horizon: u64,
    budget: u64,
) -> Result<(Feasibility, u64)> {
    let n = g.n() as usize;
    if n > 256 {
        return Err(Error::BoundExceeded {
            n: n as u64,
            bound: 256,
        });
    }
    let adj: Vec<[u16; 6]> = (0..n).map(|v| g.neighbors(v).map(|w| w as u16)).collect();
    let dist: Vec<Vec<u8>> = (0..n)
        .map(|v| bfs_distances(g, v).into_iter().map(|d| d as u8).collect())
        .collect();
    let h = g.h_powers();
    let rots: Vec<Vec<u16>> = h
        .iter()
        .map(|&x| {
            (0..n as u64)
                .map(|v| mul_mod(v, x, n as u64) as u16)
                .collect()
        })
        .collect();
    let mut search = Search {
        n,
        adj,
        dist,
        rots,
        horizon: horizon as u32,
        failed: HashSet::new(),
        nodes: 0,
        budget,
        trail: Vec::new(),
    };
    let mut start = [0u64; 4];
    put(&mut start, 0);
    let verdict = match search.solve(start, 1, 0) {
        None => Feasibility::Unknown,
        Some(false) => Feasibility::Infeasible,
        Some(true) => {
            let entries: Vec<BroadcastEntry> = search
                .trail
                .iter()
                .rev()
                .flat_map(|(t, pairs)| {
                    pairs.iter().map(move |&(s, v)| BroadcastEntry {
                        vertex: v as u64,
                        time: *t as u64,
                        sender: s as u64,
                    })
                })
                .collect();
            let schedule = BroadcastSchedule::from(entries);
            let report = run_broadcast(g, &schedule, 0);
            if !report.valid {
                return Err(Error::Invariant(format!(
                    "search certificate is invalid: {:?}",
                    report.violations
                )));
            }
            Feasibility::Feasible(schedule)
        }
    };
    Ok((verdict, search.nodes))
}

struct Search {
    n: usize,
    adj: Vec<[u16; 6]>,
    dist: Vec<Vec<u8>>,
    rots: Vec<Vec<u16>>,
    horizon: u32,
    failed: HashSet<(u32, Set)>,
    /// Search nodes plus enumeration leaves.
    nodes: u64,
    budget: u64,
    /// Sender/receiver pairs per step of a successful branch, deepest first.
    trail: Vec<(u32, Vec<(usize, usize)>)>,
}

/// Shells checked by the slot relaxation below the outermost one.
const SHELL_DEPTH: u32 = 2;

struct Slots<'a> {
    sources: &'a [usize],
    outer: &'a [(usize, u32)],
    rem: u32,
    lo: u32,
    levels: usize,
    caps: &'a [usize],
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Per-node data for enumerating one step's receiver sets.
struct Step {
    informed: Set,
    count: usize,
    t: u32,
    /// Uninformed vertices next to the informed set, most promising first.
    cands: Vec<usize>,
    /// For each far vertex, the receivers that keep it in reach.
    far_targets: Vec<Set>,
    /// Far vertices whose last feeding candidate has index `i`.
    deadline: Vec<Vec<usize>>,
    /// Size of every maximal receiver set.
    rank: usize,
}

const NO_OWNER: u16 = u16::MAX;

impl Search {
    fn canonical(&self, s: &Set) -> Set {
        let mut best = *s;
        for rot in &self.rots[1..] {
            let mut t = [0u64; 4];
            for v in members(s) {
                put(&mut t, rot[v] as usize);
            }
            best = best.min(t);
        }
        best
    }

    /// Kuhn matching of `left` into `right` along `ok(l, r)`; returns the
    /// pairs `(right, left)` if every left vertex is matched.
    fn perfect_matching(
        &self,
        left: &[usize],
        right: &[usize],
        ok: impl Fn(usize, usize) -> bool,
    ) -> Option<Vec<(usize, usize)>> {
        if left.len() > right.len() {
            return None;
        }
        let mut owner: Vec<Option<usize>> = vec![None; right.len()];
        fn augment(
            l: usize,
            left: &[usize],
            right: &[usize],
            ok: &dyn Fn(usize, usize) -> bool,
            owner: &mut [Option<usize>],
            seen: &mut [bool],
        ) -> bool {
            for ri in 0..right.len() {
                if seen[ri] || !ok(left[l], right[ri]) {
                    continue;
                }
                seen[ri] = true;
                if owner[ri].is_none_or(|o| augment(o, left, right, ok, owner, seen)) {
                    owner[ri] = Some(l);
                    return true;
                }
            }
            false
        }
        for l in 0..left.len() {
            let mut seen = vec![false; right.len()];
            if !augment(l, left, right, &ok, &mut owner, &mut seen) {
                return None;
            }
        }
        Some(
            owner
                .iter()
                .enumerate()
                .filter_map(|(ri, o)| o.map(|l| (right[ri], left[l])))
                .collect(),
        )
    }

    fn solve(&mut self, informed: Set, count: usize, t: u32) -> Option<bool> {
        if count == self.n {
            return Some(true);
        }
        let rem = self.horizon.saturating_sub(t);
        if rem == 0 || rem < 64 && (count as u128) << rem < self.n as u128 {
            return Some(false);
        }
        let key = (t, self.canonical(&informed));
        if self.failed.contains(&key) {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }

        let sources: Vec<usize> = members(&informed).collect();
        let mut far = Vec::new();
        let mut spread = Vec::new();
        for v in 0..self.n {
            if has(&informed, v) {
                continue;
            }
            let d = sources.iter().map(|&s| self.dist[s][v]).min().unwrap() as u32;
            if d > rem {
                self.failed.insert(key);
                return Some(false);
            }
            if d == rem {
                far.push(v);
            }
            spread.push((v, d));
        }
        let chains = self.perfect_matching(&far, &sources, |v, s| self.dist[s][v] as u32 == rem);
        let Some(chains) = chains else {
            self.failed.insert(key);
            return Some(false);
        };
        if rem == 1 {
            // every uninformed vertex is adjacent and matched to a sender
            self.trail.push((t + 1, chains));
            return Some(true);
        }
        let depth = SHELL_DEPTH.min(rem - 1);
        spread.retain(|&(_, d)| d + depth >= rem);
        if !self.shells_fit(&sources, &spread, rem, depth) {
            self.failed.insert(key);
            return Some(false);
        }

        // the informed set can at most double in each remaining step
        let need = if rem > 40 {
            0
        } else {
            self.n.div_ceil(1 << (rem - 1)).saturating_sub(count)
        };
        let free_degree = |w: usize| {
            self.adj[w]
                .iter()
                .filter(|&&x| !has(&informed, x as usize))
                .count()
        };
        let mut cands: Vec<usize> = (0..self.n)
            .filter(|&v| {
                !has(&informed, v) && self.adj[v].iter().any(|&w| has(&informed, w as usize))
            })
            .collect();
        if cands.len().min(count) < need {
            self.failed.insert(key);
            return Some(false);
        }
        let far_targets: Vec<Set> = far
            .iter()
            .map(|&v| {
                let mut set = [0u64; 4];
                for &w in &cands {
                    if self.dist[w][v] as u32 == rem - 1 {
                        put(&mut set, w);
                    }
                }
                set
            })
            .collect();
        let feeds_far = |w: usize| far_targets.iter().any(|ft| has(ft, w));
        cands.sort_by_key(|&w| (!feeds_far(w), std::cmp::Reverse(free_degree(w)), w));
        let mut deadline = vec![Vec::new(); cands.len()];
        for (fi, ft) in far_targets.iter().enumerate() {
            match (0..cands.len()).rev().find(|&i| has(ft, cands[i])) {
                Some(i) => deadline[i].push(fi),
                None => {
                    self.failed.insert(key);
                    return Some(false);
                }
            }
        }

        let owner = vec![NO_OWNER; self.n];
        let rank = self.extend_rank(&informed, &cands, &owner);
        if rank < need {
            self.failed.insert(key);
            return Some(false);
        }
        let step = Step {
            informed,
            count,
            t,
            cands,
            far_targets,
            deadline,
            rank,
        };
        let mut chosen = Vec::with_capacity(step.cands.len());
        let res = self.enumerate(&step, 0, [0; 4], &mut chosen, owner);
        if res == Some(false) {
            self.failed.insert(key);
        }
        res
    }

    /// Within `rem` steps a source completes at most `C(rem, m)` vertices
    /// after exactly `m` hops, and a vertex at distance `d` from it needs
    /// `m >= d`. Checks that the vertices at least `rem - depth` away from
    /// the informed set can be given such slots, one vertex per slot.
    fn shells_fit(&self, sources: &[usize], outer: &[(usize, u32)], rem: u32, depth: u32) -> bool {
        let lo = rem - depth;
        let levels = depth as usize + 1;
        let caps: Vec<usize> = (lo..=rem)
            .map(|m| binomial(rem, m).min(self.n as u64) as usize)
            .collect();
        let mut load: Vec<Vec<usize>> = vec![Vec::new(); sources.len() * levels];
        let ctx = Slots {
            sources,
            outer,
            rem,
            lo,
            levels,
            caps: &caps,
        };
        for li in 0..outer.len() {
            let mut seen = vec![false; load.len()];
            if !self.place(&ctx, li, &mut load, &mut seen) {
                return false;
            }
        }
        true
    }

    fn place(&self, ctx: &Slots, li: usize, load: &mut [Vec<usize>], seen: &mut [bool]) -> bool {
        let v = ctx.outer[li].0;
        for (si, &s) in ctx.sources.iter().enumerate() {
            let d = self.dist[s][v] as u32;
            if d > ctx.rem {
                continue;
            }
            for m in d.max(ctx.lo)..=ctx.rem {
                let level = (m - ctx.lo) as usize;
                let r = si * ctx.levels + level;
                if std::mem::replace(&mut seen[r], true) {
                    continue;
                }
                if load[r].len() < ctx.caps[level] {
                    load[r].push(li);
                    return true;
                }
                for k in 0..load[r].len() {
                    let other = load[r][k];
                    if self.place(ctx, other, load, seen) {
                        load[r][k] = li;
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Kuhn augmenting path from receiver `w` into the informed senders;
    /// `owner[s]` is the receiver currently served by `s`.
    fn augment(&self, informed: &Set, w: usize, owner: &mut [u16], seen: &mut Set) -> bool {
        for &s in &self.adj[w] {
            let s = s as usize;
            if !has(informed, s) || has(seen, s) {
                continue;
            }
            put(seen, s);
            if owner[s] == NO_OWNER || self.augment(informed, owner[s] as usize, owner, seen) {
                owner[s] = w as u16;
                return true;
            }
        }
        false
    }

    /// Number of `extra` receivers that can be added to the matching `owner`.
    fn extend_rank(&self, informed: &Set, extra: &[usize], owner: &[u16]) -> usize {
        let mut probe = owner.to_vec();
        extra
            .iter()
            .filter(|&&w| self.augment(informed, w, &mut probe, &mut [0; 4]))
            .count()
    }

    /// Walk the maximal receiver sets, each once, descending into a set as
    /// soon as it is complete.
    ///
    /// Sets coverable by a sender matching are the independent sets of a
    /// transversal matroid, so the maximal ones are its bases and all have
    /// size `rank`. A candidate is skipped only if the rest can still
    /// complete a basis, so every leaf is maximal.
    fn enumerate(
        &mut self,
        step: &Step,
        idx: usize,
        taken: Set,
        chosen: &mut Vec<usize>,
        owner: Vec<u16>,
    ) -> Option<bool> {
        if idx > 0 {
            for &fi in &step.deadline[idx - 1] {
                let ft = &step.far_targets[fi];
                if (0..4).all(|w| ft[w] & taken[w] == 0) {
                    return Some(false);
                }
            }
        }
        if idx == step.cands.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let mut next = step.informed;
            for w in 0..4 {
                next[w] |= taken[w];
            }
            let res = self.solve(next, step.count + chosen.len(), step.t + 1);
            if res == Some(true) {
                let pairs = owner
                    .iter()
                    .enumerate()
                    .filter(|&(_, &o)| o != NO_OWNER)
                    .map(|(s, &o)| (s, o as usize))
                    .collect();
                self.trail.push((step.t + 1, pairs));
            }
            return res;
        }
        let w = step.cands[idx];
        let mut grown = owner.clone();
        if chosen.len() < step.rank && self.augment(&step.informed, w, &mut grown, &mut [0; 4]) {
            let mut next = taken;
            put(&mut next, w);
            chosen.push(w);
            let res = self.enumerate(step, idx + 1, next, chosen, grown);
            chosen.pop();
            if res != Some(false) {
                return res;
            }
        }
        let short = step.rank - chosen.len();
        if short > 0
            && (step.cands.len() - idx - 1 < short
                || self.extend_rank(&step.informed, &step.cands[idx + 1..], &owner) < short)
        {
            return Some(false);
        }
        self.enumerate(step, idx + 1, taken, chosen, owner)
    }
}
