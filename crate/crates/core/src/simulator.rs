//! Discrete-time validation of gossip schedules (store-and-forward, all-port,
//! full-duplex) and broadcast schedules (single-port).
//!
//! Violations are fatal: a run stops at the first one and reports where it
//! happened. Steps and times are 1-based in reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Arc, Materialized, Topology};
use crate::scheduler::BroadcastSchedule;

/// Default order bound for the bitset gossip simulator (`n^2 / 8` bytes of
/// arc-usage state).
pub const GOSSIP_SIM_BOUND: u64 = 20_000;
/// Origins simulated together; their knowledge rows stay cache resident.
const BLOCK: usize = 64;

/// Message `origin` crosses the arc `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "WireTransmission", into = "WireTransmission")]
pub struct Transmission {
    pub tail: usize,
    pub head: usize,
    pub origin: usize,
}

#[derive(Serialize, Deserialize)]
struct WireTransmission {
    arc: [usize; 2],
    origin: usize,
}

impl From<WireTransmission> for Transmission {
    fn from(w: WireTransmission) -> Self {
        Transmission {
            tail: w.arc[0],
            head: w.arc[1],
            origin: w.origin,
        }
    }
}

impl From<Transmission> for WireTransmission {
    fn from(t: Transmission) -> Self {
        WireTransmission {
            arc: [t.tail, t.head],
            origin: t.origin,
        }
    }
}

/// A gossip schedule as seen by the simulator.
pub trait GossipPlan {
    fn steps(&self) -> usize;

    /// Append the transmissions of `origin`'s message in `step` (0-based).
    fn for_origin(&self, step: usize, origin: usize, out: &mut Vec<Transmission>);

    /// First transmission naming an origin outside `0..n`, if any.
    fn foreign_origin(&self, _n: usize) -> Option<(usize, Transmission)> {
        None
    }
}

/// A schedule given by the arcs used for origin 0 at each step; origin `u`
/// uses the same arcs shifted by `u` on a circulant.
pub trait TranslationPlan {
    fn order(&self) -> usize;
    fn steps(&self) -> usize;
    fn base_arcs(&self, step: usize) -> Vec<Arc>;
}

/// An explicit schedule: per step, a list of transmissions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<Transmission>>", into = "Vec<Vec<Transmission>>")]
pub struct ExplicitGossipSchedule {
    steps: Vec<Vec<Transmission>>,
    /// Per step, the transmissions sorted by origin.
    by_origin: Vec<Vec<Transmission>>,
}

impl ExplicitGossipSchedule {
    pub fn new(steps: Vec<Vec<Transmission>>) -> Self {
        let by_origin = steps
            .iter()
            .map(|s| {
                let mut v = s.clone();
                v.sort_by_key(|t| t.origin);
                v
            })
            .collect();
        ExplicitGossipSchedule { steps, by_origin }
    }

    pub fn steps(&self) -> &[Vec<Transmission>] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<Vec<Transmission>> {
        self.steps
    }
}

impl From<Vec<Vec<Transmission>>> for ExplicitGossipSchedule {
    fn from(steps: Vec<Vec<Transmission>>) -> Self {
        ExplicitGossipSchedule::new(steps)
    }
}

impl From<ExplicitGossipSchedule> for Vec<Vec<Transmission>> {
    fn from(s: ExplicitGossipSchedule) -> Self {
        s.steps
    }
}

impl GossipPlan for ExplicitGossipSchedule {
    fn steps(&self) -> usize {
        self.steps.len()
    }

    fn for_origin(&self, step: usize, origin: usize, out: &mut Vec<Transmission>) {
        let s = &self.by_origin[step];
        let lo = s.partition_point(|t| t.origin < origin);
        let hi = s.partition_point(|t| t.origin <= origin);
        out.extend_from_slice(&s[lo..hi]);
    }

    fn foreign_origin(&self, n: usize) -> Option<(usize, Transmission)> {
        self.steps
            .iter()
            .enumerate()
            .find_map(|(l, s)| s.iter().find(|t| t.origin >= n).map(|t| (l, *t)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The pair is not an arc of the graph.
    NotAnArc {
        step: usize,
        tail: usize,
        head: usize,
    },
    /// A second message on the same arc within one step.
    ArcReused {
        step: usize,
        tail: usize,
        head: usize,
    },
    /// The tail does not hold the message at the start of the step.
    NotHeld {
        step: usize,
        tail: usize,
        origin: usize,
    },
    BadOrigin {
        step: usize,
        origin: usize,
    },
    /// After the last step, `vertex` still lacks `origin`'s message.
    Incomplete {
        origin: usize,
        vertex: usize,
    },
    /// A broadcast sender transmits twice in one step.
    SenderBusy {
        time: u64,
        sender: usize,
    },
    /// A broadcast sender is not informed before it sends.
    Causality {
        time: u64,
        sender: usize,
        vertex: usize,
    },
    DuplicateReceipt {
        vertex: usize,
    },
    BadEntry {
        vertex: usize,
        time: u64,
        sender: usize,
    },
    Unreached {
        vertex: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub valid: bool,
    /// First step after which dissemination is complete; `None` when invalid.
    pub completion_time: Option<u64>,
    pub violations: Vec<Violation>,
    /// Gossip only: every step used every arc exactly once.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_arc_usage: Option<bool>,
    /// Gossip only: every transmission moved a message one step farther
    /// from its origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortest_paths: Option<bool>,
}

impl SimReport {
    fn fail(v: Violation) -> Self {
        SimReport {
            valid: false,
            completion_time: None,
            violations: vec![v],
            full_arc_usage: None,
            shortest_paths: None,
        }
    }
}

#[inline]
fn bit(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) -> bool {
    let (w, m) = (i >> 6, 1u64 << (i & 63));
    let was = words[w] & m != 0;
    words[w] |= m;
    was
}

/// Execute a gossip schedule transmission by transmission.
///
/// Origins are processed in blocks of 64 over all steps; arc usage is kept
/// per step and shared across blocks, so conflicts between any two origins
/// are caught. Reads within a step see only knowledge from earlier steps.
pub fn run_gossip<G, P>(g: &G, plan: &P, bound: u64) -> Result<SimReport>
where
    G: Topology + ?Sized,
    P: GossipPlan + ?Sized,
{
    let n = g.order();
    if n as u64 > bound {
        return Err(Error::BoundExceeded { n: n as u64, bound });
    }
    if let Some((step, t)) = plan.foreign_origin(n) {
        return Ok(SimReport::fail(Violation::BadOrigin {
            step: step + 1,
            origin: t.origin,
        }));
    }
    let mat = Materialized::new(g)?;
    let steps = plan.steps();
    let words = n.div_ceil(64);
    let mut usage = vec![0u64; (steps * 6 * n).div_ceil(64)];
    let mut used_per_step = vec![0usize; steps];
    let mut know = vec![0u64; BLOCK * words];
    let mut dist: Vec<Vec<u32>> = Vec::with_capacity(BLOCK);
    let mut buf = Vec::new();
    let mut completion = 0usize;
    let mut shortest = true;

    for start in (0..n).step_by(BLOCK) {
        let block = start..(start + BLOCK).min(n);
        know.fill(0);
        dist.clear();
        for u in block.clone() {
            set_bit(&mut know[(u - start) * words..][..words], u);
            dist.push(bfs_distances(&mat, u));
        }
        let mut count = [1usize; BLOCK];
        for (step, used) in used_per_step.iter_mut().enumerate() {
            for u in block.clone() {
                let slot = u - start;
                buf.clear();
                plan.for_origin(step, u, &mut buf);
                let row = &mut know[slot * words..][..words];
                for t in &buf {
                    let arc_err = Violation::NotAnArc {
                        step: step + 1,
                        tail: t.tail,
                        head: t.head,
                    };
                    if t.tail >= n || t.head >= n {
                        return Ok(SimReport::fail(arc_err));
                    }
                    let Some(dir) = mat.direction(t.tail, t.head) else {
                        return Ok(SimReport::fail(arc_err));
                    };
                    if !bit(row, t.tail) {
                        return Ok(SimReport::fail(Violation::NotHeld {
                            step: step + 1,
                            tail: t.tail,
                            origin: u,
                        }));
                    }
                    if set_bit(&mut usage, (step * n + t.tail) * 6 + dir) {
                        return Ok(SimReport::fail(Violation::ArcReused {
                            step: step + 1,
                            tail: t.tail,
                            head: t.head,
                        }));
                    }
                    *used += 1;
                    let dv = &dist[slot];
                    shortest &= dv[t.head] == dv[t.tail] + 1;
                }
                for t in &buf {
                    if !set_bit(row, t.head) {
                        count[slot] += 1;
                        completion = completion.max(step + 1);
                    }
                }
            }
        }
        for u in block {
            if count[u - start] < n {
                let row = &know[(u - start) * words..][..words];
                let vertex = (0..n).find(|&v| !bit(row, v)).unwrap();
                return Ok(SimReport::fail(Violation::Incomplete { origin: u, vertex }));
            }
        }
    }
    Ok(SimReport {
        valid: true,
        completion_time: Some(completion as u64),
        violations: Vec::new(),
        full_arc_usage: Some(used_per_step.iter().all(|&c| c == 6 * n)),
        shortest_paths: Some(shortest),
    })
}

/// Execute a translation-invariant schedule on a circulant by tracking
/// origin 0 only.
///
/// Origin `u` sends along the base arcs shifted by `u`, so arc `(x, x + s)`
/// is used once for every base arc of direction `s`: a step is conflict-free
/// exactly when its base arcs have distinct directions, and uses every arc
/// once exactly when those directions are the whole connection set.
/// Store-and-forward and completion for origin `u` are the shifts of those
/// for origin 0.
pub fn run_gossip_translation<G, P>(g: &G, plan: &P) -> Result<SimReport>
where
    G: Topology + ?Sized,
    P: TranslationPlan + ?Sized,
{
    let n = g.order();
    if plan.order() != n {
        return Err(Error::InvalidInput(format!(
            "plan is for order {}, graph has order {n}",
            plan.order()
        )));
    }
    let words = n.div_ceil(64);
    let mut know = vec![0u64; words];
    set_bit(&mut know, 0);
    let dist = bfs_distances(g, 0);
    let offsets = g.neighbors(0);
    let mut count = 1usize;
    let mut completion = 0usize;
    let mut full = true;
    let mut shortest = true;
    for step in 0..plan.steps() {
        let arcs = plan.base_arcs(step);
        let mut dirs_used = [false; 6];
        for arc in &arcs {
            let bad = Violation::NotAnArc {
                step: step + 1,
                tail: arc.tail,
                head: arc.head,
            };
            if arc.tail >= n || arc.head >= n {
                return Ok(SimReport::fail(bad));
            }
            let diff = (arc.head + n - arc.tail) % n;
            let Some(dir) = offsets.iter().position(|&s| s == diff) else {
                return Ok(SimReport::fail(bad));
            };
            if !g.is_adjacent(arc.tail, arc.head) {
                return Ok(SimReport::fail(bad));
            }
            if std::mem::replace(&mut dirs_used[dir], true) {
                return Ok(SimReport::fail(Violation::ArcReused {
                    step: step + 1,
                    tail: arc.tail,
                    head: arc.head,
                }));
            }
            if !bit(&know, arc.tail) {
                return Ok(SimReport::fail(Violation::NotHeld {
                    step: step + 1,
                    tail: arc.tail,
                    origin: 0,
                }));
            }
            shortest &= dist[arc.head] == dist[arc.tail] + 1;
        }
        full &= dirs_used.iter().all(|&d| d);
        for arc in &arcs {
            if !set_bit(&mut know, arc.head) {
                count += 1;
                completion = step + 1;
            }
        }
    }
    if count < n {
        let vertex = (0..n).find(|&v| !bit(&know, v)).unwrap();
        return Ok(SimReport::fail(Violation::Incomplete { origin: 0, vertex }));
    }
    Ok(SimReport {
        valid: true,
        completion_time: Some(completion as u64),
        violations: Vec::new(),
        full_arc_usage: Some(full),
        shortest_paths: Some(shortest),
    })
}

/// Validate a single-port broadcast schedule from `source`.
pub fn run_broadcast<G: Topology + ?Sized>(
    g: &G,
    schedule: &BroadcastSchedule,
    source: usize,
) -> SimReport {
    let n = g.order();
    let mut time = vec![u64::MAX; n];
    if source >= n {
        return SimReport::fail(Violation::BadEntry {
            vertex: source,
            time: 0,
            sender: source,
        });
    }
    time[source] = 0;
    let mut entries = schedule.entries().to_vec();
    entries.sort_by_key(|e| (e.time, e.vertex));
    for e in &entries {
        let (v, s) = (e.vertex as usize, e.sender as usize);
        if v >= n || s >= n || e.time == 0 || !g.is_adjacent(s, v) {
            return SimReport::fail(Violation::BadEntry {
                vertex: v,
                time: e.time,
                sender: s,
            });
        }
        if time[v] != u64::MAX {
            return SimReport::fail(Violation::DuplicateReceipt { vertex: v });
        }
        if time[s] >= e.time {
            return SimReport::fail(Violation::Causality {
                time: e.time,
                sender: s,
                vertex: v,
            });
        }
        time[v] = e.time;
    }
    let mut sends: Vec<(u64, u64)> = entries.iter().map(|e| (e.time, e.sender)).collect();
    sends.sort_unstable();
    if let Some(w) = sends.windows(2).find(|w| w[0] == w[1]) {
        return SimReport::fail(Violation::SenderBusy {
            time: w[0].0,
            sender: w[0].1 as usize,
        });
    }
    if let Some(v) = time.iter().position(|&t| t == u64::MAX) {
        return SimReport::fail(Violation::Unreached { vertex: v });
    }
    SimReport {
        valid: true,
        completion_time: Some(*time.iter().max().unwrap()),
        violations: Vec::new(),
        full_arc_usage: None,
        shortest_paths: None,
    }
}

/// Default order bound for the greedy flooding baseline.
pub const GREEDY_BOUND: u64 = 2_000;

/// Flooding: at each step every arc `x -> y` carries the lowest-numbered
/// origin that `x` holds and `y` neither holds nor receives from an earlier
/// arc in the same step.
pub fn greedy_gossip_schedule<G: Topology + ?Sized>(
    g: &G,
    bound: u64,
) -> Result<ExplicitGossipSchedule> {
    let n = g.order();
    if n as u64 > bound {
        return Err(Error::BoundExceeded { n: n as u64, bound });
    }
    let mat = Materialized::new(g)?;
    let words = n.div_ceil(64);
    let mut know = vec![0u64; n * words];
    for v in 0..n {
        set_bit(&mut know[v * words..][..words], v);
    }
    let mut missing = n * (n - 1);
    let mut steps = Vec::new();
    while missing > 0 {
        let mut incoming = vec![0u64; n * words];
        let mut step = Vec::new();
        for x in 0..n {
            for y in mat.neighbors(x) {
                let kx = &know[x * words..][..words];
                let ky = &know[y * words..][..words];
                let inc = &incoming[y * words..][..words];
                let pick = (0..words).find_map(|w| {
                    let free = kx[w] & !ky[w] & !inc[w];
                    (free != 0).then(|| w * 64 + free.trailing_zeros() as usize)
                });
                if let Some(u) = pick {
                    set_bit(&mut incoming[y * words..][..words], u);
                    step.push(Transmission {
                        tail: x,
                        head: y,
                        origin: u,
                    });
                }
            }
        }
        if step.is_empty() {
            return Err(Error::InvalidInput("graph is disconnected".into()));
        }
        for t in &step {
            set_bit(&mut know[t.head * words..][..words], t.origin);
        }
        missing -= step.len();
        steps.push(step);
    }
    Ok(ExplicitGossipSchedule::new(steps))
}

/// Completion time of the greedy baseline, validated by [`run_gossip`].
pub fn greedy_gossip_baseline<G: Topology + ?Sized>(g: &G, bound: u64) -> Result<u64> {
    let plan = greedy_gossip_schedule(g, bound)?;
    let report = run_gossip(g, &plan, bound)?;
    match (report.valid, report.completion_time) {
        (true, Some(t)) => Ok(t),
        _ => Err(Error::Invariant(format!(
            "greedy baseline failed validation: {:?}",
            report.violations
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::FrobeniusCirculant;
    use crate::scheduler::{
        broadcast_schedule, build_diagram, build_spanning_tree, gossip_schedule, GossipSchedule,
    };

    fn plan(n: u64, a: u64) -> (FrobeniusCirculant, GossipSchedule) {
        let g = FrobeniusCirculant::new(n, a).unwrap();
        let d = build_diagram(&g).unwrap();
        let s = gossip_schedule(&build_spanning_tree(&g, &d).unwrap());
        (g, s)
    }

    #[test]
    fn generated_schedules_complete() {
        for (n, a, steps) in [(7, 3, 1), (49, 31, 8), (91, 17, 15), (91, 10, 15)] {
            let (g, s) = plan(n, a);
            let r = run_gossip(&g, &s, GOSSIP_SIM_BOUND).unwrap();
            assert!(r.valid, "{:?}", r.violations);
            assert_eq!(r.completion_time, Some(steps));
            assert_eq!(r.full_arc_usage, Some(true));
            assert_eq!(r.shortest_paths, Some(true));
            assert_eq!(run_gossip_translation(&g, &s).unwrap(), r);
        }
    }

    #[test]
    fn duplicated_arc_is_rejected() {
        let (g, s) = plan(49, 31);
        let mut steps = s.to_explicit(100).unwrap().into_steps();
        let t = steps[4][7];
        steps[4].push(t);
        let r = run_gossip(&g, &ExplicitGossipSchedule::new(steps), 100).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violations,
            vec![Violation::ArcReused {
                step: 5,
                tail: t.tail,
                head: t.head
            }]
        );
    }

    #[test]
    fn early_forwarding_is_rejected() {
        let (g, s) = plan(49, 31);
        let mut steps = s.to_explicit(100).unwrap().into_steps();
        // deliver step 2's messages one step early
        let moved = std::mem::take(&mut steps[1]);
        steps[0].extend(moved);
        let r = run_gossip(&g, &ExplicitGossipSchedule::new(steps), 100).unwrap();
        assert!(matches!(
            r.violations[..],
            [Violation::NotHeld { step: 1, .. }]
        ));
    }

    #[test]
    fn truncated_schedule_is_incomplete() {
        let (g, s) = plan(13, 4);
        let mut steps = s.to_explicit(100).unwrap().into_steps();
        steps.pop();
        let r = run_gossip(&g, &ExplicitGossipSchedule::new(steps), 100).unwrap();
        assert!(matches!(r.violations[..], [Violation::Incomplete { .. }]));
    }

    #[test]
    fn broadcast_checks() {
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        let d = build_diagram(&g).unwrap();
        let s = broadcast_schedule(&g, &d).unwrap();
        let r = run_broadcast(&g, &s, 0);
        assert_eq!(r.completion_time, Some(7));
        assert!(run_broadcast(&g, &s.translate(11, 49), 11).valid);

        let mut entries = s.entries().to_vec();
        entries[1].time = 1; // vertex `a` now hears from 1 at time 1
        let r = run_broadcast(&g, &BroadcastSchedule::from(entries), 0);
        assert!(!r.valid);
    }

    #[test]
    fn greedy_baseline() {
        let g = FrobeniusCirculant::new(7, 3).unwrap();
        assert_eq!(greedy_gossip_baseline(&g, GREEDY_BOUND).unwrap(), 1);
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        assert!(greedy_gossip_baseline(&g, GREEDY_BOUND).unwrap() >= 8);
        let g = FrobeniusCirculant::new(91, 17).unwrap();
        assert!(greedy_gossip_baseline(&g, GREEDY_BOUND).unwrap() >= 15);
    }

    #[test]
    fn reports_serialize() {
        let (g, s) = plan(7, 3);
        let r = run_gossip(&g, &s, 100).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["valid"], true);
        assert_eq!(v["completion_time"], 1);
        assert_eq!(v["violations"], serde_json::json!([]));
    }
}
