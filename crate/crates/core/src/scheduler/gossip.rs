//! All-to-all gossip: each origin pushes its message down the translated
//! spanning tree, one arc group per step.

use std::io::Write;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use super::tree::{ArcGroup, SpanningTree};
use crate::error::{Error, Result};
use crate::graph::Arc;
use crate::simulator::{ExplicitGossipSchedule, GossipPlan, TranslationPlan, Transmission};

#[derive(Debug, Clone, Serialize)]
pub struct GossipSchedule {
    pub n: u64,
    pub total_steps: usize,
    groups: Vec<ArcGroup>,
    #[serde(skip)]
    base: Vec<[Arc; 6]>,
}

/// Step `l` activates group `l` translated by every origin `u`.
pub fn gossip_schedule(tree: &SpanningTree) -> GossipSchedule {
    let n = tree.n();
    let h = tree.h_powers();
    let groups = tree.groups().to_vec();
    let base = groups.iter().map(|g| g.arcs(&h, n)).collect();
    GossipSchedule {
        n,
        total_steps: groups.len(),
        groups,
        base,
    }
}

impl GossipSchedule {
    pub fn groups(&self) -> &[ArcGroup] {
        &self.groups
    }

    /// The six transmissions of `origin`'s message in `step` (0-based).
    pub fn transmissions(&self, step: usize, origin: u64) -> [Transmission; 6] {
        let n = self.n as usize;
        let u = origin as usize;
        self.base[step].map(|arc| Transmission {
            tail: (arc.tail + u) % n,
            head: (arc.head + u) % n,
            origin: u,
        })
    }

    /// Every transmission of one step, origin by origin.
    pub fn step(&self, step: usize) -> impl Iterator<Item = Transmission> + '_ {
        (0..self.n).flat_map(move |u| self.transmissions(step, u))
    }

    /// Stream the schedule as a JSON array of steps without materializing it.
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        struct Step<'a>(&'a GossipSchedule, usize);
        impl Serialize for Step<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(6 * self.0.n as usize))?;
                for t in self.0.step(self.1) {
                    seq.serialize_element(&t)?;
                }
                seq.end()
            }
        }
        let mut ser = serde_json::Serializer::new(w);
        let mut seq = ser
            .serialize_seq(Some(self.total_steps))
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        for l in 0..self.total_steps {
            seq.serialize_element(&Step(self, l))
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
        seq.end().map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Expand into per-step transmission lists.
    pub fn to_explicit(&self, bound: u64) -> Result<ExplicitGossipSchedule> {
        if self.n > bound {
            return Err(Error::BoundExceeded { n: self.n, bound });
        }
        Ok(ExplicitGossipSchedule::new(
            (0..self.total_steps)
                .map(|l| self.step(l).collect())
                .collect(),
        ))
    }
}

impl GossipPlan for GossipSchedule {
    fn steps(&self) -> usize {
        self.total_steps
    }

    fn for_origin(&self, step: usize, origin: usize, out: &mut Vec<Transmission>) {
        out.extend_from_slice(&self.transmissions(step, origin as u64));
    }
}

impl TranslationPlan for GossipSchedule {
    fn order(&self) -> usize {
        self.n as usize
    }

    fn steps(&self) -> usize {
        self.total_steps
    }

    fn base_arcs(&self, step: usize) -> Vec<Arc> {
        self.base[step].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::FrobeniusCirculant;
    use crate::scheduler::{diagram::build_diagram, tree::build_spanning_tree};

    fn schedule(n: u64, a: u64) -> GossipSchedule {
        let g = FrobeniusCirculant::new(n, a).unwrap();
        let d = build_diagram(&g).unwrap();
        gossip_schedule(&build_spanning_tree(&g, &d).unwrap())
    }

    #[test]
    fn step_counts() {
        assert_eq!(schedule(7, 3).total_steps, 1);
        assert_eq!(schedule(49, 31).total_steps, 8);
        assert_eq!(schedule(91, 17).total_steps, 15);
    }

    #[test]
    fn complete_graph_step() {
        let s = schedule(7, 3);
        let mut arcs: Vec<(usize, usize)> = s.step(0).map(|t| (t.tail, t.head)).collect();
        assert!(s.step(0).all(|t| t.tail == t.origin));
        arcs.sort_unstable();
        arcs.dedup();
        assert_eq!(arcs.len(), 42);
    }

    #[test]
    fn json_matches_explicit() {
        let s = schedule(13, 4);
        let mut buf = Vec::new();
        s.write_json(&mut buf).unwrap();
        let parsed: ExplicitGossipSchedule = serde_json::from_slice(&buf).unwrap();
        assert_eq!(parsed, s.to_explicit(100).unwrap());
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0][0]["arc"], serde_json::json!([0, 1]));
        assert_eq!(v[0][0]["origin"], 0);
    }
}
