//! Batch verification: every structural invariant of the library, checked
//! against BFS oracles for each isomorphism class up to a bound.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circulant::{isomorphism_classes, FrobeniusCirculant};
use crate::covers::{check_cover, quotient_circulant};
use crate::eisenstein::{
    circulant_to_ej, ej_to_circulant, iso_map, verify_arc_transitive, verify_iso, EjGraph,
};
use crate::error::Result;
use crate::graph::{bfs_distances, Topology};
use crate::numtheory::classify;
use crate::scheduler::{
    broadcast_schedule, build_diagram, build_spanning_tree, gossip_schedule,
    type_vector_closed_form, RoutingTable,
};
use crate::simulator::{run_broadcast, run_gossip_translation};

/// Orders above this skip the isomorphism-map and arc-transitivity checks,
/// which materialize the EJ graph.
pub const EJ_CHECK_BOUND: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFailure {
    pub n: u64,
    pub a: u64,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub max: u64,
    pub orders: usize,
    pub classes: usize,
    pub failures: Vec<ClassFailure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run [`audit_class`] on every isomorphism class of order at most `max`.
///
/// `progress` is called with `(done, total)` after each class, from worker
/// threads.
pub fn audit_upto<F>(max: u64, progress: F) -> Result<AuditReport>
where
    F: Fn(usize, usize) + Sync,
{
    let orders: Vec<u64> = (7..=max)
        .into_par_iter()
        .filter_map(|n| match classify(n) {
            Ok(c) if c.exists => Some(Ok(n)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    let mut classes = Vec::new();
    for &n in &orders {
        classes.extend(isomorphism_classes(n)?);
    }
    let done = AtomicUsize::new(0);
    let total = classes.len();
    let failures: Vec<ClassFailure> = classes
        .par_iter()
        .flat_map_iter(|g| {
            let out = audit_class(g);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            out
        })
        .collect();
    Ok(AuditReport {
        max,
        orders: orders.len(),
        classes: total,
        failures,
    })
}

/// All checks for one graph; an empty result means every check passed.
pub fn audit_class(g: &FrobeniusCirculant) -> Vec<ClassFailure> {
    let mut failures = Vec::new();
    let mut record = |check: &str, outcome: std::result::Result<(), String>| {
        if let Err(detail) = outcome {
            failures.push(ClassFailure {
                n: g.n(),
                a: g.a(),
                check: check.to_string(),
                detail,
            });
        }
    };
    let dist = bfs_distances(g, 0);
    record("classification", check_classification(g));
    record("distances", check_distances(g, &dist));
    record("diagram", check_diagram(g, &dist));
    record("routing", check_routing(g, &dist));
    record("gossip", check_gossip(g));
    record("broadcast", check_broadcast(g));
    record("ej", check_ej(g));
    record("quotients", check_quotients(g));
    failures
}

type Check = std::result::Result<(), String>;

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check_classification(g: &FrobeniusCirculant) -> Check {
    let c = lift(classify(g.n()))?;
    if !c.exists || !c.solutions.contains(&g.a()) || !c.solutions.contains(&g.canonical_generator())
    {
        return Err(format!("generator missing from {:?}", c.solutions));
    }
    Ok(())
}

fn check_distances(g: &FrobeniusCirculant, dist: &[u32]) -> Check {
    for u in 0..g.n() {
        let d = lift(g.distance_closed_form(u))?;
        if d != dist[u as usize] as u64 {
            return Err(format!(
                "closed form gives {d} for {u}, BFS {}",
                dist[u as usize]
            ));
        }
    }
    Ok(())
}

fn check_diagram(g: &FrobeniusCirculant, dist: &[u32]) -> Check {
    let d = lift(build_diagram(g))?;
    let n = g.n();
    let mut hit = vec![false; n as usize];
    hit[0] = true;
    for cell in &d.y {
        if dist[cell.residue as usize] as u64 != cell.i + cell.j {
            return Err(format!(
                "cell ({}, {}) is not at distance i + j",
                cell.i, cell.j
            ));
        }
        for x in lift(g.h_orbit(cell.residue))? {
            if std::mem::replace(&mut hit[x as usize], true) {
                return Err(format!("{x} covered twice"));
            }
        }
    }
    if hit.contains(&false) {
        return Err("sectors do not cover Z_n".into());
    }
    let ecc = dist.iter().copied().max().unwrap_or(0) as u64;
    if d.diameter() != ecc {
        return Err(format!(
            "diagram diameter {} vs eccentricity {ecc}",
            d.diameter()
        ));
    }
    let tv = d.type_vector();
    if tv != lift(type_vector_closed_form(g))? {
        return Err(format!(
            "type vector {tv:?} differs from the EJ closed form"
        ));
    }
    let weighted: u128 = tv
        .iter()
        .enumerate()
        .map(|(t, &c)| (t as u128 + 1) * c as u128)
        .sum();
    let bfs_sum: u128 = dist.iter().map(|&x| x as u128).sum();
    if d.forwarding_index() != 2 * weighted || 3 * d.forwarding_index() != bfs_sum {
        return Err(format!(
            "forwarding index {} inconsistent",
            d.forwarding_index()
        ));
    }
    Ok(())
}

fn check_routing(g: &FrobeniusCirculant, dist: &[u32]) -> Check {
    let d = lift(build_diagram(g))?;
    let tree = lift(build_spanning_tree(g, &d))?;
    if (0..g.n()).any(|v| tree.level(v) != dist[v as usize] as u64) {
        return Err("tree depth differs from distance".into());
    }
    let loads = RoutingTable::new(tree).arc_loads();
    if !loads.arc_uniform || !loads.edge_uniform || loads.edge_load as u128 != d.forwarding_index()
    {
        return Err(format!("loads {loads:?}, pi {}", d.forwarding_index()));
    }
    Ok(())
}

fn check_gossip(g: &FrobeniusCirculant) -> Check {
    let d = lift(build_diagram(g))?;
    let tree = lift(build_spanning_tree(g, &d))?;
    let report = lift(run_gossip_translation(g, &gossip_schedule(&tree)))?;
    let ok = report.valid
        && report.completion_time == Some((g.n() - 1) / 6)
        && report.full_arc_usage == Some(true)
        && report.shortest_paths == Some(true);
    if !ok {
        return Err(format!("{report:?}"));
    }
    Ok(())
}

fn check_broadcast(g: &FrobeniusCirculant) -> Check {
    let d = lift(build_diagram(g))?;
    let s = lift(broadcast_schedule(g, &d))?;
    let report = run_broadcast(g, &s, 0);
    let h = s.horizon();
    if !report.valid
        || report.completion_time != Some(h)
        || h < d.diameter() + 2
        || h > d.diameter() + 3
    {
        return Err(format!(
            "horizon {h}, D {}, {:?}",
            d.diameter(),
            report.violations
        ));
    }
    Ok(())
}

fn check_ej(g: &FrobeniusCirculant) -> Check {
    let alpha = lift(circulant_to_ej(g))?;
    let back = lift(ej_to_circulant(alpha))?;
    if back.canonical_generator() != g.canonical_generator() {
        return Err(format!(
            "round trip through {alpha} gives generator {}",
            back.a()
        ));
    }
    if g.n() <= EJ_CHECK_BOUND {
        let ej = lift(EjGraph::new(alpha))?;
        if !lift(verify_iso(g, &ej, &lift(iso_map(g, alpha))?))? {
            return Err(format!("map into EJ_{alpha} is not an isomorphism"));
        }
        if !lift(verify_arc_transitive(alpha, EJ_CHECK_BOUND))? {
            return Err(format!("EJ_{alpha} is not arc-transitive"));
        }
        if ej.order() != g.order() {
            return Err("orders differ".into());
        }
    }
    Ok(())
}

fn check_quotients(g: &FrobeniusCirculant) -> Check {
    let n = g.n();
    for m in (2..n).filter(|m| n.is_multiple_of(*m)) {
        let (base, map) = lift(quotient_circulant(g, m))?;
        check_cover(&map, g, &base).map_err(|v| format!("quotient by {m}: {v}"))?;
    }
    Ok(())
}
