//! Plain-text tables for `--human`.

use std::io::{self, Write};

use frobcirc::audit::AuditReport;
use frobcirc::numtheory::Classification;
use frobcirc::scheduler::{BroadcastSchedule, Cell, GossipSchedule, Metrics};
use frobcirc::simulator::SimReport;

use crate::{CoverReport, EjConversion, GraphSummary};

pub fn classification(w: &mut dyn Write, c: &Classification) -> io::Result<()> {
    writeln!(w, "n            {}", c.n)?;
    writeln!(w, "exists       {}", c.exists)?;
    writeln!(w, "solutions    {:?}", c.solutions)?;
    writeln!(w, "graph count  {}", c.graph_count)
}

pub fn summaries(w: &mut dyn Write, rows: &[GraphSummary]) -> io::Result<()> {
    writeln!(
        w,
        "{:>8} {:>8} {:>8} {:>4}  connection set",
        "n", "a", "canon", "D"
    )?;
    for r in rows {
        writeln!(
            w,
            "{:>8} {:>8} {:>8} {:>4}  {:?}",
            r.n, r.a, r.canonical_generator, r.diameter, r.connection_set
        )?;
    }
    if let Some(r) = rows.first() {
        writeln!(
            w,
            "{} isomorphism classes of order {}",
            r.isomorphism_classes, r.n
        )?;
    }
    Ok(())
}

pub fn ej_conversion(w: &mut dyn Write, r: &EjConversion) -> io::Result<()> {
    writeln!(w, "alpha      {}", r.alpha)?;
    writeln!(w, "norm       {}", r.norm)?;
    writeln!(w, "canonical  {:?}", r.canonical)?;
    writeln!(w, "gcd(c, d)  {}", r.gcd)?;
    if let (Some(g), Some(canon)) = (&r.circulant, r.canonical_generator) {
        writeln!(
            w,
            "circulant  TL_{}({}), canonical generator {canon}",
            g.n(),
            g.a()
        )?;
    }
    if let (Some(g), Some(fold)) = (&r.covers, r.fold) {
        writeln!(w, "covers     TL_{}({}), {fold}-fold", g.n(), g.a())?;
    }
    Ok(())
}

pub fn metrics(w: &mut dyn Write, m: &Metrics) -> io::Result<()> {
    writeln!(w, "graph              TL_{}({})", m.n, m.a)?;
    writeln!(w, "diameter           {}", m.diameter)?;
    writeln!(w, "type vector        {:?}", m.type_vector)?;
    writeln!(w, "forwarding index   {} (arc {})", m.pi, m.arc_pi)?;
    writeln!(w, "Wiener index       {}", m.wiener)?;
    writeln!(w, "gossip time        {}", m.gossip_time)?;
    writeln!(w, "broadcast scheme   {}", m.broadcast_horizon)?;
    let tag = if m.broadcast_exact {
        "exact"
    } else {
        "upper bound"
    };
    writeln!(w, "broadcast time     {} ({tag})", m.broadcast_time)
}

pub fn diagram(w: &mut dyn Write, profile: &[u64], y: &[Cell], diameter: u64) -> io::Result<()> {
    writeln!(w, "profile   {profile:?}")?;
    writeln!(w, "diameter  {diameter}")?;
    // one row per j, cells left to right by i
    for (j, &len) in profile.iter().enumerate() {
        let row: Vec<String> = y
            .iter()
            .filter(|c| c.j == j as u64)
            .map(|c| format!("{:>6}", c.residue))
            .collect();
        if len > 0 {
            writeln!(w, "j={j:<3}{}", row.concat())?;
        }
    }
    Ok(())
}

pub fn gossip(w: &mut dyn Write, plan: &GossipSchedule) -> io::Result<()> {
    writeln!(
        w,
        "{:>5} {:>6} {:>4} {:>4} {:>8} {:>8}",
        "step", "phase", "i", "j", "tail", "head"
    )?;
    for (l, g) in plan.groups().iter().enumerate() {
        writeln!(
            w,
            "{:>5} {:>6} {:>4} {:>4} {:>8} {:>8}",
            l + 1,
            g.phase,
            g.i,
            g.j,
            g.tail,
            g.head
        )?;
    }
    Ok(())
}

pub fn broadcast(w: &mut dyn Write, s: &BroadcastSchedule) -> io::Result<()> {
    writeln!(w, "{:>5} {:>8} {:>8}", "time", "sender", "vertex")?;
    for e in s.entries() {
        writeln!(w, "{:>5} {:>8} {:>8}", e.time, e.sender, e.vertex)?;
    }
    writeln!(w, "horizon {}", s.horizon())
}

pub fn sim_report(w: &mut dyn Write, r: &SimReport) -> io::Result<()> {
    writeln!(w, "valid            {}", r.valid)?;
    match r.completion_time {
        Some(t) => writeln!(w, "completion time  {t}")?,
        None => writeln!(w, "completion time  -")?,
    }
    if let Some(b) = r.full_arc_usage {
        writeln!(w, "every arc used   {b}")?;
    }
    if let Some(b) = r.shortest_paths {
        writeln!(w, "shortest paths   {b}")?;
    }
    for v in &r.violations {
        writeln!(w, "violation        {v:?}")?;
    }
    Ok(())
}

pub fn cover(w: &mut dyn Write, r: &CoverReport) -> io::Result<()> {
    if let Some(b) = &r.base {
        writeln!(w, "base      TL_{}({})", b.n(), b.a())?;
    }
    writeln!(w, "orders    {} -> {}", r.total_order, r.base_order)?;
    writeln!(w, "fold      {}", r.fold)?;
    writeln!(w, "verified  {}", r.verified)
}

pub fn audit(w: &mut dyn Write, r: &AuditReport) -> io::Result<()> {
    writeln!(
        w,
        "orders <= {}: {}, classes: {}",
        r.max, r.orders, r.classes
    )?;
    for f in &r.failures {
        writeln!(w, "FAIL TL_{}({}) {}: {}", f.n, f.a, f.check, f.detail)?;
    }
    writeln!(
        w,
        "{}",
        if r.passed() {
            "all invariants hold"
        } else {
            "invariant failures"
        }
    )
}
