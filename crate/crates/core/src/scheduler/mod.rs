//! Distance diagrams, shortest-path routing, optimal gossip and broadcast.

pub mod broadcast;
pub mod diagram;
pub mod gossip;
pub mod tree;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use broadcast::{
    broadcast_feasible, broadcast_schedule, broadcast_time, BroadcastEntry, BroadcastSchedule,
    BroadcastStatus, BroadcastTime, Feasibility, DEFAULT_NODE_BUDGET, EXACT_SEARCH_BOUND,
};
pub use diagram::{build_diagram, type_vector_closed_form, Cell, DistanceDiagram, HexCell};
pub use gossip::{gossip_schedule, GossipSchedule};
pub use tree::{build_spanning_tree, ArcGroup, ArcLoads, RoutingTable, SpanningTree};

use crate::circulant::FrobeniusCirculant;
use crate::eisenstein::circulant_to_ej;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub n: u64,
    pub a: u64,
    pub diameter: u64,
    pub type_vector: Vec<u64>,
    /// Edge-forwarding index.
    pub pi: u64,
    /// Arc-forwarding index, `pi / 2`.
    pub arc_pi: u64,
    pub gossip_time: u64,
    pub wiener: u128,
    /// Horizon of the constructive broadcast scheme.
    pub broadcast_horizon: u64,
    /// Best known broadcast time: exact when certified, else the scheme horizon.
    pub broadcast_time: u64,
    /// Whether `broadcast_time` is certified optimal by search.
    pub broadcast_exact: bool,
}

/// All closed-form metrics, with the broadcast time certified when
/// `n <= exact_bound`.
pub fn metrics(g: &FrobeniusCirculant, exact_bound: u64, budget: u64) -> Result<Metrics> {
    let d = build_diagram(g)?;
    let type_vector = d.type_vector();
    let pi = d.forwarding_index();
    let weighted: u128 = type_vector
        .iter()
        .enumerate()
        .map(|(t, &c)| (t as u128 + 1) * c as u128)
        .sum();
    if pi != 2 * weighted {
        return Err(Error::Invariant(format!(
            "forwarding index {pi} differs from 2 * sum t n_t = {}",
            2 * weighted
        )));
    }
    let n = g.n();
    let bt = broadcast_time(g, &d, exact_bound, budget)?;
    let narrow = |x: u128| u64::try_from(x).map_err(|_| Error::ModulusTooLarge(n));
    Ok(Metrics {
        n,
        a: g.a(),
        diameter: d.diameter(),
        type_vector,
        pi: narrow(pi)?,
        arc_pi: narrow(weighted)?,
        gossip_time: (n - 1) / 6,
        wiener: 3 * n as u128 * weighted,
        broadcast_horizon: bt.scheme_horizon,
        broadcast_time: bt.value(),
        broadcast_exact: bt.status == BroadcastStatus::Exact,
    })
}

/// The two parity-dependent closed forms for the forwarding index in terms
/// of the EJ pair `(c, d)` and the diameter, set against the diagram value.
/// Reported only; the diagram value is authoritative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CdFormulaReport {
    pub c: i64,
    pub d: i64,
    pub diameter: u64,
    pub parity: &'static str,
    /// Exact rational value, rendered `p/q` or `p`.
    pub formula: String,
    pub forwarding_index: u64,
    pub agrees: bool,
}

pub fn cd_formula_report(g: &FrobeniusCirculant) -> Result<CdFormulaReport> {
    let (c, d) = circulant_to_ej(g)?.canonicalize()?;
    let diag = build_diagram(g)?;
    let dd = diag.diameter() as i128;
    let pi = u64::try_from(diag.forwarding_index()).map_err(|_| Error::ModulusTooLarge(g.n()))?;
    let (ci, di, n) = (c as i128, d as i128, g.n() as i128);
    let q = |p: i128, r: i128| Ratio::new(p, r);
    let (parity, value) = if (c + d) % 2 != 0 {
        let v = q(dd * (dd + 1) * ((2 * ci + di) - (2 * dd + 1)), 1)
            - q((2 * ci - di) * ((ci + di) * (ci + di) - 1), 12);
        ("odd", v)
    } else {
        let v = q(dd * (dd + 1) * ((7 * ci + 5 * di) - 2 * (2 * dd + 1)), 2)
            + q((ci + di) * (ci + di) * (4 * ci + di - 6), 12)
            + q(n - 3 * ci - 5 - 6 * dd * (2 * ci + di), 6);
        ("even", v)
    };
    Ok(CdFormulaReport {
        c,
        d,
        diameter: diag.diameter(),
        parity,
        formula: value.to_string(),
        forwarding_index: pi,
        agrees: value == Ratio::from_integer(pi as i128),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_of_figure_example() {
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        let m = metrics(&g, 0, 0).unwrap();
        assert_eq!(m.diameter, 4);
        assert_eq!(m.type_vector, vec![1, 2, 3, 2]);
        assert_eq!((m.pi, m.arc_pi, m.gossip_time), (44, 22, 8));
        assert_eq!(m.wiener, 3234);
        assert_eq!((m.broadcast_horizon, m.broadcast_time), (7, 7));
        assert!(!m.broadcast_exact);
        let m = metrics(&g, EXACT_SEARCH_BOUND, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!((m.broadcast_horizon, m.broadcast_time), (7, 6));
        assert!(m.broadcast_exact);
    }

    #[test]
    fn metric_identities() {
        for (n, a) in [
            (7, 3),
            (13, 4),
            (19, 8),
            (37, 11),
            (91, 17),
            (91, 10),
            (127, 20),
        ] {
            let Ok(g) = FrobeniusCirculant::new(n, a) else {
                continue;
            };
            let m = metrics(&g, 0, 0).unwrap();
            assert_eq!(m.pi, 2 * m.arc_pi);
            assert_eq!(m.gossip_time, (n - 1) / 6);
            assert_eq!(2 * m.wiener, 3 * n as u128 * m.pi as u128);
        }
    }

    #[test]
    fn cd_report_is_rational() {
        let g = FrobeniusCirculant::new(49, 31).unwrap();
        let r = cd_formula_report(&g).unwrap();
        assert_eq!((r.c, r.d, r.parity), (5, 3, "even"));
        assert_eq!(r.formula, "727/2");
        assert!(!r.agrees);
    }
}
