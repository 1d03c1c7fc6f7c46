//! Property tests over the public API, with BFS and brute-force oracles.

use std::sync::OnceLock;

use frobcirc::circulant::{all_generators, canonical_generator};
use frobcirc::covers::{ej_cover_expand, quotient_circulant, verify_cover};
use frobcirc::eisenstein::{ej_gcd, residue_system};
use frobcirc::graph::{bfs_distances, distance_profile, edges};
use frobcirc::numtheory::{classify, factorize, lift_solution, solve_frobenius_eq};
use frobcirc::scheduler::{
    broadcast_schedule, build_diagram, build_spanning_tree, gossip_schedule, metrics,
};
use frobcirc::simulator::{run_broadcast, run_gossip, run_gossip_translation, GOSSIP_SIM_BOUND};
use frobcirc::{EjInt, FrobeniusCirculant, Topology};
use proptest::prelude::*;

fn orders() -> &'static [u64] {
    static ORDERS: OnceLock<Vec<u64>> = OnceLock::new();
    ORDERS.get_or_init(|| {
        (7..=50_000)
            .filter(|&n| classify(n).map(|c| c.exists).unwrap_or(false))
            .collect()
    })
}

/// A constructible circulant of order at most `max`, any generator.
fn circulant(max: u64) -> impl Strategy<Value = FrobeniusCirculant> {
    let small: Vec<u64> = orders().iter().copied().filter(|&n| n <= max).collect();
    (prop::sample::select(small), any::<prop::sample::Index>()).prop_map(|(n, i)| {
        let gens = all_generators(n).unwrap();
        gens[i.index(gens.len())]
    })
}

fn ej(range: i64) -> impl Strategy<Value = EjInt> {
    (-range..=range, -range..=range).prop_map(|(x, y)| EjInt::new(x, y))
}

fn nonzero_ej(range: i64) -> impl Strategy<Value = EjInt> {
    ej(range).prop_filter("nonzero", |z| !z.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_pair_into_classes(n in 7u64..50_000) {
        let sols = solve_frobenius_eq(n).unwrap();
        let c = classify(n).unwrap();
        for &a in &sols {
            prop_assert_eq!((a * a + 1 + n - a % n) % n, 0);
            let partner = (n - a * a % n) % n;
            prop_assert!(sols.contains(&partner));
        }
        if c.exists {
            prop_assert_eq!(n % 6, 1);
            let f = factorize(n).unwrap();
            prop_assert!(f.factors.iter().all(|&(p, _)| p % 6 == 1));
            prop_assert_eq!(c.graph_count as usize * 2, sols.len());
        } else {
            prop_assert_eq!(c.graph_count, 0);
        }
    }

    #[test]
    fn lifting_preserves_residue(idx in any::<prop::sample::Index>(), s in 1u32..4) {
        let primes = [7u64, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97];
        let p = primes[idx.index(primes.len())];
        let pk = p.pow(s);
        for a in solve_frobenius_eq(pk).unwrap() {
            let lifted = lift_solution(p, a, s).unwrap();
            let next = pk * p;
            prop_assert_eq!(lifted % pk, a);
            prop_assert_eq!((lifted * lifted + 1 + next - lifted) % next, 0);
        }
    }

    #[test]
    fn closed_form_distance_matches_bfs(g in circulant(3_000)) {
        let dist = bfs_distances(&g, 0);
        for u in 0..g.n() {
            prop_assert_eq!(g.distance_closed_form(u).unwrap(), dist[u as usize] as u64);
        }
    }

    #[test]
    fn distance_multiset_is_source_independent(g in circulant(5_000), src in any::<prop::sample::Index>()) {
        let v = src.index(g.order());
        prop_assert_eq!(distance_profile(&g, v), distance_profile(&g, 0));
    }

    #[test]
    fn orbits_partition_and_rotate(g in circulant(5_000)) {
        let n = g.n();
        let mut seen = vec![false; n as usize];
        seen[0] = true;
        for x in 1..n {
            if seen[x as usize] {
                continue;
            }
            let orbit = g.h_orbit(x).unwrap();
            for w in orbit.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for y in orbit {
                prop_assert!(!seen[y as usize]);
                seen[y as usize] = true;
            }
        }
        prop_assert!(g.is_complete_rotation(g.a()).unwrap());
    }

    #[test]
    fn hamilton_cycles_cover_edges_once(g in circulant(5_000)) {
        let n = g.n();
        let mut cycle_edges: Vec<(usize, usize)> = g
            .hamilton_decomposition()
            .iter()
            .flat_map(|c| {
                (0..c.len()).map(move |i| {
                    let (u, v) = (c[i] as usize, c[(i + 1) % c.len()] as usize);
                    (u.min(v), u.max(v))
                })
            })
            .collect();
        prop_assert_eq!(cycle_edges.len() as u64, 3 * n);
        cycle_edges.sort_unstable();
        prop_assert_eq!(cycle_edges, edges(&g));
    }

    #[test]
    fn ring_laws(u in ej(1_000), v in ej(1_000), w in ej(1_000)) {
        prop_assert_eq!((u * v) * w, u * (v * w));
        prop_assert_eq!(u * v, v * u);
        prop_assert_eq!(u * (v + w), u * v + u * w);
        prop_assert_eq!((u * v).norm(), u.norm() * v.norm());
        let rho = EjInt::RHO;
        prop_assert_eq!(rho * rho, rho - EjInt::ONE);
        prop_assert_eq!(rho * rho * rho, -EjInt::ONE);
    }

    #[test]
    fn division_shrinks_norm(u in ej(100_000), v in nonzero_ej(1_000)) {
        let (q, r) = u.divmod(v).unwrap();
        prop_assert_eq!(q * v + r, u);
        prop_assert!(r.norm() < v.norm());
    }

    #[test]
    fn gcd_is_greatest(u in nonzero_ej(60), v in nonzero_ej(60), k in nonzero_ej(8)) {
        let (u, v) = (u * k, v * k);
        let g = ej_gcd(u, v).unwrap();
        prop_assert!(u.divisible_by(g).unwrap());
        prop_assert!(v.divisible_by(g).unwrap());
        prop_assert!(g.divisible_by(k).unwrap());
    }

    #[test]
    fn residue_system_is_complete(alpha in nonzero_ej(40)) {
        let reps = residue_system(alpha).unwrap();
        prop_assert_eq!(reps.len() as i128, alpha.norm());
        let mut reduced: Vec<EjInt> = reps.iter().map(|z| z.rem(alpha).unwrap()).collect();
        reduced.sort_by_key(|z| (z.x, z.y));
        reduced.dedup();
        prop_assert_eq!(reduced.len(), reps.len());
    }

    #[test]
    fn quotients_are_covers(g in circulant(20_000)) {
        let n = g.n();
        for m in (2..n).filter(|m| n % m == 0) {
            let (base, map) = quotient_circulant(&g, m).unwrap();
            prop_assert_eq!(base.canonical_generator(), canonical_generator(m, g.a() % m).unwrap());
            prop_assert_eq!(map.fold as u64, n / m);
            prop_assert!(verify_cover(&map, &g, &base));
        }
    }

    #[test]
    fn expanded_covers_are_six_regular(alpha in nonzero_ej(12), beta in nonzero_ej(6)) {
        prop_assume!(alpha.norm() >= 7 && alpha.norm() * beta.norm() <= 6_000);
        let (total, map) = ej_cover_expand(alpha, beta).unwrap();
        prop_assert_eq!(total.order() as i128, alpha.norm() * beta.norm());
        for v in 0..total.order() {
            let mut nb = total.neighbors(v);
            nb.sort_unstable();
            prop_assert!(nb.windows(2).all(|w| w[0] != w[1]));
        }
        prop_assert_eq!(map.fold as i128, beta.norm());
    }

    #[test]
    fn diagram_matches_bfs(g in circulant(50_000)) {
        let n = g.n();
        let d = build_diagram(&g).unwrap();
        prop_assert_eq!(d.profile.iter().sum::<u64>(), (n - 1) / 6);
        prop_assert!(d.profile.windows(2).all(|w| w[0] >= w[1]));
        let dist = bfs_distances(&g, 0);
        let mut hit = vec![false; n as usize];
        hit[0] = true;
        for cell in &d.y {
            prop_assert_eq!(dist[cell.residue as usize] as u64, cell.i + cell.j);
            for x in g.h_orbit(cell.residue).unwrap() {
                prop_assert!(!hit[x as usize]);
                hit[x as usize] = true;
            }
        }
        prop_assert!(hit.iter().all(|&b| b));
        prop_assert_eq!(d.diameter(), *dist.iter().max().unwrap() as u64);
    }

    #[test]
    fn metric_identities(g in circulant(5_000)) {
        let m = metrics(&g, 0, 0).unwrap();
        let n = g.n();
        prop_assert_eq!(m.pi, 2 * m.arc_pi);
        prop_assert_eq!(m.gossip_time, (n - 1) / 6);
        prop_assert_eq!(2 * m.wiener, 3 * n as u128 * m.pi as u128);
        let bfs_sum: u128 = bfs_distances(&g, 0).iter().map(|&x| x as u128).sum();
        prop_assert_eq!(m.wiener, n as u128 * bfs_sum / 2);
        prop_assert!(m.broadcast_time == m.diameter + 2 || m.broadcast_time == m.diameter + 3);
    }

    #[test]
    fn tree_levels_are_matchings(g in circulant(5_000)) {
        let d = build_diagram(&g).unwrap();
        let tree = build_spanning_tree(&g, &d).unwrap();
        let h = g.h_powers();
        for group in tree.groups() {
            let arcs = group.arcs(&h, g.n());
            // the first group is the star at the root; later ones are matchings
            let mut ends: Vec<usize> = arcs.iter().flat_map(|a| [a.tail, a.head]).collect();
            ends.sort_unstable();
            ends.dedup();
            prop_assert_eq!(ends.len(), if group.tail == 0 { 7 } else { 12 });
            for a in arcs {
                prop_assert!(g.is_adjacent(a.tail, a.head));
                prop_assert_eq!(tree.level(a.head as u64), tree.level(a.tail as u64) + 1);
            }
        }
    }

    #[test]
    fn broadcast_from_any_source(g in circulant(20_000), src in any::<prop::sample::Index>()) {
        let d = build_diagram(&g).unwrap();
        let s = broadcast_schedule(&g, &d).unwrap();
        let v = src.index(g.order()) as u64;
        let moved = s.translate(v, g.n());
        let report = run_broadcast(&g, &moved, v as usize);
        prop_assert!(report.valid, "{:?}", report.violations);
        prop_assert_eq!(report.completion_time, Some(s.horizon()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gossip_simulation_is_deterministic(g in circulant(600)) {
        let d = build_diagram(&g).unwrap();
        let tree = build_spanning_tree(&g, &d).unwrap();
        let plan = gossip_schedule(&tree);
        let first = run_gossip(&g, &plan, GOSSIP_SIM_BOUND).unwrap();
        let second = run_gossip(&g, &plan, GOSSIP_SIM_BOUND).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(&first, &run_gossip_translation(&g, &plan).unwrap());
        prop_assert_eq!(first.completion_time, Some((g.n() - 1) / 6));
    }

    #[test]
    fn dropped_transmission_is_caught(g in circulant(400), pick in any::<prop::sample::Index>()) {
        let d = build_diagram(&g).unwrap();
        let tree = build_spanning_tree(&g, &d).unwrap();
        let mut steps = gossip_schedule(&tree).to_explicit(GOSSIP_SIM_BOUND).unwrap().into_steps();
        let total: usize = steps.iter().map(Vec::len).sum();
        let mut k = pick.index(total);
        for step in steps.iter_mut() {
            if k < step.len() {
                step.remove(k);
                break;
            }
            k -= step.len();
        }
        let plan = frobcirc::simulator::ExplicitGossipSchedule::new(steps);
        let report = run_gossip(&g, &plan, GOSSIP_SIM_BOUND).unwrap();
        prop_assert!(!report.valid);
    }
}

#[test]
fn every_diagram_up_to_50000_partitions() {
    for &n in orders() {
        for g in all_generators(n).unwrap() {
            let d = build_diagram(&g).unwrap();
            let mut hit = vec![false; n as usize];
            hit[0] = true;
            for cell in &d.y {
                for x in g.h_orbit(cell.residue).unwrap() {
                    assert!(
                        !std::mem::replace(&mut hit[x as usize], true),
                        "TL_{n}({})",
                        g.a()
                    );
                }
            }
            assert!(hit.iter().all(|&b| b), "TL_{n}({})", g.a());
        }
    }
}
