//! The flow-based routines agree with exhaustive search on small tournaments.

use proptest::prelude::*;
use std::collections::VecDeque;
use tlink::flows::{connectivity_certificate, disjoint_paths, strong_connectivity};
use tlink::oracle::{
    bf_is_k_linked, bf_max_disjoint_paths, bf_strong_connectivity, LinkedVerdict, OracleBudget,
};
use tlink::{Tournament, VertexSet};

/// Vertices reachable from `from` inside `within`, by breadth-first search.
fn reachable(t: &Tournament, from: &VertexSet, within: &VertexSet) -> VertexSet {
    let mut seen = VertexSet::empty(t.n());
    let mut queue: VecDeque<usize> = from.iter().filter(|&v| within.contains(v)).collect();
    for &v in &queue {
        seen.insert(v);
    }
    while let Some(u) = queue.pop_front() {
        for v in within.iter() {
            if !seen.contains(v) && t.edge(u, v) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    seen
}

fn subset(n: usize, mask: u32, cap: usize) -> VertexSet {
    VertexSet::from_ids(n, (0..n).filter(|&v| mask & (1 << v) != 0).take(cap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn connectivity_matches_oracle(n in 1usize..=9, seed in any::<u64>()) {
        let t = Tournament::random(n, seed);
        let exact = bf_strong_connectivity(&t, &OracleBudget::default()).unwrap();
        prop_assert_eq!(strong_connectivity(&t), exact);
    }

    #[test]
    fn certificate_separates(n in 2usize..=9, seed in any::<u64>()) {
        let t = Tournament::random(n, seed);
        let cert = connectivity_certificate(&t);
        let sep = cert.separation.expect("n >= 2 has a separation");
        prop_assert_eq!(sep.separator.len(), cert.kappa);
        prop_assert!(!sep.separator.contains(sep.from) && !sep.separator.contains(sep.to));
        let rest = sep.separator.complement();
        let reached = reachable(&t, &VertexSet::from_ids(n, [sep.from]), &rest);
        prop_assert!(!reached.contains(sep.to));
    }

    #[test]
    fn menger_matches_oracle(
        n in 2usize..=9,
        seed in any::<u64>(),
        src in any::<u32>(),
        snk in any::<u32>(),
        drop in any::<u32>(),
    ) {
        let t = Tournament::random(n, seed);
        let sources = subset(n, src, 3);
        let sinks = subset(n, snk, 3);
        let mut allowed = VertexSet::full(n);
        for v in 0..n {
            if drop & (1 << v) != 0 && !sources.contains(v) && !sinks.contains(v) && v % 2 == 0 {
                allowed.remove(v);
            }
        }
        let found = disjoint_paths(&t, &sources, &sinks, &allowed).unwrap();
        let best = bf_max_disjoint_paths(
            &t,
            &sources.to_vec(),
            &sinks.to_vec(),
            &allowed.to_vec(),
            &OracleBudget::default(),
        )
        .unwrap();
        prop_assert_eq!(found.paths.len(), best);
        prop_assert_eq!(found.cut.len(), best);
        prop_assert!(found.cut.is_subset(&allowed));
        let reached = reachable(&t, &sources, &allowed.difference(&found.cut));
        prop_assert!(reached.is_disjoint(&sinks));
        let mut used = VertexSet::empty(n);
        for p in &found.paths {
            p.validate(&t).unwrap();
            prop_assert!(sources.contains(p.start()) && sinks.contains(p.end()));
            for &v in p.vertices() {
                prop_assert!(allowed.contains(v) && !used.contains(v));
                used.insert(v);
            }
        }
    }

    #[test]
    fn strong_implies_one_linked(n in 2usize..=7, seed in any::<u64>()) {
        let t = Tournament::random(n, seed);
        if strong_connectivity(&t) >= 1 {
            prop_assert_eq!(bf_is_k_linked(&t, 1, &OracleBudget::default()).unwrap(), LinkedVerdict::Linked);
        }
    }

    #[test]
    fn removing_a_vertex_drops_kappa_by_at_most_one(n in 3usize..=9, seed in any::<u64>(), v in 0usize..9) {
        let t = Tournament::random(n, seed);
        let v = v % n;
        let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let sub = t.induced_on(&keep).unwrap().tournament;
        let (whole, part) = (strong_connectivity(&t), strong_connectivity(&sub));
        prop_assert!(part + 1 >= whole);
    }
}

#[test]
fn rotational_values_match_oracle() {
    let budget = OracleBudget::default();
    for (n, kappa) in [(3, 1), (5, 2), (7, 3), (9, 4), (11, 5)] {
        let t = Tournament::rotational(n).unwrap();
        assert_eq!(strong_connectivity(&t), kappa);
        assert_eq!(bf_strong_connectivity(&t, &budget).unwrap(), kappa);
    }
}
