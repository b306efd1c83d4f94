//! Vertex-disjoint path systems and strong connectivity.
//!
//! Everything here reduces to unit-capacity max-flow on the vertex-split
//! network: vertex `v` becomes `v_in -> v_out` with capacity one, every edge
//! `u -> w` of the tournament becomes `u_out -> w_in`, a super-source feeds the
//! source set and the sink set drains into a super-sink. The split network is
//! never materialised; residual arcs are derived on the fly from the
//! tournament's adjacency bitsets and a successor array describing the
//! current flow.

use thiserror::Error;

use crate::tournament::{Path, Tournament};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("allowed vertex set is empty")]
    EmptyAllowed,
    #[error("source {0} is not in the allowed set")]
    SourceNotAllowed(usize),
    #[error("sink {0} is not in the allowed set")]
    SinkNotAllowed(usize),
    #[error("vertex set universe {found} does not match tournament order {expected}")]
    UniverseMismatch { expected: usize, found: usize },
}

/// A maximum family of pairwise vertex-disjoint source-to-sink paths together
/// with a separator of the same size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPathSet {
    pub paths: Vec<Path>,
    /// Every source-to-sink path inside the allowed set meets this set.
    pub cut: VertexSet,
}

/// Maximum set of fully vertex-disjoint paths from `sources` to `sinks` using
/// only `allowed` vertices.
///
/// Each returned path runs from `sources` to `sinks` and has no other
/// vertex in either set. A vertex in both sets yields a one-vertex path.
/// Paths are listed in ascending order of their start vertex.
pub fn disjoint_paths(
    t: &Tournament,
    sources: &VertexSet,
    sinks: &VertexSet,
    allowed: &VertexSet,
) -> Result<DisjointPathSet, FlowError> {
    for set in [sources, sinks, allowed] {
        if set.universe() != t.n() {
            return Err(FlowError::UniverseMismatch {
                expected: t.n(),
                found: set.universe(),
            });
        }
    }
    if allowed.is_empty() {
        return Err(FlowError::EmptyAllowed);
    }
    if let Some(v) = sources.difference(allowed).first() {
        return Err(FlowError::SourceNotAllowed(v));
    }
    if let Some(v) = sinks.difference(allowed).first() {
        return Err(FlowError::SinkNotAllowed(v));
    }
    let mut flow = SplitFlow::new(t, sources, sinks, allowed);
    flow.run(usize::MAX);
    let paths = flow.paths();
    let cut = flow.min_cut();
    debug_assert_eq!(paths.len(), cut.len());
    Ok(DisjointPathSet { paths, cut })
}

const NONE: usize = usize::MAX;
/// `succ` marker: the vertex drains into the super-sink.
const TO_SINK: usize = usize::MAX - 1;
/// `pred` marker: the vertex is fed by the super-source.
const FROM_SOURCE: usize = usize::MAX - 1;

struct SplitFlow<'a> {
    t: &'a Tournament,
    sources: &'a VertexSet,
    sinks: &'a VertexSet,
    allowed: &'a VertexSet,
    n: usize,
    succ: Vec<usize>,
    pred: Vec<usize>,
    value: usize,
    // phase scratch, indexed by split node
    level: Vec<u32>,
    next_arc: Vec<usize>,
}

const UNSEEN: u32 = u32::MAX;

// Split-node numbering: v_in = 2v, v_out = 2v + 1, then the two terminals.
#[inline]
fn vin(v: usize) -> usize {
    2 * v
}
#[inline]
fn vout(v: usize) -> usize {
    2 * v + 1
}

impl<'a> SplitFlow<'a> {
    fn new(
        t: &'a Tournament,
        sources: &'a VertexSet,
        sinks: &'a VertexSet,
        allowed: &'a VertexSet,
    ) -> Self {
        let n = t.n();
        Self {
            t,
            sources,
            sinks,
            allowed,
            n,
            succ: vec![NONE; n],
            pred: vec![NONE; n],
            value: 0,
            level: vec![UNSEEN; 2 * n + 2],
            next_arc: vec![0; 2 * n + 2],
        }
    }

    fn super_source(&self) -> usize {
        2 * self.n
    }

    fn super_sink(&self) -> usize {
        2 * self.n + 1
    }

    fn on_flow(&self, v: usize) -> bool {
        self.succ[v] != NONE
    }

    /// Target of residual arc number `idx` leaving `node`, if that arc exists
    /// and has residual capacity. Arc numbering per node kind:
    /// super-source: `idx = s`; `v_in`: 0 through, 1 reverse-of-incoming;
    /// `v_out`: 0 to super-sink, `1..=n` to `w_in` with `w = idx - 1`,
    /// `n + 1` reverse through.
    fn arc(&self, node: usize, idx: usize) -> Option<usize> {
        let n = self.n;
        if node == self.super_source() {
            let s = idx;
            return (self.sources.contains(s) && self.pred[s] != FROM_SOURCE).then(|| vin(s));
        }
        let v = node / 2;
        if node.is_multiple_of(2) {
            match idx {
                0 => (!self.on_flow(v)).then(|| vout(v)),
                1 => {
                    let p = self.pred[v];
                    (p != NONE && p != FROM_SOURCE).then(|| vout(p))
                }
                _ => None,
            }
        } else if idx == 0 {
            (self.sinks.contains(v) && self.succ[v] != TO_SINK).then(|| self.super_sink())
        } else if idx <= n {
            let w = idx - 1;
            (self.t.edge(v, w) && self.allowed.contains(w) && self.succ[v] != w).then(|| vin(w))
        } else if idx == n + 1 {
            self.on_flow(v).then(|| vin(v))
        } else {
            None
        }
    }

    fn arc_count(&self, node: usize) -> usize {
        if node == self.super_source() {
            self.n
        } else if node.is_multiple_of(2) {
            2
        } else {
            self.n + 2
        }
    }

    /// Breadth-first levels over the residual network; true if the sink is reached.
    fn build_levels(&mut self) -> bool {
        self.level.fill(UNSEEN);
        let src = self.super_source();
        let snk = self.super_sink();
        self.level[src] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        // w_in nodes not yet levelled, restricted to allowed vertices
        let mut fresh_in = self.allowed.clone();
        while let Some(node) = queue.pop_front() {
            let next = self.level[node] + 1;
            if node != src && node % 2 == 1 {
                // v_out: scan forward arcs through the bitset for speed
                let v = node / 2;
                if self.level[snk] == UNSEEN && self.sinks.contains(v) && self.succ[v] != TO_SINK {
                    self.level[snk] = next;
                }
                let mut cand = self.t.out_set(v).intersection(&fresh_in);
                if self.succ[v] < self.n {
                    cand.remove(self.succ[v]);
                }
                for w in cand.iter() {
                    fresh_in.remove(w);
                    self.level[vin(w)] = next;
                    queue.push_back(vin(w));
                }
                if self.on_flow(v) && self.level[vin(v)] == UNSEEN {
                    fresh_in.remove(v);
                    self.level[vin(v)] = next;
                    queue.push_back(vin(v));
                }
                continue;
            }
            for idx in 0..self.arc_count(node) {
                if let Some(to) = self.arc(node, idx) {
                    if self.level[to] == UNSEEN {
                        self.level[to] = next;
                        if to % 2 == 0 && to < 2 * self.n {
                            fresh_in.remove(to / 2);
                        }
                        if to != snk {
                            queue.push_back(to);
                        }
                    }
                }
            }
        }
        self.level[snk] != UNSEEN
    }

    /// Repeatedly augments along level-increasing paths until the level graph
    /// is blocked or `limit` is reached.
    fn blocking_flow(&mut self, limit: usize) {
        self.next_arc.fill(0);
        let src = self.super_source();
        let snk = self.super_sink();
        let mut stack: Vec<usize> = vec![src];
        while self.value < limit {
            let Some(&node) = stack.last() else { break };
            if node == snk {
                self.augment(&stack);
                self.value += 1;
                stack.truncate(1);
                continue;
            }
            let mut advanced = false;
            while self.next_arc[node] < self.arc_count(node) {
                if let Some(to) = self.arc(node, self.next_arc[node]) {
                    if self.level[to] == self.level[node] + 1 {
                        stack.push(to);
                        advanced = true;
                        break;
                    }
                }
                self.next_arc[node] += 1;
            }
            if !advanced {
                // dead end: retire the node for the rest of the phase
                self.level[node] = UNSEEN;
                stack.pop();
                if let Some(&parent) = stack.last() {
                    self.next_arc[parent] += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn augment(&mut self, path: &[usize]) {
        let src = self.super_source();
        let snk = self.super_sink();
        for pair in path.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == src {
                self.pred[b / 2] = FROM_SOURCE;
            } else if b == snk {
                self.succ[a / 2] = TO_SINK;
            } else if a % 2 == 1 && b % 2 == 0 && a / 2 != b / 2 {
                // forward u_out -> w_in
                self.succ[a / 2] = b / 2;
            } else if a % 2 == 0 && b % 2 == 1 && a / 2 != b / 2 {
                // reverse w_in -> u_out cancels u -> w
                self.succ[b / 2] = NONE;
            }
        }
        self.rebuild_pred();
    }

    fn rebuild_pred(&mut self) {
        let fed: Vec<bool> = (0..self.n).map(|v| self.pred[v] == FROM_SOURCE).collect();
        self.pred.fill(NONE);
        for (v, &was_fed) in fed.iter().enumerate() {
            if was_fed {
                self.pred[v] = FROM_SOURCE;
            }
        }
        for u in 0..self.n {
            let w = self.succ[u];
            if w < self.n {
                self.pred[w] = u;
            }
        }
    }

    fn run(&mut self, limit: usize) -> usize {
        while self.value < limit && self.build_levels() {
            self.blocking_flow(limit);
        }
        self.value
    }

    /// Decomposes the flow into paths from the source-fed vertices; any flow
    /// cycles are dropped. Paths are trimmed so that only their first vertex is
    /// a source and only their last vertex is a sink.
    fn paths(&self) -> Vec<Path> {
        let mut out = Vec::with_capacity(self.value);
        for s in 0..self.n {
            if self.pred[s] != FROM_SOURCE {
                continue;
            }
            let mut walk = vec![s];
            let mut v = s;
            while self.succ[v] != TO_SINK {
                v = self.succ[v];
                walk.push(v);
            }
            let start = walk
                .iter()
                .rposition(|&x| self.sources.contains(x))
                .expect("walk starts at a source");
            let end = start
                + walk[start..]
                    .iter()
                    .position(|&x| self.sinks.contains(x))
                    .expect("walk ends at a sink");
            out.push(Path::new(walk[start..=end].to_vec()));
        }
        out.sort_by_key(Path::start);
        out
    }

    /// Vertices whose split arc crosses the source side of the residual
    /// reachability frontier, treating inter-vertex arcs as uncapacitated.
    fn min_cut(&self) -> VertexSet {
        let n = self.n;
        let mut reach_in = VertexSet::empty(n);
        let mut reach_out = VertexSet::empty(n);
        let mut queue = std::collections::VecDeque::new();
        for s in self.sources.iter() {
            reach_in.insert(s);
            queue.push_back(vin(s));
        }
        while let Some(node) = queue.pop_front() {
            let v = node / 2;
            if node % 2 == 0 {
                if !self.on_flow(v) && !reach_out.contains(v) {
                    reach_out.insert(v);
                    queue.push_back(vout(v));
                }
                let p = self.pred[v];
                if p < n && !reach_out.contains(p) {
                    reach_out.insert(p);
                    queue.push_back(vout(p));
                }
            } else {
                debug_assert!(
                    !(self.sinks.contains(v)),
                    "super-sink reachable after max-flow"
                );
                let mut fresh = self.t.out_set(v).intersection(self.allowed);
                fresh.difference_with(&reach_in);
                for w in fresh.iter() {
                    reach_in.insert(w);
                    queue.push_back(vin(w));
                }
                if self.on_flow(v) && !reach_in.contains(v) {
                    reach_in.insert(v);
                    queue.push_back(vin(v));
                }
            }
        }
        reach_in.difference(&reach_out)
    }
}

/// Result of a strong-connectivity computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityCertificate {
    pub kappa: usize,
    /// A separator of size `kappa` and an ordered pair `(from, to)` such that
    /// `to` is unreachable from `from` once the separator is removed. `None`
    /// only for the one-vertex tournament.
    pub separation: Option<Separation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub separator: VertexSet,
    pub from: usize,
    pub to: usize,
}

/// Outcome of [`is_strongly_k_connected`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KConnectivity {
    Connected,
    /// A removal set of size at most `k - 1` leaving `to` unreachable from `from`.
    Separated(Separation),
    /// The tournament has a single vertex, so no pair can be separated, yet
    /// `k >= 1` requires at least `k + 1` vertices.
    TooSmall {
        n: usize,
        required: usize,
    },
}

impl KConnectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, KConnectivity::Connected)
    }
}

/// Maximum number of internally disjoint `a -> b` paths, for a pair with
/// `b -> a`; stops early once `limit` paths are found.
fn local_connectivity(
    t: &Tournament,
    a: usize,
    b: usize,
    limit: usize,
) -> (usize, Option<VertexSet>) {
    debug_assert!(t.edge(b, a));
    let mut allowed = t.all_vertices();
    allowed.remove(a);
    allowed.remove(b);
    if allowed.is_empty() {
        return (0, Some(allowed));
    }
    let sources = t.out_set(a).intersection(&allowed);
    let sinks = t.in_set(b).intersection(&allowed);
    let mut flow = SplitFlow::new(t, &sources, &sinks, &allowed);
    let value = flow.run(limit);
    if value < limit {
        (value, Some(flow.min_cut()))
    } else {
        (value, None)
    }
}

/// Exact strong connectivity with a separating witness.
///
/// Conventions: a one-vertex tournament has connectivity 0; otherwise the
/// value is at most `n - 2`, and 0 whenever the tournament is not strongly
/// connected.
///
/// Any minimum separator misses one of its first `kappa + 1` vertices, and a
/// vertex outside the separator is separated from some vertex on the other
/// side in one direction or the other. So it suffices to run local max-flows
/// from each of the first `best + 1` vertices against every other vertex in
/// the direction opposite to their edge.
pub fn connectivity_certificate(t: &Tournament) -> ConnectivityCertificate {
    let n = t.n();
    if n == 1 {
        return ConnectivityCertificate {
            kappa: 0,
            separation: None,
        };
    }
    // removing everything except {0, 1} always separates them one way
    let (from, to) = if t.edge(1, 0) { (0, 1) } else { (1, 0) };
    let mut separator = t.all_vertices();
    separator.remove(0);
    separator.remove(1);
    let mut best = Separation {
        separator,
        from,
        to,
    };
    let mut kappa = n - 2;
    let mut pivot = 0;
    while pivot <= kappa && pivot < n && kappa > 0 {
        for w in 0..n {
            if w == pivot || kappa == 0 {
                continue;
            }
            // exactly one of these directions lacks a direct edge
            let (a, b) = if t.edge(w, pivot) {
                (pivot, w)
            } else {
                (w, pivot)
            };
            let (value, cut) = local_connectivity(t, a, b, kappa);
            if value < kappa {
                kappa = value;
                best = Separation {
                    separator: cut.expect("cut is produced below the limit"),
                    from: a,
                    to: b,
                };
            }
        }
        pivot += 1;
    }
    ConnectivityCertificate {
        kappa,
        separation: Some(best),
    }
}

/// Exact strong connectivity κ(T).
pub fn strong_connectivity(t: &Tournament) -> usize {
    connectivity_certificate(t).kappa
}

/// Whether `t` stays strongly connected after removing any `k - 1` vertices,
/// with a witness when it does not.
pub fn is_strongly_k_connected(t: &Tournament, k: usize) -> KConnectivity {
    if k == 0 {
        return KConnectivity::Connected;
    }
    let cert = connectivity_certificate(t);
    if cert.kappa >= k {
        return KConnectivity::Connected;
    }
    match cert.separation {
        Some(sep) => KConnectivity::Separated(sep),
        None => KConnectivity::TooSmall {
            n: t.n(),
            required: k + 1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ids: &[usize]) -> VertexSet {
        VertexSet::from_ids(n, ids.iter().copied())
    }

    fn cyclic() -> Tournament {
        Tournament::rotational(3).unwrap()
    }

    #[test]
    fn transitive_direct_edges() {
        let t = Tournament::transitive(4);
        let r = disjoint_paths(&t, &set(4, &[0, 1]), &set(4, &[2, 3]), &t.all_vertices()).unwrap();
        assert_eq!(r.paths.len(), 2);
        assert_eq!(r.cut.len(), 2);
        for p in &r.paths {
            p.validate(&t).unwrap();
        }
    }

    #[test]
    fn cyclic_single_path() {
        let t = cyclic();
        let r = disjoint_paths(&t, &set(3, &[0]), &set(3, &[1]), &t.all_vertices()).unwrap();
        assert_eq!(r.paths, vec![Path::new(vec![0, 1])]);
        assert_eq!(r.cut.len(), 1);
    }

    #[test]
    fn shared_vertex_gives_trivial_path() {
        let t = Tournament::transitive(3);
        let r = disjoint_paths(&t, &set(3, &[1]), &set(3, &[1]), &t.all_vertices()).unwrap();
        assert_eq!(r.paths, vec![Path::single(1)]);
        assert_eq!(r.cut, set(3, &[1]));
    }

    #[test]
    fn no_backward_path_in_transitive() {
        let t = Tournament::transitive(5);
        let r = disjoint_paths(&t, &set(5, &[4]), &set(5, &[0]), &t.all_vertices()).unwrap();
        assert!(r.paths.is_empty());
        assert!(r.cut.is_empty());
    }

    #[test]
    fn paths_pass_through_intermediate_vertices() {
        // 0 -> 1 -> 2 with 2 -> 0: only route from 0 to 2 goes via 1
        let t = cyclic();
        let r = disjoint_paths(&t, &set(3, &[0]), &set(3, &[2]), &t.all_vertices()).unwrap();
        assert_eq!(r.paths, vec![Path::new(vec![0, 1, 2])]);
        let restricted =
            disjoint_paths(&t, &set(3, &[0]), &set(3, &[2]), &set(3, &[0, 2])).unwrap();
        assert!(restricted.paths.is_empty());
    }

    #[test]
    fn trimming_keeps_single_source_and_sink() {
        // transitive: 0 -> 1 -> 2 -> 3, sources {0,1}, sinks {3}
        let t = Tournament::transitive(4);
        let r = disjoint_paths(&t, &set(4, &[0, 1]), &set(4, &[2, 3]), &t.all_vertices()).unwrap();
        for p in &r.paths {
            assert_eq!(
                p.vertices().iter().filter(|v| [0, 1].contains(*v)).count(),
                1
            );
            assert_eq!(
                p.vertices().iter().filter(|v| [2, 3].contains(*v)).count(),
                1
            );
        }
    }

    #[test]
    fn input_errors() {
        let t = cyclic();
        assert_eq!(
            disjoint_paths(&t, &set(3, &[]), &set(3, &[]), &set(3, &[])),
            Err(FlowError::EmptyAllowed)
        );
        assert_eq!(
            disjoint_paths(&t, &set(3, &[0]), &set(3, &[1]), &set(3, &[1])),
            Err(FlowError::SourceNotAllowed(0))
        );
        assert_eq!(
            disjoint_paths(&t, &set(3, &[0]), &set(3, &[1]), &set(3, &[0])),
            Err(FlowError::SinkNotAllowed(1))
        );
        assert!(matches!(
            disjoint_paths(&t, &set(4, &[0]), &set(3, &[1]), &set(3, &[0, 1])),
            Err(FlowError::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn connectivity_small_cases() {
        assert_eq!(strong_connectivity(&Tournament::transitive(1)), 0);
        assert_eq!(strong_connectivity(&Tournament::transitive(2)), 0);
        assert_eq!(strong_connectivity(&Tournament::transitive(6)), 0);
        assert_eq!(strong_connectivity(&cyclic()), 1);
        assert_eq!(strong_connectivity(&Tournament::rotational(5).unwrap()), 2);
        assert_eq!(strong_connectivity(&Tournament::rotational(7).unwrap()), 3);
    }

    #[test]
    fn k_connectivity_verdicts() {
        let t4 = Tournament::transitive(4);
        match is_strongly_k_connected(&t4, 1) {
            KConnectivity::Separated(sep) => {
                assert!(sep.separator.is_empty());
                assert!(t4.edge(sep.to, sep.from));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(is_strongly_k_connected(&Tournament::rotational(5).unwrap(), 2).is_connected());
        assert!(!is_strongly_k_connected(&Tournament::rotational(5).unwrap(), 3).is_connected());
        assert!(is_strongly_k_connected(&cyclic(), 1).is_connected());
        assert!(is_strongly_k_connected(&t4, 0).is_connected());
        assert_eq!(
            is_strongly_k_connected(&Tournament::transitive(1), 1),
            KConnectivity::TooSmall { n: 1, required: 2 }
        );
    }
}
