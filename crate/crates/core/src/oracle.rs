//! Exhaustive ground-truth checks for small tournaments.
//!
//! Nothing here shares code with the flow or linkage machinery. Vertex sets
//! are plain `u64` masks and path systems are enumerated by backtracking over
//! the adjacency predicate.
//! Running out of budget is reported as an error, never as a negative answer.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::tournament::{Path, Tournament};

/// Hard ceiling imposed by the mask representation.
pub const MASK_LIMIT: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_nodes_expanded: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_n: 12,
            max_nodes_expanded: 500_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget fields must be positive")]
    InvalidBudget,
    #[error("n = {n} exceeds the oracle limit {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("search budget of {limit} nodes exhausted")]
    BudgetExceeded { limit: u64 },
    #[error("invalid terminals: {0}")]
    BadTerminals(String),
}

/// Verdict of [`bf_is_k_linked`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkedVerdict {
    Linked,
    /// Terminals for which no disjoint path system exists.
    NotLinked {
        sources: Vec<usize>,
        sinks: Vec<usize>,
    },
}

struct Meter {
    used: u64,
    limit: u64,
}

impl Meter {
    fn new(budget: &OracleBudget) -> Self {
        Self {
            used: 0,
            limit: budget.max_nodes_expanded,
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.limit {
            Err(OracleError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

fn admit(t: &Tournament, budget: &OracleBudget) -> Result<(), OracleError> {
    if budget.max_n == 0 || budget.max_nodes_expanded == 0 {
        return Err(OracleError::InvalidBudget);
    }
    let max_n = budget.max_n.min(MASK_LIMIT);
    if t.n() > max_n {
        return Err(OracleError::TooLarge { n: t.n(), max_n });
    }
    Ok(())
}

fn out_masks(t: &Tournament) -> Vec<u64> {
    (0..t.n())
        .map(|u| {
            (0..t.n())
                .filter(|&v| t.edge(u, v))
                .fold(0u64, |m, v| m | 1 << v)
        })
        .collect()
}

fn reach(adj: &[u64], start: usize, within: u64) -> u64 {
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let mut fresh = adj[u] & within & !seen;
        seen |= fresh;
        while fresh != 0 {
            let v = fresh.trailing_zeros() as usize;
            fresh &= fresh - 1;
            stack.push(v);
        }
    }
    seen
}

fn strongly_connected(out: &[u64], inn: &[u64], within: u64) -> bool {
    if within.count_ones() <= 1 {
        return true;
    }
    let root = within.trailing_zeros() as usize;
    reach(out, root, within) == within && reach(inn, root, within) == within
}

/// κ(T) by trying every removal set in order of increasing size.
///
/// Matches the flow-based convention: 0 for one vertex, at most `n - 2`
/// otherwise, 0 when not strongly connected.
pub fn bf_strong_connectivity(t: &Tournament, budget: &OracleBudget) -> Result<usize, OracleError> {
    admit(t, budget)?;
    let n = t.n();
    if n == 1 {
        return Ok(0);
    }
    let out = out_masks(t);
    let inn: Vec<u64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| t.edge(u, v))
                .fold(0u64, |m, u| m | 1 << u)
        })
        .collect();
    let full = (1u64 << n) - 1;
    let mut meter = Meter::new(budget);
    for size in 0..=n - 2 {
        for removed in subsets_of_size(n, size) {
            meter.tick()?;
            if !strongly_connected(&out, &inn, full & !removed) {
                return Ok(size);
            }
        }
    }
    unreachable!("removing all but two vertices always disconnects a tournament")
}

/// All `size`-subsets of `0..n` as masks, in colex order.
fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if size == 0 { 0 } else { (1u64 << size) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

/// Vertex-disjoint paths joining each `(source, sink)` pair, found by
/// backtracking. Pairs are handled in the given order; each pair's paths are
/// tried shortest first with ascending vertex ids. `Ok(None)` means no such
/// system exists.
pub fn bf_disjoint_paths(
    t: &Tournament,
    pairs: &[(usize, usize)],
    budget: &OracleBudget,
) -> Result<Option<Vec<Path>>, OracleError> {
    admit(t, budget)?;
    let mut meter = Meter::new(budget);
    disjoint_paths_metered(t, &out_masks(t), pairs, &mut meter)
}

fn disjoint_paths_metered(
    t: &Tournament,
    adj: &[u64],
    pairs: &[(usize, usize)],
    meter: &mut Meter,
) -> Result<Option<Vec<Path>>, OracleError> {
    let mut terminals = 0u64;
    for &(s, e) in pairs {
        for v in [s, e] {
            if v >= t.n() {
                return Err(OracleError::BadTerminals(format!(
                    "vertex {v} out of range"
                )));
            }
            if terminals & (1 << v) != 0 {
                return Err(OracleError::BadTerminals(format!("vertex {v} repeats")));
            }
            terminals |= 1 << v;
        }
    }
    let mut search = PairSearch {
        adj,
        n: t.n(),
        pairs,
        dead: HashSet::new(),
        chosen: Vec::with_capacity(pairs.len()),
    };
    if search.solve(0, terminals, meter)? {
        Ok(Some(search.chosen.into_iter().map(Path::new).collect()))
    } else {
        Ok(None)
    }
}

struct PairSearch<'a> {
    adj: &'a [u64],
    n: usize,
    pairs: &'a [(usize, usize)],
    /// `(pair index, used mask)` states already shown to have no completion.
    dead: HashSet<(usize, u64)>,
    chosen: Vec<Vec<usize>>,
}

impl PairSearch<'_> {
    fn solve(&mut self, i: usize, used: u64, meter: &mut Meter) -> Result<bool, OracleError> {
        if i == self.pairs.len() {
            return Ok(true);
        }
        if self.dead.contains(&(i, used)) {
            return Ok(false);
        }
        let (s, e) = self.pairs[i];
        // endpoints of this pair are free for it; everything else in `used` is not
        let free = !used | (1 << s) | (1 << e);
        for len in 1..self.n {
            let mut walk = vec![s];
            if self.extend(i, &mut walk, len, e, free, used, meter)? {
                return Ok(true);
            }
        }
        self.dead.insert((i, used));
        Ok(false)
    }

    /// Enumerates simple paths of exactly `len` edges from the end of `walk`
    /// to `target`; on each, tries to complete the remaining pairs.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        i: usize,
        walk: &mut Vec<usize>,
        len: usize,
        target: usize,
        free: u64,
        used: u64,
        meter: &mut Meter,
    ) -> Result<bool, OracleError> {
        meter.tick()?;
        let u = *walk.last().expect("walk starts nonempty");
        let on_walk = walk.iter().fold(0u64, |m, &v| m | 1 << v);
        let steps_left = len + 1 - walk.len();
        if steps_left == 1 {
            if self.adj[u] & (1 << target) == 0 {
                return Ok(false);
            }
            walk.push(target);
            let path_mask = on_walk | 1 << target;
            self.chosen.push(walk.clone());
            if self.solve(i + 1, used | path_mask, meter)? {
                return Ok(true);
            }
            self.chosen.pop();
            walk.pop();
            return Ok(false);
        }
        let mut next = self.adj[u] & free & !on_walk & !(1 << target);
        while next != 0 {
            let v = next.trailing_zeros() as usize;
            next &= next - 1;
            walk.push(v);
            let done = self.extend(i, walk, len, target, free, used, meter)?;
            if done {
                return Ok(true);
            }
            walk.pop();
        }
        Ok(false)
    }
}

/// Largest number of pairwise vertex-disjoint paths from `sources` to
/// `sinks` inside `allowed`, by exhaustive search over path systems.
///
/// Any simple path inside `allowed` from a source to a sink counts, even if it
/// passes through other terminals; a vertex in both sets is a path by itself.
pub fn bf_max_disjoint_paths(
    t: &Tournament,
    sources: &[usize],
    sinks: &[usize],
    allowed: &[usize],
    budget: &OracleBudget,
) -> Result<usize, OracleError> {
    admit(t, budget)?;
    let to_mask = |vs: &[usize]| -> Result<u64, OracleError> {
        vs.iter().try_fold(0u64, |m, &v| {
            if v >= t.n() {
                Err(OracleError::BadTerminals(format!(
                    "vertex {v} out of range"
                )))
            } else {
                Ok(m | 1 << v)
            }
        })
    };
    let allowed = to_mask(allowed)?;
    let sink_mask = to_mask(sinks)?;
    let mut srcs: Vec<usize> = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    let adj = out_masks(t);
    let mut meter = Meter::new(budget);
    let mut memo = HashMap::new();
    best_from(&adj, &srcs, 0, !allowed, sink_mask, &mut memo, &mut meter)
}

fn best_from(
    adj: &[u64],
    srcs: &[usize],
    i: usize,
    used: u64,
    sinks: u64,
    memo: &mut HashMap<(usize, u64), usize>,
    meter: &mut Meter,
) -> Result<usize, OracleError> {
    if i == srcs.len() {
        return Ok(0);
    }
    if let Some(&v) = memo.get(&(i, used)) {
        return Ok(v);
    }
    let mut best = best_from(adj, srcs, i + 1, used, sinks, memo, meter)?;
    let s = srcs[i];
    if used & (1 << s) == 0 {
        let mut masks = HashSet::new();
        collect_path_masks(adj, s, 1 << s, used, sinks, &mut masks, meter)?;
        let mut masks: Vec<u64> = masks.into_iter().collect();
        masks.sort_unstable();
        for m in masks {
            let with = 1 + best_from(adj, srcs, i + 1, used | m, sinks, memo, meter)?;
            best = best.max(with);
        }
    }
    memo.insert((i, used), best);
    Ok(best)
}

/// Vertex masks of every simple path starting at the first vertex of `on`
/// (currently at `u`) that ends on a sink.
fn collect_path_masks(
    adj: &[u64],
    u: usize,
    on: u64,
    used: u64,
    sinks: u64,
    out: &mut HashSet<u64>,
    meter: &mut Meter,
) -> Result<(), OracleError> {
    meter.tick()?;
    if sinks & (1 << u) != 0 {
        out.insert(on);
    }
    let mut next = adj[u] & !used & !on;
    while next != 0 {
        let v = next.trailing_zeros() as usize;
        next &= next - 1;
        collect_path_masks(adj, v, on | 1 << v, used, sinks, out, meter)?;
    }
    Ok(())
}

/// Decides `k`-linkedness by checking every ordered choice of `2k` distinct
/// terminals, in lexicographic order of `(x_1..x_k, y_1..y_k)`.
pub fn bf_is_k_linked(
    t: &Tournament,
    k: usize,
    budget: &OracleBudget,
) -> Result<LinkedVerdict, OracleError> {
    admit(t, budget)?;
    let n = t.n();
    if k == 0 {
        return Ok(LinkedVerdict::Linked);
    }
    if 2 * k > n {
        return Err(OracleError::BadTerminals(format!(
            "2k = {} exceeds n = {n}",
            2 * k
        )));
    }
    let adj = out_masks(t);
    let mut meter = Meter::new(budget);
    let mut tuple = Vec::with_capacity(2 * k);
    let verdict = each_tuple(n, 2 * k, &mut tuple, 0, &mut |terms: &[usize]| {
        let pairs: Vec<(usize, usize)> = (0..k).map(|i| (terms[i], terms[k + i])).collect();
        Ok(disjoint_paths_metered(t, &adj, &pairs, &mut meter)?.is_none())
    })?;
    Ok(match verdict {
        None => LinkedVerdict::Linked,
        Some(terms) => LinkedVerdict::NotLinked {
            sources: terms[..k].to_vec(),
            sinks: terms[k..].to_vec(),
        },
    })
}

/// Visits ordered tuples of distinct vertices; stops at the first tuple for
/// which `hit` returns true and returns it.
fn each_tuple(
    n: usize,
    len: usize,
    tuple: &mut Vec<usize>,
    taken: u64,
    hit: &mut dyn FnMut(&[usize]) -> Result<bool, OracleError>,
) -> Result<Option<Vec<usize>>, OracleError> {
    if tuple.len() == len {
        return Ok(hit(tuple)?.then(|| tuple.clone()));
    }
    for v in 0..n {
        if taken & (1 << v) != 0 {
            continue;
        }
        tuple.push(v);
        if let Some(found) = each_tuple(n, len, tuple, taken | 1 << v, hit)? {
            return Ok(Some(found));
        }
        tuple.pop();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn subset_enumeration_counts() {
        assert_eq!(subsets_of_size(5, 0).count(), 1);
        assert_eq!(subsets_of_size(5, 2).count(), 10);
        assert_eq!(subsets_of_size(6, 3).count(), 20);
        assert!(subsets_of_size(6, 3).all(|m| m.count_ones() == 3 && m < 64));
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(
            bf_strong_connectivity(&Tournament::rotational(3).unwrap(), &budget()),
            Ok(1)
        );
        assert_eq!(
            bf_strong_connectivity(&Tournament::transitive(4), &budget()),
            Ok(0)
        );
        assert_eq!(
            bf_strong_connectivity(&Tournament::rotational(5).unwrap(), &budget()),
            Ok(2)
        );
        assert_eq!(
            bf_strong_connectivity(&Tournament::rotational(7).unwrap(), &budget()),
            Ok(3)
        );
        assert_eq!(
            bf_strong_connectivity(&Tournament::transitive(1), &budget()),
            Ok(0)
        );
        assert_eq!(
            bf_strong_connectivity(&Tournament::transitive(2), &budget()),
            Ok(0)
        );
    }

    #[test]
    fn budget_limits() {
        let t = Tournament::random(20, 1);
        assert_eq!(
            bf_strong_connectivity(&t, &budget()),
            Err(OracleError::TooLarge { n: 20, max_n: 12 })
        );
        let tight = OracleBudget {
            max_n: 12,
            max_nodes_expanded: 3,
        };
        assert_eq!(
            bf_strong_connectivity(&Tournament::rotational(11).unwrap(), &tight),
            Err(OracleError::BudgetExceeded { limit: 3 })
        );
        let zero = OracleBudget {
            max_n: 0,
            max_nodes_expanded: 1,
        };
        assert_eq!(
            bf_strong_connectivity(&Tournament::transitive(3), &zero),
            Err(OracleError::InvalidBudget)
        );
    }

    #[test]
    fn disjoint_path_examples() {
        let c3 = Tournament::rotational(3).unwrap();
        assert_eq!(
            bf_disjoint_paths(&c3, &[(0, 1)], &budget()),
            Ok(Some(vec![Path::new(vec![0, 1])]))
        );
        // shortest first: 0 -> 2 is not an edge, so the route goes via 1
        assert_eq!(
            bf_disjoint_paths(&c3, &[(0, 2)], &budget()),
            Ok(Some(vec![Path::new(vec![0, 1, 2])]))
        );
        assert_eq!(
            bf_disjoint_paths(&Tournament::transitive(4), &[(3, 0)], &budget()),
            Ok(None)
        );
        assert!(matches!(
            bf_disjoint_paths(&c3, &[(0, 0)], &budget()),
            Err(OracleError::BadTerminals(_))
        ));
    }

    #[test]
    fn paths_avoid_other_terminals() {
        let c5 = Tournament::rotational(5).unwrap();
        let found = bf_disjoint_paths(&c5, &[(0, 2), (3, 4)], &budget())
            .unwrap()
            .unwrap();
        assert!(found[0].vertices().iter().all(|v| ![3, 4].contains(v)));
    }

    #[test]
    fn reachability_agrees_with_single_pair_search() {
        for seed in 0..40 {
            let t = Tournament::random(8, seed);
            let adj = out_masks(&t);
            for s in 0..8 {
                let reached = reach(&adj, s, u64::MAX);
                for e in 0..8 {
                    if s == e {
                        continue;
                    }
                    let found = bf_disjoint_paths(&t, &[(s, e)], &budget()).unwrap();
                    assert_eq!(found.is_some(), reached & (1 << e) != 0);
                    if let Some(p) = found {
                        p[0].validate(&t).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn max_disjoint_examples() {
        let t = Tournament::transitive(4);
        assert_eq!(
            bf_max_disjoint_paths(&t, &[0, 1], &[2, 3], &[0, 1, 2, 3], &budget()),
            Ok(2)
        );
        assert_eq!(
            bf_max_disjoint_paths(&t, &[3], &[0], &[0, 1, 2, 3], &budget()),
            Ok(0)
        );
        assert_eq!(
            bf_max_disjoint_paths(&t, &[1], &[1], &[1], &budget()),
            Ok(1)
        );
        let c3 = Tournament::rotational(3).unwrap();
        assert_eq!(
            bf_max_disjoint_paths(&c3, &[0], &[2], &[0, 2], &budget()),
            Ok(0)
        );
        assert_eq!(
            bf_max_disjoint_paths(&c3, &[0], &[2], &[0, 1, 2], &budget()),
            Ok(1)
        );
    }

    #[test]
    fn linkedness_examples() {
        let c3 = Tournament::rotational(3).unwrap();
        assert_eq!(bf_is_k_linked(&c3, 1, &budget()), Ok(LinkedVerdict::Linked));
        let t3 = Tournament::transitive(3);
        let verdict = bf_is_k_linked(&t3, 1, &budget()).unwrap();
        // lexicographically first failure; (2, 0) fails as well
        assert_eq!(
            verdict,
            LinkedVerdict::NotLinked {
                sources: vec![1],
                sinks: vec![0]
            }
        );
        assert_eq!(bf_disjoint_paths(&t3, &[(2, 0)], &budget()), Ok(None));
        assert!(bf_is_k_linked(&t3, 2, &budget()).is_err());
    }
}
