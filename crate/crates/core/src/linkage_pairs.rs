//! Linkage pairs: disjoint vertex lists `X`, `Y` of equal size `m` such that
//! every bijection `X -> Y` is realised by vertex-disjoint paths of length at
//! most three.
//!
//! Construction takes the `m` vertices of largest out-degree as `X*` and the
//! `m` of largest in-degree among the rest as `Y*`. For every pair
//! `(x_i, y_j)` it splits the closed neighbourhoods `N⁺[x_i]` and `N⁻[y_j]`
//! into the common part `I_ij`, the x-only side and the y-only side, and
//! matches x-only vertices to y-only vertices along edges. Either some pair
//! leaves `m` unmatched vertices on both sides (then every edge between those
//! leftovers points from the y-only side to the x-only side, which yields a
//! pair joined by single edges), or every pair has at least `4m + 1`
//! internally disjoint routes of length at most three, enough to route any
//! permutation greedily.

use std::collections::VecDeque;

use thiserror::Error;

use crate::tournament::{Path, Tournament};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkageError {
    #[error("linkage pair needs m >= 1")]
    ZeroSize,
    #[error("linkage pair of size {m} needs at least {} vertices, have {n}", 11 * m)]
    TooFewVertices { n: usize, m: usize },
    #[error("vertex {v} has degree {degree} below the selection floor")]
    DegreeFloor { v: usize, degree: usize },
    #[error(
        "neither construction case holds: pair ({i},{j}) has only {routes} short routes, need {needed}"
    )]
    NeitherCase {
        i: usize,
        j: usize,
        routes: usize,
        needed: usize,
    },
    #[error("direct-edge pair is missing the edge {from} -> {to}")]
    MissingCrossEdge { from: usize, to: usize },
    #[error("not a permutation of 0..{m}: {detail}")]
    BadPermutation { m: usize, detail: String },
    #[error("no free short route from position {i} to position {j}")]
    NoCandidate { i: usize, j: usize },
    #[error("route verification failed: {0}")]
    Verification(String),
}

/// A matched edge `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchedArc {
    pub from: usize,
    pub to: usize,
}

/// Routing data for one `(x_i, y_j)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRoutes {
    /// `N⁺(x_i) ∩ N⁻(y_j)`.
    pub common: VertexSet,
    /// Maximum matching from the x-only side to the y-only side, ascending by `from`.
    pub matching: Vec<MatchedArc>,
}

impl PairRoutes {
    pub fn route_count(&self) -> usize {
        self.common.len() + self.matching.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkageMode {
    /// Every `X[i] -> Y[j]` is an edge.
    DirectEdges,
    /// `routes[i * m + j]` serves the pair `(X[i], Y[j])`.
    ShortPaths { routes: Vec<PairRoutes> },
}

impl LinkageMode {
    pub fn name(&self) -> &'static str {
        match self {
            LinkageMode::DirectEdges => "direct-edges",
            LinkageMode::ShortPaths { .. } => "short-paths",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkagePair {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub mode: LinkageMode,
}

impl LinkagePair {
    pub fn m(&self) -> usize {
        self.sources.len()
    }

    pub fn routes(&self, i: usize, j: usize) -> Option<&PairRoutes> {
        match &self.mode {
            LinkageMode::DirectEdges => None,
            LinkageMode::ShortPaths { routes } => Some(&routes[i * self.m() + j]),
        }
    }

    /// Smallest `|I_ij| + |M_ij|` over all pairs, or `None` in direct mode.
    pub fn min_route_count(&self) -> Option<usize> {
        match &self.mode {
            LinkageMode::DirectEdges => None,
            LinkageMode::ShortPaths { routes } => routes.iter().map(PairRoutes::route_count).min(),
        }
    }
}

/// The three-way split of closed neighbourhoods used for one `(x, y)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSplit {
    /// `N⁺[x] ∖ N⁻[y]`.
    pub x_side: VertexSet,
    /// `N⁻[y] ∖ N⁺[x]`.
    pub y_side: VertexSet,
    /// `N⁺(x) ∩ N⁻(y)`.
    pub common: VertexSet,
}

pub fn split_pair(t: &Tournament, x: usize, y: usize) -> PairSplit {
    let mut out_closed = t.out_set(x).clone();
    out_closed.insert(x);
    let mut in_closed = t.in_set(y).clone();
    in_closed.insert(y);
    PairSplit {
        x_side: out_closed.difference(&in_closed),
        y_side: in_closed.difference(&out_closed),
        common: t.out_set(x).intersection(t.in_set(y)),
    }
}

/// Maximum matching between `left` and `right` (disjoint id lists) under
/// `has_arc(l, r)`, by repeated breadth-first augmenting-path search from
/// each unmatched left vertex in ascending order. Returned as
/// `(left, right)` pairs ascending by left id.
pub fn max_bipartite_matching(
    left: &[usize],
    right: &[usize],
    has_arc: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    let mut left = left.to_vec();
    left.sort_unstable();
    let mut right = right.to_vec();
    right.sort_unstable();
    let nl = left.len();
    let nr = right.len();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&l| (0..nr).filter(|&r| has_arc(l, right[r])).collect())
        .collect();
    let mut match_l = vec![usize::MAX; nl];
    let mut match_r = vec![usize::MAX; nr];
    let mut parent_r = vec![usize::MAX; nr];
    let mut seen_r = vec![false; nr];
    for start in 0..nl {
        seen_r.fill(false);
        let mut queue = VecDeque::from([start]);
        let mut free_r = None;
        'search: while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                if seen_r[r] {
                    continue;
                }
                seen_r[r] = true;
                parent_r[r] = l;
                if match_r[r] == usize::MAX {
                    free_r = Some(r);
                    break 'search;
                }
                queue.push_back(match_r[r]);
            }
        }
        // flip the alternating path back to `start`
        let mut r = free_r;
        while let Some(cur) = r {
            let l = parent_r[cur];
            let prev = match_l[l];
            match_l[l] = cur;
            match_r[cur] = l;
            r = (prev != usize::MAX).then_some(prev);
        }
    }
    (0..nl)
        .filter(|&l| match_l[l] != usize::MAX)
        .map(|l| (left[l], right[match_l[l]]))
        .collect()
}

fn top_by<F: Fn(usize) -> usize>(candidates: &[usize], m: usize, key: F) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.sort_by_key(|&v| (std::cmp::Reverse(key(v)), v));
    order.truncate(m);
    order
}

pub fn find_linkage_pair(t: &Tournament, m: usize) -> Result<LinkagePair, LinkageError> {
    let n = t.n();
    if m == 0 {
        return Err(LinkageError::ZeroSize);
    }
    if 11 * m > n {
        return Err(LinkageError::TooFewVertices { n, m });
    }
    let out_deg = t.out_degrees();
    let in_deg = t.in_degrees();
    let everyone: Vec<usize> = t.vertices().collect();
    let xs = top_by(&everyone, m, |v| out_deg[v]);
    let rest: Vec<usize> = everyone
        .iter()
        .copied()
        .filter(|v| !xs.contains(v))
        .collect();
    let ys = top_by(&rest, m, |v| in_deg[v]);

    // (n - m)/2 - m, doubled to stay in integers
    let floor2 = n.saturating_sub(3 * m);
    for &x in &xs {
        if 2 * out_deg[x] < floor2 {
            return Err(LinkageError::DegreeFloor {
                v: x,
                degree: out_deg[x],
            });
        }
    }
    for &y in &ys {
        if 2 * in_deg[y] < floor2 {
            return Err(LinkageError::DegreeFloor {
                v: y,
                degree: in_deg[y],
            });
        }
    }

    let mut routes = Vec::with_capacity(m * m);
    for &x in &xs {
        for &y in &ys {
            let split = split_pair(t, x, y);
            let matching =
                max_bipartite_matching(&split.x_side.to_vec(), &split.y_side.to_vec(), |a, b| {
                    t.edge(a, b)
                });
            let mut x_free = split.x_side.clone();
            let mut y_free = split.y_side.clone();
            for &(a, b) in &matching {
                x_free.remove(a);
                y_free.remove(b);
            }
            if x_free.len() >= m && y_free.len() >= m {
                // all leftover edges run from the y side to the x side
                let pair = LinkagePair {
                    sources: y_free.iter().take(m).collect(),
                    sinks: x_free.iter().take(m).collect(),
                    mode: LinkageMode::DirectEdges,
                };
                check_direct_edges(t, &pair)?;
                return Ok(pair);
            }
            routes.push(PairRoutes {
                common: split.common,
                matching: matching
                    .into_iter()
                    .map(|(from, to)| MatchedArc { from, to })
                    .collect(),
            });
        }
    }
    let needed = 4 * m + 1;
    if let Some(pos) = routes.iter().position(|r| r.route_count() < needed) {
        return Err(LinkageError::NeitherCase {
            i: pos / m,
            j: pos % m,
            routes: routes[pos].route_count(),
            needed,
        });
    }
    Ok(LinkagePair {
        sources: xs,
        sinks: ys,
        mode: LinkageMode::ShortPaths { routes },
    })
}

fn check_direct_edges(t: &Tournament, pair: &LinkagePair) -> Result<(), LinkageError> {
    for &from in &pair.sources {
        for &to in &pair.sinks {
            if !t.edge(from, to) {
                return Err(LinkageError::MissingCrossEdge { from, to });
            }
        }
    }
    Ok(())
}

fn check_permutation(sigma: &[usize], m: usize) -> Result<(), LinkageError> {
    if sigma.len() != m {
        return Err(LinkageError::BadPermutation {
            m,
            detail: format!("length {}", sigma.len()),
        });
    }
    let mut seen = vec![false; m];
    for &s in sigma {
        if s >= m || seen[s] {
            return Err(LinkageError::BadPermutation {
                m,
                detail: format!("entry {s} out of range or repeated"),
            });
        }
        seen[s] = true;
    }
    Ok(())
}

/// Routes `sources[i]` to `sinks[sigma[i]]` for every `i` by pairwise
/// vertex-disjoint paths of length at most three. The output is verified
/// before it is returned.
pub fn route(
    t: &Tournament,
    pair: &LinkagePair,
    sigma: &[usize],
) -> Result<Vec<Path>, LinkageError> {
    let m = pair.m();
    check_permutation(sigma, m)?;
    let paths = match &pair.mode {
        LinkageMode::DirectEdges => (0..m)
            .map(|i| Path::new(vec![pair.sources[i], pair.sinks[sigma[i]]]))
            .collect(),
        LinkageMode::ShortPaths { routes } => {
            let mut blocked = VertexSet::from_ids(t.n(), pair.sources.iter().copied());
            for &y in &pair.sinks {
                blocked.insert(y);
            }
            let mut out = Vec::with_capacity(m);
            for (i, &j) in sigma.iter().enumerate() {
                let (x, y) = (pair.sources[i], pair.sinks[j]);
                let table = &routes[i * m + j];
                let via_common = table.common.iter().map(|v| vec![v]);
                let via_matching = table.matching.iter().map(|arc| {
                    [arc.from, arc.to]
                        .into_iter()
                        .filter(|&v| v != x && v != y)
                        .collect::<Vec<_>>()
                });
                let inner = via_common
                    .chain(via_matching)
                    .find(|inner| inner.iter().all(|&v| !blocked.contains(v)))
                    .ok_or(LinkageError::NoCandidate { i, j })?;
                for &v in &inner {
                    blocked.insert(v);
                }
                let mut verts = Vec::with_capacity(inner.len() + 2);
                verts.push(x);
                verts.extend(inner);
                verts.push(y);
                out.push(Path::new(verts));
            }
            out
        }
    };
    verify_routes(t, pair, sigma, &paths)?;
    Ok(paths)
}

/// Independent check of a routing: valid paths, correct endpoints, length at
/// most three, pairwise vertex-disjoint.
pub fn verify_routes(
    t: &Tournament,
    pair: &LinkagePair,
    sigma: &[usize],
    paths: &[Path],
) -> Result<(), LinkageError> {
    let m = pair.m();
    if paths.len() != m {
        return Err(LinkageError::Verification(format!(
            "{} paths for m = {m}",
            paths.len()
        )));
    }
    let mut used = VertexSet::empty(t.n());
    for (i, p) in paths.iter().enumerate() {
        p.validate(t)
            .map_err(|e| LinkageError::Verification(format!("path {i}: {e}")))?;
        if p.start() != pair.sources[i] || p.end() != pair.sinks[sigma[i]] {
            return Err(LinkageError::Verification(format!(
                "path {i} runs {} -> {}, expected {} -> {}",
                p.start(),
                p.end(),
                pair.sources[i],
                pair.sinks[sigma[i]]
            )));
        }
        if p.length() > 3 {
            return Err(LinkageError::Verification(format!(
                "path {i} has length {}",
                p.length()
            )));
        }
        for &v in p.vertices() {
            if used.contains(v) {
                return Err(LinkageError::Verification(format!(
                    "vertex {v} shared by two paths"
                )));
            }
            used.insert(v);
        }
    }
    Ok(())
}
