//! Partial greedy in- and out-dominating sequences.
//!
//! An in-flavoured sequence repeatedly picks a vertex of maximum in-degree
//! inside the current residual (ties to the smallest id) and shrinks the
//! residual to that vertex's out-neighbours. The vertices left over are
//! exactly those not in-dominated by the sequence, and every one of them has
//! out-degree at least `2^(k-1) |E|` inside the ground set. The out flavour is
//! the same construction on the reversed tournament.

use thiserror::Error;

use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    In,
    Out,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::In => "in",
            Flavor::Out => "out",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Flavor::In),
            "out" => Ok(Flavor::Out),
            other => Err(format!("unknown flavor {other:?} (expected in|out)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominationError {
    #[error("ground set is empty")]
    EmptyGround,
    #[error("sequence size must be at least 1")]
    ZeroSize,
    #[error("residual emptied after {achieved} of {requested} vertices")]
    Exhausted { achieved: usize, requested: usize },
    #[error("ground set universe {found} does not match tournament order {expected}")]
    UniverseMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingSequence {
    pub flavor: Flavor,
    /// Selected vertices in selection order.
    pub verts: Vec<usize>,
    /// Ground vertices not dominated by the sequence.
    pub residual: VertexSet,
    pub ground: VertexSet,
    /// Residual size before the first pick and after every pick
    /// (`verts.len() + 1` entries, the first being `|ground|`).
    pub residual_sizes: Vec<usize>,
}

impl DominatingSequence {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Head of the sequence viewed as a transitive tournament (the vertex
    /// every other member points to).
    pub fn head(&self) -> usize {
        match self.flavor {
            Flavor::In => *self.verts.last().expect("nonempty sequence"),
            Flavor::Out => self.verts[0],
        }
    }

    /// Tail of the sequence viewed as a transitive tournament (the vertex
    /// pointing to every other member).
    pub fn tail(&self) -> usize {
        match self.flavor {
            Flavor::In => self.verts[0],
            Flavor::Out => *self.verts.last().expect("nonempty sequence"),
        }
    }

    /// Members ordered from tail to head.
    pub fn tail_to_head(&self) -> Vec<usize> {
        match self.flavor {
            Flavor::In => self.verts.clone(),
            Flavor::Out => self.verts.iter().rev().copied().collect(),
        }
    }
}

pub fn greedy_in_dominating(
    t: &Tournament,
    ground: &VertexSet,
    size: usize,
) -> Result<DominatingSequence, DominationError> {
    greedy_dominating(t, ground, size, Flavor::In)
}

pub fn greedy_out_dominating(
    t: &Tournament,
    ground: &VertexSet,
    size: usize,
) -> Result<DominatingSequence, DominationError> {
    greedy_dominating(t, ground, size, Flavor::Out)
}

pub fn greedy_dominating(
    t: &Tournament,
    ground: &VertexSet,
    size: usize,
    flavor: Flavor,
) -> Result<DominatingSequence, DominationError> {
    if ground.universe() != t.n() {
        return Err(DominationError::UniverseMismatch {
            expected: t.n(),
            found: ground.universe(),
        });
    }
    if ground.is_empty() {
        return Err(DominationError::EmptyGround);
    }
    if size == 0 {
        return Err(DominationError::ZeroSize);
    }
    let mut residual = ground.clone();
    let mut verts = Vec::with_capacity(size);
    let mut residual_sizes = vec![residual.len()];
    while verts.len() < size {
        let mut pick: Option<(usize, usize)> = None;
        for v in residual.iter() {
            let d = match flavor {
                Flavor::In => t.in_degree_within(v, &residual),
                Flavor::Out => t.out_degree_within(v, &residual),
            };
            if pick.is_none_or(|(_, best)| d > best) {
                pick = Some((v, d));
            }
        }
        let Some((v, _)) = pick else {
            return Err(DominationError::Exhausted {
                achieved: verts.len(),
                requested: size,
            });
        };
        verts.push(v);
        match flavor {
            Flavor::In => residual.intersect_with(t.out_set(v)),
            Flavor::Out => residual.intersect_with(t.in_set(v)),
        }
        residual_sizes.push(residual.len());
    }
    Ok(DominatingSequence {
        flavor,
        verts,
        residual,
        ground: ground.clone(),
        residual_sizes,
    })
}

/// Whether `v` is dominated by `members` in the given flavour: a member
/// itself, or (in) `v` has an edge into some member, or (out) some member has
/// an edge into `v`.
pub fn dominates(t: &Tournament, flavor: Flavor, members: &[usize], v: usize) -> bool {
    members.iter().any(|&s| {
        s == v
            || match flavor {
                Flavor::In => t.edge(v, s),
                Flavor::Out => t.edge(s, v),
            }
    })
}

/// Every residual vertex has degree (out for the in flavour, in for the out
/// flavour) inside the ground set at least `2^(k-1) |E|`.
pub fn check_degree_bound(t: &Tournament, seq: &DominatingSequence) -> bool {
    let k = seq.verts.len();
    if k == 0 || seq.residual.is_empty() {
        return true;
    }
    let required = 1usize
        .checked_shl((k - 1) as u32)
        .and_then(|f| f.checked_mul(seq.residual.len()))
        .unwrap_or(usize::MAX);
    seq.residual.iter().all(|u| {
        let d = match seq.flavor {
            Flavor::In => t.out_degree_within(u, &seq.ground),
            Flavor::Out => t.in_degree_within(u, &seq.ground),
        };
        d >= required
    })
}

/// The members form a transitive tournament ordered from tail to head.
pub fn is_transitive_sequence(t: &Tournament, seq: &DominatingSequence) -> bool {
    let order = seq.tail_to_head();
    order
        .iter()
        .enumerate()
        .all(|(i, &a)| order[i + 1..].iter().all(|&b| t.edge(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(t: &Tournament) -> VertexSet {
        t.all_vertices()
    }

    #[test]
    fn transitive_in_picks_head() {
        let t = Tournament::transitive(5);
        let s = greedy_in_dominating(&t, &all(&t), 1).unwrap();
        assert_eq!(s.verts, vec![4]);
        assert!(s.residual.is_empty());
        assert_eq!(s.head(), 4);
    }

    #[test]
    fn transitive_out_picks_tail() {
        let t = Tournament::transitive(5);
        let s = greedy_out_dominating(&t, &all(&t), 1).unwrap();
        assert_eq!(s.verts, vec![0]);
        assert!(s.residual.is_empty());
        assert_eq!(s.tail(), 0);
    }

    #[test]
    fn cyclic_tie_break() {
        let t = Tournament::rotational(3).unwrap();
        let s = greedy_in_dominating(&t, &all(&t), 2).unwrap();
        assert_eq!(s.verts, vec![0, 1]);
        assert!(s.residual.is_empty());
        assert_eq!(s.residual_sizes, vec![3, 1, 0]);
        assert_eq!((s.tail(), s.head()), (0, 1));
        assert!(is_transitive_sequence(&t, &s));
    }

    #[test]
    fn exhaustion_is_an_error() {
        let t = Tournament::transitive(5);
        assert_eq!(
            greedy_in_dominating(&t, &all(&t), 2),
            Err(DominationError::Exhausted {
                achieved: 1,
                requested: 2
            })
        );
        assert_eq!(
            greedy_in_dominating(&t, &VertexSet::empty(5), 1),
            Err(DominationError::EmptyGround)
        );
        assert_eq!(
            greedy_in_dominating(&t, &all(&t), 0),
            Err(DominationError::ZeroSize)
        );
    }

    #[test]
    fn out_flavour_mirrors_reverse() {
        for seed in 0..20 {
            let t = Tournament::random(40, seed);
            let ground = VertexSet::from_ids(40, (0..40).filter(|v| v % 3 != 0));
            for size in 1..=4 {
                let out = greedy_out_dominating(&t, &ground, size);
                let rev = greedy_in_dominating(&t.reverse(), &ground, size);
                assert_eq!(
                    out.as_ref().map(|s| (&s.verts, &s.residual)),
                    rev.as_ref().map(|s| (&s.verts, &s.residual))
                );
                if let Ok(out) = out {
                    assert!(is_transitive_sequence(&t, &out));
                }
            }
        }
    }

    #[test]
    fn residual_is_the_undominated_set() {
        let t = Tournament::random(60, 4);
        let ground = all(&t);
        for flavor in [Flavor::In, Flavor::Out] {
            let s = greedy_dominating(&t, &ground, 3, flavor).unwrap();
            for v in ground.iter() {
                assert_eq!(s.residual.contains(v), !dominates(&t, flavor, &s.verts, v));
            }
        }
    }

    #[test]
    fn base_case_bound() {
        // k = 1: every u in N+(v1) has out-degree at least |E|
        for seed in 0..30 {
            let t = Tournament::random(31, seed);
            let s = greedy_in_dominating(&t, &all(&t), 1).unwrap();
            assert_eq!(&s.residual, t.out_set(s.verts[0]));
            for u in s.residual.iter() {
                assert!(t.out_degree(u).unwrap() >= s.residual.len());
            }
            assert!(check_degree_bound(&t, &s));
        }
    }

    #[test]
    fn degree_bound_detects_violation() {
        let t = Tournament::random(30, 2);
        let mut s = greedy_in_dominating(&t, &all(&t), 2).unwrap();
        // pretend the whole ground set is undominated
        s.residual = all(&t);
        assert!(!check_degree_bound(&t, &s));
        s.residual = VertexSet::empty(30);
        assert!(check_degree_bound(&t, &s));
    }
}
