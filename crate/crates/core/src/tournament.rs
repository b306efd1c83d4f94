//! Tournaments on dense vertex ids with generators and the `TOURN 1` text format.
//!
//! A tournament stores both the out- and in-neighbourhood of every vertex as
//! bitsets, so degree queries within an arbitrary ground set are a single
//! popcount.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use thiserror::Error;

use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("expected {expected} matrix rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("bad character {ch:?} at ({row},{col})")]
    BadCharacter { row: usize, col: usize, ch: char },
    #[error("loop at ({v},{v}): diagonal entries must be 0")]
    Loop { v: usize },
    #[error("pair ({i},{j}) has no edge in either direction")]
    MissingEdge { i: usize, j: usize },
    #[error("pair ({i},{j}) has edges in both directions")]
    DoubleEdge { i: usize, j: usize },
    #[error("a tournament needs at least one vertex")]
    Empty,
    #[error("rotational tournament needs an odd order >= 3, got {0}")]
    EvenOrder(usize),
    #[error("quadratic-residue tournament needs a prime p = 3 mod 4, got {0}")]
    NotPaleyOrder(usize),
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("vertex set is empty")]
    EmptySubset,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("no tournament with minimum degree >= {floor} found in {attempts} attempts")]
    DegreeFloorUnmet { floor: usize, attempts: usize },
}

/// A complete antisymmetric orientation on `n` vertices.
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tournament(n={})", self.n)
    }
}

/// An induced subtournament together with the map back to parent ids.
#[derive(Debug, Clone)]
pub struct Subtournament {
    pub tournament: Tournament,
    /// `parent_ids[local] = parent id`, ascending.
    pub parent_ids: Vec<usize>,
}

impl Subtournament {
    pub fn to_parent(&self, local: usize) -> usize {
        self.parent_ids[local]
    }

    /// Local id of a parent vertex, if it belongs to the subtournament.
    pub fn to_local(&self, parent: usize) -> Option<usize> {
        self.parent_ids.binary_search(&parent).ok()
    }

    pub fn lift_path(&self, path: &Path) -> Path {
        Path::new(
            path.vertices()
                .iter()
                .map(|&v| self.parent_ids[v])
                .collect(),
        )
    }
}

impl Tournament {
    /// Builds a tournament from an orientation rule queried once per pair `i < j`;
    /// `i_beats_j(i, j)` returning true means the edge `i -> j`.
    pub fn from_fn(n: usize, mut i_beats_j: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = vec![VertexSet::empty(n); n];
        let mut inn = vec![VertexSet::empty(n); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (u, v) = if i_beats_j(i, j) { (i, j) } else { (j, i) };
                out[u].insert(v);
                inn[v].insert(u);
            }
        }
        Self { n, out, inn }
    }

    /// Parses an adjacency matrix given as `n` strings over `{0,1}`.
    #[allow(clippy::needless_range_loop)] // (i, j) and (j, i) are read together
    pub fn from_matrix<S: AsRef<str>>(n: usize, rows: &[S]) -> Result<Self, TournamentError> {
        if n == 0 {
            return Err(TournamentError::Empty);
        }
        if rows.len() != n {
            return Err(TournamentError::RowCount {
                expected: n,
                found: rows.len(),
            });
        }
        let mut bits = vec![vec![false; n]; n];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let len = row.chars().count();
            if len != n {
                return Err(TournamentError::RowLength {
                    row: i,
                    expected: n,
                    found: len,
                });
            }
            for (j, ch) in row.chars().enumerate() {
                bits[i][j] = match ch {
                    '0' => false,
                    '1' => true,
                    _ => return Err(TournamentError::BadCharacter { row: i, col: j, ch }),
                };
            }
        }
        for i in 0..n {
            if bits[i][i] {
                return Err(TournamentError::Loop { v: i });
            }
            for j in (i + 1)..n {
                match (bits[i][j], bits[j][i]) {
                    (false, false) => return Err(TournamentError::MissingEdge { i, j }),
                    (true, true) => return Err(TournamentError::DoubleEdge { i, j }),
                    _ => {}
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| bits[i][j]))
    }

    /// The transitive tournament with `i -> j` iff `i < j`; vertex 0 is the tail.
    pub fn transitive(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    /// The rotational (circulant) tournament: `i -> j` iff `(j - i) mod n` lies in `1..=(n-1)/2`.
    pub fn rotational(n: usize) -> Result<Self, TournamentError> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(TournamentError::EvenOrder(n));
        }
        let t = (n - 1) / 2;
        Ok(Self::from_fn(n, |i, j| (j - i) <= t))
    }

    /// The quadratic-residue (Paley) tournament on a prime `p = 3 mod 4`:
    /// `i -> j` iff `j - i` is a nonzero square mod `p`.
    pub fn quadratic_residue(p: usize) -> Result<Self, TournamentError> {
        let is_prime = p >= 3
            && (2..)
                .take_while(|d| d * d <= p)
                .all(|d| !p.is_multiple_of(d));
        if !is_prime || p % 4 != 3 {
            return Err(TournamentError::NotPaleyOrder(p));
        }
        let mut square = vec![false; p];
        for x in 1..p {
            square[x * x % p] = true;
        }
        Ok(Self::from_fn(p, |i, j| square[j - i]))
    }

    /// A uniformly random tournament, bit-reproducible from `seed`.
    ///
    /// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
    /// Pairs `(i, j)` with `i < j` are visited in lexicographic order and each
    /// consumes one 32-bit output; its low bit set means `i -> j`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(n, |_, _| rng.next_u32() & 1 == 1)
    }

    /// Samples random tournaments until one has every in- and out-degree at
    /// least `floor`. Attempt seeds are drawn from a ChaCha20 stream seeded by
    /// `seed`; returns the tournament and the attempt seed that produced it.
    pub fn random_with_min_degree(
        n: usize,
        floor: usize,
        seed: u64,
        max_attempts: usize,
    ) -> Result<(Self, u64), TournamentError> {
        let mut seeds = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..max_attempts {
            let attempt = seeds.next_u64();
            let t = Self::random(n, attempt);
            if t.min_semi_degree() >= floor {
                return Ok((t, attempt));
            }
        }
        Err(TournamentError::DegreeFloorUnmet {
            floor,
            attempts: max_attempts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// True iff `u -> v` is an edge.
    #[inline]
    pub fn edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    fn check(&self, v: usize) -> Result<(), TournamentError> {
        if v < self.n {
            Ok(())
        } else {
            Err(TournamentError::VertexOutOfRange { v, n: self.n })
        }
    }

    pub fn out_degree(&self, v: usize) -> Result<usize, TournamentError> {
        self.check(v)?;
        Ok(self.out[v].len())
    }

    pub fn in_degree(&self, v: usize) -> Result<usize, TournamentError> {
        self.check(v)?;
        Ok(self.inn[v].len())
    }

    pub fn out_neighbours(&self, v: usize) -> Result<&VertexSet, TournamentError> {
        self.check(v)?;
        Ok(&self.out[v])
    }

    pub fn in_neighbours(&self, v: usize) -> Result<&VertexSet, TournamentError> {
        self.check(v)?;
        Ok(&self.inn[v])
    }

    /// N⁺(v) without range checking; panics on a bad id.
    #[inline]
    pub fn out_set(&self, v: usize) -> &VertexSet {
        &self.out[v]
    }

    /// N⁻(v) without range checking; panics on a bad id.
    #[inline]
    pub fn in_set(&self, v: usize) -> &VertexSet {
        &self.inn[v]
    }

    /// Out-degree of `v` counted inside `ground`.
    #[inline]
    pub fn out_degree_within(&self, v: usize, ground: &VertexSet) -> usize {
        self.out[v].intersection_len(ground)
    }

    /// In-degree of `v` counted inside `ground`.
    #[inline]
    pub fn in_degree_within(&self, v: usize, ground: &VertexSet) -> usize {
        self.inn[v].intersection_len(ground)
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out.iter().map(VertexSet::len).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.inn.iter().map(VertexSet::len).collect()
    }

    /// min over v of min(d⁺(v), d⁻(v)); 0 for the one-vertex tournament.
    pub fn min_semi_degree(&self) -> usize {
        (0..self.n)
            .map(|v| self.out[v].len().min(self.inn[v].len()))
            .min()
            .unwrap_or(0)
    }

    /// The first vertex (by id) whose in- or out-degree is below `floor`.
    pub fn first_below_degree(&self, floor: usize) -> Option<usize> {
        (0..self.n).find(|&v| self.out[v].len() < floor || self.inn[v].len() < floor)
    }

    /// The same vertex set with every edge reversed.
    pub fn reverse(&self) -> Self {
        Self {
            n: self.n,
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }

    /// The subtournament induced on `subset`, relabelled to `0..|subset|` in
    /// ascending parent-id order.
    pub fn induced(&self, subset: &VertexSet) -> Result<Subtournament, TournamentError> {
        if subset.universe() != self.n {
            if let Some(v) = subset.iter().find(|&v| v >= self.n) {
                return Err(TournamentError::VertexOutOfRange { v, n: self.n });
            }
        }
        let parent_ids: Vec<usize> = subset.iter().collect();
        if parent_ids.is_empty() {
            return Err(TournamentError::EmptySubset);
        }
        let tournament = Self::from_fn(parent_ids.len(), |i, j| {
            self.edge(parent_ids[i], parent_ids[j])
        });
        Ok(Subtournament {
            tournament,
            parent_ids,
        })
    }

    /// Convenience wrapper over [`Tournament::induced`] taking raw ids.
    pub fn induced_on(&self, ids: &[usize]) -> Result<Subtournament, TournamentError> {
        let set = VertexSet::try_from_ids(self.n, ids.iter().copied())
            .map_err(|v| TournamentError::VertexOutOfRange { v, n: self.n })?;
        self.induced(&set)
    }

    /// Matrix rows as strings over `{0,1}`.
    pub fn to_rows(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.edge(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Serializes to the canonical `TOURN 1` format: a `TOURN 1 <n>` header,
    /// then one row per vertex, every line LF-terminated.
    pub fn serialize(&self) -> String {
        let mut s = String::with_capacity((self.n + 1) * (self.n + 1) + 16);
        writeln!(s, "TOURN 1 {}", self.n).unwrap();
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.edge(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the `TOURN 1` format. A single trailing newline is optional;
    /// CR characters and trailing whitespace are rejected.
    pub fn parse(text: &str) -> Result<Self, TournamentError> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n');
        let header = lines
            .next()
            .ok_or_else(|| TournamentError::MalformedHeader("missing header".into()))?;
        let n = parse_header(header)?;
        let rows: Vec<&str> = lines.collect();
        if n == 0 {
            if rows.is_empty() {
                return Err(TournamentError::Empty);
            }
            return Err(TournamentError::RowCount {
                expected: 0,
                found: rows.len(),
            });
        }
        Self::from_matrix(n, &rows)
    }
}

fn parse_header(header: &str) -> Result<usize, TournamentError> {
    let mut parts = header.split(' ');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("TOURN"), Some("1"), Some(n), None) => {
            if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
                return Err(TournamentError::MalformedHeader(format!(
                    "bad vertex count {n:?}"
                )));
            }
            n.parse()
                .map_err(|_| TournamentError::MalformedHeader(format!("bad vertex count {n:?}")))
        }
        _ => Err(TournamentError::MalformedHeader(header.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("vertex {v} out of range")]
    OutOfRange { v: usize },
    #[error("vertex {v} repeats in path")]
    Repeated { v: usize },
    #[error("{u} -> {v} is not an edge")]
    NotAnEdge { u: usize, v: usize },
}

/// A directed path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path(Vec<usize>);

impl Path {
    /// Wraps a vertex sequence without checking it.
    pub fn new(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn single(v: usize) -> Self {
        Self(vec![v])
    }

    /// Wraps a vertex sequence after validating it against `t`.
    pub fn checked(t: &Tournament, vertices: Vec<usize>) -> Result<Self, PathError> {
        let p = Self(vertices);
        p.validate(t)?;
        Ok(p)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    pub fn start(&self) -> usize {
        self.0[0]
    }

    pub fn end(&self) -> usize {
        *self.0.last().expect("empty path")
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn internal(&self) -> &[usize] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    /// Checks that the path is a nonempty sequence of distinct in-range
    /// vertices whose consecutive pairs are edges.
    pub fn validate(&self, t: &Tournament) -> Result<(), PathError> {
        if self.0.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen = VertexSet::empty(t.n());
        for &v in &self.0 {
            if v >= t.n() {
                return Err(PathError::OutOfRange { v });
            }
            if seen.contains(v) {
                return Err(PathError::Repeated { v });
            }
            seen.insert(v);
        }
        for w in self.0.windows(2) {
            if !t.edge(w[0], w[1]) {
                return Err(PathError::NotAnEdge { u: w[0], v: w[1] });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_triangle() -> Tournament {
        Tournament::from_matrix(3, &["010", "001", "100"]).unwrap()
    }

    #[test]
    fn matrix_transitive_triangle() {
        let t = Tournament::from_matrix(3, &["011", "001", "000"]).unwrap();
        assert!(t.edge(0, 1) && t.edge(0, 2) && t.edge(1, 2));
        assert_eq!(t, Tournament::transitive(3));
    }

    #[test]
    fn matrix_cyclic_triangle() {
        let t = cyclic_triangle();
        assert!(t.edge(0, 1) && t.edge(1, 2) && t.edge(2, 0));
        assert_eq!(t, Tournament::rotational(3).unwrap());
    }

    #[test]
    fn matrix_errors_name_the_pair() {
        assert_eq!(
            Tournament::from_matrix(2, &["00", "00"]),
            Err(TournamentError::MissingEdge { i: 0, j: 1 })
        );
        assert_eq!(
            Tournament::from_matrix(2, &["11", "00"]),
            Err(TournamentError::Loop { v: 0 })
        );
        assert_eq!(
            Tournament::from_matrix(3, &["011", "101", "000"]),
            Err(TournamentError::DoubleEdge { i: 0, j: 1 })
        );
        assert_eq!(
            Tournament::from_matrix(2, &["01"]),
            Err(TournamentError::RowCount {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            Tournament::from_matrix(2, &["01", "1"]),
            Err(TournamentError::RowLength {
                row: 1,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            Tournament::from_matrix(2, &["0x", "10"]),
            Err(TournamentError::BadCharacter {
                row: 0,
                col: 1,
                ch: 'x'
            })
        );
    }

    #[test]
    fn transitive_degrees() {
        assert_eq!(Tournament::transitive(4).out_degrees(), vec![3, 2, 1, 0]);
        assert_eq!(Tournament::transitive(1).out_degrees(), vec![0]);
        assert_eq!(Tournament::transitive(5).in_degree(4).unwrap(), 4);
        let t = Tournament::transitive(4);
        assert_eq!((t.out_degree(0).unwrap(), t.in_degree(0).unwrap()), (3, 0));
    }

    #[test]
    fn rotational_is_regular() {
        for n in [3, 5, 7, 9, 21] {
            let t = Tournament::rotational(n).unwrap();
            assert!(t.out_degrees().iter().all(|&d| d == (n - 1) / 2));
        }
        assert_eq!(
            Tournament::rotational(6),
            Err(TournamentError::EvenOrder(6))
        );
        assert_eq!(
            Tournament::rotational(1),
            Err(TournamentError::EvenOrder(1))
        );
    }

    #[test]
    fn paley_orders() {
        let t = Tournament::quadratic_residue(11).unwrap();
        assert!(t.out_degrees().iter().all(|&d| d == 5));
        // squares mod 11 are 1, 3, 4, 5, 9
        assert!(t.edge(0, 1) && t.edge(0, 3) && t.edge(0, 9) && t.edge(2, 0));
        assert!(Tournament::quadratic_residue(13).is_err());
        assert!(Tournament::quadratic_residue(15).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(Tournament::random(50, 9), Tournament::random(50, 9));
        assert_ne!(Tournament::random(50, 9), Tournament::random(50, 10));
        let t = Tournament::random(2, 123);
        assert!(t.edge(0, 1) ^ t.edge(1, 0));
    }

    #[test]
    fn random_min_degree_resampling() {
        let (t, _) = Tournament::random_with_min_degree(200, 80, 3, 50).unwrap();
        assert!(t.min_semi_degree() >= 80);
        assert!(matches!(
            Tournament::random_with_min_degree(10, 5, 3, 5),
            Err(TournamentError::DegreeFloorUnmet { .. })
        ));
    }

    #[test]
    fn degree_queries_reject_bad_vertex() {
        let t = cyclic_triangle();
        assert!(t.out_degree(3).is_err());
        assert!(t.in_neighbours(7).is_err());
        for v in 0..3 {
            assert_eq!((t.out_degree(v).unwrap(), t.in_degree(v).unwrap()), (1, 1));
        }
    }

    #[test]
    fn induced_examples() {
        let t5 = Tournament::transitive(5);
        let sub = t5.induced_on(&[1, 2, 3]).unwrap();
        assert_eq!(sub.tournament, Tournament::transitive(3));
        assert_eq!(sub.parent_ids, vec![1, 2, 3]);
        assert_eq!(sub.to_local(3), Some(2));
        assert_eq!(sub.to_local(0), None);

        let all = t5.induced(&t5.all_vertices()).unwrap();
        assert_eq!(all.tournament, t5);

        let edge = cyclic_triangle().induced_on(&[0, 1]).unwrap();
        assert!(edge.tournament.edge(0, 1));

        assert_eq!(
            t5.induced_on(&[]).unwrap_err(),
            TournamentError::EmptySubset
        );
        assert_eq!(
            t5.induced_on(&[1, 9]).unwrap_err(),
            TournamentError::VertexOutOfRange { v: 9, n: 5 }
        );
    }

    #[test]
    fn serialization_round_trip() {
        let t = cyclic_triangle();
        let s = t.serialize();
        assert_eq!(s, "TOURN 1 3\n010\n001\n100\n");
        assert_eq!(Tournament::parse(&s).unwrap(), t);
        assert_eq!(Tournament::parse(&s).unwrap().serialize(), s);
    }

    #[test]
    fn parse_rejections() {
        assert!(matches!(
            Tournament::parse("TOURN 1 2\n10\n10\n"),
            Err(TournamentError::Loop { v: 0 })
        ));
        assert!(matches!(
            Tournament::parse("TOURN 2 2\n01\n00\n"),
            Err(TournamentError::MalformedHeader(_))
        ));
        assert!(matches!(
            Tournament::parse("TOURN 1 x\n"),
            Err(TournamentError::MalformedHeader(_))
        ));
        assert!(matches!(
            Tournament::parse("TOURN 1 2\n01 \n00\n"),
            Err(TournamentError::RowLength { .. })
        ));
        assert!(matches!(
            Tournament::parse("TOURN 1 2\r\n01\n00\n"),
            Err(TournamentError::MalformedHeader(_))
        ));
        assert!(matches!(
            Tournament::parse("TOURN 1 2\n01\n00\n\n"),
            Err(TournamentError::RowCount { .. })
        ));
    }

    #[test]
    fn path_validation() {
        let t = cyclic_triangle();
        assert!(Path::checked(&t, vec![0, 1, 2]).is_ok());
        assert_eq!(
            Path::checked(&t, vec![0, 2]).unwrap_err(),
            PathError::NotAnEdge { u: 0, v: 2 }
        );
        assert_eq!(
            Path::checked(&t, vec![0, 1, 2, 0]).unwrap_err(),
            PathError::Repeated { v: 0 }
        );
        assert_eq!(Path::checked(&t, vec![]).unwrap_err(), PathError::Empty);
        let p = Path::new(vec![0, 1, 2]);
        assert_eq!((p.start(), p.end(), p.length()), (0, 2, 2));
        assert_eq!(p.internal(), &[1]);
        assert_eq!(Path::single(4).length(), 0);
    }
}
