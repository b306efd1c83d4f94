//! Routing `k` vertex-disjoint paths between prescribed terminal pairs in a
//! tournament whose minimum semi-degree is at least `452k`.
//!
//! Outline of [`link`]:
//!
//! 1. Remove the `2k` terminals.
//! 2. Peel off `55k` two-vertex greedy in-dominating sequences `D⁻_i`, then
//!    `55k` out-dominating ones `D⁺_i`, each from what is left.
//! 3. Let `X` be the terminals plus all of those vertices. A vertex outside
//!    `X` not dominated by `D⁻_i` has out-degree at least twice the number of
//!    such vertices (mirrored for `D⁺_i`).
//! 4. The heads of the `D⁻_i` span a tournament `T⁻`, the tails of the `D⁺_i`
//!    span `T⁺`. Each carries a linkage pair of size `5k`, so any bijection
//!    between its two sides is routable inside it.
//! 5. Max-flow finds `5k` disjoint paths from `Y⁻` to `X⁺` avoiding the rest of
//!    `X`.
//! 6. Each terminal steps out of `X` once (`x'_i`, `y'_i`) and, if needed, once
//!    more so that it becomes dominated by its own `D⁻_i` / `D⁺_i`
//!    (`x''_i`, `y''_i`), from where it enters the head of `D⁻_i` (or leaves
//!    the tail of `D⁺_i`).
//! 7. `k` of the max-flow paths avoid all stepping vertices; the linkage pairs
//!    connect heads to their starts and their ends to tails in whatever
//!    order is needed, and the segments are stitched together.

use std::fmt;

use thiserror::Error;

use crate::domination::{
    check_degree_bound, greedy_dominating, DominatingSequence, DominationError, Flavor,
};
use crate::flows::{disjoint_paths, FlowError};
use crate::linkage_pairs::{find_linkage_pair, route, LinkageError, LinkagePair};
use crate::tournament::{Path, PathError, Tournament};
use crate::vertex_set::VertexSet;

/// Semi-degree floor per linked pair.
pub const DEGREE_FACTOR: usize = 452;
/// Dominating sequences of each flavour per linked pair.
pub const DOMINATOR_FACTOR: usize = 55;
/// Linkage-pair size per linked pair.
pub const LINKAGE_FACTOR: usize = 5;
/// Vertices per dominating sequence.
pub const SEQUENCE_SIZE: usize = 2;

/// Connectivity under which every tournament is `k`-linked.
pub fn required_connectivity(k: usize) -> Result<usize, RequestError> {
    if k == 0 {
        return Err(RequestError::Empty);
    }
    Ok(DEGREE_FACTOR * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkerConfig {
    pub degree_factor: usize,
    pub dominator_factor: usize,
    pub linkage_factor: usize,
    /// When false the semi-degree floor is not checked up front; the pipeline
    /// runs anyway and reports whichever stage fails.
    pub enforce_degree_floor: bool,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self {
            degree_factor: DEGREE_FACTOR,
            dominator_factor: DOMINATOR_FACTOR,
            linkage_factor: LINKAGE_FACTOR,
            enforce_degree_floor: true,
        }
    }
}

impl LinkerConfig {
    pub fn forced() -> Self {
        Self {
            enforce_degree_floor: false,
            ..Self::default()
        }
    }

    /// Upper bound on `|X|`: all dominating vertices plus the terminals.
    pub fn x_bound(&self, k: usize) -> usize {
        2 * SEQUENCE_SIZE * self.dominator_factor * k + 2 * k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkRequest {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("at least one terminal pair is required")]
    Empty,
    #[error("{sources} sources but {sinks} sinks")]
    Unbalanced { sources: usize, sinks: usize },
    #[error("terminal {v} out of range for n = {n}")]
    OutOfRange { v: usize, n: usize },
    #[error("terminal {v} appears more than once")]
    Duplicate { v: usize },
}

impl LinkRequest {
    pub fn new(sources: Vec<usize>, sinks: Vec<usize>) -> Self {
        Self { sources, sinks }
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self {
            sources: pairs.iter().map(|p| p.0).collect(),
            sinks: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn validate(&self, n: usize) -> Result<(), RequestError> {
        if self.sources.len() != self.sinks.len() {
            return Err(RequestError::Unbalanced {
                sources: self.sources.len(),
                sinks: self.sinks.len(),
            });
        }
        if self.sources.is_empty() {
            return Err(RequestError::Empty);
        }
        let mut seen = VertexSet::empty(n);
        for &v in self.sources.iter().chain(&self.sinks) {
            if v >= n {
                return Err(RequestError::OutOfRange { v, n });
            }
            if seen.contains(v) {
                return Err(RequestError::Duplicate { v });
            }
            seen.insert(v);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Precondition,
    DominateIn,
    DominateOut,
    Residuals,
    LinkagePairs,
    Reorder,
    Menger,
    Primed,
    DoublePrimed,
    EntryExit,
    SelectPaths,
    Route,
    Stitch,
}

impl Stage {
    pub const ALL: [Stage; 13] = [
        Stage::Precondition,
        Stage::DominateIn,
        Stage::DominateOut,
        Stage::Residuals,
        Stage::LinkagePairs,
        Stage::Reorder,
        Stage::Menger,
        Stage::Primed,
        Stage::DoublePrimed,
        Stage::EntryExit,
        Stage::SelectPaths,
        Stage::Route,
        Stage::Stitch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Precondition => "precondition",
            Stage::DominateIn => "dominate-in",
            Stage::DominateOut => "dominate-out",
            Stage::Residuals => "residuals",
            Stage::LinkagePairs => "linkage-pairs",
            Stage::Reorder => "reorder",
            Stage::Menger => "menger",
            Stage::Primed => "primed",
            Stage::DoublePrimed => "double-primed",
            Stage::EntryExit => "entry-exit",
            Stage::SelectPaths => "select-paths",
            Stage::Route => "route",
            Stage::Stitch => "stitch",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A linkage pair found inside an induced subtournament, with the map back to
/// the ambient ids. The pair itself is stored in local ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideLinkage {
    pub parent_ids: Vec<usize>,
    pub pair: LinkagePair,
}

impl SideLinkage {
    pub fn sources(&self) -> Vec<usize> {
        self.pair
            .sources
            .iter()
            .map(|&v| self.parent_ids[v])
            .collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        self.pair
            .sinks
            .iter()
            .map(|&v| self.parent_ids[v])
            .collect()
    }
}

/// Everything the pipeline has built so far. Filled progressively; on
/// failure the snapshot shows how far it got.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkerState {
    pub d_minus: Vec<DominatingSequence>,
    pub d_plus: Vec<DominatingSequence>,
    /// Terminals plus every dominating vertex.
    pub x_set: Option<VertexSet>,
    /// Vertices outside `X` not in-dominated by `d_minus[i]`.
    pub e_minus: Vec<VertexSet>,
    /// Vertices outside `X` not out-dominated by `d_plus[i]`.
    pub e_plus: Vec<VertexSet>,
    pub minus_side: Option<SideLinkage>,
    pub plus_side: Option<SideLinkage>,
    /// `reorder_minus[new] = old` index into the original `D⁻` list.
    pub reorder_minus: Vec<usize>,
    pub reorder_plus: Vec<usize>,
    pub menger_paths: Vec<Path>,
    pub x_primed: Vec<usize>,
    pub y_primed: Vec<usize>,
    pub x_prime_set: Option<VertexSet>,
    pub x_double: Vec<usize>,
    pub y_double: Vec<usize>,
    pub entry_paths: Vec<Path>,
    pub exit_paths: Vec<Path>,
    /// Indices into `menger_paths` of the paths kept, one per pair.
    pub selected: Vec<usize>,
    pub sigma_minus: Vec<usize>,
    pub sigma_plus: Vec<usize>,
    pub p_minus: Vec<Path>,
    pub p_plus: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkFailure {
    #[error(transparent)]
    Request(#[from] RequestError),
    #[error("vertex {v} has out-degree {out_degree} and in-degree {in_degree}, below the floor {required}")]
    DegreeFloor {
        v: usize,
        out_degree: usize,
        in_degree: usize,
        required: usize,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Domination(#[from] DominationError),
    #[error("residual degree bound fails at vertex {v} of sequence {index}")]
    ResidualBound { index: usize, v: usize },
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("only {found} of {needed} disjoint paths exist; separator {cut:?}")]
    MengerShortfall {
        found: usize,
        needed: usize,
        cut: Vec<usize>,
    },
    #[error("no free {kind} neighbour for terminal pair {i}")]
    NoNeighbour { kind: &'static str, i: usize },
    #[error("degree bound for stepping vertex {v} fails")]
    SteppingBound { v: usize },
    #[error("only {found} of {needed} flow paths avoid the stepping vertices")]
    SelectionShortfall { found: usize, needed: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Verification(#[from] LinkViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stage {stage}: {failure}")]
pub struct LinkError {
    pub stage: Stage,
    pub failure: LinkFailure,
    pub state: Box<LinkerState>,
}

/// Per-stage summary of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub stage: Stage,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub n: usize,
    pub k: usize,
    pub x_len: usize,
    pub x_prime_len: usize,
    pub minus_mode: &'static str,
    pub plus_mode: &'static str,
    pub reorder_minus: Vec<usize>,
    pub reorder_plus: Vec<usize>,
    pub selected: Vec<usize>,
    pub sigma_minus: Vec<usize>,
    pub sigma_plus: Vec<usize>,
    pub stages: Vec<StageReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkResult {
    pub paths: Vec<Path>,
    pub diagnostics: Diagnostics,
    pub state: LinkerState,
}

/// First reason a path system fails to link a request.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkViolation {
    #[error("expected {expected} paths, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("path {index}: {error}")]
    InvalidPath { index: usize, error: PathError },
    #[error("path {index} runs {start} -> {end}, expected {want_start} -> {want_end}")]
    WrongEndpoints {
        index: usize,
        start: usize,
        end: usize,
        want_start: usize,
        want_end: usize,
    },
    #[error("vertex {v} is shared by paths {first} and {second}")]
    SharedVertex {
        v: usize,
        first: usize,
        second: usize,
    },
}

/// Checks that `paths[i]` is a path of `t` from `req.sources[i]` to
/// `req.sinks[i]` and that the paths are pairwise vertex-disjoint.
pub fn verify_linkage(
    t: &Tournament,
    req: &LinkRequest,
    paths: &[Path],
) -> Result<(), LinkViolation> {
    if paths.len() != req.k() || req.sources.len() != req.sinks.len() {
        return Err(LinkViolation::WrongCount {
            expected: req.k(),
            found: paths.len(),
        });
    }
    let mut owner = vec![usize::MAX; t.n()];
    for (index, p) in paths.iter().enumerate() {
        p.validate(t)
            .map_err(|error| LinkViolation::InvalidPath { index, error })?;
        if p.start() != req.sources[index] || p.end() != req.sinks[index] {
            return Err(LinkViolation::WrongEndpoints {
                index,
                start: p.start(),
                end: p.end(),
                want_start: req.sources[index],
                want_end: req.sinks[index],
            });
        }
        for &v in p.vertices() {
            if owner[v] != usize::MAX {
                return Err(LinkViolation::SharedVertex {
                    v,
                    first: owner[v],
                    second: index,
                });
            }
            owner[v] = index;
        }
    }
    Ok(())
}

/// Builds `k` vertex-disjoint paths with the default configuration.
pub fn link(t: &Tournament, req: &LinkRequest) -> Result<LinkResult, LinkError> {
    link_with(t, req, &LinkerConfig::default())
}

pub fn link_with(
    t: &Tournament,
    req: &LinkRequest,
    config: &LinkerConfig,
) -> Result<LinkResult, LinkError> {
    let mut run = Run {
        t,
        req,
        config,
        k: req.k(),
        state: LinkerState::default(),
        stages: Vec::new(),
    };
    let paths = run.execute();
    match paths {
        Ok(paths) => {
            let state = run.state;
            let diagnostics = Diagnostics {
                n: t.n(),
                k: run.k,
                x_len: state.x_set.as_ref().map_or(0, VertexSet::len),
                x_prime_len: state.x_prime_set.as_ref().map_or(0, VertexSet::len),
                minus_mode: state.minus_side.as_ref().map_or("", |s| s.pair.mode.name()),
                plus_mode: state.plus_side.as_ref().map_or("", |s| s.pair.mode.name()),
                reorder_minus: state.reorder_minus.clone(),
                reorder_plus: state.reorder_plus.clone(),
                selected: state.selected.clone(),
                sigma_minus: state.sigma_minus.clone(),
                sigma_plus: state.sigma_plus.clone(),
                stages: run.stages,
            };
            Ok(LinkResult {
                paths,
                diagnostics,
                state,
            })
        }
        Err((stage, failure)) => Err(LinkError {
            stage,
            failure,
            state: Box::new(run.state),
        }),
    }
}

type StageResult<T> = Result<T, (Stage, LinkFailure)>;

fn at<E: Into<LinkFailure>>(stage: Stage) -> impl FnOnce(E) -> (Stage, LinkFailure) {
    move |e| (stage, e.into())
}

fn invariant(stage: Stage, msg: String) -> (Stage, LinkFailure) {
    (stage, LinkFailure::Invariant(msg))
}

struct Run<'a> {
    t: &'a Tournament,
    req: &'a LinkRequest,
    config: &'a LinkerConfig,
    k: usize,
    state: LinkerState,
    stages: Vec<StageReport>,
}

impl Run<'_> {
    fn log(&mut self, stage: Stage, summary: String) {
        self.stages.push(StageReport { stage, summary });
    }

    fn execute(&mut self) -> StageResult<Vec<Path>> {
        let terminals = self.precondition()?;
        self.dominate(Stage::DominateIn, Flavor::In, &terminals)?;
        self.dominate(Stage::DominateOut, Flavor::Out, &terminals)?;
        self.residuals(&terminals)?;
        self.linkage_pairs()?;
        self.reorder()?;
        self.menger()?;
        self.primed()?;
        self.double_primed()?;
        self.entry_exit()?;
        self.select_paths()?;
        self.route_sides()?;
        self.stitch()
    }

    fn precondition(&mut self) -> StageResult<VertexSet> {
        let stage = Stage::Precondition;
        let c = self.config;
        if c.dominator_factor < 11 * c.linkage_factor || c.linkage_factor == 0 {
            return Err((
                stage,
                LinkFailure::Config(format!(
                    "need 11 * {} <= {} and a positive linkage factor",
                    c.linkage_factor, c.dominator_factor
                )),
            ));
        }
        self.req.validate(self.t.n()).map_err(at(stage))?;
        let required = c.degree_factor * self.k;
        if c.enforce_degree_floor {
            if let Some(v) = self.t.first_below_degree(required) {
                return Err((
                    stage,
                    LinkFailure::DegreeFloor {
                        v,
                        out_degree: self.t.out_set(v).len(),
                        in_degree: self.t.in_set(v).len(),
                        required,
                    },
                ));
            }
        }
        let terminals = VertexSet::from_ids(
            self.t.n(),
            self.req.sources.iter().chain(&self.req.sinks).copied(),
        );
        let floor = if c.enforce_degree_floor {
            "checked"
        } else {
            "skipped"
        };
        self.log(
            stage,
            format!(
                "n={} k={} degree floor {required} {floor}",
                self.t.n(),
                self.k
            ),
        );
        Ok(terminals)
    }

    fn dominate(&mut self, stage: Stage, flavor: Flavor, terminals: &VertexSet) -> StageResult<()> {
        let count = self.config.dominator_factor * self.k;
        let mut ground = terminals.complement();
        for seq in &self.state.d_minus {
            for &v in &seq.verts {
                ground.remove(v);
            }
        }
        let mut built = Vec::with_capacity(count);
        for _ in 0..count {
            let seq =
                greedy_dominating(self.t, &ground, SEQUENCE_SIZE, flavor).map_err(at(stage))?;
            for &v in &seq.verts {
                ground.remove(v);
            }
            built.push(seq);
        }
        let max_residual = built.iter().map(|s| s.residual.len()).max().unwrap_or(0);
        self.log(
            stage,
            format!(
                "{count} sequences, largest residual {max_residual}, {} vertices left",
                ground.len()
            ),
        );
        match flavor {
            Flavor::In => self.state.d_minus = built,
            Flavor::Out => self.state.d_plus = built,
        }
        Ok(())
    }

    fn residuals(&mut self, terminals: &VertexSet) -> StageResult<()> {
        let stage = Stage::Residuals;
        let mut x_set = terminals.clone();
        for seq in self.state.d_minus.iter().chain(&self.state.d_plus) {
            for &v in &seq.verts {
                if x_set.contains(v) {
                    return Err(invariant(stage, format!("vertex {v} used twice")));
                }
                x_set.insert(v);
            }
        }
        let bound = self.config.x_bound(self.k);
        if x_set.len() > bound {
            return Err(invariant(
                stage,
                format!("|X| = {} exceeds {bound}", x_set.len()),
            ));
        }
        let outside = x_set.complement();
        let factor = 1usize << (SEQUENCE_SIZE - 1);
        let mut e_minus = Vec::with_capacity(self.state.d_minus.len());
        let mut e_plus = Vec::with_capacity(self.state.d_plus.len());
        for (flavor, seqs, out) in [
            (Flavor::In, &self.state.d_minus, &mut e_minus),
            (Flavor::Out, &self.state.d_plus, &mut e_plus),
        ] {
            for (index, seq) in seqs.iter().enumerate() {
                if !check_degree_bound(self.t, seq) {
                    return Err((
                        stage,
                        LinkFailure::ResidualBound {
                            index,
                            v: seq.verts[0],
                        },
                    ));
                }
                let mut e = outside.clone();
                for &v in &seq.verts {
                    match flavor {
                        Flavor::In => e.intersect_with(self.t.out_set(v)),
                        Flavor::Out => e.intersect_with(self.t.in_set(v)),
                    }
                }
                let need = factor * e.len();
                let bad = e.iter().find(|&v| {
                    let d = match flavor {
                        Flavor::In => self.t.out_set(v).len(),
                        Flavor::Out => self.t.in_set(v).len(),
                    };
                    d < need
                });
                if let Some(v) = bad {
                    return Err((stage, LinkFailure::ResidualBound { index, v }));
                }
                out.push(e);
            }
        }
        let largest = e_minus
            .iter()
            .chain(&e_plus)
            .map(VertexSet::len)
            .max()
            .unwrap_or(0);
        self.log(
            stage,
            format!(
                "|X| = {} (bound {bound}), largest undominated set {largest}",
                x_set.len()
            ),
        );
        self.state.x_set = Some(x_set);
        self.state.e_minus = e_minus;
        self.state.e_plus = e_plus;
        Ok(())
    }

    fn linkage_pairs(&mut self) -> StageResult<()> {
        let stage = Stage::LinkagePairs;
        let m = self.config.linkage_factor * self.k;
        let heads: Vec<usize> = self
            .state
            .d_minus
            .iter()
            .map(DominatingSequence::head)
            .collect();
        let tails: Vec<usize> = self
            .state
            .d_plus
            .iter()
            .map(DominatingSequence::tail)
            .collect();
        let mut sides = Vec::with_capacity(2);
        for ids in [heads, tails] {
            let sub = self
                .t
                .induced_on(&ids)
                .map_err(|e| invariant(stage, e.to_string()))?;
            let pair = find_linkage_pair(&sub.tournament, m).map_err(at(stage))?;
            sides.push(SideLinkage {
                parent_ids: sub.parent_ids,
                pair,
            });
        }
        let plus = sides.pop().expect("two sides");
        let minus = sides.pop().expect("two sides");
        let describe = |side: &SideLinkage| match side.pair.min_route_count() {
            Some(r) => format!(
                "{} with at least {r} routes per pair",
                side.pair.mode.name()
            ),
            None => side.pair.mode.name().to_string(),
        };
        self.log(
            stage,
            format!(
                "m = {m}; minus side {}, plus side {}",
                describe(&minus),
                describe(&plus)
            ),
        );
        self.state.minus_side = Some(minus);
        self.state.plus_side = Some(plus);
        Ok(())
    }

    fn reorder(&mut self) -> StageResult<()> {
        let stage = Stage::Reorder;
        let minus_front = self.state.minus_side.as_ref().expect("built").sources();
        let plus_front = self.state.plus_side.as_ref().expect("built").sinks();
        let order_minus = front_order(&self.state.d_minus, &minus_front, DominatingSequence::head)
            .ok_or_else(|| invariant(stage, "linkage source is not a head".into()))?;
        let order_plus = front_order(&self.state.d_plus, &plus_front, DominatingSequence::tail)
            .ok_or_else(|| invariant(stage, "linkage sink is not a tail".into()))?;
        self.state.d_minus = permute(&self.state.d_minus, &order_minus);
        self.state.e_minus = permute(&self.state.e_minus, &order_minus);
        self.state.d_plus = permute(&self.state.d_plus, &order_plus);
        self.state.e_plus = permute(&self.state.e_plus, &order_plus);
        self.log(
            stage,
            format!(
                "minus front {:?}, plus front {:?}",
                &order_minus[..minus_front.len()],
                &order_plus[..plus_front.len()]
            ),
        );
        self.state.reorder_minus = order_minus;
        self.state.reorder_plus = order_plus;
        Ok(())
    }

    fn menger(&mut self) -> StageResult<()> {
        let stage = Stage::Menger;
        let n = self.t.n();
        let y_minus =
            VertexSet::from_ids(n, self.state.minus_side.as_ref().expect("built").sinks());
        let x_plus =
            VertexSet::from_ids(n, self.state.plus_side.as_ref().expect("built").sources());
        let mut allowed = self.state.x_set.as_ref().expect("built").complement();
        allowed.union_with(&y_minus);
        allowed.union_with(&x_plus);
        let found = disjoint_paths(self.t, &y_minus, &x_plus, &allowed).map_err(at(stage))?;
        let needed = self.config.linkage_factor * self.k;
        if found.paths.len() < needed {
            return Err((
                stage,
                LinkFailure::MengerShortfall {
                    found: found.paths.len(),
                    needed,
                    cut: found.cut.to_vec(),
                },
            ));
        }
        let longest = found.paths.iter().map(Path::length).max().unwrap_or(0);
        self.log(
            stage,
            format!(
                "{} disjoint paths, longest {longest} edges",
                found.paths.len()
            ),
        );
        self.state.menger_paths = found.paths;
        Ok(())
    }

    fn primed(&mut self) -> StageResult<()> {
        let stage = Stage::Primed;
        let mut taken = self.state.x_set.clone().expect("built");
        let mut x_primed = Vec::with_capacity(self.k);
        let mut y_primed = Vec::with_capacity(self.k);
        for (i, &x) in self.req.sources.iter().enumerate() {
            let v = self
                .t
                .out_set(x)
                .difference(&taken)
                .first()
                .ok_or((stage, LinkFailure::NoNeighbour { kind: "out", i }))?;
            taken.insert(v);
            x_primed.push(v);
        }
        for (i, &y) in self.req.sinks.iter().enumerate() {
            let v = self
                .t
                .in_set(y)
                .difference(&taken)
                .first()
                .ok_or((stage, LinkFailure::NoNeighbour { kind: "in", i }))?;
            taken.insert(v);
            y_primed.push(v);
        }
        self.log(stage, format!("x' = {x_primed:?}, y' = {y_primed:?}"));
        self.state.x_primed = x_primed;
        self.state.y_primed = y_primed;
        self.state.x_prime_set = Some(taken);
        Ok(())
    }

    fn double_primed(&mut self) -> StageResult<()> {
        let stage = Stage::DoublePrimed;
        let x_prime = self.state.x_prime_set.clone().expect("built");
        let mut chosen = VertexSet::empty(self.t.n());
        let mut stepped = 0;
        let mut doubles = [Vec::with_capacity(self.k), Vec::with_capacity(self.k)];
        for (side, flavor) in [Flavor::In, Flavor::Out].into_iter().enumerate() {
            for i in 0..self.k {
                let (start, e) = match flavor {
                    Flavor::In => (self.state.x_primed[i], &self.state.e_minus[i]),
                    Flavor::Out => (self.state.y_primed[i], &self.state.e_plus[i]),
                };
                if !e.contains(start) {
                    doubles[side].push(start);
                    continue;
                }
                let nbrs = match flavor {
                    Flavor::In => self.t.out_set(start),
                    Flavor::Out => self.t.in_set(start),
                };
                if self.config.enforce_degree_floor
                    && nbrs.len() < e.len() + x_prime.len() + 2 * self.k
                {
                    return Err((stage, LinkFailure::SteppingBound { v: start }));
                }
                let mut free = nbrs.difference(e);
                free.difference_with(&x_prime);
                free.difference_with(&chosen);
                let v = free.first().ok_or((
                    stage,
                    LinkFailure::NoNeighbour {
                        kind: if flavor == Flavor::In {
                            "dominated out"
                        } else {
                            "dominated in"
                        },
                        i,
                    },
                ))?;
                chosen.insert(v);
                doubles[side].push(v);
                stepped += 1;
            }
        }
        let [x_double, y_double] = doubles;
        self.log(
            stage,
            format!("x'' = {x_double:?}, y'' = {y_double:?} ({stepped} extra steps)"),
        );
        self.state.x_double = x_double;
        self.state.y_double = y_double;
        Ok(())
    }

    fn entry_exit(&mut self) -> StageResult<()> {
        let stage = Stage::EntryExit;
        let mut entries = Vec::with_capacity(self.k);
        let mut exits = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let d = &self.state.d_minus[i];
            let (x, tail, head) = (self.state.x_double[i], d.tail(), d.head());
            let entry = if self.t.edge(x, head) {
                vec![x, head]
            } else if self.t.edge(x, tail) {
                vec![x, tail, head]
            } else {
                return Err(invariant(
                    stage,
                    format!("{x} is not in-dominated by sequence {i}"),
                ));
            };
            entries.push(Path::new(entry));

            let d = &self.state.d_plus[i];
            let (y, tail, head) = (self.state.y_double[i], d.tail(), d.head());
            let exit = if self.t.edge(tail, y) {
                vec![tail, y]
            } else if self.t.edge(head, y) {
                vec![tail, head, y]
            } else {
                return Err(invariant(
                    stage,
                    format!("{y} is not out-dominated by sequence {i}"),
                ));
            };
            exits.push(Path::new(exit));
        }
        for p in entries.iter().chain(&exits) {
            p.validate(self.t)
                .map_err(|e| invariant(stage, format!("entry/exit path: {e}")))?;
        }
        let long = entries
            .iter()
            .chain(&exits)
            .filter(|p| p.length() == 2)
            .count();
        self.log(
            stage,
            format!(
                "{long} of {} entry/exit paths pass through a second vertex",
                2 * self.k
            ),
        );
        self.state.entry_paths = entries;
        self.state.exit_paths = exits;
        Ok(())
    }

    fn select_paths(&mut self) -> StageResult<()> {
        let stage = Stage::SelectPaths;
        let s = &self.state;
        let special = VertexSet::from_ids(
            self.t.n(),
            s.x_primed
                .iter()
                .chain(&s.y_primed)
                .chain(&s.x_double)
                .chain(&s.y_double)
                .copied(),
        );
        let selected: Vec<usize> = s
            .menger_paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.vertices().iter().all(|&v| !special.contains(v)))
            .map(|(i, _)| i)
            .take(self.k)
            .collect();
        if selected.len() < self.k {
            return Err((
                stage,
                LinkFailure::SelectionShortfall {
                    found: selected.len(),
                    needed: self.k,
                },
            ));
        }
        self.log(stage, format!("kept flow paths {selected:?}"));
        self.state.selected = selected;
        Ok(())
    }

    fn route_sides(&mut self) -> StageResult<()> {
        let stage = Stage::Route;
        let k = self.k;
        let minus = self.state.minus_side.clone().expect("built");
        let plus = self.state.plus_side.clone().expect("built");
        let m = minus.pair.m();
        let chosen: Vec<&Path> = self
            .state
            .selected
            .iter()
            .map(|&i| &self.state.menger_paths[i])
            .collect();

        // minus side: head of D⁻_i sits at source position i; route it to the
        // sink position holding the start of the i-th kept flow path
        let minus_sinks = minus.sinks();
        let mut wanted = vec![usize::MAX; m];
        for (i, q) in chosen.iter().enumerate() {
            let pos = minus_sinks
                .iter()
                .position(|&v| v == q.start())
                .ok_or_else(|| {
                    invariant(
                        stage,
                        format!("flow path {i} does not start on the minus side"),
                    )
                })?;
            wanted[i] = pos;
        }
        let sigma_minus = complete_permutation(wanted);
        let routed = route(
            &self
                .t
                .induced_on(&minus.parent_ids)
                .expect("nonempty")
                .tournament,
            &minus.pair,
            &sigma_minus,
        )
        .map_err(at(stage))?;
        let p_minus: Vec<Path> = routed[..k]
            .iter()
            .map(|p| Path::new(p.vertices().iter().map(|&v| minus.parent_ids[v]).collect()))
            .collect();

        // plus side: the end of the i-th kept flow path sits at some source
        // position, which must reach the tail of D⁺_i at sink position i
        let plus_sources = plus.sources();
        let mut wanted = vec![usize::MAX; m];
        let mut source_pos = Vec::with_capacity(k);
        for (i, q) in chosen.iter().enumerate() {
            let pos = plus_sources
                .iter()
                .position(|&v| v == q.end())
                .ok_or_else(|| {
                    invariant(
                        stage,
                        format!("flow path {i} does not end on the plus side"),
                    )
                })?;
            wanted[pos] = i;
            source_pos.push(pos);
        }
        let sigma_plus = complete_permutation(wanted);
        let routed = route(
            &self
                .t
                .induced_on(&plus.parent_ids)
                .expect("nonempty")
                .tournament,
            &plus.pair,
            &sigma_plus,
        )
        .map_err(at(stage))?;
        let p_plus: Vec<Path> = source_pos
            .iter()
            .map(|&pos| {
                Path::new(
                    routed[pos]
                        .vertices()
                        .iter()
                        .map(|&v| plus.parent_ids[v])
                        .collect(),
                )
            })
            .collect();

        self.log(
            stage,
            format!("sigma- = {sigma_minus:?}, sigma+ = {sigma_plus:?}"),
        );
        self.state.sigma_minus = sigma_minus;
        self.state.sigma_plus = sigma_plus;
        self.state.p_minus = p_minus;
        self.state.p_plus = p_plus;
        Ok(())
    }

    /// Disjointness ledger for the segments, checked before stitching.
    fn check_segments(&self) -> Result<(), String> {
        let s = &self.state;
        let x_set = s.x_set.as_ref().expect("built");
        for (name, vs) in [
            ("x'", &s.x_primed),
            ("y'", &s.y_primed),
            ("x''", &s.x_double),
            ("y''", &s.y_double),
        ] {
            if let Some(v) = vs.iter().find(|&&v| x_set.contains(v)) {
                return Err(format!("{name} vertex {v} lies in X"));
            }
        }
        let mut stepping = VertexSet::empty(self.t.n());
        for i in 0..self.k {
            for (a, b) in [
                (s.x_primed[i], s.x_double[i]),
                (s.y_primed[i], s.y_double[i]),
            ] {
                if stepping.contains(a) {
                    return Err(format!("stepping vertex {a} repeats"));
                }
                stepping.insert(a);
                if a != b {
                    if stepping.contains(b) {
                        return Err(format!("stepping vertex {b} repeats"));
                    }
                    stepping.insert(b);
                }
            }
            if s.x_double[i] != s.x_primed[i] && s.x_double[i] == s.y_primed[i] {
                return Err(format!("pair {i}: x'' collides with y'"));
            }
        }
        for &qi in &s.selected {
            let q = &s.menger_paths[qi];
            if let Some(v) = q.internal().iter().find(|&&v| x_set.contains(v)) {
                return Err(format!("flow path {qi} passes through {v} in X"));
            }
        }
        let minus_ids = &s.minus_side.as_ref().expect("built").parent_ids;
        let plus_ids = &s.plus_side.as_ref().expect("built").parent_ids;
        for p in &s.p_minus {
            if p.vertices()
                .iter()
                .any(|v| minus_ids.binary_search(v).is_err())
            {
                return Err("minus-side route leaves its subtournament".into());
            }
        }
        for p in &s.p_plus {
            if p.vertices()
                .iter()
                .any(|v| plus_ids.binary_search(v).is_err())
            {
                return Err("plus-side route leaves its subtournament".into());
            }
        }
        for i in 0..self.k {
            let d = &s.d_minus[i].verts;
            if s.entry_paths[i].vertices()[1..]
                .iter()
                .any(|v| !d.contains(v))
            {
                return Err(format!("entry path {i} leaves its dominating sequence"));
            }
            let d = &s.d_plus[i].verts;
            let exit = s.exit_paths[i].vertices();
            if exit[..exit.len() - 1].iter().any(|v| !d.contains(v)) {
                return Err(format!("exit path {i} leaves its dominating sequence"));
            }
        }
        Ok(())
    }

    fn stitch(&mut self) -> StageResult<Vec<Path>> {
        let stage = Stage::Stitch;
        self.check_segments().map_err(|m| invariant(stage, m))?;
        let s = &self.state;
        let mut paths = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let q = &s.menger_paths[s.selected[i]];
            let head = [self.req.sources[i], s.x_primed[i], s.x_double[i]];
            let tail = [s.y_double[i], s.y_primed[i], self.req.sinks[i]];
            let segments: [&[usize]; 7] = [
                &head,
                s.entry_paths[i].vertices(),
                s.p_minus[i].vertices(),
                q.vertices(),
                s.p_plus[i].vertices(),
                s.exit_paths[i].vertices(),
                &tail,
            ];
            let mut verts: Vec<usize> = Vec::new();
            for seg in segments {
                for &v in seg {
                    if verts.last() != Some(&v) {
                        verts.push(v);
                    }
                }
            }
            paths.push(Path::new(verts));
        }
        verify_linkage(self.t, self.req, &paths).map_err(at(stage))?;
        let total: usize = paths.iter().map(|p| p.vertices().len()).sum();
        self.log(
            stage,
            format!("{} verified paths, {total} vertices in total", paths.len()),
        );
        Ok(paths)
    }
}

/// Order of `seqs` putting, for each vertex of `front` in turn, the sequence
/// whose `key` equals it first; the remaining sequences keep their order.
fn front_order(
    seqs: &[DominatingSequence],
    front: &[usize],
    key: fn(&DominatingSequence) -> usize,
) -> Option<Vec<usize>> {
    let mut order = Vec::with_capacity(seqs.len());
    let mut placed = vec![false; seqs.len()];
    for &v in front {
        let idx = seqs.iter().position(|s| key(s) == v)?;
        placed[idx] = true;
        order.push(idx);
    }
    order.extend((0..seqs.len()).filter(|&i| !placed[i]));
    Some(order)
}

fn permute<T: Clone>(items: &[T], order: &[usize]) -> Vec<T> {
    order.iter().map(|&i| items[i].clone()).collect()
}

/// Fills the `usize::MAX` holes of a partial injection with the unused
/// targets in ascending order.
fn complete_permutation(mut partial: Vec<usize>) -> Vec<usize> {
    let m = partial.len();
    let mut used = vec![false; m];
    for &p in &partial {
        if p != usize::MAX {
            used[p] = true;
        }
    }
    let mut free = (0..m).filter(|&j| !used[j]);
    for p in partial.iter_mut() {
        if *p == usize::MAX {
            *p = free.next().expect("as many holes as free targets");
        }
    }
    partial
}
