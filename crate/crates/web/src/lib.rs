//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string, so
//! the page needs no generated TypeScript types. The `*_view` functions hold
//! the logic and are callable natively for testing.

use serde::Serialize;
use tlink::domination::{check_degree_bound, greedy_dominating, Flavor};
use tlink::flows::connectivity_certificate;
use tlink::linker::{link, verify_linkage, LinkRequest};
use tlink::Tournament;
use wasm_bindgen::prelude::*;

/// Largest tournament the small-graph views will draw.
pub const MAX_DRAWN: usize = 40;

#[derive(Debug, Serialize)]
pub struct ConnectivityView {
    pub n: usize,
    /// Row `i` lists the out-neighbours of `i`.
    pub out: Vec<Vec<usize>>,
    pub kappa: usize,
    pub separator: Vec<usize>,
    pub from: Option<usize>,
    pub to: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct DominationView {
    pub n: usize,
    pub out: Vec<Vec<usize>>,
    pub sequence: Vec<usize>,
    pub residual: Vec<usize>,
    pub residual_sizes: Vec<usize>,
    pub bound_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct LinkView {
    pub n: usize,
    pub min_degree: usize,
    pub attempt_seed: u64,
    pub source: usize,
    pub sink: usize,
    pub path: Vec<usize>,
    pub x_len: usize,
    pub verified: bool,
    pub stages: Vec<(String, String)>,
}

#[derive(Debug, Serialize)]
struct ErrorView {
    error: String,
}

fn adjacency(t: &Tournament) -> Vec<Vec<usize>> {
    t.vertices().map(|v| t.out_set(v).to_vec()).collect()
}

fn drawable(n: usize) -> Result<(), String> {
    if (1..=MAX_DRAWN).contains(&n) {
        Ok(())
    } else {
        Err(format!("n must be between 1 and {MAX_DRAWN}"))
    }
}

pub fn connectivity_view(n: usize, seed: u64) -> Result<ConnectivityView, String> {
    drawable(n)?;
    let t = Tournament::random(n, seed);
    let cert = connectivity_certificate(&t);
    let sep = cert.separation.as_ref();
    Ok(ConnectivityView {
        n,
        out: adjacency(&t),
        kappa: cert.kappa,
        separator: sep.map(|s| s.separator.to_vec()).unwrap_or_default(),
        from: sep.map(|s| s.from),
        to: sep.map(|s| s.to),
    })
}

pub fn domination_view(
    n: usize,
    seed: u64,
    size: usize,
    out_flavor: bool,
) -> Result<DominationView, String> {
    drawable(n)?;
    let t = Tournament::random(n, seed);
    let flavor = if out_flavor { Flavor::Out } else { Flavor::In };
    let seq = greedy_dominating(&t, &t.all_vertices(), size, flavor).map_err(|e| e.to_string())?;
    Ok(DominationView {
        n,
        out: adjacency(&t),
        bound_holds: check_degree_bound(&t, &seq),
        sequence: seq.verts,
        residual: seq.residual.to_vec(),
        residual_sizes: seq.residual_sizes,
    })
}

/// Links `source` to `sink` in a random tournament on 1000 vertices with
/// minimum semi-degree at least 452.
pub fn link_view(seed: u64, source: usize, sink: usize) -> Result<LinkView, String> {
    const N: usize = 1000;
    let (t, attempt_seed) =
        Tournament::random_with_min_degree(N, 452, seed, 10_000).map_err(|e| e.to_string())?;
    let req = LinkRequest::from_pairs(&[(source, sink)]);
    let res = link(&t, &req).map_err(|e| e.to_string())?;
    Ok(LinkView {
        n: N,
        min_degree: t.min_semi_degree(),
        attempt_seed,
        source,
        sink,
        verified: verify_linkage(&t, &req, &res.paths).is_ok(),
        path: res.paths[0].vertices().to_vec(),
        x_len: res.diagnostics.x_len,
        stages: res
            .diagnostics
            .stages
            .iter()
            .map(|r| (r.stage.name().to_string(), r.summary.clone()))
            .collect(),
    })
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    let encoded = match &result {
        Ok(view) => serde_json::to_string(view),
        Err(error) => serde_json::to_string(&ErrorView {
            error: error.clone(),
        }),
    };
    encoded.expect("views serialize")
}

#[wasm_bindgen]
pub fn connectivity(n: usize, seed: u32) -> String {
    to_json(connectivity_view(n, u64::from(seed)))
}

#[wasm_bindgen]
pub fn dominate(n: usize, seed: u32, size: usize, out_flavor: bool) -> String {
    to_json(domination_view(n, u64::from(seed), size, out_flavor))
}

#[wasm_bindgen]
pub fn link_pair(seed: u32, source: usize, sink: usize) -> String {
    to_json(link_view(u64::from(seed), source, sink))
}
