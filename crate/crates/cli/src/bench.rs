//! Seeded end-to-end trials and their tab-separated report.
//!
//! Each record is one line with the fields
//! `suite n k seed stage_outcomes runtime_ms` separated by tabs, preceded by
//! a header line naming them. `stage_outcomes` lists every linker stage as
//! `name:ok`, `name:fail` or `name:skip`, comma-separated, in pipeline order.
//! Trial `i` of a suite run with base seed `s` uses seed `s + i`.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tlink::linker::{link_with, verify_linkage, LinkRequest, LinkerConfig, Stage};
use tlink::Tournament;

pub const HEADER: &str = "suite\tn\tk\tseed\tstage_outcomes\truntime_ms";

/// Resampling attempts allowed when drawing a degree-floored tournament.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSpec {
    pub n: usize,
    pub k: usize,
    /// Draw the tournament with minimum semi-degree `452k` and run with the
    /// floor enforced; otherwise draw uniformly and run forced.
    pub floored: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub suite: String,
    pub spec: TrialSpec,
    /// Stage reached and whether it failed there.
    pub failed_at: Option<Stage>,
    pub runtime_ms: u64,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.failed_at.is_none()
    }

    pub fn stage_outcomes(&self) -> String {
        Stage::ALL
            .iter()
            .map(|&s| {
                let outcome = match self.failed_at {
                    None => "ok",
                    Some(f) if s < f => "ok",
                    Some(f) if s == f => "fail",
                    Some(_) => "skip",
                };
                format!("{}:{outcome}", s.name())
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.suite,
            self.spec.n,
            self.spec.k,
            self.spec.seed,
            self.stage_outcomes(),
            self.runtime_ms
        )
    }
}

/// Tournament and terminal pairs of a trial, fully determined by its spec.
pub fn instance(spec: &TrialSpec) -> Result<(Tournament, LinkRequest), String> {
    let t = if spec.floored {
        let floor = LinkerConfig::default().degree_factor * spec.k;
        Tournament::random_with_min_degree(spec.n, floor, spec.seed, MAX_ATTEMPTS)
            .map_err(|e| e.to_string())?
            .0
    } else {
        Tournament::random(spec.n, spec.seed)
    };
    if 2 * spec.k > spec.n {
        return Err(format!("2k = {} exceeds n = {}", 2 * spec.k, spec.n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let picks = sample(&mut rng, spec.n, 2 * spec.k).into_vec();
    let req = LinkRequest::new(picks[..spec.k].to_vec(), picks[spec.k..].to_vec());
    Ok((t, req))
}

/// Runs one trial; the linker output is re-verified independently.
pub fn run_trial(suite: &str, spec: TrialSpec, timing: bool) -> Result<TrialRecord, String> {
    let (t, req) = instance(&spec)?;
    let config = if spec.floored {
        LinkerConfig::default()
    } else {
        LinkerConfig::forced()
    };
    let start = Instant::now();
    let outcome = link_with(&t, &req, &config);
    let elapsed = start.elapsed().as_millis() as u64;
    let failed_at = match outcome {
        Ok(res) => {
            verify_linkage(&t, &req, &res.paths)
                .map_err(|e| format!("linker output failed verification: {e}"))?;
            None
        }
        Err(err) => Some(err.stage),
    };
    Ok(TrialRecord {
        suite: suite.to_string(),
        spec,
        failed_at,
        runtime_ms: if timing { elapsed } else { 0 },
    })
}

pub const SUITES: [&str; 5] = ["smoke", "k1", "k2", "forced", "full"];

/// Trial specs of a named suite, as `(suite, spec)` in report order.
pub fn suite_specs(name: &str, base_seed: u64) -> Option<Vec<(&'static str, TrialSpec)>> {
    let repeat = |suite: &'static str, n: usize, k: usize, floored: bool, trials: u64| {
        (0..trials)
            .map(move |i| {
                (
                    suite,
                    TrialSpec {
                        n,
                        k,
                        floored,
                        seed: base_seed.wrapping_add(i),
                    },
                )
            })
            .collect::<Vec<_>>()
    };
    let specs = match name {
        "smoke" => repeat("smoke", 1000, 1, true, 4),
        "k1" => repeat("k1", 1000, 1, true, 20),
        "k2" => repeat("k2", 2200, 2, true, 5),
        "forced" => [60, 120, 240]
            .into_iter()
            .flat_map(|n| repeat("forced", n, 1, false, 3))
            .collect(),
        "full" => ["smoke", "k1", "k2", "forced"]
            .into_iter()
            .flat_map(|s| suite_specs(s, base_seed).expect("known suite"))
            .collect(),
        _ => return None,
    };
    Some(specs)
}

/// Runs the trials concurrently; records come back in spec order.
pub fn run_suite(specs: &[(&str, TrialSpec)], timing: bool) -> Result<Vec<TrialRecord>, String> {
    specs
        .par_iter()
        .map(|(suite, spec)| run_trial(suite, *spec, timing))
        .collect()
}

pub fn report(records: &[TrialRecord]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.line());
        out.push('\n');
    }
    out
}
