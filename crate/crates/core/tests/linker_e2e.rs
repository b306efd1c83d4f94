//! Whole-pipeline runs on degree-floored random tournaments.

use tlink::linker::{
    link, link_with, verify_linkage, LinkFailure, LinkRequest, LinkViolation, LinkerConfig, Stage,
};
use tlink::{Path, Tournament};

fn floored(n: usize, k: usize, seed: u64) -> Tournament {
    Tournament::random_with_min_degree(n, 452 * k, seed, 1_000)
        .unwrap()
        .0
}

#[test]
fn links_single_pair_on_thousand_vertices() {
    for seed in 0..3u64 {
        let t = floored(1000, 1, seed);
        let req = LinkRequest::from_pairs(&[(seed as usize * 7 + 1, 999 - seed as usize)]);
        let res = link(&t, &req).unwrap();
        verify_linkage(&t, &req, &res.paths).unwrap();
        assert!(res.diagnostics.x_len <= 222);
        assert_eq!(res.diagnostics.stages.len(), Stage::ALL.len());
    }
}

#[test]
fn link_is_deterministic() {
    let t = floored(1000, 1, 11);
    let req = LinkRequest::from_pairs(&[(5, 6)]);
    assert_eq!(link(&t, &req).unwrap(), link(&t, &req).unwrap());
}

#[test]
fn degree_floor_is_enforced_unless_forced() {
    let t = Tournament::random(200, 4);
    let req = LinkRequest::from_pairs(&[(0, 1)]);
    let err = link(&t, &req).unwrap_err();
    assert_eq!(err.stage, Stage::Precondition);
    assert!(matches!(err.failure, LinkFailure::DegreeFloor { .. }));
    // forced runs may still fail, but never at the precondition
    match link_with(&t, &req, &LinkerConfig::forced()) {
        Ok(res) => verify_linkage(&t, &req, &res.paths).unwrap(),
        Err(err) => assert_ne!(err.stage, Stage::Precondition),
    }
}

#[test]
fn malformed_requests_fail_at_precondition() {
    let t = floored(1000, 1, 0);
    for req in [
        LinkRequest::new(vec![], vec![]),
        LinkRequest::new(vec![1, 2], vec![3]),
        LinkRequest::from_pairs(&[(1, 1)]),
        LinkRequest::from_pairs(&[(1, 5000)]),
    ] {
        let err = link(&t, &req).unwrap_err();
        assert_eq!(err.stage, Stage::Precondition);
        assert!(matches!(err.failure, LinkFailure::Request(_)));
    }
}

#[test]
fn verify_linkage_examples() {
    let c3 = Tournament::rotational(3).unwrap();
    let req = LinkRequest::from_pairs(&[(0, 1)]);
    assert!(verify_linkage(&c3, &req, &[Path::new(vec![0, 1])]).is_ok());
    let t5 = Tournament::rotational(5).unwrap();
    let req2 = LinkRequest::from_pairs(&[(0, 3), (4, 2)]);
    let err = verify_linkage(
        &t5,
        &req2,
        &[Path::new(vec![0, 1, 3]), Path::new(vec![4, 1, 2])],
    )
    .unwrap_err();
    assert_eq!(
        err,
        LinkViolation::SharedVertex {
            v: 1,
            first: 0,
            second: 1
        }
    );
}
