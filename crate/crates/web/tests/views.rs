use tlink_web::{
    connectivity, connectivity_view, dominate, domination_view, link_pair, link_view, MAX_DRAWN,
};

#[test]
fn connectivity_certificate_is_consistent() {
    let v = connectivity_view(9, 4).unwrap();
    assert_eq!(v.separator.len(), v.kappa);
    assert_eq!(v.out.len(), 9);
    assert!(v.out.iter().enumerate().all(|(i, row)| !row.contains(&i)));
    assert!(connectivity_view(0, 1).is_err());
    assert!(connectivity_view(MAX_DRAWN + 1, 1).is_err());
}

#[test]
fn domination_residual_sizes_halve() {
    let v = domination_view(30, 2, 2, false).unwrap();
    assert_eq!(v.sequence.len(), 2);
    assert!(v.bound_holds);
    assert!(v.residual_sizes.windows(2).all(|w| 2 * w[1] <= w[0]));
    assert_eq!(*v.residual_sizes.last().unwrap(), v.residual.len());
}

#[test]
fn link_view_returns_verified_path() {
    let v = link_view(1, 10, 20).unwrap();
    assert!(v.verified);
    assert_eq!((v.path[0], *v.path.last().unwrap()), (10, 20));
    assert!(v.min_degree >= 452);
    assert_eq!(v.stages.len(), 13);
}

#[test]
fn exports_return_json() {
    assert!(connectivity(5, 0).starts_with("{\"n\":5"));
    assert!(dominate(5, 0, 9, true).starts_with("{\"error\":"));
    assert!(link_pair(0, 3, 3).starts_with("{\"error\":"));
}
