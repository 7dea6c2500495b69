mod common;

use common::{labelings_of, mi_oracle, set_partitions, table_of, transport_lp};
use node2coords::eval::mutual_info_scores;
use node2coords::linalg::Matrix;

#[test]
fn transport_lp_matches_reference_solver() {
    // Frozen from an independent simplex solver.
    let c = Matrix::from_rows(&[
        vec![0.0, 0.7, 0.2, 0.9],
        vec![0.4, 0.1, 0.8, 0.3],
        vec![0.6, 0.5, 0.0, 0.2],
    ])
    .unwrap();
    let v = transport_lp(&c, &[0.5, 0.3, 0.2], &[0.1, 0.4, 0.25, 0.25]);
    assert!((v - 0.235).abs() < 1e-12, "{v}");
}

#[test]
fn transport_lp_two_by_two_closed_form() {
    // With a = (p, 1-p), b = (q, 1-q) and zero diagonal cost the optimum moves |p - q|.
    let c = Matrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 0.0]]).unwrap();
    let v = transport_lp(&c, &[0.7, 0.3], &[0.4, 0.6]);
    assert!((v - 0.3 * 2.0).abs() < 1e-12);
    let v = transport_lp(&c, &[0.2, 0.8], &[0.5, 0.5]);
    assert!((v - 0.3 * 3.0).abs() < 1e-12);
}

#[test]
fn transport_lp_identity_is_free() {
    let c = Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64).abs());
    let a = [0.1, 0.2, 0.3, 0.4];
    assert!(transport_lp(&c, &a, &a).abs() < 1e-14);
}

// Frozen from a reference implementation (arithmetic normalisation).
const REFERENCE: &[(&[usize], &[usize], f64, f64)] = &[
    (
        &[0, 1, 2, 0, 0, 2, 0],
        &[1, 2, 0, 2, 0, 0, 0],
        -0.021360953872580555,
        0.37833397252557743,
    ),
    (
        &[1, 0, 0, 0, 2, 1, 0, 2],
        &[0, 0, 2, 2, 2, 0, 2, 2],
        0.29164674649361233,
        0.44718655302313776,
    ),
    (
        &[0, 0, 0, 2, 0, 1, 1, 0],
        &[2, 0, 2, 1, 2, 2, 0, 0],
        0.1013817930293267,
        0.4058482773858431,
    ),
    (
        &[1, 0, 2, 2, 0],
        &[2, 0, 2, 0, 1],
        -0.2499999999999998,
        0.4743509876140318,
    ),
    (
        &[1, 1, 1, 2, 1, 1, 1, 0, 0, 2],
        &[0, 0, 2, 1, 2, 1, 1, 2, 1, 1],
        -0.06062836021802101,
        0.2342072292291624,
    ),
    (&[0, 2, 1], &[0, 1, 0], -9.610279511444764e-16, 0.7336804366512112),
    (
        &[1, 0, 2, 0, 2, 2, 1, 1, 2],
        &[1, 2, 1, 2, 1, 0, 0, 1, 1],
        0.30272339519554403,
        0.5184425639283803,
    ),
    (&[0, 2, 2], &[1, 2, 2], 1.0, 1.0),
    (
        &[1, 2, 1, 2, 1, 0, 1, 1, 0],
        &[2, 0, 1, 0, 0, 1, 0, 2, 0],
        -0.07924231644342648,
        0.25620161655125184,
    ),
    (
        &[1, 1, 0, 0, 1, 1, 2, 1],
        &[0, 1, 2, 1, 2, 1, 1, 2],
        -0.28378190057718683,
        0.1511843163514883,
    ),
    (
        &[0, 0, 0, 0, 0, 0, 2, 0],
        &[0, 1, 2, 0, 1, 1, 0, 0],
        -0.09657265198135692,
        0.14151973417435695,
    ),
    (
        &[2, 1, 2, 2, 1, 0, 2, 2],
        &[2, 2, 2, 2, 0, 1, 2, 2],
        0.5287809401769307,
        0.6875025493382446,
    ),
    (
        &[0, 1, 1, 2, 0, 2, 1, 0, 0, 2, 1, 1],
        &[1, 1, 0, 0, 2, 2, 1, 0, 1, 2, 0, 0],
        0.06963632061889742,
        0.27045701414598516,
    ),
    (&[0, 0, 1, 2], &[0, 0, 1, 1], 4.0 / 7.0, 0.8),
];

#[test]
fn mi_oracle_matches_frozen_reference() {
    for &(a, b, ami, nmi) in REFERENCE {
        let (oa, on) = mi_oracle(&table_of(a, b));
        assert!((oa - ami).abs() < 1e-12, "{a:?} {b:?}: {oa} vs {ami}");
        assert!((on - nmi).abs() < 1e-12, "{a:?} {b:?}: {on} vs {nmi}");
    }
}

#[test]
fn scores_match_frozen_reference() {
    for &(a, b, ami, nmi) in REFERENCE {
        let (sa, sn) = mutual_info_scores(a, b).unwrap();
        assert!((sa - ami).abs() < 1e-12, "{a:?} {b:?}: {sa} vs {ami}");
        assert!((sn - nmi).abs() < 1e-12, "{a:?} {b:?}: {sn} vs {nmi}");
    }
}

#[test]
fn scores_are_symmetric() {
    for &(a, b, _, _) in REFERENCE {
        let (x, y) = mutual_info_scores(a, b).unwrap();
        let (p, q) = mutual_info_scores(b, a).unwrap();
        assert!((x - p).abs() < 1e-12 && (y - q).abs() < 1e-12);
    }
}

#[test]
fn table_round_trip() {
    let t = vec![vec![2, 0, 1], vec![0, 3, 1]];
    let (a, b) = labelings_of(&t);
    assert_eq!(table_of(&a, &b), t);
}

#[test]
fn partition_counts_match_stirling_numbers() {
    // S(n,1) + S(n,2) + S(n,3)
    assert_eq!(set_partitions(4, 3).len(), 1 + 7 + 6);
    assert_eq!(set_partitions(6, 3).len(), 1 + 31 + 90);
    assert_eq!(set_partitions(10, 3).len(), 1 + 511 + 9330);
}
