use std::collections::HashSet;

use interlace_core::canonical::canonicalize;
use interlace_core::interlace::k_fold_interlace;
use interlace_core::reduction::{
    phi5, preprocess, reduce, Preprocessed, ReductionOutput, ReductionParams, VbpInstance,
};
use interlace_core::solver::Solver;
use interlace_core::{BooleanMatrix, Error};
use proptest::prelude::*;

fn toy() -> ReductionOutput {
    let bits = |s: &str| s.bytes().map(|b| b == b'1').collect::<Vec<_>>();
    let inst = VbpInstance::new(4, 4, ["1000", "1100", "0010", "0000"].map(bits).to_vec())
        .and_then(VbpInstance::assume_processed)
        .unwrap();
    reduce(&inst, &ReductionParams::toy(4).unwrap()).unwrap()
}

#[test]
fn overloaded_coordinate_short_circuits() {
    let v = vec![true, false, false, false];
    let inst = VbpInstance::new(4, 4, vec![v; 5]).unwrap();
    assert!(matches!(
        preprocess(&inst).unwrap(),
        Preprocessed::ImmediateNo { coordinate: 1 }
    ));
}

#[test]
fn preprocessing_pads_to_power_of_two() {
    let inst = VbpInstance::new(
        3,
        4,
        vec![vec![true, false, true], vec![false, true, false]],
    )
    .unwrap();
    let Preprocessed::Ready(p) = preprocess(&inst).unwrap() else {
        panic!("load is at most 4")
    };
    assert_eq!((p.d(), p.n()), (16, 6));
    assert!((0..p.d()).all(|c| p.load(c) <= 4));
    // preprocessing twice changes nothing
    let Preprocessed::Ready(q) = preprocess(&p).unwrap() else {
        panic!()
    };
    assert_eq!(q.vectors(), p.vectors());
}

#[test]
fn row_labels_are_distinct() {
    let out = toy();
    let labels: HashSet<_> = (0..out.n_rows()).map(|r| out.row_label(r)).collect();
    assert_eq!(labels.len(), out.n_rows());
}

#[test]
fn phi5_copies_are_balanced_and_distinct() {
    let patterns: Vec<Vec<bool>> = (1..=5)
        .map(|p| (1..=32).map(|c| phi5(p, c)).collect())
        .collect();
    for p in &patterns {
        assert_eq!(p.iter().filter(|&&b| b).count(), 16);
    }
    let distinct: HashSet<_> = patterns.iter().collect();
    assert_eq!(distinct.len(), patterns.len());
}

#[test]
fn gap_dimension_must_match_block() {
    let out = toy();
    assert!(out.extract_gap_submatrix(2, 4).is_err());
}

#[test]
fn gap_dichotomy_on_toy_instance() {
    let out = toy();
    let mut solver = Solver::new();
    let mut values = Vec::new();
    for dim in [4usize, 2, 1] {
        let g = out.extract_gap_submatrix(dim, dim).unwrap();
        let k = out.params.q1 + 1 + out.active_at(dim - 1).len().min(2);
        let reference = k_fold_interlace(&BooleanMatrix::phi(), k).unwrap();
        assert_eq!(canonicalize(&g), canonicalize(&reference));
        values.push(solver.solve(&g).unwrap().depth);
    }
    assert_eq!(values, [3, 3, 4]);
}

#[test]
fn default_params_reject_small_or_odd_dimensions() {
    assert!(matches!(
        interlace_core::reduction::default_params(2),
        Err(Error::DomainTooSmall { .. })
    ));
    assert!(matches!(
        interlace_core::reduction::default_params(12),
        Err(Error::InvalidParameter(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn column_provenance_round_trips(col in 0u128..(1u128 << 40)) {
        let out = toy();
        let col = col % out.n_cols();
        let origin = out.col_origin(col);
        prop_assert_eq!(out.col_index(&origin), col);
    }
}
