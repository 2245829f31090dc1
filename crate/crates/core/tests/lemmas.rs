use interlace_core::harness::{hard_seed_bound, Binding, Bound, Harness, LemmaName, Verdict};
use interlace_core::interlace::k_fold_interlace;
use interlace_core::{BooleanMatrix, Error, Fraction};

fn f(n: u64, d: u64) -> Fraction {
    Fraction::new(n, d)
}

#[test]
fn hard_seed_bound_matches_float_formula() {
    for p in 1..=12u64 {
        for (n, d) in [(1, 1), (1, 2), (3, 4), (1, 8), (1, 1024), (5, 7)] {
            let y = f(n, d);
            let z = p as f64 + (n as f64 / d as f64).log2();
            let expected = if z <= 0.0 {
                Bound::NegInfinity
            } else {
                Bound::Value((z.log2().ceil() as i64 + 1).max(-15))
            };
            assert_eq!(hard_seed_bound(p, y), expected, "p={p} y={y}");
        }
    }
}

#[test]
fn phi_is_robust() {
    let mut h = Harness::new();
    for b in 0..4 {
        let r = h
            .check_robustness(&BooleanMatrix::phi(), f(1, 10), b)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
    }
}

#[test]
fn double_interlace_is_not_implied_for_phi() {
    // D(φ) = 1 satisfies conditions 1 and 2 but not D − 2 ≥ 1, and the
    // two-fold family value stays at 1
    let mut h = Harness::new();
    let r = h
        .check_double_interlace(&BooleanMatrix::phi(), f(1, 10), 1)
        .unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.premises.iter().all(|p| p.holds()));
    assert!(matches!(
        h.check_double_interlace(&BooleanMatrix::phi(), f(1, 10), 0),
        Err(Error::BindingViolation(_))
    ));
}

#[test]
fn delta_is_capped() {
    let mut h = Harness::new();
    assert!(h
        .check_robustness(&BooleanMatrix::phi(), f(1, 4), 1)
        .is_err());
    assert!(h
        .check_robustness(&BooleanMatrix::phi(), f(207, 1000), 1)
        .is_ok());
}

#[test]
fn column_partition_is_seed_only() {
    let mut h = Harness::new();
    let b: Binding = "p=2,k=1,m=1,x=1/2,y=1/2".parse().unwrap();
    assert!(h
        .check_named(LemmaName::ColumnPartition, &BooleanMatrix::phi(), &b)
        .unwrap()
        .verdict
        .is_pass());
    let other = BooleanMatrix::from_bits(&[vec![true, true], vec![false, true]]).unwrap();
    assert!(matches!(
        h.check_named(LemmaName::ColumnPartition, &other, &b),
        Err(Error::BindingViolation(_))
    ));
}

#[test]
fn transpose_on_interlaced_seed() {
    let mut h = Harness::new();
    let m = k_fold_interlace(&BooleanMatrix::phi(), 2).unwrap();
    for s in ["x=1,y=1", "x=1/2,y=1/2"] {
        let r = h
            .check_named(LemmaName::Transpose, &m, &s.parse().unwrap())
            .unwrap();
        assert!(r.verdict.is_pass(), "{r}");
    }
}

#[test]
fn machine_line_shape() {
    let mut h = Harness::new();
    let r = h
        .check_named(
            LemmaName::HardSeed,
            &BooleanMatrix::phi(),
            &"p=2,x=1,y=1".parse().unwrap(),
        )
        .unwrap();
    assert_eq!(r.machine_line(), "LEMMA hard_seed pass 2 2");
}
