use interlace_core::bracket::{block_balance, enumerate_members, is_member, BracketSpec};
use interlace_core::canonical::canonicalize;
use interlace_core::density::Density;
use interlace_core::interlace::{binary_interlace, k_fold_interlace, row_label};
use interlace_core::naive::naive_reference;
use interlace_core::rank::real_rank_lower_bound;
use interlace_core::reservoir::{full_product, verify_balance};
use interlace_core::solver::{solve_exact, verify_protocol};
use interlace_core::subgame::is_subgame;
use interlace_core::{BooleanMatrix, Fraction, Label};
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BooleanMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r)
            .prop_map(|bits| BooleanMatrix::from_bits(&bits).unwrap())
    })
}

fn permuted(m: &BooleanMatrix, row_perm: &[usize], col_perm: &[usize]) -> BooleanMatrix {
    m.extract_indices(row_perm, col_perm)
}

fn shuffle(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v.swap(i, (s % (i as u64 + 1)) as usize);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution(m in matrix(5, 6)) {
        prop_assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn extract_composes(m in matrix(5, 6), rs in any::<u64>(), cs in any::<u64>()) {
        let r1: Vec<Label> = m.rows().iter().enumerate().filter(|(i, _)| rs >> i & 1 == 1 || *i == 0).map(|x| x.1.clone()).collect();
        let c1: Vec<Label> = m.cols().iter().enumerate().filter(|(j, _)| cs >> j & 1 == 1 || *j == 0).map(|x| x.1.clone()).collect();
        let r2 = &r1[..1.max(r1.len() / 2)];
        let c2 = &c1[..1.max(c1.len() / 2)];
        let inner = m.extract(&r1, &c1).unwrap();
        prop_assert_eq!(inner.extract(r2, c2).unwrap(), m.extract(r2, c2).unwrap());
    }

    #[test]
    fn canonical_form_ignores_order_and_duplicates(m in matrix(5, 6), seed in any::<u64>()) {
        let rp = shuffle(m.n_rows(), seed);
        let cp = shuffle(m.n_cols(), seed.rotate_left(17));
        let p = permuted(&m, &rp, &cp);
        prop_assert_eq!(canonicalize(&p), canonicalize(&m));
        let mut dup_rows: Vec<usize> = (0..m.n_rows()).collect();
        dup_rows.push(0);
        let d = m.extract_indices(&dup_rows, &(0..m.n_cols()).collect::<Vec<_>>());
        let d = d.relabel((0..d.n_rows()).map(|i| Label::atom(i as i64 + 1)).collect(), d.cols().to_vec()).unwrap();
        prop_assert_eq!(canonicalize(&d), canonicalize(&m));
        prop_assert_eq!(canonicalize(&canonicalize(&m).to_matrix()), canonicalize(&m));
    }

    #[test]
    fn solver_matches_naive_reference(m in matrix(4, 6)) {
        let sol = solve_exact(&m).unwrap();
        prop_assert_eq!(sol.depth, naive_reference(&m).unwrap());
        prop_assert!(verify_protocol(&m, &sol.certificate).unwrap());
        prop_assert_eq!(sol.certificate.depth(), sol.depth);
    }

    #[test]
    fn complexity_is_invariant(m in matrix(5, 6), seed in any::<u64>()) {
        let d = solve_exact(&m).unwrap().depth;
        let p = permuted(&m, &shuffle(m.n_rows(), seed), &shuffle(m.n_cols(), !seed));
        prop_assert_eq!(solve_exact(&p).unwrap().depth, d);
        prop_assert_eq!(solve_exact(&m.transpose()).unwrap().depth, d);
    }

    #[test]
    fn complexity_is_monotone_under_extraction(m in matrix(5, 6), rs in any::<u64>(), cs in any::<u64>()) {
        let rows: Vec<usize> = (0..m.n_rows()).filter(|i| rs >> i & 1 == 1 || *i == 0).collect();
        let cols: Vec<usize> = (0..m.n_cols()).filter(|j| cs >> j & 1 == 1 || *j == 0).collect();
        let sub = m.extract_indices(&rows, &cols);
        prop_assert!(solve_exact(&sub).unwrap().depth <= solve_exact(&m).unwrap().depth);
        prop_assert!(is_subgame(&sub, &m).unwrap().is_some());
    }

    #[test]
    fn rank_bound_is_sound(m in matrix(5, 6)) {
        prop_assert!(real_rank_lower_bound(&m) <= solve_exact(&m).unwrap().depth);
    }

    #[test]
    fn binary_interlace_costs_at_most_one_bit(f in matrix(2, 3), g in matrix(2, 3)) {
        let (df, dg) = (solve_exact(&f).unwrap().depth, solve_exact(&g).unwrap().depth);
        let d = solve_exact(&binary_interlace(&f, &g).unwrap()).unwrap().depth;
        prop_assert!(d >= df.max(dg));
        prop_assert!(d <= df.max(dg) + 1);
    }

    #[test]
    fn family_members_are_counted_and_recognised(m in matrix(2, 3), p in 1usize..=2, xn in 1u64..=2, yn in 1u64..=4) {
        let spec = BracketSpec::new(
            m,
            p,
            Density::rational(Fraction::new(xn, 2)).unwrap(),
            Density::rational(Fraction::new(yn, 4)).unwrap(),
        ).unwrap();
        let members: Vec<BooleanMatrix> = enumerate_members(&spec, 100_000).unwrap().collect();
        prop_assert_eq!(num_bigint::BigUint::from(members.len()), spec.member_count());
        for member in &members {
            prop_assert!(is_member(&spec, member));
        }
    }

    #[test]
    fn block_balance_meets_its_guarantee(q in 1usize..=8, m in 1usize..=8, xn in 1u64..=4, mask in any::<u64>()) {
        let x = Fraction::new(xn, 4);
        let selection: Vec<Label> = (0..q * m)
            .filter(|k| mask >> (k % 64) & 1 == 1)
            .map(|k| row_label(k / m + 1, &Label::atom((k % m) as i64 + 1)))
            .collect();
        let out = block_balance(&selection, q, m, x).unwrap();
        let beta = Fraction::new(selection.len() as u64, (q * m) as u64);
        prop_assert_eq!(out.beta, beta);
        if beta < x {
            prop_assert!(out.blocks.is_empty() && out.selection.is_empty());
        } else {
            let want = if x == Fraction::from_integer(1) {
                q
            } else {
                (Fraction::from_integer(q as u64) * (beta - x) / (Fraction::from_integer(1) - x)).ceil().to_integer() as usize
            };
            prop_assert!(out.blocks.len() >= want);
            let t = (Fraction::from_integer(m as u64) * x).ceil().to_integer() as usize;
            for b in &out.blocks {
                let held = selection.iter().filter(|l| l.get(0).and_then(Label::as_atom) == Some(*b as i64)).count();
                prop_assert!(held >= t);
            }
        }
    }

    #[test]
    fn quota_is_the_exact_ceiling(num in 1u64..=16, den in 1u64..=16, n in 0u64..=1000) {
        prop_assume!(num <= den);
        let f = Fraction::new(num, den);
        let q = Density::rational(f).unwrap().quota_u64(n);
        prop_assert_eq!(q, (Fraction::from_integer(n) * f).ceil().to_integer());
        // square root densities: q is the least integer with q² ≥ n² f
        let sq = Density::rational(f).unwrap().pow(num_rational::Ratio::new(1, 2)).quota_u64(n);
        let target = Fraction::from_integer(n * n) * f;
        prop_assert!(Fraction::from_integer(sq * sq) >= target);
        prop_assert!(sq == 0 || Fraction::from_integer((sq - 1) * (sq - 1)) < target);
    }
}

#[test]
fn interlace_staircase_small() {
    let phi = BooleanMatrix::phi();
    for (k, want) in [(1, 1), (2, 2), (3, 3), (4, 3)] {
        let m = k_fold_interlace(&phi, k).unwrap();
        assert_eq!(solve_exact(&m).unwrap().depth, want);
        assert_eq!(naive_reference(&m).unwrap(), want);
    }
}

#[test]
fn full_product_is_exactly_balanced() {
    let alphabet: Vec<Label> = (1..=3).map(Label::atom).collect();
    let s = full_product(4, 2, &alphabet).unwrap();
    let report = verify_balance(&s);
    assert!(report.pass);
    assert_eq!(report.max_deviation, Fraction::from_integer(0));
}
