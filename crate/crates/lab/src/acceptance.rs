//! The acceptance suite: one pass/fail verdict per criterion, with pinned
//! seeds, tolerances and time limits.

use std::time::{Duration, Instant};

use interlace_core::bracket::{
    block_balance, family_complexity_with, relaxed_to_classical, BracketSpec, Equipartition,
};
use interlace_core::canonical::canonicalize;
use interlace_core::density::Density;
use interlace_core::harness::{hard_seed_bound, Binding, Bound, Harness, LemmaName, Verdict};
use interlace_core::interlace::{k_fold_interlace, relaxed_interlace, row_label};
use interlace_core::naive::naive_reference;
use interlace_core::reduction::{reduce, ReductionParams, VbpInstance};
use interlace_core::reservoir::{
    build_balanced_set, default_epsilon, full_product, verify_balance, BalanceMode,
};
use interlace_core::solver::{verify_protocol, Solver};
use interlace_core::{BooleanMatrix, Fraction, Label};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::growth::measure_growth;

pub const SEED: u64 = 0x1a7e_c0de;

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl Criterion {
    /// `ACCEPT <id> <pass|fail> <name>`.
    pub fn line(&self) -> String {
        format!(
            "ACCEPT {:02} {} {}",
            self.id,
            if self.pass { "pass" } else { "fail" },
            self.name
        )
    }

    /// The machine line followed by the detail and timing.
    pub fn report(&self) -> String {
        format!(
            "{}  # {} ({:.2}s)",
            self.line(),
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// A certificate produced while checking a criterion.
#[derive(Clone, Debug)]
pub struct CertCheck {
    pub source: String,
    pub accepted: bool,
    pub depth_matches: bool,
}

#[derive(Default)]
pub struct CertLog(pub Vec<CertCheck>);

impl CertLog {
    /// Solves `m`, checks the certificate and returns the reported value.
    fn solve(&mut self, solver: &mut Solver, m: &BooleanMatrix, source: String) -> u32 {
        let sol = solver.solve(m).expect("solver within its node cap");
        let accepted = verify_protocol(m, &sol.certificate).unwrap_or(false);
        let depth_matches = sol.certificate.depth() == sol.depth;
        self.0.push(CertCheck {
            source,
            accepted,
            depth_matches,
        });
        sol.depth
    }
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<u64>,
    f: impl FnOnce() -> (bool, String),
) -> Criterion {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; over the {}s limit", limit.unwrap().as_secs())
    };
    Criterion {
        id,
        name,
        pass: ok && in_time,
        detail,
        elapsed,
        limit,
    }
}

fn phi_power(k: usize) -> BooleanMatrix {
    k_fold_interlace(&BooleanMatrix::phi(), k).expect("small interlace")
}

/// Random matrix with at most 4 distinct rows and at most 16 distinct
/// columns.
fn guarded_matrix(rng: &mut ChaCha8Rng) -> BooleanMatrix {
    loop {
        let r = rng.gen_range(1..=5);
        let c = rng.gen_range(1..=10);
        let bits: Vec<Vec<bool>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen()).collect())
            .collect();
        let m = BooleanMatrix::from_bits(&bits).expect("rectangular");
        let d = m.dedup();
        if d.n_rows() <= 4 && d.n_cols() <= 16 {
            return m;
        }
    }
}

pub fn solver_ground_truth(log: &mut CertLog) -> Criterion {
    timed(1, "solver-ground-truth", Some(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut solver = Solver::new();
        let mut bad = Vec::new();
        for i in 0..200 {
            let m = guarded_matrix(&mut rng);
            let d = log.solve(&mut solver, &m, format!("random matrix {i}"));
            let n = naive_reference(&m).expect("within the guard");
            if d != n {
                bad.push(format!("#{i}: solver {d} naive {n}"));
            }
        }
        (
            bad.is_empty(),
            if bad.is_empty() {
                "200/200 agree".into()
            } else {
                bad.join(", ")
            },
        )
    })
}

pub fn interlace_staircase(log: &mut CertLog) -> Criterion {
    timed(2, "interlace-staircase", Some(600), || {
        let mut solver = Solver::new();
        let want = [1, 2, 3, 3, 4, 4];
        let mut got = Vec::new();
        let mut ok = true;
        for k in 1..=6 {
            let m = phi_power(k);
            let d = log.solve(&mut solver, &m, format!("<phi>^{k}"));
            // ⌈log k⌉ + 1
            let upper = (k as f64).log2().ceil() as u32 + 1;
            ok &= d == want[k - 1] && d == upper;
            if k <= 4 {
                ok &= naive_reference(&m).ok() == Some(d);
            }
            got.push(d.to_string());
        }
        (ok, format!("D = {}", got.join(",")))
    })
}

pub fn one_bit_gap(log: &mut CertLog) -> Criterion {
    timed(3, "one-bit-gap", None, || {
        let mut solver = Solver::new();
        let mut parts = Vec::new();
        let mut ok = true;
        for a in 1..=2u32 {
            let k = 1usize << a;
            let lo = log.solve(&mut solver, &phi_power(k), format!("<phi>^{k}"));
            let hi = log.solve(&mut solver, &phi_power(k + 1), format!("<phi>^{}", k + 1));
            ok &= hi == lo + 1;
            parts.push(format!("a={a}: {lo}->{hi}"));
        }
        (ok, parts.join(", "))
    })
}

pub fn hard_seed() -> Criterion {
    timed(4, "hard-seed", Some(300), || {
        let mut solver = Solver::new();
        let mut parts = Vec::new();
        let mut ok = true;
        for p in 1..=4usize {
            for y in [Fraction::from_integer(1), Fraction::new(1, 2)] {
                let spec = BracketSpec::new(
                    BooleanMatrix::phi(),
                    p,
                    Density::one(),
                    Density::rational(y).unwrap(),
                )
                .expect("valid family");
                let r =
                    family_complexity_with(&spec, u64::MAX, 0, 0, &mut solver).expect("enumerable");
                let bound = hard_seed_bound(p as u64, y);
                // floating-point reading of ⌈log(p + log y)⌉ + 1
                let z = p as f64 + (*y.numer() as f64 / *y.denom() as f64).log2();
                let float = if z <= 0.0 {
                    Bound::NegInfinity
                } else {
                    Bound::Value(z.log2().ceil() as i64 + 1)
                };
                ok &= r.exact && bound == float && Bound::Value(r.value as i64) >= bound;
                parts.push(format!("p={p},y={y}:{}>={bound}", r.value));
            }
        }
        (ok, parts.join(" "))
    })
}

/// The curated bindings for the lemma suite.
pub fn lemma_grid() -> Vec<(LemmaName, BooleanMatrix, Binding)> {
    let m = |rows: &[&str]| BooleanMatrix::from_strs(rows).expect("literal");
    let two_col = [
        m(&["10"]),
        m(&["10", "01"]),
        m(&["11", "01"]),
        m(&["1", "0"]),
    ];
    let wide = m(&["110", "011"]);
    let b = |s: &str| s.parse::<Binding>().expect("literal binding");
    let mut grid = Vec::new();
    let mono = [
        "p=2,x=1,y=1,pp=1",
        "p=2,x=1,y=1,yp=1/2",
        "p=2,x=1,y=3/4,pp=1,yp=1/2",
        "p=2,x=1,y=1,xp=1/2",
    ];
    let proj = [
        "p=2,l=1,x=1,y=1/2",
        "p=3,l=1,x=1,y=1/2",
        "p=3,l=2,x=1,y=3/4",
        "p=2,l=2,x=1/2,y=1/2",
    ];
    for mat in &two_col {
        for s in mono {
            grid.push((LemmaName::Monotonicity, mat.clone(), b(s)));
        }
        for s in proj {
            grid.push((LemmaName::Projection, mat.clone(), b(s)));
        }
    }
    grid.push((
        LemmaName::Monotonicity,
        wide.clone(),
        b("p=2,x=1,y=1/2,pp=1"),
    ));
    grid.push((LemmaName::Projection, wide.clone(), b("p=2,l=1,x=1,y=1/2")));
    for mat in two_col.iter().chain([&wide]) {
        for s in ["x=1,y=1", "x=1,y=1/2", "x=1/2,y=1", "x=1/2,y=1/2"] {
            grid.push((LemmaName::Transpose, mat.clone(), b(s)));
        }
    }
    // column partition is stated for the seed only
    for k in 0..=2 {
        for m in 0..=2 {
            for (p, x, y) in [
                (1, "1", "1/4"),
                (2, "1/2", "1/4"),
                (2, "1", "1/2"),
                (3, "1", "1/2"),
            ] {
                grid.push((
                    LemmaName::ColumnPartition,
                    BooleanMatrix::phi(),
                    b(&format!("p={p},k={k},m={m},x={x},y={y}")),
                ));
            }
        }
    }
    grid
}

pub fn lemma_suite() -> Criterion {
    timed(5, "lemma-suite", None, || {
        let grid = lemma_grid();
        let mut h = Harness::with_limits(1_000_000, 0);
        let mut failures = Vec::new();
        for (name, m, binding) in &grid {
            match h.check_named(*name, m, binding) {
                Ok(r) if r.verdict == Verdict::Pass && r.exact() => {}
                Ok(r) => failures.push(format!(
                    "{} {binding}: {}",
                    name.as_str(),
                    r.verdict.as_str()
                )),
                Err(e) => failures.push(format!("{} {binding}: {e}", name.as_str())),
            }
        }
        let ok = failures.is_empty() && grid.len() >= 50;
        (
            ok,
            if failures.is_empty() {
                format!("{} bindings pass exactly", grid.len())
            } else {
                failures.join("; ")
            },
        )
    })
}

pub fn reservoir_balance() -> Criterion {
    timed(6, "reservoir-balance", None, || {
        let alphabet = [Label::atom(1), Label::atom(2)];
        let eps = Fraction::new(1, 64);
        let s = match build_balanced_set(8, 2, &alphabet, eps) {
            Ok(s) => s,
            Err(e) => return (false, e.to_string()),
        };
        let report = verify_balance(&s);
        // independent recount over every pair of coordinates and pattern
        let total = s.len() as f64;
        let mut worst = 0f64;
        let mut patterns = 0;
        for i in 0..8 {
            for j in i + 1..8 {
                for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let hits: u64 = s
                        .entries()
                        .iter()
                        .filter(|(t, _)| t[i] == a && t[j] == b)
                        .map(|e| e.1)
                        .sum();
                    worst = worst.max((hits as f64 * 4.0 / total - 1.0).abs());
                    patterns += 1;
                }
            }
        }
        let bound = s.size_bound().expect("bounded");
        let ok = report.pass
            && report.mode == BalanceMode::Exhaustive
            && report.max_deviation <= eps
            && worst <= 1.0 / 64.0
            && patterns == 112
            && s.within_size_bound()
            && BigUint::from(s.len()) <= bound.clone() * 4u8;
        (
            ok,
            format!(
                "size {} (bound {bound}), deviation {} (recount {worst:.5}) over {patterns} patterns",
                s.len(),
                report.max_deviation
            ),
        )
    })
}

pub fn block_balancing() -> Criterion {
    timed(7, "block-balancing", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
        let xs = [
            Fraction::new(1, 8),
            Fraction::new(1, 4),
            Fraction::new(1, 2),
            Fraction::new(3, 4),
            Fraction::from_integer(1),
        ];
        let mut bad = Vec::new();
        let mut empty = 0;
        for trial in 0..1000 {
            let q = rng.gen_range(1..=8);
            let m = rng.gen_range(1..=8);
            let x = *xs.choose(&mut rng).unwrap();
            let density: f64 = rng.gen();
            let selection: Vec<Label> = (0..q * m)
                .filter(|_| rng.gen_bool(density))
                .map(|k| row_label(k / m + 1, &Label::atom((k % m) as i64 + 1)))
                .collect();
            let out = match block_balance(&selection, q, m, x) {
                Ok(o) => o,
                Err(e) => {
                    bad.push(format!("#{trial}: {e}"));
                    continue;
                }
            };
            let beta = Fraction::new(selection.len() as u64, (q * m) as u64);
            let one = Fraction::from_integer(1);
            if beta < x {
                empty += 1;
                if !out.blocks.is_empty() || !out.selection.is_empty() {
                    bad.push(format!("#{trial}: beta < x but blocks kept"));
                }
                continue;
            }
            let need = if x == one {
                q
            } else {
                (Fraction::from_integer(q as u64) * (beta - x) / (one - x))
                    .ceil()
                    .to_integer() as usize
            };
            let t = (Fraction::from_integer(m as u64) * x).ceil().to_integer() as usize;
            let in_block = |b: usize| {
                selection
                    .iter()
                    .filter(|l| l.get(0).and_then(Label::as_atom) == Some(b as i64))
                    .count()
            };
            if out.blocks.len() < need || out.blocks.iter().any(|&b| in_block(b) < t) {
                bad.push(format!("#{trial}: q={q} m={m} x={x} kept {:?}", out.blocks));
            }
            let kept: usize = out.blocks.iter().map(|&b| in_block(b)).sum();
            if kept != out.selection.len() {
                bad.push(format!("#{trial}: selection does not match kept blocks"));
            }
        }
        (
            bad.is_empty(),
            if bad.is_empty() {
                format!("1000 trials, {empty} with beta < x")
            } else {
                bad.join("; ")
            },
        )
    })
}

pub fn relaxed_to_classical_trials() -> Criterion {
    timed(8, "relaxed-to-classical", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
        let mut bad = Vec::new();
        let ys = [
            Fraction::new(1, 4),
            Fraction::new(1, 2),
            Fraction::new(3, 4),
            Fraction::from_integer(1),
        ];
        for trial in 0..100 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(2..=3);
            let bits: Vec<Vec<bool>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen()).collect())
                .collect();
            let base = BooleanMatrix::from_bits(&bits).unwrap();
            let q = rng.gen_range(2..=4);
            let t = rng.gen_range(1..=2usize).min(q);
            // small-bias reservoirs only over power-of-two alphabets, where
            // no codeword is dropped
            let s = if n == 2 && rng.gen_bool(0.5) {
                build_balanced_set(q, t, base.cols(), default_epsilon(q, t, n))
            } else {
                full_product(q, t, base.cols())
            };
            let s = match s {
                Ok(s) => s,
                Err(e) => {
                    bad.push(format!("#{trial}: reservoir {e}"));
                    continue;
                }
            };
            let relaxed = relaxed_interlace(&base, q, &s).unwrap();
            let mut blocks: Vec<usize> = (1..=q).collect();
            blocks.shuffle(&mut rng);
            blocks.truncate(t);
            blocks.sort_unstable();
            let quota = rng.gen_range(1..=m);
            let mut selection = Vec::new();
            for b in 1..=q {
                let mut idx: Vec<usize> = (0..m).collect();
                idx.shuffle(&mut rng);
                let keep = if blocks.contains(&b) {
                    rng.gen_range(quota..=m)
                } else {
                    rng.gen_range(0..=m)
                };
                selection.extend(idx[..keep].iter().map(|&r| row_label(b, &base.rows()[r])));
            }
            let eq = Equipartition::new(q, blocks.clone(), quota, selection).unwrap();
            let y = *ys.choose(&mut rng).unwrap();
            let mut order: Vec<usize> = (0..relaxed.matrix.n_cols()).collect();
            order.shuffle(&mut rng);
            let need = y * Fraction::from_integer(s.len());
            let mut weight = 0u64;
            let mut cols = Vec::new();
            for j in order {
                if Fraction::from_integer(weight) >= need {
                    break;
                }
                weight += relaxed.multiplicity[j];
                cols.push(relaxed.matrix.cols()[j].clone());
            }
            let out = match relaxed_to_classical(&base, &relaxed, &s, &eq, &cols, y) {
                Ok(o) => o,
                Err(e) => {
                    bad.push(format!("#{trial}: {e}"));
                    continue;
                }
            };
            let certified = out
                .certificate
                .verify(&base, &relaxed.matrix, &out.spec, &out.member);
            let classical = k_fold_interlace(&base, t).unwrap();
            let direct = classical.extract(out.member.rows(), out.member.cols()).ok();
            let y_prime = y / (Fraction::from_integer(1) + s.epsilon());
            let floor = (Fraction::from_integer((n as u64).pow(t as u32)) * y_prime)
                .ceil()
                .to_integer();
            if !certified
                || direct.as_ref() != Some(&out.member)
                || (out.member.n_cols() as u64) < floor
            {
                bad.push(format!(
                    "#{trial}: certificate {certified}, {} cols < {floor}?",
                    out.member.n_cols()
                ));
            }
        }
        (
            bad.is_empty(),
            if bad.is_empty() {
                "100 trials verified".into()
            } else {
                bad.join("; ")
            },
        )
    })
}

/// Preprocessed toy instance on 4 coordinates whose coordinates hold
/// 2, 1, 1 and 0 vectors.
pub fn toy_instance() -> VbpInstance {
    let v = |s: &str| s.chars().map(|c| c == '1').collect();
    VbpInstance::new(4, 4, vec![v("1000"), v("1100"), v("0010"), v("0000")])
        .and_then(VbpInstance::assume_processed)
        .expect("valid toy instance")
}

pub fn reduction_structure(log: &mut CertLog) -> Criterion {
    timed(9, "reduction-structure", None, || {
        let inst = toy_instance();
        let out = match ReductionParams::toy(4).and_then(|p| reduce(&inst, &p)) {
            Ok(o) => o,
            Err(e) => return (false, e.to_string()),
        };
        let mut notes = Vec::new();
        let mut ok = true;

        // M3 built independently as a classical 4-fold interlace of M2ᵀ
        let m3 = k_fold_interlace(&out.stage2.matrix().transpose(), 4).expect("toy M3 fits");
        let c3 = out.stage3.n_cols();
        let preserved = [1u128, 17, 32].iter().all(|&copy| {
            (0..m3.n_rows()).all(|r| {
                out.row_label(r) == m3.rows()[r]
                    && (0..m3.n_cols()).all(|c| {
                        let col = (copy - 1) * c3 + c as u128;
                        out.get(r, col) == m3.get(r, c)
                            && out.col_label(col)
                                == Label::pair(Label::atom(copy as i64), m3.cols()[c].clone())
                    })
            })
        });
        ok &= preserved
            && out.n_rows() == m3.n_rows() + inst.n()
            && out.n_cols() == 32 * m3.n_cols() as u128;
        notes.push(format!("preservation {preserved}"));

        // every (block, M1 row) pair is selected by some M2 column
        let m1 = out.stage1.matrix();
        let m2 = out.stage2.matrix();
        let complete = (0..out.params.q2).all(|b| {
            m1.rows()
                .iter()
                .all(|r| m2.cols().iter().any(|c| c.get(b) == Some(r)))
        });
        ok &= complete && out.missing_selector().is_none();
        notes.push(format!("completeness {complete}"));

        let mut solver = Solver::new();
        let mut depths = Vec::new();
        for (dim, active) in [(4usize, 0usize), (2, 1), (1, 2)] {
            let g = match out.extract_gap_submatrix(dim, dim) {
                Ok(g) => g,
                Err(e) => return (false, format!("gap at {dim}: {e}")),
            };
            let k = out.params.q1 + 1 + active;
            let same = canonicalize(&g) == canonicalize(&phi_power(k));
            let d = log.solve(&mut solver, &g, format!("gap submatrix i={active}"));
            let d_phi = log.solve(&mut solver, &phi_power(k), format!("<phi>^{k}"));
            ok &= same && d == d_phi;
            depths.push(d);
            notes.push(format!("i={active}: <phi>^{k} {same} D={d}"));
        }
        // i = 1 → 2 moves from ⟨φ⟩^4 to ⟨φ⟩^5, across a power of two
        ok &= depths[1] == depths[0] && depths[2] == depths[1] + 1;
        (ok, notes.join(", "))
    })
}

pub fn growth() -> Criterion {
    timed(
        10,
        "growth-measurement",
        Some(600),
        || match measure_growth(&[4, 8, 16]) {
            Ok(r) => {
                let exact = r.rows.iter().all(|row| {
                    row.sizes.c4 == row.c4_from_m2 && row.sizes.c4 == 32 * row.sizes.r2.pow(4)
                });
                let finite = [
                    r.size_exponent,
                    r.cells_exponent,
                    r.rows_exponent,
                    r.cols_exponent,
                    r.time_exponent,
                ]
                .iter()
                .all(|e| e.is_finite());
                let ok = exact && finite && r.size_exponent <= 8.0;
                (
                ok,
                format!(
                    "size exponent {:.2} (rows {:.2}, columns {:.2}, cells {:.2}), time exponent {:.2}, |C4| = 32|R2|^4 {exact}",
                    r.size_exponent, r.rows_exponent, r.cols_exponent, r.cells_exponent, r.time_exponent
                ),
            )
            }
            Err(e) => (false, e.to_string()),
        },
    )
}

pub fn certificates(log: &CertLog) -> Criterion {
    timed(11, "certificates", None, || {
        let bad: Vec<&str> = log
            .0
            .iter()
            .filter(|c| !(c.accepted && c.depth_matches))
            .map(|c| c.source.as_str())
            .collect();
        let ok = bad.is_empty() && !log.0.is_empty();
        (
            ok,
            if bad.is_empty() {
                format!("{} certificates verified", log.0.len())
            } else {
                bad.join(", ")
            },
        )
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<Criterion> {
    run_with(|_| {})
}

/// Runs every criterion, reporting each as soon as it finishes.
pub fn run_with(mut report: impl FnMut(&Criterion)) -> Vec<Criterion> {
    let mut log = CertLog::default();
    let mut out = Vec::new();
    let mut push = |c: Criterion| {
        report(&c);
        out.push(c);
    };
    push(solver_ground_truth(&mut log));
    push(interlace_staircase(&mut log));
    push(one_bit_gap(&mut log));
    push(hard_seed());
    push(lemma_suite());
    push(reservoir_balance());
    push(block_balancing());
    push(relaxed_to_classical_trials());
    push(reduction_structure(&mut log));
    push(growth());
    push(certificates(&log));
    out
}
