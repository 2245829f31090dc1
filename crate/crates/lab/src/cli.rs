//! Command line. Machine-readable lines start with an upper-case tag;
//! everything else is for people.
//!
//! Exit codes: 0 success, 1 negative answer (decide false, lemma fails,
//! selftest fails), 2 usage or input error, 3 budget exceeded.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use interlace_core::bracket::{family_complexity_with, BracketSpec, DEFAULT_ENUMERATION_CAP};
use interlace_core::canonical::canonicalize;
use interlace_core::density::Density;
use interlace_core::harness::{parse_fraction, Binding, Harness, LemmaName, Verdict};
use interlace_core::interlace::{k_fold_interlace, DEFAULT_CELL_BUDGET};
use interlace_core::reduction::{
    default_params, preprocess, reduce, Preprocessed, ReductionParams,
};
use interlace_core::reservoir::{
    build_balanced_set_with, default_epsilon, full_product, verify_balance_with, BalanceMode,
    DEFAULT_VERIFY_BUDGET,
};
use interlace_core::small_bias::DEFAULT_MAX_SAMPLES;
use interlace_core::solver::{Solver, DEFAULT_NODE_CAP};
use interlace_core::{BooleanMatrix, Error, Fraction, Label};

use crate::acceptance;
use crate::formats::{self, FormatError};
use crate::growth::measure_growth;

#[derive(Parser, Debug)]
#[command(
    name = "interlace-lab",
    version,
    about = "Interlace constructions, exact communication complexity and the bin-packing reduction"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Budgets {
    /// Largest matrix (rows × columns) that may be materialized.
    #[arg(long, env = "INTERLACE_CELL_BUDGET", default_value_t = DEFAULT_CELL_BUDGET, value_parser = positive_u128)]
    cell_budget: u128,
    /// Solver search-node cap.
    #[arg(long, env = "INTERLACE_NODE_CAP", default_value_t = DEFAULT_NODE_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    node_cap: u64,
    /// Largest family enumerated exactly.
    #[arg(long, env = "INTERLACE_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
}

fn positive_u128(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn fraction(s: &str) -> Result<Fraction, String> {
    parse_fraction(s).ok_or_else(|| format!("not a fraction: {s}"))
}

fn binding(s: &str) -> Result<Binding, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a (q,t)-balanced column reservoir.
    BalancedSet {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: usize,
        /// Target accuracy; defaults to min(2^-(t⌈log p⌉+2), 1/q²).
        #[arg(long, value_parser = fraction)]
        epsilon: Option<Fraction>,
        /// Use the complete product instead of the small-bias construction.
        #[arg(long)]
        full_product: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_SAMPLES)]
        max_samples: u64,
        /// Seed for sampled balance verification.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complexity of a bracket family.
    Family {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, value_parser = fraction)]
        x: Fraction,
        #[arg(long, value_parser = fraction)]
        y: Fraction,
        /// Members drawn when the family is above the cap (0: refuse).
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a member attaining the value.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Exact communication complexity, or a decision at a budget.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        budget: Option<u32>,
        /// Write the protocol tree.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Check a named inequality, `robustness` or `double_interlace`.
    VerifyLemma {
        #[arg(long)]
        name: String,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_parser = binding, default_value = "")]
        params: Binding,
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Build the reduction for a bin-packing instance.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        /// Small exact parameters with complete reservoirs.
        #[arg(long)]
        toy: bool,
        #[arg(long, value_parser = binding, default_value = "")]
        params: Binding,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Extract and classify the gap submatrix at one block (toy parameters).
    GapDemo {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        block: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = binding, default_value = "")]
        params: Binding,
        #[command(flatten)]
        budgets: Budgets,
    },
    /// Stage sizes and build times over a sweep of dimensions.
    MeasureGrowth {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        d: Vec<usize>,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err
        .downcast_ref::<Error>()
        .or_else(|| match err.downcast_ref::<FormatError>() {
            Some(FormatError::Core(e)) => Some(e),
            _ => None,
        });
    match core {
        Some(
            Error::BudgetExceeded { .. }
            | Error::SizeOverflow { .. }
            | Error::FamilyTooLarge { .. }
            | Error::DegreeOverflow { .. }
            | Error::GuardExceeded { .. },
        ) => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_matrix(path: &Path) -> anyhow::Result<BooleanMatrix> {
    formats::read_matrix(&read(path)?).with_context(|| format!("in matrix file {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<fs::File>> {
    let f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// `k` when `m` is `⟨φ⟩^k` up to permutation and duplication.
pub fn phi_class(m: &BooleanMatrix) -> Option<usize> {
    let c = canonicalize(m);
    let k = c.distinct_rows().max(c.distinct_cols().ilog2() as usize);
    (1..=12)
        .contains(&k)
        .then(|| k_fold_interlace(&BooleanMatrix::phi(), k).ok())
        .flatten()
        .filter(|p| canonicalize(p) == c)
        .map(|_| k)
}

/// Runs the command line and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code() as u8;
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    ExitCode::from(main_with(std::env::args_os(), &mut lock))
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<u8> {
    match cli.command {
        Command::BalancedSet {
            q,
            t,
            p,
            epsilon,
            full_product: full,
            max_samples,
            seed,
            out: path,
        } => {
            let alphabet: Vec<Label> = (1..=p as i64).map(Label::atom).collect();
            let s = if full {
                full_product(q, t, &alphabet)?
            } else {
                let eps = epsilon.unwrap_or_else(|| default_epsilon(q, t, p));
                build_balanced_set_with(q, t, &alphabet, eps, max_samples)?
            };
            let report = verify_balance_with(&s, DEFAULT_VERIFY_BUDGET, seed);
            let mode = match report.mode {
                BalanceMode::Exhaustive => "exhaustive".to_string(),
                BalanceMode::Sampled { index_sets } => format!("sampled({index_sets})"),
            };
            writeln!(
                out,
                "reservoir over {p} symbols, generator {:?}",
                s.generator()
            )?;
            for w in &report.per_size {
                writeln!(
                    out,
                    "  |J|={} worst deviation {} at {:?} pattern {:?}",
                    w.size, w.deviation, w.index_set, w.pattern
                )?;
            }
            writeln!(
                out,
                "RESERVOIR {q} {t} {p} {} {} {} {} {mode} {}",
                s.epsilon(),
                s.len(),
                s.entries().len(),
                report.max_deviation,
                if report.pass { "pass" } else { "fail" }
            )?;
            if let Some(path) = path {
                let mut w = create(&path)?;
                formats::write_reservoir(&mut w, &s)?;
                w.flush()?;
            }
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Family {
            matrix,
            p,
            x,
            y,
            samples,
            seed,
            witness,
            budgets,
        } => {
            let m = load_matrix(&matrix)?;
            let spec = BracketSpec::new(m, p, Density::rational(x)?, Density::rational(y)?)?;
            let mut solver = Solver::with_node_cap(budgets.node_cap);
            let r = family_complexity_with(&spec, budgets.cap, samples, seed, &mut solver)?;
            writeln!(
                out,
                "family of {} members, row quota {}, column quota {}",
                spec.member_count(),
                spec.row_quota(),
                spec.col_quota()
            )?;
            writeln!(
                out,
                "FAMILY {} {} {}",
                r.value,
                if r.exact { "exact" } else { "sampled" },
                r.members_examined
            )?;
            if let Some(path) = witness {
                let mut w = create(&path)?;
                formats::write_matrix(&mut w, &r.witness)?;
                w.flush()?;
            }
            Ok(0)
        }
        Command::Solve {
            matrix,
            budget,
            cert,
            budgets,
        } => {
            let m = load_matrix(&matrix)?;
            let mut solver = Solver::with_node_cap(budgets.node_cap);
            if let Some(b) = budget {
                let yes = solver.decide(&m, b)?;
                writeln!(out, "DECIDE {b} {yes}")?;
                if yes {
                    if let Some(path) = cert {
                        let sol = solver.solve(&m)?;
                        fs::write(&path, formats::certificate_to_string(&sol.certificate))
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                }
                return Ok(if yes { 0 } else { 1 });
            }
            let sol = solver.solve(&m)?;
            writeln!(
                out,
                "{}x{} matrix, {} search nodes, {} memo hits, {} rank prunes",
                m.n_rows(),
                m.n_cols(),
                sol.stats.nodes,
                sol.stats.memo_hits,
                sol.stats.rank_prunes
            )?;
            writeln!(out, "D {}", sol.depth)?;
            if let Some(path) = cert {
                fs::write(&path, formats::certificate_to_string(&sol.certificate))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(0)
        }
        Command::VerifyLemma {
            name,
            matrix,
            params,
            samples,
            budgets,
        } => {
            let m = load_matrix(&matrix)?;
            let mut h = Harness::with_limits(budgets.cap, samples);
            let r = match name.as_str() {
                "robustness" | "double_interlace" => {
                    let delta = params
                        .get("delta")
                        .ok_or_else(|| anyhow!("missing parameter delta"))?;
                    let b = params
                        .get("b")
                        .ok_or_else(|| anyhow!("missing parameter b"))?;
                    if !b.is_integer() {
                        return Err(anyhow!("b must be an integer"));
                    }
                    let b = b.to_integer() as u32;
                    if name == "robustness" {
                        h.check_robustness(&m, delta, b)?
                    } else {
                        h.check_double_interlace(&m, delta, b)?
                    }
                }
                other => h.check_named(other.parse::<LemmaName>()?, &m, &params)?,
            };
            writeln!(out, "{r}")?;
            writeln!(out, "{}", r.machine_line())?;
            Ok(if r.verdict == Verdict::Fail { 1 } else { 0 })
        }
        Command::Reduce {
            instance,
            toy,
            params,
            out: path,
            provenance,
            budgets,
        } => {
            let raw = formats::read_vbp(&read(&instance)?)
                .with_context(|| format!("in instance file {}", instance.display()))?;
            let inst = match preprocess(&raw)? {
                Preprocessed::ImmediateNo { coordinate } => {
                    writeln!(out, "coordinate {coordinate} is 1 in more than 4 vectors")?;
                    writeln!(out, "IMMEDIATE_NO coord={coordinate}")?;
                    return Ok(0);
                }
                Preprocessed::Ready(i) => i,
            };
            let mut p = if toy {
                ReductionParams::toy(inst.d())?
            } else {
                default_params(inst.d())?
            };
            p.apply(&params)?;
            let r = reduce(&inst, &p)?;
            let s = r.sizes();
            writeln!(
                out,
                "preprocessed: n={} d={}; q1={} t1={} q2={} t2={}",
                inst.n(),
                inst.d(),
                p.q1,
                p.t1,
                p.q2,
                p.t2
            )?;
            writeln!(
                out,
                "M1 {}x{}, M2 {}x{} ({} distinct columns), M3 {}x{}",
                s.r1, s.c1, s.r2, s.c2, s.c2_distinct, s.r3, s.c3
            )?;
            writeln!(out, "REDUCE {} {}", r.n_rows(), r.n_cols())?;
            if path.is_some() || provenance.is_some() {
                let cells = (r.n_rows() as u128).saturating_mul(r.n_cols());
                if cells > budgets.cell_budget {
                    return Err(Error::SizeOverflow {
                        cells,
                        budget: budgets.cell_budget,
                    }
                    .into());
                }
            }
            if let Some(path) = path {
                let mut w = create(&path)?;
                formats::write_matrix_with(
                    &mut w,
                    r.n_rows(),
                    r.n_cols() as usize,
                    |i| r.row_label(i),
                    |j| r.col_label(j as u128),
                    |i, j| r.get(i, j as u128),
                )?;
                w.flush()?;
            }
            if let Some(path) = provenance {
                let mut w = create(&path)?;
                formats::write_provenance(&mut w, &r)?;
                w.flush()?;
            }
            Ok(0)
        }
        Command::GapDemo {
            instance,
            block,
            dim,
            params,
            budgets,
        } => {
            let raw = formats::read_vbp(&read(&instance)?)
                .with_context(|| format!("in instance file {}", instance.display()))?;
            let inst = match preprocess(&raw)? {
                Preprocessed::ImmediateNo { coordinate } => {
                    writeln!(out, "IMMEDIATE_NO coord={coordinate}")?;
                    return Ok(0);
                }
                Preprocessed::Ready(i) => i,
            };
            let mut p = ReductionParams::toy(inst.d())?;
            p.apply(&params)?;
            let r = reduce(&inst, &p)?;
            let g = r.extract_gap_submatrix(block, dim)?;
            let active = r.active_at(dim - 1).len();
            let mut solver = Solver::with_node_cap(budgets.node_cap);
            let d = solver.value(&g)?;
            writeln!(
                out,
                "gap submatrix {}x{} ({} distinct rows)",
                g.n_rows(),
                g.n_cols(),
                g.dedup().n_rows()
            )?;
            writeln!(
                out,
                "GAP {block} {dim} active={active} expected=phi^{}",
                p.q1 + 1 + active
            )?;
            match phi_class(&g) {
                Some(k) => writeln!(out, "CLASS phi^{k}")?,
                None => writeln!(out, "CLASS other")?,
            }
            writeln!(out, "D {d}")?;
            Ok(0)
        }
        Command::MeasureGrowth { d } => {
            let r = measure_growth(&d)?;
            for row in &r.rows {
                writeln!(
                    out,
                    "d={} built in {:.3}s: |R2|={} |C2|={} ({} distinct) |R4|={} |C4|={}",
                    row.d,
                    row.build_time.as_secs_f64(),
                    row.sizes.r2,
                    row.sizes.c2,
                    row.sizes.c2_distinct,
                    row.sizes.r4,
                    row.sizes.c4
                )?;
                writeln!(
                    out,
                    "GROWTH {} {} {} {}",
                    row.d, row.n, row.sizes.r4, row.sizes.c4
                )?;
            }
            writeln!(out, "time exponent {:.2}", r.time_exponent)?;
            writeln!(out, "cells exponent {:.2}", r.cells_exponent)?;
            writeln!(
                out,
                "FIT {:.3} {:.3} {:.3}",
                r.size_exponent, r.rows_exponent, r.cols_exponent
            )?;
            Ok(0)
        }
        Command::Selftest => {
            let results = acceptance::run_with(|c| {
                let _ = writeln!(out, "{}", c.report());
                let _ = out.flush();
            });
            let failed = results.iter().filter(|c| !c.pass).count();
            writeln!(
                out,
                "{} of {} criteria pass",
                results.len() - failed,
                results.len()
            )?;
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}
