//! Text formats: matrices, reservoirs, VBP instances, protocol certificates
//! and reduction provenance.

use std::fmt::Write as _;
use std::io::{self, Write};

use interlace_core::reduction::{ReductionOutput, VbpInstance};
use interlace_core::reservoir::{BalancedColumnSet, Generator};
use interlace_core::solver::{ProtocolTree, Speaker};
use interlace_core::{BooleanMatrix, Fraction, Label};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] interlace_core::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// S-expression tree: integer atoms and parenthesised lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parses every top-level expression in `s`.
pub fn parse_sexps(s: &str, line: usize) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = s.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack
                    .pop()
                    .filter(|_| !stack.is_empty())
                    .ok_or_else(|| syntax(line, "unbalanced ')'"))?;
                stack
                    .last_mut()
                    .expect("outer level")
                    .push(Sexp::List(done));
            }
            c if c.is_whitespace() => {}
            _ => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                stack
                    .last_mut()
                    .expect("open level")
                    .push(Sexp::Atom(s[i..end].to_string()));
            }
        }
    }
    if stack.len() != 1 {
        return Err(syntax(line, "unbalanced '('"));
    }
    Ok(stack.pop().expect("top level"))
}

fn to_label(e: &Sexp, line: usize) -> Result<Label> {
    match e {
        Sexp::Atom(a) => a
            .parse::<i64>()
            .map(Label::atom)
            .map_err(|_| syntax(line, format!("label atom {a:?} is not an integer"))),
        Sexp::List(items) => Ok(Label::tuple(
            items
                .iter()
                .map(|x| to_label(x, line))
                .collect::<Result<Vec<_>>>()?,
        )),
    }
}

pub fn parse_labels(s: &str, line: usize) -> Result<Vec<Label>> {
    parse_sexps(s, line)?
        .iter()
        .map(|e| to_label(e, line))
        .collect()
}

pub fn parse_label(s: &str) -> Result<Label> {
    match parse_labels(s, 1)?.as_slice() {
        [l] => Ok(l.clone()),
        _ => Err(syntax(1, format!("expected one label, got {s:?}"))),
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

fn next_line<'a>(
    it: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
) -> Result<(usize, &'a str)> {
    it.next()
        .ok_or_else(|| syntax(0, format!("unexpected end of input, expected {what}")))
}

fn parse_bits(s: &str, n: usize, line: usize) -> Result<Vec<bool>> {
    if s.len() != n {
        return Err(syntax(line, format!("expected {n} bits, got {}", s.len())));
    }
    s.bytes()
        .map(|b| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(syntax(
                line,
                format!("unexpected character {:?}", b as char),
            )),
        })
        .collect()
}

fn parse_usize(s: Option<&str>, line: usize, what: &str) -> Result<usize> {
    s.and_then(|x| x.parse().ok())
        .ok_or_else(|| syntax(line, format!("expected {what}")))
}

pub fn read_matrix(text: &str) -> Result<BooleanMatrix> {
    let mut it = lines(text);
    let (ln, head) = next_line(&mut it, "dimensions")?;
    let mut w = head.split_whitespace();
    let m = parse_usize(w.next(), ln, "row count")?;
    let n = parse_usize(w.next(), ln, "column count")?;
    if w.next().is_some() {
        return Err(syntax(ln, "expected `m n`"));
    }
    let mut labelled = |tag: &str, count: usize| -> Result<Vec<Label>> {
        let (ln, l) = next_line(&mut it, tag)?;
        let rest = l
            .strip_prefix(tag)
            .filter(|r| r.is_empty() || r.starts_with(' '))
            .ok_or_else(|| syntax(ln, format!("expected `{tag} <labels>`")))?;
        let labels = parse_labels(rest, ln)?;
        if labels.len() != count {
            return Err(syntax(
                ln,
                format!("expected {count} labels, got {}", labels.len()),
            ));
        }
        Ok(labels)
    };
    let rows = labelled("R", m)?;
    let cols = labelled("C", n)?;
    let mut bits = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = next_line(&mut it, "matrix row")?;
        bits.push(parse_bits(l, n, ln)?);
    }
    if let Some((ln, extra)) = it.find(|(_, l)| !l.trim().is_empty()) {
        return Err(syntax(ln, format!("trailing content {extra:?}")));
    }
    Ok(BooleanMatrix::from_rows(rows, cols, &bits)?)
}

/// Streams a matrix given by accessors, so implicit matrices need not be
/// stored.
pub fn write_matrix_with<W: Write>(
    w: &mut W,
    n_rows: usize,
    n_cols: usize,
    row_label: impl Fn(usize) -> Label,
    col_label: impl Fn(usize) -> Label,
    get: impl Fn(usize, usize) -> bool,
) -> io::Result<()> {
    writeln!(w, "{n_rows} {n_cols}")?;
    w.write_all(b"R")?;
    for i in 0..n_rows {
        write!(w, " {}", row_label(i))?;
    }
    w.write_all(b"\nC")?;
    for j in 0..n_cols {
        write!(w, " {}", col_label(j))?;
    }
    w.write_all(b"\n")?;
    let mut line = Vec::with_capacity(n_cols + 1);
    for i in 0..n_rows {
        line.clear();
        line.extend((0..n_cols).map(|j| if get(i, j) { b'1' } else { b'0' }));
        line.push(b'\n');
        w.write_all(&line)?;
    }
    Ok(())
}

pub fn write_matrix<W: Write>(w: &mut W, m: &BooleanMatrix) -> io::Result<()> {
    write_matrix_with(
        w,
        m.n_rows(),
        m.n_cols(),
        |i| m.rows()[i].clone(),
        |j| m.cols()[j].clone(),
        |i, j| m.get(i, j),
    )
}

pub fn matrix_to_string(m: &BooleanMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(&mut buf, m).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

pub fn write_reservoir<W: Write>(w: &mut W, s: &BalancedColumnSet) -> io::Result<()> {
    let eps = s.epsilon();
    writeln!(
        w,
        "{} {} {} {}/{} {}",
        s.q(),
        s.t(),
        s.p(),
        eps.numer(),
        eps.denom(),
        s.len()
    )?;
    match s.generator() {
        Generator::Aghp {
            degree,
            modulus,
            samples,
        } => writeln!(
            w,
            "aghp degree={degree} modulus={modulus:#x} samples={samples}"
        )?,
        Generator::FullProduct { samples } => writeln!(w, "full-product samples={samples}")?,
    }
    let mut line = String::new();
    for tuple in s.iter_multiset() {
        line.clear();
        for (i, c) in tuple.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            write!(line, "{c}").expect("string");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

fn parse_fraction(s: &str, line: usize) -> Result<Fraction> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| syntax(line, "expected num/den"))?;
    let (a, b): (u64, u64) = (
        a.parse().map_err(|_| syntax(line, "bad numerator"))?,
        b.parse().map_err(|_| syntax(line, "bad denominator"))?,
    );
    if b == 0 {
        return Err(syntax(line, "zero denominator"));
    }
    Ok(Fraction::new(a, b))
}

fn meta_value<'a>(fields: &[&'a str], key: &str, line: usize) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| syntax(line, format!("generator line lacks {key}=")))
}

/// Reads a reservoir over the alphabet `1..=p` (atom labels).
pub fn read_reservoir(text: &str) -> Result<BalancedColumnSet> {
    let mut it = lines(text);
    let (ln, head) = next_line(&mut it, "reservoir header")?;
    let f: Vec<&str> = head.split_whitespace().collect();
    if f.len() != 5 {
        return Err(syntax(ln, "expected `q t p num/den samples`"));
    }
    let q = parse_usize(Some(f[0]), ln, "q")?;
    let t = parse_usize(Some(f[1]), ln, "t")?;
    let p = parse_usize(Some(f[2]), ln, "p")?;
    let eps = parse_fraction(f[3], ln)?;
    let total = parse_usize(Some(f[4]), ln, "sample count")?;
    let (ln, meta) = next_line(&mut it, "generator line")?;
    let m: Vec<&str> = meta.split_whitespace().collect();
    let num = |s: &str| -> Result<u64> {
        let parsed = match s.strip_prefix("0x") {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => s.parse(),
        };
        parsed.map_err(|_| syntax(ln, format!("bad number {s:?}")))
    };
    let generator = match m.first() {
        Some(&"aghp") => Generator::Aghp {
            degree: num(meta_value(&m, "degree", ln)?)? as u32,
            modulus: num(meta_value(&m, "modulus", ln)?)?,
            samples: num(meta_value(&m, "samples", ln)?)?,
        },
        Some(&"full-product") => Generator::FullProduct {
            samples: num(meta_value(&m, "samples", ln)?)?,
        },
        _ => return Err(syntax(ln, "unknown generator")),
    };
    let mut tuples = Vec::with_capacity(total);
    for (ln, l) in it.filter(|(_, l)| !l.trim().is_empty()) {
        let tuple = l
            .split_whitespace()
            .map(|x| {
                x.parse::<u32>()
                    .map_err(|_| syntax(ln, format!("bad index {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        tuples.push(tuple);
    }
    if tuples.len() != total {
        return Err(syntax(
            0,
            format!("header announces {total} tuples, found {}", tuples.len()),
        ));
    }
    let alphabet = (1..=p as i64).map(Label::atom).collect();
    Ok(BalancedColumnSet::from_tuples(
        q, t, alphabet, eps, generator, tuples,
    )?)
}

pub fn read_vbp(text: &str) -> Result<VbpInstance> {
    let mut it = lines(text);
    let (ln, head) = next_line(&mut it, "`n d m`")?;
    let mut w = head.split_whitespace();
    let n = parse_usize(w.next(), ln, "vector count")?;
    let d = parse_usize(w.next(), ln, "dimension")?;
    let m = parse_usize(w.next(), ln, "bin count")?;
    let mut vectors = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next_line(&mut it, "vector")?;
        vectors.push(parse_bits(l.trim(), d, ln)?);
    }
    Ok(VbpInstance::new(d, m, vectors)?)
}

pub fn write_vbp<W: Write>(w: &mut W, inst: &VbpInstance) -> io::Result<()> {
    writeln!(w, "{} {} {}", inst.n(), inst.d(), inst.m())?;
    for v in inst.vectors() {
        let s: String = v.iter().map(|&b| if b { '1' } else { '0' }).collect();
        writeln!(w, "{s}")?;
    }
    Ok(())
}

/// `(leaf 0|1)` or `(node row|col (left labels) (right labels) L R)`.
pub fn certificate_to_string(t: &ProtocolTree) -> String {
    fn go(t: &ProtocolTree, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match t {
            ProtocolTree::Leaf { value } => {
                let _ = writeln!(out, "{pad}(leaf {})", u8::from(*value));
            }
            ProtocolTree::Node {
                speaker,
                left_part,
                right_part,
                left,
                right,
            } => {
                let who = match speaker {
                    Speaker::Row => "row",
                    Speaker::Col => "col",
                };
                let join =
                    |v: &[Label]| v.iter().map(Label::to_string).collect::<Vec<_>>().join(" ");
                let _ = writeln!(
                    out,
                    "{pad}(node {who} ({}) ({})",
                    join(left_part),
                    join(right_part)
                );
                go(left, depth + 1, out);
                go(right, depth + 1, out);
                let _ = writeln!(out, "{pad})");
            }
        }
    }
    let mut out = String::new();
    go(t, 0, &mut out);
    out
}

pub fn parse_certificate(text: &str) -> Result<ProtocolTree> {
    fn labels(e: &Sexp) -> Result<Vec<Label>> {
        match e {
            Sexp::List(items) => items.iter().map(|x| to_label(x, 0)).collect(),
            Sexp::Atom(_) => Err(syntax(0, "expected a label list")),
        }
    }
    fn go(e: &Sexp) -> Result<ProtocolTree> {
        let Sexp::List(items) = e else {
            return Err(syntax(0, "expected (leaf ..) or (node ..)"));
        };
        let head = |i: usize| match items.get(i) {
            Some(Sexp::Atom(a)) => Some(a.as_str()),
            _ => None,
        };
        match (head(0), items.len()) {
            (Some("leaf"), 2) => match head(1) {
                Some("0") => Ok(ProtocolTree::Leaf { value: false }),
                Some("1") => Ok(ProtocolTree::Leaf { value: true }),
                _ => Err(syntax(0, "leaf value must be 0 or 1")),
            },
            (Some("node"), 6) => {
                let speaker = match head(1) {
                    Some("row") => Speaker::Row,
                    Some("col") => Speaker::Col,
                    _ => return Err(syntax(0, "speaker must be row or col")),
                };
                Ok(ProtocolTree::Node {
                    speaker,
                    left_part: labels(&items[2])?,
                    right_part: labels(&items[3])?,
                    left: Box::new(go(&items[4])?),
                    right: Box::new(go(&items[5])?),
                })
            }
            _ => Err(syntax(0, "malformed certificate node")),
        }
    }
    match parse_sexps(text, 0)?.as_slice() {
        [one] => go(one),
        _ => Err(syntax(0, "expected exactly one tree")),
    }
}

/// Tab-separated origin of every M4 row and column:
/// `row <i> <label> stage3 <k>` / `row <i> <label> vector <v>` and
/// `col <j> <label> <copy> <s1> <s2> <s3> <s4>` (all indices 1-based).
pub fn write_provenance<W: Write>(w: &mut W, out: &ReductionOutput) -> io::Result<()> {
    writeln!(w, "kind\tindex\tlabel\torigin")?;
    for r in 0..out.n_rows() {
        writeln!(
            w,
            "row\t{}\t{}\t{}",
            r + 1,
            out.row_label(r),
            out.row_origin(r)
        )?;
    }
    for c in 0..out.n_cols() {
        writeln!(
            w,
            "col\t{}\t{}\t{}",
            c + 1,
            out.col_label(c),
            out.col_origin(c)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use interlace_core::interlace::k_fold_interlace;
    use interlace_core::reservoir::full_product;
    use interlace_core::solver::solve_exact;

    #[test]
    fn matrix_round_trip() {
        let m = k_fold_interlace(&BooleanMatrix::phi(), 2).unwrap();
        let text = matrix_to_string(&m);
        assert!(text.starts_with("2 4\nR (1 (1 1)) (2 (1 1))\nC (1 1) (1 2)"));
        assert_eq!(read_matrix(&text).unwrap(), m);
    }

    #[test]
    fn phi_file() {
        let m = read_matrix("1 2\nR (1 1)\nC 1 2\n10\n").unwrap();
        assert_eq!(m, BooleanMatrix::phi());
    }

    #[test]
    fn matrix_errors_name_the_line() {
        let e = read_matrix("1 2\nR (1 1)\nC 1 2\n1x\n").unwrap_err();
        assert!(e.to_string().starts_with("line 4"), "{e}");
        assert!(read_matrix("1 2\nR (1 1\nC 1 2\n10\n").is_err());
        assert!(read_matrix("2 2\nR 1 2\nC 1 2\n10\n").is_err());
    }

    #[test]
    fn reservoir_round_trip() {
        let alphabet: Vec<Label> = (1..=3).map(Label::atom).collect();
        let s = full_product(3, 2, &alphabet).unwrap();
        let mut buf = Vec::new();
        write_reservoir(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("3 2 3 0/1 27\nfull-product samples=27\n0 0 0\n"));
        let back = read_reservoir(&text).unwrap();
        assert_eq!(back.entries(), s.entries());
    }

    #[test]
    fn vbp_round_trip() {
        let inst = read_vbp("2 3 4\n101\n010\n").unwrap();
        assert_eq!(inst.vectors()[0], [true, false, true]);
        let mut buf = Vec::new();
        write_vbp(&mut buf, &inst).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 3 4\n101\n010\n");
    }

    #[test]
    fn certificate_round_trip() {
        let m = k_fold_interlace(&BooleanMatrix::phi(), 3).unwrap();
        let sol = solve_exact(&m).unwrap();
        let text = certificate_to_string(&sol.certificate);
        assert_eq!(parse_certificate(&text).unwrap(), sol.certificate);
    }
}
