//! Text formats: DIMACS CNF with XOR lines, graph edge lists, partitions,
//! OXR constraint lists and linear equation lists.
//!
//! # DIMACS-XOR
//!
//! ```text
//! c comment
//! p cnf <n> <m>
//! 1 -2 0
//! x 1 2 -3 0
//! ```
//!
//! Clause lines are DIMACS clauses, one per line, and `m` counts them. A line
//! starting with `x` (either `x 1 -2 0` or `x1 -2 0`) states that the XOR of
//! its literals is true; the XOR lines together define the subspace `A`.
//! An inconsistent set of XOR lines still parses, giving an instance with an
//! empty subspace. A line `%` ends the input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::f2::{AffineForm, AffineSubspace, BitVec, F2Error};
use crate::formula::{CnfFormula, FormulaError, Literal, SubSatInstance};
use crate::reductions::{Graph, ReductionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: variable {var} exceeds the declared count {n}")]
    VarOutOfRange { line: usize, var: u64, n: usize },
    #[error("header declares {declared} {what} but {found} were given")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("missing header line")]
    MissingHeader,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Algebra(#[from] F2Error),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Numbered lines with comments (`c ...`) and blank lines removed. Input
/// stops at a line consisting of `%`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .take_while(|(_, l)| *l != "%")
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

/// Reads `p <kind> <a> <b>`.
fn parse_header(line: usize, text: &str, kind: &str) -> Result<(usize, usize), ParseError> {
    let toks: Vec<&str> = text.split_ascii_whitespace().collect();
    match toks.as_slice() {
        ["p", k, a, b] if *k == kind => Ok((parse_usize(a, line, "a count")?, parse_usize(b, line, "a count")?)),
        _ => Err(syntax(line, format!("expected `p {kind} <n> <m>`"))),
    }
}

/// Signed literals terminated by a single trailing `0`.
fn parse_literals<'a>(toks: impl Iterator<Item = &'a str>, line: usize, n: usize) -> Result<Vec<Literal>, ParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in toks {
        if terminated {
            return Err(syntax(line, "literal after terminating 0"));
        }
        let v: i64 = tok
            .parse()
            .map_err(|_| syntax(line, format!("expected a literal, found `{tok}`")))?;
        if v == 0 {
            terminated = true;
            continue;
        }
        if v.unsigned_abs() > n as u64 {
            return Err(ParseError::VarOutOfRange {
                line,
                var: v.unsigned_abs(),
                n,
            });
        }
        lits.push(Literal::from_dimacs(v).expect("nonzero"));
    }
    if !terminated {
        return Err(syntax(line, "missing terminating 0"));
    }
    Ok(lits)
}

/// The form that vanishes exactly when the XOR of `lits` is true.
pub fn xor_form(n: usize, lits: &[Literal]) -> AffineForm {
    let mut f = AffineForm::constant(n, true);
    for l in lits {
        f.add_assign(&l.as_form(n));
    }
    f
}

/// Parses DIMACS CNF with XOR lines.
pub fn parse_dimacs_xor(text: &str) -> Result<SubSatInstance, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    if !header.starts_with('p') {
        return Err(ParseError::MissingHeader);
    }
    let (n, m) = parse_header(hl, header, "cnf")?;
    let mut clauses = Vec::with_capacity(m);
    let mut rows = Vec::new();
    for (line, text) in lines {
        if let Some(rest) = text.strip_prefix('x') {
            let lits = parse_literals(rest.split_ascii_whitespace(), line, n)?;
            rows.push(xor_form(n, &lits));
        } else if text.starts_with('p') {
            return Err(syntax(line, "duplicate header"));
        } else {
            clauses.push(parse_literals(text.split_ascii_whitespace(), line, n)?);
        }
    }
    if clauses.len() != m {
        return Err(ParseError::CountMismatch {
            what: "clauses",
            declared: m,
            found: clauses.len(),
        });
    }
    let phi = CnfFormula::new(n, clauses)?;
    let space = AffineSubspace::from_equations(n, rows)?;
    Ok(SubSatInstance::new(phi, space)?)
}

/// Writes an instance in DIMACS-XOR form. Each defining row becomes one XOR
/// line (a row with constant 0 has its first literal negated); an empty
/// subspace is written as the unsatisfiable line `x 0`.
pub fn serialize_dimacs_xor(inst: &SubSatInstance) -> String {
    let phi = inst.phi();
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", phi.n(), phi.len()).unwrap();
    for c in phi.clauses() {
        for l in c.literals() {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    match inst.space() {
        None => out.push_str("x 0\n"),
        Some(a) => {
            for row in a.rows() {
                out.push('x');
                for (i, v) in row.support().enumerate() {
                    let negate = i == 0 && !row.constant_term();
                    write!(out, " {}", Literal::new(v, negate)).unwrap();
                }
                out.push_str(" 0\n");
            }
        }
    }
    out
}

/// `v 1 -2 3 0`.
pub fn format_witness(x: &BitVec) -> String {
    let mut out = String::from("v");
    for i in 0..x.len() {
        write!(out, " {}", Literal::new(i, !x.get(i))).unwrap();
    }
    out.push_str(" 0");
    out
}

/// Edge list: first line `V E`, then `E` lines `u v` with 0-indexed vertices.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let toks: Vec<&str> = header.split_ascii_whitespace().collect();
    let [v, e] = toks.as_slice() else {
        return Err(syntax(hl, "expected `V E`"));
    };
    let (n, m) = (
        parse_usize(v, hl, "a vertex count")?,
        parse_usize(e, hl, "an edge count")?,
    );
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        let toks: Vec<&str> = text.split_ascii_whitespace().collect();
        let [u, v] = toks.as_slice() else {
            return Err(syntax(line, "expected `u v`"));
        };
        let (u, v) = (parse_usize(u, line, "a vertex")?, parse_usize(v, line, "a vertex")?);
        if u >= n || v >= n {
            return Err(ParseError::VarOutOfRange {
                line,
                var: u.max(v) as u64,
                n,
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(ParseError::CountMismatch {
            what: "edges",
            declared: m,
            found: edges.len(),
        });
    }
    Ok(Graph::new(n, edges)?)
}

/// One part per line, vertices separated by whitespace.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>, ParseError> {
    content_lines(text)
        .map(|(line, text)| {
            text.split_ascii_whitespace()
                .map(|t| parse_usize(t, line, "a vertex"))
                .collect()
        })
        .collect()
}

/// `p oxr <n> <m>`, then `m` lines `l1 l2 l3 0` standing for `l1 ∨ (l2 ⊕ l3)`.
pub fn parse_oxr(text: &str) -> Result<(usize, Vec<[Literal; 3]>), ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let (n, m) = parse_header(hl, header, "oxr")?;
    let mut triples = Vec::with_capacity(m);
    for (line, text) in lines {
        let lits = parse_literals(text.split_ascii_whitespace(), line, n)?;
        let t: [Literal; 3] = lits
            .try_into()
            .map_err(|_| syntax(line, "an OXR constraint takes exactly 3 literals"))?;
        triples.push(t);
    }
    if triples.len() != m {
        return Err(ParseError::CountMismatch {
            what: "constraints",
            declared: m,
            found: triples.len(),
        });
    }
    Ok((n, triples))
}

/// `p lin <n> <m>`, then `m` XOR lines `l1 ... lj 0` each asserting that the
/// XOR of the literals is true. Returns the forms that vanish on the
/// satisfied equations.
pub fn parse_linear(text: &str) -> Result<(usize, Vec<AffineForm>), ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let (n, m) = parse_header(hl, header, "lin")?;
    let mut forms = Vec::with_capacity(m);
    for (line, text) in lines {
        let lits = parse_literals(text.split_ascii_whitespace(), line, n)?;
        forms.push(xor_form(n, &lits));
    }
    if forms.len() != m {
        return Err(ParseError::CountMismatch {
            what: "equations",
            declared: m,
            found: forms.len(),
        });
    }
    Ok((n, forms))
}
