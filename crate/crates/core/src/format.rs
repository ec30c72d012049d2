//! The `qc-text v1`, `mat-text v1` and `vec-text v1` file formats.
//!
//! All floats are printed with 17 significant digits (`{:.16e}`), so any
//! `f64` survives a write/parse round trip exactly, and re-serializing a
//! parsed file reproduces it token for token. `#` starts a comment.
//!
//! `qc-text` gate lines, one gate per line, whitespace-separated tokens;
//! `[c]` is an optional list of condition tokens, `+q` for a one-condition
//! and `-q` for a zero-condition:
//!
//! ```text
//! U <target> [c] <re> <im> <re> <im> <re> <im> <re> <im>   # row-major 2x2
//! X <t> [c]      Z <t> [c]      H <t> [c]
//! PHASE <t> <theta> [c]         ROT <t> <theta> [c]
//! BITREV
//! ROTWIRES left|right [c]
//! SWAPQ <i> <j> [c]
//! TCOMP <lo>..<hi> [c]
//! ```

use thiserror::Error;

use crate::ir::{
    Circuit, Complex, ConditionSet, Direction, Gate, GateKind, PermSpec, SingleOp, Unitary2,
};
use crate::simulate::StateVector;
use crate::transforms::DenseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gate has no qc-text form: {0}")]
    Unrepresentable(String),
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// 17 significant digits; normalizes -0.0 so output is byte-stable.
fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn conds_tokens(conds: &ConditionSet) -> String {
    let mut s = String::new();
    for q in conds.ones() {
        s.push_str(&format!(" +{q}"));
    }
    for q in conds.zeros() {
        s.push_str(&format!(" -{q}"));
    }
    s
}

// ---------------------------------------------------------------------------
// qc-text

pub fn write_circuit(circuit: &Circuit) -> Result<String, FormatError> {
    let mut out = String::from("qc-text v1\n");
    out.push_str(&format!("qubits {}\n", circuit.data_qubits()));
    out.push_str(&format!("ancillas {}\n", circuit.ancilla_qubits()));
    for gate in circuit.gates() {
        let c = conds_tokens(&gate.conds);
        let line = match &gate.kind {
            GateKind::Single { target, op } => match op {
                SingleOp::X => format!("X {target}{c}"),
                SingleOp::Z => format!("Z {target}{c}"),
                SingleOp::H => format!("H {target}{c}"),
                SingleOp::Phase(theta) => format!("PHASE {target} {}{c}", fmt_f(*theta)),
                SingleOp::Rot(theta) => format!("ROT {target} {}{c}", fmt_f(*theta)),
                SingleOp::Unitary(u) => {
                    let mut line = format!("U {target}{c}");
                    for r in 0..2 {
                        for col in 0..2 {
                            let e = u.entry(r, col);
                            line.push_str(&format!(" {} {}", fmt_f(e.re), fmt_f(e.im)));
                        }
                    }
                    line
                }
            },
            GateKind::Perm(PermSpec::BitReversal) => "BITREV".to_string(),
            GateKind::Perm(PermSpec::RotateWires(Direction::Left)) => format!("ROTWIRES left{c}"),
            GateKind::Perm(PermSpec::RotateWires(Direction::Right)) => {
                format!("ROTWIRES right{c}")
            }
            GateKind::Perm(PermSpec::WireSwap(i, j)) => format!("SWAPQ {i} {j}{c}"),
            GateKind::Perm(PermSpec::Transposition(..)) => {
                return Err(FormatError::Unrepresentable(gate.to_string()));
            }
            GateKind::TwosComplement { lo, hi } => format!("TCOMP {lo}..{hi}{c}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Lines with content, comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, FormatError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("invalid float `{tok}`")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite float `{tok}`")));
    }
    Ok(v)
}

fn is_cond_token(tok: &str) -> bool {
    (tok.starts_with('+') || tok.starts_with('-'))
        && tok.len() > 1
        && tok[1..].bytes().all(|b| b.is_ascii_digit())
}

fn parse_conds(tokens: &[&str], line: usize) -> Result<ConditionSet, FormatError> {
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for tok in tokens {
        if !is_cond_token(tok) {
            return Err(err(line, format!("invalid condition token `{tok}`")));
        }
        let q = parse_usize(&tok[1..], line, "condition qubit")?;
        if tok.starts_with('+') {
            ones.push(q);
        } else {
            zeros.push(q);
        }
    }
    ConditionSet::new(ones, zeros).map_err(|e| err(line, e.to_string()))
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    want: &str,
) -> Result<(), FormatError> {
    match lines.next() {
        Some((_, line)) if line == want => Ok(()),
        Some((n, line)) => Err(err(n, format!("expected `{want}`, found `{line}`"))),
        None => Err(err(1, format!("missing `{want}` header"))),
    }
}

fn expect_keyword_value<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
) -> Result<usize, FormatError> {
    match lines.next() {
        Some((n, line)) => {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 || toks[0] != keyword {
                return Err(err(
                    n,
                    format!("expected `{keyword} <count>`, found `{line}`"),
                ));
            }
            parse_usize(toks[1], n, keyword)
        }
        None => Err(err(1, format!("missing `{keyword}` line"))),
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "qc-text v1")?;
    let qubits = expect_keyword_value(&mut lines, "qubits")?;
    let ancillas = expect_keyword_value(&mut lines, "ancillas")?;
    let mut circuit =
        Circuit::with_ancillas(qubits, ancillas, "").map_err(|e| err(2, e.to_string()))?;

    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let gate = match toks[0] {
            "X" | "Z" | "H" => {
                if toks.len() < 2 {
                    return Err(err(n, "missing target qubit"));
                }
                let target = parse_usize(toks[1], n, "target")?;
                let op = match toks[0] {
                    "X" => SingleOp::X,
                    "Z" => SingleOp::Z,
                    _ => SingleOp::H,
                };
                Gate::controlled(target, op, parse_conds(&toks[2..], n)?)
            }
            "PHASE" | "ROT" => {
                if toks.len() < 3 {
                    return Err(err(n, "expected `<target> <theta>`"));
                }
                let target = parse_usize(toks[1], n, "target")?;
                let theta = parse_f64(toks[2], n)?;
                let op = if toks[0] == "PHASE" {
                    SingleOp::Phase(theta)
                } else {
                    SingleOp::Rot(theta)
                };
                Gate::controlled(target, op, parse_conds(&toks[3..], n)?)
            }
            "U" => {
                // The eight matrix floats are positional (the line's last
                // eight tokens); anything between the target and them is a
                // condition token.
                if toks.len() < 10 {
                    return Err(err(n, "U line needs a target and 8 matrix floats"));
                }
                let target = parse_usize(toks[1], n, "target")?;
                let conds = parse_conds(&toks[2..toks.len() - 8], n)?;
                let mut vals = [0.0f64; 8];
                for (v, tok) in vals.iter_mut().zip(&toks[toks.len() - 8..]) {
                    *v = parse_f64(tok, n)?;
                }
                let e = [
                    [
                        Complex::new(vals[0], vals[1]),
                        Complex::new(vals[2], vals[3]),
                    ],
                    [
                        Complex::new(vals[4], vals[5]),
                        Complex::new(vals[6], vals[7]),
                    ],
                ];
                let u = Unitary2::new(e).map_err(|e| err(n, e.to_string()))?;
                Gate::controlled(target, SingleOp::Unitary(u), conds)
            }
            "BITREV" => {
                if toks.len() != 1 {
                    return Err(err(n, "BITREV takes no arguments"));
                }
                Gate::perm(PermSpec::BitReversal)
            }
            "ROTWIRES" => {
                if toks.len() < 2 {
                    return Err(err(n, "expected `ROTWIRES left|right`"));
                }
                let dir = match toks[1] {
                    "left" => Direction::Left,
                    "right" => Direction::Right,
                    other => return Err(err(n, format!("invalid direction `{other}`"))),
                };
                Gate {
                    kind: GateKind::Perm(PermSpec::RotateWires(dir)),
                    conds: parse_conds(&toks[2..], n)?,
                }
            }
            "SWAPQ" => {
                if toks.len() < 3 {
                    return Err(err(n, "expected `SWAPQ <i> <j>`"));
                }
                let i = parse_usize(toks[1], n, "wire")?;
                let j = parse_usize(toks[2], n, "wire")?;
                Gate {
                    kind: GateKind::Perm(PermSpec::WireSwap(i, j)),
                    conds: parse_conds(&toks[3..], n)?,
                }
            }
            "TCOMP" => {
                if toks.len() < 2 {
                    return Err(err(n, "expected `TCOMP <lo>..<hi>`"));
                }
                let (lo, hi) = toks[1]
                    .split_once("..")
                    .ok_or_else(|| err(n, format!("invalid range `{}`", toks[1])))?;
                Gate::twos_complement(
                    parse_usize(lo, n, "range start")?,
                    parse_usize(hi, n, "range end")?,
                    parse_conds(&toks[2..], n)?,
                )
            }
            other => return Err(err(n, format!("unknown gate `{other}`"))),
        };
        circuit.push(gate).map_err(|e| err(n, e.to_string()))?;
    }
    Ok(circuit)
}

// ---------------------------------------------------------------------------
// mat-text

pub fn write_matrix(m: &DenseMatrix) -> String {
    let dim = m.dim();
    let mut out = String::from("mat-text v1\n");
    out.push_str(&format!("dim {dim}\n"));
    for r in 0..dim {
        let row: Vec<String> = m
            .row(r)
            .iter()
            .flat_map(|e| [fmt_f(e.re), fmt_f(e.im)])
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "mat-text v1")?;
    let dim = expect_keyword_value(&mut lines, "dim")?;
    if dim == 0 || !dim.is_power_of_two() {
        return Err(err(2, format!("dimension {dim} is not a power of two")));
    }
    let mut m = DenseMatrix::zeros(dim);
    let mut rows = 0;
    for (n, line) in lines {
        if rows == dim {
            return Err(err(n, format!("more than {dim} rows")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 * dim {
            return Err(err(
                n,
                format!("expected {} floats, found {}", 2 * dim, toks.len()),
            ));
        }
        for c in 0..dim {
            m.set(
                rows,
                c,
                Complex::new(parse_f64(toks[2 * c], n)?, parse_f64(toks[2 * c + 1], n)?),
            );
        }
        rows += 1;
    }
    if rows != dim {
        return Err(err(2, format!("expected {dim} rows, found {rows}")));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// vec-text

pub fn write_state(psi: &StateVector) -> String {
    let mut out = String::from("vec-text v1\n");
    out.push_str(&format!("dim {}\n", psi.dim()));
    for amp in psi.amplitudes() {
        out.push_str(&format!("{} {}\n", fmt_f(amp.re), fmt_f(amp.im)));
    }
    out
}

pub fn parse_state(text: &str) -> Result<StateVector, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "vec-text v1")?;
    let dim = expect_keyword_value(&mut lines, "dim")?;
    if dim < 2 || !dim.is_power_of_two() {
        return Err(err(2, format!("dimension {dim} is not a power of two")));
    }
    let mut amps = Vec::with_capacity(dim);
    for (n, line) in lines {
        if amps.len() == dim {
            return Err(err(n, format!("more than {dim} amplitudes")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(err(n, "expected `re im`"));
        }
        amps.push(Complex::new(parse_f64(toks[0], n)?, parse_f64(toks[1], n)?));
    }
    if amps.len() != dim {
        return Err(err(
            2,
            format!("expected {dim} amplitudes, found {}", amps.len()),
        ));
    }
    StateVector::from_amplitudes(amps).map_err(|e| err(2, e.to_string()))
}
