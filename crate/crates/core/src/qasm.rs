//! Reader and writer for a small OpenQASM 2.0 subset.
//!
//! Accepted statements: an optional `OPENQASM 2.0;` header, exactly one
//! `qreg`, and gate applications from
//! `x y z h s sdg t tdg p rz rx ry cx cz cp swap ccx mcx mcz`.
//! For controlled gates the last operand is the target. Angles may use
//! `pi`, decimal literals, `+ - * /` and parentheses.

use std::fmt::Write;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses QASM source into a circuit; gates keep their textual order.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut parser = Parser {
        register: None,
        circuit: None,
        seen_header: false,
        statements: 0,
    };
    for (line, stmt) in statements(text)? {
        parser.statement(line, &stmt)?;
    }
    parser
        .circuit
        .ok_or_else(|| parse_error(text.lines().count().max(1), "no qreg declared"))
}

/// Splits the source into `;`-terminated statements with the line each one
/// starts on. Comments are dropped.
fn statements(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = raw.split("//").next().unwrap_or("");
        for ch in code.chars() {
            if ch == ';' {
                out.push((start.max(1), current.trim().to_string()));
                current.clear();
                start = 0;
            } else {
                if start == 0 && !ch.is_whitespace() {
                    start = line_no;
                }
                current.push(ch);
            }
        }
        current.push(' ');
    }
    if !current.trim().is_empty() {
        return Err(parse_error(start, "statement is missing a terminating ';'"));
    }
    Ok(out)
}

struct Parser {
    register: Option<(String, usize)>,
    circuit: Option<Circuit>,
    seen_header: bool,
    statements: usize,
}

impl Parser {
    fn statement(&mut self, line: usize, stmt: &str) -> Result<()> {
        self.statements += 1;
        if stmt.is_empty() {
            return Err(parse_error(line, "empty statement"));
        }
        let (head, rest) = split_word(stmt);
        match head {
            "OPENQASM" => {
                if self.seen_header || self.statements != 1 {
                    return Err(parse_error(
                        line,
                        "OPENQASM header must be the first statement",
                    ));
                }
                if rest.trim() != "2.0" {
                    return Err(parse_error(
                        line,
                        format!("unsupported version {:?}", rest.trim()),
                    ));
                }
                self.seen_header = true;
                Ok(())
            }
            "qreg" => self.qreg(line, rest),
            "include" | "creg" | "gate" | "measure" | "barrier" | "reset" | "if" | "opaque" => {
                Err(parse_error(line, format!("'{head}' is not supported")))
            }
            _ => self.gate(line, stmt),
        }
    }

    fn qreg(&mut self, line: usize, rest: &str) -> Result<()> {
        if self.register.is_some() {
            return Err(parse_error(line, "only one qreg is supported"));
        }
        let (name, size) = parse_operand(line, rest.trim())?;
        if size == 0 {
            return Err(parse_error(line, "qreg must have at least one qubit"));
        }
        self.circuit = Some(Circuit::new(size).map_err(|e| parse_error(line, e.to_string()))?);
        self.register = Some((name, size));
        Ok(())
    }

    fn gate(&mut self, line: usize, stmt: &str) -> Result<()> {
        let name_end = stmt
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(stmt.len());
        let (name, mut rest) = stmt.split_at(name_end);
        if name.is_empty() {
            return Err(parse_error(line, format!("malformed statement {stmt:?}")));
        }
        rest = rest.trim_start();
        let mut angle = None;
        if let Some(after) = rest.strip_prefix('(') {
            let close =
                matching_paren(after).ok_or_else(|| parse_error(line, "unbalanced parentheses"))?;
            angle = Some(eval_angle(&after[..close]).map_err(|m| parse_error(line, m))?);
            rest = &after[close + 1..];
        }
        let Some((reg, size)) = self.register.clone() else {
            return Err(parse_error(line, "gate used before qreg declaration"));
        };
        let mut qubits = Vec::new();
        for operand in rest.split(',') {
            let (r, idx) = parse_operand(line, operand.trim())?;
            if r != reg {
                return Err(parse_error(line, format!("unknown register '{r}'")));
            }
            if idx >= size {
                return Err(parse_error(
                    line,
                    format!("qubit index {idx} out of range for {reg}[{size}]"),
                ));
            }
            qubits.push(idx);
        }

        let param = |needed: bool| -> Result<Option<f64>> {
            match (needed, angle) {
                (true, None) => Err(parse_error(line, format!("'{name}' needs an angle"))),
                (false, Some(_)) => Err(parse_error(line, format!("'{name}' takes no angle"))),
                _ => Ok(angle),
            }
        };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if qubits.len() < lo || qubits.len() > hi {
                Err(parse_error(
                    line,
                    format!("'{name}' takes {lo}..={hi} operands, got {}", qubits.len()),
                ))
            } else {
                Ok(())
            }
        };

        let (kind, range) = match name {
            "x" => (GateKind::X, (1, 1)),
            "y" => (GateKind::Y, (1, 1)),
            "z" => (GateKind::Z, (1, 1)),
            "h" => (GateKind::H, (1, 1)),
            "s" => (GateKind::S, (1, 1)),
            "sdg" => (GateKind::Sdg, (1, 1)),
            "t" => (GateKind::T, (1, 1)),
            "tdg" => (GateKind::Tdg, (1, 1)),
            "p" | "rz" | "rx" | "ry" | "cp" => {
                let t = param(true)?.expect("checked");
                let kind = match name {
                    "rz" => GateKind::Rz(t),
                    "rx" => GateKind::Rx(t),
                    "ry" => GateKind::Ry(t),
                    _ => GateKind::Phase(t),
                };
                let range = if name == "cp" { (2, 2) } else { (1, 1) };
                (kind, range)
            }
            "cx" => (GateKind::X, (2, 2)),
            "cz" => (GateKind::Z, (2, 2)),
            "ccx" => (GateKind::X, (3, 3)),
            "mcx" => (GateKind::X, (2, usize::MAX)),
            "mcz" => (GateKind::Z, (2, usize::MAX)),
            "swap" => {
                param(false)?;
                arity(2, 2)?;
                let g = Gate::new(GateKind::Swap(qubits[1]), qubits[0], [])
                    .map_err(|e| parse_error(line, e.to_string()))?;
                return self.push(line, g);
            }
            _ => return Err(parse_error(line, format!("unknown gate '{name}'"))),
        };
        if kind.theta().is_none() {
            param(false)?;
        }
        arity(range.0, range.1)?;
        let (target, controls) = qubits.split_last().expect("arity checked");
        let g = Gate::new(kind, *target, controls.iter().copied())
            .map_err(|e| parse_error(line, e.to_string()))?;
        self.push(line, g)
    }

    fn push(&mut self, line: usize, g: Gate) -> Result<()> {
        self.circuit
            .as_mut()
            .expect("register declared")
            .push(g)
            .map_err(|e| parse_error(line, e.to_string()))
    }
}

fn split_word(s: &str) -> (&str, &str) {
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    }
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return Some(i),
            ')' => depth -= 1,
            _ => {}
        }
    }
    None
}

fn parse_operand(line: usize, s: &str) -> Result<(String, usize)> {
    let bad = || parse_error(line, format!("malformed operand {s:?}"));
    let open = s.find('[').ok_or_else(bad)?;
    let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
    let name = s[..open].trim();
    let valid_name = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid_name {
        return Err(bad());
    }
    let idx = inner.trim().parse::<usize>().map_err(|_| bad())?;
    Ok((name.to_string(), idx))
}

/// Evaluates an angle expression.
pub fn eval_angle(src: &str) -> std::result::Result<f64, String> {
    let tokens = tokenize(src)?;
    let mut p = ExprParser { tokens, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("unexpected trailing input in angle {src:?}"));
    }
    if !v.is_finite() {
        return Err(format!("angle {src:?} is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Op(char),
}

fn tokenize(src: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(
                text.parse().map_err(|_| format!("bad number {text:?}"))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word != "pi" {
                return Err(format!("unknown identifier '{word}' in angle"));
            }
            out.push(Token::Num(std::f64::consts::PI));
        } else {
            return Err(format!("unexpected character '{c}' in angle"));
        }
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.factor()?;
            v = if op == '*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn factor(&mut self) -> std::result::Result<f64, String> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.factor()
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err("missing ')' in angle".to_string());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err("incomplete angle expression".to_string()),
        }
    }
}

/// Writes a circuit in the subset accepted by [`parse_qasm`].
pub fn emit_qasm(c: &Circuit) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "OPENQASM 2.0;");
    let _ = writeln!(out, "qreg q[{}];", c.n());
    for g in c.gates() {
        let unsupported = || Error::Unsupported(g.to_string());
        let nc = g.controls.len();
        let (name, angle) = match (g.kind, nc) {
            (GateKind::X, 0) => ("x", None),
            (GateKind::Y, 0) => ("y", None),
            (GateKind::Z, 0) => ("z", None),
            (GateKind::H, 0) => ("h", None),
            (GateKind::S, 0) => ("s", None),
            (GateKind::Sdg, 0) => ("sdg", None),
            (GateKind::T, 0) => ("t", None),
            (GateKind::Tdg, 0) => ("tdg", None),
            (GateKind::Phase(t), 0) => ("p", Some(t)),
            (GateKind::Rz(t), 0) => ("rz", Some(t)),
            (GateKind::Rx(t), 0) => ("rx", Some(t)),
            (GateKind::Ry(t), 0) => ("ry", Some(t)),
            (GateKind::Phase(t), 1) => ("cp", Some(t)),
            (GateKind::X, 1) => ("cx", None),
            (GateKind::X, 2) => ("ccx", None),
            (GateKind::X, _) => ("mcx", None),
            (GateKind::Z, 1) => ("cz", None),
            (GateKind::Z, _) => ("mcz", None),
            (GateKind::Swap(other), 0) => {
                let _ = writeln!(out, "swap q[{}],q[{}];", g.target, other);
                continue;
            }
            _ => return Err(unsupported()),
        };
        out.push_str(name);
        if let Some(t) = angle {
            let _ = write!(out, "({t})");
        }
        out.push(' ');
        for q in g.controls.iter().chain(std::iter::once(&g.target)) {
            let _ = write!(out, "q[{q}],");
        }
        out.pop();
        out.push_str(";\n");
    }
    Ok(out)
}
