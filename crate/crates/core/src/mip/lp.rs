//! LP-format text: writer and a reader for the subset the writer produces.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::{One, Signed, Zero};

use super::model::*;
use crate::dataset::write_atomic;
use crate::error::{Error, Result};
use crate::objective::Sense;
use crate::rational::{int, parse_decimal, render_decimal, Rational};

const WRAP: usize = 200;

struct LineWriter {
    out: String,
    line_len: usize,
}

impl LineWriter {
    fn start(&mut self, head: &str) {
        self.out.push(' ');
        self.out.push_str(head);
        self.line_len = head.len() + 1;
    }

    fn token(&mut self, tok: &str) {
        if self.line_len + tok.len() + 1 > WRAP {
            self.out.push_str("\n   ");
            self.line_len = 3;
        }
        if self.line_len > 0 {
            self.out.push(' ');
            self.line_len += 1;
        }
        self.out.push_str(tok);
        self.line_len += tok.len();
    }

    fn end_line(&mut self) {
        self.out.push('\n');
        self.line_len = 0;
    }

    fn signed(&mut self, coef: &Rational, body: &str, first: bool) {
        let sign = if coef.is_negative() { "-" } else { "+" };
        if !(first && sign == "+") {
            self.token(sign);
        }
        let abs = coef.abs();
        if abs.is_one() {
            self.token(body);
        } else {
            self.token(&format!("{} {body}", render_decimal(&abs)));
        }
    }

    fn linear(&mut self, m: &ModelSpec, terms: &Terms) {
        for (i, (v, c)) in terms.iter().enumerate() {
            self.signed(c, &m.variables()[*v].name, i == 0);
        }
    }
}

/// Renders `m` as LP-format text. Output depends only on the model.
pub fn emit_lp(m: &ModelSpec) -> String {
    let layout = m.layout();
    let mut w = LineWriter {
        out: String::new(),
        line_len: 0,
    };
    let _ = writeln!(
        w.out,
        "\\ booltree model: depth {}, {} features, {} classes, {} instances",
        layout.depth, layout.n_features, layout.n_classes, layout.n_instances
    );
    let obj = m.objective();
    w.out.push_str(match obj.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    w.start("obj:");
    w.linear(m, &obj.terms);
    if !obj.constant.is_zero() || obj.terms.is_empty() {
        let first = obj.terms.is_empty();
        let sign_neg = obj.constant.is_negative();
        if !(first && !sign_neg) {
            w.token(if sign_neg { "-" } else { "+" });
        }
        w.token(&render_decimal(&obj.constant.abs()));
    }
    w.end_line();

    w.out.push_str("Subject To\n");
    for c in m.constraints() {
        w.start(&format!("{}:", c.name));
        w.linear(m, &c.terms);
        w.token(c.sense.symbol());
        w.token(&render_decimal(&c.rhs));
        w.end_line();
    }
    for q in m.quadratic() {
        w.start(&format!("{}:", q.name));
        w.linear(m, &q.linear);
        w.token(if q.linear.is_empty() { "[" } else { "+ [" });
        for (i, (u, v, c)) in q.quadratic.iter().enumerate() {
            let body = format!("{} * {}", m.variables()[*u].name, m.variables()[*v].name);
            w.signed(c, &body, i == 0);
        }
        w.token("]");
        w.token(q.sense.symbol());
        w.token(&render_decimal(&q.rhs));
        w.end_line();
    }

    w.out.push_str("Bounds\n");
    for v in m.variables() {
        let lower = render_decimal(&v.lower);
        let _ = match &v.upper {
            Some(u) => writeln!(w.out, " {lower} <= {} <= {}", v.name, render_decimal(u)),
            None => writeln!(w.out, " {} >= {lower}", v.name),
        };
    }
    for (header, kind) in [("General", VarKind::Integer), ("Binary", VarKind::Binary)] {
        let names: Vec<&str> = m
            .variables()
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.as_str())
            .collect();
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(w.out, "{header}");
        w.line_len = 0;
        for name in names {
            w.token(name);
        }
        w.end_line();
    }
    w.out.push_str("End\n");
    w.out
}

pub fn write_lp(m: &ModelSpec, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), emit_lp(m).as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    General,
    Binary,
    End,
}

fn section_keyword(line: &str) -> Option<Section> {
    let lower = line.to_ascii_lowercase();
    Some(match lower.as_str() {
        "minimize" | "minimise" | "min" | "maximize" | "maximise" | "max" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "general" | "generals" | "gen" => Section::General,
        "binary" | "binaries" | "bin" => Section::Binary,
        "end" => Section::End,
        _ => return None,
    })
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    line: usize,
}

fn tokenize(text: &str, line: usize, out: &mut Vec<Token>) {
    let spaced = text
        .replace('[', " [ ")
        .replace(']', " ] ")
        .replace('*', " * ");
    for tok in spaced.split_whitespace() {
        out.push(Token {
            text: tok.to_string(),
            line,
        });
    }
}

fn is_name(tok: &str) -> bool {
    tok.chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

fn is_sense(tok: &str) -> Option<ConstraintSense> {
    match tok {
        "<=" | "=<" | "<" => Some(ConstraintSense::Le),
        ">=" | "=>" | ">" => Some(ConstraintSense::Ge),
        "=" => Some(ConstraintSense::Eq),
        _ => None,
    }
}

#[derive(Default)]
struct Expr {
    linear: Vec<(String, Rational)>,
    quadratic: Vec<(String, String, Rational)>,
    constant: Rational,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text.as_str())
    }

    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or(0, |t| t.line)
    }

    fn next(&mut self) -> Option<&'a str> {
        let tok = self.peek();
        self.pos += 1;
        tok
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::format(self.line(), msg)
    }

    /// Optional sign tokens followed by an optional coefficient.
    fn coefficient(&mut self) -> Result<(Rational, bool)> {
        let mut sign = int(1);
        let mut any = false;
        while let Some(tok @ ("+" | "-")) = self.peek() {
            if tok == "-" {
                sign = -sign;
            }
            any = true;
            self.pos += 1;
        }
        if let Some(tok) = self.peek() {
            if !is_name(tok) && tok != "[" && is_sense(tok).is_none() {
                let value =
                    parse_decimal(tok).ok_or_else(|| self.err(format!("bad number '{tok}'")))?;
                self.pos += 1;
                return Ok((sign * value, true));
            }
        }
        Ok((sign, any))
    }

    fn expression(&mut self, stop_at_sense: bool) -> Result<Expr> {
        let mut expr = Expr::default();
        loop {
            match self.peek() {
                None => break,
                Some(tok) if stop_at_sense && is_sense(tok).is_some() => break,
                _ => {}
            }
            let (coef, explicit) = self.coefficient()?;
            match self.peek() {
                Some("[") => {
                    self.pos += 1;
                    self.quadratic(&coef, &mut expr)?;
                }
                Some(tok) if is_name(tok) => {
                    self.pos += 1;
                    expr.linear.push((tok.to_string(), coef));
                }
                _ if explicit => expr.constant += coef,
                Some(tok) => return Err(self.err(format!("unexpected '{tok}'"))),
                None => break,
            }
        }
        Ok(expr)
    }

    fn quadratic(&mut self, outer: &Rational, expr: &mut Expr) -> Result<()> {
        loop {
            if self.peek() == Some("]") {
                self.pos += 1;
                if self.peek() == Some("/") {
                    return Err(self.err("quadratic objectives are not supported"));
                }
                return Ok(());
            }
            let (coef, _) = self.coefficient()?;
            let u = self
                .next()
                .filter(|t| is_name(t))
                .ok_or_else(|| self.err("expected variable"))?;
            let v = match self.peek() {
                Some("*") => {
                    self.pos += 1;
                    self.next()
                        .filter(|t| is_name(t))
                        .ok_or_else(|| self.err("expected variable"))?
                }
                Some("^") => return Err(self.err("squared terms are not supported")),
                _ => return Err(self.err("expected '*' in quadratic term")),
            };
            expr.quadratic
                .push((u.to_string(), v.to_string(), outer * coef));
        }
    }
}

struct Registry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Registry {
    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

/// Parses LP text produced by [`emit_lp`] (and the same subset written by other tools).
pub fn parse_lp(text: &str) -> Result<ModelSpec> {
    let mut section = Section::None;
    let mut sense = None;
    let mut buckets: HashMap<&'static str, Vec<Token>> = HashMap::new();
    let mut bound_lines: Vec<(usize, Vec<Token>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = section_keyword(line) {
            if s == Section::Objective {
                sense = Some(if line.to_ascii_lowercase().starts_with("max") {
                    Sense::Maximize
                } else {
                    Sense::Minimize
                });
            }
            section = s;
            continue;
        }
        let bucket = match section {
            Section::Objective => "obj",
            Section::Constraints => "cons",
            Section::General => "gen",
            Section::Binary => "bin",
            Section::Bounds => {
                let mut toks = Vec::new();
                tokenize(line, line_no, &mut toks);
                bound_lines.push((line_no, toks));
                continue;
            }
            Section::None => {
                return Err(Error::format(line_no, "text before the objective section"))
            }
            Section::End => return Err(Error::format(line_no, "text after 'End'")),
        };
        tokenize(line, line_no, buckets.entry(bucket).or_default());
    }
    let sense = sense.ok_or_else(|| Error::format(0, "missing objective section"))?;
    let mut reg = Registry {
        names: Vec::new(),
        index: HashMap::new(),
    };
    let mut kinds: HashMap<usize, VarKind> = HashMap::new();
    let mut bounds: HashMap<usize, (Rational, Option<Rational>)> = HashMap::new();

    for (line, toks) in &bound_lines {
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        let num = |s: &str| -> Result<Option<Rational>> {
            match s.to_ascii_lowercase().trim_start_matches('+') {
                "inf" | "infinity" => Ok(None),
                _ => parse_decimal(s)
                    .map(Some)
                    .ok_or_else(|| Error::format(*line, format!("bad bound '{s}'"))),
            }
        };
        let (name, lo, hi) = match texts.as_slice() {
            [lo, "<=", name, "<=", hi] => (*name, num(lo)?, num(hi)?),
            [name, ">=", lo] => (*name, num(lo)?, None),
            [name, "<=", hi] => (*name, Some(int(0)), num(hi)?),
            [name, "=", v] => (*name, num(v)?, num(v)?),
            [name, free] if free.eq_ignore_ascii_case("free") => {
                return Err(Error::format(
                    *line,
                    format!("free variable '{name}' is not supported"),
                ))
            }
            _ => return Err(Error::format(*line, "unrecognized bound")),
        };
        let lo =
            lo.ok_or_else(|| Error::format(*line, "infinite lower bounds are not supported"))?;
        let id = reg.id(name);
        bounds.insert(id, (lo, hi));
    }

    let obj_tokens = buckets.remove("obj").unwrap_or_default();
    let mut p = Parser {
        tokens: &obj_tokens,
        pos: 0,
    };
    if p.peek().is_some_and(|t| t.ends_with(':')) {
        p.pos += 1;
    }
    let obj_expr = p.expression(false)?;
    if !obj_expr.quadratic.is_empty() {
        return Err(p.err("quadratic objectives are not supported"));
    }

    let cons_tokens = buckets.remove("cons").unwrap_or_default();
    let mut p = Parser {
        tokens: &cons_tokens,
        pos: 0,
    };
    let mut parsed = Vec::new();
    let mut unnamed = 0;
    while p.peek().is_some() {
        let name = match p.peek() {
            Some(tok) if tok.ends_with(':') && tok.len() > 1 => {
                p.pos += 1;
                tok.trim_end_matches(':').to_string()
            }
            _ => {
                unnamed += 1;
                format!("R{unnamed}")
            }
        };
        let expr = p.expression(true)?;
        let sense = p
            .next()
            .and_then(is_sense)
            .ok_or_else(|| p.err("expected a sense"))?;
        let (rhs, explicit) = p.coefficient()?;
        if !explicit {
            return Err(p.err("expected a right-hand side"));
        }
        parsed.push((name, expr, sense, rhs));
    }

    for (bucket, kind) in [("gen", VarKind::Integer), ("bin", VarKind::Binary)] {
        for tok in buckets.remove(bucket).unwrap_or_default() {
            let id = reg.id(&tok.text);
            kinds.insert(id, kind);
        }
    }

    let linear_ids = |terms: &[(String, Rational)], reg: &mut Registry| -> Terms {
        terms.iter().map(|(n, c)| (reg.id(n), c.clone())).collect()
    };
    let obj_terms = linear_ids(&obj_expr.linear, &mut reg);
    let mut constraints = Vec::new();
    let mut quadratic = Vec::new();
    for (name, expr, sense, rhs) in parsed {
        let rhs = rhs - &expr.constant;
        let linear = linear_ids(&expr.linear, &mut reg);
        if expr.quadratic.is_empty() {
            constraints.push(Constraint {
                name,
                terms: linear,
                sense,
                rhs,
            });
        } else {
            let quad = expr
                .quadratic
                .iter()
                .map(|(u, v, c)| (reg.id(u), reg.id(v), c.clone()))
                .collect();
            quadratic.push(QuadConstraint {
                name,
                linear,
                quadratic: quad,
                sense,
                rhs,
            });
        }
    }

    let variables: Vec<Variable> = reg
        .names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let kind = kinds.get(&i).copied().unwrap_or(VarKind::Continuous);
            let (lower, upper) = bounds.get(&i).cloned().unwrap_or_else(|| match kind {
                VarKind::Binary => (int(0), Some(int(1))),
                _ => (int(0), None),
            });
            Variable {
                name: name.clone(),
                kind,
                lower,
                upper,
            }
        })
        .collect();
    let layout = infer_layout(&variables)?;
    ModelSpec::from_parts(
        variables,
        constraints,
        quadratic,
        ModelObjective {
            sense,
            constant: obj_expr.constant,
            terms: obj_terms,
        },
        layout,
    )
}

pub fn read_lp(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lp(&text)
}

/// Recovers tree and data dimensions from generated variable names.
fn infer_layout(variables: &[Variable]) -> Result<Layout> {
    let mut max_branch = 0usize;
    let mut n_features = 0usize;
    let mut n_classes = 0usize;
    let mut n_instances = 0usize;
    for v in variables {
        let parts: Vec<&str> = v.name.split('_').collect();
        match (var_family(&v.name), parts.as_slice()) {
            ("a", [_, t, f]) => {
                max_branch = max_branch.max(t.parse().unwrap_or(0));
                let f = f
                    .strip_prefix('f')
                    .and_then(|f| f.parse().ok())
                    .unwrap_or(0);
                n_features = n_features.max(f);
            }
            ("d", [_, t]) => max_branch = max_branch.max(t.parse().unwrap_or(0)),
            ("c", [_, _, k]) => n_classes = n_classes.max(k.parse::<usize>().map_or(0, |k| k + 1)),
            ("z", [_, i, _]) => n_instances = n_instances.max(i.parse().unwrap_or(0)),
            _ => {}
        }
    }
    let depth = (max_branch + 1).trailing_zeros() as usize;
    if max_branch == 0 || (1usize << depth) != max_branch + 1 || n_classes == 0 || n_instances == 0
    {
        return Err(Error::format(
            0,
            "variables do not describe a complete tree model",
        ));
    }
    Ok(Layout {
        depth,
        n_features,
        n_classes,
        n_instances,
    })
}
