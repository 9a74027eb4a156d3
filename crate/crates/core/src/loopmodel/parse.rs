//! Loop and tuple file parsers.
//!
//! ```text
//! # comment
//! vars x y z
//! domain int                  # optional, default rat
//! guard x >= -z
//! update x' = x + y, y' = y + z
//! update z' = z - 1
//! ```
//!
//! Relations are `<=`, `>=`, `=`, `<` and `>`, and may be chained
//! (`0 <= x <= 10`). Equalities become two `<=` rows. Strict relations are
//! only allowed in the guard. Coefficients are integers or `p/q`, written
//! `2*x`, `2x` or `1/2 x`.

use num_traits::{One, Zero};

use super::{Domain, RankTuple, SLCLoop, TupleKind};
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, AffineFunc, RatVec, Rational};
use crate::polyhedra::Constraint;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident { name: String, primed: bool },
    Plus,
    Minus,
    Star,
    Comma,
    Rel(Rel),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Rel {
    Le,
    Ge,
    Eq,
    Lt,
    Gt,
}

struct Lexed {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, lineno: usize, offset: usize) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let push = |tok, out: &mut Vec<Lexed>| out.push(Lexed { tok, col });
        match c {
            '+' => push(Tok::Plus, &mut out),
            '-' => push(Tok::Minus, &mut out),
            '*' => push(Tok::Star, &mut out),
            ',' => push(Tok::Comma, &mut out),
            '<' | '>' | '=' => {
                let eq_next = chars.get(i + 1) == Some(&'=');
                let rel = match (c, eq_next) {
                    ('<', true) => Rel::Le,
                    ('>', true) => Rel::Ge,
                    ('<', false) => Rel::Lt,
                    ('>', false) => Rel::Gt,
                    ('=', true) => Rel::Eq,
                    _ => Rel::Eq,
                };
                if eq_next {
                    i += 1;
                }
                push(Tok::Rel(rel), &mut out);
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                // p/q literal, allowing spaces around the slash
                let mut j = i + 1;
                while j < chars.len() && chars[j] == ' ' {
                    j += 1;
                }
                if chars.get(j) == Some(&'/') {
                    j += 1;
                    while j < chars.len() && chars[j] == ' ' {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j + 1 < chars.len() && chars[j + 1].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    } else {
                        return Err(Error::parse(lineno, offset + j + 1, "expected denominator"));
                    }
                }
                let text: String = chars[start..=i].iter().filter(|c| **c != ' ').collect();
                let v = parse_rational(&text)
                    .ok_or_else(|| Error::parse(lineno, col, format!("bad number `{text}`")))?;
                push(Tok::Num(v), &mut out);
            }
            a if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                let name: String = chars[start..=i].iter().collect();
                let primed = chars.get(i + 1) == Some(&'\'');
                if primed {
                    i += 1;
                }
                push(Tok::Ident { name, primed }, &mut out);
            }
            other => {
                return Err(Error::parse(lineno, col, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Where variables live in the coefficient vector.
struct Scope<'a> {
    names: &'a [String],
    allow_primed: bool,
    what: &'static str,
}

impl Scope<'_> {
    fn dim(&self) -> usize {
        if self.allow_primed {
            2 * self.names.len()
        } else {
            self.names.len()
        }
    }

    fn index(&self, name: &str, primed: bool, line: usize, col: usize) -> Result<usize> {
        let i = self
            .names
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::parse(line, col, format!("unknown variable `{name}`")))?;
        if primed && !self.allow_primed {
            return Err(Error::parse(
                line,
                col,
                format!("primed variable `{name}'` in {}", self.what),
            ));
        }
        Ok(if primed { i + self.names.len() } else { i })
    }
}

struct Parser<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |l| l.col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    /// `[sign] term (sign term)*`
    fn affine(&mut self, scope: &Scope) -> Result<AffineFunc> {
        let mut coeffs = RatVec::zeros(scope.dim());
        let mut constant = Rational::zero();
        let mut first = true;
        loop {
            let mut sign = Rational::one();
            match self.peek() {
                Some(Tok::Plus) => self.pos += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    self.pos += 1;
                }
                _ if first => {}
                _ => break,
            }
            first = false;
            let mut coef: Option<Rational> = None;
            if let Some(Tok::Num(v)) = self.peek() {
                coef = Some(v.clone());
                self.pos += 1;
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    if !matches!(self.peek(), Some(Tok::Ident { .. })) {
                        return Err(self.err("expected a variable after `*`"));
                    }
                }
            }
            match self.peek().cloned() {
                Some(Tok::Ident { name, primed }) => {
                    let col = self.col();
                    self.pos += 1;
                    let i = scope.index(&name, primed, self.line, col)?;
                    coeffs[i] += sign * coef.unwrap_or_else(Rational::one);
                }
                _ => match coef {
                    Some(c) => constant += sign * c,
                    None => return Err(self.err("expected a number or variable")),
                },
            }
        }
        Ok(AffineFunc::new(coeffs, constant))
    }
}

/// `lhs rel rhs [rel rhs …]` as rows `a·x (≤|<) b`.
fn relation_rows(lhs: &AffineFunc, rel: Rel, rhs: &AffineFunc) -> Vec<Constraint> {
    // lhs − rhs (rel) 0
    let diff = lhs - rhs;
    let le = |f: &AffineFunc| Constraint::nonpos(f);
    let lt = |f: &AffineFunc| Constraint::negative(f);
    match rel {
        Rel::Le => vec![le(&diff)],
        Rel::Ge => vec![le(&-&diff)],
        Rel::Lt => vec![lt(&diff)],
        Rel::Gt => vec![lt(&-&diff)],
        Rel::Eq => vec![le(&diff), le(&-&diff)],
    }
}

fn constraints(p: &mut Parser, scope: &Scope, allow_strict: bool) -> Result<Vec<Constraint>> {
    let mut out = Vec::new();
    loop {
        let mut lhs = p.affine(scope)?;
        let mut any = false;
        while let Some(Tok::Rel(rel)) = p.peek().cloned() {
            let col = p.col();
            p.pos += 1;
            if !allow_strict && matches!(rel, Rel::Lt | Rel::Gt) {
                return Err(Error::parse(p.line, col, "strict relation in update"));
            }
            let rhs = p.affine(scope)?;
            out.extend(relation_rows(&lhs, rel, &rhs));
            lhs = rhs;
            any = true;
        }
        if !any {
            return Err(p.err("expected a relation"));
        }
        match p.peek() {
            None => return Ok(out),
            Some(Tok::Comma) => p.pos += 1,
            Some(_) => return Err(p.err("expected `,` or end of line")),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Splits `keyword rest`, returning the keyword and the column where `rest`
/// starts (0-based).
fn keyword(line: &str) -> Option<(&str, &str, usize)> {
    let trimmed = line.trim_start();
    if trimmed.is_empty() {
        return None;
    }
    let lead = line.len() - trimmed.len();
    let kw_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
    let (kw, rest) = trimmed.split_at(kw_len);
    Some((kw, rest, lead + kw_len))
}

fn parse_line_constraints(
    rest: &str,
    offset: usize,
    lineno: usize,
    scope: &Scope,
    allow_strict: bool,
) -> Result<Vec<Constraint>> {
    let toks = lex(rest, lineno, offset)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line: lineno,
        end_col: offset + rest.chars().count() + 1,
    };
    constraints(&mut p, scope, allow_strict)
}

/// Parses the loop file format.
pub fn parse_loop(text: &str) -> Result<SLCLoop> {
    let mut vars: Option<Vec<String>> = None;
    let mut domain = Domain::Rational;
    let mut guard = Vec::new();
    let mut update = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let Some((kw, rest, offset)) = keyword(line) else {
            continue;
        };
        match kw {
            "vars" => {
                if vars.is_some() {
                    return Err(Error::parse(lineno, 1, "duplicate `vars` line"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(Error::parse(lineno, offset + 1, "no variables declared"));
                }
                for (i, n) in names.iter().enumerate() {
                    let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                        && n.chars().all(|c| c.is_alphanumeric() || c == '_');
                    if !ok {
                        return Err(Error::parse(lineno, offset + 1, format!("bad variable name `{n}`")));
                    }
                    if names[..i].contains(n) {
                        return Err(Error::parse(lineno, offset + 1, format!("variable `{n}` declared twice")));
                    }
                }
                vars = Some(names);
            }
            "domain" => {
                domain = match rest.trim() {
                    "rat" | "rational" => Domain::Rational,
                    "int" | "integer" => Domain::Integer,
                    other => {
                        return Err(Error::parse(lineno, offset + 2, format!("unknown domain `{other}`")))
                    }
                };
            }
            "guard" | "update" => {
                let Some(names) = vars.as_ref() else {
                    return Err(Error::parse(lineno, 1, "`vars` must come first"));
                };
                if kw == "guard" {
                    let scope = Scope {
                        names,
                        allow_primed: false,
                        what: "guard",
                    };
                    guard.extend(parse_line_constraints(rest, offset, lineno, &scope, true)?);
                } else {
                    let scope = Scope {
                        names,
                        allow_primed: true,
                        what: "update",
                    };
                    update.extend(parse_line_constraints(rest, offset, lineno, &scope, false)?);
                }
            }
            other => {
                return Err(Error::parse(
                    lineno,
                    offset - other.len() + 1,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
    }
    let vars = vars.ok_or_else(|| Error::parse(1, 1, "missing `vars` line"))?;
    SLCLoop::new(vars, guard, update, domain)
}

/// Parses one affine expression over unprimed `vars`.
pub fn parse_affine(text: &str, vars: &[String]) -> Result<AffineFunc> {
    let toks = lex(text, 1, 0)?;
    let scope = Scope {
        names: vars,
        allow_primed: false,
        what: "ranking function",
    };
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line: 1,
        end_col: text.chars().count() + 1,
    };
    let f = p.affine(&scope)?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Parses `component <affine>` lines into a tuple.
pub fn parse_tuple(text: &str, vars: &[String], kind: TupleKind) -> Result<RankTuple> {
    let scope = Scope {
        names: vars,
        allow_primed: false,
        what: "ranking function",
    };
    let mut comps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let Some((kw, rest, offset)) = keyword(line) else {
            continue;
        };
        if kw != "component" {
            return Err(Error::parse(lineno, offset - kw.len() + 1, format!("expected `component`, found `{kw}`")));
        }
        let toks = lex(rest, lineno, offset)?;
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            line: lineno,
            end_col: offset + rest.chars().count() + 1,
        };
        let f = p.affine(&scope)?;
        if p.peek().is_some() {
            return Err(p.err("trailing input after component"));
        }
        comps.push(f);
    }
    Ok(RankTuple::new(comps, kind))
}
