//! The TPTP FOF subset the translation emits: universally closed equations
//! and disequations between untyped terms, plus `<=>`/`=>` combinations of
//! those as used by the fixed axiom block.
//!
//! The printer is canonical (same formula, same bytes) and the parser reads
//! everything the printer emits plus the axiom block's original spacing, so
//! every generated file can be checked by reparsing.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FofTerm {
    /// `[A-Z][A-Za-z0-9_]*`
    Var(String),
    /// Function application; the atom is stored unquoted and the printer
    /// decides between plain, number and `'...'` spellings.
    Fun(String, Vec<FofTerm>),
}

impl FofTerm {
    pub fn var(name: &str) -> FofTerm {
        FofTerm::Var(name.to_string())
    }

    pub fn fun(atom: &str, args: Vec<FofTerm>) -> FofTerm {
        FofTerm::Fun(atom.to_string(), args)
    }

    pub fn constant(atom: &str) -> FofTerm {
        FofTerm::Fun(atom.to_string(), Vec::new())
    }

    fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            FofTerm::Var(v) => {
                out.insert(v.clone());
            }
            FofTerm::Fun(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FofExpr {
    Forall(Vec<String>, Box<FofExpr>),
    Iff(Box<FofExpr>, Box<FofExpr>),
    Implies(Box<FofExpr>, Box<FofExpr>),
    Eq(FofTerm, FofTerm),
    Neq(FofTerm, FofTerm),
}

impl FofExpr {
    pub fn forall(vars: Vec<&str>, body: FofExpr) -> FofExpr {
        FofExpr::Forall(vars.into_iter().map(str::to_string).collect(), Box::new(body))
    }

    /// Variables not bound by any enclosing quantifier.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            FofExpr::Forall(vars, body) => {
                let mut inner = body.free_vars();
                for v in vars {
                    inner.remove(v);
                }
                inner
            }
            FofExpr::Iff(l, r) | FofExpr::Implies(l, r) => {
                let mut out = l.free_vars();
                out.extend(r.free_vars());
                out
            }
            FofExpr::Eq(a, b) | FofExpr::Neq(a, b) => {
                let mut out = BTreeSet::new();
                a.vars_into(&mut out);
                b.vars_into(&mut out);
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    /// A definition used as a premise; prints as `axiom`.
    DefinitionAsAxiom,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Axiom | Role::DefinitionAsAxiom => f.write_str("axiom"),
            Role::Conjecture => f.write_str("conjecture"),
        }
    }
}

/// A named FOF clause. `name` is stored as unquoted atom content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FofFormula {
    pub name: String,
    pub role: Role,
    pub body: FofExpr,
}

impl FofFormula {
    pub fn new(name: &str, role: Role, body: FofExpr) -> FofFormula {
        FofFormula { name: name.to_string(), role, body }
    }

    pub fn is_closed(&self) -> bool {
        self.body.free_vars().is_empty()
    }
}

// ---------------------------------------------------------------------------
// Printing

pub fn plain_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn nonneg_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Print an atom: bare when it is a plain lower word or an unsigned
/// integer, otherwise single-quoted with internal apostrophes doubled.
pub fn print_atom(s: &str) -> String {
    if plain_atom(s) || nonneg_integer(s) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "''"))
    }
}

fn print_term(t: &FofTerm, out: &mut String) {
    match t {
        FofTerm::Var(v) => out.push_str(v),
        FofTerm::Fun(atom, args) => {
            out.push_str(&print_atom(atom));
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    print_term(a, out);
                }
                out.push(')');
            }
        }
    }
}

fn print_expr(e: &FofExpr, out: &mut String) {
    match e {
        FofExpr::Forall(vars, body) => {
            out.push_str("! [");
            out.push_str(&vars.join(","));
            out.push_str("] : ");
            match **body {
                FofExpr::Iff(..) | FofExpr::Implies(..) => {
                    out.push('(');
                    print_expr(body, out);
                    out.push(')');
                }
                _ => print_expr(body, out),
            }
        }
        FofExpr::Iff(l, r) => print_binary(l, "<=>", r, out),
        FofExpr::Implies(l, r) => print_binary(l, "=>", r, out),
        FofExpr::Eq(a, b) => {
            print_term(a, out);
            out.push_str(" = ");
            print_term(b, out);
        }
        FofExpr::Neq(a, b) => {
            print_term(a, out);
            out.push_str(" != ");
            print_term(b, out);
        }
    }
}

fn print_binary(l: &FofExpr, op: &str, r: &FofExpr, out: &mut String) {
    out.push('(');
    print_expr(l, out);
    out.push_str(") ");
    out.push_str(op);
    out.push(' ');
    match r {
        FofExpr::Eq(..) | FofExpr::Neq(..) => print_expr(r, out),
        _ => {
            out.push('(');
            print_expr(r, out);
            out.push(')');
        }
    }
}

/// Canonical single-line `fof(name,role,(...)).` clause.
pub fn print_fof(f: &FofFormula) -> String {
    let mut body = String::new();
    print_expr(&f.body, &mut body);
    format!("fof({},{},({})).", print_atom(&f.name), f.role, body)
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct FofParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Period,
    Colon,
    Bang,
    Eq,
    Neq,
    Iff,
    Implies,
    Lower(String),
    Upper(String),
    Quoted(String),
    Number(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Period => ".",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Iff => "<=>",
            Tok::Implies => "=>",
            Tok::Lower(s) | Tok::Upper(s) | Tok::Number(s) => s,
            Tok::Quoted(s) => return write!(f, "'{s}'"),
        };
        f.write_str(s)
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        match c {
            Some('\n') => {
                self.line += 1;
                self.col = 1;
            }
            Some(_) => self.col += 1,
            None => {}
        }
        c
    }

    fn err(&self, msg: impl Into<String>) -> FofParseError {
        FofParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>, FofParseError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let c = self.bump().expect("peeked");
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '.' => Tok::Period,
            ':' => Tok::Colon,
            '!' => {
                if self.chars.peek() == Some(&'=') {
                    self.bump();
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            '=' => {
                if self.chars.peek() == Some(&'>') {
                    self.bump();
                    Tok::Implies
                } else {
                    Tok::Eq
                }
            }
            '<' => {
                if self.bump() == Some('=') && self.bump() == Some('>') {
                    Tok::Iff
                } else {
                    return Err(self.err("expected `<=>`"));
                }
            }
            '\'' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err("unterminated quoted atom")),
                        Some('\'') => {
                            if self.chars.peek() == Some(&'\'') {
                                self.bump();
                                s.push('\'');
                            } else {
                                break;
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                Tok::Quoted(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Number(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if c.is_ascii_uppercase() {
                    Tok::Upper(s)
                } else {
                    Tok::Lower(s)
                }
            }
            other => return Err(self.err(format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, line, col)))
    }
}

struct FofParser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl FofParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> FofParseError {
        let (line, col) = self.here();
        FofParseError { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok, FofParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t.0)
    }

    fn expect(&mut self, want: Tok) -> Result<(), FofParseError> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected `{want}`, found `{got}`")))
        }
    }

    fn formula(&mut self) -> Result<FofFormula, FofParseError> {
        match self.next()? {
            Tok::Lower(w) if w == "fof" => {}
            other => {
                self.pos -= 1;
                return Err(self.err(format!("expected `fof`, found `{other}`")));
            }
        }
        self.expect(Tok::LParen)?;
        let name = self.atom_content()?;
        self.expect(Tok::Comma)?;
        let role = match self.next()? {
            Tok::Lower(r) if r == "axiom" => Role::Axiom,
            Tok::Lower(r) if r == "conjecture" => Role::Conjecture,
            other => {
                self.pos -= 1;
                return Err(self.err(format!("unsupported role `{other}`")));
            }
        };
        self.expect(Tok::Comma)?;
        let body = self.expr()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Period)?;
        Ok(FofFormula { name, role, body })
    }

    fn atom_content(&mut self) -> Result<String, FofParseError> {
        match self.next()? {
            Tok::Lower(s) | Tok::Number(s) | Tok::Quoted(s) => Ok(s),
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected an atom, found `{other}`")))
            }
        }
    }

    /// formula := unit (('<=>' | '=>') unit)?   with units possibly quantified
    fn expr(&mut self) -> Result<FofExpr, FofParseError> {
        let lhs = self.unit()?;
        match self.peek() {
            Some(Tok::Iff) => {
                self.next()?;
                let rhs = self.unit()?;
                self.no_chained_binary()?;
                Ok(FofExpr::Iff(Box::new(lhs), Box::new(rhs)))
            }
            Some(Tok::Implies) => {
                self.next()?;
                let rhs = self.unit()?;
                self.no_chained_binary()?;
                Ok(FofExpr::Implies(Box::new(lhs), Box::new(rhs)))
            }
            _ => Ok(lhs),
        }
    }

    fn no_chained_binary(&mut self) -> Result<(), FofParseError> {
        match self.peek() {
            Some(Tok::Iff) | Some(Tok::Implies) => {
                Err(self.err("binary connectives are non-associative; add parentheses"))
            }
            _ => Ok(()),
        }
    }

    /// unit := '!' '[' vars ']' ':' unit | '(' formula ')' | term ('='|'!=') term
    fn unit(&mut self) -> Result<FofExpr, FofParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.next()?;
                self.expect(Tok::LBracket)?;
                let mut vars = Vec::new();
                loop {
                    match self.next()? {
                        Tok::Upper(v) => vars.push(v),
                        other => {
                            self.pos -= 1;
                            return Err(self.err(format!("expected a variable, found `{other}`")));
                        }
                    }
                    match self.next()? {
                        Tok::Comma => continue,
                        Tok::RBracket => break,
                        other => {
                            self.pos -= 1;
                            return Err(self.err(format!("expected `,` or `]`, found `{other}`")));
                        }
                    }
                }
                self.expect(Tok::Colon)?;
                let body = self.unit()?;
                Ok(FofExpr::Forall(vars, Box::new(body)))
            }
            Some(Tok::LParen) => {
                self.next()?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => {
                let lhs = self.term()?;
                match self.next()? {
                    Tok::Eq => Ok(FofExpr::Eq(lhs, self.term()?)),
                    Tok::Neq => Ok(FofExpr::Neq(lhs, self.term()?)),
                    other => {
                        self.pos -= 1;
                        Err(self.err(format!("expected `=` or `!=`, found `{other}`")))
                    }
                }
            }
        }
    }

    fn term(&mut self) -> Result<FofTerm, FofParseError> {
        match self.next()? {
            Tok::Upper(v) => Ok(FofTerm::Var(v)),
            Tok::Lower(atom) | Tok::Quoted(atom) | Tok::Number(atom) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.next()?;
                    let mut args = vec![self.term()?];
                    loop {
                        match self.next()? {
                            Tok::Comma => args.push(self.term()?),
                            Tok::RParen => break,
                            other => {
                                self.pos -= 1;
                                return Err(self.err(format!("expected `,` or `)`, found `{other}`")));
                            }
                        }
                    }
                    Ok(FofTerm::Fun(atom, args))
                } else {
                    Ok(FofTerm::Fun(atom, Vec::new()))
                }
            }
            other => {
                self.pos -= 1;
                Err(self.err(format!("expected a term, found `{other}`")))
            }
        }
    }
}

fn lex_all(text: &str) -> Result<Vec<(Tok, usize, usize)>, FofParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_tok()? {
        toks.push(t);
    }
    Ok(toks)
}

/// Parse a whole file of `fof(...).` clauses (plus `%` comments).
pub fn parse_fof_file(text: &str) -> Result<Vec<FofFormula>, FofParseError> {
    let toks = lex_all(text)?;
    let mut p = FofParser { toks, pos: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.formula()?);
    }
    Ok(out)
}

/// Parse exactly one clause.
pub fn parse_fof(text: &str) -> Result<FofFormula, FofParseError> {
    let mut all = parse_fof_file(text)?;
    if all.len() == 1 {
        Ok(all.pop().expect("len checked"))
    } else {
        Err(FofParseError { line: 1, col: 1, msg: format!("expected one clause, found {}", all.len()) })
    }
}
