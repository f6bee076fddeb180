//! Reader and printer for the S-expression dump format.
//!
//! This is not a general Common Lisp reader: the dumps are already
//! macro-expanded, so only the forms that actually occur are supported —
//! line comments, strings, `|...|` escaped symbols, `'` quote shorthand,
//! `PKG::NAME` prefixes, integers, ratios and dotted pairs. Reader macros
//! such as `#\c` are rejected with a positioned error.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, Zero};
use std::fmt;

/// Package a bare symbol belongs to when no `PKG::` prefix is present.
pub const DEFAULT_PACKAGE: &str = "ACL2";

/// A parsed S-expression datum.
///
/// Lists are kept in canonical form: `()` reads as the symbol `NIL`, a
/// dotted tail is never itself a list, and a `NIL` tail is folded into a
/// proper list. Ratios are reduced, with a positive denominator; a ratio
/// whose reduced denominator is 1 reads as an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sexpr {
    Symbol { package: String, name: String },
    Integer(BigInt),
    Ratio { num: BigInt, den: BigInt },
    Str(String),
    Quote(Box<Sexpr>),
    List { items: Vec<Sexpr>, tail: Option<Box<Sexpr>> },
}

impl Sexpr {
    /// Symbol in the default (`ACL2`) package.
    pub fn symbol(name: &str) -> Sexpr {
        Sexpr::Symbol { package: DEFAULT_PACKAGE.to_string(), name: name.to_string() }
    }

    pub fn symbol_in(package: &str, name: &str) -> Sexpr {
        Sexpr::Symbol { package: package.to_string(), name: name.to_string() }
    }

    pub fn nil() -> Sexpr {
        Sexpr::symbol("NIL")
    }

    pub fn int(value: i64) -> Sexpr {
        Sexpr::Integer(BigInt::from(value))
    }

    /// Normalized ratio: reduced, positive denominator, integer when the
    /// denominator reduces to 1. Panics on a zero denominator (the parser
    /// reports that as a positioned error instead).
    pub fn ratio(num: BigInt, den: BigInt) -> Sexpr {
        assert!(!den.is_zero(), "ratio denominator must be nonzero");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (num / &g, den / g) };
        if den == BigInt::from(1) {
            Sexpr::Integer(num)
        } else {
            Sexpr::Ratio { num, den }
        }
    }

    pub fn quote(inner: Sexpr) -> Sexpr {
        Sexpr::Quote(Box::new(inner))
    }

    /// Proper list; an empty item vector canonicalizes to `NIL`.
    pub fn list(items: Vec<Sexpr>) -> Sexpr {
        if items.is_empty() {
            Sexpr::nil()
        } else {
            Sexpr::List { items, tail: None }
        }
    }

    pub fn is_symbol(&self, package: &str, name: &str) -> bool {
        matches!(self, Sexpr::Symbol { package: p, name: n } if p == package && n == name)
    }

    /// `NIL` in the default package.
    pub fn is_nil(&self) -> bool {
        self.is_symbol(DEFAULT_PACKAGE, "NIL")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unbalanced closing parenthesis")]
    UnbalancedClose,
    #[error("unterminated list")]
    UnterminatedList,
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unterminated |...| symbol escape")]
    UnterminatedEscape,
    #[error("stray `.` outside a dotted pair")]
    StrayDot,
    #[error("malformed dotted pair")]
    BadDottedPair,
    #[error("nothing follows quote")]
    QuoteAtEof,
    #[error("unsupported reader macro `#{0}`")]
    ReaderMacro(char),
    #[error("symbol has an empty package prefix")]
    EmptyPackage,
    #[error("symbol has an empty name")]
    EmptySymbolName,
    #[error("malformed package marker in `{0}`")]
    BadPackageMarker(String),
    #[error("ratio with zero denominator")]
    ZeroDenominator,
    #[error("expected exactly one datum")]
    ExpectedOneDatum,
}

/// Parse failure with 1-based line and column of the offending character.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

/// Parse every top-level datum in `text`, in file order.
///
/// Any error rejects the whole input; there is no partial result.
pub fn parse_sexprs(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut parser = Parser::new(text);
    let mut out = Vec::new();
    loop {
        parser.skip_blank();
        if parser.peek().is_none() {
            return Ok(out);
        }
        match parser.datum()? {
            DatumOrDot::Datum(d) => out.push(d),
            DatumOrDot::Dot { line, col } => {
                return Err(ParseError { line, col, kind: ParseErrorKind::StrayDot })
            }
        }
    }
}

/// Parse exactly one datum; trailing content (other than blanks) is an error.
pub fn parse_one(text: &str) -> Result<Sexpr, ParseError> {
    let mut items = parse_sexprs(text)?;
    match items.len() {
        1 => Ok(items.pop().expect("len checked")),
        _ => Err(ParseError { line: 1, col: 1, kind: ParseErrorKind::ExpectedOneDatum }),
    }
}

enum DatumOrDot {
    Datum(Sexpr),
    Dot { line: usize, col: usize },
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

/// Characters that terminate a token.
fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '\'' | ';' | '"')
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
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

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col: self.col, kind }
    }

    fn err_at(&self, line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    fn skip_blank(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn datum(&mut self) -> Result<DatumOrDot, ParseError> {
        self.skip_blank();
        let (line, col) = (self.line, self.col);
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.err(ParseErrorKind::UnterminatedList)),
        };
        match c {
            '(' => {
                self.bump();
                self.list_rest(line, col).map(DatumOrDot::Datum)
            }
            ')' => Err(self.err(ParseErrorKind::UnbalancedClose)),
            '\'' => {
                self.bump();
                self.skip_blank();
                if self.peek().is_none() {
                    return Err(self.err_at(line, col, ParseErrorKind::QuoteAtEof));
                }
                match self.datum()? {
                    DatumOrDot::Datum(d) => Ok(DatumOrDot::Datum(Sexpr::quote(d))),
                    DatumOrDot::Dot { line, col } => {
                        Err(self.err_at(line, col, ParseErrorKind::StrayDot))
                    }
                }
            }
            '"' => {
                self.bump();
                self.string_rest(line, col).map(DatumOrDot::Datum)
            }
            '#' => {
                self.bump();
                let next = self.peek().unwrap_or(' ');
                Err(self.err_at(line, col, ParseErrorKind::ReaderMacro(next)))
            }
            _ => self.token(line, col),
        }
    }

    fn list_rest(&mut self, open_line: usize, open_col: usize) -> Result<Sexpr, ParseError> {
        let mut items: Vec<Sexpr> = Vec::new();
        let mut tail: Option<Sexpr> = None;
        loop {
            self.skip_blank();
            match self.peek() {
                None => return Err(self.err_at(open_line, open_col, ParseErrorKind::UnterminatedList)),
                Some(')') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    let (dline, dcol) = (self.line, self.col);
                    match self.datum()? {
                        DatumOrDot::Datum(d) => items.push(d),
                        DatumOrDot::Dot { line, col } => {
                            if items.is_empty() {
                                return Err(self.err_at(line, col, ParseErrorKind::StrayDot));
                            }
                            match self.datum()? {
                                DatumOrDot::Datum(d) => tail = Some(d),
                                DatumOrDot::Dot { line, col } => {
                                    return Err(self.err_at(line, col, ParseErrorKind::StrayDot))
                                }
                            }
                            self.skip_blank();
                            match self.peek() {
                                Some(')') => {
                                    self.bump();
                                }
                                _ => {
                                    return Err(self.err_at(
                                        dline,
                                        dcol,
                                        ParseErrorKind::BadDottedPair,
                                    ))
                                }
                            }
                            break;
                        }
                    }
                }
            }
        }
        Ok(canonical_list(items, tail))
    }

    fn string_rest(&mut self, open_line: usize, open_col: usize) -> Result<Sexpr, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err_at(open_line, open_col, ParseErrorKind::UnterminatedString)),
                Some('\\') => match self.bump() {
                    None => {
                        return Err(self.err_at(open_line, open_col, ParseErrorKind::UnterminatedString))
                    }
                    Some(c) => s.push(c),
                },
                Some('"') => return Ok(Sexpr::Str(s)),
                Some(c) => s.push(c),
            }
        }
    }

    /// Scan a token: runs of constituent characters and `|...|` escaped
    /// sections (with `\` escaping the next character inside them).
    fn token(&mut self, line: usize, col: usize) -> Result<DatumOrDot, ParseError> {
        // (char, was_escaped)
        let mut raw: Vec<(char, bool)> = Vec::new();
        loop {
            match self.peek() {
                Some('|') => {
                    let (eline, ecol) = (self.line, self.col);
                    self.bump();
                    loop {
                        match self.bump() {
                            None => {
                                return Err(self.err_at(
                                    eline,
                                    ecol,
                                    ParseErrorKind::UnterminatedEscape,
                                ))
                            }
                            Some('|') => break,
                            Some('\\') => match self.bump() {
                                None => {
                                    return Err(self.err_at(
                                        eline,
                                        ecol,
                                        ParseErrorKind::UnterminatedEscape,
                                    ))
                                }
                                Some(c) => raw.push((c, true)),
                            },
                            Some(c) => raw.push((c, true)),
                        }
                    }
                }
                Some(c) if !is_delimiter(c) => {
                    self.bump();
                    raw.push((c, false));
                }
                _ => break,
            }
        }
        // `|...|` may legitimately be empty -- that is the empty-name error;
        // a raw empty token cannot happen (we only get here on a constituent).
        if raw.is_empty() {
            return Err(self.err_at(line, col, ParseErrorKind::EmptySymbolName));
        }
        if raw.len() == 1 && raw[0] == ('.', false) {
            return Ok(DatumOrDot::Dot { line, col });
        }
        classify_token(&raw, line, col).map(DatumOrDot::Datum)
    }
}

fn canonical_list(mut items: Vec<Sexpr>, tail: Option<Sexpr>) -> Sexpr {
    // Fold `(a . (b c))` into `(a b c)` and drop a NIL tail.
    match tail {
        Some(Sexpr::List { items: ti, tail: tt }) => {
            items.extend(ti);
            canonical_list(items, tt.map(|b| *b))
        }
        Some(t) if t.is_nil() => canonical_list(items, None),
        tail => {
            if items.is_empty() {
                debug_assert!(tail.is_none());
                Sexpr::nil()
            } else {
                Sexpr::List { items, tail: tail.map(Box::new) }
            }
        }
    }
}

fn classify_token(raw: &[(char, bool)], line: usize, col: usize) -> Result<Sexpr, ParseError> {
    let any_escaped = raw.iter().any(|&(_, e)| e);
    let colons: Vec<usize> =
        raw.iter().enumerate().filter(|&(_, &(c, e))| c == ':' && !e).map(|(i, _)| i).collect();

    let text: String = raw.iter().map(|&(c, _)| c).collect();

    if colons.is_empty() {
        if !any_escaped {
            if let Some(n) = try_number(&text) {
                return n.map_err(|kind| ParseError { line, col, kind });
            }
        }
        return Ok(Sexpr::symbol(&text));
    }

    // Package marker: a leading `:` means the keyword package, otherwise the
    // first colon run splits `PKG::NAME` (a single `:` is accepted too).
    let first = colons[0];
    let mut run_len = 1;
    while colons.contains(&(first + run_len)) {
        run_len += 1;
    }
    let after = first + run_len;
    if run_len > 2 && first > 0 {
        return Err(ParseError { line, col, kind: ParseErrorKind::BadPackageMarker(text) });
    }
    if colons.iter().any(|&i| i >= after) {
        return Err(ParseError { line, col, kind: ParseErrorKind::BadPackageMarker(text) });
    }
    if first == 0 {
        if run_len != 1 {
            return Err(ParseError { line, col, kind: ParseErrorKind::EmptyPackage });
        }
        let name: String = raw[1..].iter().map(|&(c, _)| c).collect();
        if name.is_empty() {
            return Err(ParseError { line, col, kind: ParseErrorKind::EmptySymbolName });
        }
        return Ok(Sexpr::symbol_in("KEYWORD", &name));
    }
    let package: String = raw[..first].iter().map(|&(c, _)| c).collect();
    let name: String = raw[after..].iter().map(|&(c, _)| c).collect();
    if name.is_empty() {
        return Err(ParseError { line, col, kind: ParseErrorKind::EmptySymbolName });
    }
    Ok(Sexpr::Symbol { package, name })
}

/// `Some(..)` when the token uses number syntax: `[+-]?digits(/digits)?`.
fn try_number(text: &str) -> Option<Result<Sexpr, ParseErrorKind>> {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    if body.is_empty() {
        return None;
    }
    let (num_part, den_part) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if num_part.is_empty() || !num_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if let Some(d) = den_part {
        if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    let sign = if text.starts_with('-') { -1 } else { 1 };
    let num: BigInt = num_part.parse::<BigInt>().expect("digits") * sign;
    match den_part {
        None => Some(Ok(Sexpr::Integer(num))),
        Some(d) => {
            let den: BigInt = d.parse().expect("digits");
            if den.is_zero() {
                Some(Err(ParseErrorKind::ZeroDenominator))
            } else {
                Some(Ok(Sexpr::ratio(num, den)))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

/// True when `name` can be printed without `|...|` escapes and will read
/// back as the same symbol.
fn plain_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && name != "."
        && !name.starts_with('#')
        && !name.chars().any(|c| is_delimiter(c) || matches!(c, '|' | ':' | '\\' | '#'))
        && try_number(name).is_none()
}

fn write_symbol_part(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if plain_symbol_name(name) {
        f.write_str(name)
    } else {
        f.write_str("|")?;
        for c in name.chars() {
            if c == '|' || c == '\\' {
                write!(f, "\\{c}")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        f.write_str("|")
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Symbol { package, name } => {
                if package == DEFAULT_PACKAGE {
                    write_symbol_part(f, name)
                } else if package == "KEYWORD" {
                    f.write_str(":")?;
                    write_symbol_part(f, name)
                } else {
                    write_symbol_part(f, package)?;
                    f.write_str("::")?;
                    write_symbol_part(f, name)
                }
            }
            Sexpr::Integer(n) => write!(f, "{n}"),
            Sexpr::Ratio { num, den } => write!(f, "{num}/{den}"),
            Sexpr::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        write!(f, "\\{c}")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                f.write_str("\"")
            }
            Sexpr::Quote(inner) => write!(f, "'{inner}"),
            Sexpr::List { items, tail } => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                if let Some(t) = tail {
                    write!(f, " . {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}
