//! Classification of S-expressions into logical terms, and lambda removal.
//!
//! A bare symbol in argument position is a variable, `T` and `NIL` are
//! constants even unquoted, everything quoted is a constant, and a list
//! applies its head symbol (or an inline lambda) to the remaining elements.

use crate::sexpr::{Sexpr, DEFAULT_PACKAGE};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

/// An integer or reduced ratio constant. Each distinct numeric literal is
/// later encoded as its own TPTP constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Number {
    Int(BigInt),
    Ratio { num: BigInt, den: BigInt },
}

impl Number {
    /// The TPTP atom content for this literal: `5`, `-1`, `1/2`, ...
    pub fn atom_text(&self) -> String {
        match self {
            Number::Int(n) => n.to_string(),
            Number::Ratio { num, den } => format!("{num}/{den}"),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.atom_text())
    }
}

/// Head of an application: a named function symbol, or an inline lambda
/// kept around until [`remove_lambdas`] runs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FnHead {
    Name(String),
    Lambda { params: Vec<String>, body: Box<AclTerm> },
}

/// A classified ACL2 term; lambda-free after [`remove_lambdas`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AclTerm {
    Var(String),
    ConstSym(String),
    ConstNum(Number),
    ConstStr(String),
    /// Quoted structured datum (list or nested quote), kept verbatim.
    ConstQuoted(Sexpr),
    App { head: FnHead, args: Vec<AclTerm> },
}

impl AclTerm {
    pub fn var(name: &str) -> AclTerm {
        AclTerm::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<AclTerm>) -> AclTerm {
        AclTerm::App { head: FnHead::Name(name.to_string()), args }
    }

    pub fn int(value: i64) -> AclTerm {
        AclTerm::ConstNum(Number::Int(BigInt::from(value)))
    }

    /// True when no lambda head occurs anywhere in the term.
    pub fn is_lambda_free(&self) -> bool {
        match self {
            AclTerm::App { head, args } => {
                let head_ok = match head {
                    FnHead::Name(_) => true,
                    FnHead::Lambda { .. } => false,
                };
                head_ok && args.iter().all(|a| a.is_lambda_free())
            }
            _ => true,
        }
    }

    /// All variable names occurring in the term, with lambda parameters
    /// treated as binders.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &AclTerm, out: &mut BTreeSet<String>) {
            match t {
                AclTerm::Var(v) => {
                    out.insert(v.clone());
                }
                AclTerm::App { head, args } => {
                    if let FnHead::Lambda { params, body } = head {
                        let mut inner = BTreeSet::new();
                        go(body, &mut inner);
                        for p in params {
                            inner.remove(p);
                        }
                        out.extend(inner);
                    }
                    for a in args {
                        go(a, out);
                    }
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
}

/// Rendering of a symbol used throughout the pipeline: bare name for the
/// default package, `:NAME` for keywords, `PKG::NAME` otherwise.
pub fn symbol_text(package: &str, name: &str) -> String {
    if package == DEFAULT_PACKAGE {
        name.to_string()
    } else if package == "KEYWORD" {
        format!(":{name}")
    } else {
        format!("{package}::{name}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("malformed term ({reason}): {subtree}")]
    MalformedTerm { reason: String, subtree: Sexpr },
    #[error("lambda applied to {got} arguments but binds {expected}")]
    LambdaArity { expected: usize, got: usize },
}

fn malformed(reason: &str, subtree: &Sexpr) -> TermError {
    TermError::MalformedTerm { reason: reason.to_string(), subtree: subtree.clone() }
}

/// Classify a macro-expanded formula body into a term.
pub fn to_term(datum: &Sexpr) -> Result<AclTerm, TermError> {
    match datum {
        Sexpr::Symbol { package, name } => {
            if package == DEFAULT_PACKAGE && (name == "T" || name == "NIL") {
                Ok(AclTerm::ConstSym(name.clone()))
            } else {
                Ok(AclTerm::Var(symbol_text(package, name)))
            }
        }
        Sexpr::Integer(n) => Ok(AclTerm::ConstNum(Number::Int(n.clone()))),
        Sexpr::Ratio { num, den } => {
            Ok(AclTerm::ConstNum(Number::Ratio { num: num.clone(), den: den.clone() }))
        }
        Sexpr::Str(s) => Ok(AclTerm::ConstStr(s.clone())),
        Sexpr::Quote(inner) => Ok(quoted_to_const(inner)),
        Sexpr::List { items, tail } => {
            if tail.is_some() {
                return Err(malformed("dotted list in application position", datum));
            }
            let head = items.first().ok_or_else(|| malformed("empty application", datum))?;
            match head {
                Sexpr::Symbol { package, name }
                    if package == DEFAULT_PACKAGE && name == "QUOTE" && items.len() == 2 =>
                {
                    Ok(quoted_to_const(&items[1]))
                }
                Sexpr::Symbol { package, name } => {
                    if package == DEFAULT_PACKAGE && name == "LAMBDA" {
                        return Err(malformed("bare lambda is not a term", datum));
                    }
                    let args = items[1..].iter().map(to_term).collect::<Result<Vec<_>, _>>()?;
                    Ok(AclTerm::App { head: FnHead::Name(symbol_text(package, name)), args })
                }
                Sexpr::List { .. } => {
                    let lambda = parse_lambda(head)?;
                    let args = items[1..].iter().map(to_term).collect::<Result<Vec<_>, _>>()?;
                    Ok(AclTerm::App { head: lambda, args })
                }
                _ => Err(malformed("application head is not a function symbol", datum)),
            }
        }
    }
}

fn quoted_to_const(inner: &Sexpr) -> AclTerm {
    match inner {
        Sexpr::Integer(n) => AclTerm::ConstNum(Number::Int(n.clone())),
        Sexpr::Ratio { num, den } => {
            AclTerm::ConstNum(Number::Ratio { num: num.clone(), den: den.clone() })
        }
        Sexpr::Str(s) => AclTerm::ConstStr(s.clone()),
        Sexpr::Symbol { package, name } => AclTerm::ConstSym(symbol_text(package, name)),
        Sexpr::Quote(_) | Sexpr::List { .. } => AclTerm::ConstQuoted(inner.clone()),
    }
}

fn parse_lambda(head: &Sexpr) -> Result<FnHead, TermError> {
    let items = match head {
        Sexpr::List { items, tail: None } => items,
        _ => return Err(malformed("malformed lambda", head)),
    };
    let ok_head = items.first().map(|h| h.is_symbol(DEFAULT_PACKAGE, "LAMBDA")).unwrap_or(false);
    if !ok_head || items.len() != 3 {
        return Err(malformed("malformed lambda", head));
    }
    let params = lambda_params(&items[1])?;
    let body = to_term(&items[2])?;
    Ok(FnHead::Lambda { params, body: Box::new(body) })
}

fn lambda_params(datum: &Sexpr) -> Result<Vec<String>, TermError> {
    if datum.is_nil() {
        return Ok(Vec::new());
    }
    let items = match datum {
        Sexpr::List { items, tail: None } => items,
        _ => return Err(malformed("lambda parameter list", datum)),
    };
    items
        .iter()
        .map(|p| match p {
            Sexpr::Symbol { package, name }
                if !(package == DEFAULT_PACKAGE && (name == "T" || name == "NIL")) =>
            {
                Ok(symbol_text(package, name))
            }
            _ => Err(malformed("lambda parameter", p)),
        })
        .collect()
}

/// Beta-reduce every lambda application, innermost first. Each lambda is
/// closed over its formals, so replacing variables in the (already
/// lambda-free) body is capture-free.
pub fn remove_lambdas(term: &AclTerm) -> Result<AclTerm, TermError> {
    match term {
        AclTerm::Var(_)
        | AclTerm::ConstSym(_)
        | AclTerm::ConstNum(_)
        | AclTerm::ConstStr(_)
        | AclTerm::ConstQuoted(_) => Ok(term.clone()),
        AclTerm::App { head: FnHead::Name(f), args } => {
            let args = args.iter().map(remove_lambdas).collect::<Result<Vec<_>, _>>()?;
            Ok(AclTerm::App { head: FnHead::Name(f.clone()), args })
        }
        AclTerm::App { head: FnHead::Lambda { params, body }, args } => {
            if params.len() != args.len() {
                return Err(TermError::LambdaArity { expected: params.len(), got: args.len() });
            }
            let args = args.iter().map(remove_lambdas).collect::<Result<Vec<_>, _>>()?;
            let body = remove_lambdas(body)?;
            let subst: BTreeMap<&str, &AclTerm> =
                params.iter().map(String::as_str).zip(args.iter()).collect();
            Ok(substitute(&body, &subst))
        }
    }
}

/// Simultaneous replacement of variables in a lambda-free term.
fn substitute(term: &AclTerm, subst: &BTreeMap<&str, &AclTerm>) -> AclTerm {
    match term {
        AclTerm::Var(v) => subst.get(v.as_str()).map(|t| (*t).clone()).unwrap_or_else(|| term.clone()),
        AclTerm::App { head, args } => AclTerm::App {
            head: head.clone(),
            args: args.iter().map(|a| substitute(a, subst)).collect(),
        },
        _ => term.clone(),
    }
}
