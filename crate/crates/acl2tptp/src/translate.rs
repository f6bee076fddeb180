//! Translation of classified terms into FOF formulas.
//!
//! Every formula becomes `<term> != nil` under a universal closure. Function
//! symbols are lowercased with `-` mapped to `_` (non-Prolog atoms are later
//! quoted by the printer), `EQUAL` maps to `acleq`, and a corpus-wide arity
//! table renames symbols that appear with more than one arity. Quoted
//! structured constants become a `cons` spine over `qsym_`-prefixed atoms.

use crate::fof::{FofExpr, FofFormula, FofTerm, Role};
use crate::sexpr::Sexpr;
use crate::term::{symbol_text, AclTerm, FnHead};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("symbol `{symbol}` used at arity {arity} is not in the arity table")]
    UnknownArity { symbol: String, arity: usize },
    #[error("quoted symbol `{symbol}` is not in the arity table")]
    UnknownQuotedSymbol { symbol: String },
    #[error("term still contains a lambda application")]
    LambdaInTerm,
}

/// Base TPTP spelling of a function or constant symbol, before arity
/// disambiguation: lowercase, `-` to `_`, with `EQUAL` renamed to `acleq`
/// so the special axioms can relate it to `=`.
pub fn base_atom(symbol: &str) -> String {
    if symbol == "EQUAL" {
        "acleq".to_string()
    } else {
        mangle_plain(symbol)
    }
}

fn mangle_plain(symbol: &str) -> String {
    symbol.to_lowercase().replace('-', "_")
}

/// Formula names reuse the plain mangling without the `EQUAL` special case.
pub fn mangle_formula_name(name: &str) -> String {
    mangle_plain(name)
}

/// Symbols whose spellings the fixed axiom block relies on. They are seeded
/// into every arity table so e.g. a unary use of `CONS` cannot capture the
/// atom `cons`.
const RESERVED: &[(&str, usize, &str)] = &[
    ("T", 0, "t"),
    ("NIL", 0, "nil"),
    ("EQUAL", 2, "acleq"),
    ("IF", 3, "if"),
    ("NOT", 1, "not"),
    ("IMPLIES", 2, "implies"),
    ("IFF", 2, "iff"),
    ("AND", 2, "and"),
    ("OR", 2, "or"),
    ("CONSP", 1, "consp"),
    ("CONS", 2, "cons"),
    ("CAR", 1, "car"),
    ("CDR", 1, "cdr"),
];

/// Corpus-wide renaming of `(symbol, arity)` pairs to final TPTP atoms.
///
/// The arity observed first in chronological order keeps the base name;
/// every other arity gets `_<arity>` appended, and any remaining collision
/// between distinct symbols is resolved by appending `_` until fresh.
#[derive(Debug, Clone, Default)]
pub struct ArityTable {
    by_symbol: HashMap<(String, usize), String>,
    used: HashMap<String, (String, usize)>,
    qsym: HashMap<String, String>,
    seen_symbols: HashSet<String>,
}

impl ArityTable {
    pub fn new() -> ArityTable {
        let mut t = ArityTable::default();
        for &(sym, arity, atom) in RESERVED {
            t.by_symbol.insert((sym.to_string(), arity), atom.to_string());
            t.used.insert(atom.to_string(), (sym.to_string(), arity));
            t.seen_symbols.insert(sym.to_string());
        }
        t
    }

    /// Build the table over a whole corpus, visiting formulas in
    /// chronological order and each term depth-first.
    pub fn build<'a>(terms: impl IntoIterator<Item = &'a AclTerm>) -> ArityTable {
        let mut t = ArityTable::new();
        for term in terms {
            t.register_term(term);
        }
        t
    }

    pub fn register_term(&mut self, term: &AclTerm) {
        match term {
            AclTerm::Var(_) | AclTerm::ConstNum(_) | AclTerm::ConstStr(_) => {}
            AclTerm::ConstSym(s) => self.register(s, 0),
            AclTerm::ConstQuoted(d) => self.register_quoted(d),
            AclTerm::App { head, args } => {
                match head {
                    FnHead::Name(f) => self.register(f, args.len()),
                    FnHead::Lambda { body, .. } => self.register_term(body),
                }
                for a in args {
                    self.register_term(a);
                }
            }
        }
    }

    fn register(&mut self, symbol: &str, arity: usize) {
        let key = (symbol.to_string(), arity);
        if self.by_symbol.contains_key(&key) {
            return;
        }
        let base = base_atom(symbol);
        let mut candidate = if self.seen_symbols.contains(symbol) {
            format!("{base}_{arity}")
        } else {
            base
        };
        while self.used.contains_key(&candidate) {
            candidate.push('_');
        }
        self.used.insert(candidate.clone(), key.clone());
        self.by_symbol.insert(key, candidate);
        self.seen_symbols.insert(symbol.to_string());
    }

    fn register_quoted(&mut self, datum: &Sexpr) {
        match datum {
            Sexpr::Symbol { package, name } => {
                let text = symbol_text(package, name);
                if text == "T" || text == "NIL" || self.qsym.contains_key(&text) {
                    return;
                }
                let mut candidate = format!("qsym_{}", mangle_plain(&text));
                while self.used.contains_key(&candidate) {
                    candidate.push('_');
                }
                self.used.insert(candidate.clone(), (format!("'{text}"), 0));
                self.qsym.insert(text, candidate);
            }
            Sexpr::Quote(inner) => {
                self.register_quoted(&Sexpr::symbol("QUOTE"));
                self.register_quoted(inner);
            }
            Sexpr::List { items, tail } => {
                for i in items {
                    self.register_quoted(i);
                }
                if let Some(t) = tail {
                    self.register_quoted(t);
                }
            }
            Sexpr::Integer(_) | Sexpr::Ratio { .. } | Sexpr::Str(_) => {}
        }
    }

    /// Final atom for a function or constant symbol at the given arity.
    pub fn atom(&self, symbol: &str, arity: usize) -> Result<&str, TranslateError> {
        self.by_symbol
            .get(&(symbol.to_string(), arity))
            .map(String::as_str)
            .ok_or_else(|| TranslateError::UnknownArity { symbol: symbol.to_string(), arity })
    }

    /// Atom for a symbol occurring inside quoted structured data.
    pub fn quoted_atom(&self, symbol: &str) -> Result<&str, TranslateError> {
        match symbol {
            "T" => Ok("t"),
            "NIL" => Ok("nil"),
            _ => self
                .qsym
                .get(symbol)
                .map(String::as_str)
                .ok_or_else(|| TranslateError::UnknownQuotedSymbol { symbol: symbol.to_string() }),
        }
    }

    /// All `(symbol, arity) -> atom` entries, for consistency checks.
    pub fn entries(&self) -> impl Iterator<Item = (&str, usize, &str)> {
        self.by_symbol.iter().map(|((s, a), atom)| (s.as_str(), *a, atom.as_str()))
    }

    /// True when every final atom is associated with exactly one
    /// `(symbol, arity)` pair.
    pub fn atoms_unambiguous(&self) -> bool {
        let mut seen: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
        for (s, a, atom) in self.entries() {
            if let Some(&(s0, a0)) = seen.get(atom) {
                if (s0, a0) != (s, a) {
                    return false;
                }
            }
            seen.insert(atom, (s, a));
        }
        for (sym, atom) in &self.qsym {
            if let Some(&(s0, _)) = seen.get(atom.as_str()) {
                if s0 != sym {
                    return false;
                }
            }
        }
        true
    }
}

/// Final printable spelling (quoted if necessary) for a symbol at an arity.
pub fn mangle_function(symbol: &str, arity: usize, table: &ArityTable) -> Result<String, TranslateError> {
    Ok(crate::fof::print_atom(table.atom(symbol, arity)?))
}

/// Per-formula variable renaming in first-occurrence order.
///
/// A source variable keeps `uppercase-first, - to _` when the result is a
/// well-formed fresh TPTP variable; otherwise it gets the next free
/// autogenerated name `V1`, `V2`, ...
#[derive(Debug, Default)]
pub struct VarMangler {
    map: HashMap<String, String>,
    used: HashSet<String>,
    order: Vec<String>,
    next_auto: usize,
}

fn well_formed_var(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarMangler {
    pub fn new() -> VarMangler {
        VarMangler::default()
    }

    pub fn get_or_assign(&mut self, source: &str) -> String {
        if let Some(v) = self.map.get(source) {
            return v.clone();
        }
        let mut candidate: String = source.replace('-', "_");
        if let Some(first) = candidate.get(0..1) {
            let upper = first.to_ascii_uppercase();
            candidate.replace_range(0..1, &upper);
        }
        if !well_formed_var(&candidate) || self.used.contains(&candidate) {
            loop {
                self.next_auto += 1;
                candidate = format!("V{}", self.next_auto);
                if !self.used.contains(&candidate) {
                    break;
                }
            }
        }
        self.used.insert(candidate.clone());
        self.map.insert(source.to_string(), candidate.clone());
        self.order.push(candidate.clone());
        candidate
    }

    /// Assigned names in first-occurrence order: the quantifier prefix.
    pub fn ordered(&self) -> &[String] {
        &self.order
    }
}

/// Standalone variable mangling against an explicit used set, mirroring
/// [`VarMangler`] for single lookups.
pub fn mangle_variable(symbol: &str, used: &HashSet<String>) -> String {
    let mut m = VarMangler::new();
    m.used = used.clone();
    m.get_or_assign(symbol)
}

fn quoted_datum_term(datum: &Sexpr, table: &ArityTable) -> Result<FofTerm, TranslateError> {
    let cons = || -> Result<String, TranslateError> { Ok(table.atom("CONS", 2)?.to_string()) };
    match datum {
        Sexpr::Symbol { package, name } => {
            Ok(FofTerm::constant(table.quoted_atom(&symbol_text(package, name))?))
        }
        Sexpr::Integer(n) => Ok(FofTerm::constant(&n.to_string())),
        Sexpr::Ratio { num, den } => Ok(FofTerm::constant(&format!("{num}/{den}"))),
        Sexpr::Str(s) => Ok(FofTerm::constant(s)),
        Sexpr::Quote(inner) => {
            // 'x inside quoted data is the two-element list (QUOTE x)
            let q = FofTerm::constant(table.quoted_atom("QUOTE")?);
            let x = quoted_datum_term(inner, table)?;
            let nil = FofTerm::constant("nil");
            let tail = FofTerm::Fun(cons()?, vec![x, nil]);
            Ok(FofTerm::Fun(cons()?, vec![q, tail]))
        }
        Sexpr::List { items, tail } => {
            let mut acc = match tail {
                Some(t) => quoted_datum_term(t, table)?,
                None => FofTerm::constant("nil"),
            };
            for item in items.iter().rev() {
                acc = FofTerm::Fun(cons()?, vec![quoted_datum_term(item, table)?, acc]);
            }
            Ok(acc)
        }
    }
}

fn term_to_fof(
    term: &AclTerm,
    table: &ArityTable,
    vars: &mut VarMangler,
) -> Result<FofTerm, TranslateError> {
    match term {
        AclTerm::Var(v) => Ok(FofTerm::Var(vars.get_or_assign(v))),
        AclTerm::ConstSym(s) => Ok(FofTerm::constant(table.atom(s, 0)?)),
        AclTerm::ConstNum(n) => Ok(FofTerm::constant(&n.atom_text())),
        AclTerm::ConstStr(s) => Ok(FofTerm::constant(s)),
        AclTerm::ConstQuoted(d) => quoted_datum_term(d, table),
        AclTerm::App { head: FnHead::Name(f), args } => {
            let atom = table.atom(f, args.len())?.to_string();
            let args =
                args.iter().map(|a| term_to_fof(a, table, vars)).collect::<Result<Vec<_>, _>>()?;
            Ok(FofTerm::Fun(atom, args))
        }
        AclTerm::App { head: FnHead::Lambda { .. }, .. } => Err(TranslateError::LambdaInTerm),
    }
}

/// Translate a lambda-free term into the closed formula
/// `! [vars] : <term'> != nil` with the given name and role.
pub fn translate(
    name: &str,
    role: Role,
    term: &AclTerm,
    table: &ArityTable,
) -> Result<FofFormula, TranslateError> {
    let mut vars = VarMangler::new();
    let lhs = term_to_fof(term, table, &mut vars)?;
    let atom = FofExpr::Neq(lhs, FofTerm::constant("nil"));
    let body = if vars.ordered().is_empty() {
        atom
    } else {
        FofExpr::Forall(vars.ordered().to_vec(), Box::new(atom))
    };
    Ok(FofFormula::new(&mangle_formula_name(name), role, body))
}

// ---------------------------------------------------------------------------
// The fixed axiom block

/// The axiom block prepended to every problem, spelled exactly as published.
pub const SPECIAL_AXIOMS_TEXT: &str = "\
fof(spcax1,axiom, t != nil).
fof(spcax2,axiom, ! [X,Y]: ((X = Y) <=> acleq(X,Y) = t)).
fof(spcax3,axiom, ! [X,Y]: ((X != Y) <=> acleq(X,Y) = nil)).
fof(spcax4,axiom, ! [B,C]: (if(nil,B,C) = C)).
fof(spcax5,axiom, ! [A,B,C]: ((A != nil) => if(A,B,C) = B)).
fof(spcax6,axiom, ! [A]: (not(A) = if(A, nil, t))).
fof(spcax7,axiom, ! [P,Q]: (implies(P,Q) = if(P,if(Q,t,nil),t))).
fof(spcax8,axiom, ! [P,Q]: (iff(P,Q) = and(implies(P,Q),implies(Q,P)))).
fof(and,axiom, ! [A,B]: (and(A,B) = if(A,B,nil))).
fof(or,axiom, ! [A,B]: or(A,B) = if(A,A,B)).
fof(consp1, axiom, ! [A,B]: acleq(consp(cons(A,B)),t) != nil).
fof(consp2, axiom, ! [X]: or(acleq(consp(X),t),acleq(consp(X),nil)) != nil).
fof(consp3, axiom, ! [X]: implies(consp(X),acleq(cons(car(X),cdr(X)),X)) != nil).
";

/// The 13 axioms defining the primitives, as parsed formulas.
pub fn special_axioms() -> Vec<FofFormula> {
    crate::fof::parse_fof_file(SPECIAL_AXIOMS_TEXT)
        .expect("the special axiom block is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fof::print_fof;
    use crate::sexpr::parse_one;
    use crate::term::to_term;

    fn table_for(texts: &[&str]) -> (Vec<AclTerm>, ArityTable) {
        let terms: Vec<AclTerm> =
            texts.iter().map(|t| to_term(&parse_one(t).unwrap()).unwrap()).collect();
        let table = ArityTable::build(terms.iter());
        (terms, table)
    }

    #[test]
    fn thirteen_special_axioms() {
        let axioms = special_axioms();
        assert_eq!(axioms.len(), 13);
        assert_eq!(axioms[0].name, "spcax1");
        assert_eq!(print_fof(&axioms[0]), "fof(spcax1,axiom,(t != nil)).");
        // fourth element is the if-nil rule
        assert_eq!(
            print_fof(&axioms[3]),
            "fof(spcax4,axiom,(! [B,C] : if(nil,B,C) = C))."
        );
        assert!(axioms.iter().all(|a| a.is_closed()));
    }

    #[test]
    fn cdr_cons_matches_paper() {
        let (terms, table) = table_for(&["(EQUAL (CDR (CONS X Y)) Y)"]);
        let f = translate("CDR-CONS", Role::Axiom, &terms[0], &table).unwrap();
        assert_eq!(
            print_fof(&f),
            "fof(cdr_cons,axiom,(! [X,Y] : acleq(cdr(cons(X,Y)),Y) != nil))."
        );
    }

    #[test]
    fn function_mangling() {
        let (_, table) =
            table_for(&["(E0-ORD-< (CDR X) Y)", "(< X Y)", "(BINARY-+ X Y)"]);
        assert_eq!(mangle_function("CDR", 1, &table).unwrap(), "cdr");
        assert_eq!(mangle_function("E0-ORD-<", 2, &table).unwrap(), "'e0_ord_<'");
        assert_eq!(mangle_function("<", 2, &table).unwrap(), "'<'");
        assert_eq!(mangle_function("BINARY-+", 2, &table).unwrap(), "'binary_+'");
    }

    #[test]
    fn arity_disambiguation() {
        // F first at arity 1, then at arity 2
        let (_, table) = table_for(&["(G (F X) (F X Y))"]);
        assert_eq!(table.atom("F", 1).unwrap(), "f");
        assert_eq!(table.atom("F", 2).unwrap(), "f_2");
        // a distinct symbol already owning f_2 pushes the suffix further
        let (_, table) = table_for(&["(G (F_2 X) (F X) (F X Y))"]);
        assert_eq!(table.atom("F_2", 1).unwrap(), "f_2");
        assert_eq!(table.atom("F", 2).unwrap(), "f_2_");
        assert!(table.atoms_unambiguous());
    }

    #[test]
    fn reserved_spellings_survive_other_arities() {
        let (_, table) = table_for(&["(CONS X Y Z)", "(CONS X Y)"]);
        assert_eq!(table.atom("CONS", 2).unwrap(), "cons");
        assert_eq!(table.atom("CONS", 3).unwrap(), "cons_3");
        // a quoted use of a function symbol is just the arity-0 case
        let (_, table) = table_for(&["(CAR (CONS 'CONS X))"]);
        assert_eq!(table.atom("CONS", 0).unwrap(), "cons_0");
    }

    #[test]
    fn variable_mangling() {
        let mut vars = VarMangler::new();
        assert_eq!(vars.get_or_assign("X"), "X");
        // unusable source syntax autogenerates
        assert_eq!(vars.get_or_assign("my var"), "V1");
        // collision with an existing mangled name autogenerates too
        assert_eq!(vars.get_or_assign("x"), "V2");
        assert_eq!(vars.get_or_assign("MY-VAR"), "MY_VAR");
        // consistent within the formula
        assert_eq!(vars.get_or_assign("X"), "X");
        assert_eq!(vars.ordered(), &["X", "V1", "V2", "MY_VAR"]);
    }

    #[test]
    fn quantifier_prefix_first_occurrence_order() {
        let (terms, table) = table_for(&["(EQUAL (CONS B A) (CONS B A))"]);
        let f = translate("X", Role::Axiom, &terms[0], &table).unwrap();
        assert_eq!(print_fof(&f), "fof(x,axiom,(! [B,A] : acleq(cons(B,A),cons(B,A)) != nil)).");
    }

    #[test]
    fn constants_and_quoted_data() {
        let (terms, table) = table_for(&["(EQUAL (CAR '(A B)) 'A)", "(F '-1 '1/2 \"hi\")"]);
        // a standalone quoted symbol is an arity-0 use of the symbol itself,
        // while symbols inside quoted structures get the qsym_ spelling
        let f = translate("Q", Role::Axiom, &terms[0], &table).unwrap();
        assert_eq!(
            print_fof(&f),
            "fof(q,axiom,(acleq(car(cons(qsym_a,cons(qsym_b,nil))),a) != nil))."
        );
        let f = translate("C", Role::Axiom, &terms[1], &table).unwrap();
        assert_eq!(print_fof(&f), "fof(c,axiom,(f('-1','1/2',hi) != nil)).");
    }

    #[test]
    fn unmapped_arity_is_an_error() {
        let (terms, _) = table_for(&["(F X)"]);
        let empty = ArityTable::new();
        assert!(matches!(
            translate("F", Role::Axiom, &terms[0], &empty),
            Err(TranslateError::UnknownArity { .. })
        ));
    }

    #[test]
    fn eq_refl_spec_example() {
        let (terms, table) = table_for(&["(EQUAL X X)"]);
        let f = translate("EQ-REFL", Role::Axiom, &terms[0], &table).unwrap();
        assert_eq!(print_fof(&f), "fof(eq_refl,axiom,(! [X] : acleq(X,X) != nil)).");
    }
}
