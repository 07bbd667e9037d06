//! Prefix-notation parsing and printing for both formula languages.
//!
//! Both languages use fully parenthesized prefix syntax:
//!
//! ```text
//! fo := (< v v) | (= v v) | (P v) | (! fo) | (& fo fo) | (| fo fo)
//!     | (E v fo) | (A v fo)
//! tl := atom | TRUE | FALSE | (! tl) | (& tl tl) | (| tl tl)
//!     | (U tl tl) | (S tl tl) | (Us tl tl) | (Ss tl tl) | derived
//! ```
//!
//! Derived temporal operators (`BOX`, `BOXPAST`, `KPLUS`, `KMINUS`, `GAMMA+`,
//! `GAMMA-`, `USTAR`, `SSTAR`, `UGAP`, `SGAP`) are expanded into the four
//! primitive modalities while parsing, so the formula values never contain
//! them. The printers emit primitives only; n-ary connectives are re-nested
//! to the right, and printing then re-parsing reproduces the input formula.

use std::fmt;

use crate::logic::fo::FoFormula;
use crate::logic::tl::{self, TlFormula, TlNode};
use crate::translate;

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Sym(char),
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Sym(c) => write!(f, "'{}'", c),
            Tok::Ident(s) => write!(f, "'{}'", s),
        }
    }
}

// Identifiers are [A-Za-z_][A-Za-z0-9_+-]*; '+' and '-' are allowed so that
// GAMMA+ and GAMMA- lex as single tokens.
fn lex(src: &str) -> Result<(Vec<(Tok, usize, usize)>, (usize, usize)), ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                it.next();
                line += 1;
                col = 1;
            }
            _ if c.is_whitespace() => {
                it.next();
                col += 1;
            }
            '(' => {
                it.next();
                col += 1;
                toks.push((Tok::LParen, l0, c0));
            }
            ')' => {
                it.next();
                col += 1;
                toks.push((Tok::RParen, l0, c0));
            }
            '&' | '|' | '!' | '<' | '=' => {
                it.next();
                col += 1;
                toks.push((Tok::Sym(c), l0, c0));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '+' || d == '-' {
                        s.push(d);
                        it.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(s), l0, c0));
            }
            _ => {
                return Err(ParseError {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character '{}'", c),
                })
            }
        }
    }
    Ok((toks, (line, col)))
}

struct Cursor {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    eof: (usize, usize),
}

impl Cursor {
    fn new(src: &str) -> Result<Cursor, ParseError> {
        let (toks, eof) = lex(src)?;
        Ok(Cursor { toks, pos: 0, eof })
    }

    fn next(&mut self) -> Option<(Tok, usize, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, pos: Option<(usize, usize)>, msg: String) -> ParseError {
        let (line, col) = pos.unwrap_or(self.eof);
        ParseError { line, col, msg }
    }

    fn take(&mut self, what: &str) -> Result<(Tok, usize, usize), ParseError> {
        self.next()
            .ok_or_else(|| self.err_at(None, format!("expected {}, found end of input", what)))
    }

    fn rparen(&mut self) -> Result<(), ParseError> {
        match self.take("')'")? {
            (Tok::RParen, _, _) => Ok(()),
            (t, l, c) => Err(self.err_at(Some((l, c)), format!("expected ')', found {}", t))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.take(what)? {
            (Tok::Ident(s), _, _) => Ok(s),
            (t, l, c) => Err(self.err_at(Some((l, c)), format!("expected {}, found {}", what, t))),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.next() {
            None => Ok(()),
            Some((t, l, c)) => {
                Err(self.err_at(Some((l, c)), format!("trailing input starting with {}", t)))
            }
        }
    }
}

fn parse_tl_form(cur: &mut Cursor) -> Result<TlFormula, ParseError> {
    match cur.take("a formula")? {
        (Tok::Ident(s), _, _) => Ok(match s.as_str() {
            "TRUE" => tl::tt(),
            "FALSE" => tl::ff(),
            _ => tl::atom(&s),
        }),
        (Tok::LParen, _, _) => {
            let form = match cur.take("an operator")? {
                (Tok::Sym('!'), _, _) => {
                    let f = parse_tl_form(cur)?;
                    tl::not(&f)
                }
                (Tok::Sym('&'), _, _) => {
                    let a = parse_tl_form(cur)?;
                    let b = parse_tl_form(cur)?;
                    tl::and2(&a, &b)
                }
                (Tok::Sym('|'), _, _) => {
                    let a = parse_tl_form(cur)?;
                    let b = parse_tl_form(cur)?;
                    tl::or2(&a, &b)
                }
                (Tok::Ident(op), l, c) => match op.as_str() {
                    "U" | "S" | "Us" | "Ss" => {
                        let p = parse_tl_form(cur)?;
                        let q = parse_tl_form(cur)?;
                        match op.as_str() {
                            "U" => tl::until(&p, &q),
                            "S" => tl::since(&p, &q),
                            "Us" => tl::until_s(&p, &q),
                            _ => tl::since_s(&p, &q),
                        }
                    }
                    _ => match translate::derived_arity(&op) {
                        Some(arity) => {
                            let mut args = Vec::with_capacity(arity);
                            for _ in 0..arity {
                                args.push(parse_tl_form(cur)?);
                            }
                            translate::expand(&op, &args).expect("arity checked")
                        }
                        None => {
                            return Err(
                                cur.err_at(Some((l, c)), format!("unknown operator '{}'", op))
                            )
                        }
                    },
                },
                (t, l, c) => {
                    return Err(cur.err_at(Some((l, c)), format!("expected an operator, found {}", t)))
                }
            };
            cur.rparen()?;
            Ok(form)
        }
        (t, l, c) => Err(cur.err_at(Some((l, c)), format!("expected a formula, found {}", t))),
    }
}

fn parse_fo_form(cur: &mut Cursor) -> Result<FoFormula, ParseError> {
    match cur.take("a formula")? {
        (Tok::LParen, _, _) => {
            let form = match cur.take("an operator")? {
                (Tok::Sym(op @ ('<' | '=')), _, _) => {
                    let a = cur.ident("a variable")?;
                    let b = cur.ident("a variable")?;
                    if op == '<' {
                        FoFormula::Less(a, b)
                    } else {
                        FoFormula::Equal(a, b)
                    }
                }
                (Tok::Sym('!'), _, _) => FoFormula::Not(Box::new(parse_fo_form(cur)?)),
                (Tok::Sym(op @ ('&' | '|')), _, _) => {
                    let a = Box::new(parse_fo_form(cur)?);
                    let b = Box::new(parse_fo_form(cur)?);
                    if op == '&' {
                        FoFormula::And(a, b)
                    } else {
                        FoFormula::Or(a, b)
                    }
                }
                (Tok::Ident(s), _, _) if s == "E" || s == "A" => {
                    let v = cur.ident("a variable")?;
                    let body = Box::new(parse_fo_form(cur)?);
                    if s == "E" {
                        FoFormula::Exists(v, body)
                    } else {
                        FoFormula::Forall(v, body)
                    }
                }
                (Tok::Ident(p), _, _) => {
                    let v = cur.ident("a variable")?;
                    FoFormula::Pred(p, v)
                }
                (t, l, c) => {
                    return Err(cur.err_at(Some((l, c)), format!("expected an operator, found {}", t)))
                }
            };
            cur.rparen()?;
            Ok(form)
        }
        (t, l, c) => Err(cur.err_at(Some((l, c)), format!("expected '(', found {}", t))),
    }
}

/// Parses a temporal formula; derived operators are expanded away.
pub fn parse_tl(src: &str) -> Result<TlFormula, ParseError> {
    let mut cur = Cursor::new(src)?;
    let f = parse_tl_form(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

/// Parses a first-order formula.
pub fn parse_fo(src: &str) -> Result<FoFormula, ParseError> {
    let mut cur = Cursor::new(src)?;
    let f = parse_fo_form(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn write_tl(f: &TlFormula, out: &mut String) {
    match f.node() {
        TlNode::True => out.push_str("TRUE"),
        TlNode::False => out.push_str("FALSE"),
        TlNode::Atom(a) => out.push_str(a),
        TlNode::Not(g) => {
            out.push_str("(! ");
            write_tl(g, out);
            out.push(')');
        }
        TlNode::And(gs) => write_nary('&', gs, out),
        TlNode::Or(gs) => write_nary('|', gs, out),
        TlNode::Until(p, q) => write_binary("U", p, q, out),
        TlNode::Since(p, q) => write_binary("S", p, q, out),
        TlNode::UntilS(p, q) => write_binary("Us", p, q, out),
        TlNode::SinceS(p, q) => write_binary("Ss", p, q, out),
    }
}

fn write_binary(op: &str, p: &TlFormula, q: &TlFormula, out: &mut String) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    write_tl(p, out);
    out.push(' ');
    write_tl(q, out);
    out.push(')');
}

fn write_nary(op: char, gs: &[TlFormula], out: &mut String) {
    // [a, b, c] prints as (& a (& b c)); the parser flattens it back.
    for g in &gs[..gs.len() - 1] {
        out.push('(');
        out.push(op);
        out.push(' ');
        write_tl(g, out);
        out.push(' ');
    }
    write_tl(&gs[gs.len() - 1], out);
    for _ in 0..gs.len() - 1 {
        out.push(')');
    }
}

/// Renders a temporal formula in the prefix syntax.
pub fn print_tl(f: &TlFormula) -> String {
    let mut out = String::new();
    write_tl(f, &mut out);
    out
}

fn write_fo(f: &FoFormula, out: &mut String) {
    match f {
        FoFormula::Less(a, b) => {
            out.push_str("(< ");
            out.push_str(a);
            out.push(' ');
            out.push_str(b);
            out.push(')');
        }
        FoFormula::Equal(a, b) => {
            out.push_str("(= ");
            out.push_str(a);
            out.push(' ');
            out.push_str(b);
            out.push(')');
        }
        FoFormula::Pred(p, x) => {
            out.push('(');
            out.push_str(p);
            out.push(' ');
            out.push_str(x);
            out.push(')');
        }
        FoFormula::Not(g) => {
            out.push_str("(! ");
            write_fo(g, out);
            out.push(')');
        }
        FoFormula::And(a, b) | FoFormula::Or(a, b) => {
            out.push('(');
            out.push(if matches!(f, FoFormula::And(_, _)) { '&' } else { '|' });
            out.push(' ');
            write_fo(a, out);
            out.push(' ');
            write_fo(b, out);
            out.push(')');
        }
        FoFormula::Exists(v, g) | FoFormula::Forall(v, g) => {
            out.push('(');
            out.push(if matches!(f, FoFormula::Exists(_, _)) { 'E' } else { 'A' });
            out.push(' ');
            out.push_str(v);
            out.push(' ');
            write_fo(g, out);
            out.push(')');
        }
    }
}

/// Renders a first-order formula in the prefix syntax.
pub fn print_fo(f: &FoFormula) -> String {
    let mut out = String::new();
    write_fo(f, &mut out);
    out
}

impl fmt::Display for TlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_tl(self))
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_fo(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fo;
    use proptest::prelude::*;

    #[test]
    fn parses_primitives() {
        let f = parse_tl("(U P (& Q (! R)))").unwrap();
        assert_eq!(
            f,
            tl::until(&tl::atom("P"), &tl::and2(&tl::atom("Q"), &tl::not(&tl::atom("R"))))
        );
        assert_eq!(parse_tl("TRUE").unwrap(), tl::tt());
    }

    #[test]
    fn box_expands_at_parse_time() {
        let f = parse_tl("(BOX P)").unwrap();
        assert_eq!(f, tl::not(&tl::until(&tl::tt(), &tl::not(&tl::atom("P")))));
    }

    #[test]
    fn parses_fo() {
        let f = parse_fo("(E y (& (< x y) (P y)))").unwrap();
        assert_eq!(
            f,
            fo::fo_exists("y", fo::fo_and(fo::fo_less("x", "y"), fo::fo_pred("P", "y")))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_tl("(U P").unwrap_err();
        assert!(e.msg.contains("end of input"), "{}", e);
        let e = parse_tl("(Frob P)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
        let e = parse_fo("(< x)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        let e = parse_tl("(U P Q) junk").unwrap_err();
        assert!(e.msg.contains("trailing"), "{}", e);
    }

    #[test]
    fn nary_prints_right_nested() {
        let f = tl::and(vec![tl::atom("P"), tl::atom("Q"), tl::atom("R")]);
        assert_eq!(print_tl(&f), "(& P (& Q R))");
        assert_eq!(parse_tl(&print_tl(&f)).unwrap(), f);
    }

    fn arb_tl() -> impl Strategy<Value = TlFormula> {
        let leaf = prop_oneof![
            Just(tl::tt()),
            Just(tl::ff()),
            prop_oneof![Just("P"), Just("Q"), Just("R")].prop_map(tl::atom),
        ];
        leaf.prop_recursive(5, 48, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| tl::not(&f)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| tl::and2(&a, &b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| tl::or2(&a, &b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| tl::until(&a, &b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| tl::since(&a, &b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| tl::until_s(&a, &b)),
                (inner, inner_since_s())
                    .prop_map(|(a, b)| tl::since_s(&a, &b)),
            ]
        })
    }

    // Small second operand pool for SinceS keeps the recursive strategy simple.
    fn inner_since_s() -> impl Strategy<Value = TlFormula> {
        prop_oneof![Just(tl::atom("P")), Just(tl::atom("Q"))]
    }

    fn arb_fo() -> impl Strategy<Value = FoFormula> {
        let var = prop_oneof![Just("x"), Just("y"), Just("z")];
        let leaf = prop_oneof![
            (var.clone(), var.clone()).prop_map(|(a, b)| fo::fo_less(a, b)),
            (var.clone(), var.clone()).prop_map(|(a, b)| fo::fo_equal(a, b)),
            (prop_oneof![Just("P"), Just("Q")], var.clone()).prop_map(|(p, v)| fo::fo_pred(p, v)),
        ];
        leaf.prop_recursive(4, 32, 3, move |inner| {
            prop_oneof![
                inner.clone().prop_map(fo::fo_not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| fo::fo_and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| fo::fo_or(a, b)),
                (var.clone(), inner.clone()).prop_map(|(v, f)| fo::fo_exists(v, f)),
                (var.clone(), inner).prop_map(|(v, f)| fo::fo_forall(v, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn tl_print_parse_round_trip(f in arb_tl()) {
            prop_assert_eq!(parse_tl(&print_tl(&f)).unwrap(), f);
        }

        #[test]
        fn fo_print_parse_round_trip(f in arb_fo()) {
            prop_assert_eq!(parse_fo(&print_fo(&f)).unwrap(), f);
        }

        #[test]
        fn mirror_round_trips_through_text(f in arb_tl()) {
            let m = tl::mirror_tl(&f);
            prop_assert_eq!(tl::mirror_tl(&m), f);
            prop_assert_eq!(parse_tl(&print_tl(&m)).unwrap(), m);
        }
    }
}
