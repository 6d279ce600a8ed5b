//! Concrete syntax.
//!
//! ```text
//! term  ::= lam | app
//! lam   ::= '[' names ']' term '->' term
//! names ::= ε | name (',' name)*
//! app   ::= app atom | app '@' atom | atom
//! atom  ::= name | '^' name | '#bot' | '(' term ')' | atom '[' names ';' match ';' delta ']'
//! match ::= '#fail' | '{' (name ':=' term (',' name ':=' term)*)? '}'
//! delta ::= ε | '(' term '~' term ')' (',' '(' term '~' term ')')*
//! ```
//!
//! Juxtaposition is functional application, `@` structural application.
//! Pairs are written `(argument ~ pattern)`. The partial-substitution
//! variant writes its record as a name list `{x, y}` instead of a
//! substitution.

use std::collections::BTreeSet;
use std::fmt;

use crate::name::Name;
use crate::term::{Bottom, DecidedMatch, Delta, Record, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: unexpected {found}, expected one of: {}", expected.join(", "))]
    Unexpected {
        line: usize,
        col: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("{line}:{col}: invalid character {ch:?}")]
    Lexical { line: usize, col: usize, ch: char },
    #[error("{line}:{col}: name {name} bound twice")]
    DuplicateName { line: usize, col: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Unexpected { line, col, .. }
            | ParseError::Lexical { line, col, .. }
            | ParseError::DuplicateName { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LBrack,
    RBrack,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Arrow,
    At,
    Hat,
    Tilde,
    Assign,
    Fail,
    Bot,
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LBrack => "'['".into(),
            Tok::RBrack => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::At => "'@'".into(),
            Tok::Hat => "'^'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Assign => "':='".into(),
            Tok::Fail => "'#fail'".into(),
            Tok::Bot => "'#bot'".into(),
            Tok::Ident(s) => format!("name {s}"),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match c {
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '@' => (Tok::At, 1),
            '^' => (Tok::Hat, 1),
            '~' => (Tok::Tilde, 1),
            '-' if two == "->" => (Tok::Arrow, 2),
            ':' if two == ":=" => (Tok::Assign, 2),
            '#' => {
                let word: String = chars[i + 1..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric())
                    .collect();
                match word.as_str() {
                    "fail" => (Tok::Fail, 5),
                    "bot" => (Tok::Bot, 4),
                    _ => return Err(ParseError::Lexical { line: l0, col: c0, ch: c }),
                }
            }
            'a'..='z' => {
                let word: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .collect();
                let n = word.chars().count();
                (Tok::Ident(word), n)
            }
            _ => return Err(ParseError::Lexical { line: l0, col: c0, ch: c }),
        };
        out.push(Spanned { tok, line: l0, col: c0 });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Concrete syntax of a matching record.
pub trait RecordSyntax: Record {
    fn parse_record(p: &mut Parser) -> Result<Self, ParseError>;
    fn fmt_record(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    bottom: Bottom,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError::Unexpected {
            line: s.line,
            col: s.col,
            found: s.tok.describe(),
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    pub fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Name::new(&s))
            }
            _ => Err(self.error(&["name"])),
        }
    }

    /// A comma-separated, possibly empty, duplicate-free name list ended by
    /// `close` (which is not consumed).
    fn name_list(&mut self, close: &Tok) -> Result<Vec<Name>, ParseError> {
        let mut names: Vec<Name> = Vec::new();
        if self.peek() == close {
            return Ok(names);
        }
        loop {
            let (line, col) = self.here();
            let n = self.name()?;
            if names.contains(&n) {
                return Err(ParseError::DuplicateName { line, col, name: n.to_string() });
            }
            names.push(n);
            if !self.eat(&Tok::Comma) {
                if self.peek() != close {
                    return Err(self.error(&["','", &close.describe()]));
                }
                return Ok(names);
            }
        }
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    pub fn term<M: RecordSyntax>(&mut self) -> Result<Term<M>, ParseError> {
        if self.eat(&Tok::LBrack) {
            let binders = self.name_list(&Tok::RBrack)?;
            self.expect(Tok::RBrack)?;
            let pattern = self.term()?;
            self.expect(Tok::Arrow)?;
            let body = self.term()?;
            return Ok(Term::case(binders, pattern, body));
        }
        let mut acc = self.atom()?;
        loop {
            if self.eat(&Tok::At) {
                let arg = self.atom()?;
                acc = Term::sapp(acc, arg);
            } else if self.starts_atom() {
                let arg = self.atom()?;
                acc = Term::app(acc, arg);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Hat | Tok::LParen | Tok::Bot)
    }

    fn atom<M: RecordSyntax>(&mut self) -> Result<Term<M>, ParseError> {
        let mut t = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Term::var(Name::new(&s))
            }
            Tok::Hat => {
                self.bump();
                Term::Matchable(self.name()?)
            }
            Tok::Bot => {
                self.bump();
                self.bottom.as_record()
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                t
            }
            _ => return Err(self.error(&["name", "'^'", "'('", "'#bot'", "'['"])),
        };
        while self.eat(&Tok::LBrack) {
            let binders = self.name_list(&Tok::Semi)?;
            self.expect(Tok::Semi)?;
            let record = M::parse_record(self)?;
            self.expect(Tok::Semi)?;
            let pending = self.delta()?;
            self.expect(Tok::RBrack)?;
            t = Term::matching(t, binders, record, pending);
        }
        Ok(t)
    }

    fn delta<M: RecordSyntax>(&mut self) -> Result<Delta<M>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == &Tok::RBrack {
            return Ok(out);
        }
        loop {
            if !self.eat(&Tok::LParen) {
                return Err(self.error(&["'('", "']'"]));
            }
            let a = self.term()?;
            self.expect(Tok::Tilde)?;
            let p = self.term()?;
            self.expect(Tok::RParen)?;
            out.push((a, p));
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

impl RecordSyntax for DecidedMatch {
    fn parse_record(p: &mut Parser) -> Result<Self, ParseError> {
        if p.eat(&Tok::Fail) {
            return Ok(DecidedMatch::Fail);
        }
        if !p.eat(&Tok::LBrace) {
            return Err(p.error(&["'#fail'", "'{'"]));
        }
        let mut s = Subst::new();
        if p.eat(&Tok::RBrace) {
            return Ok(DecidedMatch::Subst(s));
        }
        loop {
            let (line, col) = p.here();
            let x = p.name()?;
            p.expect(Tok::Assign)?;
            let v = p.term()?;
            if s.insert(x.clone(), v).is_some() {
                return Err(ParseError::DuplicateName { line, col, name: x.to_string() });
            }
            if p.eat(&Tok::RBrace) {
                return Ok(DecidedMatch::Subst(s));
            }
            if !p.eat(&Tok::Comma) {
                return Err(p.error(&["','", "'}'"]));
            }
        }
    }

    fn fmt_record(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecidedMatch::Fail => f.write_str("#fail"),
            DecidedMatch::Subst(s) => {
                f.write_str("{")?;
                for (i, (x, v)) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x} := {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Parse a set of names written `{x, y}`; used by records that only
/// remember names.
pub fn parse_name_set(p: &mut Parser) -> Result<BTreeSet<Name>, ParseError> {
    p.expect(Tok::LBrace)?;
    let names = p.name_list(&Tok::RBrace)?;
    p.expect(Tok::RBrace)?;
    Ok(names.into_iter().collect())
}

/// `#fail`, if present.
pub fn eat_fail(p: &mut Parser) -> bool {
    p.eat(&Tok::Fail)
}

pub fn parse(src: &str) -> Result<Term, ParseError> {
    parse_with(src, &Bottom::default())
}

pub fn parse_with<M: RecordSyntax>(src: &str, bottom: &Bottom) -> Result<Term<M>, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        bottom: bottom.clone(),
    };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

fn fmt_names(names: &[Name], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

fn fmt_term<M: RecordSyntax>(t: &Term<M>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Case(c) => {
            f.write_str("[")?;
            fmt_names(&c.binders, f)?;
            f.write_str("] ")?;
            if matches!(c.pattern, Term::Case(_)) {
                fmt_atom(&c.pattern, f)?;
            } else {
                fmt_term(&c.pattern, f)?;
            }
            f.write_str(" -> ")?;
            fmt_term(&c.body, f)
        }
        _ => fmt_app(t, f),
    }
}

fn fmt_app<M: RecordSyntax>(t: &Term<M>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::App(fun, arg) => {
            fmt_app(fun, f)?;
            f.write_str(" ")?;
            fmt_atom(arg, f)
        }
        Term::SApp(head, arg) => {
            fmt_app(head, f)?;
            f.write_str(" @ ")?;
            fmt_atom(arg, f)
        }
        _ => fmt_atom(t, f),
    }
}

fn fmt_atom<M: RecordSyntax>(t: &Term<M>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Matchable(x) => write!(f, "^{x}"),
        Term::Matching(m) => {
            fmt_atom(&m.body, f)?;
            f.write_str("[")?;
            fmt_names(&m.binders, f)?;
            f.write_str("; ")?;
            m.record.fmt_record(f)?;
            f.write_str(";")?;
            for (i, (a, p)) in m.pending.iter().enumerate() {
                f.write_str(if i == 0 { " (" } else { ", (" })?;
                fmt_term(a, f)?;
                f.write_str(" ~ ")?;
                fmt_term(p, f)?;
                f.write_str(")")?;
            }
            f.write_str("]")
        }
        _ => {
            f.write_str("(")?;
            fmt_term(t, f)?;
            f.write_str(")")
        }
    }
}

impl<M: RecordSyntax> fmt::Display for Term<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::alpha_equiv;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn case_with_constructor_pattern() {
        let t = parse("[x] ^c ^x -> x").unwrap();
        let expected = Term::case(
            vec![n("x")],
            Term::app(Term::matchable("c"), Term::matchable("x")),
            Term::var("x"),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn matching_suffix() {
        let t = parse("b [x ; {x := ^c} ; (t ~ z)]").unwrap();
        let Term::Matching(m) = &t else { panic!("not a matching: {t}") };
        assert_eq!(m.body, Term::var("b"));
        assert_eq!(m.binders, vec![n("x")]);
        assert_eq!(m.record.subst().unwrap()[&n("x")], Term::matchable("c"));
        assert_eq!(m.pending, vec![(Term::var("t"), Term::var("z"))]);
        assert_eq!(t.to_string(), "b[x; {x := ^c}; (t ~ z)]");
    }

    #[test]
    fn application_is_left_associative_and_mixes_bullets() {
        let t = parse("^c @ a b @ d").unwrap();
        let expected = Term::sapp(
            Term::app(Term::sapp(Term::matchable("c"), Term::var("a")), Term::var("b")),
            Term::var("d"),
        );
        assert_eq!(t, expected);
        assert_eq!(t.to_string(), "^c @ a b @ d");
    }

    #[test]
    fn printer_parenthesizes_minimally() {
        for src in [
            "([x] ^x -> x) (^c t)",
            "f (g h)",
            "f ([x] ^x -> x)",
            "(f g)[x; #fail;]",
            "x[; {}; (^c ~ ^c), (a @ b ~ [y] ^y -> y)]",
            "[x, y] ^c ^x -> x y",
            "[x] ([y] ^y -> y) -> x",
            "[] ^c -> [y] ^y -> y",
        ] {
            let t = parse(src).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(parse(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn bot_sugar() {
        let t = parse("#bot").unwrap();
        assert!(alpha_equiv(&t, &parse("[y] ^y -> y").unwrap()));
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse("[x] ^x\n  -> )").unwrap_err();
        assert_eq!(e.position(), (2, 6));
        let ParseError::Unexpected { expected, .. } = &e else { panic!("{e}") };
        assert!(expected.iter().any(|s| s == "'('"));
        assert!(matches!(parse("[x, x] ^x -> x"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("b[; {x := a, x := b};]"), Err(ParseError::DuplicateName { .. })));
        assert!(matches!(parse("X"), Err(ParseError::Lexical { .. })));
        assert!(matches!(parse("a b )"), Err(ParseError::Unexpected { .. })));
    }

    #[test]
    fn tagged_names_print_with_suffix() {
        let t: Term = Term::var(Name::tagged("x", 2));
        assert_eq!(t.to_string(), "x_2");
    }
}
