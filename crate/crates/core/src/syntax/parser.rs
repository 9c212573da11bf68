//! Recursive-descent parser for `.pi` sources, types and environment files.
//!
//! ```text
//! process ::= prefix ('|' prefix)*
//! prefix  ::= '0' | '(' process ')'
//!           | 'new' binder (',' binder)* '.' prefix
//!           | '(' 'new' binder (',' binder)* ')' prefix
//!           | name '<' [value (',' value)*] '>'
//!           | ['!'] name ['(' [name (',' name)*] ')'] ['.' prefix]
//! binder  ::= name [':' type] ['fun']        (in either order)
//! value   ::= term ('+' term)*     term ::= atom ('*' atom)*
//! atom    ::= '*' | numeral | name | '(' value ')'
//! type    ::= 'Unit' | 'Nat' | '#'k '[' types ']' | 'i'k '[' types ']' | 'o'k '[' types ']'
//! ```
//!
//! Binders are freshened while parsing, so the resulting term has pairwise
//! distinct bound names that are also distinct from its free names.

use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use super::{Capability, Process, ResKind, SyntaxError, Type, Value};
use crate::name::Name;

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Cursor, SyntaxError> {
        Ok(Cursor {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub(crate) fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> SyntaxError {
        let t = &self.tokens[self.pos];
        SyntaxError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "new" | "fun")
}

struct ProcessParser {
    cur: Cursor,
    scopes: Vec<(String, Name)>,
}

impl ProcessParser {
    fn resolve(&self, spelling: &str) -> Name {
        self.scopes
            .iter()
            .rev()
            .find(|(s, _)| s == spelling)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| Name::global(spelling))
    }

    fn bind(&mut self, spelling: &str) -> Name {
        let n = Name::fresh(spelling);
        self.scopes.push((spelling.to_string(), n.clone()));
        n
    }

    fn process(&mut self) -> Result<Process, SyntaxError> {
        let mut acc = self.prefix()?;
        while self.cur.eat(&Tok::Bar) {
            let rhs = self.prefix()?;
            acc = Process::par(acc, rhs);
        }
        Ok(acc)
    }

    fn prefix(&mut self) -> Result<Process, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Nat(0) => {
                self.cur.bump();
                Ok(Process::Nil)
            }
            Tok::LParen if self.cur.peek_at(1) == &Tok::Ident("new".into()) => {
                self.cur.bump();
                self.cur.bump();
                let binders = self.binders()?;
                if self.cur.eat(&Tok::Dot) {
                    // `(new a. P | Q)`: the body extends to the parenthesis.
                    let p = self.restricted_with(binders, Self::process)?;
                    self.cur.expect(&Tok::RParen)?;
                    return Ok(p);
                }
                self.cur.expect(&Tok::RParen)?;
                self.restricted(binders)
            }
            Tok::LParen => {
                self.cur.bump();
                let p = self.process()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(s) if s == "new" => {
                self.cur.bump();
                let binders = self.binders()?;
                self.cur.expect(&Tok::Dot)?;
                self.restricted(binders)
            }
            Tok::Bang => {
                self.cur.bump();
                let subject = self.cur.ident()?;
                if self.cur.peek() == &Tok::LAngle {
                    return Err(self
                        .cur
                        .error("replication is only allowed on input prefixes"));
                }
                let (params, body) = self.input_rest()?;
                Ok(Process::RepIn {
                    subject: self.resolve(&subject),
                    params,
                    body: Box::new(body),
                })
            }
            Tok::Ident(_) => {
                let subject = self.cur.ident()?;
                let subject = self.resolve(&subject);
                if self.cur.eat(&Tok::LAngle) {
                    let payload = self.values()?;
                    return Ok(Process::Out { subject, payload });
                }
                let (params, body) = self.input_rest()?;
                Ok(Process::In {
                    subject,
                    params,
                    body: Box::new(body),
                })
            }
            _ => Err(self.cur.unexpected("a process")),
        }
    }

    /// Parameters and continuation of an input whose subject was consumed.
    fn input_rest(&mut self) -> Result<(Vec<Name>, Process), SyntaxError> {
        let mut spellings = Vec::new();
        if self.cur.eat(&Tok::LParen) && !self.cur.eat(&Tok::RParen) {
            loop {
                spellings.push(self.cur.ident()?);
                if self.cur.eat(&Tok::RParen) {
                    break;
                }
                self.cur.expect(&Tok::Comma)?;
            }
        }
        for (i, s) in spellings.iter().enumerate() {
            if spellings[..i].contains(s) {
                return Err(self.cur.error(format!("parameter `{s}` bound twice")));
            }
        }
        let mark = self.scopes.len();
        let params: Vec<Name> = spellings.iter().map(|s| self.bind(s)).collect();
        let body = if self.cur.eat(&Tok::Dot) {
            self.prefix()?
        } else {
            Process::Nil
        };
        self.scopes.truncate(mark);
        Ok((params, body))
    }

    fn values(&mut self) -> Result<Vec<Value>, SyntaxError> {
        let mut vs = Vec::new();
        if self.cur.eat(&Tok::RAngle) {
            // `a<>` sends the unit value.
            return Ok(vec![Value::Star]);
        }
        loop {
            vs.push(self.value()?);
            if self.cur.eat(&Tok::RAngle) {
                return Ok(vs);
            }
            self.cur.expect(&Tok::Comma)?;
        }
    }

    fn value(&mut self) -> Result<Value, SyntaxError> {
        let mut acc = self.term()?;
        while self.cur.eat(&Tok::Plus) {
            let rhs = self.term()?;
            acc = Value::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Value, SyntaxError> {
        let mut acc = self.atom()?;
        while self.cur.peek() == &Tok::Star
            && matches!(
                self.cur.peek_at(1),
                Tok::Nat(_) | Tok::Ident(_) | Tok::LParen | Tok::Star
            )
        {
            self.cur.bump();
            let rhs = self.atom()?;
            acc = Value::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Value, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Star => {
                self.cur.bump();
                Ok(Value::Star)
            }
            Tok::Nat(n) => {
                self.cur.bump();
                Ok(Value::Nat(n))
            }
            Tok::LParen => {
                self.cur.bump();
                let v = self.value()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(_) => {
                let s = self.cur.ident()?;
                Ok(Value::Name(self.resolve(&s)))
            }
            _ => Err(self.cur.unexpected("a value")),
        }
    }

    fn binders(&mut self) -> Result<Vec<(String, Option<Type>, ResKind)>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            let name = self.cur.ident()?;
            let mut annotation = None;
            let mut kind = ResKind::Imperative;
            loop {
                if self.cur.peek() == &Tok::Ident("fun".into()) {
                    if kind == ResKind::Functional {
                        return Err(self.cur.error("`fun` given twice"));
                    }
                    self.cur.bump();
                    kind = ResKind::Functional;
                } else if self.cur.peek() == &Tok::Colon {
                    if annotation.is_some() {
                        return Err(self.cur.error("restriction annotated twice"));
                    }
                    self.cur.bump();
                    annotation = Some(type_expr(&mut self.cur)?);
                } else {
                    break;
                }
            }
            out.push((name, annotation, kind));
            if !self.cur.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn restricted(
        &mut self,
        binders: Vec<(String, Option<Type>, ResKind)>,
    ) -> Result<Process, SyntaxError> {
        self.restricted_with(binders, Self::prefix)
    }

    fn restricted_with(
        &mut self,
        binders: Vec<(String, Option<Type>, ResKind)>,
        body: fn(&mut Self) -> Result<Process, SyntaxError>,
    ) -> Result<Process, SyntaxError> {
        let mark = self.scopes.len();
        let names: Vec<Name> = binders.iter().map(|(s, _, _)| self.bind(s)).collect();
        let body = body(self)?;
        self.scopes.truncate(mark);
        let mut p = body;
        for (name, (_, annotation, kind)) in names.into_iter().zip(binders).rev() {
            p = Process::Res {
                name,
                annotation,
                kind,
                body: Box::new(p),
            };
        }
        Ok(p)
    }
}

pub(crate) fn type_expr(cur: &mut Cursor) -> Result<Type, SyntaxError> {
    let (cap, level) = match cur.peek().clone() {
        Tok::Ident(s) if s == "Unit" => {
            cur.bump();
            return Ok(Type::Unit);
        }
        Tok::Ident(s) if s == "Nat" => {
            cur.bump();
            return Ok(Type::Nat);
        }
        Tok::Hash => {
            cur.bump();
            match cur.bump() {
                Tok::Nat(k) => (Capability::Sharp, level_of(cur, k)?),
                _ => return Err(cur.error("expected a level after `#`")),
            }
        }
        Tok::Ident(s) if is_capability_word(&s) => {
            cur.bump();
            let cap = if s.starts_with('i') {
                Capability::In
            } else {
                Capability::Out
            };
            let k: u64 = s[1..].parse().map_err(|_| cur.error("level too large"))?;
            (cap, level_of(cur, k)?)
        }
        _ => return Err(cur.unexpected("a type")),
    };
    cur.expect(&Tok::LBracket)?;
    let mut payload = Vec::new();
    if !cur.eat(&Tok::RBracket) {
        loop {
            payload.push(type_expr(cur)?);
            if cur.eat(&Tok::RBracket) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    Ok(Type::Chan {
        cap,
        level,
        payload,
    })
}

fn is_capability_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('i' | 'o')) && s.len() > 1 && chars.all(|c| c.is_ascii_digit())
}

fn level_of(cur: &Cursor, k: u64) -> Result<u32, SyntaxError> {
    u32::try_from(k).map_err(|_| cur.error("level too large"))
}

/// Parses a process, freshening every binder.
/// Parses a process; a source with no tokens besides comments is `0`.
pub fn parse_process(text: &str) -> Result<Process, SyntaxError> {
    let mut p = ProcessParser {
        cur: Cursor::new(text)?,
        scopes: Vec::new(),
    };
    if p.cur.at_eof() {
        return Ok(Process::Nil);
    }
    let proc = p.process()?;
    p.cur.finish()?;
    Ok(proc)
}

pub fn parse_type(text: &str) -> Result<Type, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let t = type_expr(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

/// One `[fun] name : type` line of an environment file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvDecl {
    pub name: String,
    pub ty: Type,
    pub functional: bool,
}

pub fn parse_env(text: &str) -> Result<Vec<EnvDecl>, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut decls: Vec<EnvDecl> = Vec::new();
    let mut seen = HashMap::new();
    while !cur.at_eof() {
        let functional = cur.eat(&Tok::Ident("fun".into()));
        let name = cur.ident()?;
        if seen.insert(name.clone(), ()).is_some() {
            return Err(cur.error(format!("`{name}` declared twice")));
        }
        cur.expect(&Tok::Colon)?;
        let ty = type_expr(&mut cur)?;
        decls.push(EnvDecl {
            name,
            ty,
            functional,
        });
    }
    Ok(decls)
}
