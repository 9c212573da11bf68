//! `.lam` files: a header of `name : type` declarations followed by a term.
//!
//! ```text
//! type ::= atom ('->' type)?        atom ::= name | '(' type ')'
//! term ::= '\' name+ '.' term | atom+
//! atom ::= name | '(' term ')'
//! ```

use crate::name::Name;
use crate::syntax::{Cursor, SyntaxError, Tok};

use super::{LambdaContext, LambdaTerm, LambdaType};

#[derive(Debug, Clone)]
pub struct LambdaProgram {
    pub context: LambdaContext,
    pub term: LambdaTerm,
}

pub fn parse_lambda(text: &str) -> Result<LambdaProgram, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut context = LambdaContext::new();
    while matches!(cur.peek(), Tok::Ident(_)) && cur.peek_at(1) == &Tok::Colon {
        let name = cur.ident()?;
        cur.expect(&Tok::Colon)?;
        let ty = lambda_type(&mut cur)?;
        if context.insert(Name::global(&name), ty).is_some() {
            return Err(cur.error(format!("`{name}` declared twice")));
        }
    }
    let mut scope = Vec::new();
    let term = term(&mut cur, &mut scope)?;
    cur.finish()?;
    Ok(LambdaProgram { context, term })
}

pub fn parse_lambda_type(text: &str) -> Result<LambdaType, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let t = lambda_type(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

fn lambda_type(cur: &mut Cursor) -> Result<LambdaType, SyntaxError> {
    let a = if cur.eat(&Tok::LParen) {
        let t = lambda_type(cur)?;
        cur.expect(&Tok::RParen)?;
        t
    } else {
        LambdaType::Base(cur.ident()?)
    };
    if cur.eat(&Tok::Arrow) {
        Ok(LambdaType::arrow(a, lambda_type(cur)?))
    } else {
        Ok(a)
    }
}

fn term(cur: &mut Cursor, scope: &mut Vec<(String, Name)>) -> Result<LambdaTerm, SyntaxError> {
    if cur.eat(&Tok::Backslash) {
        let mut binders = vec![cur.ident()?];
        while matches!(cur.peek(), Tok::Ident(_)) {
            binders.push(cur.ident()?);
        }
        cur.expect(&Tok::Dot)?;
        let mark = scope.len();
        let names: Vec<Name> = binders
            .iter()
            .map(|b| {
                let n = Name::fresh(b);
                scope.push((b.clone(), n.clone()));
                n
            })
            .collect();
        let body = term(cur, scope);
        scope.truncate(mark);
        let body = body?;
        return Ok(names.iter().rev().fold(body, |m, x| LambdaTerm::abs(x, m)));
    }
    let mut m = atom(cur, scope)?;
    while matches!(cur.peek(), Tok::Ident(_) | Tok::LParen | Tok::Backslash) {
        let n = if cur.peek() == &Tok::Backslash {
            term(cur, scope)?
        } else {
            atom(cur, scope)?
        };
        m = LambdaTerm::app(m, n);
    }
    Ok(m)
}

fn atom(cur: &mut Cursor, scope: &mut Vec<(String, Name)>) -> Result<LambdaTerm, SyntaxError> {
    if cur.eat(&Tok::LParen) {
        let m = term(cur, scope)?;
        cur.expect(&Tok::RParen)?;
        return Ok(m);
    }
    let x = cur.ident()?;
    let name = scope
        .iter()
        .rev()
        .find(|(s, _)| *s == x)
        .map(|(_, n)| n.clone())
        .unwrap_or_else(|| Name::global(&x));
    Ok(LambdaTerm::Var(name))
}
