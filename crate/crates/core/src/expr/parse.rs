//! Recursive-descent parser for the ASCII expression grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-'? factor
//! factor := base ('^' unary)?
//! base   := NUMBER | IDENT | IDENT '(' args ')'
//!         | 'Diff' '(' IDENT (',' IDENT)+ ')' ('(' args ')')?
//!         | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::pow;

use super::{Env, Expr, FuncApp, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared function `{name}` at {pos}")]
    UndeclaredFunction { pos: usize, name: String },
    #[error("malformed derivative at {pos}: {msg}")]
    MalformedDerivative { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let mut frac_part = String::new();
            if i < chars.len() && chars[i].1 == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                frac_part = chars[fs..i].iter().map(|(_, c)| c).collect();
            }
            let digits = format!("{int_part}{frac_part}");
            let n: BigInt = if digits.is_empty() {
                BigInt::from(0)
            } else {
                digits.parse().unwrap()
            };
            let d = pow(BigInt::from(10), frac_part.len());
            out.push((pos, Tok::Num(Rational::new(n, d))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((
                pos,
                Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect()),
            ));
        } else if "+-*/^(),".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    env: &'a Env,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg,
        }
    }

    fn ident(&mut self) -> Result<(usize, String), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok((pos, s))
            }
            _ => Err(self.syntax("expected identifier".into())),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                return Ok(Expr::add(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                factors.push(Expr::pow(self.unary()?, Expr::int(-1)));
            } else {
                return Ok(Expr::mul(factors));
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(-self.factor()?)
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let b = self.base()?;
        if self.eat('^') {
            let e = self.unary()?;
            Ok(Expr::pow(b, e))
        } else {
            Ok(b)
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.i += 1;
                Ok(Expr::Num(q))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                let called = self.peek() == Some(&Tok::Op('('));
                match name.as_str() {
                    "Diff" => self.derivative(pos),
                    "exp" | "ln" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return Err(ParseError::Syntax {
                                pos,
                                msg: format!("`{name}` takes one argument"),
                            });
                        }
                        let a = a.pop().unwrap();
                        Ok(if name == "exp" {
                            Expr::exp(a)
                        } else {
                            Expr::ln(a)
                        })
                    }
                    _ => match (self.env.get(&name), called) {
                        (Some(sig), false) => Ok(sig.apply()),
                        (Some(sig), true) => {
                            let args = self.args()?;
                            sig.apply_to(args).map_err(|e| ParseError::Syntax {
                                pos,
                                msg: e.to_string(),
                            })
                        }
                        (None, true) => Err(ParseError::UndeclaredFunction { pos, name }),
                        (None, false) => Ok(Expr::sym(&name)),
                    },
                }
            }
            Some(Tok::Op(c)) => Err(self.syntax(format!("unexpected `{c}`"))),
            None => Err(self.syntax("unexpected end of input".into())),
        }
    }

    fn derivative(&mut self, pos: usize) -> Result<Expr, ParseError> {
        let malformed = |msg: String| ParseError::MalformedDerivative { pos, msg };
        self.expect('(')?;
        let (_, fname) = self.ident()?;
        let sig = self
            .env
            .get(&fname)
            .ok_or(ParseError::UndeclaredFunction {
                pos,
                name: fname.clone(),
            })?
            .clone();
        let mut wrt = Vec::new();
        while self.eat(',') {
            let (_, v) = self.ident()?;
            let idx = sig
                .params
                .iter()
                .position(|p| **p == *v)
                .ok_or_else(|| malformed(format!("`{v}` is not an argument of `{fname}`")))?;
            wrt.push(idx);
        }
        self.expect(')')?;
        if wrt.is_empty() {
            return Err(malformed("no differentiation variables".into()));
        }
        wrt.sort_unstable();
        let args = if self.peek() == Some(&Tok::Op('(')) {
            let a = self.args()?;
            if a.len() != sig.params.len() {
                return Err(malformed(format!(
                    "`{fname}` expects {} arguments",
                    sig.params.len()
                )));
            }
            a
        } else {
            sig.params.iter().map(|p| Expr::Sym(p.clone())).collect()
        };
        Ok(Expr::Func(FuncApp {
            name: sig.name.clone(),
            params: sig.params.clone(),
            args,
            wrt,
        }))
    }
}

/// Parse `text` into a normalized expression.
pub fn parse(text: &str, env: &Env) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        env,
    };
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return Err(p.syntax("trailing input".into()));
    }
    Ok(e)
}
