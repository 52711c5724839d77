use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{Builtin, Expr, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("malformed derivative tag at byte {offset}: {message}")]
    BadDerivative { offset: usize, message: String },
    #[error("exponent at byte {offset} is not a rational constant")]
    NonRationalExponent { offset: usize },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::BadDerivative { offset, .. }
            | ParseError::NonRationalExponent { offset }
            | ParseError::DivisionByZero { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            let n: BigInt = text.parse().expect("digit run parses");
            if self.src.get(self.pos).is_some_and(|b| *b == b'.' || b.is_ascii_alphabetic()) {
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: "malformed number".into(),
                });
            }
            return Ok((Tok::Int(n), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
            return Ok((Tok::Ident(text.to_string()), start));
        }
        if b"+-*/^(),".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Op(c as char), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }
}

/// Expression parser with a set of declared opaque function names.
#[derive(Debug, Clone, Default)]
pub struct Parser {
    functions: BTreeSet<String>,
}

impl Parser {
    pub fn new() -> Parser {
        Parser::default()
    }

    /// Declare opaque single-argument functions usable as `u(q2)`.
    pub fn with_functions<I, S>(mut self, names: I) -> Parser
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.functions.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let mut st = State { lex: Lexer { src: text.as_bytes(), pos: 0 }, tok: Tok::End, at: 0, p: self };
        st.advance()?;
        let e = st.expr()?;
        if st.tok != Tok::End {
            return Err(ParseError::Syntax { offset: st.at, message: "unexpected trailing input".into() });
        }
        Ok(e)
    }
}

/// Parse with no declared opaque functions.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new().parse(text)
}

struct State<'a, 'p> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    p: &'p Parser,
}

impl State<'_, '_> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.advance()
        } else {
            Err(ParseError::Syntax { offset: self.at, message: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.advance()?;
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.advance()?;
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::add_all(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.advance()?;
                    let rhs = self.unary()?;
                    acc = acc * rhs;
                }
                Tok::Op('/') => {
                    let at = self.at;
                    self.advance()?;
                    let rhs = self.unary()?;
                    if rhs.is_zero_const() {
                        return Err(ParseError::DivisionByZero { offset: at });
                    }
                    acc = acc / rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(-self.unary()?);
        }
        if self.tok == Tok::Op('+') {
            self.advance()?;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.advance()?;
        let at = self.at;
        let exponent = self.exponent()?;
        let Some(q) = exponent.as_num().cloned() else {
            return Err(ParseError::NonRationalExponent { offset: at });
        };
        if base.is_zero_const() && q < Q::zero() {
            return Err(ParseError::DivisionByZero { offset: at });
        }
        Ok(base.pow(&q))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(-self.exponent()?);
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.at;
        match self.tok.clone() {
            Tok::Int(n) => {
                self.advance()?;
                Ok(Expr::num(Q::from_integer(n)))
            }
            Tok::Op('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if self.tok == Tok::Op('(') {
                    self.advance()?;
                    self.call(&name, at)
                } else if name == "pi" {
                    Ok(Expr::sym("pi"))
                } else {
                    Ok(Expr::sym(&name))
                }
            }
            Tok::End => Err(ParseError::Syntax { offset: at, message: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ParseError::Syntax { offset: at, message: format!("unexpected `{c}`") }),
        }
    }

    fn ident_arg(&mut self) -> Result<String, ParseError> {
        match self.tok.clone() {
            Tok::Ident(s) => {
                self.advance()?;
                Ok(s)
            }
            _ => Err(ParseError::BadDerivative { offset: self.at, message: "expected identifier".into() }),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        if name == "diff" {
            let f = self.ident_arg()?;
            self.expect(',')?;
            let x = self.ident_arg()?;
            self.expect(',')?;
            let k_at = self.at;
            let k = match self.tok.clone() {
                Tok::Int(n) => {
                    self.advance()?;
                    n
                }
                _ => {
                    return Err(ParseError::BadDerivative {
                        offset: k_at,
                        message: "derivative order must be a nonnegative integer literal".into(),
                    })
                }
            };
            let Ok(k) = u32::try_from(k) else {
                return Err(ParseError::BadDerivative { offset: k_at, message: "derivative order too large".into() });
            };
            if self.tok != Tok::Op(')') {
                return Err(ParseError::BadDerivative { offset: self.at, message: "expected `)`".into() });
            }
            self.advance()?;
            return Ok(Expr::fun(&f, &x, k));
        }
        if name == "sqrt" {
            let a = self.expr()?;
            self.expect(')')?;
            return Ok(a.sqrt());
        }
        if let Some(b) = Builtin::from_name(name) {
            let a = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::call(b, a));
        }
        if self.p.functions.contains(name) {
            let x = match self.tok.clone() {
                Tok::Ident(s) => {
                    self.advance()?;
                    s
                }
                _ => {
                    return Err(ParseError::Syntax {
                        offset: self.at,
                        message: format!("`{name}` takes a single coordinate argument"),
                    })
                }
            };
            self.expect(')')?;
            return Ok(Expr::fun(name, &x, 0));
        }
        Err(ParseError::UnknownFunction { offset: at, name: name.to_string() })
    }
}
