//! The text grammar for tower elements:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' '-'? integer)?
//! base   := integer | ident | '(' expr ')'
//! ```
//!
//! Rationals are written as quotients (`3/4`). Identifiers name tower
//! generators (`x`, `t1`, `alpha2`, `theta1`, `thetap1`, …; an unindexed
//! role name works when a single level provides it) or `rho`, the
//! generator of the constant field. There is no prime token: the
//! derivative of `theta` is the generator `thetap`.

use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::field::{Field, Rational};
use crate::algebra::numfield::{AlgNumber, NumberField};
use crate::tower::{Tower, TowerElem, CONSTANT_GENERATOR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Positions are 1-based character columns.
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator '{name}' at position {position}")]
    UnknownGenerator { name: String, position: usize },
    #[error("division by zero at position {position}")]
    DivisionByZero { position: usize },
    #[error("'{CONSTANT_GENERATOR}' used at position {position} but no constant field is declared")]
    NoConstantField { position: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Token::Int(text.parse().unwrap()), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Token::Op(c), pos));
            i += 1;
        } else if c == '\'' || c == '′' {
            return Err(ParseError::Syntax {
                position: pos,
                message: "unexpected prime; derivatives of generators are named generators (e.g. thetap)".into(),
            });
        } else {
            return Err(ParseError::Syntax {
                position: pos,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

/// Parses expressions against a tower, with an optional constant field
/// for `rho` and extra name bindings.
pub struct Parser<'a> {
    tower: &'a Tower,
    constants: Option<Arc<NumberField>>,
    bindings: Vec<(String, TowerElem)>,
}

struct Cursor<'a, 'b> {
    parser: &'b Parser<'a>,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(tower: &'a Tower) -> Self {
        Parser {
            tower,
            constants: tower.constants().cloned(),
            bindings: vec![],
        }
    }

    /// Uses `field` as the meaning of `rho`.
    pub fn with_constants(mut self, field: Option<Arc<NumberField>>) -> Self {
        if field.is_some() {
            self.constants = field;
        }
        self
    }

    /// Binds an extra identifier.
    pub fn bind(mut self, name: &str, value: TowerElem) -> Self {
        self.bindings.push((name.to_string(), value));
        self
    }

    pub fn parse(&self, src: &str) -> Result<TowerElem, ParseError> {
        let mut cur = Cursor {
            parser: self,
            tokens: tokenize(src)?,
            pos: 0,
        };
        let e = cur.expr()?;
        match cur.peek() {
            Token::End => Ok(e),
            t => Err(cur.unexpected(&t)),
        }
    }
}

/// Parses `src` against `tower` with the tower's constant field.
pub fn parse(src: &str, tower: &Tower) -> Result<TowerElem, ParseError> {
    Parser::new(tower).parse(src)
}

impl Cursor<'_, '_> {
    fn peek(&self) -> Token {
        self.tokens[self.pos].0.clone()
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn unexpected(&self, t: &Token) -> ParseError {
        let message = match t {
            Token::End => "unexpected end of input".to_string(),
            Token::Int(n) => format!("unexpected number {n}"),
            Token::Ident(s) => format!("unexpected identifier '{s}'"),
            Token::Op(c) => format!("unexpected '{c}'"),
        };
        ParseError::Syntax {
            position: self.position(),
            message,
        }
    }

    fn tower(&self) -> &Tower {
        self.parser.tower
    }

    fn expr(&mut self) -> Result<TowerElem, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Token::Op('+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.tower().add(&acc, &rhs);
                }
                Token::Op('-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.tower().sub(&acc, &rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TowerElem, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Token::Op('*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = self.tower().mul(&acc, &rhs);
                }
                Token::Op('/') => {
                    self.pos += 1;
                    let position = self.position();
                    let rhs = self.factor()?;
                    acc = self
                        .tower()
                        .div(&acc, &rhs)
                        .ok_or(ParseError::DivisionByZero { position })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<TowerElem, ParseError> {
        if self.peek() == Token::Op('-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(self.tower().neg(&inner));
        }
        let position = self.position();
        let base = self.base()?;
        if self.peek() != Token::Op('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = self.peek() == Token::Op('-');
        if negative {
            self.pos += 1;
        }
        let Token::Int(n) = self.peek() else {
            return Err(ParseError::Syntax {
                position: self.position(),
                message: "exponent must be an integer".into(),
            });
        };
        let n: i64 = i64::try_from(&n).map_err(|_| ParseError::Syntax {
            position: self.position(),
            message: "exponent too large".into(),
        })?;
        self.pos += 1;
        let n = if negative { -n } else { n };
        self.tower()
            .powi(&base, n)
            .map_err(|_| ParseError::DivisionByZero { position })
    }

    fn base(&mut self) -> Result<TowerElem, ParseError> {
        let position = self.position();
        match self.peek() {
            Token::Int(n) => {
                self.pos += 1;
                Ok(TowerElem::rational(Rational::from_integer(n)))
            }
            Token::Ident(name) => {
                self.pos += 1;
                self.ident(&name, position)
            }
            Token::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Token::Op(')') {
                    return Err(ParseError::Syntax {
                        position: self.position(),
                        message: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            t => Err(self.unexpected(&t)),
        }
    }

    fn ident(&self, name: &str, position: usize) -> Result<TowerElem, ParseError> {
        if let Some((_, v)) = self.parser.bindings.iter().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        if name == CONSTANT_GENERATOR {
            return match &self.parser.constants {
                Some(k) => Ok(TowerElem::Const(k.generator())),
                None => Err(ParseError::NoConstantField { position }),
            };
        }
        match self.tower().lookup(name) {
            Some(slot) => Ok(self.tower().gen(slot)),
            None => Err(ParseError::UnknownGenerator {
                name: name.to_string(),
                position,
            }),
        }
    }
}

/// Parses a polynomial with rational coefficients in the variable `var`
/// (e.g. a minimal polynomial `X^2 - 2`), ascending coefficients.
pub fn parse_rational_poly(src: &str, var: &str) -> Result<Vec<Rational>, ParseError> {
    let base = Tower::base(None);
    let e = Parser::new(&base).bind(var, base.x()).parse(src)?;
    let not_poly = || ParseError::Syntax {
        position: 1,
        message: format!("expected a polynomial in {var} with rational coefficients"),
    };
    let r = base.to_base_ratfunc(&e).ok_or_else(not_poly)?;
    if r.den.len() != 1 {
        return Err(not_poly());
    }
    let scale = r.den[0].as_rational().cloned().ok_or_else(not_poly)?;
    r.num
        .iter()
        .map(|c| c.as_rational().map(|q| q / &scale).ok_or_else(not_poly))
        .collect()
}

/// Parses a constant (an expression without generators other than `rho`).
pub fn parse_constant(src: &str, tower: &Tower) -> Result<AlgNumber, ParseError> {
    let e = parse(src, tower)?;
    match e.as_const() {
        Some(c) => Ok(c.clone()),
        None if e.is_zero() => Ok(crate::algebra::numfield::Consts.zero()),
        None => Err(ParseError::Syntax {
            position: 1,
            message: "expected a constant".into(),
        }),
    }
}
