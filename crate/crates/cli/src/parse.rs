//! Text formats: polynomials in `x1, x2, x3`, Puiseux arcs in `t`, weight and point lists.
//!
//! Error positions are 1-based byte offsets into the input.

use holder_core::arcs::{ArcError, PuiseuxArc};
use holder_core::polynomial::WeightedPolynomial;
use holder_core::Rational;
use thiserror::Error;

pub const POLYNOMIAL_VARS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown variable `{name}` at offset {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("exponent {0} is not positive")]
    NonPositiveExponent(Rational),
    #[error("empty input")]
    Empty,
    #[error(transparent)]
    Arc(#[from] ArcError),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    tokens: Vec<(Token, usize)>,
    end: usize,
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        let bytes = text.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let start = i;
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let token = if c.is_ascii_digit() {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| ParseError::SyntaxError {
                    position: start + 1,
                    message: "number too large".into(),
                })?;
                tokens.push((Token::Number(n), start + 1));
                continue;
            } else if c.is_ascii_alphabetic() {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push((Token::Ident(text[start..i].to_string()), start + 1));
                continue;
            } else {
                match c {
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '^' => Token::Caret,
                    '/' => Token::Slash,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    other => {
                        return Err(ParseError::SyntaxError {
                            position: start + 1,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                }
            };
            tokens.push((token, start + 1));
            i += c.len_utf8();
        }
        Ok(Lexer {
            tokens,
            end: text.len() + 1,
        })
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(lexer: Lexer) -> Parser {
        Parser {
            tokens: lexer.tokens,
            pos: 0,
            end: lexer.end,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError {
            position: self.position(),
            message: message.into(),
        })
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Integer or `a/b`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = match self.next() {
            Some(Token::Number(n)) => n,
            _ => {
                self.pos -= 1;
                return self.error("expected a number");
            }
        };
        if self.eat(&Token::Slash) {
            let position = self.position();
            match self.next() {
                Some(Token::Number(0)) => Err(ParseError::SyntaxError {
                    position,
                    message: "zero denominator".into(),
                }),
                Some(Token::Number(d)) => Ok(Rational::from_bigints(num.into(), d.into())),
                _ => {
                    self.pos -= 1;
                    self.error("expected a denominator")
                }
            }
        } else {
            Ok(Rational::from_bigints(num.into(), 1u64.into()))
        }
    }

    /// Optional leading sign of a term; returns `-1` or `1`.
    fn sign(&mut self, first: bool) -> Result<i64, ParseError> {
        if self.eat(&Token::Plus) {
            Ok(1)
        } else if self.eat(&Token::Minus) {
            Ok(-1)
        } else if first {
            Ok(1)
        } else {
            self.error("expected `+` or `-`")
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    match name {
        "x1" | "x" => Some(0),
        "x2" | "y" => Some(1),
        "x3" | "z" => Some(2),
        _ => None,
    }
}

/// Parses a polynomial such as `x1^2 + x2^2 - x3^4` (aliases `x, y, z`).
pub fn parse_polynomial(text: &str) -> Result<WeightedPolynomial, ParseError> {
    let mut p = Parser::new(Lexer::new(text)?);
    if p.done() {
        return Err(ParseError::Empty);
    }
    let mut monomials = Vec::new();
    let mut first = true;
    while !p.done() || first {
        let sign = p.sign(first)?;
        first = false;
        let mut coeff = Rational::integer(sign);
        let mut alpha = vec![0u32; POLYNOMIAL_VARS];
        loop {
            match p.peek() {
                Some(Token::Number(_)) => coeff = coeff * p.rational()?,
                Some(Token::Ident(name)) => {
                    let name = name.clone();
                    let position = p.position();
                    let i = variable_index(&name).ok_or(ParseError::UnknownVariable { name, position })?;
                    p.next();
                    let e = if p.eat(&Token::Caret) {
                        match p.next() {
                            Some(Token::Number(e)) => u32::try_from(e).or_else(|_| {
                                p.pos -= 1;
                                p.error("exponent too large")
                            })?,
                            _ => {
                                p.pos -= 1;
                                return p.error("expected a nonnegative integer exponent");
                            }
                        }
                    } else {
                        1
                    };
                    alpha[i] += e;
                }
                _ => return p.error("expected a number or a variable"),
            }
            if !p.eat(&Token::Star) {
                break;
            }
        }
        match p.peek() {
            None | Some(Token::Plus) | Some(Token::Minus) => {}
            Some(_) => return p.error("expected `+`, `-` or `*`"),
        }
        monomials.push((coeff, alpha));
    }
    WeightedPolynomial::new(POLYNOMIAL_VARS, monomials).map_err(|_| ParseError::SyntaxError {
        position: 1,
        message: "polynomial is identically zero".into(),
    })
}

/// Parses one arc coordinate: a sum of terms `c*t^p`.
fn parse_coordinate(text: &str, offset: usize) -> Result<Vec<(Rational, Rational)>, ParseError> {
    let shift = |e: ParseError| match e {
        ParseError::SyntaxError { position, message } => ParseError::SyntaxError {
            position: position + offset,
            message,
        },
        ParseError::UnknownVariable { name, position } => ParseError::UnknownVariable {
            name,
            position: position + offset,
        },
        other => other,
    };
    let mut p = Parser::new(Lexer::new(text).map_err(shift)?);
    if p.done() {
        return Err(shift(ParseError::SyntaxError {
            position: 1,
            message: "empty coordinate (write 0 for a vanishing one)".into(),
        }));
    }
    let mut terms: Vec<(Rational, Rational)> = Vec::new();
    let mut first = true;
    while !p.done() {
        let sign = p.sign(first).map_err(shift)?;
        first = false;
        let mut coeff = Rational::integer(sign);
        let mut exponent = Rational::zero();
        if matches!(p.peek(), Some(Token::Number(_))) {
            coeff = coeff * p.rational().map_err(shift)?;
            if !p.eat(&Token::Star) {
                terms.push((coeff, exponent));
                continue;
            }
        }
        match p.next() {
            Some(Token::Ident(name)) if name == "t" => {}
            Some(Token::Ident(name)) => {
                p.pos -= 1;
                return Err(shift(ParseError::UnknownVariable {
                    name,
                    position: p.position(),
                }));
            }
            _ => {
                p.pos -= 1;
                return Err(shift(p.error::<()>("expected `t`").unwrap_err()));
            }
        }
        exponent = Rational::one();
        if p.eat(&Token::Caret) {
            let negative = p.eat(&Token::Minus);
            let parenthesized = p.eat(&Token::LParen);
            let e = p.rational().map_err(shift)?;
            if parenthesized && !p.eat(&Token::RParen) {
                return Err(shift(p.error::<()>("expected `)`").unwrap_err()));
            }
            exponent = if negative { -e } else { e };
        }
        match p.peek() {
            None | Some(Token::Plus) | Some(Token::Minus) => {}
            Some(_) => return Err(shift(p.error::<()>("expected `+` or `-`").unwrap_err())),
        }
        terms.push((coeff, exponent));
    }
    terms.retain(|(c, _)| !c.is_zero());
    if let Some((_, e)) = terms.iter().find(|(_, e)| !e.is_positive()) {
        return Err(ParseError::NonPositiveExponent(e.clone()));
    }
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (c, e) in terms {
        match merged.last_mut() {
            Some((c0, e0)) if *e0 == e => *c0 += &c,
            _ => merged.push((c, e)),
        }
    }
    merged.retain(|(c, _)| !c.is_zero());
    Ok(merged)
}

/// Parses an arc at the origin, e.g. `t + 2*t^2; t^3/2` (`t^3/2` is `t^(3/2)`).
pub fn parse_arc(text: &str) -> Result<PuiseuxArc, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut coords = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        coords.push(parse_coordinate(part, offset)?);
        offset += part.len() + 1;
    }
    Ok(PuiseuxArc::at_origin(coords, None)?)
}

/// Comma-separated integers.
pub fn parse_integers(text: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 1;
    for part in text.split(',') {
        let trimmed = part.trim();
        let value = trimmed.parse().map_err(|_| ParseError::SyntaxError {
            position: offset + part.find(trimmed).unwrap_or(0),
            message: format!("`{trimmed}` is not an integer"),
        })?;
        out.push(value);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Comma-separated rationals (`p` or `p/q`, optionally signed).
pub fn parse_point(text: &str) -> Result<Vec<Rational>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 1;
    for part in text.split(',') {
        let trimmed = part.trim();
        let value = trimmed.parse().map_err(|_| ParseError::SyntaxError {
            position: offset + part.find(trimmed).unwrap_or(0),
            message: format!("`{trimmed}` is not a rational number"),
        })?;
        out.push(value);
        offset += part.len() + 1;
    }
    Ok(out)
}
