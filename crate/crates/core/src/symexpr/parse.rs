//! Recursive-descent parser for polynomial expressions and for linear
//! combinations of basis symbols (`dx^dy`, `d/dx`) with polynomial
//! coefficients. The grammar is written out in `docs/model-format.md`.

use num_bigint::BigInt;
use thiserror::Error;

use super::{Poly, Rational, Vars};

/// Syntax or name error with a 1-based column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

/// Which basis symbols a combination accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `dx`, wedged with `^`: differential forms.
    Differential,
    /// `d/dx`: vector fields.
    Derivation,
}

/// One summand of a parsed combination: coefficient times basis symbols,
/// with the variable indices in the order they were written.
#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: Poly,
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Diff(usize),
    Deriv(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str, vars: &Vars, kind: Option<BasisKind>) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if kind == Some(BasisKind::Derivation)
                && s == "d"
                && i + 1 < chars.len()
                && chars[i] == '/'
                && chars[i + 1] == 'd'
            {
                let start2 = i + 2;
                let mut j = start2;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[start2..j].iter().collect();
                match vars.index(&name) {
                    Some(k) => out.push((Tok::Deriv(k), col)),
                    None => {
                        return Err(ParseError {
                            column: col,
                            message: format!("unknown variable '{name}' in derivation"),
                        })
                    }
                }
                i = j;
                continue;
            }
            if kind == Some(BasisKind::Differential)
                && vars.index(&s).is_none()
                && s.len() > 1
                && s.starts_with('d')
            {
                match vars.index(&s[1..]) {
                    Some(k) => {
                        out.push((Tok::Diff(k), col));
                        continue;
                    }
                    None => {
                        return Err(ParseError {
                            column: col,
                            message: format!("unknown variable '{}'", &s[1..]),
                        })
                    }
                }
            }
            out.push((Tok::Ident(s), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError {
                    column: col,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push((t, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.col(),
            message: message.into(),
        })
    }

    fn is_basis(t: &Tok) -> bool {
        matches!(t, Tok::Diff(_) | Tok::Deriv(_))
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    if Self::is_basis(self.peek_at(1)) {
                        self.bump();
                        return Ok(acc);
                    }
                    self.bump();
                    acc = &acc * &self.power()?;
                }
                Tok::Slash => {
                    self.bump();
                    let col = self.col();
                    let d = self.power()?;
                    if d.is_zero() {
                        return Err(ParseError {
                            column: col,
                            message: "division by zero".into(),
                        });
                    }
                    match d.unit_inverse() {
                        Some(inv) => acc = &acc * &inv,
                        None => {
                            return Err(ParseError {
                                column: col,
                                message: "divisor must be a single monomial".into(),
                            })
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.power()?);
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            match self.bump() {
                Tok::Num(n) => {
                    let e: u32 = match u32::try_from(&n) {
                        Ok(e) if e <= 1000 => e,
                        _ => return self.err("exponent too large"),
                    };
                    Ok(base.pow(e))
                }
                Tok::Minus => {
                    self.pos -= 1;
                    self.err("negative exponent")
                }
                _ => {
                    self.pos -= 1;
                    self.err("exponent must be a non-negative integer literal")
                }
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let col = self.col();
        match self.bump() {
            Tok::Num(n) => Ok(Poly::constant(self.vars, Rational::from_integer(n))),
            Tok::Ident(s) => match self.vars.index(&s) {
                Some(i) => Ok(Poly::var(self.vars, i)),
                None => Err(ParseError {
                    column: col,
                    message: format!("unknown variable '{s}'"),
                }),
            },
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(ParseError {
                column: col,
                message: "unexpected end of input".into(),
            }),
            Tok::Diff(_) | Tok::Deriv(_) => Err(ParseError {
                column: col,
                message: "basis symbol where a coefficient was expected".into(),
            }),
            t => Err(ParseError {
                column: col,
                message: format!("unexpected token {}", describe(&t)),
            }),
        }
    }

    fn basis(&mut self, kind: BasisKind) -> Result<Vec<usize>, ParseError> {
        match kind {
            BasisKind::Derivation => match self.bump() {
                Tok::Deriv(i) => Ok(vec![i]),
                _ => {
                    self.pos -= 1;
                    self.err("expected d/d<variable>")
                }
            },
            BasisKind::Differential => {
                let mut out = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Diff(i) => out.push(i),
                        _ => {
                            self.pos -= 1;
                            return self.err("expected d<variable>");
                        }
                    }
                    if *self.peek() == Tok::Caret && matches!(self.peek_at(1), Tok::Diff(_)) {
                        self.bump();
                    } else {
                        return Ok(out);
                    }
                }
            }
        }
    }

    fn combination_term(
        &mut self,
        kind: BasisKind,
        negate: bool,
    ) -> Result<Option<Term>, ParseError> {
        let mut coeff = if Self::is_basis(self.peek()) {
            Poly::one(self.vars)
        } else {
            self.term()?
        };
        if negate {
            coeff = -coeff;
        }
        if Self::is_basis(self.peek()) {
            let basis = self.basis(kind)?;
            Ok(Some(Term { coeff, basis }))
        } else if coeff.is_zero() {
            Ok(None)
        } else {
            self.err("expected a basis symbol after the coefficient")
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => n.to_string(),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::End => "end of input".into(),
        Tok::Diff(_) | Tok::Deriv(_) => "basis symbol".into(),
    }
}

/// Parse a polynomial expression over `vars`.
pub fn parse(text: &str, vars: &Vars) -> Result<Poly, ParseError> {
    let toks = lex(text, vars, None)?;
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected token {}", describe(p.peek())));
    }
    Ok(e)
}

/// Parse `c1 b1 + c2 b2 + ...` where each `b` is a wedge of differentials or
/// a derivation, depending on `kind`. A lone `0` yields no terms.
pub fn parse_combination(
    text: &str,
    vars: &Vars,
    kind: BasisKind,
) -> Result<Vec<Term>, ParseError> {
    let toks = lex(text, vars, Some(kind))?;
    let mut p = Parser { toks, pos: 0, vars };
    let mut out = Vec::new();
    let mut negate = false;
    match p.peek() {
        Tok::Minus => {
            p.bump();
            negate = true;
        }
        Tok::Plus => {
            p.bump();
        }
        _ => {}
    }
    loop {
        if let Some(t) = p.combination_term(kind, negate)? {
            out.push(t);
        }
        match p.peek() {
            Tok::Plus => {
                p.bump();
                negate = false;
            }
            Tok::Minus => {
                p.bump();
                negate = true;
            }
            Tok::End => return Ok(out),
            t => {
                let d = describe(t);
                return p.err(format!("unexpected token {d}"));
            }
        }
    }
}
