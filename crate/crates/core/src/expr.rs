//! Wave-profile expression language: AST, parser, and pretty-printer.
//!
//! The grammar (whitespace insignificant):
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := ("+" | "-") unary | power
//! power    := atom ("^" exponent)?
//! exponent := "-"? integer | "(" "-"? integer ")"
//! atom     := number | coord | func "(" expr ")" | "(" expr ")"
//! func     := "sin" | "cos" | "exp" | "log"
//! number   := digit+ ("." digit+)? (("e" | "E") ("+" | "-")? digit+)?
//! coord    := (letter | "_") (letter | digit | "_")*
//! ```
//!
//! Exponents are restricted to integer literals so that derivative jets stay
//! exact on polynomials. `^` does not chain: `x^2^3` is a syntax error.
//! Unary minus binds tighter than `*` but looser than `^`, so `-x^2` is
//! `-(x^2)`.

use std::fmt;

use thiserror::Error;

/// A node in a parsed wave-profile expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Reference to a declared chart coordinate, stored with its resolved
    /// index into the coordinate list.
    Var { index: usize, name: String },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Power with integer exponent.
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

/// Parse failure, reported with the byte offset into the source text.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at byte {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("unexpected end of input at byte {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unexpected token at byte {offset}: expected {expected}")]
    Unexpected { expected: &'static str, offset: usize },
    #[error("malformed number at byte {offset}")]
    BadNumber { offset: usize },
    #[error("exponent at byte {offset} must be an integer literal")]
    NonIntegerExponent { offset: usize },
    #[error("unknown function {name:?} at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("reference to undeclared coordinate {name:?} at byte {offset}")]
    UndeclaredCoordinate { name: String, offset: usize },
}

impl ParseError {
    /// Byte offset into the source text at which the error was detected.
    pub fn offset(&self) -> usize {
        match *self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::UnexpectedEnd { offset }
            | ParseError::Unexpected { offset, .. }
            | ParseError::BadNumber { offset }
            | ParseError::NonIntegerExponent { offset }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UndeclaredCoordinate { offset, .. } => offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token together with its starting byte offset; `None` at end.
    fn next(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let b = self.src[start];
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                return Ok(Some((self.lex_number(start)?, start)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = start + 1;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                self.pos = end;
                let name = std::str::from_utf8(&self.src[start..end]).unwrap().to_owned();
                return Ok(Some((Tok::Ident(name), start)));
            }
            _ => {
                return Err(ParseError::UnexpectedChar {
                    ch: self.src[start] as char,
                    offset: start,
                })
            }
        };
        self.pos += 1;
        Ok(Some((tok, start)))
    }

    fn lex_number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let mut end = start;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.src.len() && self.src[end] == b'.' {
            end += 1;
            if end >= self.src.len() || !self.src[end].is_ascii_digit() {
                return Err(ParseError::BadNumber { offset: start });
            }
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
            let mut e = end + 1;
            if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                e += 1;
            }
            if e < self.src.len() && self.src[e].is_ascii_digit() {
                while e < self.src.len() && self.src[e].is_ascii_digit() {
                    e += 1;
                }
                end = e;
            }
        }
        self.pos = end;
        let text = std::str::from_utf8(&self.src[start..end]).unwrap();
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ParseError::BadNumber { offset: start })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
    end_offset: usize,
    coords: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.cursor)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some((Tok::Minus, _)) => {
                self.bump();
                // Fold a negated literal into the constant so pretty-printed
                // negative constants reparse to an identical tree.
                match self.unary()? {
                    Expr::Const(c) => Ok(Expr::Const(-c)),
                    inner => Ok(Expr::Neg(Box::new(inner))),
                }
            }
            Some((Tok::Plus, _)) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.bump();
            let k = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = matches!(self.peek(), Some((Tok::LParen, _)));
        if parenthesized {
            self.bump();
        }
        let mut sign = 1i32;
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            sign = -1;
        }
        let (tok, offset) = self.bump().ok_or(ParseError::UnexpectedEnd {
            offset: self.end_offset,
        })?;
        let k = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return Err(ParseError::NonIntegerExponent { offset }),
        };
        if parenthesized {
            match self.bump() {
                Some((Tok::RParen, _)) => {}
                Some((_, offset)) => {
                    return Err(ParseError::Unexpected {
                        expected: "closing parenthesis",
                        offset,
                    })
                }
                None => {
                    return Err(ParseError::UnexpectedEnd {
                        offset: self.end_offset,
                    })
                }
            }
        }
        Ok(sign * k)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump().ok_or(ParseError::UnexpectedEnd {
            offset: self.end_offset,
        })?;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((_, offset)) => Err(ParseError::Unexpected {
                        expected: "closing parenthesis",
                        offset,
                    }),
                    None => Err(ParseError::UnexpectedEnd {
                        offset: self.end_offset,
                    }),
                }
            }
            Tok::Ident(name) => {
                if let Some((Tok::LParen, _)) = self.peek() {
                    self.bump();
                    let arg = Box::new(self.expr()?);
                    match self.bump() {
                        Some((Tok::RParen, _)) => {}
                        Some((_, offset)) => {
                            return Err(ParseError::Unexpected {
                                expected: "closing parenthesis",
                                offset,
                            })
                        }
                        None => {
                            return Err(ParseError::UnexpectedEnd {
                                offset: self.end_offset,
                            })
                        }
                    }
                    match name.as_str() {
                        "sin" => Ok(Expr::Sin(arg)),
                        "cos" => Ok(Expr::Cos(arg)),
                        "exp" => Ok(Expr::Exp(arg)),
                        "log" => Ok(Expr::Log(arg)),
                        _ => Err(ParseError::UnknownFunction { name, offset }),
                    }
                } else {
                    match self.coords.iter().position(|c| *c == name) {
                        Some(index) => Ok(Expr::Var { index, name }),
                        None => Err(ParseError::UndeclaredCoordinate { name, offset }),
                    }
                }
            }
            _ => Err(ParseError::Unexpected {
                expected: "number, coordinate, function call, or parenthesized expression",
                offset,
            }),
        }
    }
}

/// Parse `text` over the declared coordinate names.
pub fn parse(text: &str, coords: &[String]) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        cursor: 0,
        end_offset: text.len(),
        coords,
    };
    let e = parser.expr()?;
    if let Some((_, offset)) = parser.peek() {
        return Err(ParseError::Unexpected {
            expected: "end of input",
            offset: *offset,
        });
    }
    Ok(e)
}

// Pretty-printing precedence levels; higher binds tighter.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
            Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
            Expr::Neg(..) => PREC_NEG,
            Expr::Pow(..) => PREC_POW,
            Expr::Const(c) if *c < 0.0 => PREC_NEG,
            _ => PREC_ATOM,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{c}")?,
            Expr::Var { name, .. } => write!(f, "{name}")?,
            Expr::Add(a, b) => {
                a.fmt_prec(f, PREC_ADD)?;
                write!(f, " + ")?;
                b.fmt_prec(f, PREC_ADD + 1)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, PREC_ADD)?;
                write!(f, " - ")?;
                b.fmt_prec(f, PREC_ADD + 1)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, PREC_MUL)?;
                write!(f, "*")?;
                b.fmt_prec(f, PREC_MUL + 1)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, PREC_MUL)?;
                write!(f, "/")?;
                b.fmt_prec(f, PREC_MUL + 1)?;
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, PREC_NEG)?;
            }
            Expr::Pow(a, k) => {
                a.fmt_prec(f, PREC_ATOM)?;
                if *k < 0 {
                    write!(f, "^({k})")?;
                } else {
                    write!(f, "^{k}")?;
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})")?,
            Expr::Cos(a) => write!(f, "cos({a})")?,
            Expr::Exp(a) => write!(f, "exp({a})")?,
            Expr::Log(a) => write!(f, "log({a})")?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }

    /// Indices of all coordinates referenced by the expression.
    pub fn coordinates_used(&self) -> Vec<usize> {
        let mut used = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Var { index, .. } = e {
                if !used.contains(index) {
                    used.push(*index);
                }
            }
        });
        used.sort_unstable();
        used
    }

    /// Replace every reference to coordinate `index` by the constant `value`.
    pub fn substitute(&self, index: usize, value: f64) -> Expr {
        match self {
            Expr::Var { index: i, .. } if *i == index => Expr::Const(value),
            Expr::Const(_) | Expr::Var { .. } => self.clone(),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.substitute(index, value)),
                Box::new(b.substitute(index, value)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.substitute(index, value)),
                Box::new(b.substitute(index, value)),
            ),
            Expr::Mul(a, b) => Expr::Mul(
                Box::new(a.substitute(index, value)),
                Box::new(b.substitute(index, value)),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(a.substitute(index, value)),
                Box::new(b.substitute(index, value)),
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(index, value))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(index, value)), *k),
            Expr::Sin(a) => Expr::Sin(Box::new(a.substitute(index, value))),
            Expr::Cos(a) => Expr::Cos(Box::new(a.substitute(index, value))),
            Expr::Exp(a) => Expr::Exp(Box::new(a.substitute(index, value))),
            Expr::Log(a) => Expr::Log(Box::new(a.substitute(index, value))),
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var { .. } => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Exp(a)
            | Expr::Log(a) => a.visit(f),
        }
    }

    /// Extract the expression as an affine form `constant + Σ coeff_i · x_i`,
    /// if it is linear in the coordinates. Used for structural periodicity
    /// analysis of torus profiles.
    pub fn as_affine(&self, nvars: usize) -> Option<(f64, Vec<f64>)> {
        match self {
            Expr::Const(c) => Some((*c, vec![0.0; nvars])),
            Expr::Var { index, .. } => {
                let mut coeffs = vec![0.0; nvars];
                coeffs[*index] = 1.0;
                Some((0.0, coeffs))
            }
            Expr::Add(a, b) => {
                let (ca, va) = a.as_affine(nvars)?;
                let (cb, vb) = b.as_affine(nvars)?;
                Some((ca + cb, va.iter().zip(&vb).map(|(x, y)| x + y).collect()))
            }
            Expr::Sub(a, b) => {
                let (ca, va) = a.as_affine(nvars)?;
                let (cb, vb) = b.as_affine(nvars)?;
                Some((ca - cb, va.iter().zip(&vb).map(|(x, y)| x - y).collect()))
            }
            Expr::Neg(a) => {
                let (c, v) = a.as_affine(nvars)?;
                Some((-c, v.iter().map(|x| -x).collect()))
            }
            Expr::Mul(a, b) => {
                let (ca, va) = a.as_affine(nvars)?;
                let (cb, vb) = b.as_affine(nvars)?;
                if va.iter().all(|x| *x == 0.0) {
                    Some((ca * cb, vb.iter().map(|x| ca * x).collect()))
                } else if vb.iter().all(|x| *x == 0.0) {
                    Some((ca * cb, va.iter().map(|x| cb * x).collect()))
                } else {
                    None
                }
            }
            Expr::Div(a, b) => {
                let (ca, va) = a.as_affine(nvars)?;
                let (cb, vb) = b.as_affine(nvars)?;
                if vb.iter().all(|x| *x == 0.0) && cb != 0.0 {
                    Some((ca / cb, va.iter().map(|x| x / cb).collect()))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Structural 2π-periodicity check: every coordinate occurrence is inside
    /// a `sin`/`cos` whose argument is an integer-coefficient affine form (or
    /// itself already periodic). Sums, products, quotients, powers, `exp`,
    /// and `log` of periodic subexpressions stay periodic.
    pub fn is_structurally_periodic(&self, nvars: usize) -> bool {
        if self.coordinates_used().is_empty() {
            return true;
        }
        match self {
            Expr::Const(_) => true,
            Expr::Var { .. } => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_structurally_periodic(nvars) && b.is_structurally_periodic(nvars)
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => {
                a.is_structurally_periodic(nvars)
            }
            Expr::Sin(a) | Expr::Cos(a) => {
                if a.is_structurally_periodic(nvars) {
                    return true;
                }
                match a.as_affine(nvars) {
                    Some((_, coeffs)) => coeffs
                        .iter()
                        .all(|c| (c - c.round()).abs() < 1e-9),
                    None => false,
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
