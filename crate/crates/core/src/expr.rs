//! Scalar coordinate expressions.
//!
//! Grammar (usual precedence, left associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := number | identifier | '(' expr ')'
//! ```
//!
//! `-x^2` parses as `-(x^2)`. Exponents are integer literals only.

use std::fmt;

use crate::jet::Jet2;
use crate::scalar::{Coefficient, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared variable `{name}` at offset {offset}")]
    UndeclaredVariable { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero evaluating `{expression}`")]
    DivisionByZero { expression: String },
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
}

/// A parsed expression in the coordinates of one chart.
///
/// Immutable after parsing; evaluation is a pure function of the point.
#[derive(Debug, Clone)]
pub struct Expression {
    root: Node,
    arity: usize,
    text: String,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.root == other.root
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Parse `text` over the ordered chart variables `chart_vars`.
pub fn parse_expression<S: AsRef<str>>(text: &str, chart_vars: &[S]) -> Result<Expression, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars: chart_vars.iter().map(|s| s.as_ref()).collect(),
        end: text.len(),
    };
    if parser.tokens.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let root = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::Syntax {
            offset: tok.offset,
            message: format!("unexpected {}", tok.kind),
        });
    }
    Ok(Expression {
        root,
        arity: chart_vars.len(),
        text: text.trim().to_string(),
    })
}

impl Expression {
    pub fn constant(value: f64) -> Self {
        Self {
            root: Node::Const(value),
            arity: 0,
            text: format!("{value}"),
        }
    }

    /// Number of chart variables the expression was parsed against.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self.root, Node::Const(c) if c == 0.0)
    }

    /// Evaluate with coordinates given as coefficients of any kind.
    pub fn eval<T: Real, C: Coefficient<T>>(&self, coords: &[C]) -> Result<C, EvalError> {
        if self.arity > 0 && coords.len() != self.arity {
            return Err(EvalError::Arity {
                expected: self.arity,
                got: coords.len(),
            });
        }
        self.eval_node(&self.root, coords)
    }

    /// Plain value at a point.
    pub fn value_at<T: Real>(&self, point: &[T]) -> Result<T, EvalError> {
        self.eval::<T, T>(point)
    }

    /// Value, gradient and Hessian at `point`.
    pub fn evaluate_jet<T: Real>(&self, point: &[T]) -> Result<Jet2<T>, EvalError> {
        let dim = point.len();
        let vars: Vec<Jet2<T>> = point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet2::variable(x, i, dim))
            .collect();
        self.eval::<T, Jet2<T>>(&vars)
    }

    fn division_by_zero(&self) -> EvalError {
        EvalError::DivisionByZero {
            expression: self.text.clone(),
        }
    }

    fn eval_node<T: Real, C: Coefficient<T>>(&self, node: &Node, coords: &[C]) -> Result<C, EvalError> {
        Ok(match node {
            Node::Const(c) => C::constant(T::lit(*c)),
            Node::Var(i) => coords[*i].clone(),
            Node::Neg(a) => -self.eval_node(a, coords)?,
            Node::Add(a, b) => self.eval_node(a, coords)? + self.eval_node(b, coords)?,
            Node::Sub(a, b) => self.eval_node(a, coords)? - self.eval_node(b, coords)?,
            Node::Mul(a, b) => self.eval_node(a, coords)? * self.eval_node(b, coords)?,
            Node::Div(a, b) => {
                let num = self.eval_node(a, coords)?;
                let den = self.eval_node(b, coords)?;
                if den.value() == T::zero() {
                    return Err(self.division_by_zero());
                }
                num * den.recip()
            }
            Node::Pow(a, n) => {
                let base = self.eval_node(a, coords)?;
                let pos = power(base, n.unsigned_abs());
                if *n < 0 {
                    if pos.value() == T::zero() {
                        return Err(self.division_by_zero());
                    }
                    pos.recip()
                } else {
                    pos
                }
            }
        })
    }
}

fn power<T: Real, C: Coefficient<T>>(base: C, mut n: u32) -> C {
    let mut result = C::one();
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            result = result * sq.clone();
        }
        n >>= 1;
        if n > 0 {
            sq = sq.clone() * sq;
        }
    }
    result
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Number(x) => write!(f, "number {x}"),
            Kind::Ident(s) => write!(f, "identifier `{s}`"),
            Kind::Plus => f.write_str("`+`"),
            Kind::Minus => f.write_str("`-`"),
            Kind::Star => f.write_str("`*`"),
            Kind::Slash => f.write_str("`/`"),
            Kind::Caret => f.write_str("`^`"),
            Kind::LParen => f.write_str("`(`"),
            Kind::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    offset: usize,
    len: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(Kind::Plus),
            b'-' => Some(Kind::Minus),
            b'*' => Some(Kind::Star),
            b'/' => Some(Kind::Slash),
            b'^' => Some(Kind::Caret),
            b'(' => Some(Kind::LParen),
            b')' => Some(Kind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token { kind, offset: start, len: 1 });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{lexeme}`"),
            })?;
            tokens.push(Token {
                kind: Kind::Number(value),
                offset: start,
                len: i - start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                kind: Kind::Ident(text[start..i].to_string()),
                offset: start,
                len: i - start,
            });
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: Vec<&'a str>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, message: &str) -> ParseError {
        let (offset, found) = match self.peek() {
            Some(t) => (t.offset, format!("{}", t.kind)),
            None => (self.end, "end of input".to_string()),
        };
        ParseError::Syntax {
            offset,
            message: format!("{message}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Kind::Plus) {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Kind::Minus) {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Kind::Star) {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Kind::Slash) {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(&Kind::Minus) {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(&Kind::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if !self.eat(&Kind::Caret) {
            return Ok(base);
        }
        let negative = self.eat(&Kind::Minus);
        match self.peek().cloned() {
            Some(Token {
                kind: Kind::Number(n),
                offset,
                len,
            }) => {
                if n.fract() != 0.0 || n.abs() > i32::MAX as f64 {
                    return Err(ParseError::Syntax {
                        offset,
                        message: format!("exponent must be an integer, found {n}"),
                    });
                }
                self.pos += 1;
                let exponent = if negative { -(n as i32) } else { n as i32 };
                if self.peek().map(|t| &t.kind) == Some(&Kind::Caret) {
                    return Err(ParseError::Syntax {
                        offset: offset + len,
                        message: "chained powers need parentheses".into(),
                    });
                }
                Ok(Node::Pow(Box::new(base), exponent))
            }
            _ => Err(self.error_here("expected integer exponent")),
        }
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek().cloned() {
            Some(Token {
                kind: Kind::Number(n), ..
            }) => {
                self.pos += 1;
                Ok(Node::Const(n))
            }
            Some(Token {
                kind: Kind::Ident(name),
                offset,
                ..
            }) => {
                self.pos += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(ParseError::UndeclaredVariable { name, offset }),
                }
            }
            Some(Token {
                kind: Kind::LParen, ..
            }) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Kind::RParen) {
                    return Err(self.error_here("expected `)`"));
                }
                Ok(inner)
            }
            _ => {
                let err = self.error_here("expected number, variable or `(`");
                self.bump();
                Err(err)
            }
        }
    }
}
