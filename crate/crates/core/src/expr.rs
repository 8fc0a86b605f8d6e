//! Scalar expression parsing and evaluation.
//!
//! Expressions are the textual front door for objectives and constraints.
//! The grammar is a single-pass recursive descent over
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! so `^` binds tighter than unary minus and is right-associative. There is
//! no implicit multiplication and whitespace is insignificant. Every
//! variable reference must appear in the declared variable list; unknown
//! names are rejected at parse time, not at evaluation time.

use std::fmt;

use thiserror::Error;

/// Built-in scalar functions callable from expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Binary arithmetic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Abstract syntax tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Var {
        name: String,
        index: usize,
    },
    Neg(Box<Node>),
    Binary {
        op: BinOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Call {
        func: Func,
        args: Vec<Node>,
    },
}

/// A parsed expression bound to an ordered variable list.
///
/// Immutable after parse; evaluation is pure, so expressions can be shared
/// and evaluated concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    vars: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain fault in `{operation}` at operand {operand}")]
    DomainFault {
        operation: &'static str,
        operand: f64,
    },
    #[error("assignment does not cover variable `{0}`")]
    UnboundVariable(String),
    #[error("assignment has {got} entries, expression expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Parses `source` against the declared, ordered variable list.
pub fn parse(source: &str, vars: &[String]) -> Result<Expression, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let root = parser.parse_expr()?;
    match parser.peek() {
        Token::End => Ok(Expression {
            root,
            vars: vars.to_vec(),
        }),
        tok => Err(ParseError::Syntax {
            position: parser.position(),
            message: format!("unexpected trailing `{}`", tok),
        }),
    }
}

impl Expression {
    /// Number of declared variables (the expression arity).
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Declared variable names, in order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Evaluates at a point given in declared-variable order.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64, EvalError> {
        if point.len() != self.vars.len() {
            return Err(EvalError::ArityMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        eval_node(&self.root, point)
    }

    /// Evaluates against a name -> value assignment. The assignment must
    /// cover every free variable of the expression.
    pub fn evaluate_named(&self, assignment: &[(&str, f64)]) -> Result<f64, EvalError> {
        let mut point = vec![f64::NAN; self.vars.len()];
        let mut bound = vec![false; self.vars.len()];
        for (name, value) in assignment {
            if let Some(i) = self.vars.iter().position(|v| v == name) {
                point[i] = *value;
                bound[i] = true;
            }
        }
        for name in self.free_variables() {
            let i = self.vars.iter().position(|v| *v == name).unwrap();
            if !bound[i] {
                return Err(EvalError::UnboundVariable(name));
            }
        }
        eval_node(&self.root, &point)
    }

    /// Free variable names in first-appearance order, without duplicates.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_vars(&self.root, &mut out);
        out
    }

    pub fn root(&self) -> &Node {
        &self.root
    }
}

fn collect_vars(node: &Node, out: &mut Vec<String>) {
    match node {
        Node::Number(_) => {}
        Node::Var { name, .. } => {
            if !out.iter().any(|n| n == name) {
                out.push(name.clone());
            }
        }
        Node::Neg(inner) => collect_vars(inner, out),
        Node::Binary { lhs, rhs, .. } => {
            collect_vars(lhs, out);
            collect_vars(rhs, out);
        }
        Node::Call { args, .. } => {
            for a in args {
                collect_vars(a, out);
            }
        }
    }
}

fn eval_node(node: &Node, point: &[f64]) -> Result<f64, EvalError> {
    let fault =
        |operation: &'static str, operand: f64| EvalError::DomainFault { operation, operand };
    let v = match node {
        Node::Number(v) => *v,
        Node::Var { index, .. } => point[*index],
        Node::Neg(inner) => -eval_node(inner, point)?,
        Node::Binary { op, lhs, rhs } => {
            let a = eval_node(lhs, point)?;
            let b = eval_node(rhs, point)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(fault("divide", b));
                    }
                    a / b
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(fault("pow", b));
                    }
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(fault("pow", a));
                    }
                    a.powf(b)
                }
            }
        }
        Node::Call { func, args } => {
            let a = eval_node(&args[0], point)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(fault("log", a));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(fault("sqrt", a));
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
                Func::Min => a.min(eval_node(&args[1], point)?),
                Func::Max => a.max(eval_node(&args[1], point)?),
            }
        }
    };
    if v.is_nan() {
        return Err(fault("nan-result", v));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(v) => write!(f, "{}", v),
            Token::Ident(s) => write!(f, "{}", s),
            Token::Plus => write!(f, "+"),
            Token::Minus => write!(f, "-"),
            Token::Star => write!(f, "*"),
            Token::Slash => write!(f, "/"),
            Token::Caret => write!(f, "^"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Comma => write!(f, ","),
            Token::End => write!(f, "<end>"),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                tokens.push((Token::Star, i));
                i += 1;
            }
            '/' => {
                tokens.push((Token::Slash, i));
                i += 1;
            }
            '^' => {
                tokens.push((Token::Caret, i));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            ',' => {
                tokens.push((Token::Comma, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
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
                let text = &source[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    position: start,
                    message: format!("malformed number `{}`", text),
                })?;
                tokens.push((Token::Number(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((Token::Ident(source[start..i].to_string()), start));
            }
            other => {
                return Err(ParseError::Syntax {
                    position: i,
                    message: format!("unexpected character `{}`", other),
                });
            }
        }
    }
    tokens.push((Token::End, source.len()));
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                position: self.position(),
                message: format!("expected `{}`, found `{}`", want, self.peek()),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_term()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_factor()?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            let inner = self.parse_factor()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node, ParseError> {
        let base = self.parse_atom()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.parse_factor()?;
            return Ok(Node::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Node, ParseError> {
        let position = self.position();
        match self.bump() {
            Token::Number(v) => Ok(Node::Number(v)),
            Token::Ident(name) => {
                if *self.peek() == Token::LParen {
                    self.bump();
                    let func = Func::from_name(&name)
                        .ok_or_else(|| ParseError::UnknownFunction(name.clone()))?;
                    let mut args = vec![self.parse_expr()?];
                    while *self.peek() == Token::Comma {
                        self.bump();
                        args.push(self.parse_expr()?);
                    }
                    self.expect(Token::RParen)?;
                    if args.len() != func.arity() {
                        return Err(ParseError::Syntax {
                            position,
                            message: format!(
                                "`{}` takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    Ok(Node::Call { func, args })
                } else {
                    match self.vars.iter().position(|v| *v == name) {
                        Some(index) => Ok(Node::Var { name, index }),
                        None => Err(ParseError::UnknownVariable(name)),
                    }
                }
            }
            Token::LParen => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            tok => Err(ParseError::Syntax {
                position,
                message: format!("expected a value, found `{}`", tok),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

fn node_precedence(node: &Node) -> u8 {
    match node {
        Node::Number(_) | Node::Var { .. } | Node::Call { .. } => 5,
        Node::Neg(_) => 3,
        Node::Binary { op, .. } => op.precedence(),
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Number(v) => write!(f, "{}", v),
        Node::Var { name, .. } => write!(f, "{}", name),
        Node::Neg(inner) => {
            write!(f, "-")?;
            // `^` binds tighter than unary minus, so anything at or below
            // the additive/multiplicative level needs parens.
            if node_precedence(inner) <= 2 {
                write!(f, "(")?;
                write_node(inner, f)?;
                write!(f, ")")
            } else {
                write_node(inner, f)
            }
        }
        Node::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            let lhs_needs = match op {
                BinOp::Pow => node_precedence(lhs) <= p,
                _ => node_precedence(lhs) < p,
            };
            let rhs_needs = match op {
                // right-associative: a^b^c prints without parens on the right,
                // and a negated exponent is already a valid factor
                BinOp::Pow => node_precedence(rhs) < p && !matches!(**rhs, Node::Neg(_)),
                // left-associative: keep the right subtree grouped
                _ => node_precedence(rhs) <= p,
            };
            if lhs_needs {
                write!(f, "(")?;
                write_node(lhs, f)?;
                write!(f, ")")?;
            } else {
                write_node(lhs, f)?;
            }
            write!(f, " {} ", op.symbol())?;
            if rhs_needs {
                write!(f, "(")?;
                write_node(rhs, f)?;
                write!(f, ")")
            } else {
                write_node(rhs, f)
            }
        }
        Node::Call { func, args } => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_node(a, f)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}
