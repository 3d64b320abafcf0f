//! Arithmetic expressions in one variable `u`, for explicit profiles in job
//! files.
//!
//! Grammar: `+ - * / ^`, parentheses, unary minus, decimal and scientific
//! literals, the constants `pi` and `e`, and the usual elementary functions
//! of one argument. `^` is right associative and binds tighter than unary
//! minus, so `-u^2 = -(u^2)`.
//!
//! Besides plain values, an expression evaluates to its first two
//! derivatives in `u` by propagating second-order jets through the tree.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at character {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Asin,
    Acos,
    Atan,
    Asinh,
    Acosh,
    Atanh,
    Abs,
}

impl Func {
    /// `(f, f′, f″)` at `x`.
    fn jet(self, x: f64) -> (f64, f64, f64) {
        match self {
            Func::Sqrt => {
                let r = x.sqrt();
                (r, 0.5 / r, -0.25 / (x * r))
            }
            Func::Exp => {
                let e = x.exp();
                (e, e, e)
            }
            Func::Ln => (x.ln(), 1.0 / x, -1.0 / (x * x)),
            Func::Sin => (x.sin(), x.cos(), -x.sin()),
            Func::Cos => (x.cos(), -x.sin(), -x.cos()),
            Func::Tan => {
                let t = x.tan();
                (t, 1.0 + t * t, 2.0 * t * (1.0 + t * t))
            }
            Func::Sinh => (x.sinh(), x.cosh(), x.sinh()),
            Func::Cosh => (x.cosh(), x.sinh(), x.cosh()),
            Func::Tanh => {
                let t = x.tanh();
                (t, 1.0 - t * t, -2.0 * t * (1.0 - t * t))
            }
            Func::Asin => {
                let w = 1.0 - x * x;
                (x.asin(), 1.0 / w.sqrt(), x / (w * w.sqrt()))
            }
            Func::Acos => {
                let w = 1.0 - x * x;
                (x.acos(), -1.0 / w.sqrt(), -x / (w * w.sqrt()))
            }
            Func::Atan => {
                let w = 1.0 + x * x;
                (x.atan(), 1.0 / w, -2.0 * x / (w * w))
            }
            Func::Asinh => {
                let w = x * x + 1.0;
                (x.asinh(), 1.0 / w.sqrt(), -x / (w * w.sqrt()))
            }
            Func::Acosh => {
                let w = x * x - 1.0;
                (x.acosh(), 1.0 / w.sqrt(), -x / (w * w.sqrt()))
            }
            Func::Atanh => {
                let w = 1.0 - x * x;
                (x.atanh(), 1.0 / w, 2.0 * x / (w * w))
            }
            Func::Abs => (x.abs(), if x == 0.0 { 0.0 } else { x.signum() }, 0.0),
        }
    }
}

/// Value and first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    fn constant(value: f64) -> Self {
        Self { value, d1: 0.0, d2: 0.0 }
    }

    fn chain(self, (f, df, ddf): (f64, f64, f64)) -> Self {
        Self { value: f, d1: df * self.d1, d2: ddf * self.d1 * self.d1 + df * self.d2 }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        }
    }

    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        let q1 = (self.d1 - q * o.d1) / o.value;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.value;
        Self { value: q, d1: q1, d2: q2 }
    }

    fn pow(self, o: Self) -> Self {
        if o.d1 == 0.0 && o.d2 == 0.0 {
            let (a, b) = (self.value, o.value);
            return self.chain((a.powf(b), b * a.powf(b - 1.0), b * (b - 1.0) * a.powf(b - 2.0)));
        }
        // a^b = exp(b ln a)
        let ln = self.chain(Func::Ln.jet(self.value));
        o.mul(ln).chain(Func::Exp.jet(o.value * ln.value))
    }
}

/// A parsed expression.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Node,
    source: String,
}

fn function(name: &str) -> Option<Func> {
    Some(match name {
        "sqrt" => Func::Sqrt,
        "exp" => Func::Exp,
        "ln" | "log" => Func::Ln,
        "sin" => Func::Sin,
        "cos" => Func::Cos,
        "tan" => Func::Tan,
        "sinh" => Func::Sinh,
        "cosh" => Func::Cosh,
        "tanh" => Func::Tanh,
        "asin" => Func::Asin,
        "acos" => Func::Acos,
        "atan" => Func::Atan,
        "asinh" => Func::Asinh,
        "acosh" => Func::Acosh,
        "atanh" => Func::Atanh,
        "abs" => Func::Abs,
        _ => return None,
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of expression"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "u" => Ok(Node::Var),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => {
                        let Some(f) = function(name) else {
                            self.pos = start;
                            return self.err(format!("unknown name '{name}'"));
                        };
                        if !self.eat(b'(') {
                            return self.err(format!("expected '(' after {name}"));
                        }
                        let arg = self.sum()?;
                        if !self.eat(b')') {
                            return self.err("expected ')'");
                        }
                        Ok(Node::Call(f, Box::new(arg)))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                // a bare `e` after a number is not an exponent
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        match text.parse() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => {
                self.pos = start;
                self.err(format!("bad number '{text}'"))
            }
        }
    }
}

fn eval(node: &Node, u: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var => u,
        Node::Neg(x) => -eval(x, u),
        Node::Bin(op, l, r) => {
            let (l, r) = (eval(l, u), eval(r, u));
            match op {
                Op::Add => l + r,
                Op::Sub => l - r,
                Op::Mul => l * r,
                Op::Div => l / r,
                Op::Pow => l.powf(r),
            }
        }
        Node::Call(f, x) => f.jet(eval(x, u)).0,
    }
}

fn eval_jet(node: &Node, u: f64) -> Jet {
    match node {
        Node::Num(v) => Jet::constant(*v),
        Node::Var => Jet { value: u, d1: 1.0, d2: 0.0 },
        Node::Neg(x) => {
            let j = eval_jet(x, u);
            Jet { value: -j.value, d1: -j.d1, d2: -j.d2 }
        }
        Node::Bin(op, l, r) => {
            let (l, r) = (eval_jet(l, u), eval_jet(r, u));
            match op {
                Op::Add => Jet { value: l.value + r.value, d1: l.d1 + r.d1, d2: l.d2 + r.d2 },
                Op::Sub => Jet { value: l.value - r.value, d1: l.d1 - r.d1, d2: l.d2 - r.d2 },
                Op::Mul => l.mul(r),
                Op::Div => l.div(r),
                Op::Pow => l.pow(r),
            }
        }
        Node::Call(f, x) => {
            let j = eval_jet(x, u);
            j.chain(f.jet(j.value))
        }
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: source.as_bytes(), pos: 0 };
        let root = p.sum()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(Self { root, source: source.to_string() })
    }

    pub fn eval(&self, u: f64) -> f64 {
        eval(&self.root, u)
    }

    /// `(E, E′, E″)` at `u`.
    pub fn jet(&self, u: f64) -> Jet {
        eval_jet(&self.root, u)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(s: &str, u: f64) -> f64 {
        Expr::parse(s).unwrap().eval(u)
    }

    #[test]
    fn precedence() {
        assert_eq!(at("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(at("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(at("-u^2", 3.0), -9.0);
        assert_eq!(at("2^3^2", 0.0), 512.0);
        assert_eq!(at("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(at("2 - 3 - 4", 0.0), -5.0);
    }

    #[test]
    fn literals_and_functions() {
        assert_eq!(at("1.5e-1 * 2", 0.0), 0.3);
        assert_eq!(at("2*e", 0.0), 2.0 * std::f64::consts::E);
        assert!(Expr::parse("2e").is_err());
        assert_eq!(at("sqrt(u^2 + 1)", 2.0), 5f64.sqrt());
        assert_eq!(at("(u*u + 2)/2", 1.0), 1.5);
        assert_eq!(at("cosh(asinh(u))", 0.7), 0.7f64.asinh().cosh());
        assert_eq!(at("pi", 0.0), std::f64::consts::PI);
    }

    #[test]
    fn jets_match_hand_derivatives() {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * (1.0 + b.abs());
        let cases: Vec<(&str, fn(f64) -> (f64, f64, f64))> = vec![
            ("sqrt(u^2 + 1)", |u| {
                let w = (u * u + 1.0).sqrt();
                (w, u / w, 1.0 / (w * w * w))
            }),
            ("(u^2 + 2)/2", |u| (0.5 * (u * u + 2.0), u, 1.0)),
            ("u^u", |u| {
                let v = u.powf(u);
                let l = u.ln() + 1.0;
                (v, v * l, v * (l * l + 1.0 / u))
            }),
            ("exp(-u)*sin(2*u)", |u| {
                let (e, s, c) = ((-u).exp(), (2.0 * u).sin(), (2.0 * u).cos());
                (e * s, e * (2.0 * c - s), e * (-3.0 * s - 4.0 * c))
            }),
            ("1/cosh(u)", |u| {
                let (c, t) = (u.cosh(), u.tanh());
                (1.0 / c, -t / c, (t * t - (1.0 - t * t)) / c)
            }),
            ("atan(u) - asinh(u)/3", |u| {
                let (w, v) = (1.0 + u * u, (1.0 + u * u).sqrt());
                (u.atan() - u.asinh() / 3.0, 1.0 / w - 1.0 / (3.0 * v), -2.0 * u / (w * w) + u / (3.0 * v * v * v))
            }),
        ];
        for (src, exact) in cases {
            let e = Expr::parse(src).unwrap();
            for &u in &[0.3, 0.9, 1.7] {
                let j = e.jet(u);
                let (v, d1, d2) = exact(u);
                assert!(close(j.value, v) && close(j.d1, d1) && close(j.d2, d2), "{src} at {u}: {j:?} vs {:?}", (v, d1, d2));
                assert_eq!(j.value.to_bits(), e.eval(u).to_bits());
            }
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = Expr::parse("1 + foo(u)").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(Expr::parse("(u + 1").is_err());
        assert!(Expr::parse("u u").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("sin u").is_err());
    }
}
