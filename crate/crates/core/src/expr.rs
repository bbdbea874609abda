//! Classical observables as text.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'|'+'] number)*
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Exponents are
//! numeric literals only; chained powers group left (`x^2^3` is `(x^2)^3`).
//! Functions: `sin cos exp sqrt abs`. Identifiers are resolved at evaluation
//! time against a binding table supplied by the chart.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("domain error in `{node}`: {message}")]
    Domain { node: String, message: String },
}

/// Canonical printing: every compound node is parenthesized, so the output
/// re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(base, p) => write!(f, "({base}^{p:?})"),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
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

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let negative = if self.eat(b'-') {
                true
            } else {
                self.eat(b'+');
                false
            };
            self.skip_ws();
            if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit() || *c == b'.') {
                return Err(self.error("exponent must be a numeric literal"));
            }
            let p = self.number()?;
            base = Expr::Pow(Box::new(base), if negative { -p } else { p });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if self.peek() == Some(b'(') {
                    let func = Func::from_name(name).ok_or(ExprError::Syntax {
                        pos: start,
                        message: format!("unknown function `{name}`"),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.error("expected `)` after function argument"));
                    }
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Ok(Expr::Var(name.to_string()))
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| ExprError::Syntax {
            pos: start,
            message: format!("malformed number `{text}`"),
        })
    }
}

/// Name → value table used by [`Expr::eval`].
pub type Bindings = HashMap<String, f64>;

impl Expr {
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, ExprError> {
        self.eval_with(&|name| bindings.get(name).copied())
    }

    /// Evaluates with a lookup closure (avoids building a map per point).
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, ExprError> {
        let domain = |node: &Expr, message: &str| ExprError::Domain {
            node: node.to_string(),
            message: message.to_string(),
        };
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => lookup(name).ok_or_else(|| ExprError::Unbound(name.clone()))?,
            Expr::Neg(e) => -e.eval_with(lookup)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval_with(lookup)?;
                let y = b.eval_with(lookup)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(base, p) => {
                let x = base.eval_with(lookup)?;
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    if x == 0.0 && *p < 0.0 {
                        return Err(domain(self, "zero raised to a negative power"));
                    }
                    x.powi(*p as i32)
                } else {
                    if x < 0.0 {
                        return Err(domain(self, "negative base with non-integer exponent"));
                    }
                    if x == 0.0 && *p < 0.0 {
                        return Err(domain(self, "zero raised to a negative power"));
                    }
                    x.powf(*p)
                }
            }
            Expr::Call(func, arg) => {
                let x = arg.eval_with(lookup)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(self, "square root of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    /// Whether any identifier in `names` occurs in the tree.
    pub fn mentions(&self, names: &[&str]) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => names.contains(&v.as_str()),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.mentions(names),
            Expr::Binary(_, a, b) => a.mentions(names) || b.mentions(names),
        }
    }

    /// Total degree as a trigonometric polynomial in the angle variables, or
    /// `None` when the tree is not a polynomial in `tau` and
    /// `sin`/`cos` of angles.
    pub fn trig_degree(&self) -> Option<u32> {
        self.trig_shape().map(|s| s.degree)
    }

    fn trig_shape(&self) -> Option<TrigShape> {
        match self {
            Expr::Num(_) => Some(TrigShape::CONSTANT),
            Expr::Var(v) if ANGLE_VARS.contains(&v.as_str()) => None,
            Expr::Var(v) if v == "tau" => Some(TrigShape {
                degree: 0,
                constant: false,
            }),
            Expr::Var(_) => Some(TrigShape::CONSTANT),
            Expr::Neg(e) => e.trig_shape(),
            Expr::Binary(op, a, b) => {
                let (sa, sb) = (a.trig_shape()?, b.trig_shape()?);
                match op {
                    BinOp::Add | BinOp::Sub => Some(TrigShape {
                        degree: sa.degree.max(sb.degree),
                        constant: sa.constant && sb.constant,
                    }),
                    BinOp::Mul => Some(TrigShape {
                        degree: sa.degree + sb.degree,
                        constant: sa.constant && sb.constant,
                    }),
                    BinOp::Div => sb.constant.then_some(sa),
                }
            }
            Expr::Pow(base, p) => {
                let s = base.trig_shape()?;
                if s.constant {
                    Some(s)
                } else if p.fract() == 0.0 && *p >= 0.0 {
                    Some(TrigShape {
                        degree: s.degree * (*p as u32),
                        constant: false,
                    })
                } else {
                    None
                }
            }
            Expr::Call(Func::Sin | Func::Cos, arg) => {
                if let Some(k) = angle_frequency(arg) {
                    return Some(TrigShape {
                        degree: k,
                        constant: k == 0,
                    });
                }
                arg.trig_shape().filter(|s| s.constant)
            }
            Expr::Call(_, arg) => arg.trig_shape().filter(|s| s.constant),
        }
    }
}

const ANGLE_VARS: [&str; 3] = ["theta", "phi", "chi"];

#[derive(Clone, Copy)]
struct TrigShape {
    degree: u32,
    /// No chart variables at all.
    constant: bool,
}

impl TrigShape {
    const CONSTANT: TrigShape = TrigShape {
        degree: 0,
        constant: true,
    };
}

/// `|k|` when `arg` is `k·angle` (or `angle·k`, `-angle`, `angle`) with integer `k`.
fn angle_frequency(arg: &Expr) -> Option<u32> {
    let int = |v: f64| (v.fract() == 0.0).then_some(v.abs() as u32);
    match arg {
        Expr::Var(v) if ANGLE_VARS.contains(&v.as_str()) => Some(1),
        Expr::Neg(e) => angle_frequency(e),
        Expr::Binary(BinOp::Mul, a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Num(k), e) | (e, Expr::Num(k)) => Some(int(*k)? * angle_frequency(e)?),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const X1: &str = "r*tau*cos(theta) - Hinv*sin(theta)";

    fn bind(pairs: &[(&str, f64)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn parses_ambient_coordinate() {
        let e = parse(X1).unwrap();
        let v = e
            .eval(&bind(&[("r", 0.5), ("tau", 0.0), ("theta", 0.0), ("Hinv", 1.0)]))
            .unwrap();
        assert_eq!(v, 0.0);
        let v = e
            .eval(&bind(&[("r", 0.5), ("tau", 1.0), ("theta", std::f64::consts::FRAC_PI_2), ("Hinv", 1.0)]))
            .unwrap();
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn literals_and_precedence() {
        assert_eq!(parse("1").unwrap(), Expr::Num(1.0));
        let b = Bindings::new();
        assert_eq!(parse("2+3*4").unwrap().eval(&b).unwrap(), 14.0);
        assert_eq!(parse("-2^2").unwrap().eval(&b).unwrap(), -4.0);
        assert_eq!(parse("2^-1").unwrap().eval(&b).unwrap(), 0.5);
        assert_eq!(parse("8/2/2").unwrap().eval(&b).unwrap(), 2.0);
        assert_eq!(parse("1-2-3").unwrap().eval(&b).unwrap(), -4.0);
        assert_eq!(parse("2^2^3").unwrap().eval(&b).unwrap(), 64.0);
        assert_eq!(parse(" 1.5e1 +\t.5 ").unwrap().eval(&b).unwrap(), 15.5);
        assert_eq!(parse("--3").unwrap().eval(&b).unwrap(), 3.0);
    }

    #[test]
    fn pythagorean_identity() {
        let e = parse("cos(theta)^2 + sin(theta)^2").unwrap();
        for k in 0..50 {
            let th = 0.37 * k as f64 - 7.0;
            let v = e.eval(&bind(&[("theta", th)])).unwrap();
            assert!((v - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("1 + * 2") {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(1 + 2"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("tau^theta"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("log(2)"), Err(ExprError::Syntax { pos: 0, .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("1 2"), Err(ExprError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn evaluation_errors() {
        let b = bind(&[("tau", 1.0)]);
        assert!(matches!(parse("1/ (tau - tau)").unwrap().eval(&b), Err(ExprError::Domain { .. })));
        assert!(matches!(parse("sqrt(-tau)").unwrap().eval(&b), Err(ExprError::Domain { .. })));
        assert!(matches!(parse("(-tau)^0.5").unwrap().eval(&b), Err(ExprError::Domain { .. })));
        assert_eq!(
            parse("tau + rho").unwrap().eval(&b),
            Err(ExprError::Unbound("rho".into()))
        );
        match parse("1/(tau-tau)").unwrap().eval(&b) {
            Err(ExprError::Domain { node, .. }) => assert_eq!(node, "(1.0 / (tau - tau))"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trig_degrees() {
        assert_eq!(parse(X1).unwrap().trig_degree(), Some(1));
        assert_eq!(parse(&format!("({X1})^2")).unwrap().trig_degree(), Some(2));
        assert_eq!(parse("exp(tau)").unwrap().trig_degree(), None);
        assert_eq!(parse("tau^3").unwrap().trig_degree(), Some(0));
        assert_eq!(parse("cos(3*theta)*sin(theta)").unwrap().trig_degree(), Some(4));
        assert_eq!(parse("theta").unwrap().trig_degree(), None);
        assert_eq!(parse("cos(tau)").unwrap().trig_degree(), None);
        assert_eq!(parse("sqrt(Hinv)*cos(theta)/2").unwrap().trig_degree(), Some(1));
        assert_eq!(parse("1/cos(theta)").unwrap().trig_degree(), None);
        assert_eq!(parse("cos(0.5*theta)").unwrap().trig_degree(), None);
    }

    #[test]
    fn mentions_variables() {
        let e = parse(X1).unwrap();
        assert!(e.mentions(&["theta"]));
        assert!(!e.mentions(&["chi", "phi"]));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Num),
            prop::sample::select(vec!["tau", "theta", "r", "Hinv"]).prop_map(|s| Expr::Var(s.into())),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]),
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
                (inner.clone(), -3i32..4).prop_map(|(e, p)| Expr::Pow(Box::new(e), p as f64)),
                (
                    prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs]),
                    inner
                )
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }
    }
}
